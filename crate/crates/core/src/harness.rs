//! Self-play games, batches with CSV output, and the belief-marginals demo.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::agent::{Agent, PolicySpec};
use crate::belief::{
    belief_marginals, literal_posterior_window, window_start, BeliefMarginals, Posterior,
    PriorKind,
};
use crate::error::{GameError, PlanError};
use crate::eval::Transcript;
use crate::game::{
    abandon_utility, apply_action, utility, Action, Cell, History, Message, Role, Scenario,
    UtilityConfig,
};
use crate::planning::{PipConfig, Planner};
use crate::semantics::{Semantics, Vocabulary};

pub const DEFAULT_MAX_TURNS: usize = 10;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("step {step}: {source}")]
    Step { step: usize, source: GameError },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GameResult {
    pub transcript: Transcript,
    pub utility: f64,
    /// Policies replaced by the random fallback during this game.
    pub fallbacks: usize,
}

impl GameResult {
    pub fn length(&self) -> usize {
        self.transcript.actions.len()
    }
}

/// Plays one game. `first` acts at odd steps, as the scenario's first
/// player; `second` answers. Both agents must be bound to `sem`.
pub fn run_game_with(
    first: &mut Agent,
    second: &mut Agent,
    seed: u64,
    max_turns: usize,
    utility_cfg: &UtilityConfig,
) -> Result<GameResult, HarnessError> {
    let sem = first.semantics().clone();
    if sem.scenario() != second.semantics().scenario() {
        return Err(HarnessError::Invalid("agents are bound to different scenarios".into()));
    }
    let scen = sem.scenario();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut history = History::new(scen.first_player);
    let before = first.fallbacks() + second.fallbacks();
    while history.len() < max_turns && !history.is_terminal() {
        let role = history.next_player();
        let agent = if role == scen.first_player { &mut *first } else { &mut *second };
        let dist = agent.policy(scen.private_state(role), &history)?;
        let action = dist.sample(&mut rng);
        history = apply_action(&sem, &history, action)
            .map_err(|source| HarnessError::Step { step: history.next_t(), source })?;
    }
    let abandoned = !history.is_terminal();
    let utility = if abandoned {
        abandon_utility(&history, utility_cfg)
    } else {
        utility(&history, scen, utility_cfg)?
    };
    let fallbacks = first.fallbacks() + second.fallbacks() - before;
    Ok(GameResult {
        transcript: Transcript::from_history(scen.clone(), &history, abandoned),
        utility,
        fallbacks,
    })
}

/// [`run_game_with`] on fresh agents built from policy specs.
pub fn run_game(
    policy_a: &PolicySpec,
    policy_b: &PolicySpec,
    scenario: &Scenario,
    seed: u64,
    max_turns: usize,
) -> Result<GameResult, HarnessError> {
    let sem = Arc::new(Semantics::new(scenario.clone()));
    let mut a = Agent::new(*policy_a, sem.clone())?;
    let mut b = Agent::new(*policy_b, sem)?;
    run_game_with(&mut a, &mut b, seed, max_turns, &utility_of(policy_a))
}

fn utility_of(spec: &PolicySpec) -> UtilityConfig {
    match spec {
        PolicySpec::Pip { config, .. } => config.utility(),
        _ => UtilityConfig::default(),
    }
}

/// One CSV row of a batch.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GameRow {
    pub scenario: usize,
    pub seed: u64,
    pub policy_a: String,
    pub policy_b: String,
    pub first_player: Role,
    pub length: usize,
    pub utility: f64,
    /// Empty when the game was abandoned.
    pub correct: Option<bool>,
    pub abandoned: bool,
    pub fallbacks: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Aggregate {
    pub games: usize,
    pub mean_utility: f64,
    pub mean_length: f64,
    /// Correct clicks over all games, abandoned ones included.
    pub correct_rate: f64,
    /// Games that ended in a click.
    pub click_rate: f64,
}

impl Aggregate {
    fn of<'a>(rows: impl IntoIterator<Item = &'a GameRow>) -> Aggregate {
        let (mut n, mut u, mut len, mut correct, mut clicked) = (0usize, 0.0, 0usize, 0usize, 0usize);
        for r in rows {
            n += 1;
            u += r.utility;
            len += r.length;
            correct += usize::from(r.correct == Some(true));
            clicked += usize::from(!r.abandoned);
        }
        let d = n.max(1) as f64;
        Aggregate {
            games: n,
            mean_utility: u / d,
            mean_length: len as f64 / d,
            correct_rate: correct as f64 / d,
            click_rate: clicked as f64 / d,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BatchReport {
    pub overall: Aggregate,
    pub per_scenario: Vec<Aggregate>,
    pub rows: Vec<GameRow>,
    #[serde(skip)]
    pub transcripts: Vec<Transcript>,
}

impl BatchReport {
    /// Per-game rows as CSV with a header line.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r).expect("rows serialize");
        }
        String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 csv")
    }
}

/// Plays every scenario once per seed. Agents are shared across the games
/// of a scenario so planner caches carry over; scenarios run in parallel
/// when enabled. Output order follows the inputs.
pub fn run_batch(
    policy_a: &PolicySpec,
    policy_b: &PolicySpec,
    scenarios: &[Scenario],
    seeds: &[u64],
    max_turns: usize,
) -> Result<BatchReport, HarnessError> {
    if scenarios.is_empty() || seeds.is_empty() {
        return Err(HarnessError::Invalid("a batch needs scenarios and seeds".into()));
    }
    let utility_cfg = utility_of(policy_a);
    let play = |idx: usize| -> Result<Vec<(GameRow, Transcript)>, HarnessError> {
        let sem = Arc::new(Semantics::new(scenarios[idx].clone()));
        let mut a = Agent::new(*policy_a, sem.clone())?;
        let mut b = Agent::new(*policy_b, sem)?;
        seeds
            .iter()
            .map(|&seed| {
                let g = run_game_with(&mut a, &mut b, seed, max_turns, &utility_cfg)?;
                let row = GameRow {
                    scenario: idx,
                    seed,
                    policy_a: policy_a.to_string(),
                    policy_b: policy_b.to_string(),
                    first_player: scenarios[idx].first_player,
                    length: g.length(),
                    utility: g.utility,
                    correct: g.transcript.correct(),
                    abandoned: g.transcript.abandoned,
                    fallbacks: g.fallbacks,
                };
                Ok((row, g.transcript))
            })
            .collect()
    };

    #[cfg(feature = "parallel")]
    let per: Vec<Vec<(GameRow, Transcript)>> = {
        use rayon::prelude::*;
        (0..scenarios.len()).into_par_iter().map(play).collect::<Result<_, _>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let per: Vec<Vec<(GameRow, Transcript)>> =
        (0..scenarios.len()).map(play).collect::<Result<_, _>>()?;

    let per_scenario = per.iter().map(|g| Aggregate::of(g.iter().map(|(r, _)| r))).collect();
    let (rows, transcripts): (Vec<GameRow>, Vec<Transcript>) = per.into_iter().flatten().unzip();
    Ok(BatchReport { overall: Aggregate::of(&rows), per_scenario, rows, transcripts })
}

/// Parses a comma-separated action list such as `blue top, yes, click(1,2)`.
/// Commas inside parentheses belong to the click.
pub fn parse_action_list(text: &str, vocab: &Vocabulary) -> Result<Vec<Action>, HarnessError> {
    let mut items = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in text.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                items.push(std::mem::take(&mut cur));
                continue;
            }
            _ => {}
        }
        cur.push(ch);
    }
    items.push(cur);
    items
        .iter()
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .enumerate()
        .map(|(i, s)| parse_action(s, vocab).map_err(|source| HarnessError::Step { step: i + 1, source }))
        .collect()
}

/// Parses `click(r,c)` or a message.
pub fn parse_action(text: &str, vocab: &Vocabulary) -> Result<Action, GameError> {
    let t = text.trim().to_lowercase();
    if let Some(rest) = t.strip_prefix("click") {
        let nums: Vec<u8> = rest
            .split(|c: char| !c.is_ascii_digit())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<u8>())
            .collect::<Result<_, _>>()
            .map_err(|e| GameError::InvalidArgument(format!("bad click {text:?}: {e}")))?;
        return match nums[..] {
            [row, col] => Ok(Action::Click(Cell::new(row, col))),
            _ => Err(GameError::InvalidArgument(format!("bad click {text:?}"))),
        };
    }
    Message::parse(&t, vocab).map(Action::Message)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MarginalsStep {
    /// Number of actions seen; 0 is the prior.
    pub t: usize,
    pub action: Option<String>,
    pub actor: Option<Role>,
    /// The belief was relaxed because the evidence was contradictory.
    pub fallback: bool,
    pub marginals: BeliefMarginals,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MarginalsReport {
    pub viewer: Role,
    pub level: usize,
    pub unconstrained_prior: bool,
    pub steps: Vec<MarginalsStep>,
}

impl MarginalsReport {
    /// Text rendering: a header per step followed by the matrix.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            match (&s.action, s.actor) {
                (Some(a), Some(r)) => out.push_str(&format!("t={} {r}: {a}", s.t)),
                _ => out.push_str("t=0 prior"),
            }
            if s.fallback {
                out.push_str(" (relaxed)");
            }
            out.push('\n');
            out.push_str(&s.marginals.render());
            out.push('\n');
        }
        out
    }
}

/// `viewer`'s marginal belief about the partner's goal-consistent cells
/// before any action and after each of `actions`. Defaults the viewer to the
/// player who moves second. The unconstrained prior is only available for
/// the literal listener (`config.k == 0`). A final click ends the game, so
/// no matrix follows it.
pub fn marginals_demo(
    scenario: &Scenario,
    actions: &[Action],
    viewer: Option<Role>,
    config: &PipConfig,
    prior: PriorKind,
) -> Result<MarginalsReport, HarnessError> {
    config.validate()?;
    if prior == PriorKind::Unconstrained && config.k > 0 {
        return Err(HarnessError::Invalid(
            "the unconstrained prior is only defined for k = 0".into(),
        ));
    }
    let sem = Arc::new(Semantics::new(scenario.clone()));
    let viewer = viewer.unwrap_or(scenario.first_player.other());
    let own = scenario.private_state(viewer);
    let mut planner =
        if config.k > 0 { Some(Planner::new(sem.clone(), *config)?.with_fallback(true)) } else { None };

    let mut history = History::new(scenario.first_player);
    let mut steps = Vec::new();
    for t in 0..=actions.len() {
        if t > 0 {
            history = apply_action(&sem, &history, actions[t - 1])
                .map_err(|source| HarnessError::Step { step: t, source })?;
        }
        if history.is_terminal() {
            break;
        }
        let (post, fallback) = match planner.as_mut() {
            Some(p) => {
                let before = p.stats().fallbacks;
                let post = p.posterior(viewer, own, &history, config.k)?;
                (post, p.stats().fallbacks > before)
            }
            None => literal_with_fallback(&sem, &history, viewer, own, prior, config.b),
        };
        let last = t.checked_sub(1).map(|i| history.steps()[i]);
        steps.push(MarginalsStep {
            t,
            action: last.map(|s| s.action.to_string()),
            actor: last.map(|s| s.role),
            fallback,
            marginals: belief_marginals(&post, scenario.rows, scenario.cols),
        });
    }
    Ok(MarginalsReport {
        viewer,
        level: config.k,
        unconstrained_prior: prior == PriorKind::Unconstrained,
        steps,
    })
}

/// Literal posterior over the lookback window, relaxed to the last action
/// and then to the prior on contradiction.
fn literal_with_fallback(
    sem: &Semantics,
    history: &History,
    viewer: Role,
    own: crate::game::PrivateState,
    prior: PriorKind,
    b: Option<usize>,
) -> (Posterior, bool) {
    let start = window_start(history.len(), b);
    if let Ok(p) = literal_posterior_window(sem, history, viewer, own, prior, start) {
        return (p, false);
    }
    let start = window_start(history.len(), Some(1));
    let p = literal_posterior_window(sem, history, viewer, own, prior, start)
        .unwrap_or_else(|_| Posterior::uniform(prior.support(own)));
    (p, true)
}
