//! Recorded games: the JSONL transcript format, canonicalization of free
//! text into the closed vocabulary, and the likelihood, rank, entropy and
//! score metrics used to compare policies against recorded play.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::agent::{Agent, PolicySpec};
use crate::error::{GameError, PlanError};
use crate::game::{check_action, Action, Cell, History, Message, Role, Scenario};
use crate::planning::PolicyDistribution;
use crate::semantics::{Semantics, Vocabulary};

/// One line of a transcript file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub scenario: Scenario,
    pub actions: Vec<ActionRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome: Option<Outcome>,
    /// The turn cap ended the game without a click.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub abandoned: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionRecord {
    pub t: usize,
    pub player: Role,
    #[serde(flatten)]
    pub kind: RecordKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum RecordKind {
    Message {
        /// Text as typed.
        raw: String,
        #[serde(default)]
        words: Vec<String>,
    },
    Click {
        row: u8,
        col: u8,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clicked: Option<Cell>,
    pub correct: bool,
}

impl ActionRecord {
    pub fn from_action(t: usize, player: Role, action: &Action) -> Self {
        let kind = match action {
            Action::Message(m) => {
                let words: Vec<String> = m.words().into_iter().map(String::from).collect();
                RecordKind::Message { raw: words.join(" "), words }
            }
            Action::Click(c) => RecordKind::Click { row: c.row, col: c.col },
        };
        ActionRecord { t, player, kind }
    }
}

impl Transcript {
    /// Builds a transcript from a finished or capped game.
    pub fn from_history(scenario: Scenario, history: &History, abandoned: bool) -> Self {
        let actions = history
            .steps()
            .iter()
            .enumerate()
            .map(|(i, st)| ActionRecord::from_action(i + 1, st.role, &st.action))
            .collect();
        let outcome = match history.last().map(|st| st.action) {
            Some(Action::Click(c)) => {
                Some(Outcome { clicked: Some(c), correct: scenario.is_goal(c) })
            }
            _ => None,
        };
        Transcript { scenario, actions, outcome, abandoned }
    }

    /// Parses the actions into a history, canonicalizing message text.
    /// Fails on text that does not canonicalize or on out-of-turn records.
    pub fn to_history(&self, vocab: &Vocabulary) -> Result<History, GameError> {
        let mut h = History::new(self.scenario.first_player);
        for rec in &self.actions {
            if rec.player != h.next_player() || rec.t != h.next_t() {
                return Err(GameError::InvalidArgument(format!(
                    "record t={} by {} is out of turn",
                    rec.t, rec.player
                )));
            }
            if h.is_terminal() {
                return Err(GameError::InvalidArgument(format!(
                    "record t={} follows a click",
                    rec.t
                )));
            }
            h.push_unchecked(record_action(rec, vocab)?);
        }
        Ok(h)
    }

    pub fn game_length(&self) -> usize {
        self.actions.len()
    }

    pub fn correct(&self) -> Option<bool> {
        self.outcome.as_ref().map(|o| o.correct)
    }
}

fn record_action(rec: &ActionRecord, vocab: &Vocabulary) -> Result<Action, GameError> {
    match &rec.kind {
        RecordKind::Click { row, col } => Ok(Action::Click(Cell::new(*row, *col))),
        RecordKind::Message { raw, words } => {
            let text = if raw.trim().is_empty() { words.join(" ") } else { raw.clone() };
            canonicalize_message(&text, vocab)
                .map(|c| Action::Message(c.message))
                .ok_or(GameError::UnknownWord(text))
        }
    }
}

/// Result of mapping free text onto the closed vocabulary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Canonical {
    pub message: Message,
    /// More than two known words were present; only the first two were kept.
    pub truncated: bool,
}

/// Lowercases, splits on whitespace, trims punctuation and keeps known
/// words. A leading yes/no is the whole message; otherwise the first two
/// distinct informative words are used. `None` when no word is known.
pub fn canonicalize_message(raw: &str, vocab: &Vocabulary) -> Option<Canonical> {
    let lower = raw.to_lowercase();
    let kept: Vec<&str> = lower
        .split_whitespace()
        .map(|tok| tok.trim_matches(|c: char| !c.is_alphanumeric()))
        .filter(|tok| vocab.knows(tok))
        .collect();
    let first = *kept.first()?;
    let truncated = kept.len() > 2;
    match first {
        "yes" => return Some(Canonical { message: Message::Yes, truncated }),
        "no" => return Some(Canonical { message: Message::No, truncated }),
        _ => {}
    }
    let mut props = Vec::with_capacity(2);
    for tok in &kept {
        if let Some(p) = vocab.lookup(tok) {
            if !props.contains(&p) {
                props.push(p);
            }
            if props.len() == 2 {
                break;
            }
        }
    }
    let message = match props[..] {
        [a] => Message::single(a),
        [a, b, ..] => Message::pair(a, b),
        [] => return None,
    };
    Some(Canonical { message, truncated })
}

/// Keeps transcripts whose every message canonicalizes.
pub fn filter_dataset(transcripts: &[Transcript], vocab: &Vocabulary) -> Vec<Transcript> {
    transcripts.iter().filter(|t| t.to_history(vocab).is_ok()).cloned().collect()
}

/// Reads JSONL, skipping blank lines. Errors name the line number.
pub fn read_jsonl(text: &str) -> Result<Vec<Transcript>, GameError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let t: Transcript = serde_json::from_str(l).map_err(|e| {
                GameError::InvalidArgument(format!("line {}: {e}", i + 1))
            })?;
            let scenario = t.scenario.clone().validate()?;
            Ok(Transcript { scenario, ..t })
        })
        .collect()
}

pub fn write_jsonl(transcripts: &[Transcript]) -> String {
    let mut out = String::new();
    for t in transcripts {
        out.push_str(&serde_json::to_string(t).expect("transcripts serialize"));
        out.push('\n');
    }
    out
}

/// Score of one recorded action under a policy.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ActionScore {
    pub game: usize,
    pub t: usize,
    /// Natural log of the policy probability.
    pub ll: f64,
    pub rank: usize,
    pub legal_actions: usize,
    /// The action was outside the legal set and scored at the floor.
    pub illegal: bool,
}

/// Probability floor for an action outside the legal set.
pub fn floor_prob(eps: f64, n: usize) -> f64 {
    eps / (1.0 + eps * n as f64)
}

/// 1-based position of `taken` after a seeded shuffle and a stable sort by
/// descending probability; `N + 1` if it is not in the distribution.
pub fn action_rank<R: Rng + ?Sized>(
    dist: &PolicyDistribution,
    taken: &Action,
    rng: &mut R,
) -> usize {
    let mut order: Vec<(Action, f64)> = dist.entries.clone();
    order.shuffle(rng);
    order.sort_by(|a, b| b.1.total_cmp(&a.1));
    order.iter().position(|(a, _)| a == taken).map_or(order.len() + 1, |i| i + 1)
}

/// Per-action log-likelihoods of one game under `agent`, each action scored
/// with its actor's private state.
pub fn action_log_likelihood(
    agent: &mut Agent,
    history: &History,
    game: usize,
    rank_seed: u64,
) -> Result<Vec<ActionScore>, PlanError> {
    let sem = agent.semantics().clone();
    let eps = agent.spec().smoothing();
    let mut out = Vec::with_capacity(history.len());
    for (i, step) in history.steps().iter().enumerate() {
        let prefix = history.prefix(i);
        let own = sem.scenario().private_state(step.role);
        let dist = agent.policy(own, &prefix)?;
        let legal = check_action(&sem, &prefix, own, &step.action).is_ok();
        let p = dist.prob(&step.action);
        let (ll, illegal) = if legal && p > 0.0 {
            (p.ln(), false)
        } else {
            (floor_prob(eps, dist.len()).ln(), true)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(rank_seed ^ ((game as u64) << 16 | i as u64));
        let rank = if illegal { dist.len() + 1 } else { action_rank(&dist, &step.action, &mut rng) };
        out.push(ActionScore { game, t: i + 1, ll, rank, legal_actions: dist.len(), illegal });
    }
    Ok(out)
}

/// Percentile bootstrap interval for the mean.
pub fn bootstrap_ci(
    values: &[f64],
    resamples: usize,
    level: f64,
    seed: u64,
) -> Result<(f64, f64), GameError> {
    if values.is_empty() {
        return Err(GameError::InvalidArgument("bootstrap of an empty sample".into()));
    }
    if resamples == 0 || !(0.0..1.0).contains(&level) {
        return Err(GameError::InvalidArgument("need resamples > 0 and 0 <= level < 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = values.len();
    let mut means: Vec<f64> = (0..resamples)
        .map(|_| (0..n).map(|_| values[rng.gen_range(0..n)]).sum::<f64>() / n as f64)
        .collect();
    means.sort_by(f64::total_cmp);
    let tail = (1.0 - level) / 2.0;
    Ok((quantile(&means, tail), quantile(&means, 1.0 - tail)))
}

/// Linear-interpolated quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (sorted[hi] - sorted[lo]) * frac
    }
}

/// Shannon entropy (nats) of the empirical distribution of `items`.
pub fn entropy<T: Ord>(items: impl IntoIterator<Item = T>) -> f64 {
    let mut counts: BTreeMap<T, usize> = BTreeMap::new();
    let mut n = 0usize;
    for it in items {
        *counts.entry(it).or_default() += 1;
        n += 1;
    }
    counts
        .values()
        .map(|&c| {
            let p = c as f64 / n as f64;
            -p * p.ln()
        })
        .sum()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioEntropy {
    pub scenario: usize,
    pub games: usize,
    pub entropy: f64,
}

/// Groups games by scenario in order of first appearance.
fn scenario_groups(transcripts: &[Transcript]) -> Vec<Vec<usize>> {
    let mut keys: Vec<String> = Vec::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, t) in transcripts.iter().enumerate() {
        let key = serde_json::to_string(&t.scenario).expect("scenarios serialize");
        match keys.iter().position(|k| *k == key) {
            Some(g) => groups[g].push(i),
            None => {
                keys.push(key);
                groups.push(vec![i]);
            }
        }
    }
    groups
}

/// Entropy of first actions, per scenario.
pub fn first_step_entropy(transcripts: &[Transcript], vocab: &Vocabulary) -> Vec<ScenarioEntropy> {
    scenario_groups(transcripts)
        .into_iter()
        .enumerate()
        .filter_map(|(g, members)| {
            let firsts: Vec<String> = members
                .iter()
                .filter_map(|&i| {
                    let rec = transcripts[i].actions.first()?;
                    record_action(rec, vocab).ok().map(|a| a.to_string())
                })
                .collect();
            (!firsts.is_empty()).then(|| ScenarioEntropy {
                scenario: g,
                games: firsts.len(),
                entropy: entropy(firsts),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScoreStats {
    pub games: usize,
    /// Games with a recorded outcome.
    pub scored: usize,
    pub correct_rate: f64,
    /// Correct clicks per ten games.
    pub per_ten: f64,
    pub mean_length: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScoreReport {
    pub overall: Option<ScoreStats>,
    pub per_scenario: Vec<(usize, ScoreStats)>,
}

fn stats_of(transcripts: &[&Transcript]) -> Option<ScoreStats> {
    if transcripts.is_empty() {
        return None;
    }
    let outcomes: Vec<bool> = transcripts.iter().filter_map(|t| t.correct()).collect();
    let correct_rate = if outcomes.is_empty() {
        0.0
    } else {
        outcomes.iter().filter(|&&c| c).count() as f64 / outcomes.len() as f64
    };
    let mean_length = transcripts.iter().map(|t| t.game_length() as f64).sum::<f64>()
        / transcripts.len() as f64;
    Some(ScoreStats {
        games: transcripts.len(),
        scored: outcomes.len(),
        correct_rate,
        per_ten: correct_rate * 10.0,
        mean_length,
    })
}

/// Correct-click rate and game length, overall and per scenario.
pub fn score_stats(transcripts: &[Transcript]) -> ScoreReport {
    let all: Vec<&Transcript> = transcripts.iter().collect();
    let per_scenario = scenario_groups(transcripts)
        .into_iter()
        .enumerate()
        .filter_map(|(g, members)| {
            let ts: Vec<&Transcript> = members.iter().map(|&i| &transcripts[i]).collect();
            stats_of(&ts).map(|s| (g, s))
        })
        .collect();
    ScoreReport { overall: stats_of(&all), per_scenario }
}

/// Evaluation settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalOptions {
    pub resamples: usize,
    pub level: f64,
    pub seed: u64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { resamples: 1000, level: 0.90, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolicyReport {
    pub policy: String,
    pub actions: usize,
    pub mean_ll: f64,
    pub total_ll: f64,
    /// Bootstrap interval of the mean per-action log-likelihood.
    pub ci: (f64, f64),
    pub mean_rank: f64,
    pub illegal_actions: usize,
    /// Undefined policies replaced by the random fallback.
    pub fallbacks: usize,
    pub per_action: Vec<ActionScore>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalReport {
    pub games_read: usize,
    pub games_kept: usize,
    /// Messages with more than two known words, cut to two.
    pub truncated_messages: usize,
    pub policies: Vec<PolicyReport>,
    pub first_step_entropy: Vec<ScenarioEntropy>,
    pub scores: ScoreReport,
}

/// Filters the dataset and scores every kept action under each policy.
pub fn evaluate(
    transcripts: &[Transcript],
    policies: &[PolicySpec],
    opts: &EvalOptions,
) -> Result<EvalReport, PlanError> {
    let vocab = Vocabulary::default();
    let kept = filter_dataset(transcripts, &vocab);
    let truncated_messages = kept
        .iter()
        .flat_map(|t| &t.actions)
        .filter(|r| match &r.kind {
            RecordKind::Message { raw, words } => {
                let text = if raw.trim().is_empty() { words.join(" ") } else { raw.clone() };
                canonicalize_message(&text, &vocab).is_some_and(|c| c.truncated)
            }
            RecordKind::Click { .. } => false,
        })
        .count();
    let histories: Vec<History> = kept
        .iter()
        .map(|t| t.to_history(&vocab).expect("kept transcripts parse"))
        .collect();
    let groups = scenario_groups(&kept);

    let mut reports = Vec::with_capacity(policies.len());
    for spec in policies {
        let results = map_groups(&groups, |members| {
            let sem = Arc::new(Semantics::new(kept[members[0]].scenario.clone()));
            let mut agent = Agent::new(*spec, sem)?;
            let mut scores = Vec::new();
            for &g in members {
                scores.extend(action_log_likelihood(&mut agent, &histories[g], g, opts.seed)?);
            }
            Ok((scores, agent.fallbacks()))
        })?;
        let mut per_action: Vec<ActionScore> = Vec::new();
        let mut fallbacks = 0;
        for (scores, fb) in results {
            per_action.extend(scores);
            fallbacks += fb;
        }
        per_action.sort_by_key(|s| (s.game, s.t));
        let lls: Vec<f64> = per_action.iter().map(|s| s.ll).collect();
        let n = lls.len();
        let total_ll: f64 = lls.iter().sum();
        let (mean_ll, ci, mean_rank) = if n == 0 {
            (f64::NAN, (f64::NAN, f64::NAN), f64::NAN)
        } else {
            let ci = bootstrap_ci(&lls, opts.resamples, opts.level, opts.seed)
                .map_err(|e| PlanError::InvalidConfig { field: "bootstrap".into(), message: e.to_string() })?;
            let mean_rank =
                per_action.iter().map(|s| s.rank as f64).sum::<f64>() / n as f64;
            (total_ll / n as f64, ci, mean_rank)
        };
        reports.push(PolicyReport {
            policy: spec.to_string(),
            actions: n,
            mean_ll,
            total_ll,
            ci,
            mean_rank,
            illegal_actions: per_action.iter().filter(|s| s.illegal).count(),
            fallbacks,
            per_action,
        });
    }
    Ok(EvalReport {
        games_read: transcripts.len(),
        games_kept: kept.len(),
        truncated_messages,
        policies: reports,
        first_step_entropy: first_step_entropy(&kept, &vocab),
        scores: score_stats(&kept),
    })
}

/// Runs `f` on each scenario group, in parallel when enabled, keeping order.
fn map_groups<T, F>(groups: &[Vec<usize>], f: F) -> Result<Vec<T>, PlanError>
where
    T: Send,
    F: Fn(&[usize]) -> Result<T, PlanError> + Sync,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        groups.par_iter().map(|g| f(g)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        groups.iter().map(|g| f(g)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::Property;
    use crate::planning::smooth;
    use crate::testing::scen_a;

    fn canon(raw: &str) -> Option<String> {
        canonicalize_message(raw, &Vocabulary::default()).map(|c| c.message.to_string())
    }

    #[test]
    fn canonicalization() {
        assert_eq!(canon("middle maybe").as_deref(), Some("middle"));
        assert_eq!(canon("what color"), None);
        assert_eq!(canon("YES").as_deref(), Some("yes"));
        assert_eq!(canon("Top, blue!").as_deref(), Some("blue top"));
        assert_eq!(canon("blue blue").as_deref(), Some("blue"));
        assert_eq!(canon("round"), None);
        let c = canonicalize_message("blue top left", &Vocabulary::default()).unwrap();
        assert!(c.truncated);
        assert_eq!(c.message.to_string(), "blue top");
    }

    fn transcript(words: &[&str]) -> Transcript {
        let s = scen_a();
        let mut actions: Vec<ActionRecord> = words
            .iter()
            .enumerate()
            .map(|(i, w)| ActionRecord {
                t: i + 1,
                player: if i % 2 == 0 { Role::Letters } else { Role::Digits },
                kind: RecordKind::Message { raw: w.to_string(), words: vec![] },
            })
            .collect();
        let n = actions.len();
        actions.push(ActionRecord {
            t: n + 1,
            player: if n.is_multiple_of(2) { Role::Letters } else { Role::Digits },
            kind: RecordKind::Click { row: 1, col: 1 },
        });
        Transcript {
            scenario: s,
            actions,
            outcome: Some(Outcome { clicked: Some(Cell::new(1, 1)), correct: true }),
            abandoned: false,
        }
    }

    #[test]
    fn filtering() {
        let vocab = Vocabulary::default();
        let data = vec![transcript(&["blue", "yes"]), transcript(&["round thing"])];
        let kept = filter_dataset(&data, &vocab);
        assert_eq!(kept, vec![data[0].clone()]);
        assert_eq!(filter_dataset(&kept, &vocab), kept);
        assert!(filter_dataset(&[], &vocab).is_empty());
    }

    #[test]
    fn jsonl_format() {
        let line = r#"{"scenario":{"rows":2,"cols":3,"goal":{"letter":"B","digit":"2"},"first_player":"letters","objects":[{"row":1,"col":1,"color":"blue","shape":"square","letter":"B","digit":"2"},{"row":1,"col":2,"color":"yellow","shape":"circle","letter":"B","digit":"1"},{"row":1,"col":3,"color":"green","shape":"diamond","letter":"A","digit":"2"},{"row":2,"col":1,"color":"green","shape":"circle","letter":"A","digit":"2"},{"row":2,"col":2,"color":"blue","shape":"diamond","letter":"B","digit":"1"},{"row":2,"col":3,"color":"yellow","shape":"square","letter":"A","digit":"1"}]},"actions":[{"t":1,"player":"letters","type":"message","raw":"blue top","words":["blue","top"]},{"t":2,"player":"digits","type":"click","row":1,"col":1}],"outcome":{"correct":true}}"#;
        let ts = read_jsonl(line).unwrap();
        assert_eq!(ts.len(), 1);
        let h = ts[0].to_history(&Vocabulary::default()).unwrap();
        assert_eq!(h.len(), 2);
        assert_eq!(ts[0].correct(), Some(true));
        let again = read_jsonl(&write_jsonl(&ts)).unwrap();
        assert_eq!(again, ts);
    }

    #[test]
    fn ranks() {
        let a = Action::Click(Cell::new(1, 1));
        let b = Action::Click(Cell::new(1, 2));
        let c = Action::Click(Cell::new(1, 3));
        let d = PolicyDistribution { entries: vec![(a, 0.5), (b, 0.3), (c, 0.2)] };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(action_rank(&d, &b, &mut rng), 2);
        assert_eq!(action_rank(&d, &a, &mut rng), 1);
        let u = PolicyDistribution::uniform(vec![a, b, c, Action::Message(Message::Yes)]);
        let mut seen = [false; 4];
        for seed in 0..200 {
            let r = action_rank(&u, &a, &mut ChaCha8Rng::seed_from_u64(seed));
            seen[r - 1] = true;
        }
        assert!(seen.iter().all(|&x| x));
    }

    #[test]
    fn bootstrap() {
        assert_eq!(bootstrap_ci(&[-1.5; 7], 1000, 0.9, 3).unwrap(), (-1.5, -1.5));
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let xs: Vec<f64> = (0..40).map(|_| rng.gen_range(-3.0..0.0)).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let (lo, hi) = bootstrap_ci(&xs, 1000, 0.9, 5).unwrap();
        assert!(lo <= mean && mean <= hi);
        assert_eq!(bootstrap_ci(&xs, 1000, 0.9, 5).unwrap(), (lo, hi));
        assert!(bootstrap_ci(&[], 1000, 0.9, 5).is_err());
    }

    #[test]
    fn entropy_cases() {
        assert!((entropy(["blue", "top"]) - std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(entropy(["blue", "blue"]), 0.0);
        assert_eq!(entropy(["a", "b", "b"]), entropy(["x", "y", "y"]));
    }

    #[test]
    fn scores() {
        let mut ts: Vec<Transcript> = (0..4).map(|_| transcript(&["blue"])).collect();
        ts[3].outcome.as_mut().unwrap().correct = false;
        let r = score_stats(&ts);
        let o = r.overall.unwrap();
        assert_eq!(o.correct_rate, 0.75);
        assert_eq!(o.per_ten, 7.5);
        let ts = vec![transcript(&["blue"]), transcript(&["blue", "yes", "top"])];
        assert_eq!(score_stats(&ts).overall.unwrap().mean_length, 3.0);
        assert!(score_stats(&[]).overall.is_none());
    }

    #[test]
    fn smoothed_point_mass_likelihood() {
        let a = Action::Message(Message::single(Property::Top));
        let b = Action::Message(Message::single(Property::Left));
        let d = smooth(&PolicyDistribution { entries: vec![(a, 1.0), (b, 0.0)] }, 0.01);
        assert!((d.prob(&a).ln() - (1.01f64 / 1.02).ln()).abs() < 1e-15);
    }
}
