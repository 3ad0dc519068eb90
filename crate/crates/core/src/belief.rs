//! Beliefs about the partner's private state.
//!
//! Level 0 is the literal listener: uniform over partner states consistent
//! with the partner's messages and sharing a cell with the viewer's own
//! state (there is always a goal). Level `k` reweights the previous belief
//! by how likely a level `k-1` partner was to take each observed action.

use serde::Serialize;

use crate::error::{BeliefError, PlanError};
use crate::game::{Action, History, Message, PrivateState, Role, NUM_STATES};
use crate::semantics::{Semantics, StateSet};

/// Distribution over the 64 partner private states.
#[derive(Clone, Debug, PartialEq)]
pub struct Posterior {
    probs: [f64; NUM_STATES],
}

impl Posterior {
    pub fn from_probs(probs: [f64; NUM_STATES]) -> Self {
        Posterior { probs }
    }

    /// Uniform over a non-empty set.
    pub fn uniform(set: StateSet) -> Self {
        let n = set.len() as f64;
        let mut probs = [0.0; NUM_STATES];
        for s in set.iter() {
            probs[s.index()] = 1.0 / n;
        }
        Posterior { probs }
    }

    pub fn prob(&self, s: PrivateState) -> f64 {
        self.probs[s.index()]
    }

    pub fn probs(&self) -> &[f64; NUM_STATES] {
        &self.probs
    }

    pub fn support(&self) -> StateSet {
        let mut bits = 0u64;
        for (s, p) in self.probs.iter().enumerate() {
            if *p > 0.0 {
                bits |= 1 << s;
            }
        }
        StateSet(bits)
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PriorKind {
    /// Partner states must share a goal-consistent cell with the viewer's.
    #[default]
    Constrained,
    Unconstrained,
}

impl PriorKind {
    pub fn support(self, own: PrivateState) -> StateSet {
        match self {
            PriorKind::Constrained => StateSet::intersecting(own.0),
            PriorKind::Unconstrained => StateSet::ALL,
        }
    }
}

/// Per-cell probability that the partner's bit is set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BeliefMarginals {
    pub rows: u8,
    pub cols: u8,
    /// Row-major.
    pub values: Vec<f64>,
}

impl BeliefMarginals {
    pub fn at(&self, row: u8, col: u8) -> f64 {
        self.values[(row as usize - 1) * self.cols as usize + (col as usize - 1)]
    }

    pub fn matrix(&self) -> Vec<Vec<f64>> {
        self.values.chunks(self.cols as usize).map(<[f64]>::to_vec).collect()
    }

    /// Rows of 3-decimal numbers separated by spaces.
    pub fn render(&self) -> String {
        self.matrix()
            .iter()
            .map(|r| r.iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>().join(" "))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

pub fn belief_marginals(posterior: &Posterior, rows: u8, cols: u8) -> BeliefMarginals {
    let n = rows as usize * cols as usize;
    let mut values = vec![0.0; n];
    for (s, p) in posterior.probs.iter().enumerate() {
        if *p == 0.0 {
            continue;
        }
        for (c, v) in values.iter_mut().enumerate() {
            if s >> c & 1 == 1 {
                *v += p;
            }
        }
    }
    BeliefMarginals { rows, cols, values }
}

/// Constraint the partner's step `i` places on the partner's state.
///
/// Returns `Ok(None)` for clicks.
pub(crate) fn step_constraint(
    sem: &Semantics,
    history: &History,
    i: usize,
) -> Result<Option<StateSet>, BeliefError> {
    let steps = history.steps();
    let Action::Message(m) = steps[i].action else { return Ok(None) };
    Ok(Some(match m {
        Message::Inform(..) => sem.message_denotation(m)?,
        Message::Yes | Message::No => {
            let referent = match i.checked_sub(1).map(|j| steps[j].action) {
                Some(Action::Message(prev @ Message::Inform(..))) => prev,
                _ => {
                    return Err(crate::error::SemanticsError::MalformedHistory { t: i + 1 }.into())
                }
            };
            let d = sem.message_denotation(referent)?;
            if m == Message::Yes {
                d
            } else {
                d.complement()
            }
        }
    }))
}

/// Level-0 posterior over the actions at indices `start..` of `history`.
pub fn literal_posterior_window(
    sem: &Semantics,
    history: &History,
    viewer: Role,
    own: PrivateState,
    prior: PriorKind,
    start: usize,
) -> Result<Posterior, BeliefError> {
    if history.is_terminal() {
        return Err(BeliefError::TerminalHistory);
    }
    let mut support = prior.support(own);
    if support.is_empty() {
        return Err(BeliefError::Contradiction { t: 0 });
    }
    for i in start..history.len() {
        if history.steps()[i].role == viewer {
            continue;
        }
        if let Some(c) = step_constraint(sem, history, i)? {
            support = support.and(c);
            if support.is_empty() {
                return Err(BeliefError::Contradiction { t: i + 1 });
            }
        }
    }
    Ok(Posterior::uniform(support))
}

/// Uniform over partner states consistent with the partner's messages and
/// intersecting `own`.
pub fn literal_posterior(
    sem: &Semantics,
    history: &History,
    viewer: Role,
    own: PrivateState,
) -> Result<Posterior, BeliefError> {
    literal_posterior_window(sem, history, viewer, own, PriorKind::Constrained, 0)
}

/// Probability model of the partner's actions, used by pragmatic listeners.
pub trait PolicyOracle {
    /// Probability that a level-`level` speaker holding `speaker_state`
    /// takes `action` after `prefix`.
    fn action_prob(
        &mut self,
        level: usize,
        speaker_state: PrivateState,
        prefix: &History,
        action: &Action,
    ) -> Result<f64, PlanError>;
}

/// First history index inside a lookback window of `b` actions.
pub fn window_start(len: usize, b: Option<usize>) -> usize {
    b.map_or(0, |b| len.saturating_sub(b))
}

/// Level-`k` posterior, evaluated by the recurrence that peels off the
/// partner's most recent action and reweights the belief before it.
pub fn pragmatic_posterior(
    sem: &Semantics,
    history: &History,
    viewer: Role,
    own: PrivateState,
    k: usize,
    b: Option<usize>,
    oracle: &mut dyn PolicyOracle,
) -> Result<Posterior, PlanError> {
    if history.is_terminal() {
        return Err(BeliefError::TerminalHistory.into());
    }
    let start = window_start(history.len(), b);
    if k == 0 {
        return Ok(literal_posterior_window(
            sem,
            history,
            viewer,
            own,
            PriorKind::Constrained,
            start,
        )?);
    }
    pragmatic_rec(history, history.len(), start, viewer, own, k, oracle)
}

fn pragmatic_rec(
    history: &History,
    len: usize,
    start: usize,
    viewer: Role,
    own: PrivateState,
    k: usize,
    oracle: &mut dyn PolicyOracle,
) -> Result<Posterior, PlanError> {
    let last_partner = (start..len).rev().find(|&i| history.steps()[i].role != viewer);
    let Some(i) = last_partner else {
        return Ok(Posterior::uniform(PriorKind::Constrained.support(own)));
    };
    let before = pragmatic_rec(history, i, start, viewer, own, k, oracle)?;
    let prefix = history.prefix(i);
    let action = history.steps()[i].action;
    let mut probs = [0.0; NUM_STATES];
    let mut total = 0.0;
    for s in before.support().iter() {
        let like = oracle.action_prob(k - 1, s, &prefix, &action)?;
        let w = before.prob(s) * like;
        probs[s.index()] = w;
        total += w;
    }
    if total <= 0.0 {
        return Err(BeliefError::Contradiction { t: i + 1 }.into());
    }
    probs.iter_mut().for_each(|p| *p /= total);
    Ok(Posterior::from_probs(probs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{Color, Property};
    use crate::testing::scen_a;

    fn blue() -> Action {
        Action::Message(Message::single(Property::Color(Color::Blue)))
    }

    #[test]
    fn constrained_prior_with_full_own_state() {
        let sem = Semantics::new(scen_a());
        let p = literal_posterior(&sem, &History::new(Role::Letters), Role::Digits, PrivateState(63))
            .unwrap();
        assert_eq!(p.support().len(), 63);
        assert!(p.probs().iter().skip(1).all(|&x| (x - 1.0 / 63.0).abs() < 1e-15));
        assert_eq!(p.prob(PrivateState(0)), 0.0);
    }

    #[test]
    fn literal_after_blue() {
        let sem = Semantics::new(scen_a());
        let h = History::from_actions(Role::Digits, [blue()]);
        let own = PrivateState(0b01_0011);
        let p = literal_posterior(&sem, &h, Role::Letters, own).unwrap();
        assert_eq!(p.support().len(), 48);
        for s in p.support().iter() {
            assert!((p.prob(s) - 1.0 / 48.0).abs() < 1e-12);
        }
        // the viewer's own reply carries no information about the partner
        let mut h2 = h.clone();
        h2.push_unchecked(blue());
        assert_eq!(literal_posterior(&sem, &h2, Role::Letters, own).unwrap(), p);
    }

    #[test]
    fn marginals() {
        let sem = Semantics::new(scen_a());
        let uniform = Posterior::uniform(StateSet::ALL);
        let m = belief_marginals(&uniform, 2, 3);
        assert!(m.values.iter().all(|&v| (v - 0.5).abs() < 1e-12));

        let point = Posterior::uniform(StateSet(1 << 1));
        let m = belief_marginals(&point, 2, 3);
        assert_eq!(m.values, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);

        let h = History::from_actions(Role::Letters, [blue()]);
        let p = literal_posterior_window(
            &sem,
            &h,
            Role::Digits,
            PrivateState(63),
            PriorKind::Unconstrained,
            0,
        )
        .unwrap();
        let m = belief_marginals(&p, 2, 3);
        for (c, v) in m.values.iter().enumerate() {
            let expect = if c == 0 || c == 4 { 2.0 / 3.0 } else { 0.5 };
            assert!((v - expect).abs() < 1e-12, "cell {c}: {v}");
        }
        assert_eq!(m.render().lines().next().unwrap(), "0.667 0.500 0.500");
    }

    #[test]
    fn contradiction_is_reported() {
        let sem = Semantics::new(scen_a());
        // viewer holds only the blue corner (1,1); partner denies having a blue
        // goal-consistent object, so no partner state shares a goal cell
        let no_blue = History::from_actions(Role::Letters, [blue(), Action::Message(Message::No)]);
        let err = literal_posterior(&sem, &no_blue, Role::Letters, PrivateState(0b00_0001));
        assert_eq!(err.unwrap_err(), BeliefError::Contradiction { t: 2 });
    }
}
