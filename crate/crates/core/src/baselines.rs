//! Reference policies: uniform over legal actions, and a greedy speaker that
//! maximizes how much each message shrinks the listener's hypothesis set.

use crate::belief::{
    belief_marginals, literal_posterior_window, window_start, BeliefMarginals, Posterior,
    PriorKind,
};
use crate::error::PlanError;
use crate::game::{legal_actions, Action, History, PrivateState};
use crate::planning::{smooth, PolicyDistribution};
use crate::semantics::Semantics;

/// Uniform over the legal set, then smoothed (a no-op for uniform input).
pub fn random_policy(
    sem: &Semantics,
    own: PrivateState,
    history: &History,
    eps: f64,
) -> Result<PolicyDistribution, PlanError> {
    let actions = legal_actions(sem, history, own).map_err(|_| PlanError::Terminal)?;
    Ok(smooth(&PolicyDistribution::uniform(actions), eps))
}

/// Messages weighted by how many states they remove from the listener's
/// view of the speaker. Falls back to uniform when nothing shrinks.
pub fn greedy_message_policy(
    sem: &Semantics,
    own: PrivateState,
    history: &History,
) -> Result<PolicyDistribution, PlanError> {
    let listener = history.next_player().other();
    let before = sem
        .history_denotation(history, listener)
        .map_err(|e| PlanError::Undefined(e.into()))?
        .len();
    let messages: Vec<Action> = legal_actions(sem, history, own)
        .map_err(|_| PlanError::Terminal)?
        .into_iter()
        .filter(|a| !a.is_click())
        .collect();
    let mut weights = Vec::with_capacity(messages.len());
    for a in &messages {
        let mut next = history.clone();
        next.push_unchecked(*a);
        let after = sem
            .history_denotation(&next, listener)
            .map_err(|e| PlanError::Undefined(e.into()))?
            .len();
        weights.push(before.saturating_sub(after) as f64);
    }
    let total: f64 = weights.iter().sum();
    if total == 0.0 {
        return Ok(PolicyDistribution::uniform(messages));
    }
    Ok(PolicyDistribution {
        entries: messages.into_iter().zip(weights).map(|(a, w)| (a, w / total)).collect(),
    })
}

/// Clicks weighted by `min(own bit, partner marginal)`, with the largest
/// normalized probability as the click propensity. `None` if no own cell
/// has positive weight.
pub fn greedy_click_policy(
    sem: &Semantics,
    own: PrivateState,
    marginals: &BeliefMarginals,
) -> Option<(PolicyDistribution, f64)> {
    let scen = sem.scenario();
    let mut entries = Vec::new();
    for c in own.cells() {
        let w = marginals.values[c].min(1.0);
        entries.push((Action::Click(scen.cell_at(c)), w));
    }
    let total: f64 = entries.iter().map(|(_, w)| w).sum();
    if total <= 0.0 {
        return None;
    }
    entries.iter_mut().for_each(|(_, w)| *w /= total);
    let gamma = entries.iter().map(|(_, p)| *p).fold(0.0, f64::max);
    Some((PolicyDistribution { entries }, gamma))
}

/// Level-0 belief used by the greedy clicker, relaxing to the last action
/// and then to the prior when the literal reading is contradictory.
pub fn greedy_posterior(sem: &Semantics, own: PrivateState, history: &History) -> Posterior {
    let viewer = history.next_player();
    let full = literal_posterior_window(sem, history, viewer, own, PriorKind::Constrained, 0);
    full.or_else(|_| {
        let start = window_start(history.len(), Some(1));
        literal_posterior_window(sem, history, viewer, own, PriorKind::Constrained, start)
    })
    .unwrap_or_else(|_| Posterior::uniform(PriorKind::Constrained.support(own)))
}

/// `gamma * clicks + (1 - gamma) * messages` over the legal set, smoothed;
/// `gamma = 0` on the first step.
pub fn greedy_policy(
    sem: &Semantics,
    own: PrivateState,
    history: &History,
    eps: f64,
) -> Result<PolicyDistribution, PlanError> {
    let post = greedy_posterior(sem, own, history);
    let scen = sem.scenario();
    let marginals = belief_marginals(&post, scen.rows, scen.cols);
    greedy_policy_with_marginals(sem, own, history, &marginals, eps)
}

/// [`greedy_policy`] with caller-supplied partner marginals.
pub fn greedy_policy_with_marginals(
    sem: &Semantics,
    own: PrivateState,
    history: &History,
    marginals: &BeliefMarginals,
    eps: f64,
) -> Result<PolicyDistribution, PlanError> {
    let legal = legal_actions(sem, history, own).map_err(|_| PlanError::Terminal)?;
    let messages = greedy_message_policy(sem, own, history)?;
    let clicks = if history.is_empty() { None } else { greedy_click_policy(sem, own, marginals) };
    let (clicks, gamma) = match clicks {
        Some((d, g)) => (Some(d), g),
        None => (None, 0.0),
    };
    let entries = legal
        .into_iter()
        .map(|a| {
            let p = if a.is_click() {
                clicks.as_ref().map_or(0.0, |d| gamma * d.prob(&a))
            } else {
                (1.0 - gamma) * messages.prob(&a)
            };
            (a, p)
        })
        .collect();
    Ok(smooth(&PolicyDistribution { entries }, eps))
}
