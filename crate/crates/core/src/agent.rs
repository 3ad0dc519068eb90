//! Named policies usable by the harness, the evaluator and the service.

use std::fmt;
use std::sync::Arc;

use crate::baselines::{greedy_policy, random_policy};
use crate::error::PlanError;
use crate::game::{History, PrivateState};
use crate::planning::{Ablation, PipConfig, Planner, PlannerStats, PolicyDistribution};
use crate::semantics::Semantics;

/// A policy by name: `random`, `greedy`, `pip`, `pip:noprag`, `pip:noplan`
/// or `pip:noinfer`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PolicySpec {
    Random { smoothing: f64 },
    Greedy { smoothing: f64 },
    Pip { config: PipConfig, ablation: Ablation },
}

impl PolicySpec {
    /// Parses a policy name; ablations override a single field of `base`.
    pub fn parse(name: &str, base: &PipConfig) -> Result<PolicySpec, PlanError> {
        let lower = name.trim().to_ascii_lowercase();
        let spec = match lower.as_str() {
            "random" => PolicySpec::Random { smoothing: base.smoothing },
            "greedy" => PolicySpec::Greedy { smoothing: base.smoothing },
            "pip" | "pip:full" => PolicySpec::Pip { config: *base, ablation: Ablation::Full },
            _ => {
                let Some(which) = lower.strip_prefix("pip:") else {
                    return Err(PlanError::UnknownPolicy(name.to_string()));
                };
                let ablation = Ablation::parse(which)?;
                let config = match ablation {
                    Ablation::Full => *base,
                    Ablation::NoPrag => PipConfig { k: 0, ..*base },
                    Ablation::NoPlan => PipConfig { f: 1, ..*base },
                    Ablation::NoInfer => PipConfig { b: Some(1), ..*base },
                };
                PolicySpec::Pip { config, ablation }
            }
        };
        if let PolicySpec::Pip { config, .. } = &spec {
            config.validate()?;
        }
        Ok(spec)
    }

    pub fn smoothing(&self) -> f64 {
        match self {
            PolicySpec::Random { smoothing } | PolicySpec::Greedy { smoothing } => *smoothing,
            PolicySpec::Pip { config, .. } => config.smoothing,
        }
    }
}

impl fmt::Display for PolicySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicySpec::Random { .. } => f.write_str("random"),
            PolicySpec::Greedy { .. } => f.write_str("greedy"),
            PolicySpec::Pip { ablation: Ablation::Full, .. } => f.write_str("pip"),
            PolicySpec::Pip { ablation: Ablation::NoPrag, .. } => f.write_str("pip:noprag"),
            PolicySpec::Pip { ablation: Ablation::NoPlan, .. } => f.write_str("pip:noplan"),
            PolicySpec::Pip { ablation: Ablation::NoInfer, .. } => f.write_str("pip:noinfer"),
        }
    }
}

/// A policy bound to one scenario. PIP agents keep their planner cache
/// across calls, so reuse one agent for all games on a scenario.
pub struct Agent {
    spec: PolicySpec,
    sem: Arc<Semantics>,
    planner: Option<Planner>,
    fallbacks: usize,
}

impl Agent {
    pub fn new(spec: PolicySpec, sem: Arc<Semantics>) -> Result<Agent, PlanError> {
        let planner = match spec {
            PolicySpec::Pip { config, .. } => {
                Some(Planner::new(sem.clone(), config)?.with_fallback(true))
            }
            _ => None,
        };
        Ok(Agent { spec, sem, planner, fallbacks: 0 })
    }

    pub fn spec(&self) -> &PolicySpec {
        &self.spec
    }

    pub fn semantics(&self) -> &Arc<Semantics> {
        &self.sem
    }

    pub fn planner_mut(&mut self) -> Option<&mut Planner> {
        self.planner.as_mut()
    }

    /// Policy of the player to move. If the model is undefined here (for
    /// example after an untruthful recorded message) the random policy is
    /// used instead and counted in [`Agent::fallbacks`].
    pub fn policy(
        &mut self,
        own: PrivateState,
        history: &History,
    ) -> Result<PolicyDistribution, PlanError> {
        if history.is_terminal() {
            return Err(PlanError::Terminal);
        }
        let eps = self.spec.smoothing();
        let out = match (&self.spec, self.planner.as_mut()) {
            (PolicySpec::Random { .. }, _) => random_policy(&self.sem, own, history, eps),
            (PolicySpec::Greedy { .. }, _) => greedy_policy(&self.sem, own, history, eps),
            (PolicySpec::Pip { .. }, Some(p)) => p.pip_policy(own, history),
            (PolicySpec::Pip { .. }, None) => unreachable!("pip agents own a planner"),
        };
        match out {
            Ok(d) => Ok(d),
            Err(PlanError::Undefined(_) | PlanError::UnknownAction(_)) => {
                self.fallbacks += 1;
                random_policy(&self.sem, own, history, eps)
            }
            Err(e) => Err(e),
        }
    }

    /// Times the random fallback replaced an undefined policy, plus the
    /// planner's own belief fallbacks.
    pub fn fallbacks(&self) -> usize {
        self.fallbacks + self.planner.as_ref().map_or(0, |p| p.stats().fallbacks)
    }

    pub fn planner_stats(&self) -> Option<PlannerStats> {
        self.planner.as_ref().map(Planner::stats)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        let base = PipConfig::default();
        for name in ["random", "greedy", "pip", "pip:noprag", "pip:noplan", "pip:noinfer"] {
            assert_eq!(PolicySpec::parse(name, &base).unwrap().to_string(), name);
        }
        assert!(PolicySpec::parse("oracle", &base).is_err());
        assert!(PolicySpec::parse("pip:nothing", &base).is_err());
    }

    #[test]
    fn ablations_override_one_field() {
        let base = PipConfig { alpha: 3.0, ..PipConfig::default() };
        let PolicySpec::Pip { config, .. } = PolicySpec::parse("pip:noinfer", &base).unwrap() else {
            panic!()
        };
        assert_eq!(config, PipConfig { b: Some(1), ..base });
    }
}
