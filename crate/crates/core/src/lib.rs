//! Agents for a two-player cooperative reference game played on a small
//! grid of objects: literal and pragmatic beliefs, expected-utility
//! planning, baseline policies, scenario generation, evaluation against
//! recorded games and a self-play harness.

pub mod agent;
pub mod baselines;
pub mod belief;
pub mod error;
pub mod eval;
pub mod game;
pub mod harness;
pub mod planning;
pub mod scenario_gen;
pub mod semantics;
pub mod testing;

pub use error::{BeliefError, GameError, PlanError, Rule, SemanticsError};
pub use game::{Action, Cell, History, Message, PrivateState, Role, Scenario};
pub use planning::{PipConfig, Planner, PolicyDistribution};
pub use semantics::{Semantics, StateSet, Vocabulary};
