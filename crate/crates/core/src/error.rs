use thiserror::Error;

/// A game rule an action can violate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    FirstStepClick,
    TooManyWords,
    EmptyMessage,
    MixedVerifying,
    UnknownWord,
    NotSpeakerValid,
    VerifyWithoutReference,
    ClickOutOfRange,
    ClickNotGoalConsistent,
    GameOver,
}

impl Rule {
    pub fn as_str(self) -> &'static str {
        match self {
            Rule::FirstStepClick => "first_step_click",
            Rule::TooManyWords => "too_many_words",
            Rule::EmptyMessage => "empty_message",
            Rule::MixedVerifying => "mixed_verifying",
            Rule::UnknownWord => "unknown_word",
            Rule::NotSpeakerValid => "not_speaker_valid",
            Rule::VerifyWithoutReference => "verify_without_reference",
            Rule::ClickOutOfRange => "click_out_of_range",
            Rule::ClickNotGoalConsistent => "click_not_goal_consistent",
            Rule::GameOver => "game_over",
        }
    }
}

impl std::fmt::Display for Rule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("rule violation: {0}")]
    Rule(Rule),
    #[error("unknown word {0:?}")]
    UnknownWord(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl GameError {
    /// Rule name for structured error bodies.
    pub fn rule_name(&self) -> &'static str {
        match self {
            GameError::Rule(r) => r.as_str(),
            GameError::UnknownWord(_) => Rule::UnknownWord.as_str(),
            GameError::InvalidScenario(_) => "invalid_scenario",
            GameError::InvalidArgument(_) => "invalid_argument",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SemanticsError {
    #[error("{0:?} is not an informative word")]
    NotInformative(String),
    #[error("verifying message at t={t} has no preceding informative message")]
    MalformedHistory { t: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BeliefError {
    #[error("contradictory evidence: no partner state survives the action at t={t}")]
    Contradiction { t: usize },
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error("history contains a click")]
    TerminalHistory,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error("policy undefined: {0}")]
    Undefined(#[from] BeliefError),
    #[error("invalid config: {field}: {message}")]
    InvalidConfig { field: String, message: String },
    #[error("terminal history")]
    Terminal,
    #[error("unknown policy {0:?}")]
    UnknownPolicy(String),
    #[error("action not representable in the planner: {0}")]
    UnknownAction(String),
}
