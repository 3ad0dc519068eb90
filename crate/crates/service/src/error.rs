use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use jigsaw_core::{GameError, PlanError, Rule};
use serde_json::json;

/// Error returned by every endpoint as `{"error":{"rule":..,"message":..}}`.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{rule}: {message}")]
pub struct ApiError {
    pub status: StatusCode,
    pub rule: String,
    pub message: String,
}

impl ApiError {
    pub fn new(status: StatusCode, rule: &str, message: impl Into<String>) -> Self {
        ApiError { status, rule: rule.to_string(), message: message.into() }
    }

    pub fn bad_request(rule: &str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, rule, message)
    }

    pub fn not_found(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not_found", format!("no session {id:?}"))
    }

    pub fn wrong_turn(message: impl Into<String>) -> Self {
        Self::new(StatusCode::CONFLICT, "wrong_turn", message)
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

impl From<Rule> for ApiError {
    fn from(rule: Rule) -> Self {
        let status = if rule == Rule::GameOver { StatusCode::CONFLICT } else { StatusCode::BAD_REQUEST };
        ApiError::new(status, rule.as_str(), format!("action breaks the {rule} rule"))
    }
}

impl From<GameError> for ApiError {
    fn from(e: GameError) -> Self {
        match e {
            GameError::Rule(r) => r.into(),
            other => ApiError::bad_request(other.rule_name(), other.to_string()),
        }
    }
}

impl From<PlanError> for ApiError {
    fn from(e: PlanError) -> Self {
        match &e {
            PlanError::InvalidConfig { .. } => ApiError::bad_request("invalid_config", e.to_string()),
            PlanError::UnknownPolicy(_) => ApiError::bad_request("unknown_policy", e.to_string()),
            _ => ApiError::internal(e.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({ "error": { "rule": self.rule, "message": self.message } });
        (self.status, Json(body)).into_response()
    }
}
