use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use receptionist_core::protocol::ErrorBody;
use receptionist_core::TranscriptError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("unknown session {0}")]
    UnknownSession(String),
    #[error("malformed event: {0}")]
    MalformedEvent(String),
    #[error("session limit of {0} reached")]
    CapacityExceeded(usize),
    #[error("invalid session overrides: {0}")]
    InvalidOverrides(String),
    #[error(transparent)]
    Transcript(#[from] TranscriptError),
    #[error("internal error: {0}")]
    Internal(String),
}

impl ServiceError {
    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::UnknownSession(_) => "unknown_session",
            ServiceError::MalformedEvent(_) => "malformed_event",
            ServiceError::CapacityExceeded(_) => "capacity_exceeded",
            ServiceError::InvalidOverrides(_) => "invalid_overrides",
            ServiceError::Transcript(_) => "transcript_error",
            ServiceError::Internal(_) => "internal",
        }
    }

    fn status(&self) -> StatusCode {
        match self {
            ServiceError::UnknownSession(_) => StatusCode::NOT_FOUND,
            ServiceError::MalformedEvent(_) | ServiceError::InvalidOverrides(_) => {
                StatusCode::BAD_REQUEST
            }
            ServiceError::CapacityExceeded(_) => StatusCode::SERVICE_UNAVAILABLE,
            ServiceError::Transcript(_) | ServiceError::Internal(_) => {
                StatusCode::INTERNAL_SERVER_ERROR
            }
        }
    }
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let body = ErrorBody {
            error: self.code().to_owned(),
            message: self.to_string(),
        };
        (self.status(), Json(body)).into_response()
    }
}
