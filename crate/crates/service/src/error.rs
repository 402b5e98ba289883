use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde_json::json;

#[derive(Debug)]
pub enum ApiError {
    BadRequest(String),
    Unauthorized,
    NotFound(String),
    Conflict { expected: u64, current: u64 },
    Unprocessable(String),
    Internal(String),
}

impl ApiError {
    pub fn status(&self) -> StatusCode {
        match self {
            ApiError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ApiError::Unauthorized => StatusCode::UNAUTHORIZED,
            ApiError::NotFound(_) => StatusCode::NOT_FOUND,
            ApiError::Conflict { .. } => StatusCode::CONFLICT,
            ApiError::Unprocessable(_) => StatusCode::UNPROCESSABLE_ENTITY,
            ApiError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

impl From<dnabrick::Error> for ApiError {
    fn from(e: dnabrick::Error) -> Self {
        use dnabrick::Error as E;
        match e {
            E::Malformed(_) => ApiError::BadRequest(e.to_string()),
            E::Io(_) => ApiError::Internal(e.to_string()),
            _ => ApiError::Unprocessable(e.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = self.status();
        let body = match &self {
            ApiError::Conflict { expected, current } => json!({
                "error": format!("stale revision: request expected {expected}, project is at {current}"),
                "revision": current,
            }),
            ApiError::Unauthorized => json!({ "error": "missing or invalid bearer token" }),
            ApiError::BadRequest(m)
            | ApiError::NotFound(m)
            | ApiError::Unprocessable(m)
            | ApiError::Internal(m) => json!({ "error": m }),
        };
        (status, Json(body)).into_response()
    }
}
