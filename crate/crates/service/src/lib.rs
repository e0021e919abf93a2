//! Read-only HTTP/JSON endpoint serving patient reports.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use dentalage_core::controller::{report_for, ReportRequest};
use dentalage_core::nlg::{Language, ReportKind};
use dentalage_core::store::{CoefficientsStore, PatientStore};
use dentalage_core::Error;
use serde::{Deserialize, Serialize};
use tokio::net::TcpListener;

/// Stores shared by every request; never mutated after startup.
#[derive(Debug)]
pub struct AppState {
    pub patients: PatientStore,
    pub coefficients: CoefficientsStore,
}

/// Error body returned with every non-2xx response.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiError {
    pub code: String,
    pub message: String,
}

struct Failure(StatusCode, ApiError);

impl IntoResponse for Failure {
    fn into_response(self) -> Response {
        (self.0, Json(self.1)).into_response()
    }
}

fn bad_request(message: String) -> Failure {
    Failure(
        StatusCode::BAD_REQUEST,
        ApiError {
            code: "BAD_REQUEST".into(),
            message,
        },
    )
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (status, code) = match &e {
            Error::UnknownPatient(_) => (StatusCode::NOT_FOUND, e.code().to_string()),
            _ if e.is_io_or_parse() => (StatusCode::INTERNAL_SERVER_ERROR, e.qualified_code()),
            _ => (StatusCode::UNPROCESSABLE_ENTITY, e.qualified_code()),
        };
        Failure(
            status,
            ApiError {
                code,
                message: e.to_string(),
            },
        )
    }
}

fn parse_request(id: String, params: HashMap<String, String>) -> Result<ReportRequest, Failure> {
    if let Some(key) = params.keys().find(|k| *k != "lang" && *k != "detail") {
        return Err(bad_request(format!("unknown query parameter {key:?}")));
    }
    let language = match params.get("lang") {
        None => Language::En,
        Some(v) => v
            .parse()
            .map_err(|_| bad_request(format!("lang must be en or es, got {v:?}")))?,
    };
    let detail = match params.get("detail") {
        None => ReportKind::Detailed,
        Some(v) => v
            .parse()
            .map_err(|_| bad_request(format!("detail must be short or detailed, got {v:?}")))?,
    };
    Ok(ReportRequest {
        patient_id: id,
        language,
        detail,
    })
}

async fn report(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    query: Result<Query<HashMap<String, String>>, axum::extract::rejection::QueryRejection>,
) -> Response {
    let result = query
        .map_err(|e| bad_request(e.body_text()))
        .and_then(|Query(params)| parse_request(id, params))
        .and_then(|req| Ok(report_for(&state.patients, &state.coefficients, &req)?));
    match result {
        Ok(doc) => Json(doc).into_response(),
        Err(f) => f.into_response(),
    }
}

async fn healthz() -> &'static str {
    "ok"
}

async fn not_found() -> Failure {
    Failure(
        StatusCode::NOT_FOUND,
        ApiError {
            code: "NOT_FOUND".into(),
            message: "no such route".into(),
        },
    )
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/patients/{id}/report", get(report))
        .route("/healthz", get(healthz))
        .fallback(not_found)
        .with_state(state)
}

pub async fn bind(addr: &str) -> std::io::Result<TcpListener> {
    TcpListener::bind(addr).await
}

/// Serves until the future is dropped or the listener fails.
pub async fn serve(listener: TcpListener, state: Arc<AppState>) -> std::io::Result<()> {
    if let Ok(addr) = listener.local_addr() {
        tracing::info!(%addr, "serving reports");
    }
    axum::serve(listener, router(state)).await
}

/// Binds an ephemeral port and serves in the background; for tests and
/// embedding.
pub async fn spawn(state: Arc<AppState>, addr: &str) -> std::io::Result<SocketAddr> {
    let listener = bind(addr).await?;
    let local = listener.local_addr()?;
    tokio::spawn(serve(listener, state));
    Ok(local)
}
