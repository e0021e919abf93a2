//! Async client for the report service.

use dentalage_core::controller::ReportDocument;
use dentalage_core::nlg::{Language, ReportKind};
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum ClientError {
    #[error("request failed: {0}")]
    Transport(#[from] reqwest::Error),
    #[error("{code}: {message} (HTTP {status})")]
    Api {
        status: u16,
        code: String,
        message: String,
    },
}

impl ClientError {
    /// Service-side error code, if the service answered.
    pub fn code(&self) -> Option<&str> {
        match self {
            ClientError::Api { code, .. } => Some(code),
            ClientError::Transport(_) => None,
        }
    }
}

#[derive(Deserialize)]
struct ErrorBody {
    code: String,
    message: String,
}

#[derive(Debug, Clone)]
pub struct Client {
    base_url: String,
    http: reqwest::Client,
}

impl Client {
    pub fn new(base_url: impl Into<String>) -> Self {
        Client {
            base_url: base_url.into().trim_end_matches('/').to_string(),
            http: reqwest::Client::new(),
        }
    }

    pub fn base_url(&self) -> &str {
        &self.base_url
    }

    /// Raw response body of a report request, exactly as served.
    pub async fn report_bytes(
        &self,
        patient_id: &str,
        language: Language,
        detail: ReportKind,
    ) -> Result<Vec<u8>, ClientError> {
        let url = format!(
            "{}/patients/{}/report?lang={language}&detail={detail}",
            self.base_url,
            encode_segment(patient_id)
        );
        let response = self.http.get(url).send().await?;
        let status = response.status();
        let body = response.bytes().await?;
        if status.is_success() {
            return Ok(body.to_vec());
        }
        Err(match serde_json::from_slice::<ErrorBody>(&body) {
            Ok(e) => ClientError::Api {
                status: status.as_u16(),
                code: e.code,
                message: e.message,
            },
            Err(_) => ClientError::Api {
                status: status.as_u16(),
                code: "HTTP_ERROR".into(),
                message: String::from_utf8_lossy(&body).into_owned(),
            },
        })
    }

    pub async fn report(
        &self,
        patient_id: &str,
        language: Language,
        detail: ReportKind,
    ) -> Result<ReportDocument, ClientError> {
        let body = self.report_bytes(patient_id, language, detail).await?;
        serde_json::from_slice(&body).map_err(|e| ClientError::Api {
            status: 200,
            code: "BAD_RESPONSE".into(),
            message: e.to_string(),
        })
    }
}

/// Percent-encodes everything but unreserved characters.
fn encode_segment(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for b in s.bytes() {
        if b.is_ascii_alphanumeric() || matches!(b, b'-' | b'.' | b'_' | b'~') {
            out.push(b as char);
        } else {
            out.push_str(&format!("%{b:02X}"));
        }
    }
    out
}
