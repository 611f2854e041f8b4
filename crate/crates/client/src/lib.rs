//! Client for the receptionist session service.

use futures::stream::BoxStream;
use futures::StreamExt;
use receptionist_core::dialogue::{Event, SessionId, SessionOverrides};
use receptionist_core::protocol::{ActionMessage, ErrorBody, EventResponse, Health, SessionCreated};
use receptionist_core::transcript::TranscriptRecord;
use serde::de::DeserializeOwned;
use thiserror::Error;
use tokio_tungstenite::tungstenite::Message;

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("request failed: {0}")]
    Http(#[from] reqwest::Error),
    #[error("service returned {status} {code}: {message}")]
    Service {
        status: u16,
        code: String,
        message: String,
    },
    #[error("websocket error: {0}")]
    WebSocket(#[from] tokio_tungstenite::tungstenite::Error),
    #[error("could not decode stream frame: {0}")]
    Decode(#[from] serde_json::Error),
}

impl ClientError {
    /// The service's error code, e.g. `unknown_session`.
    pub fn code(&self) -> Option<&str> {
        match self {
            ClientError::Service { code, .. } => Some(code),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ServiceClient {
    base: String,
    http: reqwest::Client,
}

impl ServiceClient {
    /// `base` is the service root, e.g. `http://127.0.0.1:8080`.
    pub fn new(base: impl Into<String>) -> Self {
        Self {
            base: base.into().trim_end_matches('/').to_owned(),
            http: reqwest::Client::new(),
        }
    }

    pub fn base(&self) -> &str {
        &self.base
    }

    async fn decode<T: DeserializeOwned>(response: reqwest::Response) -> Result<T, ClientError> {
        let status = response.status();
        if status.is_success() {
            return Ok(response.json().await?);
        }
        let text = response.text().await.unwrap_or_default();
        let (code, message) = match serde_json::from_str::<ErrorBody>(&text) {
            Ok(body) => (body.error, body.message),
            Err(_) => (String::new(), text),
        };
        Err(ClientError::Service {
            status: status.as_u16(),
            code,
            message,
        })
    }

    pub async fn health(&self) -> Result<Health, ClientError> {
        Self::decode(self.http.get(format!("{}/healthz", self.base)).send().await?).await
    }

    pub async fn create_session(
        &self,
        overrides: &SessionOverrides,
    ) -> Result<SessionCreated, ClientError> {
        let resp = self
            .http
            .post(format!("{}/sessions", self.base))
            .json(overrides)
            .send()
            .await?;
        Self::decode(resp).await
    }

    pub async fn post_event(
        &self,
        session: SessionId,
        event: &Event,
    ) -> Result<Vec<ActionMessage>, ClientError> {
        let resp = self
            .http
            .post(format!("{}/sessions/{session}/events", self.base))
            .json(event)
            .send()
            .await?;
        Ok(Self::decode::<EventResponse>(resp).await?.actions)
    }

    pub async fn transcript(&self, session: SessionId) -> Result<Vec<TranscriptRecord>, ClientError> {
        let resp = self
            .http
            .get(format!("{}/sessions/{session}/transcript", self.base))
            .send()
            .await?;
        Self::decode(resp).await
    }

    fn ws_url(&self, session: SessionId) -> String {
        let base = if let Some(rest) = self.base.strip_prefix("https://") {
            format!("wss://{rest}")
        } else if let Some(rest) = self.base.strip_prefix("http://") {
            format!("ws://{rest}")
        } else {
            self.base.clone()
        };
        format!("{base}/sessions/{session}/stream")
    }

    /// Attaches to a session's action stream. Messages produced after the
    /// connection is established arrive in order.
    pub async fn stream(
        &self,
        session: SessionId,
    ) -> Result<BoxStream<'static, Result<ActionMessage, ClientError>>, ClientError> {
        let (socket, _) = tokio_tungstenite::connect_async(self.ws_url(session)).await?;
        Ok(socket
            .filter_map(|frame| async move {
                match frame {
                    Ok(Message::Text(text)) => {
                        Some(serde_json::from_str(text.as_str()).map_err(ClientError::from))
                    }
                    Ok(_) => None,
                    Err(e) => Some(Err(e.into())),
                }
            })
            .boxed())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn websocket_url_follows_scheme() {
        let id: SessionId = "67e55044-10b1-426f-9247-bb680e5fe0c8".parse().unwrap();
        assert_eq!(
            ServiceClient::new("http://localhost:8080/").ws_url(id),
            "ws://localhost:8080/sessions/67e55044-10b1-426f-9247-bb680e5fe0c8/stream"
        );
        assert!(ServiceClient::new("https://kiosk.example").ws_url(id).starts_with("wss://kiosk.example/"));
    }
}
