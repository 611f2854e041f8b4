use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Path, State};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use receptionist_core::dialogue::{Event, SessionId, SessionOverrides};
use receptionist_core::protocol::{ActionMessage, EventResponse, Health, SessionCreated};
use receptionist_core::transcript::TranscriptRecord;
use tokio::sync::broadcast;
use tracing::{debug, warn};

use crate::error::ServiceError;
use crate::service::ConversationService;

type AppState = Arc<ConversationService>;

pub fn router(service: Arc<ConversationService>) -> Router {
    Router::new()
        .route("/healthz", get(healthz))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}/events", post(post_event))
        .route("/sessions/{id}/transcript", get(transcript))
        .route("/sessions/{id}/stream", get(stream))
        .with_state(service)
}

fn session_id(raw: &str) -> Result<SessionId, ServiceError> {
    // An unparsable id can never name a session.
    raw.parse().map_err(|_| ServiceError::UnknownSession(raw.to_owned()))
}

async fn healthz() -> Json<Health> {
    Json(Health {
        status: "ok".into(),
    })
}

async fn create_session(
    State(service): State<AppState>,
    body: Bytes,
) -> Result<Json<SessionCreated>, ServiceError> {
    let overrides: SessionOverrides = if body.iter().all(u8::is_ascii_whitespace) {
        SessionOverrides::default()
    } else {
        serde_json::from_slice(&body).map_err(|e| ServiceError::InvalidOverrides(e.to_string()))?
    };
    Ok(Json(service.create_session(&overrides).await?))
}

async fn post_event(
    State(service): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<EventResponse>, ServiceError> {
    let id = session_id(&id)?;
    let event: Event =
        serde_json::from_slice(&body).map_err(|e| ServiceError::MalformedEvent(e.to_string()))?;
    let actions = service.post_event(id, event).await?;
    Ok(Json(EventResponse { actions }))
}

async fn transcript(
    State(service): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<Vec<TranscriptRecord>>, ServiceError> {
    let id = session_id(&id)?;
    Ok(Json(service.transcript(id).await?))
}

async fn stream(
    State(service): State<AppState>,
    Path(id): Path<String>,
    ws: WebSocketUpgrade,
) -> Result<Response, ServiceError> {
    let id = session_id(&id)?;
    // Subscribe before upgrading so nothing produced after this request is missed.
    let rx = service.subscribe(id).await?;
    Ok(ws.on_upgrade(move |socket| forward(socket, rx, id)).into_response())
}

async fn forward(mut socket: WebSocket, mut rx: broadcast::Receiver<ActionMessage>, id: SessionId) {
    loop {
        tokio::select! {
            msg = rx.recv() => match msg {
                Ok(msg) => {
                    let json = serde_json::to_string(&msg).expect("action message serializes");
                    if socket.send(Message::Text(json.into())).await.is_err() {
                        break;
                    }
                }
                Err(broadcast::error::RecvError::Lagged(n)) => {
                    warn!(session = %id, skipped = n, "stream subscriber lagged; closing");
                    break;
                }
                Err(broadcast::error::RecvError::Closed) => break,
            },
            incoming = socket.recv() => match incoming {
                Some(Ok(Message::Close(_))) | None | Some(Err(_)) => break,
                Some(Ok(_)) => {}
            },
        }
    }
    debug!(session = %id, "stream closed");
    let _ = socket.send(Message::Close(None)).await;
}
