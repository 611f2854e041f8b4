//! Session service for the receptionist dialogue engine.
//!
//! | method | path                         | body / reply                          |
//! |--------|------------------------------|---------------------------------------|
//! | POST   | `/sessions`                  | overrides → `{session_id, state}`     |
//! | POST   | `/sessions/{id}/events`      | `{type, text?}` → `{actions: [...]}`  |
//! | GET    | `/sessions/{id}/transcript`  | transcript records                    |
//! | GET    | `/sessions/{id}/stream`      | WebSocket of action messages          |
//! | GET    | `/healthz`                   | `{status: "ok"}`                      |

mod error;
mod routes;
mod service;

use std::future::Future;
use std::net::SocketAddr;
use std::sync::Arc;
use std::time::Duration;

use receptionist_core::{AppConfig, ConfigError, Engine, LlmMode, TranscriptStore};

pub use error::ServiceError;
pub use routes::router;
pub use service::{ConversationService, Limits};

/// Builds the service described by `config`.
pub fn from_config(
    config: &AppConfig,
    mode: Option<LlmMode>,
) -> Result<Arc<ConversationService>, ConfigError> {
    let engine = config.engine(mode)?;
    build(engine, config)
}

pub fn build(engine: Engine, config: &AppConfig) -> Result<Arc<ConversationService>, ConfigError> {
    let store = TranscriptStore::open(&config.transcript_dir).map_err(|e| ConfigError::InvalidValue {
        key: "transcript_dir".into(),
        value: format!("{}: {e}", config.transcript_dir.display()),
    })?;
    let limits = Limits {
        max_sessions: config.max_sessions,
        session_idle: config.session_idle(),
    };
    Ok(Arc::new(ConversationService::new(engine, store, limits)))
}

/// Serves on `listener` until `shutdown` resolves, sweeping idle sessions
/// once a second.
pub async fn serve(
    listener: tokio::net::TcpListener,
    service: Arc<ConversationService>,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    let sweeper = service.spawn_sweeper(Duration::from_secs(1));
    let addr: SocketAddr = listener.local_addr()?;
    tracing::info!(%addr, "conversation service listening");
    let result = axum::serve(listener, router(service))
        .with_graceful_shutdown(shutdown)
        .await;
    sweeper.abort();
    result
}
