use std::collections::HashMap;
use std::sync::Arc;
use std::time::Duration;

use chrono::Utc;
use receptionist_core::dialogue::{DialogueState, Engine, Event, Session, SessionId, SessionOverrides};
use receptionist_core::protocol::{segment_actions, Action, ActionMessage, Sequencer, SessionCreated};
use receptionist_core::transcript::{TranscriptRecord, TranscriptStore};
use receptionist_core::Speaker;
use tokio::sync::{broadcast, Mutex, RwLock};
use tracing::{debug, info, warn};

use crate::error::ServiceError;

const STREAM_CAPACITY: usize = 1024;

#[derive(Debug, Clone)]
pub struct Limits {
    pub max_sessions: usize,
    /// Sessions with no activity for this long are dropped from memory.
    pub session_idle: Duration,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_sessions: 64,
            session_idle: Duration::from_secs(15 * 60),
        }
    }
}

struct Live {
    session: Session,
    sequencer: Sequencer,
}

struct Slot {
    live: Mutex<Live>,
    stream: broadcast::Sender<ActionMessage>,
}

/// Owns all live sessions. Events for one session run one at a time, in
/// arrival order; different sessions proceed concurrently.
pub struct ConversationService {
    engine: Engine,
    store: TranscriptStore,
    limits: Limits,
    sessions: RwLock<HashMap<SessionId, Arc<Slot>>>,
}

impl ConversationService {
    pub fn new(engine: Engine, store: TranscriptStore, limits: Limits) -> Self {
        Self {
            engine,
            store,
            limits,
            sessions: RwLock::new(HashMap::new()),
        }
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    pub async fn session_count(&self) -> usize {
        self.sessions.read().await.len()
    }

    pub async fn create_session(
        &self,
        overrides: &SessionOverrides,
    ) -> Result<SessionCreated, ServiceError> {
        let session = self
            .engine
            .new_session(overrides)
            .map_err(|e| ServiceError::InvalidOverrides(e.to_string()))?;
        let mut sessions = self.sessions.write().await;
        if sessions.len() >= self.limits.max_sessions {
            return Err(ServiceError::CapacityExceeded(self.limits.max_sessions));
        }
        let created = SessionCreated {
            session_id: session.id,
            state: session.state,
        };
        let (stream, _) = broadcast::channel(STREAM_CAPACITY);
        sessions.insert(
            session.id,
            Arc::new(Slot {
                live: Mutex::new(Live {
                    session,
                    sequencer: Sequencer::default(),
                }),
                stream,
            }),
        );
        info!(session = %created.session_id, "session created");
        Ok(created)
    }

    async fn slot(&self, id: SessionId) -> Result<Arc<Slot>, ServiceError> {
        self.sessions
            .read()
            .await
            .get(&id)
            .cloned()
            .ok_or_else(|| ServiceError::UnknownSession(id.to_string()))
    }

    /// Runs one event and returns the actions it produced, after the new
    /// turns are persisted. The same actions go to every attached stream.
    pub async fn post_event(
        &self,
        id: SessionId,
        event: Event,
    ) -> Result<Vec<ActionMessage>, ServiceError> {
        event
            .validate()
            .map_err(|e| ServiceError::MalformedEvent(e.to_string()))?;
        let slot = self.slot(id).await?;
        let mut live = slot.live.lock().await;
        let Live { session, sequencer } = &mut *live;

        let mut out = Vec::new();
        let mut emit = |sequencer: &mut Sequencer, turn: u64, action: Action| {
            let msg = sequencer.stamp(id, turn, action);
            let _ = slot.stream.send(msg.clone());
            out.push(msg);
        };

        let responding = session.will_respond(&event);
        if responding {
            // user turn, then the robot turn this event will produce
            let robot_turn = session.next_index() + 1;
            emit(sequencer, robot_turn, Action::StateChange { state: DialogueState::Responding });
        }

        let step = self.engine.advance(session, &event).await;
        let new_turns = &session.history()[step.new_turns.clone()];
        let records: Vec<TranscriptRecord> = new_turns
            .iter()
            .map(|t| TranscriptRecord::new(id, t.clone()))
            .collect();
        self.store.append(records).await?;

        let turn_index = new_turns
            .iter()
            .rev()
            .find(|t| t.speaker == Speaker::Robot)
            .map_or(sequencer.current_turn(), |t| t.index);
        for action in segment_actions(&step.actions) {
            emit(sequencer, turn_index, action);
        }
        if responding || step.state != step.previous {
            emit(sequencer, turn_index, Action::StateChange { state: step.state });
        }
        debug!(session = %id, ?event, actions = out.len(), "event processed");
        Ok(out)
    }

    pub async fn subscribe(
        &self,
        id: SessionId,
    ) -> Result<broadcast::Receiver<ActionMessage>, ServiceError> {
        Ok(self.slot(id).await?.stream.subscribe())
    }

    /// Persisted records for a live or previously seen session.
    pub async fn transcript(&self, id: SessionId) -> Result<Vec<TranscriptRecord>, ServiceError> {
        let known = self.sessions.read().await.contains_key(&id);
        let store = self.store.clone();
        let records = tokio::task::spawn_blocking(move || store.read_session(id))
            .await
            .map_err(|e| ServiceError::Internal(e.to_string()))??;
        if records.is_empty() && !known {
            return Err(ServiceError::UnknownSession(id.to_string()));
        }
        Ok(records)
    }

    /// Sends `SilenceTimeout` to quiet listening sessions and evicts idle ones.
    /// Busy sessions are skipped until the next sweep.
    pub async fn sweep(&self) {
        let now = Utc::now();
        let slots: Vec<(SessionId, Arc<Slot>)> = self
            .sessions
            .read()
            .await
            .iter()
            .map(|(id, s)| (*id, s.clone()))
            .collect();
        let silence = self.engine.silence_timeout;
        let mut evict = Vec::new();
        for (id, slot) in slots {
            let (quiet_for, state) = match slot.live.try_lock() {
                Ok(live) => (
                    (now - live.session.last_activity).to_std().unwrap_or_default(),
                    live.session.state,
                ),
                Err(_) => continue,
            };
            if quiet_for >= self.limits.session_idle {
                evict.push(id);
            } else if state == DialogueState::Listening && quiet_for >= silence {
                if let Err(e) = self.post_event(id, Event::SilenceTimeout).await {
                    warn!(session = %id, error = %e, "silence timeout failed");
                }
            }
        }
        if !evict.is_empty() {
            let mut sessions = self.sessions.write().await;
            for id in evict {
                sessions.remove(&id);
                info!(session = %id, "session evicted after inactivity");
            }
        }
    }

    pub fn spawn_sweeper(self: &Arc<Self>, every: Duration) -> tokio::task::JoinHandle<()> {
        let service = Arc::downgrade(self);
        tokio::spawn(async move {
            let mut tick = tokio::time::interval(every);
            tick.set_missed_tick_behavior(tokio::time::MissedTickBehavior::Delay);
            loop {
                tick.tick().await;
                let Some(service) = service.upgrade() else { break };
                service.sweep().await;
            }
        })
    }
}
