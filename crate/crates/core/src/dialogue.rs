//! Per-session dialogue state machine and the turn pipeline.
//!
//! | state     | event          | next      | emits                |
//! |-----------|----------------|-----------|----------------------|
//! | Idle      | UserDetected   | Listening | greeting             |
//! | Listening | UserUtterance  | Listening | LLM response         |
//! | any       | UserLeft       | Idle      | nothing              |
//! | Listening | SilenceTimeout | Idle      | nothing              |
//!
//! Every other pair is a no-op. `Greeting` and `Responding` are only held
//! while the corresponding event is being processed.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Duration;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;
use tracing::warn;
use uuid::Uuid;

use crate::error::PromptError;
use crate::gesture::{self, AnnotatedResponse, EmoticonMap, GestureName};
use crate::knowledge::KnowledgeBase;
use crate::llm::CompletionModel;
use crate::nlu::{self, IntentMatch, IntentRegistry, Routing};
use crate::prompt::{self, AssembledPrompt, HistoryItem, PromptSpec, Speaker};

pub const DEFAULT_GREETING: &str = "Hello, I am the Receptionist here at the National Robotarium. \
Would you like to know about this facility? :)";
pub const DEFAULT_FALLBACK: &str =
    "I'm sorry, I am having trouble thinking right now. Could you ask me that again? :(";
pub const DEFAULT_SILENCE_TIMEOUT: Duration = Duration::from_secs(30);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DialogueState {
    Idle,
    Greeting,
    Listening,
    Responding,
}

impl fmt::Display for DialogueState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Event {
    UserDetected,
    #[serde(rename = "utterance")]
    UserUtterance {
        text: String,
    },
    UserLeft,
    SilenceTimeout,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DialogueError {
    #[error("utterance text is empty")]
    EmptyUtterance,
    #[error("session is {0}, not listening")]
    NotListening(DialogueState),
    #[error(transparent)]
    Prompt(#[from] PromptError),
}

impl Event {
    pub fn utterance(text: impl Into<String>) -> Self {
        Event::UserUtterance { text: text.into() }
    }

    pub fn validate(&self) -> Result<(), DialogueError> {
        match self {
            Event::UserUtterance { text } if text.trim().is_empty() => {
                Err(DialogueError::EmptyUtterance)
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SessionId(Uuid);

impl SessionId {
    pub fn new() -> Self {
        Self(Uuid::new_v4())
    }
}

impl Default for SessionId {
    fn default() -> Self {
        Self::new()
    }
}

impl fmt::Display for SessionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl FromStr for SessionId {
    type Err = uuid::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Uuid::parse_str(s).map(Self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Turn {
    pub index: u64,
    pub speaker: Speaker,
    /// For robot turns, the speech with emoticons removed.
    pub text: String,
    #[serde(default)]
    pub gestures: Vec<GestureName>,
    /// Robot turns only: the speech and gesture sequence that was played.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub segments: Option<AnnotatedResponse>,
    pub intent: Option<String>,
    pub confidence: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub routing: Option<Routing>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prompt_hash: Option<String>,
    #[serde(default)]
    pub fallback: bool,
    pub timestamp: DateTime<Utc>,
}

impl Turn {
    /// A robot turn with no preceding user turn in its encounter.
    pub fn is_greeting(&self) -> bool {
        self.speaker == Speaker::Robot && self.routing.is_none() && self.prompt_hash.is_none()
    }
}

impl HistoryItem for Turn {
    fn speaker(&self) -> Speaker {
        self.speaker
    }

    fn text(&self) -> &str {
        &self.text
    }
}

/// Per-session settings, copied from the engine defaults at creation.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionConfig {
    pub threshold: f64,
    pub prompt_spec: PromptSpec,
    pub emoticons: EmoticonMap,
    pub greeting: String,
    pub fallback: String,
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self {
            threshold: nlu::DEFAULT_THRESHOLD,
            prompt_spec: PromptSpec::default(),
            emoticons: EmoticonMap::default(),
            greeting: DEFAULT_GREETING.into(),
            fallback: DEFAULT_FALLBACK.into(),
        }
    }
}

/// Optional per-session changes to the engine defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SessionOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub personality: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub history_window: Option<usize>,
}

impl SessionConfig {
    pub fn with_overrides(&self, overrides: &SessionOverrides) -> Result<Self, PromptError> {
        let mut cfg = self.clone();
        if let Some(t) = overrides.threshold {
            cfg.threshold = t.clamp(0.0, 1.0);
        }
        if let Some(p) = &overrides.personality {
            cfg.prompt_spec.personality = p.clone();
        }
        if let Some(w) = overrides.history_window {
            cfg.prompt_spec.history_window = w;
        }
        cfg.prompt_spec.validate(&cfg.emoticons)?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone)]
pub struct Session {
    pub id: SessionId,
    pub state: DialogueState,
    history: Vec<Turn>,
    /// Start of the current encounter in `history`; earlier turns are not
    /// shown to the model.
    encounter_start: usize,
    pub created_at: DateTime<Utc>,
    pub last_activity: DateTime<Utc>,
    pub config: SessionConfig,
}

impl Session {
    pub fn new(config: SessionConfig) -> Self {
        Self::with_id(SessionId::new(), config)
    }

    pub fn with_id(id: SessionId, config: SessionConfig) -> Self {
        let now = Utc::now();
        Self {
            id,
            state: DialogueState::Idle,
            history: Vec::new(),
            encounter_start: 0,
            created_at: now,
            last_activity: now,
            config,
        }
    }

    pub fn history(&self) -> &[Turn] {
        &self.history
    }

    /// Turns visible to the model in the current encounter.
    pub fn context(&self) -> &[Turn] {
        &self.history[self.encounter_start..]
    }

    pub fn next_index(&self) -> u64 {
        self.history.last().map_or(0, |t| t.index + 1)
    }

    /// Whether `event` would run the LLM pipeline in the current state.
    pub fn will_respond(&self, event: &Event) -> bool {
        self.state == DialogueState::Listening && matches!(event, Event::UserUtterance { .. })
    }

    fn push_turn(&mut self, mut turn: Turn) {
        turn.index = self.next_index();
        self.history.push(turn);
    }

    fn reset_to_idle(&mut self) {
        self.state = DialogueState::Idle;
        self.encounter_start = self.history.len();
    }
}

/// The outcome of one LLM-backed turn.
#[derive(Debug, Clone, PartialEq)]
pub struct Reply {
    pub response: AnnotatedResponse,
    pub matches: Vec<IntentMatch>,
    pub routing: Routing,
    pub prompt: AssembledPrompt,
    pub fallback: bool,
}

/// Result of feeding one event to a session.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub previous: DialogueState,
    pub state: DialogueState,
    pub actions: AnnotatedResponse,
    /// Range of `session.history()` appended by this step.
    pub new_turns: Range<usize>,
    pub reply: Option<Reply>,
}

impl Step {
    pub fn is_noop(&self) -> bool {
        self.previous == self.state && self.actions.is_empty() && self.new_turns.is_empty()
    }
}

/// Shared, read-only resources for running sessions.
#[derive(Clone)]
pub struct Engine {
    registry: Arc<IntentRegistry>,
    knowledge: Arc<KnowledgeBase>,
    model: Arc<dyn CompletionModel>,
    defaults: SessionConfig,
    pub silence_timeout: Duration,
}

impl fmt::Debug for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Engine")
            .field("intents", &self.registry.len())
            .field("knowledge", &self.knowledge.len())
            .field("defaults", &self.defaults)
            .finish_non_exhaustive()
    }
}

impl Engine {
    pub fn new(
        registry: IntentRegistry,
        knowledge: KnowledgeBase,
        model: Arc<dyn CompletionModel>,
        defaults: SessionConfig,
    ) -> Result<Self, PromptError> {
        defaults.prompt_spec.validate(&defaults.emoticons)?;
        Ok(Self {
            registry: Arc::new(registry),
            knowledge: Arc::new(knowledge),
            model,
            defaults,
            silence_timeout: DEFAULT_SILENCE_TIMEOUT,
        })
    }

    pub fn with_model(&self, model: Arc<dyn CompletionModel>) -> Self {
        Self {
            model,
            ..self.clone()
        }
    }

    pub fn registry(&self) -> &IntentRegistry {
        &self.registry
    }

    pub fn knowledge(&self) -> &KnowledgeBase {
        &self.knowledge
    }

    pub fn defaults(&self) -> &SessionConfig {
        &self.defaults
    }

    pub fn new_session(&self, overrides: &SessionOverrides) -> Result<Session, PromptError> {
        Ok(Session::new(self.defaults.with_overrides(overrides)?))
    }

    pub async fn advance(&self, session: &mut Session, event: &Event) -> Step {
        let previous = session.state;
        let before = session.history.len();
        let mut actions = AnnotatedResponse::default();
        let mut reply = None;

        match (session.state, event) {
            (DialogueState::Idle, Event::UserDetected) => {
                session.state = DialogueState::Greeting;
                actions = gesture::parse(&session.config.greeting, &session.config.emoticons);
                session.push_turn(robot_turn(&actions, None, None, None, false));
                session.state = DialogueState::Listening;
            }
            (DialogueState::Listening, Event::UserUtterance { text }) if !text.trim().is_empty() => {
                // State and text were checked above, so respond cannot refuse.
                match self.respond(session, text).await {
                    Ok(r) => {
                        actions = r.response.clone();
                        reply = Some(r);
                    }
                    Err(e) => warn!(error = %e, "respond failed"),
                }
            }
            (state, Event::UserLeft) if state != DialogueState::Idle => session.reset_to_idle(),
            (DialogueState::Listening, Event::SilenceTimeout) => session.reset_to_idle(),
            _ => {}
        }

        let step = Step {
            previous,
            state: session.state,
            actions,
            new_turns: before..session.history.len(),
            reply,
        };
        if !step.is_noop() {
            session.last_activity = Utc::now();
        }
        step
    }

    /// Runs one closed/open-domain turn and appends the user and robot turns.
    pub async fn respond(&self, session: &mut Session, text: &str) -> Result<Reply, DialogueError> {
        if session.state != DialogueState::Listening {
            return Err(DialogueError::NotListening(session.state));
        }
        let text = text.trim();
        if text.is_empty() {
            return Err(DialogueError::EmptyUtterance);
        }
        session.state = DialogueState::Responding;

        let (matches, nlu_routing) = self.registry.route_text(text, session.config.threshold);
        let knowledge = nlu_routing.intent().and_then(|i| self.knowledge.retrieve(i));
        let routing = if knowledge.is_some() {
            nlu_routing
        } else {
            Routing::OpenDomain
        };
        let top = matches.first();
        let intent = top.map(|m| m.intent.clone());
        let confidence = top.map(|m| m.confidence);

        session.push_turn(Turn {
            index: 0,
            speaker: Speaker::User,
            text: text.to_owned(),
            gestures: Vec::new(),
            segments: None,
            intent: intent.clone(),
            confidence,
            routing: Some(routing.clone()),
            prompt_hash: None,
            fallback: false,
            timestamp: Utc::now(),
        });

        let prompt = match prompt::build(&session.config.prompt_spec, knowledge, session.context()) {
            Ok(p) => p,
            Err(e) => {
                session.state = DialogueState::Listening;
                return Err(e.into());
            }
        };
        let (response, fallback) = match self.model.complete(&prompt).await {
            Ok(c) => (gesture::parse(&c.text, &session.config.emoticons), false),
            Err(e) => {
                warn!(error = %e, session = %session.id, "llm unavailable, using fallback");
                (
                    gesture::parse(&session.config.fallback, &session.config.emoticons),
                    true,
                )
            }
        };
        // The model may answer with emoticons only; keep a speakable turn.
        let response = if response.speech_text().is_empty() {
            let mut r = gesture::parse(&session.config.fallback, &session.config.emoticons);
            r.segments.splice(0..0, response.segments);
            r
        } else {
            response
        };

        session.push_turn(robot_turn(
            &response,
            intent,
            confidence,
            Some((routing.clone(), prompt_hash(&prompt.text))),
            fallback,
        ));
        session.state = DialogueState::Listening;

        Ok(Reply {
            response,
            matches,
            routing,
            prompt,
            fallback,
        })
    }
}

fn robot_turn(
    response: &AnnotatedResponse,
    intent: Option<String>,
    confidence: Option<f64>,
    routed: Option<(Routing, String)>,
    fallback: bool,
) -> Turn {
    let (routing, prompt_hash) = routed.unzip();
    Turn {
        index: 0,
        speaker: Speaker::Robot,
        text: response.speech_text(),
        gestures: response.gestures(),
        segments: Some(response.clone()),
        intent,
        confidence,
        routing,
        prompt_hash,
        fallback,
        timestamp: Utc::now(),
    }
}

pub fn prompt_hash(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

#[cfg(test)]
mod tests {
    use std::sync::Mutex;

    use async_trait::async_trait;

    use super::*;
    use crate::error::LlmError;
    use crate::gesture::Segment;
    use crate::llm::{Completion, MockCompletionModel, MockRule, UnavailableModel};
    use crate::nlu::IntentDef;

    const FACILITY: &str = "The National Robotarium is a state-of-the art research facility \
                            located on the Heriot-Watt campus in Edinburgh.";

    #[derive(Default)]
    struct Capture {
        inner: MockCompletionModel,
        prompts: Mutex<Vec<String>>,
    }

    #[async_trait]
    impl CompletionModel for Capture {
        async fn complete(&self, prompt: &AssembledPrompt) -> Result<Completion, LlmError> {
            self.prompts.lock().unwrap().push(prompt.text.clone());
            self.inner.complete(prompt).await
        }
    }

    fn engine_with(model: Arc<dyn CompletionModel>) -> Engine {
        let registry = IntentRegistry::from_defs([IntentDef {
            name: "facility_info".into(),
            phrases: vec!["facility".into(), "national robotarium".into()],
            priority: 0,
        }])
        .unwrap();
        let mut kb = KnowledgeBase::default();
        kb.ingest("facility_info", FACILITY, "test", false).unwrap();
        Engine::new(registry, kb, model, SessionConfig::default()).unwrap()
    }

    fn facility_mock() -> MockCompletionModel {
        MockCompletionModel::new(vec![MockRule {
            contains: format!("Facts:\n{FACILITY}"),
            reply: format!("Sure. :) {FACILITY}"),
        }])
    }

    async fn listening(engine: &Engine) -> Session {
        let mut s = engine.new_session(&SessionOverrides::default()).unwrap();
        engine.advance(&mut s, &Event::UserDetected).await;
        s
    }

    #[tokio::test]
    async fn greeting_on_detection() {
        let engine = engine_with(Arc::new(MockCompletionModel::default()));
        let mut s = engine.new_session(&SessionOverrides::default()).unwrap();
        let step = engine.advance(&mut s, &Event::UserDetected).await;
        assert_eq!(step.state, DialogueState::Listening);
        assert_eq!(
            step.actions.segments,
            vec![
                Segment::speech(
                    "Hello, I am the Receptionist here at the National Robotarium. \
                     Would you like to know about this facility?"
                ),
                Segment::gesture(GestureName::Smile),
            ]
        );
        assert_eq!(s.history().len(), 1);
        assert!(s.history()[0].is_greeting());
    }

    #[tokio::test]
    async fn noop_pairs_leave_session_untouched() {
        let engine = engine_with(Arc::new(MockCompletionModel::default()));
        let mut s = engine.new_session(&SessionOverrides::default()).unwrap();
        for event in [Event::utterance("hi"), Event::SilenceTimeout, Event::UserLeft] {
            let step = engine.advance(&mut s, &event).await;
            assert!(step.is_noop(), "{event:?}");
            assert_eq!(s.state, DialogueState::Idle);
        }
        let mut s = listening(&engine).await;
        let len = s.history().len();
        let step = engine.advance(&mut s, &Event::UserDetected).await;
        assert!(step.is_noop());
        assert_eq!(s.history().len(), len);
        assert_eq!(s.state, DialogueState::Listening);
    }

    #[tokio::test]
    async fn leaving_resets_to_idle() {
        let engine = engine_with(Arc::new(MockCompletionModel::default()));
        let mut s = listening(&engine).await;
        let step = engine.advance(&mut s, &Event::UserLeft).await;
        assert_eq!(step.state, DialogueState::Idle);
        assert!(step.actions.is_empty());
        assert!(s.context().is_empty());
        assert_eq!(s.history().len(), 1);

        let mut s = listening(&engine).await;
        engine.advance(&mut s, &Event::SilenceTimeout).await;
        assert_eq!(s.state, DialogueState::Idle);
    }

    #[tokio::test]
    async fn closed_domain_turn_is_grounded() {
        let capture = Arc::new(Capture {
            inner: facility_mock(),
            ..Capture::default()
        });
        let engine = engine_with(capture.clone());
        let mut s = listening(&engine).await;
        let step = engine
            .advance(&mut s, &Event::utterance("Tell me about this facility"))
            .await;
        let reply = step.reply.unwrap();
        assert_eq!(reply.routing, Routing::ClosedDomain("facility_info".into()));
        assert!(reply.response.speech_text().contains("National Robotarium"));
        assert_eq!(step.new_turns, 1..3);

        let prompts = capture.prompts.lock().unwrap();
        assert!(prompts[0].contains(FACILITY));
        let user = &s.history()[1];
        assert_eq!(user.intent.as_deref(), Some("facility_info"));
        assert_eq!(user.confidence, Some(0.2));
        let robot = &s.history()[2];
        assert_eq!(robot.gestures, [GestureName::Smile]);
        assert_eq!(robot.prompt_hash.as_deref(), Some(prompt_hash(&prompts[0]).as_str()));
        assert_eq!(robot.text, format!("Sure. {FACILITY}"));
    }

    #[tokio::test]
    async fn open_domain_turn_has_no_facts() {
        let capture = Arc::new(Capture::default());
        let engine = engine_with(capture.clone());
        let mut s = listening(&engine).await;
        let step = engine.advance(&mut s, &Event::utterance("Can you tell a joke?")).await;
        assert_eq!(step.reply.unwrap().routing, Routing::OpenDomain);
        assert!(!capture.prompts.lock().unwrap()[0].contains("Facts:"));
        assert_eq!(s.history()[1].intent, None);
    }

    #[tokio::test]
    async fn missing_knowledge_downgrades_to_open_domain() {
        let registry = IntentRegistry::from_defs([IntentDef {
            name: "events".into(),
            phrases: vec!["events".into()],
            priority: 0,
        }])
        .unwrap();
        let engine = Engine::new(
            registry,
            KnowledgeBase::default(),
            Arc::new(MockCompletionModel::default()),
            SessionConfig::default(),
        )
        .unwrap();
        let mut s = listening(&engine).await;
        let reply = engine.respond(&mut s, "any events today").await.unwrap();
        assert_eq!(reply.routing, Routing::OpenDomain);
        assert!(!reply.prompt.text.contains("Facts:"));
        assert_eq!(s.history()[1].intent.as_deref(), Some("events"));
    }

    #[tokio::test]
    async fn llm_failure_uses_fallback_and_session_survives() {
        let engine = engine_with(Arc::new(UnavailableModel(LlmError::EndpointUnreachable(
            "down".into(),
        ))));
        let mut s = listening(&engine).await;
        let step = engine.advance(&mut s, &Event::utterance("hello")).await;
        let reply = step.reply.unwrap();
        assert!(reply.fallback);
        assert_eq!(reply.response.gestures(), [GestureName::Sad]);
        assert_eq!(s.state, DialogueState::Listening);
        assert!(s.history()[2].fallback);

        let step = engine.advance(&mut s, &Event::utterance("still there?")).await;
        assert_eq!(step.new_turns.len(), 2);
    }

    #[tokio::test]
    async fn respond_guards() {
        let engine = engine_with(Arc::new(MockCompletionModel::default()));
        let mut s = engine.new_session(&SessionOverrides::default()).unwrap();
        assert_eq!(
            engine.respond(&mut s, "hi").await,
            Err(DialogueError::NotListening(DialogueState::Idle))
        );
        let mut s = listening(&engine).await;
        assert_eq!(engine.respond(&mut s, "  ").await, Err(DialogueError::EmptyUtterance));
        assert_eq!(s.state, DialogueState::Listening);
        let step = engine.advance(&mut s, &Event::utterance("   ")).await;
        assert!(step.is_noop());
    }

    #[tokio::test]
    async fn emoticon_only_reply_still_speaks() {
        let engine = engine_with(Arc::new(MockCompletionModel::new(vec![MockRule {
            contains: "User:".into(),
            reply: ";)".into(),
        }])));
        let mut s = listening(&engine).await;
        let reply = engine.respond(&mut s, "wink at me").await.unwrap();
        assert_eq!(reply.response.segments[0], Segment::gesture(GestureName::Wink));
        assert!(!reply.response.speech_text().is_empty());
    }

    #[tokio::test]
    async fn encounter_context_resets_but_history_keeps_growing() {
        let capture = Arc::new(Capture::default());
        let engine = engine_with(capture.clone());
        let mut s = listening(&engine).await;
        engine.advance(&mut s, &Event::utterance("first visit")).await;
        engine.advance(&mut s, &Event::UserLeft).await;
        engine.advance(&mut s, &Event::UserDetected).await;
        engine.advance(&mut s, &Event::utterance("second visit")).await;

        let prompts = capture.prompts.lock().unwrap();
        assert!(!prompts[1].contains("first visit"));
        let indices: Vec<u64> = s.history().iter().map(|t| t.index).collect();
        assert_eq!(indices, [0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn event_wire_format() {
        let e: Event = serde_json::from_str(r#"{"type":"utterance","text":"hi"}"#).unwrap();
        assert_eq!(e, Event::utterance("hi"));
        let e: Event = serde_json::from_str(r#"{"type":"user_detected"}"#).unwrap();
        assert_eq!(e, Event::UserDetected);
        let e: Event = serde_json::from_str(r#"{"type":"user_left"}"#).unwrap();
        assert_eq!(e, Event::UserLeft);
        assert!(serde_json::from_str::<Event>(r#"{"type":"dance"}"#).is_err());
        assert_eq!(Event::utterance(" ").validate(), Err(DialogueError::EmptyUtterance));
        assert_eq!(serde_json::to_string(&DialogueState::Listening).unwrap(), r#""Listening""#);
    }

    #[test]
    fn overrides_are_validated() {
        let base = SessionConfig::default();
        let cfg = base
            .with_overrides(&SessionOverrides {
                threshold: Some(0.5),
                personality: Some("Grumpy.".into()),
                history_window: Some(4),
            })
            .unwrap();
        assert_eq!(cfg.threshold, 0.5);
        assert_eq!(cfg.prompt_spec.personality, "Grumpy.");
        assert!(base
            .with_overrides(&SessionOverrides {
                history_window: Some(1),
                ..Default::default()
            })
            .is_err());
    }
}
