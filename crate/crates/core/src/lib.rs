//! Dialogue engine for an embodied receptionist.
//!
//! A turn flows through [`nlu`] (intent routing), [`knowledge`] (grounding
//! text), [`prompt`] (completion prompt), [`llm`] (completion model) and
//! [`gesture`] (emoticons to facial gestures). [`dialogue`] owns the session
//! state machine that ties them together.

pub mod adapter;
pub mod config;
pub mod dialogue;
pub mod error;
pub mod gesture;
pub mod knowledge;
pub mod llm;
pub mod nlu;
pub mod prompt;
pub mod protocol;
pub mod transcript;

pub use config::{AppConfig, LlmMode};
pub use dialogue::{
    DialogueState, Engine, Event, Reply, Session, SessionConfig, SessionId, SessionOverrides, Step,
    Turn,
};
pub use error::{ConfigError, KnowledgeError, LlmError, NluError, PromptError, TranscriptError};
pub use gesture::{AnnotatedResponse, EmoticonMap, GestureName, Segment};
pub use knowledge::{KnowledgeBase, KnowledgeEntry};
pub use llm::{Completion, CompletionModel, HttpCompletionClient, LlmConfig, MockCompletionModel};
pub use nlu::{IntentDef, IntentMatch, IntentRegistry, Routing};
pub use prompt::{AssembledPrompt, PromptSpec, Speaker};
pub use protocol::{Action, ActionMessage};
pub use transcript::{TranscriptRecord, TranscriptStore};
