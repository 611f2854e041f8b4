//! Completion prompt assembly.
//!
//! Slots are rendered in a fixed order: preamble and personality, facts from
//! the knowledge base, recent dialogue history, response format with sample
//! emoticons, and a trailing `Robot:` cue for the completion model.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, PromptError};
use crate::gesture::{EmoticonMap, GestureName};
use crate::knowledge::{collapse_whitespace, KnowledgeEntry};

pub const DEFAULT_PREAMBLE: &str = "This is a conversation with a robot receptionist.";
pub const FACTS_HEADER: &str = "Facts:";
pub const SPEAKER_CUE: &str = "Robot:";
pub const DEFAULT_HISTORY_WINDOW: usize = 10;

const DEFAULT_PERSONALITY: &str = "The receptionist works at the National Robotarium. \
It is friendly, polite and a little playful, gives short answers of one to three sentences, \
and is happy to chat about topics beyond the building too.";

const DEFAULT_RESPONSE_FORMAT: &str = "Write only what the robot says next. \
Include an emoticon from the list below wherever a facial expression suits the conversation: \
a smile for joy or humour, a wink for a joke, a nod to agree or confirm, \
and a sad face for empathy or bad news.\nSample emoticons:";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Speaker {
    User,
    Robot,
}

impl Speaker {
    pub fn label(self) -> &'static str {
        match self {
            Speaker::User => "User",
            Speaker::Robot => "Robot",
        }
    }
}

/// Anything that can appear as a line of dialogue history.
pub trait HistoryItem {
    fn speaker(&self) -> Speaker;
    fn text(&self) -> &str;
}

impl<S: AsRef<str>> HistoryItem for (Speaker, S) {
    fn speaker(&self) -> Speaker {
        self.0
    }

    fn text(&self) -> &str {
        self.1.as_ref()
    }
}

/// An emoticon offered to the model, with one example of its use.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmoticonSample {
    pub token: String,
    pub gesture: GestureName,
    pub example: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PromptSpec {
    pub preamble: String,
    pub personality: String,
    pub response_format_instructions: String,
    pub history_window: usize,
    pub emoticon_vocabulary: Vec<EmoticonSample>,
}

impl Default for PromptSpec {
    fn default() -> Self {
        let sample = |token: &str, gesture, example: &str| EmoticonSample {
            token: token.into(),
            gesture,
            example: example.into(),
        };
        Self {
            preamble: DEFAULT_PREAMBLE.into(),
            personality: DEFAULT_PERSONALITY.into(),
            response_format_instructions: DEFAULT_RESPONSE_FORMAT.into(),
            history_window: DEFAULT_HISTORY_WINDOW,
            emoticon_vocabulary: vec![
                sample(":)", GestureName::Smile, "I would be glad to help you with that! :)"),
                sample(";)", GestureName::Wink, "Between you and me, I am the best robot in the building ;)"),
                sample(":(", GestureName::Sad, "I am sorry to hear that. :("),
                sample("(nod)", GestureName::Nod, "Yes, that is correct. (nod)"),
            ],
        }
    }
}

impl PromptSpec {
    /// Loads a JSON spec; missing fields take their defaults.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let raw = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&raw).map_err(|source| ConfigError::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn validate(&self, map: &EmoticonMap) -> Result<(), PromptError> {
        if self.history_window < 2 {
            return Err(PromptError::WindowTooSmall(self.history_window));
        }
        if self.emoticon_vocabulary.is_empty() {
            return Err(PromptError::EmptyVocabulary);
        }
        for (i, sample) in self.emoticon_vocabulary.iter().enumerate() {
            if self.emoticon_vocabulary[..i]
                .iter()
                .any(|s| s.token == sample.token)
            {
                return Err(PromptError::DuplicateEmoticon(sample.token.clone()));
            }
            if map.gesture_for(&sample.token).is_none() {
                return Err(PromptError::UnmappedEmoticon(sample.token.clone()));
            }
        }
        Ok(())
    }

    fn opening(&self) -> String {
        let personality = self.personality.trim();
        if personality.is_empty() {
            self.preamble.clone()
        } else {
            format!("{} {}", self.preamble, personality)
        }
    }

    /// The response-format slot: instructions plus one sample line per emoticon.
    pub fn response_format(&self) -> String {
        let mut out = self.response_format_instructions.trim_end().to_owned();
        for sample in &self.emoticon_vocabulary {
            let _ = write!(
                out,
                "\n{} ({}): {}",
                sample.token,
                sample.gesture.as_str().to_lowercase(),
                sample.example
            );
        }
        out
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotsPresent {
    pub knowledge: bool,
    pub history: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssembledPrompt {
    pub text: String,
    pub token_estimate: usize,
    pub slots_present: SlotsPresent,
}

impl AssembledPrompt {
    /// Wraps raw text, e.g. for tests against the gateway.
    pub fn raw(text: impl Into<String>) -> Self {
        let text = text.into();
        Self {
            token_estimate: estimate_tokens(&text),
            text,
            slots_present: SlotsPresent::default(),
        }
    }
}

/// Rough token count: one token per four characters, rounded up.
pub fn estimate_tokens(text: &str) -> usize {
    text.chars().count().div_ceil(4)
}

pub fn render_turn(speaker: Speaker, text: &str) -> String {
    format!("{}: {}", speaker.label(), collapse_whitespace(text))
}

pub fn build<T: HistoryItem>(
    spec: &PromptSpec,
    knowledge: Option<&KnowledgeEntry>,
    history: &[T],
) -> Result<AssembledPrompt, PromptError> {
    if let Some(index) = history.iter().position(|t| t.text().trim().is_empty()) {
        return Err(PromptError::InvalidTurn { index });
    }
    let window = &history[history.len().saturating_sub(spec.history_window)..];

    let mut sections = vec![spec.opening()];
    if let Some(entry) = knowledge {
        sections.push(format!("{FACTS_HEADER}\n{}", entry.content));
    }
    if !window.is_empty() {
        let lines: Vec<String> = window
            .iter()
            .map(|t| render_turn(t.speaker(), t.text()))
            .collect();
        sections.push(lines.join("\n"));
    }
    sections.push(spec.response_format());
    sections.push(SPEAKER_CUE.to_owned());

    let text = sections.join("\n\n");
    Ok(AssembledPrompt {
        token_estimate: estimate_tokens(&text),
        slots_present: SlotsPresent {
            knowledge: knowledge.is_some(),
            history: !window.is_empty(),
        },
        text,
    })
}
