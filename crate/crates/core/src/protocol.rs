//! JSON wire types shared by the HTTP service and its clients.

use serde::{Deserialize, Serialize};

use crate::dialogue::{DialogueState, SessionId};
use crate::gesture::{AnnotatedResponse, GestureName, Segment};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Action {
    Speech { text: String },
    Gesture { name: GestureName },
    StateChange { state: DialogueState },
}

impl From<&Segment> for Action {
    fn from(segment: &Segment) -> Self {
        match segment {
            Segment::Speech { text } => Action::Speech { text: text.clone() },
            Segment::Gesture { name } => Action::Gesture { name: *name },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionMessage {
    pub session_id: SessionId,
    pub turn_index: u64,
    pub sequence: u64,
    pub action: Action,
}

impl ActionMessage {
    pub fn position(&self) -> (u64, u64) {
        (self.turn_index, self.sequence)
    }
}

/// Numbers outgoing actions so that `(turn_index, sequence)` strictly
/// increases over a session's lifetime.
#[derive(Debug, Clone, Default)]
pub struct Sequencer {
    turn_index: u64,
    next_sequence: u64,
}

impl Sequencer {
    pub fn stamp(&mut self, session_id: SessionId, turn_index: u64, action: Action) -> ActionMessage {
        if turn_index > self.turn_index {
            self.turn_index = turn_index;
            self.next_sequence = 0;
        }
        let msg = ActionMessage {
            session_id,
            turn_index: self.turn_index,
            sequence: self.next_sequence,
            action,
        };
        self.next_sequence += 1;
        msg
    }

    pub fn current_turn(&self) -> u64 {
        self.turn_index
    }
}

/// Speech and gesture actions of a response, in play order.
pub fn segment_actions(response: &AnnotatedResponse) -> impl Iterator<Item = Action> + '_ {
    response.segments.iter().map(Action::from)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionCreated {
    pub session_id: SessionId,
    pub state: DialogueState,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventResponse {
    pub actions: Vec<ActionMessage>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Health {
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
}
