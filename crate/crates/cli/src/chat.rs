//! Console conversation, either in-process or against a running service.
//!
//! Typing ends each utterance; end of input (Ctrl-D) means the user left.

use receptionist_client::ServiceClient;
use receptionist_core::adapter::{ConsoleAdapter, SpeechAdapter};
use receptionist_core::protocol::{Action, ActionMessage};
use receptionist_core::{
    AppConfig, Engine, Event, LlmMode, Segment, Session, SessionOverrides, TranscriptRecord,
    TranscriptStore,
};

use crate::{CliResult, Failure};

struct Local {
    engine: Engine,
    session: Session,
    store: TranscriptStore,
}

impl Local {
    async fn step(&mut self, event: Event) -> CliResult<Vec<Segment>> {
        let step = self.engine.advance(&mut self.session, &event).await;
        let records: Vec<TranscriptRecord> = self.session.history()[step.new_turns]
            .iter()
            .map(|t| TranscriptRecord::new(self.session.id, t.clone()))
            .collect();
        self.store.append(records).await.map_err(Failure::runtime)?;
        Ok(step.actions.segments)
    }
}

pub async fn local(config: &AppConfig, mode: Option<LlmMode>) -> CliResult {
    let engine = config.engine(mode).map_err(Failure::config)?;
    let session = engine
        .new_session(&SessionOverrides::default())
        .map_err(Failure::config)?;
    let store = TranscriptStore::open(&config.transcript_dir).map_err(Failure::config)?;
    let mut local = Local {
        engine,
        session,
        store,
    };
    let mut console = ConsoleAdapter::stdio();

    let greeting = local.step(Event::UserDetected).await?;
    console.perform(&greeting).map_err(Failure::runtime)?;
    while let Some(line) = console.listen().map_err(Failure::runtime)? {
        let reply = local.step(Event::utterance(line)).await?;
        console.perform(&reply).map_err(Failure::runtime)?;
    }
    local.step(Event::UserLeft).await?;
    eprintln!(
        "session {} saved under {}",
        local.session.id,
        local.store.dir().display()
    );
    Ok(())
}

fn perform(console: &mut impl SpeechAdapter, actions: &[ActionMessage]) -> CliResult {
    let segments: Vec<Segment> = actions
        .iter()
        .filter_map(|m| match &m.action {
            Action::Speech { text } => Some(Segment::speech(text.as_str())),
            Action::Gesture { name } => Some(Segment::gesture(*name)),
            Action::StateChange { .. } => None,
        })
        .collect();
    console.perform(&segments).map_err(Failure::runtime)
}

pub async fn remote(url: &str) -> CliResult {
    let client = ServiceClient::new(url);
    let session = client
        .create_session(&SessionOverrides::default())
        .await
        .map_err(Failure::runtime)?
        .session_id;
    let mut console = ConsoleAdapter::stdio();

    let greeting = client
        .post_event(session, &Event::UserDetected)
        .await
        .map_err(Failure::runtime)?;
    perform(&mut console, &greeting)?;
    while let Some(line) = console.listen().map_err(Failure::runtime)? {
        let reply = client
            .post_event(session, &Event::utterance(line))
            .await
            .map_err(Failure::runtime)?;
        perform(&mut console, &reply)?;
    }
    client
        .post_event(session, &Event::UserLeft)
        .await
        .map_err(Failure::runtime)?;
    eprintln!("session {session}");
    Ok(())
}
