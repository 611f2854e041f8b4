//! Replays recorded sessions into fresh sessions driven by the mock model.
//!
//! User turns become utterance events. A greeting turn marks a new
//! encounter: the user leaves (if still present) and is detected again.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::anyhow;
use clap::Args;
use receptionist_core::transcript::{group_by_session, read_file};
use receptionist_core::{
    AppConfig, DialogueState, Event, MockCompletionModel, SessionId, SessionOverrides, Speaker,
    TranscriptRecord, Turn,
};

use crate::{CliResult, Failure};

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// A transcript file, or a directory of daily transcript files.
    #[arg(long, value_name = "PATH")]
    transcript: PathBuf,
    /// Mock completion table (defaults to the configured one).
    #[arg(long, value_name = "PATH")]
    mock_table: Option<PathBuf>,
    /// Only replay this session.
    #[arg(long)]
    session: Option<SessionId>,
}

fn transcript_files(path: &Path) -> anyhow::Result<Vec<PathBuf>> {
    if path.is_file() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(path)
        .map_err(|e| anyhow!("cannot read {}: {e}", path.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "jsonl"))
        .collect();
    files.sort();
    Ok(files)
}

fn describe(turn: Option<&Turn>) -> String {
    match turn {
        None => "(missing)".to_owned(),
        Some(t) => match &t.segments {
            Some(segments) => serde_json::to_string(segments).unwrap_or_default(),
            None => format!("{:?} {:?}", t.text, t.gestures),
        },
    }
}

fn same_robot_turn(a: &Turn, b: &Turn) -> bool {
    a.text == b.text && a.gestures == b.gestures && a.segments == b.segments
}

pub async fn run(config: &AppConfig, args: &ReplayArgs) -> CliResult {
    let files = transcript_files(&args.transcript).map_err(Failure::config)?;
    let mut records: Vec<TranscriptRecord> = Vec::new();
    for file in &files {
        records.extend(read_file(file).map_err(Failure::config)?);
    }
    let mut sessions = group_by_session(records);
    if let Some(only) = args.session {
        sessions.retain(|(id, _)| *id == only);
    }
    if sessions.is_empty() {
        return Err(Failure::config(anyhow!(
            "no transcript records found in {}",
            args.transcript.display()
        )));
    }

    let mock = match &args.mock_table {
        Some(path) => MockCompletionModel::load(path),
        None => config.mock_model(),
    }
    .map_err(Failure::config)?;
    let engine = config
        .engine_with_model(Arc::new(mock))
        .map_err(Failure::config)?;

    let mut differing = 0usize;
    for (id, recorded) in &sessions {
        let mut session = engine
            .new_session(&SessionOverrides::default())
            .map_err(Failure::config)?;
        for record in recorded {
            let turn = &record.turn;
            let events = match turn.speaker {
                Speaker::User => vec![Event::utterance(turn.text.as_str())],
                Speaker::Robot if turn.is_greeting() => {
                    if session.state == DialogueState::Idle {
                        vec![Event::UserDetected]
                    } else {
                        vec![Event::UserLeft, Event::UserDetected]
                    }
                }
                Speaker::Robot => Vec::new(),
            };
            for event in events {
                engine.advance(&mut session, &event).await;
            }
        }

        let replayed = session.history();
        let mut diffs = Vec::new();
        for (i, expected) in recorded.iter().map(|r| &r.turn).enumerate() {
            if expected.speaker != Speaker::Robot {
                continue;
            }
            let actual = replayed.get(i);
            if !actual.is_some_and(|a| same_robot_turn(expected, a)) {
                diffs.push((expected.index, describe(Some(expected)), describe(actual)));
            }
        }
        let extra = replayed.len().saturating_sub(recorded.len());
        let robot_turns = recorded.iter().filter(|r| r.turn.speaker == Speaker::Robot).count();
        if diffs.is_empty() && extra == 0 {
            println!("session {id}: {robot_turns} robot turns identical");
            continue;
        }
        differing += 1;
        println!("session {id}: {} of {robot_turns} robot turns differ", diffs.len());
        for (index, expected, actual) in diffs {
            println!("  turn {index}");
            println!("  - {expected}");
            println!("  + {actual}");
        }
        if extra > 0 {
            println!("  replay produced {extra} extra turns");
        }
    }

    if differing == 0 {
        Ok(())
    } else {
        Err(Failure::runtime(anyhow!(
            "{differing} of {} sessions diverged",
            sessions.len()
        )))
    }
}
