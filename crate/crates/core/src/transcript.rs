//! Append-only JSONL transcript store.
//!
//! One file per UTC day (`transcript-YYYY-MM-DD.jsonl`). All writes go
//! through a single writer thread; callers get an acknowledgement once their
//! batch is on disk. Batches containing a robot turn are fsynced.

use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tokio::sync::{mpsc, oneshot};
use tracing::error;

use crate::dialogue::{SessionId, Turn};
use crate::error::TranscriptError;
use crate::prompt::Speaker;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptRecord {
    pub session_id: SessionId,
    #[serde(flatten)]
    pub turn: Turn,
}

impl TranscriptRecord {
    pub fn new(session_id: SessionId, turn: Turn) -> Self {
        Self { session_id, turn }
    }
}

pub fn day_file(dir: &Path, record: &TranscriptRecord) -> PathBuf {
    dir.join(format!(
        "transcript-{}.jsonl",
        record.turn.timestamp.format("%Y-%m-%d")
    ))
}

/// Reads every record in one JSONL file. A torn final line (no trailing
/// newline and not valid JSON) is ignored.
pub fn read_file(path: &Path) -> Result<Vec<TranscriptRecord>, TranscriptError> {
    let raw = std::fs::read_to_string(path).map_err(|source| TranscriptError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let complete = raw.ends_with('\n');
    let lines: Vec<&str> = raw.lines().collect();
    let mut out = Vec::with_capacity(lines.len());
    for (i, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str(line) {
            Ok(r) => out.push(r),
            Err(_) if !complete && i + 1 == lines.len() => break,
            Err(source) => {
                return Err(TranscriptError::Parse {
                    path: path.to_path_buf(),
                    line: i + 1,
                    source,
                })
            }
        }
    }
    Ok(out)
}

/// Groups records by session, each group in index order, sessions in order
/// of first appearance.
pub fn group_by_session(records: Vec<TranscriptRecord>) -> Vec<(SessionId, Vec<TranscriptRecord>)> {
    let mut groups: Vec<(SessionId, Vec<TranscriptRecord>)> = Vec::new();
    for r in records {
        match groups.iter_mut().find(|(id, _)| *id == r.session_id) {
            Some((_, g)) => g.push(r),
            None => groups.push((r.session_id, vec![r])),
        }
    }
    for (_, g) in &mut groups {
        g.sort_by_key(|r| r.turn.index);
    }
    groups
}

struct Batch {
    records: Vec<TranscriptRecord>,
    ack: oneshot::Sender<Result<(), String>>,
}

/// Handle to the transcript directory and its writer thread.
#[derive(Clone)]
pub struct TranscriptStore {
    dir: PathBuf,
    tx: mpsc::UnboundedSender<Batch>,
}

impl TranscriptStore {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, TranscriptError> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir).map_err(|source| TranscriptError::Io {
            path: dir.clone(),
            source,
        })?;
        let (tx, rx) = mpsc::unbounded_channel();
        let writer_dir = dir.clone();
        std::thread::Builder::new()
            .name("transcript-writer".into())
            .spawn(move || writer_loop(writer_dir, rx))
            .map_err(|source| TranscriptError::Io {
                path: dir.clone(),
                source,
            })?;
        Ok(Self { dir, tx })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Appends a batch and waits until it has been written.
    pub async fn append(&self, records: Vec<TranscriptRecord>) -> Result<(), TranscriptError> {
        if records.is_empty() {
            return Ok(());
        }
        let (ack, done) = oneshot::channel();
        self.tx
            .send(Batch { records, ack })
            .map_err(|_| TranscriptError::WriterClosed)?;
        match done.await {
            Ok(Ok(())) => Ok(()),
            Ok(Err(msg)) => Err(TranscriptError::Io {
                path: self.dir.clone(),
                source: std::io::Error::other(msg),
            }),
            Err(_) => Err(TranscriptError::WriterClosed),
        }
    }

    pub fn files(&self) -> Result<Vec<PathBuf>, TranscriptError> {
        let mut files: Vec<PathBuf> = std::fs::read_dir(&self.dir)
            .map_err(|source| TranscriptError::Io {
                path: self.dir.clone(),
                source,
            })?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|e| e == "jsonl"))
            .collect();
        files.sort();
        Ok(files)
    }

    /// All persisted records for `session`, in turn order.
    pub fn read_session(&self, session: SessionId) -> Result<Vec<TranscriptRecord>, TranscriptError> {
        let mut out = Vec::new();
        for file in self.files()? {
            out.extend(read_file(&file)?.into_iter().filter(|r| r.session_id == session));
        }
        out.sort_by_key(|r| r.turn.index);
        Ok(out)
    }
}

fn writer_loop(dir: PathBuf, mut rx: mpsc::UnboundedReceiver<Batch>) {
    let mut open: Option<(PathBuf, File)> = None;
    while let Some(batch) = rx.blocking_recv() {
        let result = write_batch(&dir, &mut open, &batch.records).map_err(|e| {
            error!(error = %e, "transcript write failed");
            e.to_string()
        });
        let _ = batch.ack.send(result);
    }
}

fn write_batch(
    dir: &Path,
    open: &mut Option<(PathBuf, File)>,
    records: &[TranscriptRecord],
) -> std::io::Result<()> {
    let mut needs_sync = false;
    for record in records {
        let path = day_file(dir, record);
        if open.as_ref().is_none_or(|(p, _)| *p != path) {
            if let Some((_, f)) = open.take() {
                f.sync_all()?;
            }
            let f = OpenOptions::new().create(true).append(true).open(&path)?;
            *open = Some((path, f));
        }
        let (_, file) = open.as_mut().expect("file opened above");
        let line = serde_json::to_string(record).map_err(std::io::Error::other)?;
        writeln!(file, "{line}")?;
        needs_sync |= record.turn.speaker == Speaker::Robot;
    }
    if let Some((_, file)) = open.as_mut() {
        file.flush()?;
        if needs_sync {
            file.sync_data()?;
        }
    }
    Ok(())
}
