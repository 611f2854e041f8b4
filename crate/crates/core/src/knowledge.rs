//! Intent-keyed grounding text.
//!
//! One entry per intent. Documents are whitespace-collapsed and cut back to
//! the last sentence end that fits in `max_content_chars`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::KnowledgeError;

pub const DEFAULT_MAX_CONTENT_CHARS: usize = 4000;
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnowledgeEntry {
    pub intent_key: String,
    pub content: String,
    pub source: String,
    pub ingested_at: DateTime<Utc>,
}

#[derive(Debug, Clone)]
pub struct KnowledgeBase {
    entries: BTreeMap<String, KnowledgeEntry>,
    max_content_chars: usize,
}

impl Default for KnowledgeBase {
    fn default() -> Self {
        Self::new(DEFAULT_MAX_CONTENT_CHARS)
    }
}

impl KnowledgeBase {
    pub fn new(max_content_chars: usize) -> Self {
        Self {
            entries: BTreeMap::new(),
            max_content_chars: max_content_chars.max(1),
        }
    }

    pub fn max_content_chars(&self) -> usize {
        self.max_content_chars
    }

    pub fn ingest(
        &mut self,
        intent_key: &str,
        document: &str,
        source: &str,
        overwrite: bool,
    ) -> Result<&KnowledgeEntry, KnowledgeError> {
        let key = intent_key.trim();
        if key.is_empty() {
            return Err(KnowledgeError::EmptyKey);
        }
        let collapsed = collapse_whitespace(document);
        if collapsed.is_empty() {
            return Err(KnowledgeError::EmptyDocument(key.to_owned()));
        }
        if !overwrite && self.entries.contains_key(key) {
            return Err(KnowledgeError::DuplicateKey(key.to_owned()));
        }
        let entry = KnowledgeEntry {
            intent_key: key.to_owned(),
            content: truncate_at_sentence(&collapsed, self.max_content_chars),
            source: source.to_owned(),
            ingested_at: Utc::now(),
        };
        self.entries.insert(key.to_owned(), entry);
        Ok(&self.entries[key])
    }

    /// `None` means the caller should fall back to open-domain dialogue.
    pub fn retrieve(&self, intent_key: &str) -> Option<&KnowledgeEntry> {
        self.entries.get(intent_key)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn entries(&self) -> impl Iterator<Item = &KnowledgeEntry> {
        self.entries.values()
    }

    /// Ingests every `<intent_key>.txt` file in `dir`, in file-name order.
    ///
    /// If `manifest.json` is present it maps keys to source strings;
    /// otherwise the source is the file path.
    pub fn load_directory(&mut self, dir: &Path) -> Result<usize, KnowledgeError> {
        let manifest = read_manifest(dir)?;
        let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
            .map_err(|source| KnowledgeError::Io {
                path: dir.to_path_buf(),
                source,
            })?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file() && p.extension().is_some_and(|ext| ext == "txt"))
            .collect();
        files.sort();

        let mut count = 0;
        for path in files {
            let Some(key) = path.file_stem().and_then(|s| s.to_str()) else {
                continue;
            };
            let document = std::fs::read_to_string(&path).map_err(|source| KnowledgeError::Io {
                path: path.clone(),
                source,
            })?;
            let source = manifest
                .get(key)
                .cloned()
                .unwrap_or_else(|| format!("file:{}", path.display()));
            self.ingest(key, &document, &source, false)
                .map_err(|e| KnowledgeError::File {
                    path: path.clone(),
                    source: Box::new(e),
                })?;
            count += 1;
        }
        Ok(count)
    }

    pub fn from_directory(dir: &Path, max_content_chars: usize) -> Result<Self, KnowledgeError> {
        let mut kb = Self::new(max_content_chars);
        kb.load_directory(dir)?;
        Ok(kb)
    }
}

/// Writes an entry as `<dir>/<key>.txt` and records its source in the manifest.
pub fn write_entry(dir: &Path, entry: &KnowledgeEntry) -> Result<PathBuf, KnowledgeError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| KnowledgeError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let file = dir.join(format!("{}.txt", entry.intent_key));
    std::fs::write(&file, format!("{}\n", entry.content)).map_err(io(&file))?;

    let mut manifest = read_manifest(dir)?;
    manifest.insert(entry.intent_key.clone(), entry.source.clone());
    let manifest_path = dir.join(MANIFEST_FILE);
    let body = serde_json::to_string_pretty(&manifest).expect("string map serializes");
    std::fs::write(&manifest_path, body + "\n").map_err(io(&manifest_path))?;
    Ok(file)
}

fn read_manifest(dir: &Path) -> Result<BTreeMap<String, String>, KnowledgeError> {
    let path = dir.join(MANIFEST_FILE);
    if !path.exists() {
        return Ok(BTreeMap::new());
    }
    let raw = std::fs::read_to_string(&path).map_err(|source| KnowledgeError::Io {
        path: path.clone(),
        source,
    })?;
    serde_json::from_str(&raw).map_err(|source| KnowledgeError::Manifest { path, source })
}

pub(crate) fn collapse_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Cuts `text` to at most `max_chars` characters, preferring the end of the
/// last complete sentence. Falls back to a hard cut when no sentence ends
/// inside the budget.
fn truncate_at_sentence(text: &str, max_chars: usize) -> String {
    let chars: Vec<char> = text.chars().collect();
    if chars.len() <= max_chars {
        return text.to_owned();
    }
    let boundary = (0..max_chars).rev().find(|&i| {
        matches!(chars[i], '.' | '!' | '?') && chars.get(i + 1).is_none_or(|c| c.is_whitespace())
    });
    let end = boundary.map_or(max_chars, |i| i + 1);
    chars[..end].iter().collect::<String>().trim_end().to_owned()
}
