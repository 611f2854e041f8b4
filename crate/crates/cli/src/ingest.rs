use std::path::PathBuf;

use anyhow::anyhow;
use clap::{ArgGroup, Args};
use receptionist_core::knowledge::write_entry;
use receptionist_core::{AppConfig, KnowledgeBase};

use crate::{CliResult, Failure};

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("input").required(true).args(["dir", "file"])))]
pub struct IngestArgs {
    /// Directory of `<intent>.txt` documents (with optional manifest.json).
    #[arg(long, value_name = "PATH")]
    dir: Option<PathBuf>,
    /// A single document.
    #[arg(long, value_name = "PATH", requires = "intent")]
    file: Option<PathBuf>,
    /// Intent key for `--file`.
    #[arg(long, requires = "file")]
    intent: Option<String>,
    /// Source recorded for `--file` (defaults to the file path).
    #[arg(long, requires = "file")]
    source: Option<String>,
    /// Replace entries that already exist.
    #[arg(long)]
    overwrite: bool,
    /// Knowledge base directory to write to (defaults to the configured one).
    #[arg(long, value_name = "PATH")]
    kb: Option<PathBuf>,
}

pub fn run(config: &AppConfig, args: &IngestArgs) -> CliResult {
    let target = args
        .kb
        .clone()
        .or_else(|| config.kb_path.clone())
        .ok_or_else(|| Failure::config(anyhow!("no knowledge base directory: pass --kb or set kb_path")))?;
    let mut kb = if target.is_dir() {
        KnowledgeBase::from_directory(&target, config.max_content_chars).map_err(Failure::config)?
    } else {
        KnowledgeBase::new(config.max_content_chars)
    };

    let mut incoming = KnowledgeBase::new(config.max_content_chars);
    if let Some(dir) = &args.dir {
        incoming.load_directory(dir).map_err(Failure::runtime)?;
    } else if let (Some(file), Some(intent)) = (&args.file, &args.intent) {
        let document = std::fs::read_to_string(file)
            .map_err(|e| Failure::runtime(anyhow!("cannot read {}: {e}", file.display())))?;
        let source = args
            .source
            .clone()
            .unwrap_or_else(|| format!("file:{}", file.display()));
        incoming
            .ingest(intent, &document, &source, false)
            .map_err(|e| Failure::runtime(anyhow!("{}: {e}", file.display())))?;
    }

    // Check every key before writing anything.
    if !args.overwrite {
        if let Some(dup) = incoming.keys().find(|k| kb.retrieve(k).is_some()) {
            return Err(Failure::runtime(anyhow!(
                "knowledge entry '{dup}' already exists in {} (use --overwrite to replace it)",
                target.display()
            )));
        }
    }
    for entry in incoming.entries() {
        let stored = kb
            .ingest(&entry.intent_key, &entry.content, &entry.source, args.overwrite)
            .map_err(Failure::runtime)?;
        write_entry(&target, stored).map_err(Failure::runtime)?;
        println!("{}: {} chars", stored.intent_key, stored.content.chars().count());
    }
    println!("ingested {} entries into {}", incoming.len(), target.display());
    Ok(())
}
