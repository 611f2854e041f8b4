//! Test-only helpers: shipped fixtures and independent oracles.
#![allow(dead_code)]

use std::path::PathBuf;

use receptionist_core::AppConfig;

pub mod oracles;

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

/// The demo deployment config with transcripts redirected to `transcripts`.
pub fn demo_config(transcripts: &std::path::Path) -> AppConfig {
    let mut cfg = AppConfig::from_file(&fixtures_dir().join("receptionist.toml")).unwrap();
    cfg.transcript_dir = transcripts.to_path_buf();
    cfg
}

pub const SAMPLE_GREETING: &str = "Hello, I am the Receptionist here at the National Robotarium. \
Would you like to know about this facility?";

pub const SAMPLE_UTTERANCES: [&str; 4] = [
    "Yes, tell me about this facility.",
    "That's great. Is there any ongoing healthcare researches here",
    "That's nice. Can you tell a joke?",
    "Can you suggest me a movie about robots?",
];
