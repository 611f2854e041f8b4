//! Deployment configuration: a TOML file, then environment overrides.
//!
//! Relative paths in a config file are resolved against the file's directory.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use serde::Deserialize;

use crate::dialogue::{Engine, SessionConfig, DEFAULT_FALLBACK, DEFAULT_GREETING};
use crate::error::ConfigError;
use crate::gesture::EmoticonMap;
use crate::knowledge::{KnowledgeBase, DEFAULT_MAX_CONTENT_CHARS};
use crate::llm::{CompletionModel, HttpCompletionClient, LlmConfig, MockCompletionModel};
use crate::nlu::{IntentRegistry, DEFAULT_THRESHOLD};
use crate::prompt::PromptSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LlmMode {
    #[default]
    Mock,
    Live,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AppConfig {
    pub port: u16,
    pub kb_path: Option<PathBuf>,
    pub intents_path: Option<PathBuf>,
    pub prompt_spec_path: Option<PathBuf>,
    pub emoticon_map_path: Option<PathBuf>,
    pub mock_table_path: Option<PathBuf>,
    pub transcript_dir: PathBuf,
    pub nlu_threshold: f64,
    pub max_content_chars: usize,
    pub max_sessions: usize,
    pub silence_timeout_secs: u64,
    pub session_idle_secs: u64,
    pub greeting: String,
    pub fallback: String,
    pub llm_mode: LlmMode,
    pub llm: LlmConfig,
}

impl Default for AppConfig {
    fn default() -> Self {
        Self {
            port: 8080,
            kb_path: None,
            intents_path: None,
            prompt_spec_path: None,
            emoticon_map_path: None,
            mock_table_path: None,
            transcript_dir: PathBuf::from("transcripts"),
            nlu_threshold: DEFAULT_THRESHOLD,
            max_content_chars: DEFAULT_MAX_CONTENT_CHARS,
            max_sessions: 64,
            silence_timeout_secs: 30,
            session_idle_secs: 15 * 60,
            greeting: DEFAULT_GREETING.into(),
            fallback: DEFAULT_FALLBACK.into(),
            llm_mode: LlmMode::Mock,
            llm: LlmConfig::default(),
        }
    }
}

impl AppConfig {
    /// Reads `path` if given, then applies process environment overrides.
    pub fn load(path: Option<&Path>) -> Result<Self, ConfigError> {
        let mut cfg = match path {
            Some(p) => Self::from_file(p)?,
            None => Self::default(),
        };
        cfg.apply_vars(|k| std::env::var(k).ok())?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let raw = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg: Self = toml::from_str(&raw).map_err(|source| ConfigError::Toml {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for p in [
            &mut self.kb_path,
            &mut self.intents_path,
            &mut self.prompt_spec_path,
            &mut self.emoticon_map_path,
            &mut self.mock_table_path,
        ]
        .into_iter()
        .flatten()
        {
            fix(p);
        }
        fix(&mut self.transcript_dir);
    }

    pub fn apply_vars(&mut self, var: impl Fn(&str) -> Option<String>) -> Result<(), ConfigError> {
        fn parse<T: std::str::FromStr>(key: &str, value: String) -> Result<T, ConfigError> {
            value
                .trim()
                .parse()
                .map_err(|_| ConfigError::InvalidValue {
                    key: key.into(),
                    value,
                })
        }
        if let Some(v) = var("PORT") {
            self.port = parse("PORT", v)?;
        }
        if let Some(v) = var("NLU_THRESHOLD") {
            let t: f64 = parse("NLU_THRESHOLD", v.clone())?;
            if !(0.0..=1.0).contains(&t) {
                return Err(ConfigError::InvalidValue {
                    key: "NLU_THRESHOLD".into(),
                    value: v,
                });
            }
            self.nlu_threshold = t;
        }
        for (key, slot) in [
            ("KB_PATH", &mut self.kb_path),
            ("INTENTS_PATH", &mut self.intents_path),
            ("PROMPT_SPEC_PATH", &mut self.prompt_spec_path),
            ("EMOTICON_MAP_PATH", &mut self.emoticon_map_path),
            ("MOCK_TABLE_PATH", &mut self.mock_table_path),
        ] {
            if let Some(v) = var(key) {
                *slot = Some(PathBuf::from(v));
            }
        }
        if let Some(v) = var("TRANSCRIPT_DIR") {
            self.transcript_dir = PathBuf::from(v);
        }
        self.llm.apply_vars(&var);
        Ok(())
    }

    pub fn silence_timeout(&self) -> Duration {
        Duration::from_secs(self.silence_timeout_secs)
    }

    pub fn session_idle(&self) -> Duration {
        Duration::from_secs(self.session_idle_secs)
    }

    pub fn registry(&self) -> Result<IntentRegistry, ConfigError> {
        match &self.intents_path {
            Some(p) => IntentRegistry::load(p),
            None => Ok(IntentRegistry::new()),
        }
    }

    pub fn knowledge(&self) -> Result<KnowledgeBase, ConfigError> {
        match &self.kb_path {
            Some(p) => Ok(KnowledgeBase::from_directory(p, self.max_content_chars)?),
            None => Ok(KnowledgeBase::new(self.max_content_chars)),
        }
    }

    pub fn mock_model(&self) -> Result<MockCompletionModel, ConfigError> {
        match &self.mock_table_path {
            Some(p) => MockCompletionModel::load(p),
            None => Ok(MockCompletionModel::default()),
        }
    }

    pub fn model(&self, mode: LlmMode) -> Result<Arc<dyn CompletionModel>, ConfigError> {
        Ok(match mode {
            LlmMode::Mock => Arc::new(self.mock_model()?),
            LlmMode::Live => Arc::new(HttpCompletionClient::new(self.llm.clone())?),
        })
    }

    pub fn session_defaults(&self) -> Result<SessionConfig, ConfigError> {
        let emoticons = match &self.emoticon_map_path {
            Some(p) => EmoticonMap::load(p)?,
            None => EmoticonMap::default(),
        };
        let prompt_spec = match &self.prompt_spec_path {
            Some(p) => PromptSpec::load(p)?,
            None => PromptSpec::default(),
        };
        prompt_spec.validate(&emoticons)?;
        Ok(SessionConfig {
            threshold: self.nlu_threshold,
            prompt_spec,
            emoticons,
            greeting: self.greeting.clone(),
            fallback: self.fallback.clone(),
        })
    }

    /// Builds an engine, using `mode` instead of the configured LLM mode when given.
    pub fn engine(&self, mode: Option<LlmMode>) -> Result<Engine, ConfigError> {
        let model = self.model(mode.unwrap_or(self.llm_mode))?;
        self.engine_with_model(model)
    }

    pub fn engine_with_model(&self, model: Arc<dyn CompletionModel>) -> Result<Engine, ConfigError> {
        let mut engine = Engine::new(
            self.registry()?,
            self.knowledge()?,
            model,
            self.session_defaults()?,
        )?;
        engine.silence_timeout = self.silence_timeout();
        Ok(engine)
    }
}
