//! Closed-domain intent classification.
//!
//! Utterances are normalized into lowercase alphanumeric tokens and scored
//! against registered keyword phrases. A phrase matches when its tokens occur
//! as a contiguous run in the utterance; an intent's confidence is the share
//! of utterance tokens covered by its distinct matched phrases.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, NluError};

/// Default inclusive routing threshold.
pub const DEFAULT_THRESHOLD: f64 = 0.1;

/// Lowercases, strips punctuation and symbols, and splits on whitespace.
///
/// Anything that is neither alphanumeric nor whitespace is removed, so
/// `"That's"` becomes `"thats"`.
pub fn normalize(text: &str) -> Vec<String> {
    let lowered = text.to_lowercase();
    let cleaned: String = lowered
        .chars()
        .filter(|c| c.is_alphanumeric() || c.is_whitespace())
        .collect();
    cleaned.split_whitespace().map(str::to_owned).collect()
}

/// A registered intent and its keyword phrases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntentDef {
    pub name: String,
    pub phrases: Vec<String>,
    #[serde(default)]
    pub priority: i32,
}

/// An intent definition after validation: phrases are stored as normalized
/// token sequences, deduplicated.
#[derive(Debug, Clone, PartialEq)]
struct CompiledIntent {
    name: String,
    phrases: Vec<Vec<String>>,
    priority: i32,
}

/// The set of closed-domain intents known to a deployment.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IntentRegistry {
    intents: Vec<CompiledIntent>,
}

impl IntentRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_defs(defs: impl IntoIterator<Item = IntentDef>) -> Result<Self, NluError> {
        let mut registry = Self::new();
        for def in defs {
            registry.register(def)?;
        }
        Ok(registry)
    }

    /// Loads a JSON list of `{name, phrases, priority}` objects.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let raw = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let defs: Vec<IntentDef> =
            serde_json::from_str(&raw).map_err(|source| ConfigError::Json {
                path: path.to_path_buf(),
                source,
            })?;
        Self::from_defs(defs).map_err(|source| ConfigError::Intents {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn register(&mut self, def: IntentDef) -> Result<(), NluError> {
        let name = def.name.trim();
        if name.is_empty() {
            return Err(NluError::EmptyName);
        }
        if self.intents.iter().any(|i| i.name == name) {
            return Err(NluError::DuplicateIntent(name.to_owned()));
        }
        let mut phrases: Vec<Vec<String>> = Vec::with_capacity(def.phrases.len());
        for phrase in &def.phrases {
            let tokens = normalize(phrase);
            if tokens.is_empty() {
                return Err(NluError::EmptyPhrase {
                    intent: name.to_owned(),
                    phrase: phrase.clone(),
                });
            }
            if !phrases.contains(&tokens) {
                phrases.push(tokens);
            }
        }
        self.intents.push(CompiledIntent {
            name: name.to_owned(),
            phrases,
            priority: def.priority,
        });
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.intents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intents.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.intents.iter().map(|i| i.name.as_str())
    }

    fn priority_of(&self, name: &str) -> i32 {
        self.intents
            .iter()
            .find(|i| i.name == name)
            .map_or(0, |i| i.priority)
    }

    /// Scores `text` against every intent. Intents without a matched phrase
    /// are omitted; the rest are sorted by confidence, then priority, then name.
    pub fn classify(&self, text: &str) -> Vec<IntentMatch> {
        let tokens = normalize(text);
        if tokens.is_empty() {
            return Vec::new();
        }
        let mut matches: Vec<(IntentMatch, i32)> = self
            .intents
            .iter()
            .filter_map(|intent| {
                let matched: Vec<&Vec<String>> = intent
                    .phrases
                    .iter()
                    .filter(|phrase| contains_run(&tokens, phrase))
                    .collect();
                if matched.is_empty() {
                    return None;
                }
                let covered: usize = matched.iter().map(|p| p.len()).sum();
                let confidence = (covered as f64 / tokens.len() as f64).min(1.0);
                Some((
                    IntentMatch {
                        intent: intent.name.clone(),
                        confidence,
                        matched_phrases: matched.iter().map(|p| p.join(" ")).collect(),
                    },
                    intent.priority,
                ))
            })
            .collect();
        matches.sort_by(|(a, pa), (b, pb)| rank(a, *pa, b, *pb));
        matches.into_iter().map(|(m, _)| m).collect()
    }

    /// Classifies and routes in one step.
    pub fn route_text(&self, text: &str, threshold: f64) -> (Vec<IntentMatch>, Routing) {
        let matches = self.classify(text);
        let routing = route(&matches, threshold);
        (matches, routing)
    }

    /// Checks that `matches` follows the registry's ordering rule.
    pub fn is_ranked(&self, matches: &[IntentMatch]) -> bool {
        matches.windows(2).all(|w| {
            rank(
                &w[0],
                self.priority_of(&w[0].intent),
                &w[1],
                self.priority_of(&w[1].intent),
            ) != Ordering::Greater
        })
    }
}

fn rank(a: &IntentMatch, pa: i32, b: &IntentMatch, pb: i32) -> Ordering {
    b.confidence
        .total_cmp(&a.confidence)
        .then_with(|| pb.cmp(&pa))
        .then_with(|| a.intent.cmp(&b.intent))
}

fn contains_run(haystack: &[String], needle: &[String]) -> bool {
    !needle.is_empty()
        && needle.len() <= haystack.len()
        && haystack.windows(needle.len()).any(|w| w == needle)
}

/// A scored classification result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntentMatch {
    pub intent: String,
    pub confidence: f64,
    pub matched_phrases: Vec<String>,
}

/// Where a turn is sent: grounded in the knowledge base or answered freely.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "domain", content = "intent", rename_all = "snake_case")]
pub enum Routing {
    ClosedDomain(String),
    OpenDomain,
}

impl Routing {
    pub fn intent(&self) -> Option<&str> {
        match self {
            Routing::ClosedDomain(intent) => Some(intent),
            Routing::OpenDomain => None,
        }
    }
}

/// Routes to the top match when its confidence reaches `threshold` (inclusive).
pub fn route(matches: &[IntentMatch], threshold: f64) -> Routing {
    match matches.first() {
        Some(top) if top.confidence >= threshold => Routing::ClosedDomain(top.intent.clone()),
        _ => Routing::OpenDomain,
    }
}

/// Ensures a set of names are all registered; used to validate knowledge keys.
pub fn unknown_names<'a>(
    registry: &IntentRegistry,
    names: impl IntoIterator<Item = &'a str>,
) -> Vec<&'a str> {
    let known: HashSet<&str> = registry.names().collect();
    names.into_iter().filter(|n| !known.contains(n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn def(name: &str, phrases: &[&str], priority: i32) -> IntentDef {
        IntentDef {
            name: name.into(),
            phrases: phrases.iter().map(|p| p.to_string()).collect(),
            priority,
        }
    }

    fn facility_registry() -> IntentRegistry {
        IntentRegistry::from_defs([def("facility_info", &["facility", "national robotarium"], 0)])
            .unwrap()
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(
            normalize("Tell me about this facility."),
            ["tell", "me", "about", "this", "facility"]
        );
        assert!(normalize("").is_empty());
        assert_eq!(
            normalize("That's great. Is there any ongoing healthcare researches here"),
            ["thats", "great", "is", "there", "any", "ongoing", "healthcare", "researches", "here"]
        );
    }

    #[test]
    fn normalize_strips_unicode_punctuation() {
        assert_eq!(normalize("«Bonjour»… ¿qué?"), ["bonjour", "qué"]);
        assert!(normalize("  \t\n ").is_empty());
    }

    #[test]
    fn classify_facility_example() {
        let out = facility_registry().classify("Tell me about this facility");
        assert_eq!(
            out,
            vec![IntentMatch {
                intent: "facility_info".into(),
                confidence: 0.2,
                matched_phrases: vec!["facility".into()],
            }]
        );
    }

    #[test]
    fn classify_joke_is_unmatched() {
        assert!(facility_registry().classify("Can you tell a joke?").is_empty());
        assert!(IntentRegistry::new().classify("Tell me about this facility").is_empty());
        assert!(facility_registry().classify("   ").is_empty());
    }

    #[test]
    fn repeated_phrase_counts_once() {
        let out = facility_registry().classify("facility facility facility facility");
        assert_eq!(out[0].confidence, 0.25);
    }

    #[test]
    fn confidence_is_capped() {
        let reg = IntentRegistry::from_defs([def("x", &["a b", "b", "a"], 0)]).unwrap();
        assert_eq!(reg.classify("a b")[0].confidence, 1.0);
    }

    #[test]
    fn ties_break_on_priority_then_name() {
        let reg = IntentRegistry::from_defs([
            def("zeta", &["robot"], 0),
            def("alpha", &["robot"], 0),
            def("beta", &["robot"], 5),
        ])
        .unwrap();
        let names: Vec<_> = reg
            .classify("robot")
            .into_iter()
            .map(|m| m.intent)
            .collect();
        assert_eq!(names, ["beta", "alpha", "zeta"]);
    }

    #[test]
    fn duplicate_and_empty_registrations_rejected() {
        let mut reg = facility_registry();
        assert_eq!(
            reg.register(def("facility_info", &["x"], 0)),
            Err(NluError::DuplicateIntent("facility_info".into()))
        );
        assert!(matches!(
            reg.register(def("other", &["?!"], 0)),
            Err(NluError::EmptyPhrase { .. })
        ));
        assert_eq!(reg.register(def(" ", &["x"], 0)), Err(NluError::EmptyName));
    }

    #[test]
    fn routing_examples() {
        let m = |c: f64| IntentMatch {
            intent: "x".into(),
            confidence: c,
            matched_phrases: vec!["x".into()],
        };
        assert_eq!(route(&[m(0.2)], 0.1), Routing::ClosedDomain("x".into()));
        assert_eq!(route(&[], 0.0), Routing::OpenDomain);
        assert_eq!(route(&[m(0.1)], 0.1), Routing::ClosedDomain("x".into()));
        assert_eq!(route(&[m(0.09)], 0.1), Routing::OpenDomain);
    }

    #[test]
    fn unknown_names_reports_missing() {
        let reg = facility_registry();
        assert_eq!(unknown_names(&reg, ["facility_info", "nope"]), ["nope"]);
    }
}
