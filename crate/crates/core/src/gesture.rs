//! Emoticon extraction from LLM output.
//!
//! Raw completions are scanned left to right. At every position the longest
//! mapped emoticon wins and becomes a gesture event; everything else is speech.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, GestureError};
use crate::knowledge::collapse_whitespace;

/// Facial gestures the embodiment can perform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GestureName {
    Smile,
    Nod,
    Wink,
    Sad,
    Neutral,
}

impl GestureName {
    pub const ALL: [GestureName; 5] = [
        GestureName::Smile,
        GestureName::Nod,
        GestureName::Wink,
        GestureName::Sad,
        GestureName::Neutral,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GestureName::Smile => "Smile",
            GestureName::Nod => "Nod",
            GestureName::Wink => "Wink",
            GestureName::Sad => "Sad",
            GestureName::Neutral => "Neutral",
        }
    }
}

impl fmt::Display for GestureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GestureName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|g| g.as_str() == s)
            .ok_or_else(|| format!("unknown gesture {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmoticonBinding {
    pub token: String,
    pub gesture: GestureName,
}

/// Ordered emoticon-to-gesture table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct EmoticonMap {
    bindings: Vec<EmoticonBinding>,
    /// Indices into `bindings`, longest token first.
    #[serde(skip)]
    by_length: Vec<usize>,
}

impl Default for EmoticonMap {
    fn default() -> Self {
        Self::new([
            (":)", GestureName::Smile),
            (";)", GestureName::Wink),
            (":(", GestureName::Sad),
            ("(nod)", GestureName::Nod),
        ])
        .expect("default emoticon map is valid")
    }
}

impl<'de> Deserialize<'de> for EmoticonMap {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let bindings = Vec::<EmoticonBinding>::deserialize(de)?;
        Self::from_bindings(bindings).map_err(serde::de::Error::custom)
    }
}

impl EmoticonMap {
    pub fn new<'a>(
        pairs: impl IntoIterator<Item = (&'a str, GestureName)>,
    ) -> Result<Self, GestureError> {
        Self::from_bindings(pairs.into_iter().map(|(token, gesture)| EmoticonBinding {
            token: token.to_owned(),
            gesture,
        }))
    }

    pub fn from_bindings(
        bindings: impl IntoIterator<Item = EmoticonBinding>,
    ) -> Result<Self, GestureError> {
        let mut out: Vec<EmoticonBinding> = Vec::new();
        for b in bindings {
            if b.token.is_empty() {
                return Err(GestureError::EmptyToken);
            }
            if b.token.chars().any(char::is_whitespace) {
                return Err(GestureError::WhitespaceInToken(b.token));
            }
            if out.iter().any(|o| o.token == b.token) {
                return Err(GestureError::DuplicateToken(b.token));
            }
            out.push(b);
        }
        let mut by_length: Vec<usize> = (0..out.len()).collect();
        by_length.sort_by_key(|&i| std::cmp::Reverse(out[i].token.len()));
        Ok(Self {
            bindings: out,
            by_length,
        })
    }

    /// Loads a JSON list of `{token, gesture}` objects.
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

    pub fn bindings(&self) -> &[EmoticonBinding] {
        &self.bindings
    }

    pub fn gesture_for(&self, token: &str) -> Option<GestureName> {
        self.bindings
            .iter()
            .find(|b| b.token == token)
            .map(|b| b.gesture)
    }

    /// Longest token that starts `text`, if any.
    pub fn match_prefix(&self, text: &str) -> Option<&EmoticonBinding> {
        self.by_length
            .iter()
            .map(|&i| &self.bindings[i])
            .find(|b| text.starts_with(b.token.as_str()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Segment {
    Speech { text: String },
    Gesture { name: GestureName },
}

impl Segment {
    pub fn speech(text: impl Into<String>) -> Self {
        Segment::Speech { text: text.into() }
    }

    pub fn gesture(name: GestureName) -> Self {
        Segment::Gesture { name }
    }
}

/// Speech interleaved with gesture events, in the order they should be played.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AnnotatedResponse {
    pub segments: Vec<Segment>,
}

impl AnnotatedResponse {
    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn gestures(&self) -> Vec<GestureName> {
        self.segments
            .iter()
            .filter_map(|s| match s {
                Segment::Gesture { name } => Some(*name),
                Segment::Speech { .. } => None,
            })
            .collect()
    }

    /// Speech segments joined with single spaces.
    pub fn speech_text(&self) -> String {
        self.segments
            .iter()
            .filter_map(|s| match s {
                Segment::Speech { text } => Some(text.as_str()),
                Segment::Gesture { .. } => None,
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

pub fn parse(raw: &str, map: &EmoticonMap) -> AnnotatedResponse {
    let mut segments = Vec::new();
    let mut speech = String::new();
    let mut rest = raw;

    while let Some(c) = rest.chars().next() {
        if let Some(binding) = map.match_prefix(rest) {
            flush_speech(&mut speech, &mut segments);
            segments.push(Segment::gesture(binding.gesture));
            rest = &rest[binding.token.len()..];
        } else {
            speech.push(c);
            rest = &rest[c.len_utf8()..];
        }
    }
    flush_speech(&mut speech, &mut segments);
    AnnotatedResponse { segments }
}

fn flush_speech(buf: &mut String, segments: &mut Vec<Segment>) {
    let text = collapse_whitespace(buf);
    buf.clear();
    if text.is_empty() {
        return;
    }
    if let Some(Segment::Speech { text: prev }) = segments.last_mut() {
        prev.push(' ');
        prev.push_str(&text);
    } else {
        segments.push(Segment::speech(text));
    }
}

/// The speech of `raw` with every mapped emoticon removed.
pub fn strip(raw: &str, map: &EmoticonMap) -> String {
    parse(raw, map).speech_text()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn joke_example() {
        let out = parse(
            ":) Sure, Why did the robot go to the bar? ;) To get a screwdriver!",
            &EmoticonMap::default(),
        );
        assert_eq!(
            out.segments,
            vec![
                Segment::gesture(GestureName::Smile),
                Segment::speech("Sure, Why did the robot go to the bar?"),
                Segment::gesture(GestureName::Wink),
                Segment::speech("To get a screwdriver!"),
            ]
        );
    }

    #[test]
    fn trivial_inputs() {
        let map = EmoticonMap::default();
        assert_eq!(parse("Hello there", &map).segments, vec![Segment::speech("Hello there")]);
        assert_eq!(parse(":)", &map).segments, vec![Segment::gesture(GestureName::Smile)]);
        assert!(parse("", &map).is_empty());
        assert!(parse(" \n ", &map).is_empty());
    }

    #[test]
    fn strip_examples() {
        let map = EmoticonMap::default();
        assert_eq!(strip(":) Sure!", &map), "Sure!");
        assert_eq!(strip("no tokens here", &map), "no tokens here");
        assert_eq!(strip("A :( B ;) C", &map), "A B C");
    }

    #[test]
    fn longest_token_wins() {
        let map = EmoticonMap::new([(":)", GestureName::Smile), (":))", GestureName::Wink)]).unwrap();
        assert_eq!(
            parse("ha :)) ok :)", &map).segments,
            vec![
                Segment::speech("ha"),
                Segment::gesture(GestureName::Wink),
                Segment::speech("ok"),
                Segment::gesture(GestureName::Smile),
            ]
        );
    }

    #[test]
    fn unknown_emoticons_pass_through() {
        let map = EmoticonMap::default();
        assert_eq!(strip("well :D that <3 is :-) fun", &map), "well :D that <3 is :-) fun");
    }

    #[test]
    fn adjacent_tokens_and_multibyte_text() {
        let map = EmoticonMap::default();
        let out = parse("café:):(naïve(nod)", &map);
        assert_eq!(
            out.segments,
            vec![
                Segment::speech("café"),
                Segment::gesture(GestureName::Smile),
                Segment::gesture(GestureName::Sad),
                Segment::speech("naïve"),
                Segment::gesture(GestureName::Nod),
            ]
        );
        assert_eq!(out.gestures(), [GestureName::Smile, GestureName::Sad, GestureName::Nod]);
    }

    #[test]
    fn invalid_maps_rejected() {
        assert_eq!(EmoticonMap::new([("", GestureName::Smile)]), Err(GestureError::EmptyToken));
        assert!(matches!(
            EmoticonMap::new([(": )", GestureName::Smile)]),
            Err(GestureError::WhitespaceInToken(_))
        ));
        assert!(matches!(
            EmoticonMap::new([(":)", GestureName::Smile), (":)", GestureName::Nod)]),
            Err(GestureError::DuplicateToken(_))
        ));
    }

    #[test]
    fn map_json_format() {
        let map: EmoticonMap =
            serde_json::from_str(r#"[{"token": ":)", "gesture": "Smile"}, {"token": "^^", "gesture": "Nod"}]"#)
                .unwrap();
        assert_eq!(map.gesture_for("^^"), Some(GestureName::Nod));
        assert!(serde_json::from_str::<EmoticonMap>(r#"[{"token": "a b", "gesture": "Smile"}]"#).is_err());
        let back: EmoticonMap = serde_json::from_str(&serde_json::to_string(&map).unwrap()).unwrap();
        assert_eq!(back, map);
    }

    #[test]
    fn segment_wire_format() {
        let resp = AnnotatedResponse {
            segments: vec![Segment::speech("Hi"), Segment::gesture(GestureName::Smile)],
        };
        assert_eq!(
            serde_json::to_string(&resp).unwrap(),
            r#"[{"type":"speech","text":"Hi"},{"type":"gesture","name":"Smile"}]"#
        );
        assert_eq!("Wink".parse::<GestureName>(), Ok(GestureName::Wink));
        assert!("wink".parse::<GestureName>().is_err());
    }
}
