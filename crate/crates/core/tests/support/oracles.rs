//! Brute-force reference implementations. These deliberately avoid the
//! library's matching code paths.

use std::collections::HashSet;

/// Every contiguous token range of `tokens`, joined with spaces.
pub fn all_subranges(tokens: &[String]) -> HashSet<String> {
    let mut out = HashSet::new();
    for start in 0..tokens.len() {
        for end in start + 1..=tokens.len() {
            out.insert(tokens[start..end].join(" "));
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct OracleIntent {
    pub name: String,
    /// Already-normalized phrases (lowercase words separated by one space).
    pub phrases: Vec<String>,
    pub priority: i32,
}

/// `(intent, confidence, matched phrases)` sorted by confidence desc,
/// priority desc, name asc.
pub fn brute_force_classify(
    utterance: &[String],
    intents: &[OracleIntent],
) -> Vec<(String, f64, Vec<String>)> {
    if utterance.is_empty() {
        return Vec::new();
    }
    let ranges = all_subranges(utterance);
    let mut out: Vec<(String, f64, Vec<String>, i32)> = Vec::new();
    for intent in intents {
        let mut seen = HashSet::new();
        let mut matched = Vec::new();
        let mut covered = 0usize;
        for phrase in &intent.phrases {
            if !seen.insert(phrase.clone()) {
                continue;
            }
            if ranges.contains(phrase) {
                covered += phrase.split(' ').count();
                matched.push(phrase.clone());
            }
        }
        if matched.is_empty() {
            continue;
        }
        let confidence = (covered as f64 / utterance.len() as f64).min(1.0);
        out.push((intent.name.clone(), confidence, matched, intent.priority));
    }
    out.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap()
            .then(b.3.cmp(&a.3))
            .then(a.0.cmp(&b.0))
    });
    out.into_iter().map(|(n, c, m, _)| (n, c, m)).collect()
}

/// Longest-match emoticon scan over raw chars. Returns the token sequence
/// found and the text left after removing them.
pub fn emoticon_scan(raw: &str, tokens: &[&str]) -> (Vec<String>, String) {
    let chars: Vec<char> = raw.chars().collect();
    let token_chars: Vec<Vec<char>> = tokens.iter().map(|t| t.chars().collect()).collect();
    let mut found = Vec::new();
    let mut rest = String::new();
    let mut i = 0;
    while i < chars.len() {
        let mut best: Option<usize> = None;
        for (k, tc) in token_chars.iter().enumerate() {
            let fits = i + tc.len() <= chars.len() && chars[i..i + tc.len()] == tc[..];
            if fits && best.is_none_or(|b| token_chars[b].len() < tc.len()) {
                best = Some(k);
            }
        }
        match best {
            Some(k) => {
                found.push(tokens[k].to_owned());
                i += token_chars[k].len();
            }
            None => {
                rest.push(chars[i]);
                i += 1;
            }
        }
    }
    (found, rest)
}

pub fn without_whitespace(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}
