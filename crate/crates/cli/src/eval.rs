use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{anyhow, Context};
use clap::Args;
use receptionist_core::AppConfig;
use serde::{Deserialize, Serialize};

use crate::{CliResult, Failure};

/// Label used for utterances that should not reach any intent.
pub const OPEN: &str = "open";

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// JSON array of `{"text": ..., "expected_intent": ...}`.
    #[arg(long, value_name = "PATH")]
    cases: PathBuf,
    /// Print the report as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Deserialize)]
struct EvalCase {
    text: String,
    expected_intent: String,
}

#[derive(Debug, Default, Serialize)]
struct IntentScore {
    true_positives: usize,
    false_positives: usize,
    false_negatives: usize,
    precision: Option<f64>,
    recall: Option<f64>,
}

#[derive(Debug, Serialize)]
struct Report {
    cases: usize,
    correct: usize,
    routing_accuracy: f64,
    intents: BTreeMap<String, IntentScore>,
    misses: Vec<Miss>,
}

#[derive(Debug, Serialize)]
struct Miss {
    text: String,
    expected: String,
    predicted: String,
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

fn load_cases(path: &PathBuf) -> anyhow::Result<Vec<EvalCase>> {
    let raw = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let cases: Vec<EvalCase> =
        serde_json::from_str(&raw).with_context(|| format!("invalid cases file {}", path.display()))?;
    if cases.is_empty() {
        return Err(anyhow!("{} contains no cases", path.display()));
    }
    if let Some(i) = cases.iter().position(|c| c.text.trim().is_empty()) {
        return Err(anyhow!("case {i} in {} has empty text", path.display()));
    }
    Ok(cases)
}

pub fn run(config: &AppConfig, args: &EvalArgs) -> CliResult {
    let cases = load_cases(&args.cases).map_err(Failure::config)?;
    let registry = config.registry().map_err(Failure::config)?;

    let mut intents: BTreeMap<String, IntentScore> = BTreeMap::new();
    let mut misses = Vec::new();
    for case in &cases {
        let (_, routing) = registry.route_text(&case.text, config.nlu_threshold);
        let predicted = routing.intent().unwrap_or(OPEN).to_owned();
        let expected = case.expected_intent.trim().to_owned();
        if predicted == expected {
            intents.entry(expected).or_default().true_positives += 1;
        } else {
            intents.entry(predicted.clone()).or_default().false_positives += 1;
            intents.entry(expected.clone()).or_default().false_negatives += 1;
            misses.push(Miss {
                text: case.text.clone(),
                expected,
                predicted,
            });
        }
    }
    for score in intents.values_mut() {
        score.precision = ratio(score.true_positives, score.true_positives + score.false_positives);
        score.recall = ratio(score.true_positives, score.true_positives + score.false_negatives);
    }
    let correct = cases.len() - misses.len();
    let report = Report {
        cases: cases.len(),
        correct,
        routing_accuracy: correct as f64 / cases.len() as f64,
        intents,
        misses,
    };

    if args.json {
        println!("{}", serde_json::to_string_pretty(&report).map_err(Failure::runtime)?);
        return Ok(());
    }
    let fmt = |v: Option<f64>| v.map_or_else(|| "n/a".to_owned(), |v| format!("{v:.3}"));
    println!("{:<24} {:>9} {:>9}", "intent", "precision", "recall");
    for (name, score) in &report.intents {
        println!("{name:<24} {:>9} {:>9}", fmt(score.precision), fmt(score.recall));
    }
    for miss in &report.misses {
        println!("miss: {:?} expected {} got {}", miss.text, miss.expected, miss.predicted);
    }
    println!(
        "routing accuracy: {:.3} ({}/{})",
        report.routing_accuracy, report.correct, report.cases
    );
    Ok(())
}
