mod support;

use proptest::prelude::*;
use receptionist_core::nlu::{normalize, route, IntentDef, IntentRegistry, Routing};

use support::oracles::{brute_force_classify, OracleIntent};

const VOCAB: [&str; 6] = ["robot", "desk", "help", "lab", "tour", "a"];

fn word() -> impl Strategy<Value = String> {
    prop::sample::select(&VOCAB[..]).prop_map(str::to_owned)
}

fn phrase() -> impl Strategy<Value = String> {
    prop::collection::vec(word(), 1..=3).prop_map(|w| w.join(" "))
}

fn intents() -> impl Strategy<Value = Vec<OracleIntent>> {
    prop::collection::vec(
        (prop::collection::vec(phrase(), 1..=3), -1i32..=1),
        0..=4,
    )
    .prop_map(|defs| {
        defs.into_iter()
            .enumerate()
            .map(|(i, (phrases, priority))| OracleIntent {
                name: format!("intent_{}", (b'a' + i as u8) as char),
                phrases,
                priority,
            })
            .collect()
    })
}

fn utterance() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(word(), 0..=8)
}

fn registry(intents: &[OracleIntent]) -> IntentRegistry {
    IntentRegistry::from_defs(intents.iter().map(|i| IntentDef {
        name: i.name.clone(),
        phrases: i.phrases.clone(),
        priority: i.priority,
    }))
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn agrees_with_brute_force(intents in intents(), words in utterance()) {
        let got: Vec<_> = registry(&intents)
            .classify(&words.join(" "))
            .into_iter()
            .map(|m| (m.intent, m.confidence, m.matched_phrases))
            .collect();
        prop_assert_eq!(got, brute_force_classify(&words, &intents));
    }

    #[test]
    fn permutation_invariant(intents in intents(), words in utterance(), seed in any::<u64>()) {
        let text = words.join(" ");
        let mut shuffled = intents.clone();
        let n = shuffled.len();
        if n > 1 {
            shuffled.rotate_left((seed % n as u64) as usize);
            shuffled.swap(0, (seed / 7 % n as u64) as usize);
        }
        prop_assert_eq!(registry(&intents).classify(&text), registry(&shuffled).classify(&text));
    }

    #[test]
    fn bounds_and_ordering(intents in intents(), words in utterance()) {
        let reg = registry(&intents);
        let text = words.join(" ");
        let out = reg.classify(&text);
        prop_assert_eq!(&out, &reg.classify(&text));
        prop_assert!(reg.is_ranked(&out));
        for m in &out {
            prop_assert!(m.confidence > 0.0 && m.confidence <= 1.0);
            prop_assert!(!m.matched_phrases.is_empty());
        }
    }

    #[test]
    fn adding_a_phrase_never_lowers_confidence(
        intents in intents().prop_filter("need an intent", |i| !i.is_empty()),
        extra in phrase(),
        words in utterance(),
    ) {
        let text = words.join(" ");
        let before = registry(&intents).classify(&text);
        let mut grown = intents.clone();
        grown[0].phrases.push(extra);
        let after = registry(&grown).classify(&text);
        let conf = |out: &[receptionist_core::IntentMatch]| {
            out.iter().find(|m| m.intent == intents[0].name).map_or(0.0, |m| m.confidence)
        };
        prop_assert!(conf(&after) >= conf(&before));
    }

    #[test]
    fn normalize_is_idempotent(text in "\\PC{0,40}") {
        let once = normalize(&text);
        prop_assert_eq!(normalize(&once.join(" ")), once);
    }

    #[test]
    fn route_respects_threshold(intents in intents(), words in utterance(), threshold in 0.0f64..=1.0) {
        let out = registry(&intents).classify(&words.join(" "));
        match route(&out, threshold) {
            Routing::ClosedDomain(name) => {
                prop_assert_eq!(&name, &out[0].intent);
                prop_assert!(out[0].confidence >= threshold);
            }
            Routing::OpenDomain => prop_assert!(out.first().is_none_or(|m| m.confidence < threshold)),
        }
    }
}

#[test]
fn shipped_registry_routes_sample_utterances() {
    let reg = IntentRegistry::load(&support::fixtures_dir().join("intents.json")).unwrap();
    let expected = [
        Some("facility_info"),
        Some("healthcare_research"),
        None,
        None,
    ];
    for (text, want) in support::SAMPLE_UTTERANCES.iter().zip(expected) {
        let (_, routing) = reg.route_text(text, 0.1);
        assert_eq!(routing.intent(), want, "{text}");
    }
}
