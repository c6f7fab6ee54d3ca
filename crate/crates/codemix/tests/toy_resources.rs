mod common;

use std::collections::BTreeMap;
use std::fs;

use codemix::jsonl::load_jsonl;
use codemix_core::features::{assemble_features, FeatureSchema, SoftLabels, StubScorer};
use codemix_core::langdetect::score_word;
use codemix_core::tokenize::Tokenizer;
use common::*;

/// Naive re-derivation of a word's smoothed log-likelihood straight from
/// the JSON count tables.
fn oracle_log_likelihood(lang: &str, word: &str) -> f64 {
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(toy_dir().join(format!("{lang}.langmodel.json"))).unwrap())
            .unwrap();
    let lo = json["n_range"][0].as_u64().unwrap() as usize;
    let tables = json["counts"].as_array().unwrap();
    let chars: Vec<char> = format!(" {word} ").chars().collect();
    let mut total = 0.0;
    for (k, table) in tables.iter().enumerate() {
        let n = lo + k;
        let table = table.as_object().unwrap();
        let big_n: u64 = table.values().map(|v| v.as_u64().unwrap()).sum();
        let denom = (big_n + table.len() as u64 + 1) as f64;
        for w in chars.windows(n) {
            let gram: String = w.iter().collect();
            let c = table.get(&gram).map_or(0, |v| v.as_u64().unwrap() + 1);
            total += if c == 0 { (1.0 / denom).ln() } else { (c as f64 / denom).ln() };
        }
    }
    total
}

#[test]
fn kiitos_scores_as_finnish() {
    let res = en_fi();
    let s = score_word(res.detector.models(), "kiitos").unwrap();
    let langs: Vec<&str> = res.detector.models().iter().map(|m| m.language()).collect();
    assert_eq!(langs[s.best], "fi");
    for (i, lang) in langs.iter().enumerate() {
        let expected = oracle_log_likelihood(lang, "kiitos");
        assert!((s.log_likelihoods[i] - expected).abs() < 1e-9, "{lang}");
    }
}

#[test]
fn english_words_score_as_english() {
    let res = en_fi();
    for w in ["because", "question", "tomorrow"] {
        let s = score_word(res.detector.models(), w).unwrap();
        assert_eq!(res.detector.models()[s.best].language(), "en", "{w}");
    }
}

#[test]
fn finnish_table_splits_finnish_compound_less() {
    let res = en_fi();
    let fi = res.local.encode("terveyskeskus").len();
    let en = res.english.encode("terveyskeskus").len();
    assert!(fi < en, "fi {fi} vs en {en}");
}

#[test]
fn every_table_meets_the_merge_floor() {
    for t in [&en_fi().english, &en_fi().local, &en_fi().multilingual, &en_es().local] {
        assert!(t.table().merges().len() >= 20);
    }
}

#[test]
fn table1_features() {
    let res = en_fi();
    let d = load_jsonl(fixture("table1.jsonl")).unwrap();
    let schema = FeatureSchema::v1();
    let stub = StubScorer::new(0.5).unwrap();
    let present = schema.index_of("lang.local_present").unwrap();
    let english = schema.index_of("lang.english_present").unwrap();
    let vectors: BTreeMap<&str, Vec<f64>> = d
        .messages()
        .iter()
        .map(|m| (m.id.as_str(), assemble_features(m, &res, &stub).unwrap().values))
        .collect();
    assert_eq!(vectors["M2"][present], 1.0);
    assert_eq!(vectors["M2"][english], 1.0);
    assert_eq!(vectors["M3"][present], 1.0);
    let ws = schema.index_of("whitespace.fertility").unwrap();
    assert!(vectors.values().all(|v| v[ws] == 1.0));
}

#[test]
fn soft_labels_change_only_their_slot() {
    let res = en_fi();
    let d = synthetic("fi", 100, 0.3, 9);
    let rows: BTreeMap<String, f64> = d
        .messages()
        .iter()
        .enumerate()
        .map(|(i, m)| (m.id.clone(), i as f64 / 100.0))
        .collect();
    let file = SoftLabels::new(rows).unwrap();
    let stub = StubScorer::new(0.5).unwrap();
    let slot = FeatureSchema::v1().soft_label_index();
    for (i, m) in d.messages().iter().enumerate() {
        let a = assemble_features(m, &res, &stub).unwrap().values;
        let b = assemble_features(m, &res, &file).unwrap().values;
        for j in 0..a.len() {
            if j == slot {
                assert_eq!(b[j], i as f64 / 100.0);
            } else {
                assert_eq!(a[j], b[j]);
            }
        }
    }
}
