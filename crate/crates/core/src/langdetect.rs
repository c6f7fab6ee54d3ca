//! Character n-gram language models and a per-word mixed-language detector.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::tokenize::whitespace_tokenize;

pub const DEFAULT_N_RANGE: (usize, usize) = (1, 5);

/// Words with fewer letters than this are left unassigned.
pub const MIN_WORD_LEN: usize = 3;

/// Letters of a word, lowercased. Digits and punctuation are dropped.
pub fn clean_word(word: &str) -> String {
    word.chars()
        .filter(|c| c.is_alphabetic())
        .flat_map(char::to_lowercase)
        .collect()
}

/// Character n-grams of a cleaned word padded with one space on each side.
fn ngrams(word: &str, n: usize) -> impl Iterator<Item = String> + '_ {
    let padded: Vec<char> = core::iter::once(' ')
        .chain(word.chars())
        .chain(core::iter::once(' '))
        .collect();
    let count = padded.len().saturating_sub(n - 1);
    (0..count)
        .map(move |i| padded[i..i + n].iter().collect::<String>())
        .collect::<Vec<_>>()
        .into_iter()
}

/// Add-one smoothed character n-gram frequencies for one language.
///
/// For each order with `N` observed n-grams over `V` distinct types, a seen
/// n-gram gets `(c + 1) / (N + V + 1)` and anything unseen gets the floor
/// `1 / (N + V + 1)`. The extra slot is the unseen bucket, so every order's
/// distribution (types plus bucket) sums to one.
#[derive(Debug, Clone, PartialEq)]
pub struct NgramModel {
    language: String,
    n_range: (usize, usize),
    counts: Vec<BTreeMap<String, u64>>,
    logprob: Vec<BTreeMap<String, f64>>,
    floor: Vec<f64>,
    alphabet: BTreeSet<char>,
}

impl NgramModel {
    /// Rebuilds a model from raw counts, one map per order from low to high.
    pub fn from_counts(
        language: impl Into<String>,
        n_range: (usize, usize),
        counts: Vec<BTreeMap<String, u64>>,
    ) -> Result<Self> {
        let language = language.into();
        let (lo, hi) = n_range;
        if lo == 0 || lo > hi {
            return Err(Error::InvalidArgument(alloc::format!(
                "n-gram range ({lo}, {hi}) is invalid"
            )));
        }
        if counts.len() != hi - lo + 1 {
            return Err(Error::InvalidArgument(alloc::format!(
                "expected {} count tables, got {}",
                hi - lo + 1,
                counts.len()
            )));
        }
        if counts.iter().all(BTreeMap::is_empty) {
            return Err(Error::EmptyCorpus(language));
        }
        let mut logprob = Vec::with_capacity(counts.len());
        let mut floor = Vec::with_capacity(counts.len());
        for table in &counts {
            let total: u64 = table.values().sum();
            let denom = (total + table.len() as u64 + 1) as f64;
            logprob.push(
                table
                    .iter()
                    .map(|(g, &c)| (g.clone(), math::ln((c + 1) as f64 / denom)))
                    .collect(),
            );
            floor.push(math::ln(1.0 / denom));
        }
        let alphabet = counts[0]
            .keys()
            .flat_map(|g| g.chars())
            .filter(|&c| c != ' ')
            .collect();
        Ok(NgramModel {
            language,
            n_range,
            counts,
            logprob,
            floor,
            alphabet,
        })
    }

    pub fn language(&self) -> &str {
        &self.language
    }

    pub fn n_range(&self) -> (usize, usize) {
        self.n_range
    }

    pub fn counts(&self) -> &[BTreeMap<String, u64>] {
        &self.counts
    }

    pub fn alphabet(&self) -> &BTreeSet<char> {
        &self.alphabet
    }

    /// Smoothed probability of an n-gram of order `n`.
    pub fn probability(&self, gram: &str) -> f64 {
        math::exp(self.log_probability(gram))
    }

    pub fn log_probability(&self, gram: &str) -> f64 {
        let n = gram.chars().count();
        let (lo, hi) = self.n_range;
        if n < lo || n > hi {
            return f64::NEG_INFINITY;
        }
        let order = n - lo;
        self.logprob[order]
            .get(gram)
            .copied()
            .unwrap_or(self.floor[order])
    }

    /// Probability mass assigned to the unseen bucket of order `n`.
    pub fn unseen_mass(&self, n: usize) -> f64 {
        math::exp(self.floor[n - self.n_range.0])
    }

    /// Sum of n-gram log-probabilities of an already cleaned word.
    fn word_log_likelihood(&self, word: &str) -> f64 {
        let (lo, hi) = self.n_range;
        (lo..=hi)
            .map(|n| {
                let order = n - lo;
                ngrams(word, n)
                    .map(|g| self.logprob[order].get(&g).copied().unwrap_or(self.floor[order]))
                    .sum::<f64>()
            })
            .sum()
    }
}

/// Trains an n-gram model from a list of texts.
pub fn train_ngram_model(
    corpus: &[&str],
    language: &str,
    n_range: (usize, usize),
) -> Result<NgramModel> {
    let (lo, hi) = n_range;
    if lo == 0 || lo > hi {
        return Err(Error::InvalidArgument(alloc::format!(
            "n-gram range ({lo}, {hi}) is invalid"
        )));
    }
    let mut counts: Vec<BTreeMap<String, u64>> = (lo..=hi).map(|_| BTreeMap::new()).collect();
    for text in corpus {
        for word in whitespace_tokenize(text) {
            let word = clean_word(word);
            if word.is_empty() {
                continue;
            }
            for n in lo..=hi {
                for g in ngrams(&word, n) {
                    *counts[n - lo].entry(g).or_insert(0) += 1;
                }
            }
        }
    }
    if counts[0].is_empty() {
        return Err(Error::EmptyCorpus(language.to_string()));
    }
    NgramModel::from_counts(language, n_range, counts)
}

/// Per-model log-likelihoods for one word and the winning model index.
#[derive(Debug, Clone, PartialEq)]
pub struct WordScore {
    pub log_likelihoods: Vec<f64>,
    pub best: usize,
}

/// Scores a word under every model. Ties go to the earlier model.
pub fn score_word(models: &[NgramModel], word: &str) -> Result<WordScore> {
    if models.len() < 2 {
        return Err(Error::TooFewModels {
            needed: 2,
            found: models.len(),
        });
    }
    let word = clean_word(word);
    if word.is_empty() {
        return Err(Error::EmptyWord);
    }
    Ok(score_clean(models, &word))
}

fn score_clean(models: &[NgramModel], word: &str) -> WordScore {
    let log_likelihoods: Vec<f64> = models.iter().map(|m| m.word_log_likelihood(word)).collect();
    let mut best = 0;
    for (i, &s) in log_likelihoods.iter().enumerate().skip(1) {
        if s > log_likelihoods[best] {
            best = i;
        }
    }
    WordScore {
        log_likelihoods,
        best,
    }
}

/// Evidence of English and local-language material in one text.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LangEvidence {
    pub english_present: bool,
    pub local_present: bool,
    pub local_fraction: f64,
    pub english_fraction: f64,
    /// Maximal runs of consecutive local-assigned words.
    pub local_span_count: usize,
}

/// Language assigned to one word of a text, `None` when too short.
#[derive(Debug, Clone, PartialEq)]
pub struct WordAssignment {
    pub word: String,
    pub language: Option<usize>,
}

/// Models plus the tags that count as English and as local.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedDetector {
    models: Vec<NgramModel>,
    english: usize,
    local: usize,
}

impl MixedDetector {
    pub fn new(models: Vec<NgramModel>, english_tag: &str, local_tag: &str) -> Result<Self> {
        if models.len() < 2 {
            return Err(Error::TooFewModels {
                needed: 2,
                found: models.len(),
            });
        }
        let find = |tag: &str| {
            models
                .iter()
                .position(|m| m.language == tag)
                .ok_or_else(|| Error::UnknownLanguage(tag.to_string()))
        };
        let english = find(english_tag)?;
        let local = find(local_tag)?;
        Ok(MixedDetector {
            models,
            english,
            local,
        })
    }

    pub fn models(&self) -> &[NgramModel] {
        &self.models
    }

    pub fn english_tag(&self) -> &str {
        &self.models[self.english].language
    }

    pub fn local_tag(&self) -> &str {
        &self.models[self.local].language
    }

    /// Per-word assignments over the words that contain letters.
    pub fn assign(&self, text: &str) -> Vec<WordAssignment> {
        whitespace_tokenize(text)
            .into_iter()
            .map(clean_word)
            .filter(|w| !w.is_empty())
            .map(|word| {
                let language = (word.chars().count() >= MIN_WORD_LEN)
                    .then(|| score_clean(&self.models, &word).best);
                WordAssignment { word, language }
            })
            .collect()
    }

    pub fn detect(&self, text: &str) -> LangEvidence {
        let words = self.assign(text);
        if words.is_empty() {
            return LangEvidence::default();
        }
        let total = words.len() as f64;
        let english = words
            .iter()
            .filter(|w| w.language == Some(self.english))
            .count();
        let local = words
            .iter()
            .filter(|w| w.language == Some(self.local))
            .count();

        // unassigned words do not break a run; words of any other language do
        let mut spans = 0;
        let mut in_span = false;
        for lang in words.iter().filter_map(|w| w.language) {
            if lang == self.local {
                if !in_span {
                    spans += 1;
                }
                in_span = true;
            } else {
                in_span = false;
            }
        }
        LangEvidence {
            english_present: english > 0,
            local_present: local > 0,
            local_fraction: local as f64 / total,
            english_fraction: english as f64 / total,
            local_span_count: spans,
        }
    }
}

/// One-shot form of [`MixedDetector::detect`].
pub fn detect_mixed(
    models: &[NgramModel],
    text: &str,
    english_tag: &str,
    local_tag: &str,
) -> Result<LangEvidence> {
    Ok(MixedDetector::new(models.to_vec(), english_tag, local_tag)?.detect(text))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    const EN: &[&str] = &[
        "thanks a lot for your answer",
        "sounds great to me",
        "the weather is nice and the people are friendly",
        "what should i bring with me when i move",
        "this is the best thing about living here",
    ];
    const FI: &[&str] = &[
        "kiitos paljon hyvää päivää",
        "minä olen suomalainen ja asun helsingissä",
        "terveyskeskus on auki tänään",
        "mitä kuuluu kiitos hyvää",
        "sauna on lämmin ja järvi on kylmä",
    ];

    fn models() -> Vec<NgramModel> {
        vec![
            train_ngram_model(EN, "en", DEFAULT_N_RANGE).unwrap(),
            train_ngram_model(FI, "fi", DEFAULT_N_RANGE).unwrap(),
        ]
    }

    #[test]
    fn smoothing_on_single_symbol_corpus() {
        let m = train_ngram_model(&["aa"], "x", (1, 1)).unwrap();
        // MLE over letters would give 1; smoothing leaves mass for the unseen bucket
        let p = m.probability("a");
        assert!(p < 1.0 && p > 0.0);
    }

    #[test]
    fn orders_sum_to_one() {
        for m in models() {
            for n in 1..=5 {
                let table = &m.counts()[n - 1];
                let sum: f64 =
                    table.keys().map(|g| m.probability(g)).sum::<f64>() + m.unseen_mass(n);
                assert!((sum - 1.0).abs() < 1e-9, "order {n}: {sum}");
            }
        }
    }

    #[test]
    fn disjoint_alphabets() {
        let latin = train_ngram_model(&["hello world"], "en", (1, 3)).unwrap();
        let hangul = train_ngram_model(&["안녕하세요 감사합니다"], "ko", (1, 3)).unwrap();
        assert!(latin.alphabet().is_disjoint(hangul.alphabet()));
        let ms = vec![latin, hangul];
        assert_eq!(score_word(&ms, "감사").unwrap().best, 1);
        assert_eq!(score_word(&ms, "world").unwrap().best, 0);
    }

    #[test]
    fn training_is_deterministic() {
        assert_eq!(
            train_ngram_model(FI, "fi", (1, 5)).unwrap(),
            train_ngram_model(FI, "fi", (1, 5)).unwrap()
        );
    }

    #[test]
    fn errors() {
        assert_eq!(
            train_ngram_model(&[], "fi", (1, 3)),
            Err(Error::EmptyCorpus("fi".into()))
        );
        assert_eq!(
            train_ngram_model(&["123 !!"], "fi", (1, 3)),
            Err(Error::EmptyCorpus("fi".into()))
        );
        let ms = models();
        assert_eq!(score_word(&ms, "!!"), Err(Error::EmptyWord));
        assert!(matches!(
            score_word(&ms[..1], "abc"),
            Err(Error::TooFewModels { .. })
        ));
    }

    #[test]
    fn tie_goes_to_first_model() {
        let a = train_ngram_model(&["abc"], "a", (1, 2)).unwrap();
        let mut b = a.clone();
        b.language = "b".into();
        let s = score_word(&[a.clone(), b.clone()], "zzz").unwrap();
        assert_eq!(s.log_likelihoods[0], s.log_likelihoods[1]);
        assert_eq!(s.best, 0);
        assert_eq!(score_word(&[b, a], "zzz").unwrap().best, 0);
    }

    #[test]
    fn kiitos_is_finnish() {
        let ms = models();
        let s = score_word(&ms, "kiitos").unwrap();
        assert_eq!(s.best, 1);
    }

    #[test]
    fn mixed_message() {
        let ms = models();
        let ev = detect_mixed(
            &ms,
            "WOW, sounds great to me, man. OK, kiitos paljon for your answer!",
            "en",
            "fi",
        )
        .unwrap();
        assert!(ev.english_present);
        assert!(ev.local_present);
        assert_eq!(ev.local_span_count, 1);

        let ev = detect_mixed(&ms, "kiitos paljon", "en", "fi").unwrap();
        assert_eq!(ev.local_span_count, 1);
        assert_eq!(ev.local_fraction, 1.0);

        let ev = detect_mixed(&ms, "!! 42 ...", "en", "fi").unwrap();
        assert_eq!(ev, LangEvidence::default());
    }

    #[test]
    fn unknown_tag_rejected() {
        assert_eq!(
            MixedDetector::new(models(), "en", "es"),
            Err(Error::UnknownLanguage("es".into()))
        );
    }

    proptest! {
        #[test]
        fn evidence_is_consistent(text in "[a-zäö ,.!]{0,80}") {
            let ms = models();
            let ev = detect_mixed(&ms, &text, "en", "fi").unwrap();
            prop_assert!((0.0..=1.0).contains(&ev.local_fraction));
            prop_assert!((0.0..=1.0).contains(&ev.english_fraction));
            prop_assert!(ev.local_fraction + ev.english_fraction <= 1.0 + 1e-12);
            prop_assert_eq!(ev.local_present, ev.local_fraction > 0.0);
            prop_assert_eq!(ev.english_present, ev.english_fraction > 0.0);
            prop_assert!(ev.local_span_count <= (ev.local_fraction * 1e6) as usize);
        }

        #[test]
        fn appending_local_word_keeps_local_count(text in "[a-z ]{0,60}", idx in 0usize..5) {
            let ms = models();
            let det = MixedDetector::new(ms, "en", "fi").unwrap();
            let extra = ["kiitos", "paljon", "terveyskeskus", "suomalainen", "helsingissä"][idx];
            let count = |t: &str| det.assign(t).iter().filter(|w| w.language == Some(1)).count();
            let before = count(&text);
            let after = count(&alloc::format!("{text} {extra}"));
            prop_assert!(after >= before);
        }

        #[test]
        fn model_order_only_matters_for_ties(text in "[a-zäö ]{0,60}") {
            let ms = models();
            let fwd = MixedDetector::new(ms.clone(), "en", "fi").unwrap();
            let rev = MixedDetector::new(vec![ms[1].clone(), ms[0].clone()], "en", "fi").unwrap();
            let tie_free = fwd.assign(&text).iter().all(|w| {
                w.word.chars().count() < MIN_WORD_LEN || {
                    let s = score_clean(fwd.models(), &w.word);
                    s.log_likelihoods[0] != s.log_likelihoods[1]
                }
            });
            if tie_free {
                prop_assert_eq!(fwd.detect(&text), rev.detect(&text));
            }
        }
    }
}
