//! Messages, datasets, the short-message filter, stratified fold splitting
//! and a seeded bilingual corpus generator.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::math;
use crate::tokenize::whitespace_tokenize;

/// Binary code-mixing label.
pub const CODE_MIXED: u8 = 1;
pub const NON_MIXED: u8 = 0;

/// Topic id used for cluster outliers.
pub const OUTLIER_TOPIC: i64 = -1;

/// One social-media message.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Message {
    pub id: String,
    pub community: String,
    pub flair: Option<String>,
    pub text: String,
    pub label: Option<u8>,
    pub topic_id: Option<i64>,
}

impl Message {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        Message {
            id: id.into(),
            community: String::new(),
            flair: None,
            text: text.into(),
            label: None,
            topic_id: None,
        }
    }

    pub fn with_label(mut self, label: u8) -> Self {
        self.label = Some(label);
        self
    }

    pub fn with_community(mut self, community: impl Into<String>) -> Self {
        self.community = community.into();
        self
    }

    pub fn with_flair(mut self, flair: impl Into<String>) -> Self {
        self.flair = Some(flair.into());
        self
    }

    pub fn with_topic(mut self, topic_id: i64) -> Self {
        self.topic_id = Some(topic_id);
        self
    }
}

/// An ordered collection of messages with unique ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dataset {
    messages: Vec<Message>,
    pub source_tag: String,
}

impl Dataset {
    /// Builds a dataset, rejecting duplicate ids and labels other than 0/1.
    pub fn new(messages: Vec<Message>, source_tag: impl Into<String>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for m in &messages {
            if !seen.insert(m.id.as_str()) {
                return Err(Error::DuplicateId(m.id.clone()));
            }
            if let Some(l) = m.label {
                if l > 1 {
                    return Err(Error::InvalidArgument(format!(
                        "message `{}` has label {l}, expected 0 or 1",
                        m.id
                    )));
                }
            }
        }
        Ok(Dataset {
            messages,
            source_tag: source_tag.into(),
        })
    }

    pub fn empty(source_tag: impl Into<String>) -> Self {
        Dataset {
            messages: Vec::new(),
            source_tag: source_tag.into(),
        }
    }

    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    pub fn into_messages(self) -> Vec<Message> {
        self.messages
    }

    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    /// Labels of every message, failing on the first unlabeled one.
    pub fn labels(&self) -> Result<Vec<u8>> {
        self.messages
            .iter()
            .map(|m| m.label.ok_or_else(|| Error::Unlabeled(m.id.clone())))
            .collect()
    }

    /// Subset by positions, preserving the order given.
    pub fn select(&self, indices: &[usize]) -> Dataset {
        Dataset {
            messages: indices.iter().map(|&i| self.messages[i].clone()).collect(),
            source_tag: self.source_tag.clone(),
        }
    }

    /// Concatenates two datasets. Ids must stay unique.
    pub fn concat(&self, other: &Dataset) -> Result<Dataset> {
        let mut messages = self.messages.clone();
        messages.extend(other.messages.iter().cloned());
        Dataset::new(messages, self.source_tag.clone())
    }
}

/// Keeps messages with at least `min_tokens` whitespace tokens.
pub fn filter_short(d: &Dataset, min_tokens: usize) -> Dataset {
    let min_tokens = min_tokens.max(1);
    Dataset {
        messages: d
            .messages
            .iter()
            .filter(|m| whitespace_tokenize(&m.text).len() >= min_tokens)
            .cloned()
            .collect(),
        source_tag: d.source_tag.clone(),
    }
}

/// Fold assignment for k-fold cross-validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitPlan {
    pub k: usize,
    pub assignments: Vec<usize>,
}

impl SplitPlan {
    /// Positions in fold `fold` (test side).
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|(_, &f)| f == fold)
            .map(|(i, _)| i)
            .collect()
    }

    /// Positions outside fold `fold` (training side).
    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|(_, &f)| f != fold)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = alloc::vec![0; self.k];
        for &f in &self.assignments {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Stratified k-fold split.
///
/// Messages are put in id order, each class is shuffled with a seeded
/// ChaCha stream and dealt round-robin. The dealing position carries over
/// from one class to the next so total fold sizes differ by at most one,
/// and per-class fold counts are the floor or ceiling of `n_class / k`.
pub fn stratified_kfold(d: &Dataset, k: usize, seed: u64) -> Result<SplitPlan> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let labels = d.labels()?;
    let mut order: Vec<usize> = (0..d.len()).collect();
    order.sort_by(|&a, &b| d.messages[a].id.cmp(&d.messages[b].id));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignments = alloc::vec![0usize; d.len()];
    let mut next = 0usize;
    // positives first so the minority class is dealt from fold 0
    for class in [CODE_MIXED, NON_MIXED] {
        let mut members: Vec<usize> = order
            .iter()
            .copied()
            .filter(|&i| labels[i] == class)
            .collect();
        if members.len() < k {
            return Err(Error::ClassTooSmall {
                class,
                found: members.len(),
                needed: k,
            });
        }
        members.shuffle(&mut rng);
        for i in members {
            assignments[i] = next % k;
            next += 1;
        }
    }
    Ok(SplitPlan { k, assignments })
}

/// Label counts for one community.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LabelCounts {
    pub unlabeled: usize,
    pub code_mixed: usize,
    pub non_mixed: usize,
}

impl LabelCounts {
    fn add(&mut self, label: Option<u8>) {
        match label {
            None => self.unlabeled += 1,
            Some(CODE_MIXED) => self.code_mixed += 1,
            Some(_) => self.non_mixed += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.unlabeled + self.code_mixed + self.non_mixed
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CountsReport {
    pub per_community: BTreeMap<String, LabelCounts>,
    pub total: LabelCounts,
}

pub fn dataset_stats(d: &Dataset) -> CountsReport {
    let mut report = CountsReport::default();
    for m in &d.messages {
        report
            .per_community
            .entry(m.community.clone())
            .or_default()
            .add(m.label);
        report.total.add(m.label);
    }
    report
}

/// Parameters for [`generate_synthetic`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SynthConfig {
    pub n_messages: usize,
    pub mix_rate: f64,
    pub english_lexicon: Vec<String>,
    pub local_lexicon: Vec<String>,
    /// Inclusive range of local span lengths, within [1, 5].
    pub span_len_range: (usize, usize),
    /// Inclusive range of English words per message.
    pub sentence_len_range: (usize, usize),
    pub seed: u64,
    pub id_prefix: String,
    pub community: String,
    pub flair: Option<String>,
    pub topic_id: Option<i64>,
}

impl SynthConfig {
    pub fn new(english_lexicon: Vec<String>, local_lexicon: Vec<String>) -> Self {
        SynthConfig {
            n_messages: 100,
            mix_rate: 0.3,
            english_lexicon,
            local_lexicon,
            span_len_range: (1, 3),
            sentence_len_range: (6, 14),
            seed: 42,
            id_prefix: "syn".into(),
            community: "synthetic".into(),
            flair: None,
            topic_id: None,
        }
    }

    /// Exact number of code-mixed messages the generator emits.
    pub fn positive_count(&self) -> usize {
        math::round(self.n_messages as f64 * self.mix_rate) as usize
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.mix_rate) {
            return Err(Error::InvalidArgument(format!(
                "mix_rate {} outside [0, 1]",
                self.mix_rate
            )));
        }
        if self.english_lexicon.is_empty() || self.local_lexicon.is_empty() {
            return Err(Error::InvalidArgument("lexicons must be non-empty".into()));
        }
        let (lo, hi) = self.span_len_range;
        if lo < 1 || hi > 5 || lo > hi {
            return Err(Error::InvalidArgument(format!(
                "span_len_range ({lo}, {hi}) must lie within [1, 5]"
            )));
        }
        let (lo, hi) = self.sentence_len_range;
        if lo < 1 || lo > hi {
            return Err(Error::InvalidArgument(format!(
                "sentence_len_range ({lo}, {hi}) is empty"
            )));
        }
        let english: BTreeSet<&str> = self.english_lexicon.iter().map(|w| w.as_str()).collect();
        if let Some(w) = self
            .local_lexicon
            .iter()
            .find(|w| english.contains(w.as_str()))
        {
            return Err(Error::LexiconOverlap(w.clone()));
        }
        Ok(())
    }
}

/// Generates a labeled bilingual corpus.
///
/// Negatives are sentences drawn from the English lexicon. Positives are
/// drawn the same way and then receive one contiguous run of local-lexicon
/// words at a random position. Exactly [`SynthConfig::positive_count`]
/// messages are positive; which ones is decided by the seed.
pub fn generate_synthetic(cfg: &SynthConfig) -> Result<Dataset> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n_pos = cfg.positive_count();
    let mut labels: Vec<u8> = (0..cfg.n_messages)
        .map(|i| if i < n_pos { CODE_MIXED } else { NON_MIXED })
        .collect();
    labels.shuffle(&mut rng);

    let width = digits(cfg.n_messages);
    let mut messages = Vec::with_capacity(cfg.n_messages);
    for (i, &label) in labels.iter().enumerate() {
        let (lo, hi) = cfg.sentence_len_range;
        let len = rng.random_range(lo..=hi);
        let mut words: Vec<&str> = (0..len)
            .map(|_| cfg.english_lexicon[rng.random_range(0..cfg.english_lexicon.len())].as_str())
            .collect();
        if label == CODE_MIXED {
            let (lo, hi) = cfg.span_len_range;
            let span = rng.random_range(lo..=hi);
            let at = rng.random_range(0..=words.len());
            let local: Vec<&str> = (0..span)
                .map(|_| cfg.local_lexicon[rng.random_range(0..cfg.local_lexicon.len())].as_str())
                .collect();
            words.splice(at..at, local);
        }
        let mut text = words.join(" ");
        text.push('.');
        messages.push(Message {
            id: format!("{}-{:0width$}", cfg.id_prefix, i, width = width),
            community: cfg.community.clone(),
            flair: cfg.flair.clone(),
            text,
            label: Some(label),
            topic_id: cfg.topic_id,
        });
    }
    Dataset::new(messages, cfg.community.to_string())
}

fn digits(n: usize) -> usize {
    let mut n = n.max(1) - 1;
    let mut d = 1;
    while n >= 10 {
        n /= 10;
        d += 1;
    }
    d
}
