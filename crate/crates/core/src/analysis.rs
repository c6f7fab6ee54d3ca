//! Corpus analytics over classified messages: code-mixing proportions per
//! topic and flair, and class-based TF-IDF topic terms.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::corpus::{Dataset, Message, CODE_MIXED, OUTLIER_TOPIC};
use crate::error::{Error, Result};
use crate::math;

pub const DEFAULT_MIN_TOPIC_FRACTION: f64 = 0.003;
pub const NO_FLAIR: &str = "(none)";

/// Lowercased words split on anything that is not a letter or digit.
pub fn analysis_words(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(|w| w.chars().flat_map(char::to_lowercase).collect())
        .collect()
}

/// Word n-grams of every order in `range`, joined by single spaces.
pub fn word_ngrams(words: &[String], range: (usize, usize)) -> Vec<String> {
    let mut out = Vec::new();
    for n in range.0.max(1)..=range.1 {
        for w in words.windows(n) {
            out.push(w.join(" "));
        }
    }
    out
}

/// Ranked terms of one topic.
pub type TopTerms = Vec<(String, f64)>;

/// Class-based TF-IDF.
///
/// Documents of a topic are pooled; a term scores
/// `tf(t, topic) * ln(1 + A / f(t))` with `A` the mean number of terms per
/// topic and `f(t)` the term's frequency across all topics. Terms are ranked
/// by score, then lexicographically. `top_n = None` keeps every term.
pub fn ctfidf(
    topics: &BTreeMap<i64, Vec<&str>>,
    ngram_range: (usize, usize),
    top_n: Option<usize>,
) -> Result<BTreeMap<i64, TopTerms>> {
    if topics.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut tf: BTreeMap<i64, BTreeMap<String, u64>> = BTreeMap::new();
    let mut global: BTreeMap<String, u64> = BTreeMap::new();
    let mut total_terms = 0u64;
    for (&topic, docs) in topics {
        if docs.is_empty() {
            return Err(Error::EmptyTopic(topic));
        }
        let counts = tf.entry(topic).or_default();
        for doc in docs {
            for term in word_ngrams(&analysis_words(doc), ngram_range) {
                *counts.entry(term.clone()).or_insert(0) += 1;
                *global.entry(term).or_insert(0) += 1;
                total_terms += 1;
            }
        }
    }
    let avg = total_terms as f64 / topics.len() as f64;
    Ok(tf
        .into_iter()
        .map(|(topic, counts)| {
            let mut scored: TopTerms = counts
                .into_iter()
                .map(|(term, c)| {
                    let f = global[&term] as f64;
                    let score = c as f64 * math::ln(1.0 + avg / f);
                    (term, score)
                })
                .collect();
            scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            if let Some(n) = top_n {
                scored.truncate(n);
            }
            (topic, scored)
        })
        .collect())
}

/// Minimum members a topic needs to survive [`topic_size_filter`].
pub fn min_topic_size(n: usize, min_fraction: f64) -> usize {
    // the epsilon keeps 0.003 * 1000 at 3, not 4
    math::ceil(min_fraction * n as f64 - 1e-9).max(0.0) as usize
}

/// Remaps topics with fewer than `ceil(min_fraction * N)` members to the
/// outlier id.
pub fn topic_size_filter(assignments: &[i64], min_fraction: f64) -> Vec<i64> {
    let threshold = min_topic_size(assignments.len(), min_fraction);
    let mut sizes: BTreeMap<i64, usize> = BTreeMap::new();
    for &t in assignments {
        *sizes.entry(t).or_insert(0) += 1;
    }
    assignments
        .iter()
        .map(|&t| {
            if t != OUTLIER_TOPIC && sizes[&t] < threshold {
                OUTLIER_TOPIC
            } else {
                t
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Cell {
    pub count: usize,
    pub code_mixed: usize,
    pub proportion: f64,
}

impl Cell {
    fn from_counts(count: usize, code_mixed: usize) -> Self {
        Cell {
            count,
            code_mixed,
            proportion: if count == 0 {
                0.0
            } else {
                code_mixed as f64 / count as f64
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TopicSummary {
    pub topic_id: i64,
    pub size: usize,
    pub top_terms: TopTerms,
    pub codemix_proportion: f64,
    pub flair_breakdown: BTreeMap<String, Cell>,
}

fn flair_key(m: &Message) -> String {
    m.flair.clone().unwrap_or_else(|| NO_FLAIR.to_string())
}

fn label_of(m: &Message) -> Result<u8> {
    m.label.ok_or_else(|| Error::Unlabeled(m.id.clone()))
}

/// Per-topic code-mixing proportions with a per-flair breakdown and the
/// topic's top c-TF-IDF terms. Outliers are left out; summaries come in
/// topic id order.
pub fn codemix_proportions(d: &Dataset, top_n: usize) -> Result<Vec<TopicSummary>> {
    let mut groups: BTreeMap<i64, Vec<&Message>> = BTreeMap::new();
    for m in d.messages() {
        label_of(m)?;
        let topic = m.topic_id.ok_or_else(|| {
            Error::InvalidArgument(alloc::format!("message `{}` has no topic id", m.id))
        })?;
        if topic != OUTLIER_TOPIC {
            groups.entry(topic).or_default().push(m);
        }
    }
    if groups.is_empty() {
        return Ok(Vec::new());
    }
    let docs: BTreeMap<i64, Vec<&str>> = groups
        .iter()
        .map(|(&t, ms)| (t, ms.iter().map(|m| m.text.as_str()).collect()))
        .collect();
    let mut terms = ctfidf(&docs, (1, 2), Some(top_n))?;

    groups
        .into_iter()
        .map(|(topic_id, ms)| {
            let mixed = ms.iter().filter(|m| m.label == Some(CODE_MIXED)).count();
            let mut flairs: BTreeMap<String, (usize, usize)> = BTreeMap::new();
            for m in &ms {
                let cell = flairs.entry(flair_key(m)).or_default();
                cell.0 += 1;
                cell.1 += (m.label == Some(CODE_MIXED)) as usize;
            }
            Ok(TopicSummary {
                topic_id,
                size: ms.len(),
                top_terms: terms.remove(&topic_id).unwrap_or_default(),
                codemix_proportion: mixed as f64 / ms.len() as f64,
                flair_breakdown: flairs
                    .into_iter()
                    .map(|(f, (n, c))| (f, Cell::from_counts(n, c)))
                    .collect(),
            })
        })
        .collect()
}

/// Code-mixing proportion per flair over the whole dataset.
pub fn flair_proportions(d: &Dataset) -> Result<BTreeMap<String, Cell>> {
    let mut flairs: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for m in d.messages() {
        let label = label_of(m)?;
        let cell = flairs.entry(flair_key(m)).or_default();
        cell.0 += 1;
        cell.1 += (label == CODE_MIXED) as usize;
    }
    Ok(flairs
        .into_iter()
        .map(|(f, (n, c))| (f, Cell::from_counts(n, c)))
        .collect())
}
