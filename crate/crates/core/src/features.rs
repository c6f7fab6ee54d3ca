//! The fixed-schema feature vector: tokenizer statistics, language evidence
//! and a contextual soft label.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::corpus::Message;
use crate::error::{Error, Result};
use crate::langdetect::{LangEvidence, MixedDetector};
use crate::tokenize::{token_stats, BpeTokenizer, TokenStats, Tokenizer, WhitespaceTokenizer};

pub const SCHEMA_V1: u32 = 1;

/// Tokenizer blocks in vector order.
pub const TOKENIZER_ORDER: [&str; 4] = ["english", "local", "multilingual", "whitespace"];
pub const STAT_FIELDS: [&str; 5] = [
    "token_count",
    "fertility",
    "max_split",
    "frac_fragmented",
    "frac_unk",
];
pub const EVIDENCE_FIELDS: [&str; 5] = [
    "english_present",
    "local_present",
    "local_fraction",
    "english_fraction",
    "local_span_count",
];
pub const SOFT_LABEL: &str = "soft_label";

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeatureSchema {
    pub version: u32,
    pub names: Vec<String>,
}

impl FeatureSchema {
    /// 5 statistics for each of the 4 tokenizers, 5 evidence fields and the
    /// soft label: 26 features.
    pub fn v1() -> Self {
        let mut names = Vec::with_capacity(26);
        for tok in TOKENIZER_ORDER {
            for field in STAT_FIELDS {
                names.push(format!("{tok}.{field}"));
            }
        }
        for field in EVIDENCE_FIELDS {
            names.push(format!("lang.{field}"));
        }
        names.push(SOFT_LABEL.to_string());
        FeatureSchema {
            version: SCHEMA_V1,
            names,
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn soft_label_index(&self) -> usize {
        self.len() - 1
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeatureVector {
    pub message_id: String,
    pub values: Vec<f64>,
    pub schema_version: u32,
}

impl FeatureVector {
    pub fn check(&self, schema: &FeatureSchema) -> Result<()> {
        if self.schema_version != schema.version {
            return Err(Error::SchemaMismatch {
                expected: schema.version,
                found: self.schema_version,
            });
        }
        if self.values.len() != schema.len() {
            return Err(Error::WrongWidth {
                expected: schema.len(),
                found: self.values.len(),
            });
        }
        if let Some(v) = self.values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite feature {v} for `{}`",
                self.message_id
            )));
        }
        Ok(())
    }
}

/// Probability that a message is code-mixed, from a contextual model.
pub trait ContextualScorer: Send + Sync {
    fn score(&self, message: &Message) -> Result<f64>;
}

/// Returns the same constant for every message.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StubScorer(f64);

impl StubScorer {
    pub fn new(c: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&c) {
            return Err(Error::ProbabilityOutOfRange { value: c });
        }
        Ok(StubScorer(c))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

impl ContextualScorer for StubScorer {
    fn score(&self, _message: &Message) -> Result<f64> {
        Ok(self.0)
    }
}

/// Soft labels keyed by message id, typically exported by a fine-tuned
/// transformer.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SoftLabels {
    rows: BTreeMap<String, f64>,
}

impl SoftLabels {
    pub fn new(rows: BTreeMap<String, f64>) -> Result<Self> {
        if let Some(&value) = rows.values().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::ProbabilityOutOfRange { value });
        }
        Ok(SoftLabels { rows })
    }

    pub fn get(&self, id: &str) -> Option<f64> {
        self.rows.get(id).copied()
    }

    pub fn rows(&self) -> &BTreeMap<String, f64> {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

impl ContextualScorer for SoftLabels {
    fn score(&self, message: &Message) -> Result<f64> {
        self.get(&message.id)
            .ok_or_else(|| Error::MissingSoftLabel(message.id.clone()))
    }
}

/// Tokenizers and detector for one English/local language pair.
#[derive(Debug, Clone)]
pub struct Resources {
    pub english: BpeTokenizer,
    pub local: BpeTokenizer,
    pub multilingual: BpeTokenizer,
    pub detector: MixedDetector,
}

impl Resources {
    pub fn local_tag(&self) -> &str {
        self.detector.local_tag()
    }

    /// Same English and multilingual resources with another local language.
    pub fn with_local(&self, local: BpeTokenizer, detector: MixedDetector) -> Resources {
        Resources {
            english: self.english.clone(),
            local,
            multilingual: self.multilingual.clone(),
            detector,
        }
    }
}

fn push_stats(values: &mut Vec<f64>, s: &TokenStats) {
    values.extend([
        s.token_count as f64,
        s.fertility,
        s.max_split as f64,
        s.frac_fragmented,
        s.frac_unk,
    ]);
}

fn push_evidence(values: &mut Vec<f64>, e: &LangEvidence) {
    values.extend([
        e.english_present as u8 as f64,
        e.local_present as u8 as f64,
        e.local_fraction,
        e.english_fraction,
        e.local_span_count as f64,
    ]);
}

/// Builds the schema v1 vector for one message.
pub fn assemble_features(
    message: &Message,
    resources: &Resources,
    scorer: &dyn ContextualScorer,
) -> Result<FeatureVector> {
    if message.text.trim().is_empty() {
        return Err(Error::InvalidArgument(format!(
            "message `{}` has empty text",
            message.id
        )));
    }
    let text = message.text.as_str();
    let mut values = Vec::with_capacity(26);
    push_stats(&mut values, &token_stats(&resources.english.encode_words(text)));
    push_stats(&mut values, &token_stats(&resources.local.encode_words(text)));
    push_stats(
        &mut values,
        &token_stats(&resources.multilingual.encode_words(text)),
    );
    push_stats(&mut values, &token_stats(&WhitespaceTokenizer.encode_words(text)));
    push_evidence(&mut values, &resources.detector.detect(text));

    let soft = scorer.score(message)?;
    if !(0.0..=1.0).contains(&soft) {
        return Err(Error::ProbabilityOutOfRange { value: soft });
    }
    values.push(soft);
    Ok(FeatureVector {
        message_id: message.id.clone(),
        values,
        schema_version: SCHEMA_V1,
    })
}

pub fn assemble_all(
    messages: &[Message],
    resources: &Resources,
    scorer: &dyn ContextualScorer,
) -> Result<Vec<FeatureVector>> {
    messages
        .iter()
        .map(|m| assemble_features(m, resources, scorer))
        .collect()
}

/// Which schema columns a classifier sees.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum FeatureSelection {
    #[default]
    All,
    /// The 20 tokenizer statistics.
    Tokenizers,
    /// The whitespace tokenizer block only.
    Whitespace,
    /// Explicit feature names.
    Names(Vec<String>),
}

impl FeatureSelection {
    pub fn columns(&self, schema: &FeatureSchema) -> Result<Vec<usize>> {
        let block = STAT_FIELDS.len();
        match self {
            FeatureSelection::All => Ok((0..schema.len()).collect()),
            FeatureSelection::Tokenizers => Ok((0..block * TOKENIZER_ORDER.len()).collect()),
            FeatureSelection::Whitespace => Ok((block * 3..block * 4).collect()),
            FeatureSelection::Names(names) => names
                .iter()
                .map(|n| {
                    schema
                        .index_of(n)
                        .ok_or_else(|| Error::InvalidArgument(format!("unknown feature `{n}`")))
                })
                .collect(),
        }
    }
}
