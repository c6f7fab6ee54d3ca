//! Loads tokenizers, language models and soft-label scorers named by a
//! run config.

use codemix_core::features::{ContextualScorer, Resources, StubScorer};
use codemix_core::langdetect::MixedDetector;

use crate::bpe_files::load_bpe;
use crate::config::{ResourcesConfig, RunConfig, TargetConfig};
use crate::error::{Error, Result};
use crate::langmodel::load_langmodel;
use crate::soft_labels::load_soft_labels;

/// Constant used when neither a soft-label file nor a stub value is set.
pub const DEFAULT_STUB: f64 = 0.5;

pub fn load_resources(r: &ResourcesConfig) -> Result<Resources> {
    let english = load_bpe("english", &r.english.vocab, &r.english.merges)?;
    let local = load_bpe("local", &r.local.vocab, &r.local.merges)?;
    let multilingual = load_bpe("multilingual", &r.multilingual.vocab, &r.multilingual.merges)?;
    let en = load_langmodel(&r.english_langmodel)?;
    let loc = load_langmodel(&r.local_langmodel)?;
    let (en_tag, loc_tag) = (en.language().to_string(), loc.language().to_string());
    if en_tag == loc_tag {
        return Err(Error::Config(format!(
            "english and local language models share the tag `{en_tag}`"
        )));
    }
    let detector =
        MixedDetector::new(vec![en, loc], &en_tag, &loc_tag).map_err(Error::core("langdetect"))?;
    Ok(Resources {
        english,
        local,
        multilingual,
        detector,
    })
}

/// `base` with its local tokenizer and language model replaced.
pub fn load_target(base: &Resources, t: &TargetConfig) -> Result<Resources> {
    let local = load_bpe("local", &t.local.vocab, &t.local.merges)?;
    let loc = load_langmodel(&t.local_langmodel)?;
    let en = base
        .detector
        .models()
        .iter()
        .find(|m| m.language() == base.detector.english_tag())
        .cloned()
        .ok_or_else(|| Error::Internal("detector lost its english model".into()))?;
    let (en_tag, loc_tag) = (en.language().to_string(), loc.language().to_string());
    let detector =
        MixedDetector::new(vec![en, loc], &en_tag, &loc_tag).map_err(Error::core("langdetect"))?;
    Ok(base.with_local(local, detector))
}

pub fn build_scorer(cfg: &RunConfig) -> Result<Box<dyn ContextualScorer>> {
    if let Some(path) = &cfg.soft_labels {
        return Ok(Box::new(load_soft_labels(path)?));
    }
    let c = cfg.stub_soft_label.unwrap_or_else(|| {
        log::warn!("no soft labels configured, using constant {DEFAULT_STUB}");
        DEFAULT_STUB
    });
    Ok(Box::new(StubScorer::new(c).map_err(Error::core("features"))?))
}
