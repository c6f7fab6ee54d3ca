use alloc::vec::Vec;

use crate::error::{Error, Result};

fn check_lengths(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::LengthMismatch { left, right });
    }
    if left == 0 {
        return Err(Error::EmptyInput);
    }
    Ok(())
}

/// Fraction of exact matches.
pub fn accuracy(gold: &[u8], pred: &[u8]) -> Result<f64> {
    check_lengths(gold.len(), pred.len())?;
    let hits = gold.iter().zip(pred).filter(|(g, p)| g == p).count();
    Ok(hits as f64 / gold.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MacroF1 {
    pub value: f64,
    /// F1 of class 0 and class 1.
    pub per_class: [f64; 2],
    /// Set when a class appears in neither gold nor predictions.
    pub degenerate: bool,
}

pub fn macro_f1_detail(gold: &[u8], pred: &[u8]) -> Result<MacroF1> {
    check_lengths(gold.len(), pred.len())?;
    let mut per_class = [0.0; 2];
    let mut degenerate = false;
    for (class, slot) in per_class.iter_mut().enumerate() {
        let class = class as u8;
        let tp = gold.iter().zip(pred).filter(|(&g, &p)| g == class && p == class).count();
        let gold_n = gold.iter().filter(|&&g| g == class).count();
        let pred_n = pred.iter().filter(|&&p| p == class).count();
        if gold_n == 0 && pred_n == 0 {
            degenerate = true;
            log::warn!("class {class} absent from gold and predictions; its F1 counts as 0");
            continue;
        }
        // 2 tp / (|gold| + |pred|) is F1 without the 0/0 cases of P and R
        *slot = 2.0 * tp as f64 / (gold_n + pred_n) as f64;
    }
    Ok(MacroF1 {
        value: (per_class[0] + per_class[1]) / 2.0,
        per_class,
        degenerate,
    })
}

/// Unweighted mean of the two per-class F1 scores.
pub fn macro_f1(gold: &[u8], pred: &[u8]) -> Result<f64> {
    macro_f1_detail(gold, pred).map(|m| m.value)
}

/// Area under the ROC curve as the Mann-Whitney statistic: the fraction of
/// (positive, negative) pairs ranked correctly, ties counting one half.
/// Computed from average ranks in O(n log n).
pub fn roc_auc(gold: &[u8], scores: &[f64]) -> Result<f64> {
    check_lengths(gold.len(), scores.len())?;
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::InvalidArgument("scores must be finite".into()));
    }
    let n_pos = gold.iter().filter(|&&g| g == 1).count();
    let n_neg = gold.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::SingleClass);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut rank_sum = 0.0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start;
        while end + 1 < order.len() && scores[order[end + 1]] == scores[order[start]] {
            end += 1;
        }
        // 1-based ranks start+1 ..= end+1 share their mean
        let avg = (start + end + 2) as f64 / 2.0;
        let positives = order[start..=end].iter().filter(|&&i| gold[i] == 1).count();
        rank_sum += avg * positives as f64;
        start = end + 1;
    }
    let u = rank_sum - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos * n_neg) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Metrics {
    pub acc: f64,
    pub f1_macro: f64,
    pub auc: f64,
}

/// ACC and macro-F1 at the 0.5 threshold, AUC on the raw probabilities.
pub fn evaluate(gold: &[u8], probabilities: &[f64]) -> Result<Metrics> {
    let pred: Vec<u8> = probabilities.iter().map(|&p| crate::ensemble::decide(p)).collect();
    Ok(Metrics {
        acc: accuracy(gold, &pred)?,
        f1_macro: macro_f1(gold, &pred)?,
        auc: roc_auc(gold, probabilities)?,
    })
}
