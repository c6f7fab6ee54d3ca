use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Items by annotators; `None` where an annotator gave no label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgreementTable {
    rows: Vec<Vec<Option<u8>>>,
}

impl AgreementTable {
    /// Each row is one item. Rows must be the same width and hold at least
    /// one binary label.
    pub fn new(rows: Vec<Vec<Option<u8>>>) -> Result<Self> {
        let width = rows.first().map_or(0, Vec::len);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::LengthMismatch {
                    left: width,
                    right: row.len(),
                });
            }
            if row.iter().all(Option::is_none) {
                return Err(Error::InvalidArgument(alloc::format!("item {i} has no labels")));
            }
            if let Some(v) = row.iter().flatten().find(|&&v| v > 1) {
                return Err(Error::InvalidArgument(alloc::format!(
                    "item {i} has non-binary label {v}"
                )));
            }
        }
        Ok(AgreementTable { rows })
    }

    /// Builds a table from one label vector per annotator.
    pub fn from_annotators(annotators: &[Vec<Option<u8>>]) -> Result<Self> {
        let n = annotators.first().map_or(0, Vec::len);
        if let Some(a) = annotators.iter().find(|a| a.len() != n) {
            return Err(Error::LengthMismatch {
                left: n,
                right: a.len(),
            });
        }
        Self::new((0..n).map(|i| annotators.iter().map(|a| a[i]).collect()).collect())
    }

    pub fn rows(&self) -> &[Vec<Option<u8>>] {
        &self.rows
    }
}

/// Krippendorff's alpha for nominal data, `1 - D_o / D_e`, from the
/// coincidence matrix of pairable values.
///
/// When only one category occurs anywhere there is no disagreement to
/// expect and alpha is reported as 1.
pub fn krippendorff_alpha(table: &AgreementTable) -> Result<f64> {
    // coincidences o[(c, k)] over ordered value pairs within an item
    let mut o: BTreeMap<(u8, u8), f64> = BTreeMap::new();
    for row in &table.rows {
        let values: Vec<u8> = row.iter().flatten().copied().collect();
        let m = values.len();
        if m < 2 {
            continue;
        }
        let w = 1.0 / (m - 1) as f64;
        for (i, &c) in values.iter().enumerate() {
            for (j, &k) in values.iter().enumerate() {
                if i != j {
                    *o.entry((c, k)).or_insert(0.0) += w;
                }
            }
        }
    }
    let mut marginals: BTreeMap<u8, f64> = BTreeMap::new();
    for (&(c, _), &v) in &o {
        *marginals.entry(c).or_insert(0.0) += v;
    }
    let n: f64 = marginals.values().sum();
    if n < 2.0 {
        return Err(Error::NoPairableValues);
    }
    let observed: f64 = o.iter().filter(|((c, k), _)| c != k).map(|(_, v)| v).sum::<f64>() / n;
    let mut expected = 0.0;
    for (&c, &nc) in &marginals {
        for (&k, &nk) in &marginals {
            if c != k {
                expected += nc * nk;
            }
        }
    }
    expected /= n * (n - 1.0);
    if expected == 0.0 {
        return Ok(1.0);
    }
    Ok(1.0 - observed / expected)
}
