//! `soft_labels.tsv`: `id<TAB>probability` per line, no header.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use codemix_core::features::SoftLabels;

use crate::error::{Error, Result};

pub fn parse_soft_labels(text: &str, path: &Path) -> Result<SoftLabels> {
    let bad = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut rows = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let (id, p) = line
            .split_once('\t')
            .ok_or_else(|| bad(n, "expected `id<TAB>probability`".into()))?;
        let p: f64 = p
            .trim()
            .parse()
            .map_err(|_| bad(n, format!("`{p}` is not a number")))?;
        if !(0.0..=1.0).contains(&p) {
            return Err(bad(n, format!("probability {p} out of range [0, 1]")));
        }
        if rows.insert(id.to_string(), p).is_some() {
            return Err(bad(n, format!("duplicate id `{id}`")));
        }
    }
    SoftLabels::new(rows).map_err(Error::core("features"))
}

pub fn load_soft_labels(path: &Path) -> Result<SoftLabels> {
    let text = fs::read_to_string(path).map_err(Error::io(path))?;
    parse_soft_labels(&text, path)
}

/// Rows in the given order, probabilities to six decimals.
pub fn format_soft_labels<'a>(rows: impl IntoIterator<Item = (&'a str, f64)>) -> String {
    let mut out = String::new();
    for (id, p) in rows {
        writeln!(out, "{id}\t{p:.6}").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_and_errors() {
        let p = Path::new("s.tsv");
        let s = parse_soft_labels("a\t0.250000\nb\t1\n", p).unwrap();
        assert_eq!(s.get("a"), Some(0.25));
        assert!(matches!(
            parse_soft_labels("a\t0.5\nb\t1.5\n", p),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_soft_labels("a\t0.5\na\t0.1\n", p),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(parse_soft_labels("a 0.5\n", p).is_err());
        assert_eq!(format_soft_labels([("x", 0.5), ("y", 1.0 / 3.0)]), "x\t0.500000\ny\t0.333333\n");
    }
}
