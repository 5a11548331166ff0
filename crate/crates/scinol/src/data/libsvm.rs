//! Sparse "label idx:val idx:val" text format with 1-based ascending
//! indices per line. Explicit zero values are kept verbatim so a parsed
//! file round-trips exactly.

use crate::error::{Error, Result};
use crate::features::{FeatureVector, Label, LabeledExample};

use super::{infer_labels, Dataset, Provenance};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::LibsvmParse {
        line,
        msg: msg.into(),
    }
}

/// Parses the whole stream; empty lines are skipped, indices are converted
/// to 0-based, and the ambient dimension is the largest index seen.
pub fn parse_libsvm(text: &str) -> Result<Dataset> {
    let mut rows: Vec<(f64, Vec<(usize, f64)>)> = Vec::new();
    let mut dim = 0usize;
    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let label_tok = tokens.next().expect("nonempty line has a first token");
        let label: f64 = label_tok
            .parse()
            .map_err(|_| parse_err(lineno, format!("bad label '{label_tok}'")))?;
        if !label.is_finite() {
            return Err(parse_err(lineno, format!("non-finite label '{label_tok}'")));
        }
        let mut entries: Vec<(usize, f64)> = Vec::new();
        for tok in tokens {
            let (idx_str, val_str) = tok
                .split_once(':')
                .ok_or_else(|| parse_err(lineno, format!("expected idx:val, got '{tok}'")))?;
            let idx: usize = idx_str
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad index '{idx_str}'")))?;
            if idx == 0 {
                return Err(parse_err(lineno, "indices are 1-based; found 0"));
            }
            let val: f64 = val_str
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad value '{val_str}'")))?;
            if !val.is_finite() {
                return Err(parse_err(lineno, format!("non-finite value '{val_str}'")));
            }
            let zero_based = idx - 1;
            if let Some(&(prev, _)) = entries.last() {
                if zero_based <= prev {
                    return Err(parse_err(
                        lineno,
                        format!("indices must be strictly ascending, {} after {}", idx, prev + 1),
                    ));
                }
            }
            entries.push((zero_based, val));
            dim = dim.max(idx);
        }
        rows.push((label, entries));
    }
    let raw_labels: Vec<f64> = rows.iter().map(|&(y, _)| y).collect();
    let (kind, classes, labels) = infer_labels(&raw_labels);
    let examples = rows
        .into_iter()
        .zip(labels)
        .map(|((_, entries), y)| {
            Ok(LabeledExample {
                x: FeatureVector::new(dim, entries)?,
                y,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(examples, dim, kind, classes, Provenance::Memory)
}

fn label_text(y: &Label) -> String {
    match y {
        Label::Binary(s) => s.to_string(),
        Label::Class(c) => c.to_string(),
        Label::Real(v) => v.to_string(),
    }
}

/// Serializes with 1-based indices; f64 values print in shortest form that
/// parses back to the identical bits.
pub fn write_libsvm(data: &Dataset) -> String {
    let mut out = String::new();
    for ex in &data.examples {
        out.push_str(&label_text(&ex.y));
        for &(i, v) in ex.x.entries() {
            out.push_str(&format!(" {}:{}", i + 1, v));
        }
        out.push('\n');
    }
    out
}
