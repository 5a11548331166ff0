//! Dense numeric CSV: one row per example, one column per feature plus a
//! label column (the last one unless told otherwise). Cells must be plain
//! finite numbers; categorical encoding happens outside this crate.

use crate::error::{Error, Result};
use crate::features::{FeatureVector, Label, LabeledExample};

use super::{infer_labels, Dataset, Provenance};

fn cell_err(row: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::CsvParse {
        row,
        col,
        msg: msg.into(),
    }
}

/// Parses a dense CSV. `label_column` is 0-based, defaulting to the last
/// column; `has_header` skips the first line. Row/column numbers in errors
/// are 1-based and count physical lines, header included.
pub fn parse_csv(text: &str, label_column: Option<usize>, has_header: bool) -> Result<Dataset> {
    let mut raw_labels: Vec<f64> = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut n_cols: Option<usize> = None;
    for (lineno, line) in text.lines().enumerate() {
        let physical = lineno + 1;
        if has_header && lineno == 0 {
            continue;
        }
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if let Some(expect) = n_cols {
            if cells.len() != expect {
                return Err(cell_err(
                    physical,
                    cells.len(),
                    format!("expected {expect} columns, found {}", cells.len()),
                ));
            }
        } else {
            if cells.len() < 2 {
                return Err(cell_err(
                    physical,
                    1,
                    "need at least one feature column and one label column",
                ));
            }
            n_cols = Some(cells.len());
        }
        let cols = n_cols.expect("set above");
        let label_col = label_column.unwrap_or(cols - 1);
        if label_col >= cols {
            return Err(Error::InvalidConfig(format!(
                "label column {label_col} out of range for {cols} columns"
            )));
        }
        let mut features = Vec::with_capacity(cols - 1);
        let mut label = 0.0;
        for (c, cell) in cells.iter().enumerate() {
            let v: f64 = cell
                .trim()
                .parse()
                .map_err(|_| cell_err(physical, c + 1, format!("bad number '{cell}'")))?;
            if !v.is_finite() {
                return Err(cell_err(physical, c + 1, format!("non-finite value '{cell}'")));
            }
            if c == label_col {
                label = v;
            } else {
                features.push(v);
            }
        }
        raw_labels.push(label);
        rows.push(features);
    }
    let dim = rows.first().map(|r| r.len()).unwrap_or(0);
    let (kind, classes, labels) = infer_labels(&raw_labels);
    let examples = rows
        .into_iter()
        .zip(labels)
        .map(|(row, y)| {
            Ok(LabeledExample {
                x: FeatureVector::from_dense(&row)?,
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

/// Writes a dense CSV with header f1,...,fd,y. Values print in shortest
/// exact form, so parse(write(d)) reproduces d bit for bit.
pub fn write_csv(data: &Dataset) -> String {
    let mut out = String::new();
    for j in 0..data.dim {
        out.push_str(&format!("f{},", j + 1));
    }
    out.push_str("y\n");
    for ex in &data.examples {
        for v in ex.x.to_dense() {
            out.push_str(&format!("{v},"));
        }
        out.push_str(&label_text(&ex.y));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::LabelKind;

    #[test]
    fn parses_the_documented_example() {
        let data = parse_csv("f1,f2,y\n1,0,1\n", None, true).unwrap();
        assert_eq!(data.dim, 2);
        assert_eq!(data.examples[0].x.entries(), &[(0, 1.0)]);
        assert_eq!(data.examples[0].y, Label::Binary(1));
    }

    #[test]
    fn rejects_non_numeric_and_non_finite_cells() {
        match parse_csv("1,abc,1\n", None, false) {
            Err(Error::CsvParse { row: 1, col: 2, .. }) => {}
            other => panic!("expected row 1 col 2 error, got {other:?}"),
        }
        match parse_csv("f1,y\n1,1\nNaN,1\n", None, true) {
            Err(Error::CsvParse { row: 3, col: 1, .. }) => {}
            other => panic!("expected row 3 col 1 error, got {other:?}"),
        }
    }

    #[test]
    fn all_zero_rows_become_empty_vectors() {
        let data = parse_csv("0,0,0,1\n", None, false).unwrap();
        assert_eq!(data.examples[0].x.nnz(), 0);
        assert_eq!(data.dim, 3);
    }

    #[test]
    fn label_column_can_be_moved() {
        let data = parse_csv("5,1.5,2.5\n", Some(0), false).unwrap();
        assert_eq!(data.examples[0].y, Label::Class(5));
        assert_eq!(data.examples[0].x.to_dense(), vec![1.5, 2.5]);
    }

    #[test]
    fn ragged_rows_are_an_error() {
        assert!(matches!(
            parse_csv("1,2,1\n1,1\n", None, false),
            Err(Error::CsvParse { row: 2, .. })
        ));
    }

    #[test]
    fn write_then_parse_is_identity() {
        let text = "f1,f2,f3,y\n0.1,0,-3.25,1\n1e-12,7,0,-1\n";
        let data = parse_csv(text, None, true).unwrap();
        assert_eq!(data.label_kind, LabelKind::Binary);
        let emitted = write_csv(&data);
        assert!(emitted.starts_with("f1,f2,f3,y\n"));
        let back = parse_csv(&emitted, None, true).unwrap();
        assert!(data.same_content(&back));
        assert_eq!(
            back.examples[1].x.get(0).to_bits(),
            1e-12f64.to_bits()
        );
    }

    #[test]
    fn crlf_line_endings_are_tolerated() {
        let data = parse_csv("f1,y\r\n2,1\r\n", None, true).unwrap();
        assert_eq!(data.examples[0].x.get(0), 2.0);
    }
}
