//! Integer protograph base matrices.
//!
//! A base matrix is the adjacency matrix of a protograph: entry `(c, v)`
//! counts the parallel edges between check type `c` and variable type `v`.
//! Every variable column additionally carries a puncture flag; punctured
//! variables are never transmitted and see channel erasure probability 1.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Dense integer base matrix with a per-column puncture mask.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BaseMatrixRepr", into = "BaseMatrixRepr")]
pub struct BaseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<u32>,
    punctured: Vec<bool>,
}

/// JSON exchange shape: `{rows, cols, punctured: [...], entries: [[...]]}`.
#[derive(Serialize, Deserialize)]
struct BaseMatrixRepr {
    rows: usize,
    cols: usize,
    punctured: Vec<bool>,
    entries: Vec<Vec<u32>>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("missing {0} in matrix text")]
    Missing(&'static str),
    #[error("invalid integer field: {0}")]
    BadInt(String),
    #[error("row {row} has {got} entries, expected {want}")]
    RowLength { row: usize, got: usize, want: usize },
    #[error("puncture mask has {got} entries, expected {want}")]
    MaskLength { got: usize, want: usize },
}

impl TryFrom<BaseMatrixRepr> for BaseMatrix {
    type Error = FormatError;

    fn try_from(repr: BaseMatrixRepr) -> Result<Self, FormatError> {
        if repr.punctured.len() != repr.cols {
            return Err(FormatError::MaskLength { got: repr.punctured.len(), want: repr.cols });
        }
        let mut entries = Vec::with_capacity(repr.rows * repr.cols);
        for (i, row) in repr.entries.iter().enumerate() {
            if row.len() != repr.cols {
                return Err(FormatError::RowLength { row: i, got: row.len(), want: repr.cols });
            }
            entries.extend_from_slice(row);
        }
        if entries.len() != repr.rows * repr.cols {
            return Err(FormatError::RowLength {
                row: repr.entries.len(),
                got: 0,
                want: repr.cols,
            });
        }
        Ok(BaseMatrix { rows: repr.rows, cols: repr.cols, entries, punctured: repr.punctured })
    }
}

impl From<BaseMatrix> for BaseMatrixRepr {
    fn from(m: BaseMatrix) -> Self {
        let entries = (0..m.rows).map(|r| m.row(r).to_vec()).collect();
        BaseMatrixRepr { rows: m.rows, cols: m.cols, punctured: m.punctured, entries }
    }
}

impl BaseMatrix {
    /// All-zero matrix with nothing punctured.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BaseMatrix { rows, cols, entries: vec![0; rows * cols], punctured: vec![false; cols] }
    }

    pub fn from_rows(rows: Vec<Vec<u32>>) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == n_cols), "ragged rows");
        let entries = rows.into_iter().flatten().collect();
        BaseMatrix { rows: n_rows, cols: n_cols, entries, punctured: vec![false; n_cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.entries[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: u32) {
        self.entries[row * self.cols + col] = value;
    }

    pub fn row(&self, row: usize) -> &[u32] {
        &self.entries[row * self.cols..(row + 1) * self.cols]
    }

    pub fn is_punctured(&self, col: usize) -> bool {
        self.punctured[col]
    }

    pub fn punctured(&self) -> &[bool] {
        &self.punctured
    }

    /// Marks columns `[0, n)` as punctured.
    pub fn puncture_prefix(&mut self, n: usize) {
        assert!(n <= self.cols);
        for flag in &mut self.punctured[..n] {
            *flag = true;
        }
    }

    pub fn punctured_count(&self) -> usize {
        self.punctured.iter().filter(|&&p| p).count()
    }

    pub fn transmitted_count(&self) -> usize {
        self.cols - self.punctured_count()
    }

    /// Number of edge slots at variable `col` (entries summed with multiplicity).
    pub fn col_weight(&self, col: usize) -> u32 {
        (0..self.rows).map(|r| self.get(r, col)).sum()
    }

    /// Number of edge slots at check `row`.
    pub fn row_weight(&self, row: usize) -> u32 {
        self.row(row).iter().sum()
    }

    /// Horizontal concatenation `[self | right]`; puncture flags carry over.
    pub fn hconcat(&self, right: &BaseMatrix) -> BaseMatrix {
        assert_eq!(self.rows, right.rows, "row counts must agree");
        let mut out = BaseMatrix::zeros(self.rows, self.cols + right.cols);
        for r in 0..self.rows {
            out.entries[r * out.cols..r * out.cols + self.cols].copy_from_slice(self.row(r));
            out.entries[r * out.cols + self.cols..(r + 1) * out.cols]
                .copy_from_slice(right.row(r));
        }
        out.punctured[..self.cols].copy_from_slice(&self.punctured);
        out.punctured[self.cols..].copy_from_slice(&right.punctured);
        out
    }

    /// Plain-text form: `rows cols`, the puncture mask as 0/1, then the rows.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.rows, self.cols);
        let mask: Vec<&str> = self.punctured.iter().map(|&p| if p { "1" } else { "0" }).collect();
        out.push_str(&mask.join(" "));
        out.push('\n');
        for r in 0..self.rows {
            let cells: Vec<String> = self.row(r).iter().map(u32::to_string).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, FormatError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or(FormatError::Missing("header line"))?;
        let mut fields = header.split_whitespace();
        let rows = parse_usize(fields.next().ok_or(FormatError::Missing("row count"))?)?;
        let cols = parse_usize(fields.next().ok_or(FormatError::Missing("column count"))?)?;
        let mask_line = lines.next().ok_or(FormatError::Missing("puncture mask"))?;
        let punctured: Vec<bool> = mask_line
            .split_whitespace()
            .map(|t| match t {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(FormatError::BadInt(other.to_string())),
            })
            .collect::<Result<_, _>>()?;
        if punctured.len() != cols {
            return Err(FormatError::MaskLength { got: punctured.len(), want: cols });
        }
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            let line = lines.next().ok_or(FormatError::Missing("matrix row"))?;
            let row: Vec<u32> = line
                .split_whitespace()
                .map(|t| t.parse::<u32>().map_err(|_| FormatError::BadInt(t.to_string())))
                .collect::<Result<_, _>>()?;
            if row.len() != cols {
                return Err(FormatError::RowLength { row: r, got: row.len(), want: cols });
            }
            entries.extend_from_slice(&row);
        }
        Ok(BaseMatrix { rows, cols, entries, punctured })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("base matrix serializes")
    }
}

fn parse_usize(token: &str) -> Result<usize, FormatError> {
    token.parse().map_err(|_| FormatError::BadInt(token.to_string()))
}

impl fmt::Display for BaseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}
