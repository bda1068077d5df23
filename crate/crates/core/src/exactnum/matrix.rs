use std::collections::{HashMap, HashSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Rational;
use crate::error::{Error, Result};

/// Dense row-major matrix of exact rationals with opaque row and column
/// labels. Labels are unique per axis.
#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: Vec<String>,
    cols: Vec<String>,
    entries: Vec<Rational>,
}

fn check_unique(labels: &[String], axis: &'static str) -> Result<()> {
    let mut seen = HashSet::with_capacity(labels.len());
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(Error::DuplicateLabel {
                axis,
                label: l.clone(),
            });
        }
    }
    Ok(())
}

/// Default labels `"0"`, `"1"`, ... for matrices built without names.
pub fn index_labels(len: usize) -> Vec<String> {
    (0..len).map(|i| i.to_string()).collect()
}

impl RatMatrix {
    pub fn new(rows: Vec<String>, cols: Vec<String>, entries: Vec<Rational>) -> Result<Self> {
        if entries.len() != rows.len() * cols.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {}x{} matrix",
                entries.len(),
                rows.len(),
                cols.len()
            )));
        }
        check_unique(&rows, "rows")?;
        check_unique(&cols, "cols")?;
        Ok(RatMatrix {
            rows,
            cols,
            entries,
        })
    }

    /// Builds from a grid of rows; every row must have `cols.len()` entries.
    pub fn from_rows(rows: Vec<String>, cols: Vec<String>, grid: Vec<Vec<Rational>>) -> Result<Self> {
        if grid.len() != rows.len() || grid.iter().any(|r| r.len() != cols.len()) {
            return Err(Error::DimensionMismatch(format!(
                "grid shape does not match {}x{} labels",
                rows.len(),
                cols.len()
            )));
        }
        Self::new(rows, cols, grid.into_iter().flatten().collect())
    }

    /// Unlabeled matrix from small integer or fraction entries, for tests
    /// and examples. Rows get labels `"0".."m-1"`, columns likewise.
    pub fn from_grid(grid: Vec<Vec<Rational>>) -> Result<Self> {
        let m = grid.len();
        let n = grid.first().map_or(0, |r| r.len());
        Self::from_rows(index_labels(m), index_labels(n), grid)
    }

    pub fn from_fn<F>(rows: Vec<String>, cols: Vec<String>, f: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> Rational + Sync,
    {
        let ncols = cols.len();
        let entries: Vec<Rational> = (0..rows.len() * ncols)
            .into_par_iter()
            .map(|idx| f(idx / ncols, idx % ncols))
            .collect();
        Self::new(rows, cols, entries)
    }

    pub fn zeros(rows: Vec<String>, cols: Vec<String>) -> Result<Self> {
        let len = rows.len() * cols.len();
        Self::new(rows, cols, vec![Rational::zero(); len])
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(index_labels(n), index_labels(n), |i, j| {
            if i == j {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .expect("index labels are unique")
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn row_labels(&self) -> &[String] {
        &self.rows
    }

    pub fn col_labels(&self) -> &[String] {
        &self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.entries[r * self.cols.len() + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: Rational) {
        let nc = self.cols.len();
        self.entries[r * nc + c] = value;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        let nc = self.cols.len();
        &self.entries[r * nc..(r + 1) * nc]
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn row_index(&self, label: &str) -> Option<usize> {
        self.rows.iter().position(|l| l == label)
    }

    pub fn col_index(&self, label: &str) -> Option<usize> {
        self.cols.iter().position(|l| l == label)
    }

    pub fn row_lookup(&self) -> HashMap<&str, usize> {
        self.rows.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect()
    }

    pub fn col_lookup(&self) -> HashMap<&str, usize> {
        self.cols.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect()
    }

    pub fn get_by_label(&self, row: &str, col: &str) -> Result<&Rational> {
        let r = self
            .row_index(row)
            .ok_or_else(|| Error::UnknownLabel(row.to_string()))?;
        let c = self
            .col_index(col)
            .ok_or_else(|| Error::UnknownLabel(col.to_string()))?;
        Ok(self.get(r, c))
    }

    /// First negative entry, scanning row-major.
    pub fn first_negative(&self) -> Option<(usize, usize)> {
        let nc = self.cols.len();
        self.entries
            .iter()
            .position(|e| e.is_negative())
            .map(|idx| (idx / nc, idx % nc))
    }

    pub fn ensure_nonnegative(&self) -> Result<()> {
        match self.first_negative() {
            None => Ok(()),
            Some((r, c)) => Err(Error::NegativeEntry {
                row: self.rows[r].clone(),
                col: self.cols[c].clone(),
                value: self.get(r, c).to_string(),
            }),
        }
    }

    pub fn transpose(&self) -> RatMatrix {
        RatMatrix::from_fn(self.cols.clone(), self.rows.clone(), |i, j| self.get(j, i).clone())
            .expect("labels already unique")
    }

    /// Keeps the listed columns, in the given order.
    pub fn select_cols(&self, keep: &[usize]) -> Result<RatMatrix> {
        let cols = keep.iter().map(|&c| self.cols[c].clone()).collect();
        RatMatrix::from_fn(self.rows.clone(), cols, |i, j| self.get(i, keep[j]).clone())
    }

    pub fn select_rows(&self, keep: &[usize]) -> Result<RatMatrix> {
        let rows = keep.iter().map(|&r| self.rows[r].clone()).collect();
        RatMatrix::from_fn(rows, self.cols.clone(), |i, j| self.get(keep[i], j).clone())
    }

    pub fn scale(&self, factor: &Rational) -> RatMatrix {
        RatMatrix {
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            entries: self.entries.iter().map(|e| e * factor).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&MatrixJson::from(self)).expect("matrix serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: MatrixJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        raw.try_into()
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMatrix {}x{}", self.nrows(), self.ncols())?;
        for r in 0..self.nrows() {
            let cells: Vec<String> = self.row(r).iter().map(|e| e.to_string()).collect();
            writeln!(f, "  {:>12} [{}]", self.rows[r], cells.join(", "))?;
        }
        Ok(())
    }
}

/// On-disk form: `{"rows":[...],"cols":[...],"entries":[["p/q",...],...]}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixJson {
    rows: Vec<String>,
    cols: Vec<String>,
    entries: Vec<Vec<Rational>>,
}

impl From<&RatMatrix> for MatrixJson {
    fn from(m: &RatMatrix) -> Self {
        MatrixJson {
            rows: m.rows.clone(),
            cols: m.cols.clone(),
            entries: (0..m.nrows()).map(|r| m.row(r).to_vec()).collect(),
        }
    }
}

impl TryFrom<MatrixJson> for RatMatrix {
    type Error = Error;
    fn try_from(raw: MatrixJson) -> Result<Self> {
        RatMatrix::from_rows(raw.rows, raw.cols, raw.entries)
    }
}

/// Product `A·B` with row labels of `A` and column labels of `B`.
pub fn mat_mul(a: &RatMatrix, b: &RatMatrix) -> Result<RatMatrix> {
    if a.ncols() != b.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "inner dimensions {} and {} differ",
            a.ncols(),
            b.nrows()
        )));
    }
    let support = row_supports(a);
    RatMatrix::from_fn(a.rows.clone(), b.cols.clone(), |i, j| {
        support[i].iter().map(|&k| a.get(i, k) * b.get(k, j)).sum()
    })
}

fn row_supports(a: &RatMatrix) -> Vec<Vec<usize>> {
    (0..a.nrows())
        .map(|i| (0..a.ncols()).filter(|&k| !a.get(i, k).is_zero()).collect())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatMulCheck {
    Equal,
    FirstMismatch {
        row: usize,
        col: usize,
        row_label: String,
        col_label: String,
        got: Rational,
        want: Rational,
    },
}

impl MatMulCheck {
    pub fn is_equal(&self) -> bool {
        matches!(self, MatMulCheck::Equal)
    }
}

impl fmt::Display for MatMulCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatMulCheck::Equal => write!(f, "equal"),
            MatMulCheck::FirstMismatch {
                row_label,
                col_label,
                got,
                want,
                ..
            } => write!(
                f,
                "mismatch at ({row_label}, {col_label}): product {got}, expected {want}"
            ),
        }
    }
}

/// Checks `A·B = S` exactly, cell by cell, and reports the first mismatching
/// cell in row-major order.
///
/// Row labels of `A` must equal those of `S` and column labels of `B` those
/// of `S`; only the inner dimension is compared by size.
pub fn mat_mul_eq(a: &RatMatrix, b: &RatMatrix, s: &RatMatrix) -> Result<MatMulCheck> {
    if a.ncols() != b.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "inner dimensions {} and {} differ",
            a.ncols(),
            b.nrows()
        )));
    }
    if a.nrows() != s.nrows() || b.ncols() != s.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "product is {}x{} but target is {}x{}",
            a.nrows(),
            b.ncols(),
            s.nrows(),
            s.ncols()
        )));
    }
    if a.rows != s.rows {
        return Err(Error::LabelMismatch("row labels of A differ from S".into()));
    }
    if b.cols != s.cols {
        return Err(Error::LabelMismatch("column labels of B differ from S".into()));
    }
    let support = row_supports(a);
    let first = (0..a.nrows()).into_par_iter().find_map_first(|i| {
        (0..b.ncols()).find_map(|j| {
            let got: Rational = support[i].iter().map(|&k| a.get(i, k) * b.get(k, j)).sum();
            (got != *s.get(i, j)).then_some((i, j, got))
        })
    });
    Ok(match first {
        None => MatMulCheck::Equal,
        Some((i, j, got)) => MatMulCheck::FirstMismatch {
            row: i,
            col: j,
            row_label: a.rows[i].clone(),
            col_label: b.cols[j].clone(),
            got,
            want: s.get(i, j).clone(),
        },
    })
}
