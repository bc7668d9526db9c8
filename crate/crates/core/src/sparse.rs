//! Exact sparse integer matrices.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// Row-major sparse matrix of arbitrary-precision integers. Each row keeps its
/// nonzero entries sorted by column; zeros are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct SparseIntMatrix {
    cols: usize,
    rows: Vec<Vec<(usize, BigInt)>>,
}

impl SparseIntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            cols,
            rows: vec![Vec::new(); rows],
        }
    }

    /// Builds a matrix from `(row, col, value)` triplets. Duplicate positions
    /// are summed and zero results dropped.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, BigInt)>,
    ) -> Result<Self> {
        let mut buckets: Vec<Vec<(usize, BigInt)>> = vec![Vec::new(); rows];
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(Error::ShapeMismatch(format!(
                    "entry ({r},{c}) outside {rows}x{cols}"
                )));
            }
            buckets[r].push((c, v));
        }
        let rows = buckets.into_iter().map(normalize_row).collect();
        Ok(Self { cols, rows })
    }

    pub fn from_dense<T: Into<BigInt> + Copy>(data: &[Vec<T>]) -> Result<Self> {
        let cols = data.first().map_or(0, Vec::len);
        let mut triplets = Vec::new();
        for (r, row) in data.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::ShapeMismatch(format!(
                    "row {r} has {} columns, expected {cols}",
                    row.len()
                )));
            }
            for (c, &v) in row.iter().enumerate() {
                triplets.push((r, c, v.into()));
            }
        }
        Self::from_triplets(data.len(), cols, triplets)
    }

    /// Builds a matrix from already sparse rows (unsorted, possibly with zeros).
    pub fn from_rows(cols: usize, rows: Vec<Vec<(usize, BigInt)>>) -> Result<Self> {
        for row in &rows {
            if let Some((c, _)) = row.iter().find(|(c, _)| *c >= cols) {
                return Err(Error::ShapeMismatch(format!("column {c} outside width {cols}")));
            }
        }
        Ok(Self {
            cols,
            rows: rows.into_iter().map(normalize_row).collect(),
        })
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nrows(), self.cols)
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn row(&self, r: usize) -> &[(usize, BigInt)] {
        &self.rows[r]
    }

    pub fn row_vecs(&self) -> &[Vec<(usize, BigInt)>] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<Vec<(usize, BigInt)>> {
        self.rows
    }

    pub fn get(&self, r: usize, c: usize) -> BigInt {
        self.rows[r]
            .binary_search_by_key(&c, |(col, _)| *col)
            .map(|i| self.rows[r][i].1.clone())
            .unwrap_or_default()
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &BigInt)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |(c, v)| (r, *c, v)))
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(Vec::is_empty)
    }

    pub fn transpose(&self) -> Self {
        let mut rows: Vec<Vec<(usize, BigInt)>> = vec![Vec::new(); self.cols];
        for (r, row) in self.rows.iter().enumerate() {
            for (c, v) in row {
                rows[*c].push((r, v.clone()));
            }
        }
        // rows were visited in increasing order, so each new row is already sorted
        Self {
            cols: self.rows.len(),
            rows,
        }
    }

    pub fn select_rows(&self, which: &[usize]) -> Self {
        Self {
            cols: self.cols,
            rows: which.iter().map(|&r| self.rows[r].clone()).collect(),
        }
    }

    /// Keeps only the listed columns, renumbered in the given order.
    pub fn select_cols(&self, which: &[usize]) -> Self {
        let mut map = vec![None; self.cols];
        for (new, &old) in which.iter().enumerate() {
            map[old] = Some(new);
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut out: Vec<(usize, BigInt)> = row
                    .iter()
                    .filter_map(|(c, v)| map[*c].map(|n| (n, v.clone())))
                    .collect();
                out.sort_by_key(|(c, _)| *c);
                out
            })
            .collect();
        Self {
            cols: which.len(),
            rows,
        }
    }

    /// Appends the rows of `other` below `self`.
    pub fn vstack(mut self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::ShapeMismatch(format!(
                "cannot stack width {} under width {}",
                other.cols, self.cols
            )));
        }
        self.rows.extend(other.rows.iter().cloned());
        Ok(self)
    }

    pub fn push_row(&mut self, row: Vec<(usize, BigInt)>) -> Result<()> {
        if row.iter().any(|(c, _)| *c >= self.cols) {
            return Err(Error::ShapeMismatch("row entry outside matrix width".into()));
        }
        self.rows.push(normalize_row(row));
        Ok(())
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        self.rows
            .iter()
            .map(|row| {
                let mut d = vec![BigInt::zero(); self.cols];
                for (c, v) in row {
                    d[*c] = v.clone();
                }
                d
            })
            .collect()
    }

    /// `M·x`.
    pub fn mul_vec(&self, x: &[BigInt]) -> Result<Vec<BigInt>> {
        if x.len() != self.cols {
            return Err(Error::ShapeMismatch(format!(
                "vector of length {} against width {}",
                x.len(),
                self.cols
            )));
        }
        Ok(self
            .rows
            .iter()
            .map(|row| row.iter().map(|(c, v)| v * &x[*c]).sum())
            .collect())
    }

    /// Row vector times matrix, `yᵀ·M`.
    pub fn vec_mul(&self, y: &[BigInt]) -> Result<Vec<BigInt>> {
        if y.len() != self.rows.len() {
            return Err(Error::ShapeMismatch(format!(
                "vector of length {} against height {}",
                y.len(),
                self.rows.len()
            )));
        }
        let mut out = vec![BigInt::zero(); self.cols];
        for (row, yr) in self.rows.iter().zip(y) {
            if yr.is_zero() {
                continue;
            }
            for (c, v) in row {
                out[*c] += v * yr;
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.nrows() {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} times {}x{}",
                self.nrows(),
                self.cols,
                other.nrows(),
                other.cols
            )));
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut acc: Vec<(usize, BigInt)> = Vec::new();
                for (k, a) in row {
                    for (c, b) in &other.rows[*k] {
                        acc.push((*c, a * b));
                    }
                }
                normalize_row(acc)
            })
            .collect();
        Ok(Self {
            cols: other.cols,
            rows,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch("subtracting matrices of different shapes".into()));
        }
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| {
                let mut acc = a.clone();
                acc.extend(b.iter().map(|(c, v)| (*c, -v)));
                normalize_row(acc)
            })
            .collect();
        Ok(Self {
            cols: self.cols,
            rows,
        })
    }

    pub fn neg(&self) -> Self {
        Self {
            cols: self.cols,
            rows: self
                .rows
                .iter()
                .map(|row| row.iter().map(|(c, v)| (*c, -v)).collect())
                .collect(),
        }
    }

    /// Largest absolute entry, zero for the empty matrix.
    pub fn max_abs(&self) -> BigInt {
        self.triplets().map(|(_, _, v)| v.abs()).max().unwrap_or_default()
    }
}

fn normalize_row(mut row: Vec<(usize, BigInt)>) -> Vec<(usize, BigInt)> {
    row.sort_by_key(|(c, _)| *c);
    let mut out: Vec<(usize, BigInt)> = Vec::with_capacity(row.len());
    for (c, v) in row {
        match out.last_mut() {
            Some((lc, lv)) if *lc == c => *lv += v,
            _ => out.push((c, v)),
        }
    }
    out.retain(|(_, v)| !v.is_zero());
    out
}

impl fmt::Debug for SparseIntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SparseIntMatrix {}x{} ({} nnz)", self.nrows(), self.cols, self.nnz())?;
        if self.nrows() <= 16 && self.cols <= 16 {
            for row in self.to_dense() {
                let cells: Vec<String> = row.iter().map(|v| format!("{v:>3}")).collect();
                writeln!(f, "  [{}]", cells.join(" "))?;
            }
        }
        Ok(())
    }
}
