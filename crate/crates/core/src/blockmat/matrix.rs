use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// Sparse exact integer matrix.
///
/// Only nonzero entries are stored. Indices are zero-based in the API; the
/// serialized formats and the command line use one-based indices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::from(1));
        }
        m
    }

    /// Builds a matrix from dense rows. All rows must have the same length.
    pub fn from_rows<T>(rows: &[Vec<T>]) -> Result<Self>
    where
        T: Clone + Into<BigInt>,
    {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = IntMatrix::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {} has {} entries, expected {}",
                    i + 1,
                    row.len(),
                    cols
                )));
            }
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, v.clone().into());
            }
        }
        Ok(m)
    }

    /// Builds a matrix from coordinate triples. Later duplicates overwrite
    /// earlier ones.
    pub fn from_entries<I>(rows: usize, cols: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, BigInt)>,
    {
        let mut m = IntMatrix::zeros(rows, cols);
        for (i, j, v) in entries {
            if i >= rows || j >= cols {
                return Err(Error::DimensionMismatch(format!(
                    "entry ({}, {}) outside a {}x{} matrix",
                    i + 1,
                    j + 1,
                    rows,
                    cols
                )));
            }
            m.set(i, j, v);
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, row: usize, col: usize) -> Option<&BigInt> {
        self.entries.get(&(row, col))
    }

    pub fn get(&self, row: usize, col: usize) -> BigInt {
        self.entry(row, col).cloned().unwrap_or_default()
    }

    /// Sets an entry; zero values remove the entry.
    ///
    /// Panics if the position is outside the matrix.
    pub fn set(&mut self, row: usize, col: usize, value: BigInt) {
        assert!(
            row < self.rows && col < self.cols,
            "index ({row}, {col}) out of bounds for {}x{} matrix",
            self.rows,
            self.cols
        );
        if value.is_zero() {
            self.entries.remove(&(row, col));
        } else {
            self.entries.insert((row, col), value);
        }
    }

    /// Nonzero entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &BigInt)> {
        self.entries.iter().map(|(&(i, j), v)| (i, j, v))
    }

    pub fn transpose(&self) -> IntMatrix {
        IntMatrix {
            rows: self.cols,
            cols: self.rows,
            entries: self
                .entries
                .iter()
                .map(|(&(i, j), v)| ((j, i), v.clone()))
                .collect(),
        }
    }

    /// Largest absolute entry, zero for an empty matrix.
    pub fn max_norm(&self) -> BigInt {
        self.entries
            .values()
            .map(|v| v.abs())
            .max()
            .unwrap_or_default()
    }

    pub fn mul_vec(&self, x: &[BigInt]) -> Result<Vec<BigInt>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for a matrix with {} columns",
                x.len(),
                self.cols
            )));
        }
        let mut out = vec![BigInt::zero(); self.rows];
        for (&(i, j), v) in &self.entries {
            out[i] += v * &x[j];
        }
        Ok(out)
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut dense = vec![vec![BigInt::zero(); self.cols]; self.rows];
        for (&(i, j), v) in &self.entries {
            dense[i][j] = v.clone();
        }
        dense
    }

    /// For every column, the sorted list of rows holding a nonzero entry.
    pub fn column_supports(&self) -> Vec<Vec<usize>> {
        let mut support = vec![Vec::new(); self.cols];
        for &(i, j) in self.entries.keys() {
            support[j].push(i);
        }
        for rows in &mut support {
            rows.sort_unstable();
        }
        support
    }

    /// Nonzero entries grouped by row, each row ordered by column.
    pub fn row_entries(&self) -> Vec<Vec<(usize, BigInt)>> {
        let mut rows = vec![Vec::new(); self.rows];
        for (&(i, j), v) in &self.entries {
            rows[i].push((j, v.clone()));
        }
        rows
    }

    /// Copies `block` into this matrix with its top-left corner at
    /// `(row, col)`.
    pub fn place(&mut self, row: usize, col: usize, block: &IntMatrix) {
        assert!(
            row + block.rows <= self.rows && col + block.cols <= self.cols,
            "block does not fit"
        );
        for (i, j, v) in block.iter() {
            self.set(row + i, col + j, v.clone());
        }
    }

    /// Rows `rows` and columns `cols` of this matrix as a new matrix.
    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        let mut m = IntMatrix::zeros(rows.len(), cols.len());
        for (&(i, j), v) in self.entries.range((rows.start, 0)..(rows.end, 0)) {
            if cols.contains(&j) {
                m.set(i - rows.start, j - cols.start, v.clone());
            }
        }
        m
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dense = self.to_dense();
        let width = dense
            .iter()
            .flatten()
            .map(|v| v.to_string().len())
            .max()
            .unwrap_or(1);
        for row in dense {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:>width$}")).collect();
            writeln!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

/// Band patterns recognised by [`band_check`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Band {
    /// Nonzeros of column `j` only in rows `j` and `j + 1`.
    Bi,
    /// Nonzeros of column `j` only in rows `j`, `j + 1` and `j + 2`.
    Tri,
}

impl Band {
    pub fn name(self) -> &'static str {
        match self {
            Band::Bi => "bi",
            Band::Tri => "tri",
        }
    }

    fn width(self) -> usize {
        match self {
            Band::Bi => 1,
            Band::Tri => 2,
        }
    }

    /// Whether a nonzero at `(row, col)` is allowed by the band.
    pub fn admits(self, row: usize, col: usize) -> bool {
        row >= col && row - col <= self.width()
    }
}

/// First entry violating the band, if any.
pub fn band_violation(a: &IntMatrix, band: Band) -> Option<(usize, usize)> {
    a.iter()
        .map(|(i, j, _)| (i, j))
        .find(|&(i, j)| !band.admits(i, j))
}

pub fn band_check(a: &IntMatrix, band: Band) -> bool {
    band_violation(a, band).is_none()
}

/// Surrounds `a` with zero rows and columns.
pub fn pad_zero(a: &IntMatrix, top: usize, bottom: usize, left: usize, right: usize) -> IntMatrix {
    let mut out = IntMatrix::zeros(a.rows() + top + bottom, a.cols() + left + right);
    out.place(top, left, a);
    out
}
