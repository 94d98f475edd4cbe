//! Block-sparse operators over cells and a banded direct solver.
//!
//! Every DG operator here couples a cell to itself and to at most one
//! neighbour per direction, so a row of blocks holds a handful of dense
//! `m x m` blocks (`m` modes per cell). With cells numbered `v`-fastest the
//! assembled system is banded, and LU without pivoting keeps all fill inside
//! the band.

use alloc::vec::Vec;

use crate::{Error, Result};

/// Square matrix stored as dense `m x m` blocks keyed by (row cell, column cell).
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSparse {
    cells: usize,
    block: usize,
    /// Per block row: column cell and row-major block, sorted by column.
    rows: Vec<Vec<(usize, Vec<f64>)>>,
}

impl BlockSparse {
    pub fn zeros(cells: usize, block: usize) -> Self {
        Self { cells, block, rows: (0..cells).map(|_| Vec::new()).collect() }
    }

    /// `scale * I`.
    pub fn scaled_identity(cells: usize, block: usize, scale: f64) -> Self {
        let mut out = Self::zeros(cells, block);
        let mut b = alloc::vec![0.0; block * block];
        for r in 0..block {
            b[r * block + r] = scale;
        }
        for c in 0..cells {
            out.rows[c].push((c, b.clone()));
        }
        out
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn block_size(&self) -> usize {
        self.block
    }

    pub fn dim(&self) -> usize {
        self.cells * self.block
    }

    /// Add `values` into block `(row, col)`.
    pub fn add_block(&mut self, row: usize, col: usize, values: &[f64]) {
        debug_assert_eq!(values.len(), self.block * self.block);
        let entries = &mut self.rows[row];
        match entries.binary_search_by_key(&col, |e| e.0) {
            Ok(pos) => {
                for (a, &b) in entries[pos].1.iter_mut().zip(values) {
                    *a += b;
                }
            }
            Err(pos) => entries.insert(pos, (col, values.to_vec())),
        }
    }

    pub fn block(&self, row: usize, col: usize) -> Option<&[f64]> {
        let entries = &self.rows[row];
        entries
            .binary_search_by_key(&col, |e| e.0)
            .ok()
            .map(|pos| entries[pos].1.as_slice())
    }

    pub fn row_blocks(&self, row: usize) -> impl Iterator<Item = (usize, &[f64])> {
        self.rows[row].iter().map(|(c, b)| (*c, b.as_slice()))
    }

    /// `y = A x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let m = self.block;
        let mut y = alloc::vec![0.0; self.dim()];
        for (r, entries) in self.rows.iter().enumerate() {
            let yr = &mut y[r * m..(r + 1) * m];
            for (c, b) in entries {
                let xc = &x[c * m..(c + 1) * m];
                for (row, yv) in yr.iter_mut().enumerate() {
                    *yv += b[row * m..(row + 1) * m]
                        .iter()
                        .zip(xc)
                        .map(|(a, x)| a * x)
                        .sum::<f64>();
                }
            }
        }
        y
    }

    /// `A B`.
    pub fn mul(&self, other: &BlockSparse) -> BlockSparse {
        assert_eq!(self.cells, other.cells);
        assert_eq!(self.block, other.block);
        let m = self.block;
        let mut out = BlockSparse::zeros(self.cells, m);
        let mut tmp = alloc::vec![0.0; m * m];
        for (r, entries) in self.rows.iter().enumerate() {
            for (mid, a) in entries {
                for (c, b) in &other.rows[*mid] {
                    tmp.iter_mut().for_each(|t| *t = 0.0);
                    for i in 0..m {
                        for l in 0..m {
                            let ail = a[i * m + l];
                            if ail == 0.0 {
                                continue;
                            }
                            for j in 0..m {
                                tmp[i * m + j] += ail * b[l * m + j];
                            }
                        }
                    }
                    out.add_block(r, *c, &tmp);
                }
            }
        }
        out
    }

    /// `self + scale * other`.
    pub fn add_scaled(&self, scale: f64, other: &BlockSparse) -> BlockSparse {
        let mut out = self.clone();
        let mut tmp = Vec::new();
        for (r, entries) in other.rows.iter().enumerate() {
            for (c, b) in entries {
                tmp.clear();
                tmp.extend(b.iter().map(|v| scale * v));
                out.add_block(r, *c, &tmp);
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> BlockSparse {
        let mut out = self.clone();
        for entries in &mut out.rows {
            for (_, b) in entries {
                b.iter_mut().for_each(|v| *v *= s);
            }
        }
        out
    }

    /// Dense row-major copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.dim();
        let m = self.block;
        let mut out = alloc::vec![0.0; n * n];
        for (r, entries) in self.rows.iter().enumerate() {
            for (c, b) in entries {
                for i in 0..m {
                    for j in 0..m {
                        out[(r * m + i) * n + c * m + j] = b[i * m + j];
                    }
                }
            }
        }
        out
    }

    /// Lower and upper scalar bandwidths of the stored pattern.
    pub fn bandwidths(&self) -> (usize, usize) {
        let m = self.block;
        let (mut lower, mut upper) = (0usize, 0usize);
        for (r, entries) in self.rows.iter().enumerate() {
            for (c, b) in entries {
                for i in 0..m {
                    for j in 0..m {
                        if b[i * m + j] == 0.0 {
                            continue;
                        }
                        let (row, col) = (r * m + i, c * m + j);
                        if row > col {
                            lower = lower.max(row - col);
                        } else {
                            upper = upper.max(col - row);
                        }
                    }
                }
            }
        }
        (lower, upper)
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.rows
            .iter()
            .flat_map(|e| e.iter())
            .flat_map(|(_, b)| b.iter())
            .fold(0.0, |acc, v| acc.max(libm::fabs(*v)))
    }
}

/// LU factors of a banded matrix, computed without pivoting.
///
/// Row `i` stores columns `i - lower ..= i + upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedLu {
    n: usize,
    lower: usize,
    upper: usize,
    data: Vec<f64>,
}

impl BandedLu {
    pub fn factor(matrix: &BlockSparse) -> Result<Self> {
        let (lower, upper) = matrix.bandwidths();
        let n = matrix.dim();
        let width = lower + upper + 1;
        let mut data = alloc::vec![0.0; n * width];
        let m = matrix.block_size();
        for r in 0..matrix.cells() {
            for (c, b) in matrix.row_blocks(r) {
                for i in 0..m {
                    for j in 0..m {
                        let v = b[i * m + j];
                        if v != 0.0 {
                            let (row, col) = (r * m + i, c * m + j);
                            data[row * width + col + lower - row] = v;
                        }
                    }
                }
            }
        }
        let tiny = matrix.max_abs() * f64::EPSILON * n as f64;
        let at = |row: usize, col: usize| row * width + col + lower - row;
        for k in 0..n {
            let pivot = data[at(k, k)];
            if !pivot.is_finite() || libm::fabs(pivot) <= tiny {
                return Err(Error::SingularPivot { index: k });
            }
            let row_end = (k + lower).min(n - 1);
            let col_end = (k + upper).min(n - 1);
            for i in k + 1..=row_end {
                let l = data[at(i, k)] / pivot;
                if l == 0.0 {
                    continue;
                }
                data[at(i, k)] = l;
                for j in k + 1..=col_end {
                    let u = data[at(k, j)];
                    data[at(i, j)] -= l * u;
                }
            }
        }
        Ok(Self { n, lower, upper, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solve `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) -> Result<()> {
        if b.len() != self.n {
            return Err(Error::ShapeMismatch { expected: self.n, found: b.len() });
        }
        let width = self.lower + self.upper + 1;
        let at = |row: usize, col: usize| row * width + col + self.lower - row;
        for i in 0..self.n {
            let start = i.saturating_sub(self.lower);
            let mut s = b[i];
            for j in start..i {
                s -= self.data[at(i, j)] * b[j];
            }
            b[i] = s;
        }
        for i in (0..self.n).rev() {
            let end = (i + self.upper).min(self.n - 1);
            let mut s = b[i];
            for j in i + 1..=end {
                s -= self.data[at(i, j)] * b[j];
            }
            b[i] = s / self.data[at(i, i)];
        }
        Ok(())
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x)?;
        Ok(x)
    }
}
