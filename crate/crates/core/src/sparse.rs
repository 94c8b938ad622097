//! Compressed sparse row storage with a shareable sparsity pattern.

use std::io::{self, Write};
use std::ops::{Add, Mul};
use std::sync::Arc;

use num_complex::Complex64 as c64;

/// Row pointers and sorted column indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsrPattern {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
}

impl CsrPattern {
    /// Build from per-row column lists; columns are sorted and deduplicated.
    pub fn from_rows(ncols: usize, mut rows: Vec<Vec<usize>>) -> Self {
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::new();
        for row in &mut rows {
            row.sort_unstable();
            row.dedup();
            debug_assert!(row.last().is_none_or(|&c| c < ncols));
            col_idx.extend_from_slice(row);
            row_ptr.push(col_idx.len());
        }
        Self {
            nrows: rows.len(),
            ncols,
            row_ptr,
            col_idx,
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]]
    }

    /// Storage position of entry `(i, j)`, if present.
    pub fn position(&self, i: usize, j: usize) -> Option<usize> {
        let start = self.row_ptr[i];
        self.row(i).binary_search(&j).ok().map(|k| start + k)
    }
}

#[derive(Debug, Clone)]
pub struct CsrMatrix<T> {
    pattern: Arc<CsrPattern>,
    values: Vec<T>,
}

impl<T: Copy + Default + Add<Output = T> + Mul<Output = T>> CsrMatrix<T> {
    pub fn new(pattern: Arc<CsrPattern>, values: Vec<T>) -> Self {
        assert_eq!(pattern.nnz(), values.len(), "value count must match the pattern");
        Self { pattern, values }
    }

    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, T)]) -> Self {
        let mut rows = vec![Vec::new(); nrows];
        for &(i, j, _) in triplets {
            rows[i].push(j);
        }
        let pattern = Arc::new(CsrPattern::from_rows(ncols, rows));
        let mut values = vec![T::default(); pattern.nnz()];
        for &(i, j, v) in triplets {
            let k = pattern.position(i, j).expect("entry is in the pattern");
            values[k] = values[k] + v;
        }
        Self { pattern, values }
    }

    pub fn identity(n: usize, one: T) -> Self {
        let trips: Vec<_> = (0..n).map(|i| (i, i, one)).collect();
        Self::from_triplets(n, n, &trips)
    }

    pub fn pattern(&self) -> &Arc<CsrPattern> {
        &self.pattern
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn nrows(&self) -> usize {
        self.pattern.nrows
    }

    pub fn ncols(&self) -> usize {
        self.pattern.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.pattern.position(i, j).map_or_else(T::default, |k| self.values[k])
    }

    /// Iterate `(row, col, value)` in storage order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.nrows()).flat_map(move |i| {
            let range = self.pattern.row_ptr[i]..self.pattern.row_ptr[i + 1];
            range.map(move |k| (i, self.pattern.col_idx[k], self.values[k]))
        })
    }

    pub fn map<U, F: Fn(T) -> U>(&self, f: F) -> CsrMatrix<U> {
        CsrMatrix {
            pattern: Arc::clone(&self.pattern),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let trips: Vec<_> = self.triplets().map(|(i, j, v)| (j, i, v)).collect();
        Self::from_triplets(self.ncols(), self.nrows(), &trips)
    }

    /// Rows `rows` and columns `cols` of the matrix, renumbered in the given order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut col_map = vec![usize::MAX; self.ncols()];
        for (new, &old) in cols.iter().enumerate() {
            col_map[old] = new;
        }
        let mut trips = Vec::new();
        for (ni, &i) in rows.iter().enumerate() {
            for k in self.pattern.row_ptr[i]..self.pattern.row_ptr[i + 1] {
                let nj = col_map[self.pattern.col_idx[k]];
                if nj != usize::MAX {
                    trips.push((ni, nj, self.values[k]));
                }
            }
        }
        Self::from_triplets(rows.len(), cols.len(), &trips)
    }

    /// Sparse product `self * other`.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols(), other.nrows());
        let n = other.ncols();
        let mut row_ptr = vec![0];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        let mut acc = vec![T::default(); n];
        let mut marker = vec![usize::MAX; n];
        let mut touched = Vec::new();
        for i in 0..self.nrows() {
            touched.clear();
            for ka in self.pattern.row_ptr[i]..self.pattern.row_ptr[i + 1] {
                let k = self.pattern.col_idx[ka];
                let a = self.values[ka];
                for kb in other.pattern.row_ptr[k]..other.pattern.row_ptr[k + 1] {
                    let j = other.pattern.col_idx[kb];
                    if marker[j] != i {
                        marker[j] = i;
                        acc[j] = T::default();
                        touched.push(j);
                    }
                    acc[j] = acc[j] + a * other.values[kb];
                }
            }
            touched.sort_unstable();
            for &j in &touched {
                col_idx.push(j);
                values.push(acc[j]);
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            pattern: Arc::new(CsrPattern {
                nrows: self.nrows(),
                ncols: n,
                row_ptr,
                col_idx,
            }),
            values,
        }
    }
}

impl CsrMatrix<f64> {
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.nrows())
            .map(|i| {
                let r = self.pattern.row_ptr[i]..self.pattern.row_ptr[i + 1];
                r.map(|k| self.values[k] * x[self.pattern.col_idx[k]]).sum()
            })
            .collect()
    }

    pub fn mul_cvec(&self, x: &[c64]) -> Vec<c64> {
        (0..self.nrows())
            .map(|i| {
                let r = self.pattern.row_ptr[i]..self.pattern.row_ptr[i + 1];
                r.map(|k| x[self.pattern.col_idx[k]] * self.values[k]).sum()
            })
            .collect()
    }

    /// `uᴴ A u` for a real matrix.
    pub fn quad_form(&self, u: &[c64]) -> c64 {
        dot(u, &self.mul_cvec(u))
    }

    pub fn to_complex(&self) -> CsrMatrix<c64> {
        self.map(|v| c64::new(v, 0.0))
    }

    pub fn write_matrix_market<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(out, "{} {} {}", self.nrows(), self.ncols(), self.nnz())?;
        for (i, j, v) in self.triplets() {
            writeln!(out, "{} {} {:.17e}", i + 1, j + 1, v)?;
        }
        Ok(())
    }
}

impl CsrMatrix<c64> {
    pub fn mul_vec(&self, x: &[c64]) -> Vec<c64> {
        (0..self.nrows())
            .map(|i| {
                let r = self.pattern.row_ptr[i]..self.pattern.row_ptr[i + 1];
                r.map(|k| self.values[k] * x[self.pattern.col_idx[k]]).sum()
            })
            .collect()
    }

    /// `vᴴ A u`.
    pub fn form(&self, v: &[c64], u: &[c64]) -> c64 {
        dot(v, &self.mul_vec(u))
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    pub fn write_matrix_market<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "%%MatrixMarket matrix coordinate complex general")?;
        writeln!(out, "{} {} {}", self.nrows(), self.ncols(), self.nnz())?;
        for (i, j, v) in self.triplets() {
            writeln!(out, "{} {} {:.17e} {:.17e}", i + 1, j + 1, v.re, v.im)?;
        }
        Ok(())
    }
}

/// `Σ conj(a_i) b_i`.
pub fn dot(a: &[c64], b: &[c64]) -> c64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm2(a: &[c64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> CsrMatrix<f64> {
        CsrMatrix::from_triplets(
            3,
            3,
            &[
                (0, 0, 2.0),
                (0, 2, 1.0),
                (1, 1, 3.0),
                (2, 0, 4.0),
                (2, 2, 5.0),
                (0, 0, 1.0),
            ],
        )
    }

    #[test]
    fn triplets_accumulate_duplicates() {
        let a = small();
        assert_eq!(a.nnz(), 5);
        assert_eq!(a.get(0, 0), 3.0);
        assert_eq!(a.get(1, 0), 0.0);
        assert_eq!(a.mul_vec(&[1.0, 1.0, 1.0]), vec![4.0, 3.0, 9.0]);
    }

    #[test]
    fn product_matches_dense() {
        let a = small();
        let b = a.transpose();
        let c = a.matmul(&b);
        for i in 0..3 {
            for j in 0..3 {
                let expect: f64 = (0..3).map(|k| a.get(i, k) * b.get(k, j)).sum();
                assert_eq!(c.get(i, j), expect);
            }
        }
    }

    #[test]
    fn submatrix_selects_entries() {
        let a = small();
        let s = a.submatrix(&[2, 0], &[0, 2]);
        assert_eq!(s.get(0, 0), 4.0);
        assert_eq!(s.get(0, 1), 5.0);
        assert_eq!(s.get(1, 0), 3.0);
        assert_eq!(s.get(1, 1), 1.0);
    }

    #[test]
    fn matrix_market_header() {
        let mut buf = Vec::new();
        small().write_matrix_market(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("%%MatrixMarket matrix coordinate real general"));
        assert_eq!(lines.next(), Some("3 3 5"));
        assert_eq!(text.lines().count(), 7);
    }
}
