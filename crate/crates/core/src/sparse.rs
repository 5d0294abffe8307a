//! Compressed sparse row storage for the symmetric system matrix.

use alloc::vec;
use alloc::vec::Vec;

/// A symmetric sparse matrix in CSR form, storing the full matrix.
///
/// Assembly routines emit every off-diagonal contribution for both `(i, j)`
/// and `(j, i)` with the identical product, and duplicates are merged in a
/// fixed order, so the stored matrix is bit-for-bit symmetric.
#[derive(Debug, Clone)]
pub struct SparseSymMatrix {
    dim: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

/// Accumulates `(row, col, value)` contributions before compression.
#[derive(Debug, Default)]
pub struct TripletBuffer {
    entries: Vec<(usize, usize, f64)>,
}

impl TripletBuffer {
    pub fn new() -> Self {
        TripletBuffer {
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        self.entries.push((row, col, value));
    }

    /// Adds `value` at `(row, col)` and `(col, row)`.
    pub fn push_sym(&mut self, row: usize, col: usize, value: f64) {
        self.entries.push((row, col, value));
        if row != col {
            self.entries.push((col, row, value));
        }
    }

    /// Compresses to CSR, summing duplicates in `(row, col)` order.
    pub fn into_csr(mut self, dim: usize) -> SparseSymMatrix {
        self.entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_counts = vec![0usize; dim + 1];
        let mut col_indices = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        let mut last = None;
        for (r, c, v) in self.entries {
            debug_assert!(r < dim && c < dim);
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_indices.push(c);
                values.push(v);
                row_counts[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..dim {
            row_counts[r + 1] += row_counts[r];
        }
        SparseSymMatrix {
            dim,
            row_offsets: row_counts,
            col_indices,
            values,
        }
    }
}

impl SparseSymMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Builds an identity matrix (mostly for tests).
    pub fn identity(dim: usize) -> Self {
        SparseSymMatrix {
            dim,
            row_offsets: (0..=dim).collect(),
            col_indices: (0..dim).collect(),
            values: vec![1.0; dim],
        }
    }

    /// Builds a matrix from a dense row-major table (tests only; zeros kept).
    pub fn from_dense(rows: &[&[f64]]) -> Self {
        let dim = rows.len();
        let mut buf = TripletBuffer::new();
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), dim);
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    buf.push(i, j, v);
                }
            }
        }
        buf.into_csr(dim)
    }

    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let lo = self.row_offsets[r];
        let hi = self.row_offsets[r + 1];
        (&self.col_indices[lo..hi], &self.values[lo..hi])
    }

    /// `y = M x`.
    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        for r in 0..self.dim {
            let (cols, vals) = self.row(r);
            let mut acc = 0.0;
            for (&c, &v) in cols.iter().zip(vals) {
                acc += v * x[c];
            }
            y[r] = acc;
        }
    }

    /// `x^T M x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let mut total = 0.0;
        for r in 0..self.dim {
            let (cols, vals) = self.row(r);
            let mut acc = 0.0;
            for (&c, &v) in cols.iter().zip(vals) {
                acc += v * x[c];
            }
            total += x[r] * acc;
        }
        total
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.dim];
        for r in 0..self.dim {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                if c == r {
                    d[r] = v;
                }
            }
        }
        d
    }

    /// Largest absolute asymmetry `max |M - M^T|`; zero for assembled
    /// matrices by construction.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.dim {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                let mut mirror = 0.0;
                let (mcols, mvals) = self.row(c);
                if let Ok(k) = mcols.binary_search(&r) {
                    mirror = mvals[k];
                }
                worst = worst.max((v - mirror).abs());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}
