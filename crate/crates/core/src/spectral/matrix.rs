use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use num_complex::Complex64;

#[allow(unused_imports)] // resolved through std when dev-dependency features enable it
use num_traits::Float as _;

use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Hermitian matrix stored as its lower triangle (diagonal included) in
/// compressed rows. The upper triangle is implied by conjugation, so the
/// matrix is exactly Hermitian whatever the entries.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseHermitian<S: Scalar> {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<S>,
    bandwidth: usize,
}

impl<S: Scalar> SparseHermitian<S> {
    /// Builds from per-row lower-triangle entries; duplicates are summed and
    /// diagonal entries are made real.
    pub fn from_lower_rows(rows: Vec<Vec<(usize, S)>>) -> Result<Self> {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut bandwidth = 0;
        row_ptr.push(0);
        for (i, mut row) in rows.into_iter().enumerate() {
            row.sort_by_key(|e| e.0);
            let start = cols.len();
            for (j, v) in row {
                if j > i {
                    return Err(Error::InvalidParameter(format!(
                        "entry ({i}, {j}) is above the diagonal"
                    )));
                }
                if cols.len() > start && *cols.last().expect("nonempty") == j {
                    let last = vals.last_mut().expect("nonempty");
                    *last += v;
                } else {
                    cols.push(j);
                    vals.push(v);
                }
            }
            if let (Some(&j), Some(v)) = (cols.last(), vals.last_mut()) {
                if cols.len() > start && j == i {
                    *v = S::from_re(v.re());
                }
            }
            if cols.len() > start {
                bandwidth = bandwidth.max(i - cols[start]);
            }
            row_ptr.push(cols.len());
        }
        Ok(SparseHermitian {
            n,
            row_ptr,
            cols,
            vals,
            bandwidth,
        })
    }

    /// From a dense row-major matrix, reading only its lower triangle.
    pub fn from_dense_lower(n: usize, a: &[S]) -> Result<Self> {
        if a.len() != n * n {
            return Err(Error::Dimension {
                expected: n * n,
                found: a.len(),
            });
        }
        let rows = (0..n)
            .map(|i| (0..=i).map(|j| (j, a[i * n + j])).filter(|(_, v)| *v != S::zero()).collect())
            .collect();
        Self::from_lower_rows(rows)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Largest `i - j` over stored entries.
    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn nnz_lower(&self) -> usize {
        self.cols.len()
    }

    /// Lower-triangle entries of row `i`, columns ascending.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, S)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    /// Entry `(i, j)` of the full matrix.
    pub fn get(&self, i: usize, j: usize) -> S {
        let (r, c, flip) = if j <= i { (i, j, false) } else { (j, i, true) };
        let found = self.row(r).find(|e| e.0 == c).map_or(S::zero(), |e| e.1);
        if flip {
            found.conj()
        } else {
            found
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i).re()).collect()
    }

    /// `y = H x`.
    pub fn matvec(&self, x: &[S], y: &mut [S]) {
        for v in y.iter_mut() {
            *v = S::zero();
        }
        for i in 0..self.n {
            let mut acc = S::zero();
            for (j, v) in self.row(i) {
                acc += v * x[j];
                if j != i {
                    y[j] += v.conj() * x[i];
                }
            }
            y[i] += acc;
        }
    }

    /// Absolute row sums of the full matrix.
    fn abs_row_sums(&self) -> (Vec<f64>, Vec<f64>) {
        let mut off = vec![0.0; self.n];
        let mut diag = vec![0.0; self.n];
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                if j == i {
                    diag[i] = v.re();
                } else {
                    off[i] += v.abs();
                    off[j] += v.abs();
                }
            }
        }
        (diag, off)
    }

    /// Max absolute row sum, an upper bound for the spectral norm.
    pub fn norm_bound(&self) -> f64 {
        let (diag, off) = self.abs_row_sums();
        diag.iter().zip(&off).fold(0.0f64, |m, (d, o)| m.max(d.abs() + o))
    }

    /// Gershgorin lower bound on the spectrum.
    pub fn gershgorin_lower(&self) -> f64 {
        let (diag, off) = self.abs_row_sums();
        diag.iter().zip(&off).fold(f64::INFINITY, |m, (d, o)| m.min(d - o))
    }

    /// Dense row-major copy of the full matrix, for small oracles.
    pub fn to_dense(&self) -> Vec<S> {
        let n = self.n;
        let mut a = vec![S::zero(); n * n];
        for i in 0..n {
            for (j, v) in self.row(i) {
                a[i * n + j] = v;
                a[j * n + i] = v.conj();
            }
        }
        a
    }

    /// Matrix Market coordinate text (`hermitian` or `symmetric`, lower
    /// triangle, one-based indices).
    pub fn to_matrix_market(&self) -> String {
        let mut out = String::new();
        let (field, sym) = if S::IS_COMPLEX {
            ("complex", "hermitian")
        } else {
            ("real", "symmetric")
        };
        let _ = writeln!(out, "%%MatrixMarket matrix coordinate {field} {sym}");
        let _ = writeln!(out, "{} {} {}", self.n, self.n, self.nnz_lower());
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                if S::IS_COMPLEX {
                    let _ = writeln!(out, "{} {} {:e} {:e}", i + 1, j + 1, v.re(), v.im());
                } else {
                    let _ = writeln!(out, "{} {} {:e}", i + 1, j + 1, v.re());
                }
            }
        }
        out
    }
}

/// Real symmetric or complex Hermitian grid operator.
#[derive(Clone, Debug, PartialEq)]
pub enum HermitianMatrix {
    Real(SparseHermitian<f64>),
    Complex(SparseHermitian<Complex64>),
}

macro_rules! dispatch {
    ($self:expr, $m:ident => $body:expr) => {
        match $self {
            HermitianMatrix::Real($m) => $body,
            HermitianMatrix::Complex($m) => $body,
        }
    };
}

impl HermitianMatrix {
    /// Stores complex entries as real when every imaginary part is exactly 0.
    pub fn from_complex(m: SparseHermitian<Complex64>) -> Self {
        if m.vals.iter().all(|v| v.im == 0.0) {
            HermitianMatrix::Real(SparseHermitian {
                n: m.n,
                row_ptr: m.row_ptr,
                cols: m.cols,
                vals: m.vals.iter().map(|v| v.re).collect(),
                bandwidth: m.bandwidth,
            })
        } else {
            HermitianMatrix::Complex(m)
        }
    }

    pub fn dim(&self) -> usize {
        dispatch!(self, m => m.dim())
    }

    pub fn is_real(&self) -> bool {
        matches!(self, HermitianMatrix::Real(_))
    }

    pub fn bandwidth(&self) -> usize {
        dispatch!(self, m => m.bandwidth())
    }

    pub fn norm_bound(&self) -> f64 {
        dispatch!(self, m => m.norm_bound())
    }

    pub fn gershgorin_lower(&self) -> f64 {
        dispatch!(self, m => m.gershgorin_lower())
    }

    pub fn diagonal(&self) -> Vec<f64> {
        dispatch!(self, m => m.diagonal())
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        dispatch!(self, m => m.get(i, j).to_complex())
    }

    pub fn to_matrix_market(&self) -> String {
        dispatch!(self, m => m.to_matrix_market())
    }

    /// Largest `|H_ij - conj(H_ji)|` over the full matrix, computed from the
    /// explicit entries; zero by construction.
    pub fn max_asymmetry(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        dispatch!(self, m => {
            let dense = m.to_dense();
            for i in 0..n {
                for j in 0..n {
                    let d = dense[i * n + j] - dense[j * n + i].conj();
                    worst = worst.max(d.abs());
                }
            }
        });
        worst
    }
}
