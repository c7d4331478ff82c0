use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // resolved through std when dev-dependency features enable it
use num_traits::Float as _;

use super::matrix::{HermitianMatrix, SparseHermitian};
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Pivots with `|d| ≤ PIVOT_TOL · ‖H‖` count as breakdown.
pub const PIVOT_TOL: f64 = 1e-14;
/// Relative shift applied to `λ` after a breakdown.
pub const SHIFT_PERTURBATION: f64 = 1e-8;
pub const SHIFT_RETRIES: usize = 3;

/// `H - σI = L D Lᴴ` with unit lower-banded `L` and real diagonal `D`,
/// computed without pivoting.
#[derive(Clone, Debug)]
pub struct BandLdl<S: Scalar> {
    n: usize,
    bw: usize,
    /// Row `i` holds `L[i][i-bw..i]` at offsets `0..bw`.
    l: Vec<S>,
    d: Vec<f64>,
}

/// Outcome of a factorization attempt.
pub enum Factorization<S: Scalar> {
    Ok(BandLdl<S>),
    /// A pivot fell below the breakdown threshold at this row.
    Breakdown(usize),
}

impl<S: Scalar> BandLdl<S> {
    pub fn factor(h: &SparseHermitian<S>, sigma: f64, norm: f64) -> Factorization<S> {
        let n = h.dim();
        let bw = h.bandwidth();
        let mut l = vec![S::zero(); n * bw];
        let mut d = vec![0.0; n];
        // w[k] = L[i][k] d[k] for the current row
        let mut w = vec![S::zero(); bw];
        let tiny = PIVOT_TOL * norm.max(f64::MIN_POSITIVE);
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let base = i * bw;
            let mut diag = 0.0;
            for (j, v) in h.row(i) {
                if j == i {
                    diag = v.re();
                } else {
                    l[base + j + bw - i] = v;
                }
            }
            // L[i][j] for j in lo..i, column by column
            for j in lo..i {
                let oj = j + bw - i;
                let kstart = lo.max(j.saturating_sub(bw));
                let mut s = l[base + oj];
                let jb = j * bw;
                for k in kstart..j {
                    s -= w[k + bw - i] * l[jb + k + bw - j].conj();
                }
                w[oj] = s;
                l[base + oj] = s.scale(1.0 / d[j]);
            }
            let mut dii = diag - sigma;
            for j in lo..i {
                let oj = j + bw - i;
                dii -= (w[oj] * l[base + oj].conj()).re();
            }
            if dii.abs() <= tiny || !dii.is_finite() {
                return Factorization::Breakdown(i);
            }
            d[i] = dii;
        }
        Factorization::Ok(BandLdl { n, bw, l, d })
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.d
    }

    pub fn negative_pivots(&self) -> usize {
        self.d.iter().filter(|&&v| v < 0.0).count()
    }

    /// Solves `(H - σI) x = b` in place.
    pub fn solve(&self, x: &mut [S]) {
        let (n, bw) = (self.n, self.bw);
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let base = i * bw;
            let mut s = x[i];
            for k in lo..i {
                s -= self.l[base + k + bw - i] * x[k];
            }
            x[i] = s;
        }
        for (xi, &di) in x.iter_mut().zip(&self.d) {
            *xi = xi.scale(1.0 / di);
        }
        for i in (0..n).rev() {
            let lo = i.saturating_sub(bw);
            let base = i * bw;
            let xi = x[i];
            for k in lo..i {
                x[k] -= self.l[base + k + bw - i].conj() * xi;
            }
        }
    }
}

/// Factors `H - λI`, nudging `λ` upward by `1e-8` relative after each
/// breakdown. Returns the factor and the shift actually used.
pub fn factor_shifted<S: Scalar>(h: &SparseHermitian<S>, lambda: f64) -> Result<(BandLdl<S>, f64)> {
    let norm = h.norm_bound();
    let mut shift = lambda;
    for attempt in 0..=SHIFT_RETRIES {
        match BandLdl::factor(h, shift, norm) {
            Factorization::Ok(f) => return Ok((f, shift)),
            Factorization::Breakdown(row) => {
                if attempt == SHIFT_RETRIES {
                    return Err(Error::Numerical(format!(
                        "LDL breakdown at row {row} for shift {lambda} after {SHIFT_RETRIES} perturbations"
                    )));
                }
                shift += SHIFT_PERTURBATION * shift.abs().max(norm * 1e-6).max(f64::MIN_POSITIVE);
            }
        }
    }
    unreachable!("loop returns on the last attempt")
}

/// Number of eigenvalues strictly below `λ`, from the inertia of `H - λI`.
pub fn inertia_count(h: &HermitianMatrix, lambda: f64) -> Result<usize> {
    if !lambda.is_finite() {
        return if lambda > 0.0 { Ok(h.dim()) } else { Ok(0) };
    }
    match h {
        HermitianMatrix::Real(m) => Ok(factor_shifted(m, lambda)?.0.negative_pivots()),
        HermitianMatrix::Complex(m) => Ok(factor_shifted(m, lambda)?.0.negative_pivots()),
    }
}

/// `k`-th smallest eigenvalue (zero-based) by bisection on inertia counts,
/// to absolute width `tol`.
pub fn kth_eigenvalue(h: &HermitianMatrix, k: usize, tol: f64) -> Result<f64> {
    if k >= h.dim() {
        return Err(Error::InvalidParameter(format!("index {k} beyond dimension {}", h.dim())));
    }
    let mut lo = h.gershgorin_lower();
    let norm = h.norm_bound();
    let mut hi = norm.max(lo.abs()) * (1.0 + 1e-12) + 1.0;
    lo -= 1e-12 * norm + f64::MIN_POSITIVE;
    while hi - lo > tol.max(4.0 * f64::EPSILON * hi.abs().max(lo.abs())) {
        let mid = 0.5 * (lo + hi);
        if inertia_count(h, mid)? > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
