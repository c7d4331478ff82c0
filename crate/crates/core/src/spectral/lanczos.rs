use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // resolved through std when dev-dependency features enable it
use num_traits::Float as _;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ldl::{factor_shifted, BandLdl};
use super::matrix::{HermitianMatrix, SparseHermitian};
use super::scalar::{axpy, dot, norm, Scalar};
use crate::error::{Error, Result};
use crate::linalg::tridiagonal_eigen;

/// Residual tolerance relative to `‖H‖`.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Fixed seed of the Lanczos start vectors.
const START_SEED: u64 = 0x1a2c_2050;

/// Controls for [`lowest_eigs_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LanczosOptions {
    /// Largest Krylov dimension per pass.
    pub max_krylov: usize,
    /// Deflation passes for eigenvalues missed by earlier passes.
    pub max_passes: usize,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions {
            max_krylov: 600,
            max_passes: 6,
        }
    }
}

/// The `k` smallest eigenvalues, ascending.
pub fn lowest_eigs(h: &HermitianMatrix, k: usize) -> Result<Vec<f64>> {
    lowest_eigs_with(h, k, &LanczosOptions::default())
}

pub fn lowest_eigs_with(h: &HermitianMatrix, k: usize, opts: &LanczosOptions) -> Result<Vec<f64>> {
    let n = h.dim();
    if k == 0 {
        return Ok(Vec::new());
    }
    if 4 * k > n {
        return Err(Error::InvalidParameter(format!(
            "requested {k} eigenvalues of a {n}-dimensional operator; at most n/4 supported"
        )));
    }
    match h {
        HermitianMatrix::Real(m) => Solver::new(m, h, opts)?.run(k),
        HermitianMatrix::Complex(m) => Solver::new(m, h, opts)?.run(k),
    }
}

struct Solver<'a, S: Scalar> {
    h: &'a SparseHermitian<S>,
    whole: &'a HermitianMatrix,
    opts: LanczosOptions,
    sigma: f64,
    factor: BandLdl<S>,
    norm: f64,
}

struct Pair<S> {
    value: f64,
    vector: Vec<S>,
}

impl<'a, S: Scalar> Solver<'a, S> {
    fn new(h: &'a SparseHermitian<S>, whole: &'a HermitianMatrix, opts: &LanczosOptions) -> Result<Self> {
        let norm = h.norm_bound().max(f64::MIN_POSITIVE);
        let sigma = choose_shift(whole, norm)?;
        let (factor, sigma) = factor_shifted(h, sigma)?;
        Ok(Solver {
            h,
            whole,
            opts: *opts,
            sigma,
            factor,
            norm,
        })
    }

    fn run(&self, k: usize) -> Result<Vec<f64>> {
        let n = self.h.dim();
        // one extra eigenvalue gives the gap used for validation
        let want = (k + 1).min(n);
        let mut locked: Vec<Pair<S>> = Vec::new();
        for pass in 0..self.opts.max_passes {
            let need = want.saturating_sub(locked.len()).max(1);
            let found = self.lanczos_pass(need, &locked, pass as u64)?;
            locked.extend(found);
            locked.sort_by(|a, b| a.value.total_cmp(&b.value));
            if locked.len() < want {
                continue;
            }
            let vals: Vec<f64> = locked.iter().map(|p| p.value).collect();
            let lk = vals[k - 1];
            let gap = if vals.len() > k { vals[k] - lk } else { self.norm * 1e-6 };
            let probe = lk + 0.5 * gap.max(self.norm * 1e-12);
            let count = super::ldl::inertia_count(self.whole, probe)?;
            if count == k {
                return Ok(vals[..k].to_vec());
            }
            if count < k {
                return Err(Error::Inconsistent(format!(
                    "Lanczos values {vals:?} but only {count} eigenvalues lie below {probe}"
                )));
            }
            // eigenvalues were missed: keep the ones below the probe that are
            // certainly correct and search the orthogonal complement again
            locked.truncate(k);
        }
        Err(Error::Numerical(format!(
            "lowest {k} eigenvalues not certified after {} Lanczos passes",
            self.opts.max_passes
        )))
    }

    fn apply_inverse(&self, v: &[S]) -> Vec<S> {
        let mut x = v.to_vec();
        self.factor.solve(&mut x);
        x
    }

    fn orthogonalize(v: &mut [S], basis: &[Vec<S>]) {
        for _ in 0..2 {
            for q in basis {
                let c = dot(q, v);
                axpy(-c, q, v);
            }
        }
    }

    /// Krylov pass for `(H - σI)^{-1}` on the complement of `locked`,
    /// returning `want` converged Ritz pairs (smallest eigenvalues of `H`).
    fn lanczos_pass(&self, want: usize, locked: &[Pair<S>], pass: u64) -> Result<Vec<Pair<S>>> {
        let n = self.h.dim();
        let locked_vecs: Vec<Vec<S>> = locked.iter().map(|p| p.vector.clone()).collect();
        let cap = self.opts.max_krylov.min(n - locked.len());
        let mut rng = ChaCha8Rng::seed_from_u64(START_SEED ^ pass);
        let mut q: Vec<S> = (0..n).map(|_| S::from_re(rng.random::<f64>() - 0.5)).collect();
        Self::orthogonalize(&mut q, &locked_vecs);
        let q0 = norm(&q);
        if q0 == 0.0 {
            return Err(Error::Numerical("Lanczos start vector vanished".into()));
        }
        q.iter_mut().for_each(|v| *v = v.scale(1.0 / q0));
        let mut basis: Vec<Vec<S>> = vec![q];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let mut check_at = (2 * want + 20).min(cap);
        loop {
            let j = basis.len() - 1;
            let mut w = self.apply_inverse(&basis[j]);
            let a = dot(&basis[j], &w).re();
            alpha.push(a);
            Self::orthogonalize(&mut w, &locked_vecs);
            Self::orthogonalize(&mut w, &basis);
            let b = norm(&w);
            let exhausted = b <= 1e-14 * a.abs().max(f64::MIN_POSITIVE);
            let m = alpha.len();
            if m >= check_at || m >= cap || exhausted {
                if let Some(pairs) = self.converged_pairs(&alpha, &beta, &basis, want, b, m >= cap || exhausted)? {
                    return Ok(pairs);
                }
                if m >= cap || exhausted {
                    return Err(Error::Numerical(format!(
                        "Lanczos did not converge within Krylov dimension {m}"
                    )));
                }
                check_at = (check_at * 3 / 2).min(cap);
            }
            beta.push(b);
            w.iter_mut().for_each(|v| *v = v.scale(1.0 / b));
            basis.push(w);
        }
    }

    /// Ritz pairs for the `want` largest Ritz values of the inverse, if all
    /// pass the true-residual test (or whatever converged when `last`).
    fn converged_pairs(
        &self,
        alpha: &[f64],
        beta: &[f64],
        basis: &[Vec<S>],
        want: usize,
        _next_beta: f64,
        last: bool,
    ) -> Result<Option<Vec<Pair<S>>>> {
        let m = alpha.len();
        let (theta, vecs) = tridiagonal_eigen(alpha, beta)
            .ok_or_else(|| Error::Numerical("tridiagonal eigensolver failed".into()))?;
        let n = self.h.dim();
        let mut out = Vec::new();
        let mut hy = vec![S::zero(); n];
        for idx in (0..m).rev() {
            if out.len() == want {
                break;
            }
            let th = theta[idx];
            if th <= 0.0 {
                break;
            }
            let mut y = vec![S::zero(); n];
            for (i, qi) in basis.iter().take(m).enumerate() {
                axpy(S::from_re(vecs[i * m + idx]), qi, &mut y);
            }
            let yn = norm(&y);
            y.iter_mut().for_each(|v| *v = v.scale(1.0 / yn));
            let lambda = self.sigma + 1.0 / th;
            self.h.matvec(&y, &mut hy);
            let mut r = hy.clone();
            axpy(S::from_re(-lambda), &y, &mut r);
            if norm(&r) > RESIDUAL_TOL * self.norm {
                if last {
                    break;
                }
                return Ok(None);
            }
            out.push(Pair { value: lambda, vector: y });
        }
        if out.is_empty() || (!last && out.len() < want) {
            return Ok(None);
        }
        Ok(Some(out))
    }
}

/// Shift strictly below the spectrum. Starts at the Gershgorin bound; when
/// that bound is negative the shift is moved up by inertia bisection so it
/// sits close under the lowest eigenvalue.
fn choose_shift(h: &HermitianMatrix, norm: f64) -> Result<f64> {
    let lb = h.gershgorin_lower();
    let delta = 1e-8 * norm;
    let mut lo = lb - delta;
    if lb >= -delta {
        return Ok(lo);
    }
    let mut step = (1e-3 * lb.abs()).max(delta);
    let mut hi = lo + step;
    while super::ldl::inertia_count(h, hi)? == 0 {
        lo = hi;
        step *= 2.0;
        hi = lo + step;
    }
    for _ in 0..8 {
        let mid = 0.5 * (lo + hi);
        if super::ldl::inertia_count(h, mid)? == 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo - delta)
}
