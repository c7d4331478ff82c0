//! Discretization choice and its validity bound.
//!
//! The box is the smallest `[-L, L]^n` on whose boundary `inf_ξ M ≥ 2√λ_max`.
//! The resolution is refined (`m → 2m + 1`, halving `h`) until
//!
//! * `N(λ_max)` is below `count_fraction` of the matrix dimension, and
//! * the two-grid estimate `4/3 |λ_k(h) - λ_k(h/2)| / λ_k(h/2)` of the relative
//!   error of the highest eigenvalue below `λ_max` is below `richardson_tol`.

use serde::Serialize;

use orbitcount_core::phasespace::{boundary_clears, WeightEvaluator, BOX_CAP};
use orbitcount_core::spectral::{inertia_count, kth_eigenvalue, GridSpec, HermitianOperatorGrid};
use orbitcount_core::Error as CoreError;

use crate::config::GridConfig;
use crate::error::{HarnessError, Result};
use crate::model::Model;

/// Initial spacing `h = H0_SCALE / √λ_max` of the automatic resolution.
const H0_SCALE: f64 = 0.5;
const SMALLEST_M: usize = 15;
const BOX_BISECTIONS: usize = 24;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridChoice {
    pub half_width: f64,
    pub points: usize,
    pub h: f64,
    pub dim: usize,
    pub count_at_max: usize,
    pub richardson_error: f64,
    pub automatic: bool,
}

/// Smallest half-width (to about `1e-6` relative) whose boundary clears
/// `level`, found by doubling then bisection.
pub fn box_half_width<W: WeightEvaluator + ?Sized>(w: &W, level: f64) -> Result<f64> {
    let mut hi = 1.0;
    while !boundary_clears(w, hi, level) {
        if hi >= BOX_CAP {
            return Err(CoreError::UnboundedSublevel {
                lambda: level * level,
                cap: BOX_CAP,
            }
            .into());
        }
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..BOX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if boundary_clears(w, mid, level) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

struct Level {
    grid: GridSpec,
    op: HermitianOperatorGrid,
}

fn build(model: &Model, n: usize, l: f64, m: usize, cap: usize) -> Result<Level> {
    let grid = GridSpec::with_cap(n, l, m, cap)?;
    let op = model.assemble(&grid)?;
    Ok(Level { grid, op })
}

/// Relative two-grid error of eigenvalue `k` on `coarse`.
fn richardson(coarse: &Level, fine: &Level, k: usize, scale: f64) -> Result<f64> {
    let tol = 1e-7 * scale;
    let a = kth_eigenvalue(&coarse.op.matrix, k, tol)?;
    let b = kth_eigenvalue(&fine.op.matrix, k, tol)?;
    Ok(4.0 / 3.0 * (a - b).abs() / b.abs().max(f64::MIN_POSITIVE))
}

/// Chooses (or checks) the grid for eigenvalues up to `lambda_max` and
/// returns it with the assembled operator.
pub fn choose_grid<W: WeightEvaluator + ?Sized>(
    model: &Model,
    w: &W,
    lambda_max: f64,
    cfg: &GridConfig,
) -> Result<(GridChoice, HermitianOperatorGrid)> {
    let n = model.dim();
    let l = match cfg.half_width {
        Some(l) => l,
        None => box_half_width(w, 2.0 * lambda_max.sqrt())?,
    };
    let automatic = cfg.points.is_none();
    let mut m = match cfg.points {
        Some(m) => m,
        None => {
            let h0 = H0_SCALE / lambda_max.sqrt();
            let m = ((2.0 * l / h0).ceil() as usize).saturating_sub(1).max(SMALLEST_M);
            m | 1
        }
    };
    let mut coarse = build(model, n, l, m, cfg.point_cap)?;
    loop {
        let count = inertia_count(&coarse.op.matrix, lambda_max)?;
        let dim = coarse.grid.len();
        let count_ok = (count as f64) < cfg.count_fraction * dim as f64;
        let fine_m = 2 * m + 1;
        let fine = if count_ok && count > 0 {
            // the verification grid may exceed the cap by one refinement
            Some(build(model, n, l, fine_m, cfg.point_cap.saturating_mul(1 << n))?)
        } else {
            None
        };
        let err = match &fine {
            Some(f) => richardson(&coarse, f, count - 1, lambda_max)?,
            None => 0.0,
        };
        if count_ok && err <= cfg.richardson_tol {
            let choice = GridChoice {
                half_width: l,
                points: m,
                h: coarse.grid.h(),
                dim,
                count_at_max: count,
                richardson_error: err,
                automatic,
            };
            return Ok((choice, coarse.op));
        }
        if !automatic {
            return Err(HarnessError::Config(format!(
                "lambda_max = {lambda_max} is beyond the validity bound of the configured grid \
                 (N = {count} of {dim} points, two-grid error {err:.3e}, limits {} and {})",
                cfg.count_fraction, cfg.richardson_tol
            )));
        }
        log::info!("refining grid: m = {m}, N = {count}, two-grid error {err:.3e}");
        m = fine_m;
        let points = m.pow(n as u32);
        if points > cfg.point_cap {
            return Err(CoreError::GridCap {
                points,
                cap: cfg.point_cap,
            }
            .into());
        }
        coarse = match fine {
            Some(f) => f,
            None => build(model, n, l, m, cfg.point_cap)?,
        };
    }
}
