use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // resolved through std when dev-dependency features enable it
use num_traits::Float as _;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::assemble::{nodal_operator, GridOp};
use super::grid::GridSpec;
use crate::error::{Error, Result};
use crate::nilpotent::Representation;

/// Largest supported Sobolev order.
pub const MAX_ORDER: usize = 3;
/// Box half-width in units of the representation length scale.
pub const BOX_SCALES: f64 = 15.0;

/// Discrete `π(X_j)` on a grid together with `M_π(x)` at the nodes.
#[derive(Clone, Debug)]
pub struct SobolevContext {
    grid: GridSpec,
    ops: Vec<GridOp>,
    weight: Vec<f64>,
    length: f64,
}

impl SobolevContext {
    pub fn new(rep: &Representation, grid: GridSpec) -> Result<Self> {
        let ops = rep
            .sublaplacian_ops()
            .iter()
            .map(|g| nodal_operator(g, &grid))
            .collect::<Result<Vec<_>>>()?;
        let weight = (0..grid.len())
            .map(|p| rep.m_pi_inf(&grid.point(p)))
            .collect::<Result<Vec<_>>>()?;
        let length = 1.0 / rep.m_pi_inf(&vec![0.0; rep.n()])?;
        Ok(SobolevContext {
            grid,
            ops,
            weight,
            length,
        })
    }

    /// Grid on `[-15ℓ, 15ℓ]^n` with `ℓ = 1 / M_π(0)`, so that the ensemble
    /// and the box follow the natural scale of the representation.
    pub fn scale_adapted(rep: &Representation, points_per_dim: usize) -> Result<Self> {
        let ell = 1.0 / rep.m_pi_inf(&vec![0.0; rep.n()])?;
        let grid = GridSpec::new(rep.n(), BOX_SCALES * ell, points_per_dim)?;
        Self::new(rep, grid)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// `1 / M_π(0)`.
    pub fn length_scale(&self) -> f64 {
        self.length
    }

    pub fn weight(&self) -> &[f64] {
        &self.weight
    }

    fn check(&self, u: &[Complex64], m: usize) -> Result<()> {
        if m > MAX_ORDER {
            return Err(Error::InvalidParameter(format!("unsupported Sobolev order {m}; at most {MAX_ORDER}")));
        }
        if u.len() != self.grid.len() {
            return Err(Error::Dimension {
                expected: self.grid.len(),
                found: u.len(),
            });
        }
        Ok(())
    }

    fn norm_sq(&self, v: &[Complex64]) -> f64 {
        let w = self.grid.h().powi(self.grid.n as i32);
        w * v.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    /// `π(X^α) u` for every sequence `α` of length `0..=m`, by level.
    fn levels(&self, u: &[Complex64], m: usize) -> Vec<Vec<Vec<Complex64>>> {
        let mut levels = vec![vec![u.to_vec()]];
        for _ in 0..m {
            let prev = levels.last().expect("level 0 exists");
            let next: Vec<Vec<Complex64>> = prev
                .iter()
                .flat_map(|v| self.ops.iter().map(move |g| g.apply(v)))
                .collect();
            levels.push(next);
        }
        levels
    }

    /// `‖u‖_{m,π} = (Σ_{|α| = m} ‖π(X^α) u‖²)^{1/2}`.
    pub fn sobolev_norm(&self, u: &[Complex64], m: usize) -> Result<f64> {
        Ok(self.sobolev_norm_sq(u, m)?.sqrt())
    }

    pub fn sobolev_norm_sq(&self, u: &[Complex64], m: usize) -> Result<f64> {
        self.check(u, m)?;
        let levels = self.levels(u, m);
        Ok(levels[m].iter().map(|v| self.norm_sq(v)).sum())
    }

    /// `Σ_{|α| ≤ m} ‖M_π^{m-|α|} π(X^α) u‖²`.
    pub fn weighted_side(&self, u: &[Complex64], m: usize) -> Result<f64> {
        self.check(u, m)?;
        let levels = self.levels(u, m);
        let mut total = 0.0;
        for (j, level) in levels.iter().enumerate() {
            let power = (m - j) as i32;
            for v in level {
                let weighted: Vec<Complex64> = v
                    .iter()
                    .zip(&self.weight)
                    .map(|(z, w)| z * w.powi(power))
                    .collect();
                total += self.norm_sq(&weighted);
            }
        }
        Ok(total)
    }

    /// `weighted_side / ‖u‖²_{m,π}`; `None` when the norm vanishes.
    pub fn ratio(&self, u: &[Complex64], m: usize) -> Result<Option<f64>> {
        let norm_sq = self.sobolev_norm_sq(u, m)?;
        let lhs = self.weighted_side(u, m)?;
        if norm_sq == 0.0 {
            return Ok(None);
        }
        Ok(Some(lhs / norm_sq))
    }

    /// Band-limit filter: `‖δ_k⁺ u‖ ≤ ‖u‖ / h` along every axis, where `δ⁺`
    /// is the forward difference with zero extension. Rejects grid spikes.
    pub fn band_limited(&self, u: &[Complex64]) -> bool {
        let base: f64 = u.iter().map(|z| z.norm_sqr()).sum();
        if base == 0.0 {
            return false;
        }
        (0..self.grid.n).all(|k| {
            let stride = self.grid.stride(k);
            let mut acc = 0.0;
            for p in 0..u.len() {
                let idx = (p / stride) % self.grid.m;
                let up = if idx + 1 < self.grid.m { u[p + stride] } else { Complex64::new(0.0, 0.0) };
                acc += (up - u[p]).norm_sqr();
                if idx == 0 {
                    acc += u[p].norm_sqr();
                }
            }
            // ‖δ⁺u‖² = acc / h² against ‖u‖² / h²
            acc <= base
        })
    }

    /// Random smooth test functions: a compactly supported `C^∞` bump times
    /// a few random cosines, with centre, radius and frequencies drawn in
    /// units of [`SobolevContext::length_scale`] and support inside the
    /// inner 90% of the box. Candidates failing [`Self::band_limited`] are
    /// redrawn.
    pub fn ensemble(&self, count: usize, seed: u64) -> Result<Vec<Vec<Complex64>>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ell = self.length;
        let limit = 0.9 * self.grid.half_width;
        let n = self.grid.n;
        let points = self.grid.points();
        let mut out = Vec::with_capacity(count);
        let mut attempts = 0usize;
        while out.len() < count {
            attempts += 1;
            if attempts > 100 * count + 100 {
                return Err(Error::Numerical(format!(
                    "only {} of {count} test functions passed the band-limit filter",
                    out.len()
                )));
            }
            let radius = ell * (1.0 + 3.0 * rng.random::<f64>());
            let reach = (limit - radius).max(0.0).min(6.0 * ell);
            let centre: Vec<f64> = (0..n).map(|_| reach * (2.0 * rng.random::<f64>() - 1.0)).collect();
            let waves: Vec<(Vec<f64>, f64, f64)> = (0..4)
                .map(|_| {
                    let freq: Vec<f64> = (0..n).map(|_| 3.0 * (2.0 * rng.random::<f64>() - 1.0) / ell).collect();
                    let phase = core::f64::consts::TAU * rng.random::<f64>();
                    let amp = 2.0 * rng.random::<f64>() - 1.0;
                    (freq, phase, amp)
                })
                .collect();
            let u: Vec<Complex64> = points
                .iter()
                .map(|x| {
                    let r2: f64 = x.iter().zip(&centre).map(|(a, c)| (a - c) * (a - c)).sum::<f64>() / (radius * radius);
                    if r2 >= 1.0 {
                        return Complex64::new(0.0, 0.0);
                    }
                    let bump = (-1.0 / (1.0 - r2)).exp();
                    let carrier: f64 = waves
                        .iter()
                        .map(|(f, ph, a)| {
                            let arg: f64 = f.iter().zip(x.iter().zip(&centre)).map(|(k, (a, c))| k * (a - c)).sum();
                            a * (arg + ph).cos()
                        })
                        .sum();
                    Complex64::new(bump * (1.0 + carrier), 0.0)
                })
                .collect();
            if self.band_limited(&u) {
                out.push(u);
            }
        }
        Ok(out)
    }
}
