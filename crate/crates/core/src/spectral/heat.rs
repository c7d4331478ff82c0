use alloc::format;

#[allow(unused_imports)] // resolved through std when dev-dependency features enable it
use num_traits::Float as _;

use crate::error::{Error, Result};

/// Heat trace below a cutoff, with a separately reported tail bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeatTrace {
    pub t: f64,
    /// `Σ_{λ_j < Λ} e^{-t λ_j}`.
    pub value: f64,
    /// Bound on `Σ_{λ_j ≥ Λ} e^{-t λ_j}`.
    pub tail_bound: f64,
    pub terms: usize,
}

/// Upper tail used by [`heat_trace`]: `Ĉ ∫_Λ^∞ t e^{-ts} N₀(Ĉ s) ds`.
///
/// With `s = Λ + u/t` this is `Ĉ e^{-tΛ} ∫_0^∞ e^{-u} N₀(Ĉ(Λ + u/t)) du`,
/// evaluated by composite Simpson on `u ∈ [0, 80]`.
pub fn tail_bound<F: Fn(f64) -> f64>(n0: F, slack: f64, cutoff: f64, t: f64) -> f64 {
    const U_MAX: f64 = 80.0;
    const INTERVALS: usize = 1600;
    let du = U_MAX / INTERVALS as f64;
    let f = |u: f64| (-u).exp() * n0(slack * (cutoff + u / t));
    let mut acc = f(0.0) + f(U_MAX);
    for i in 1..INTERVALS {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(i as f64 * du);
    }
    slack * (-t * cutoff).exp() * acc * du / 3.0
}

/// `Z(t)` from the eigenvalues below `cutoff`. `certified_count` is the
/// inertia count at `cutoff`; the eigenvalues below it must match it.
pub fn heat_trace<F: Fn(f64) -> f64>(
    eigs: &[f64],
    certified_count: usize,
    cutoff: f64,
    t: f64,
    n0: F,
    slack: f64,
) -> Result<HeatTrace> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("t must be positive, got {t}")));
    }
    if !(slack >= 1.0) {
        return Err(Error::InvalidParameter(format!("tail slack must be >= 1, got {slack}")));
    }
    let below = eigs.iter().filter(|&&l| l < cutoff).count();
    if below != certified_count {
        return Err(Error::Inconsistent(format!(
            "{below} eigenvalues supplied below {cutoff}, inertia count is {certified_count}"
        )));
    }
    // smallest terms first for a stable sum
    let mut terms: alloc::vec::Vec<f64> = eigs
        .iter()
        .filter(|&&l| l < cutoff)
        .map(|&l| (-t * l).exp())
        .collect();
    terms.sort_by(f64::total_cmp);
    let value = terms.iter().sum();
    Ok(HeatTrace {
        t,
        value,
        tail_bound: tail_bound(n0, slack, cutoff, t),
        terms: below,
    })
}
