//! Smallest two-sided equivalence constant between a spectral quantity and
//! its phase-space proxy.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)] // resolved through std when dev-dependency features enable it
use num_traits::Float as _;

use crate::error::{Error, Result};
use crate::interp;

/// Upper end of the search interval for `C`.
pub const C_MAX: f64 = 1e6;
/// Relative resolution of the bisection.
pub const C_REL_TOL: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FitMode {
    /// `C⁻¹ N₀(λ/C) ≤ N(λ) ≤ C N₀(Cλ)`.
    Count,
    /// `C⁻¹ Z₀(Ct) ≤ Z(t) ≤ C Z₀(t/C)`.
    Heat,
}

/// One grid point: `x` is `λ` or `t`, `value` is `N` or `Z`, `proxy` is
/// `N₀` or `Z₀` at `x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitRow {
    pub x: f64,
    pub value: f64,
    pub proxy: f64,
}

/// Fits `C` with the proxy interpolated from the rows themselves
/// (power law between grid points and beyond its ends).
pub fn fit_constant(rows: &[FitRow], mode: FitMode) -> Result<f64> {
    let mut table: Vec<(f64, f64)> = rows.iter().map(|r| (r.x, r.proxy)).collect();
    table.sort_by(|a, b| a.0.total_cmp(&b.0));
    let xs: Vec<f64> = table.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = table.iter().map(|p| p.1).collect();
    fit_constant_with(rows, mode, |x| interp::power_law(&xs, &ys, x))
}

/// Fits `C` against an arbitrary proxy curve.
pub fn fit_constant_with<F: Fn(f64) -> f64>(rows: &[FitRow], mode: FitMode, proxy: F) -> Result<f64> {
    if rows.is_empty() {
        return Err(Error::InvalidParameter("no rows to fit".into()));
    }
    if let Some(r) = rows
        .iter()
        .find(|r| !(r.x > 0.0) || !r.value.is_finite() || r.value < 0.0 || !r.proxy.is_finite() || r.proxy < 0.0)
    {
        return Err(Error::InvalidParameter(format!("invalid fit row {r:?}")));
    }
    if first_violation(rows, mode, &proxy, 1.0).is_none() {
        return Ok(1.0);
    }
    if let Some(x) = first_violation(rows, mode, &proxy, C_MAX) {
        return Err(Error::Infeasible { max: C_MAX, argument: x });
    }
    let (mut lo, mut hi) = (1.0f64, C_MAX);
    while hi / lo - 1.0 > C_REL_TOL {
        let mid = (lo * hi).sqrt();
        if first_violation(rows, mode, &proxy, mid).is_none() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// First row whose two-sided bound fails at constant `c`.
pub fn first_violation<F: Fn(f64) -> f64>(rows: &[FitRow], mode: FitMode, proxy: &F, c: f64) -> Option<f64> {
    rows.iter().find_map(|r| {
        let (lower, upper) = match mode {
            FitMode::Count => (proxy(r.x / c) / c, c * proxy(c * r.x)),
            FitMode::Heat => (proxy(c * r.x) / c, c * proxy(r.x / c)),
        };
        if lower <= r.value && r.value <= upper {
            None
        } else {
            Some(r.x)
        }
    })
}

/// Least-squares slope of `log y` against `log x` over the rows with
/// positive data.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn rows_from(xs: &[f64], value: impl Fn(f64) -> f64, proxy: impl Fn(f64) -> f64) -> Vec<FitRow> {
        xs.iter()
            .map(|&x| FitRow {
                x,
                value: value(x),
                proxy: proxy(x),
            })
            .collect()
    }

    #[test]
    fn identical_curves_give_one() {
        let rows = rows_from(&[1.0, 2.0, 5.0], |x| x * x, |x| x * x);
        assert_eq!(fit_constant(&rows, FitMode::Count).unwrap(), 1.0);
        assert_eq!(fit_constant(&rows, FitMode::Heat).unwrap(), 1.0);
    }

    #[test]
    fn doubled_linear_count_gives_root_two() {
        let rows = rows_from(&[1.0, 2.0, 4.0, 8.0], |x| 2.0 * x, |x| x);
        let c = fit_constant(&rows, FitMode::Count).unwrap();
        assert!((c / 2f64.sqrt() - 1.0).abs() <= 1e-3, "{c}");
    }

    #[test]
    fn single_row_uses_its_two_inequalities() {
        let rows = [FitRow { x: 3.0, value: 5.0, proxy: 2.0 }];
        let c = fit_constant(&rows, FitMode::Count).unwrap();
        assert!((c / 2.5 - 1.0).abs() <= 1e-3 && c >= 2.5, "{c}");
        let rows = [FitRow { x: 3.0, value: 2.0, proxy: 8.0 }];
        let c = fit_constant(&rows, FitMode::Heat).unwrap();
        assert!((c / 4.0 - 1.0).abs() <= 1e-3 && c >= 4.0, "{c}");
    }

    #[test]
    fn infeasible_reports_argument() {
        let rows = [
            FitRow { x: 1.0, value: 1.0, proxy: 1.0 },
            FitRow { x: 2.0, value: 0.0, proxy: 1e9 },
        ];
        assert_eq!(
            fit_constant_with(&rows, FitMode::Count, |_| 1e9),
            Err(Error::Infeasible { max: C_MAX, argument: 1.0 })
        );
        assert!(fit_constant(&[], FitMode::Count).is_err());
        assert!(fit_constant(&[FitRow { x: -1.0, value: 1.0, proxy: 1.0 }], FitMode::Count).is_err());
    }

    #[test]
    fn heat_mode_with_exponential_proxy() {
        // Z(t) = 2 Z₀(t) with Z₀(t) = 1/t: C⁻¹/(Ct) ≤ 2/t ≤ C²/t needs C² ≥ 2
        let rows = rows_from(&[0.1, 0.5, 1.0, 2.0], |t| 2.0 / t, |t| 1.0 / t);
        let c = fit_constant_with(&rows, FitMode::Heat, |t| 1.0 / t).unwrap();
        assert!((c / 2f64.sqrt() - 1.0).abs() <= 1e-3, "{c}");
    }

    #[test]
    fn slope_of_power_law() {
        let xs = vec![1.0, 2.0, 4.0, 10.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 5.0 * x.powf(0.75)).collect();
        assert!((loglog_slope(&xs, &ys).unwrap() - 0.75).abs() < 1e-12);
        assert_eq!(loglog_slope(&[1.0], &[1.0]), None);
    }

    proptest! {
        #[test]
        fn fitted_constant_is_feasible_and_tight(k in 1.0f64..50.0, p in 0.3f64..2.0) {
            let xs = [1.0, 2.0, 3.0, 5.0, 8.0];
            let rows = rows_from(&xs, |x| k * x.powf(p), |x| x.powf(p));
            let proxy = |x: f64| x.powf(p);
            let c = fit_constant_with(&rows, FitMode::Count, proxy).unwrap();
            prop_assert!(first_violation(&rows, FitMode::Count, &proxy, c).is_none());
            prop_assert!(c >= 1.0);
            prop_assert!(first_violation(&rows, FitMode::Count, &proxy, c / (1.0 + 2.0 * C_REL_TOL)).is_some() || c == 1.0);
        }
    }
}
