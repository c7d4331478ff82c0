//! Piecewise power-law interpolation of tabulated nonnegative curves.

#[allow(unused_imports)] // resolved through std when dev-dependency features enable it
use num_traits::Float as _;

/// Interpolates `(xs, ys)` at `x`, with `xs` increasing and positive.
///
/// Between two positive values the curve is a power law (linear in log-log);
/// a segment touching zero is linear. Outside the table the end segment is
/// extended the same way, clamped at zero.
pub fn power_law(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    match xs.len() {
        0 => return 0.0,
        1 => return ys[0],
        _ => {}
    }
    let i = match xs.iter().position(|&v| v > x) {
        Some(0) => 0,
        Some(k) => k - 1,
        None => xs.len() - 2,
    }
    .min(xs.len() - 2);
    let (x0, x1, y0, y1) = (xs[i], xs[i + 1], ys[i], ys[i + 1]);
    if y0 > 0.0 && y1 > 0.0 && x0 > 0.0 && x > 0.0 {
        let p = (y1 / y0).ln() / (x1 / x0).ln();
        return y0 * (x / x0).powf(p);
    }
    (y0 + (y1 - y0) * (x - x0) / (x1 - x0)).max(0.0)
}
