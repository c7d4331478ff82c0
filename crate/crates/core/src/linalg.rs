//! Small dense kernels: one-sided Jacobi SVD, least squares, symmetric
//! tridiagonal eigensolver and a Nelder–Mead minimizer.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // resolved through std when dev-dependency features enable it
use num_traits::Float as _;


/// Thin SVD of a dense `rows × cols` matrix, `cols` small.
#[derive(Clone, Debug)]
pub struct Svd {
    /// Singular values, unsorted, one per column.
    pub singular: Vec<f64>,
    /// Right singular vectors; `v[j]` pairs with `singular[j]`.
    pub v: Vec<Vec<f64>>,
    /// Left singular directions scaled by the singular value (`A v_j`).
    pub av: Vec<Vec<f64>>,
}

/// Hestenes one-sided Jacobi. Accurate for small singular values, which the
/// null-space tests depend on.
pub fn svd_jacobi(a: &[Vec<f64>], cols: usize) -> Svd {
    let rows = a.len();
    let mut colv: Vec<Vec<f64>> = (0..cols)
        .map(|j| (0..rows).map(|i| a[i][j]).collect())
        .collect();
    let mut v: Vec<Vec<f64>> = (0..cols)
        .map(|j| {
            let mut e = vec![0.0; cols];
            e[j] = 1.0;
            e
        })
        .collect();
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha: f64 = colv[p].iter().map(|x| x * x).sum();
                let beta: f64 = colv[q].iter().map(|x| x * x).sum();
                let gamma: f64 = colv[p].iter().zip(&colv[q]).map(|(x, y)| x * y).sum();
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (lo, hi) = colv.split_at_mut(q);
                rotate(&mut lo[p], &mut hi[0], c, s);
                let (lo, hi) = v.split_at_mut(q);
                rotate(&mut lo[p], &mut hi[0], c, s);
            }
        }
        if !rotated {
            break;
        }
    }
    let singular = colv
        .iter()
        .map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    Svd {
        singular,
        v,
        av: colv,
    }
}

fn rotate(x: &mut [f64], y: &mut [f64], c: f64, s: f64) {
    for (a, b) in x.iter_mut().zip(y.iter_mut()) {
        let (xa, yb) = (*a, *b);
        *a = c * xa - s * yb;
        *b = s * xa + c * yb;
    }
}

/// Orthonormal basis of the null space of `a` (`rows × cols`): right singular
/// vectors whose singular value is at most `rel_tol` times the largest. A zero
/// matrix has the whole space as null space.
pub fn null_space(a: &[Vec<f64>], cols: usize, rel_tol: f64) -> Vec<Vec<f64>> {
    let svd = svd_jacobi(a, cols);
    let smax = svd.singular.iter().fold(0.0f64, |m, &s| m.max(s));
    let mut out: Vec<(f64, Vec<f64>)> = svd
        .singular
        .iter()
        .zip(svd.v)
        .filter(|(s, _)| smax == 0.0 || **s <= rel_tol * smax)
        .map(|(&s, v)| (s, v))
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out.into_iter().map(|(_, v)| canonical_sign(v)).collect()
}

/// Flips `v` so its largest-magnitude entry is positive.
pub fn canonical_sign(mut v: Vec<f64>) -> Vec<f64> {
    let mut best = 0.0f64;
    let mut sign = 1.0;
    for &x in &v {
        if x.abs() > best.abs() + 1e-12 {
            best = x;
            sign = x.signum();
        }
    }
    for x in v.iter_mut() {
        *x *= sign;
    }
    v
}

/// Minimum-norm least-squares solution of `a x = b`. Returns `None` when `a`
/// has a singular value below `rel_tol` times the largest (rank deficient).
pub fn least_squares(a: &[Vec<f64>], cols: usize, b: &[f64], rel_tol: f64) -> Option<Vec<f64>> {
    let svd = svd_jacobi(a, cols);
    let smax = svd.singular.iter().fold(0.0f64, |m, &s| m.max(s));
    if smax == 0.0 || svd.singular.iter().any(|&s| s <= rel_tol * smax) {
        return None;
    }
    let mut x = vec![0.0; cols];
    for j in 0..cols {
        let s2 = svd.singular[j] * svd.singular[j];
        let coef: f64 = svd.av[j].iter().zip(b).map(|(u, bi)| u * bi).sum::<f64>() / s2;
        for (xi, vi) in x.iter_mut().zip(&svd.v[j]) {
            *xi += coef * vi;
        }
    }
    Some(x)
}

/// Eigen-decomposition of a real symmetric tridiagonal matrix by implicit QL
/// with Wilkinson-type shifts.
///
/// `off[i]` couples rows `i` and `i + 1`. Returns eigenvalues in ascending
/// order and the eigenvectors as a row-major `n × n` matrix whose column `j`
/// belongs to eigenvalue `j`. `None` if an eigenvalue fails to converge.
pub fn tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n.saturating_sub(1)].copy_from_slice(&off[..n.saturating_sub(1)]);
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return None;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    let f = z[k * n + i + 1];
                    z[k * n + i + 1] = s * z[k * n + i] + c * f;
                    z[k * n + i] = c * z[k * n + i] - s * f;
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let vals = order.iter().map(|&j| d[j]).collect();
    let mut vecs = vec![0.0; n * n];
    for (newj, &oldj) in order.iter().enumerate() {
        for k in 0..n {
            vecs[k * n + newj] = z[k * n + oldj];
        }
    }
    Some((vals, vecs))
}

/// Derivative-free local minimization. Stops after `max_iter` iterations or
/// when the simplex function spread falls below `tol`. Never returns a point
/// worse than `x0`.
pub fn nelder_mead<F>(f: F, x0: &[f64], step: f64, max_iter: usize, tol: f64) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += step;
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| f(p)).collect();
    for _ in 0..max_iter {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();
        if (values[n] - values[0]).abs() <= tol {
            break;
        }
        let mut centroid = vec![0.0; n];
        for p in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(p) {
                *c += x / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n])
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };
        let reflected = along(-1.0);
        let fr = f(&reflected);
        if fr < values[0] {
            let expanded = along(-2.0);
            let fe = f(&expanded);
            if fe < fr {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
        } else if fr < values[n - 1] {
            simplex[n] = reflected;
            values[n] = fr;
        } else {
            let contracted = if fr < values[n] { along(-0.5) } else { along(0.5) };
            let fc = f(&contracted);
            if fc < values[n].min(fr) {
                simplex[n] = contracted;
                values[n] = fc;
            } else {
                let best = simplex[0].clone();
                for i in 1..=n {
                    for (x, b) in simplex[i].iter_mut().zip(&best) {
                        *x = b + 0.5 * (*x - b);
                    }
                    values[i] = f(&simplex[i]);
                }
            }
        }
    }
    let (mut bi, mut bv) = (0, values[0]);
    for (i, &v) in values.iter().enumerate() {
        if v < bv {
            bi = i;
            bv = v;
        }
    }
    (simplex.swap_remove(bi), bv)
}
