//! Polynomial electric and magnetic Schrödinger operators
//! `P = Σ_j (D_j - A_j(x))² + V(x)`, their magnetic field, the weight
//! `M(x)` and the non-degeneracy test.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // resolved through std when dev-dependency features enable it
use num_traits::Float as _;

use crate::error::{Error, Result};
use crate::linalg;
use crate::polynomial::{multi_indices, MultiPoly};

/// Relative singular-value cut for the degeneracy null space.
pub const DEGENERACY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct SchrodingerModel {
    n: usize,
    vector_potential: Vec<MultiPoly>,
    potential: MultiPoly,
    potential_root: Option<MultiPoly>,
    degree: usize,
}

/// Antisymmetric matrix of magnetic field polynomials, `b[j][k] = ∂A_j/∂x_k - ∂A_k/∂x_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct MagneticMatrix {
    pub b: Vec<Vec<MultiPoly>>,
}

impl MagneticMatrix {
    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn is_zero(&self) -> bool {
        self.b.iter().flatten().all(MultiPoly::is_zero)
    }
}

/// Outcome of the grid spot-check of `V ≥ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct PositivityCheck {
    pub min_value: f64,
    pub at: Vec<f64>,
    /// `true` when `V` was supplied as an explicit square.
    pub certified: bool,
}

impl PositivityCheck {
    pub fn passed(&self) -> bool {
        self.certified || self.min_value >= 0.0
    }
}

impl SchrodingerModel {
    /// Model with vector potential `a` (one polynomial per coordinate) and
    /// electric potential `v`. The degree bound is the largest degree present.
    pub fn new(vector_potential: Vec<MultiPoly>, potential: MultiPoly) -> Result<Self> {
        let n = potential.nvars();
        if n == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if vector_potential.len() != n {
            return Err(Error::Dimension {
                expected: n,
                found: vector_potential.len(),
            });
        }
        if let Some(a) = vector_potential.iter().find(|a| a.nvars() != n) {
            return Err(Error::Dimension {
                expected: n,
                found: a.nvars(),
            });
        }
        let degree = core::iter::once(&potential)
            .chain(&vector_potential)
            .map(|p| p.degree().max(0) as usize)
            .max()
            .unwrap_or(0);
        Ok(SchrodingerModel {
            n,
            vector_potential,
            potential,
            potential_root: None,
            degree,
        })
    }

    /// Model whose electric potential is the square `w²`, which makes `V ≥ 0`
    /// hold by construction.
    pub fn from_square_root(vector_potential: Vec<MultiPoly>, root: MultiPoly) -> Result<Self> {
        let v = &root * &root;
        let mut model = Self::new(vector_potential, v)?;
        model.potential_root = Some(root);
        Ok(model)
    }

    /// Raises the degree bound `r` above the automatic one.
    pub fn with_degree_bound(mut self, r: usize) -> Result<Self> {
        if r < self.degree {
            return Err(Error::InvalidParameter(format!(
                "degree bound {r} is below the degree {} of the data",
                self.degree
            )));
        }
        self.degree = r;
        Ok(self)
    }

    /// Purely electric model `-Δ + V`.
    pub fn electric(potential: MultiPoly) -> Result<Self> {
        let n = potential.nvars();
        Self::new(vec![MultiPoly::zero(n); n], potential)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree_bound(&self) -> usize {
        self.degree
    }

    pub fn potential(&self) -> &MultiPoly {
        &self.potential
    }

    pub fn potential_root(&self) -> Option<&MultiPoly> {
        self.potential_root.as_ref()
    }

    pub fn vector_potential(&self) -> &[MultiPoly] {
        &self.vector_potential
    }

    pub fn has_magnetic_potential(&self) -> bool {
        self.vector_potential.iter().any(|a| !a.is_zero())
    }

    pub fn magnetic_matrix(&self) -> MagneticMatrix {
        let n = self.n;
        let mut b = vec![vec![MultiPoly::zero(n); n]; n];
        for j in 0..n {
            for k in j + 1..n {
                let bjk = &self.vector_potential[j].partial(k) - &self.vector_potential[k].partial(j);
                b[k][j] = -&bjk;
                b[j][k] = bjk;
            }
        }
        MagneticMatrix { b }
    }

    /// Precomputes every derivative polynomial entering `M(x)`.
    pub fn weight(&self) -> MWeight {
        let r = self.degree as u32;
        let alphas = multi_indices(self.n, r);
        let mut electric = Vec::new();
        for alpha in &alphas {
            let d = self
                .potential
                .differentiate(alpha)
                .expect("multi-index has model dimension");
            if !d.is_zero() {
                let order: u32 = alpha.iter().sum();
                electric.push((d, 1.0 / (order as f64 + 2.0)));
            }
        }
        let field = self.magnetic_matrix();
        let mut magnetic = Vec::new();
        for j in 0..self.n {
            for k in j + 1..self.n {
                for alpha in &alphas {
                    let d = field.b[j][k]
                        .differentiate(alpha)
                        .expect("multi-index has model dimension");
                    if !d.is_zero() {
                        let order: u32 = alpha.iter().sum();
                        magnetic.push((d, 1.0 / (order as f64 + 2.0)));
                    }
                }
            }
        }
        MWeight {
            n: self.n,
            electric,
            magnetic,
        }
    }

    /// Basis of directions `u` with `u·∇V ≡ 0` and `u·∇B_jk ≡ 0` for all
    /// `j < k`. Empty exactly when the model is non-degenerate.
    pub fn degeneracy_directions(&self) -> Vec<Vec<f64>> {
        let n = self.n;
        let field = self.magnetic_matrix();
        let mut sources = vec![&self.potential];
        for j in 0..n {
            for k in j + 1..n {
                sources.push(&field.b[j][k]);
            }
        }
        // one row per (source, monomial), one column per coordinate direction
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for src in sources {
            let grads: Vec<MultiPoly> = (0..n).map(|i| src.partial(i)).collect();
            let mut monomials: Vec<_> = grads
                .iter()
                .flat_map(|g| g.terms().map(|(m, _)| m.clone()))
                .collect();
            monomials.sort();
            monomials.dedup();
            for m in monomials {
                rows.push(grads.iter().map(|g| g.coeff(m.exponents())).collect());
            }
        }
        if rows.is_empty() {
            rows.push(vec![0.0; n]);
        }
        linalg::null_space(&rows, n, DEGENERACY_TOL)
    }

    /// Fails with the first degeneracy direction when there is one.
    pub fn require_nondegenerate(&self) -> Result<()> {
        match self.degeneracy_directions().into_iter().next() {
            Some(direction) => Err(Error::Degenerate { direction }),
            None => Ok(()),
        }
    }

    /// Spot-checks `V ≥ 0` on a tensor grid of `points_per_dim^n` points in
    /// `[-half_width, half_width]^n`.
    pub fn positivity_check(&self, half_width: f64, points_per_dim: usize) -> PositivityCheck {
        let mut best = f64::INFINITY;
        let mut at = vec![0.0; self.n];
        for_each_grid_point(self.n, half_width, points_per_dim, |x| {
            let v = self.potential.eval_unchecked(x);
            if v < best {
                best = v;
                at.copy_from_slice(x);
            }
        });
        PositivityCheck {
            min_value: best,
            at,
            certified: self.potential_root.is_some(),
        }
    }
}

/// Visits every node of a closed tensor grid on `[-half_width, half_width]^n`.
pub fn for_each_grid_point<F: FnMut(&[f64])>(n: usize, half_width: f64, pts: usize, mut f: F) {
    let pts = pts.max(2);
    let step = 2.0 * half_width / (pts - 1) as f64;
    let mut idx = vec![0usize; n];
    let mut x = vec![0.0; n];
    loop {
        for (xi, &k) in x.iter_mut().zip(&idx) {
            *xi = -half_width + step * k as f64;
        }
        f(&x);
        let mut d = 0;
        loop {
            if d == n {
                return;
            }
            idx[d] += 1;
            if idx[d] < pts {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// Derivative tables for `M(x) = Σ |∂^α V|^{1/(|α|+2)} + Σ_{j<k} |∂^α B_jk|^{1/(|α|+2)}`
/// with `|α| ≤ r`.
#[derive(Clone, Debug)]
pub struct MWeight {
    n: usize,
    electric: Vec<(MultiPoly, f64)>,
    magnetic: Vec<(MultiPoly, f64)>,
}

impl MWeight {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn m_weight(&self, x: &[f64]) -> f64 {
        self.electric_part(x) + self.magnetic_part(x)
    }

    pub fn electric_part(&self, x: &[f64]) -> f64 {
        sum_powers(&self.electric, x)
    }

    pub fn magnetic_part(&self, x: &[f64]) -> f64 {
        sum_powers(&self.magnetic, x)
    }

    /// `M(x, ξ) = |ξ| + M(x)`.
    pub fn m_symbol(&self, x: &[f64], xi: &[f64]) -> f64 {
        let norm = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        norm + self.m_weight(x)
    }
}

fn sum_powers(terms: &[(MultiPoly, f64)], x: &[f64]) -> f64 {
    terms
        .iter()
        .map(|(p, e)| {
            let v = p.eval_unchecked(x).abs();
            if v == 0.0 {
                0.0
            } else {
                v.powf(*e)
            }
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn x(n: usize, i: usize) -> MultiPoly {
        MultiPoly::var(n, i).unwrap()
    }

    #[test]
    fn constant_field_from_linear_potential() {
        let model = SchrodingerModel::new(
            vec![MultiPoly::zero(2), x(2, 0)],
            MultiPoly::zero(2),
        )
        .unwrap();
        let b = model.magnetic_matrix();
        assert_eq!(b.b[0][1], MultiPoly::constant(2, -1.0));
        assert_eq!(b.b[1][0], MultiPoly::constant(2, 1.0));
        assert!(b.b[0][0].is_zero() && b.b[1][1].is_zero());
        // cross-check with differentiate()
        let a = model.vector_potential();
        let by_alpha = &a[0].differentiate(&[0, 1]).unwrap() - &a[1].differentiate(&[1, 0]).unwrap();
        assert_eq!(by_alpha, b.b[0][1]);
    }

    #[test]
    fn pure_gauge_and_zero_potential_have_no_field() {
        let phi = &x(2, 0) * &x(2, 1);
        let gauge = SchrodingerModel::new(vec![phi.partial(0), phi.partial(1)], MultiPoly::zero(2)).unwrap();
        assert!(gauge.magnetic_matrix().is_zero());
        let free = SchrodingerModel::electric(MultiPoly::zero(3)).unwrap();
        assert!(free.magnetic_matrix().is_zero());
    }

    #[test]
    fn harmonic_weight_values() {
        let model = SchrodingerModel::electric(x(1, 0).pow(2)).unwrap();
        let w = model.weight();
        assert!((w.m_weight(&[0.0]) - 2f64.powf(0.25)).abs() < 1e-15);
        let at = 1.7f64;
        let expected = at.abs() + (2.0 * at).powf(1.0 / 3.0) + 2f64.powf(0.25);
        assert!((w.m_weight(&[at]) - expected).abs() < 1e-14);
        assert!((w.m_symbol(&[0.0], &[0.0]) - 2f64.powf(0.25)).abs() < 1e-15);
    }

    #[test]
    fn zero_model_has_zero_weight() {
        let w = SchrodingerModel::electric(MultiPoly::zero(2)).unwrap().weight();
        assert_eq!(w.m_weight(&[1.0, -3.0]), 0.0);
        assert_eq!(w.m_symbol(&[0.0, 0.0], &[3.0, 4.0]), 5.0);
    }

    #[test]
    fn quartic_weight_grows_like_square() {
        let w = SchrodingerModel::electric(x(1, 0).pow(4)).unwrap().weight();
        let big = 1e3;
        let ratio = w.m_weight(&[big]) / (big * big);
        assert!((ratio - 1.0).abs() < 1e-2, "{ratio}");
    }

    #[test]
    fn degeneracy_examples() {
        let iso = SchrodingerModel::electric(&x(2, 0).pow(2) + &x(2, 1).pow(2)).unwrap();
        assert!(iso.degeneracy_directions().is_empty());

        let sum = &x(2, 0) + &x(2, 1);
        let line = SchrodingerModel::electric(sum.pow(2)).unwrap();
        let dirs = line.degeneracy_directions();
        assert_eq!(dirs.len(), 1);
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let dot = dirs[0][0] * s - dirs[0][1] * s;
        assert!(dot.abs() > 0.999_999, "{:?}", dirs[0]);
        assert!(matches!(line.require_nondegenerate(), Err(Error::Degenerate { .. })));

        let free = SchrodingerModel::electric(MultiPoly::zero(3)).unwrap();
        assert_eq!(free.degeneracy_directions().len(), 3);
    }

    #[test]
    fn magnetic_field_lifts_degeneracy() {
        // V = x1², A = (0, x1): B12 = -1 is constant, so x2 remains a degenerate direction
        let m = SchrodingerModel::new(vec![MultiPoly::zero(2), x(2, 0)], x(2, 0).pow(2)).unwrap();
        assert_eq!(m.degeneracy_directions().len(), 1);
        // A = (0, x1²): B12 = -2 x1 does not fix x2 either
        let m = SchrodingerModel::new(vec![MultiPoly::zero(2), x(2, 0).pow(2)], x(2, 0).pow(2)).unwrap();
        assert_eq!(m.degeneracy_directions().len(), 1);
        // A = (0, x1 x2): B12 = -x2 involves x2
        let m = SchrodingerModel::new(
            vec![MultiPoly::zero(2), &x(2, 0) * &x(2, 1)],
            x(2, 0).pow(2),
        )
        .unwrap();
        assert!(m.degeneracy_directions().is_empty());
    }

    #[test]
    fn degree_bound_rules() {
        let m = SchrodingerModel::electric(x(1, 0).pow(4)).unwrap();
        assert_eq!(m.degree_bound(), 4);
        assert!(m.clone().with_degree_bound(3).is_err());
        assert_eq!(m.with_degree_bound(6).unwrap().degree_bound(), 6);
        assert!(SchrodingerModel::new(vec![], x(1, 0)).is_err());
    }

    #[test]
    fn positivity_spot_check() {
        let neg = SchrodingerModel::electric(&x(1, 0).pow(2) - &MultiPoly::constant(1, 1.0)).unwrap();
        let check = neg.positivity_check(5.0, 41);
        assert!(!check.passed());
        assert!((check.min_value + 1.0).abs() < 1e-12);
        let sq = SchrodingerModel::from_square_root(vec![MultiPoly::zero(1)], &x(1, 0) - &MultiPoly::constant(1, 1.0)).unwrap();
        assert!(sq.positivity_check(5.0, 41).passed());
        assert_eq!(sq.potential().coeff(&[1]), -2.0);
    }

    fn small_poly(nvars: usize) -> impl Strategy<Value = MultiPoly> {
        prop::collection::vec((prop::collection::vec(0u32..3, nvars), -3i32..=3), 0..5).prop_map(
            move |t| MultiPoly::from_terms(nvars, t.into_iter().map(|(e, c)| (e, c as f64))).unwrap(),
        )
    }

    proptest! {
        #[test]
        fn magnetic_matrix_is_antisymmetric(a0 in small_poly(3), a1 in small_poly(3), a2 in small_poly(3)) {
            let m = SchrodingerModel::new(vec![a0, a1, a2], MultiPoly::zero(3)).unwrap();
            let b = m.magnetic_matrix();
            for j in 0..3 {
                prop_assert!(b.b[j][j].is_zero());
                for k in 0..3 {
                    prop_assert_eq!(&b.b[j][k], &-&b.b[k][j]);
                }
            }
        }

        #[test]
        fn gauge_leaves_magnetic_weight_unchanged(
            a0 in small_poly(2), a1 in small_poly(2), phi in small_poly(2),
            px in -2.0f64..2.0, py in -2.0f64..2.0,
        ) {
            let v = MultiPoly::zero(2);
            let base = SchrodingerModel::new(vec![a0.clone(), a1.clone()], v.clone()).unwrap();
            let gauged = SchrodingerModel::new(
                vec![&a0 + &phi.partial(0), &a1 + &phi.partial(1)], v,
            ).unwrap().with_degree_bound(base.degree_bound().max(phi.degree().max(0) as usize)).unwrap();
            let base = base.with_degree_bound(gauged.degree_bound()).unwrap();
            prop_assert_eq!(base.magnetic_matrix(), gauged.magnetic_matrix());
            let pt = [px, py];
            prop_assert_eq!(base.weight().magnetic_part(&pt), gauged.weight().magnetic_part(&pt));
        }

        #[test]
        fn m_symbol_is_lipschitz_in_xi(
            px in -3.0f64..3.0, a in prop::collection::vec(-5.0f64..5.0, 2), b in prop::collection::vec(-5.0f64..5.0, 2),
        ) {
            let w = SchrodingerModel::electric(&x(2, 0).pow(2) + &x(2, 1).pow(4)).unwrap().weight();
            let pt = [px, -px / 2.0];
            let diff = (w.m_symbol(&pt, &a) - w.m_symbol(&pt, &b)).abs();
            let dist = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
            prop_assert!(diff <= dist + 1e-12);
            prop_assert!(w.m_symbol(&pt, &a) >= (a[0] * a[0] + a[1] * a[1]).sqrt());
        }
    }

    #[test]
    fn nondegenerate_models_have_positive_weight_on_grid() {
        let models = [
            SchrodingerModel::electric(&x(2, 0).pow(2) + &x(2, 1).pow(2)).unwrap(),
            SchrodingerModel::new(vec![MultiPoly::zero(2), &x(2, 0) * &x(2, 1)], x(2, 0).pow(2)).unwrap(),
            SchrodingerModel::electric(x(1, 0).pow(4)).unwrap(),
        ];
        for m in &models {
            assert!(m.degeneracy_directions().is_empty());
            let w = m.weight();
            let mut min = f64::INFINITY;
            for_each_grid_point(m.dim(), 5.0, 41, |p| min = min.min(w.m_weight(p)));
            assert!(min > 0.0, "{min}");
        }
    }
}
