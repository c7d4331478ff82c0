//! Sparse multivariate polynomials with real coefficients.
//!
//! Coefficients are `f64`. Addition, subtraction, multiplication and
//! differentiation only ever combine coefficients with integer multipliers, so
//! every identity holds bit-exactly for small-integer or dyadic inputs.
//! Terms are kept in graded lexicographic order, which is also the order of
//! [`MultiPoly::terms`].

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Exponent multi-index of a monomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn times(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Binary operation selector for [`arithmetic`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

/// Sparse polynomial in `nvars` real variables.
///
/// Invariant: no stored coefficient is exactly zero and every monomial has
/// length `nvars`.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, f64>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::one(nvars), c);
        p
    }

    /// The coordinate function `x_i` (zero-based).
    pub fn var(nvars: usize, i: usize) -> Result<Self> {
        if i >= nvars {
            return Err(Error::Dimension {
                expected: nvars,
                found: i + 1,
            });
        }
        let mut e = vec![0; nvars];
        e[i] = 1;
        Ok(Self::monomial(Monomial(e), 1.0))
    }

    pub fn monomial(exponents: Monomial, coeff: f64) -> Self {
        let mut p = Self::zero(exponents.0.len());
        p.add_term(exponents, coeff);
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` records, collecting
    /// repeated monomials.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, f64)>,
    {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::Dimension {
                    expected: nvars,
                    found: e.len(),
                });
            }
            if !c.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "non-finite coefficient {c}"
                )));
            }
            p.add_term(Monomial(e), c);
        }
        Ok(p)
    }

    fn add_term(&mut self, m: Monomial, c: f64) {
        if c == 0.0 {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if *v == 0.0 {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; the zero polynomial has degree -1.
    pub fn degree(&self) -> i32 {
        self.terms.keys().map(|m| m.degree() as i32).max().unwrap_or(-1)
    }

    /// Largest exponent of `x_i` over all terms.
    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|m| m.0[i]).max().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical graded lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, f64)> + '_ {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coeff(&self, exponents: &[u32]) -> f64 {
        self.terms
            .get(&Monomial(exponents.to_vec()))
            .copied()
            .unwrap_or(0.0)
    }

    /// True when the polynomial does not involve `x_i`.
    pub fn independent_of(&self, i: usize) -> bool {
        self.terms.keys().all(|m| m.0[i] == 0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |acc, c| acc.max(c.abs()))
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::Dimension {
                expected: self.nvars,
                found: other.nvars,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = Self::zero(self.nvars);
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                out.add_term(ma.times(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, &c) in &self.terms {
            out.add_term(m.clone(), c * s);
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::constant(self.nvars, 1.0);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Partial derivative in `x_i`.
    pub fn partial(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, &c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut d = m.0.clone();
            d[i] -= 1;
            out.add_term(Monomial(d), c * e as f64);
        }
        out
    }

    /// Iterated partial derivative `∂^α`.
    pub fn differentiate(&self, alpha: &[u32]) -> Result<Self> {
        if alpha.len() != self.nvars {
            return Err(Error::Dimension {
                expected: self.nvars,
                found: alpha.len(),
            });
        }
        let mut out = Self::zero(self.nvars);
        'terms: for (m, &c) in &self.terms {
            let mut factor = c;
            let mut d = m.0.clone();
            for (e, &a) in d.iter_mut().zip(alpha) {
                if *e < a {
                    continue 'terms;
                }
                for k in 0..a {
                    factor *= (*e - k) as f64;
                }
                *e -= a;
            }
            out.add_term(Monomial(d), factor);
        }
        Ok(out)
    }

    /// Evaluates by summing monomials in canonical order, with per-variable
    /// power tables so the result is deterministic.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.nvars {
            return Err(Error::Dimension {
                expected: self.nvars,
                found: x.len(),
            });
        }
        Ok(self.eval_unchecked(x))
    }

    /// Same as [`evaluate`](Self::evaluate) without the length check; the
    /// caller guarantees `x.len() == nvars`.
    pub fn eval_unchecked(&self, x: &[f64]) -> f64 {
        let mut sum = 0.0;
        for (m, &c) in &self.terms {
            let mut v = c;
            for (&xi, &e) in x.iter().zip(&m.0) {
                if e > 0 {
                    v *= powi(xi, e);
                }
            }
            sum += v;
        }
        sum
    }

    /// Expands `p(Q x)` where `q` holds the rows of an `nvars × nvars` matrix.
    pub fn substitute_linear(&self, q: &[Vec<f64>]) -> Result<Self> {
        let n = self.nvars;
        if q.len() != n {
            return Err(Error::Dimension {
                expected: n,
                found: q.len(),
            });
        }
        if let Some(row) = q.iter().find(|r| r.len() != n) {
            return Err(Error::Dimension {
                expected: n,
                found: row.len(),
            });
        }
        // (Qx)_i as linear polynomials, with cached powers.
        let mut images = Vec::with_capacity(n);
        for row in q {
            let lin = Self::from_terms(
                n,
                row.iter().enumerate().map(|(j, &c)| {
                    let mut e = vec![0; n];
                    e[j] = 1;
                    (e, c)
                }),
            )?;
            images.push(lin);
        }
        let powers: Vec<Vec<MultiPoly>> = images
            .iter()
            .enumerate()
            .map(|(i, lin)| {
                let top = self.degree_in(i);
                let mut table = Vec::with_capacity(top as usize + 1);
                table.push(Self::constant(n, 1.0));
                for k in 1..=top as usize {
                    let next = &table[k - 1] * lin;
                    table.push(next);
                }
                table
            })
            .collect();
        let mut out = Self::zero(n);
        for (m, &c) in &self.terms {
            let mut prod = Self::constant(n, c);
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    prod = &prod * &powers[i][e as usize];
                }
            }
            out = &out + &prod;
        }
        Ok(out)
    }
}

/// All exponent multi-indices in `nvars` variables with total degree at most
/// `max_degree`, graded lexicographically.
pub fn multi_indices(nvars: usize, max_degree: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; nvars];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur[i] = e;
            rec(i + 1, left - e, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, max_degree, &mut cur, &mut out);
    let mut keyed: Vec<Monomial> = out.into_iter().map(Monomial).collect();
    keyed.sort();
    keyed.into_iter().map(|m| m.0).collect()
}

fn powi(x: f64, e: u32) -> f64 {
    let mut acc = 1.0;
    let mut base = x;
    let mut k = e;
    while k > 0 {
        if k & 1 == 1 {
            acc *= base;
        }
        base *= base;
        k >>= 1;
    }
    acc
}

/// Checked binary arithmetic.
pub fn arithmetic(p: &MultiPoly, q: &MultiPoly, op: ArithOp) -> Result<MultiPoly> {
    match op {
        ArithOp::Add => p.checked_add(q),
        ArithOp::Sub => p.checked_sub(q),
        ArithOp::Mul => p.checked_mul(q),
    }
}

// Operator sugar; these panic on mismatched `nvars`, use the `checked_*`
// methods when inputs are not known to agree.
impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_add(rhs).expect("polynomial nvars mismatch")
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_sub(rhs).expect("polynomial nvars mismatch")
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_mul(rhs).expect("polynomial nvars mismatch")
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(-1.0)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*x{}", i + 1)?,
                    _ => write!(f, "*x{}^{}", i + 1, e)?,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn x(n: usize, i: usize) -> MultiPoly {
        MultiPoly::var(n, i).unwrap()
    }

    fn c(n: usize, v: f64) -> MultiPoly {
        MultiPoly::constant(n, v)
    }

    #[test]
    fn add_cancels_constants() {
        let p = &x(1, 0) + &c(1, 1.0);
        let q = &x(1, 0) - &c(1, 1.0);
        let sum = arithmetic(&p, &q, ArithOp::Add).unwrap();
        assert_eq!(sum, x(1, 0).scale(2.0));
        assert_eq!(sum.len(), 1);
    }

    #[test]
    fn square_and_difference_of_squares() {
        let sq = arithmetic(&x(1, 0), &x(1, 0), ArithOp::Mul).unwrap();
        assert_eq!(sq.coeff(&[2]), 1.0);
        assert_eq!(sq.len(), 1);

        let a = &x(2, 0) + &x(2, 1);
        let b = &x(2, 0) - &x(2, 1);
        let prod = &a * &b;
        let expected = &(&x(2, 0) * &x(2, 0)) - &(&x(2, 1) * &x(2, 1));
        assert_eq!(prod, expected);
        assert_eq!(prod.coeff(&[1, 1]), 0.0);
    }

    #[test]
    fn mismatched_nvars_is_a_dimension_error() {
        let err = arithmetic(&x(1, 0), &x(2, 0), ArithOp::Add).unwrap_err();
        assert_eq!(
            err,
            Error::Dimension {
                expected: 1,
                found: 2
            }
        );
    }

    #[test]
    fn degree_conventions() {
        assert_eq!(MultiPoly::zero(3).degree(), -1);
        assert_eq!(c(2, 7.0).degree(), 0);
        assert_eq!((&x(2, 0) * &x(2, 1)).degree(), 2);
    }

    #[test]
    fn derivatives() {
        let x2 = x(1, 0).pow(2);
        assert_eq!(x2.differentiate(&[1]).unwrap(), x(1, 0).scale(2.0));
        assert!(c(1, 7.0).differentiate(&[1]).unwrap().is_zero());
        let x4 = x(1, 0).pow(4);
        assert_eq!(x4.differentiate(&[4]).unwrap(), c(1, 24.0));
        assert!(x4.differentiate(&[5]).unwrap().is_zero());
        assert!(x4.differentiate(&[1, 0]).is_err());
    }

    #[test]
    fn evaluation() {
        assert_eq!(x(1, 0).pow(2).evaluate(&[3.0]).unwrap(), 9.0);
        let p = &(&x(2, 0) * &x(2, 1)) + &c(2, 1.0);
        assert_eq!(p.evaluate(&[2.0, 5.0]).unwrap(), 11.0);
        assert_eq!(MultiPoly::zero(2).evaluate(&[1.5, -3.0]).unwrap(), 0.0);
        assert!(p.evaluate(&[1.0]).is_err());
    }

    #[test]
    fn linear_substitution() {
        let id = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert_eq!(x(2, 0).substitute_linear(&id).unwrap(), x(2, 0));

        // rotation by π/2: (Qx)_1 = -x2, so x1² ↦ x2²
        let rot = vec![vec![0.0, -1.0], vec![1.0, 0.0]];
        let p = x(2, 0).pow(2).substitute_linear(&rot).unwrap();
        assert_eq!(p, x(2, 1).pow(2));

        let t = 3.0;
        let p = x(1, 0).pow(2).substitute_linear(&[vec![t]]).unwrap();
        assert_eq!(p, x(1, 0).pow(2).scale(t * t));

        assert!(x(2, 0).substitute_linear(&[vec![1.0, 0.0]]).is_err());
        assert!(x(2, 0)
            .substitute_linear(&[vec![1.0], vec![0.0, 1.0]])
            .is_err());
    }

    #[test]
    fn canonical_order_is_graded() {
        let p = MultiPoly::from_terms(
            2,
            vec![
                (vec![0, 2], 1.0),
                (vec![0, 0], 3.0),
                (vec![1, 0], 2.0),
                (vec![2, 0], 4.0),
                (vec![0, 1], 5.0),
            ],
        )
        .unwrap();
        let order: Vec<Vec<u32>> = p.terms().map(|(m, _)| m.exponents().to_vec()).collect();
        assert_eq!(
            order,
            vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![0, 2]]
        );
    }

    fn small_poly(nvars: usize) -> impl Strategy<Value = MultiPoly> {
        prop::collection::vec(
            (prop::collection::vec(0u32..4, nvars), -4i32..=4),
            0..6,
        )
        .prop_map(move |terms| {
            MultiPoly::from_terms(
                nvars,
                terms.into_iter().map(|(e, c)| (e, c as f64 * 0.5)),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn differentiation_is_linear(p in small_poly(2), q in small_poly(2), a in -3i32..=3, b in -3i32..=3) {
            let alpha = [1u32, 2];
            let lhs = (&p.scale(a as f64) + &q.scale(b as f64)).differentiate(&alpha).unwrap();
            let rhs = &p.differentiate(&alpha).unwrap().scale(a as f64)
                + &q.differentiate(&alpha).unwrap().scale(b as f64);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn leibniz_rule(p in small_poly(2), q in small_poly(2)) {
            let lhs = (&p * &q).partial(0);
            let rhs = &(&p.partial(0) * &q) + &(&p * &q.partial(0));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn mixed_partials_commute(p in small_poly(3)) {
            prop_assert_eq!(p.partial(0).partial(2), p.partial(2).partial(0));
            prop_assert_eq!(p.partial(1).partial(2), p.partial(2).partial(1));
        }

        #[test]
        fn substitution_matches_evaluation(
            p in small_poly(2),
            q in prop::collection::vec(-2.0f64..2.0, 4),
            pt in prop::collection::vec(-2.0f64..2.0, 2),
        ) {
            let rows = vec![vec![q[0], q[1]], vec![q[2], q[3]]];
            let sub = p.substitute_linear(&rows).unwrap();
            let qx = [q[0] * pt[0] + q[1] * pt[1], q[2] * pt[0] + q[3] * pt[1]];
            let direct = p.evaluate(&qx).unwrap();
            let via = sub.evaluate(&pt).unwrap();
            let scale = p.terms().map(|(m, c)| {
                c.abs() * m.exponents().iter().fold(1.0, |acc, &e| acc * 4.0f64.powi(e as i32))
            }).sum::<f64>().max(1.0);
            prop_assert!((direct - via).abs() <= 1e-12 * scale, "{direct} vs {via}");
        }
    }
}
