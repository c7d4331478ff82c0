use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::polynomial::MultiPoly;

/// First-order operator `Σ_k a_k(x) ∂/∂x_k + i b(x)` with real polynomial
/// coefficients. Formally skew-adjoint when every `a_k` is divergence free.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyDiffOp {
    a: Vec<MultiPoly>,
    b: MultiPoly,
}

impl PolyDiffOp {
    pub fn new(a: Vec<MultiPoly>, b: MultiPoly) -> Result<Self> {
        let n = b.nvars();
        if a.len() != n {
            return Err(Error::Dimension {
                expected: n,
                found: a.len(),
            });
        }
        if let Some(p) = a.iter().find(|p| p.nvars() != n) {
            return Err(Error::Dimension {
                expected: n,
                found: p.nvars(),
            });
        }
        Ok(PolyDiffOp { a, b })
    }

    pub fn zero(n: usize) -> Self {
        PolyDiffOp {
            a: (0..n).map(|_| MultiPoly::zero(n)).collect(),
            b: MultiPoly::zero(n),
        }
    }

    /// `∂/∂x_k`.
    pub fn derivative(n: usize, k: usize) -> Result<Self> {
        let mut op = Self::zero(n);
        if k >= n {
            return Err(Error::Dimension { expected: n, found: k });
        }
        op.a[k] = MultiPoly::constant(n, 1.0);
        Ok(op)
    }

    /// Multiplication by `i b(x)`.
    pub fn multiplication(b: MultiPoly) -> Self {
        let n = b.nvars();
        PolyDiffOp {
            a: (0..n).map(|_| MultiPoly::zero(n)).collect(),
            b,
        }
    }

    pub fn nvars(&self) -> usize {
        self.b.nvars()
    }

    pub fn a(&self) -> &[MultiPoly] {
        &self.a
    }

    pub fn b(&self) -> &MultiPoly {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.b.is_zero() && self.a.iter().all(MultiPoly::is_zero)
    }

    /// `true` for multiplication operators (no derivative part).
    pub fn is_multiplication(&self) -> bool {
        self.a.iter().all(MultiPoly::is_zero)
    }

    /// `a_k` depends only on `x_0..x_{k-1}` for every `k`.
    pub fn is_triangular(&self) -> bool {
        self.a
            .iter()
            .enumerate()
            .all(|(k, ak)| (k..self.nvars()).all(|j| ak.independent_of(j)))
    }

    /// Commutator `[self, other]`, computed exactly on coefficients.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        let n = self.nvars();
        if other.nvars() != n {
            return Err(Error::Dimension {
                expected: n,
                found: other.nvars(),
            });
        }
        let along = |dir: &[MultiPoly], f: &MultiPoly| -> MultiPoly {
            let mut acc = MultiPoly::zero(n);
            for (k, ak) in dir.iter().enumerate() {
                if !ak.is_zero() {
                    acc = &acc + &(ak * &f.partial(k));
                }
            }
            acc
        };
        let a = (0..n)
            .map(|k| &along(&self.a, &other.a[k]) - &along(&other.a, &self.a[k]))
            .collect();
        let b = &along(&self.a, &other.b) - &along(&other.a, &self.b);
        Ok(PolyDiffOp { a, b })
    }

    pub fn scale(&self, s: f64) -> Self {
        PolyDiffOp {
            a: self.a.iter().map(|p| p.scale(s)).collect(),
            b: self.b.scale(s),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if other.nvars() != self.nvars() {
            return Err(Error::Dimension {
                expected: self.nvars(),
                found: other.nvars(),
            });
        }
        Ok(PolyDiffOp {
            a: self.a.iter().zip(&other.a).map(|(p, q)| p + q).collect(),
            b: &self.b + &other.b,
        })
    }

    /// Real part `Σ a_k(x) ξ_k + b(x)` of `-i` times the symbol.
    pub fn symbol_value(&self, x: &[f64], xi: &[f64]) -> f64 {
        let mut s = self.b.eval_unchecked(x);
        for (ak, &k) in self.a.iter().zip(xi) {
            if !ak.is_zero() {
                s += ak.eval_unchecked(x) * k;
            }
        }
        s
    }

    /// Complete symbol `i (Σ a_k(x) ξ_k + b(x))`.
    pub fn symbol(&self, x: &[f64], xi: &[f64]) -> Complex64 {
        Complex64::new(0.0, self.symbol_value(x, xi))
    }

    /// Largest coefficient magnitude, used for relative comparisons.
    pub fn max_abs_coeff(&self) -> f64 {
        self.a
            .iter()
            .chain(core::iter::once(&self.b))
            .fold(0.0f64, |m, p| m.max(p.max_abs_coeff()))
    }
}

impl fmt::Display for PolyDiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, ak) in self.a.iter().enumerate() {
            if ak.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "({ak}) d/dx{k}")?;
            first = false;
        }
        if !self.b.is_zero() || first {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "i({})", self.b)?;
        }
        Ok(())
    }
}
