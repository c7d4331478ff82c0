use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

#[allow(unused_imports)] // resolved through std when dev-dependency features enable it
use num_traits::Float as _;

use crate::error::{AlgebraViolation, Error, Result};
use crate::linalg;

/// Largest admissible `p^r` for the sequence sums.
pub const SEQUENCE_CAP: usize = 100_000;

/// Relative tolerance of the Jacobi check. Exact for dyadic constants.
const JACOBI_TOL: f64 = 1e-12;

/// Stratified nilpotent Lie algebra with basis `Y_0..Y_{dim-1}` (zero-based)
/// and structure constants `[Y_i, Y_j] = Σ_k c[i][j][k] Y_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct StratifiedAlgebra {
    dim: usize,
    strata: Vec<Range<usize>>,
    c: Vec<Vec<Vec<f64>>>,
}

impl StratifiedAlgebra {
    /// Builds the algebra from stratum sizes and the nonzero structure
    /// constants `(i, j, k, value)`. Only antisymmetric completion is applied:
    /// `(i, j, k, v)` also sets `c[j][i][k] = -v` unless that entry is given.
    /// Nothing else is validated; see [`StratifiedAlgebra::validate`].
    pub fn from_constants(sizes: &[usize], constants: &[(usize, usize, usize, f64)]) -> Result<Self> {
        let dim: usize = sizes.iter().sum();
        let mut strata = Vec::with_capacity(sizes.len());
        let mut start = 0;
        for &s in sizes {
            strata.push(start..start + s);
            start += s;
        }
        let mut c = vec![vec![vec![0.0; dim]; dim]; dim];
        let mut given = vec![vec![vec![false; dim]; dim]; dim];
        for &(i, j, k, v) in constants {
            if i >= dim || j >= dim || k >= dim {
                return Err(Error::InvalidParameter(format!(
                    "structure constant index ({i}, {j}, {k}) outside basis of size {dim}"
                )));
            }
            if !v.is_finite() {
                return Err(Error::InvalidParameter("non-finite structure constant".into()));
            }
            c[i][j][k] = v;
            given[i][j][k] = true;
        }
        for &(i, j, k, v) in constants {
            if !given[j][i][k] {
                c[j][i][k] = -v;
            }
        }
        Ok(StratifiedAlgebra { dim, strata, c })
    }

    /// Raw constructor taking a full constant tensor; used to exercise the
    /// validator on non-antisymmetric input.
    pub fn from_tensor(sizes: &[usize], c: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let dim: usize = sizes.iter().sum();
        if c.len() != dim || c.iter().any(|m| m.len() != dim || m.iter().any(|r| r.len() != dim)) {
            return Err(Error::Dimension {
                expected: dim,
                found: c.len(),
            });
        }
        let mut alg = Self::from_constants(sizes, &[])?;
        alg.c = c;
        Ok(alg)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Step `r`, the number of strata.
    pub fn step(&self) -> usize {
        self.strata.len()
    }

    /// Size `p` of the first stratum.
    pub fn p(&self) -> usize {
        self.strata.first().map_or(0, |s| s.len())
    }

    pub fn strata(&self) -> &[Range<usize>] {
        &self.strata
    }

    /// One-based stratum of basis element `i`.
    pub fn stratum_of(&self, i: usize) -> usize {
        self.strata
            .iter()
            .position(|s| s.contains(&i))
            .map_or(0, |s| s + 1)
    }

    pub fn constant(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c[i][j][k]
    }

    /// Bracket of two vectors in basis coordinates.
    pub fn bracket_vec(&self, u: &[f64], v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (i, &ui) in u.iter().enumerate() {
            if ui == 0.0 {
                continue;
            }
            for (j, &vj) in v.iter().enumerate() {
                if vj == 0.0 {
                    continue;
                }
                for (o, &cijk) in out.iter_mut().zip(&self.c[i][j]) {
                    *o += ui * vj * cijk;
                }
            }
        }
        out
    }

    pub fn basis_vec(&self, i: usize) -> Vec<f64> {
        let mut e = vec![0.0; self.dim];
        e[i] = 1.0;
        e
    }

    /// Checks strata, antisymmetry, Jacobi, grading and generation, in that
    /// order, and reports the first violation.
    pub fn validate(&self) -> core::result::Result<(), AlgebraViolation> {
        let d = self.dim;
        if self.strata.is_empty() || d == 0 {
            return Err(AlgebraViolation::Strata("no basis elements".into()));
        }
        if let Some(k) = self.strata.iter().position(|s| s.is_empty()) {
            return Err(AlgebraViolation::Strata(format!("stratum {} is empty", k + 1)));
        }
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    if self.c[i][j][k] != -self.c[j][i][k] {
                        return Err(AlgebraViolation::Antisymmetry { i, j, k });
                    }
                }
            }
        }
        let scale = self
            .c
            .iter()
            .flatten()
            .flatten()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        let tol = JACOBI_TOL * scale * scale;
        for i in 0..d {
            for j in i + 1..d {
                for k in j + 1..d {
                    let (ei, ej, ek) = (self.basis_vec(i), self.basis_vec(j), self.basis_vec(k));
                    let a = self.bracket_vec(&ei, &self.bracket_vec(&ej, &ek));
                    let b = self.bracket_vec(&ej, &self.bracket_vec(&ek, &ei));
                    let c = self.bracket_vec(&ek, &self.bracket_vec(&ei, &ej));
                    if a.iter().zip(&b).zip(&c).any(|((x, y), z)| (x + y + z).abs() > tol) {
                        return Err(AlgebraViolation::Jacobi { i, j, k });
                    }
                }
            }
        }
        let r = self.step();
        for i in 0..d {
            for j in 0..d {
                let target = self.stratum_of(i) + self.stratum_of(j);
                for k in 0..d {
                    if self.c[i][j][k] != 0.0 && (target > r || self.stratum_of(k) != target) {
                        return Err(AlgebraViolation::Grading { i, j, k });
                    }
                }
            }
        }
        let rank = self.generated_rank();
        if rank < d {
            return Err(AlgebraViolation::Generation { rank, dim: d });
        }
        Ok(())
    }

    /// Dimension of the subalgebra generated by the first stratum.
    fn generated_rank(&self) -> usize {
        let mut layer: Vec<Vec<f64>> = self.strata[0].clone().map(|i| self.basis_vec(i)).collect();
        let mut all = layer.clone();
        for _ in 1..self.dim.max(self.step()) {
            let mut next = Vec::new();
            for i in self.strata[0].clone() {
                let e = self.basis_vec(i);
                for v in &layer {
                    let w = self.bracket_vec(&e, v);
                    if w.iter().any(|x| *x != 0.0) {
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            all.extend(next.iter().cloned());
            layer = next;
        }
        let nullity = linalg::null_space(&all, self.dim, 1e-10).len();
        if all.iter().flatten().all(|x| *x == 0.0) {
            return 0;
        }
        self.dim - nullity
    }

    /// Validated version of [`StratifiedAlgebra::from_constants`].
    pub fn new(sizes: &[usize], constants: &[(usize, usize, usize, f64)]) -> Result<Self> {
        let alg = Self::from_constants(sizes, constants)?;
        alg.validate()?;
        Ok(alg)
    }

    /// All index sequences with entries in the first stratum and length
    /// `1..=r`, lexicographic within each length. `Err` when `p^r` exceeds
    /// [`SEQUENCE_CAP`].
    pub fn sequences(&self, r: usize) -> Result<Vec<Vec<usize>>> {
        let p = self.p();
        check_cap(p, r)?;
        let mut out = Vec::new();
        let mut level: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 0..r {
            let mut next = Vec::with_capacity(level.len() * p);
            for s in &level {
                for i in 0..p {
                    let mut t = s.clone();
                    t.push(i);
                    next.push(t);
                }
            }
            out.extend(next.iter().cloned());
            level = next;
        }
        Ok(out)
    }

    /// Basis coordinates of the right-nested bracket
    /// `X_I = [X_{i_1}, [X_{i_2}, … [X_{i_{m-1}}, X_{i_m}]…]]`.
    pub fn nested_bracket(&self, seq: &[usize]) -> Vec<f64> {
        let Some((&last, rest)) = seq.split_last() else {
            return vec![0.0; self.dim];
        };
        let mut v = self.basis_vec(last);
        for &i in rest.iter().rev() {
            v = self.bracket_vec(&self.basis_vec(i), &v);
        }
        v
    }

    /// Precomputed sums over sequences of length at most `r`.
    pub fn sequence_table(&self, r: usize) -> Result<SequenceTable> {
        // (length, coefficient bits) -> (sparse bracket, multiplicity)
        type Groups = BTreeMap<(usize, Vec<u64>), (Vec<(usize, f64)>, usize)>;
        let mut groups = Groups::new();
        for seq in self.sequences(r)? {
            let v = self.nested_bracket(&seq);
            let Some(first) = v.iter().find(|x| **x != 0.0) else {
                continue;
            };
            let sign = first.signum();
            let sparse: Vec<(usize, f64)> = v
                .iter()
                .enumerate()
                .filter(|(_, x)| **x != 0.0)
                .map(|(k, x)| (k, sign * x))
                .collect();
            let key = (seq.len(), sparse.iter().flat_map(|(k, x)| [*k as u64, x.to_bits()]).collect());
            groups.entry(key).or_insert((sparse, 0)).1 += 1;
        }
        let terms = groups
            .into_iter()
            .map(|((len, _), (coeffs, mult))| SequenceTerm {
                coeffs,
                exponent: 1.0 / len as f64,
                multiplicity: mult as f64,
            })
            .collect();
        Ok(SequenceTable { terms })
    }
}

fn check_cap(p: usize, r: usize) -> Result<()> {
    let mut total: usize = 1;
    for _ in 0..r {
        total = total.saturating_mul(p);
    }
    if total > SEQUENCE_CAP {
        return Err(Error::InvalidParameter(format!(
            "p^r = {p}^{r} exceeds the sequence cap {SEQUENCE_CAP}"
        )));
    }
    Ok(())
}

#[derive(Clone, Debug)]
struct SequenceTerm {
    coeffs: Vec<(usize, f64)>,
    exponent: f64,
    multiplicity: f64,
}

/// Nonvanishing nested brackets `X_I` grouped by length and value (up to
/// sign), so `Σ_I |l(X_I)|^{1/|I|}` costs one pass over distinct brackets.
#[derive(Clone, Debug)]
pub struct SequenceTable {
    terms: Vec<SequenceTerm>,
}

impl SequenceTable {
    /// `Σ_I |l(X_I)|^{1/|I|}` for the linear form with basis values `l`.
    pub fn norm(&self, l: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let v: f64 = t.coeffs.iter().map(|&(k, c)| c * l[k]).sum();
                let v = v.abs();
                if v == 0.0 {
                    0.0
                } else {
                    t.multiplicity * v.powf(t.exponent)
                }
            })
            .sum()
    }

    /// Number of distinct nonvanishing brackets.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}
