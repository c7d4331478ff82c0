use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // resolved through std when dev-dependency features enable it
use num_traits::Float as _;


use super::{PolyDiffOp, SequenceTable, StratifiedAlgebra};
use crate::error::{Error, Result};
use crate::linalg;

/// Relative tolerance for the homomorphism identity. Exact for dyadic data.
const HOMOMORPHISM_TOL: f64 = 1e-12;

/// Simplex refinement budget for `inf_ξ M_π(x, ξ)`.
const INF_ITERATIONS: usize = 200;
const INF_TOL: f64 = 1e-8;

/// Linear form on the algebra, given by its values on the basis.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitForm {
    pub values: Vec<f64>,
    /// Phase-space point the form was read off from, if any.
    pub point: Option<(Vec<f64>, Vec<f64>)>,
}

impl OrbitForm {
    pub fn new(values: Vec<f64>) -> Self {
        OrbitForm { values, point: None }
    }
}

/// Representation of a stratified algebra by first-order polynomial
/// operators in triangular form.
#[derive(Clone, Debug)]
pub struct Representation {
    algebra: StratifiedAlgebra,
    n: usize,
    generators: Vec<PolyDiffOp>,
    table: SequenceTable,
}

impl Representation {
    /// Validates the algebra, the operator shapes, triangularity and the
    /// homomorphism identity on all basis pairs.
    pub fn new(algebra: StratifiedAlgebra, generators: Vec<PolyDiffOp>) -> Result<Self> {
        algebra.validate()?;
        if generators.len() != algebra.dim() {
            return Err(Error::Dimension {
                expected: algebra.dim(),
                found: generators.len(),
            });
        }
        let n = generators.first().map_or(0, PolyDiffOp::nvars);
        if n == 0 {
            return Err(Error::InvalidParameter("representation space must have dimension >= 1".into()));
        }
        if let Some(g) = generators.iter().find(|g| g.nvars() != n) {
            return Err(Error::Dimension {
                expected: n,
                found: g.nvars(),
            });
        }
        if let Some(i) = generators.iter().position(|g| !g.is_triangular()) {
            return Err(Error::Structural(format!(
                "generator {i} is not triangular: coefficient a_k must depend on x_0..x_(k-1) only"
            )));
        }
        check_homomorphism(&algebra, &generators)?;
        let table = algebra.sequence_table(algebra.step())?;
        Ok(Representation {
            algebra,
            n,
            generators,
            table,
        })
    }

    pub fn algebra(&self) -> &StratifiedAlgebra {
        &self.algebra
    }

    /// Dimension of the representation space.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PolyDiffOp] {
        &self.generators
    }

    pub fn generator(&self, i: usize) -> &PolyDiffOp {
        &self.generators[i]
    }

    /// `π(X_0), …, π(X_{p-1})`; the sublaplacian image is `Σ π(X_j)* π(X_j)`.
    pub fn sublaplacian_ops(&self) -> Vec<PolyDiffOp> {
        self.generators[..self.algebra.p()].to_vec()
    }

    /// Right-nested commutator `π(X_I)` for a zero-based stratum-1 sequence.
    pub fn iterated_commutator(&self, seq: &[usize]) -> Result<PolyDiffOp> {
        let p = self.algebra.p();
        if seq.is_empty() {
            return Err(Error::InvalidParameter("empty index sequence".into()));
        }
        if let Some(&bad) = seq.iter().find(|&&i| i >= p) {
            return Err(Error::InvalidParameter(format!(
                "sequence index {bad} outside the first stratum of size {p}"
            )));
        }
        let (&last, rest) = seq.split_last().expect("non-empty");
        let mut op = self.generators[last].clone();
        for &i in rest.iter().rev() {
            if op.is_zero() {
                break;
            }
            op = self.generators[i].bracket(&op)?;
        }
        Ok(op)
    }

    /// `l(Y_i) = -i π(Y_i)(x, ξ)`.
    pub fn orbit_form(&self, x: &[f64], xi: &[f64]) -> OrbitForm {
        let mut l = OrbitForm::new(self.form_values(x, xi));
        l.point = Some((x.to_vec(), xi.to_vec()));
        l
    }

    fn form_values(&self, x: &[f64], xi: &[f64]) -> Vec<f64> {
        self.generators.iter().map(|g| g.symbol_value(x, xi)).collect()
    }

    /// `M_π(x, ξ) = Σ_{|I| ≤ r} |π(X_I)(x, ξ)|^{1/|I|}`.
    pub fn m_pi(&self, x: &[f64], xi: &[f64]) -> f64 {
        self.table.norm(&self.form_values(x, xi))
    }

    /// Homogeneous norm of a form, with the representation's cached table.
    pub fn norm_of(&self, l: &OrbitForm) -> f64 {
        self.table.norm(&l.values)
    }

    /// Least-squares `ξ` making the stratum-1 symbols vanish as far as the
    /// `ξ`-dependence allows. Fails if that dependence is rank deficient.
    pub fn stratum_one_seed(&self, x: &[f64]) -> Result<Vec<f64>> {
        let p = self.algebra.p();
        let rows: Vec<Vec<f64>> = self.generators[..p]
            .iter()
            .map(|g| g.a().iter().map(|ak| ak.eval_unchecked(x)).collect())
            .collect();
        let rhs: Vec<f64> = self.generators[..p]
            .iter()
            .map(|g| -g.b().eval_unchecked(x))
            .collect();
        linalg::least_squares(&rows, self.n, &rhs, 1e-12).ok_or_else(|| {
            Error::Structural(format!(
                "stratum-1 symbols do not determine xi at x = {x:?} (form (*) violated)"
            ))
        })
    }

    /// `M_π(x) = inf_ξ M_π(x, ξ)`: least-squares seed, then simplex descent.
    pub fn m_pi_inf(&self, x: &[f64]) -> Result<f64> {
        Ok(self.m_pi_inf_at(x)?.1)
    }

    /// Minimizing covector and value of `ξ ↦ M_π(x, ξ)`.
    pub fn m_pi_inf_at(&self, x: &[f64]) -> Result<(Vec<f64>, f64)> {
        let seed = self.stratum_one_seed(x)?;
        let scale = seed.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let (xi, v) = linalg::nelder_mead(|k| self.m_pi(x, k), &seed, 0.05 * scale, INF_ITERATIONS, INF_TOL);
        Ok((xi, v))
    }
}

fn check_homomorphism(alg: &StratifiedAlgebra, gens: &[PolyDiffOp]) -> Result<()> {
    let d = alg.dim();
    let n = gens[0].nvars();
    let scale = gens.iter().fold(0.0f64, |m, g| m.max(g.max_abs_coeff())).max(1.0);
    for i in 0..d {
        for j in i + 1..d {
            let lhs = gens[i].bracket(&gens[j])?;
            let mut rhs = PolyDiffOp::zero(n);
            for (k, g) in gens.iter().enumerate() {
                let c = alg.constant(i, j, k);
                if c != 0.0 {
                    rhs = rhs.checked_add(&g.scale(c))?;
                }
            }
            let diff = lhs.checked_add(&rhs.scale(-1.0))?;
            if diff.max_abs_coeff() > HOMOMORPHISM_TOL * scale * scale {
                return Err(Error::Homomorphism { i, j });
            }
        }
    }
    Ok(())
}

/// `Σ_I |l(X_I)|^{1/|I|}` over stratum-1 sequences of length `1..=r`.
pub fn homogeneous_norm(l: &OrbitForm, alg: &StratifiedAlgebra, r: usize) -> Result<f64> {
    if l.values.len() != alg.dim() {
        return Err(Error::Dimension {
            expected: alg.dim(),
            found: l.values.len(),
        });
    }
    Ok(alg.sequence_table(r)?.norm(&l.values))
}

/// `δ_t^* l`: entry `i` scaled by `t^{s(i)}` with `s(i)` the stratum of `Y_i`.
pub fn dilate_form(l: &OrbitForm, t: f64, alg: &StratifiedAlgebra) -> Result<OrbitForm> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("dilation factor must be positive, got {t}")));
    }
    if l.values.len() != alg.dim() {
        return Err(Error::Dimension {
            expected: alg.dim(),
            found: l.values.len(),
        });
    }
    let values = l
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| v * t.powi(alg.stratum_of(i) as i32))
        .collect();
    Ok(OrbitForm { values, point: None })
}

/// Built-in one-variable representations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Builtin {
    Heisenberg(f64),
    Engel(f64),
}

pub fn builtin(which: Builtin) -> Result<Representation> {
    match which {
        Builtin::Heisenberg(mu) => heisenberg(mu),
        Builtin::Engel(lambda) => engel(lambda),
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}

/// Heisenberg algebra `[Y_0, Y_1] = Y_2`: `π(Y_0) = ∂`, `π(Y_1) = iμx`, `π(Y_2) = iμ`.
pub fn heisenberg(mu: f64) -> Result<Representation> {
    positive("mu", mu)?;
    let alg = StratifiedAlgebra::new(&[2, 1], &[(0, 1, 2, 1.0)])?;
    let x = crate::MultiPoly::var(1, 0)?;
    let gens = vec![
        PolyDiffOp::derivative(1, 0)?,
        PolyDiffOp::multiplication(x.scale(mu)),
        PolyDiffOp::multiplication(crate::MultiPoly::constant(1, mu)),
    ];
    Representation::new(alg, gens)
}

/// Engel algebra `[Y_0, Y_1] = Y_2`, `[Y_0, Y_2] = Y_3`:
/// `π(Y_0) = ∂`, `π(Y_1) = iλx²/2`, `π(Y_2) = iλx`, `π(Y_3) = iλ`.
pub fn engel(lambda: f64) -> Result<Representation> {
    positive("lambda", lambda)?;
    let alg = StratifiedAlgebra::new(&[2, 1, 1], &[(0, 1, 2, 1.0), (0, 2, 3, 1.0)])?;
    let x = crate::MultiPoly::var(1, 0)?;
    let gens = vec![
        PolyDiffOp::derivative(1, 0)?,
        PolyDiffOp::multiplication(x.pow(2).scale(lambda / 2.0)),
        PolyDiffOp::multiplication(x.scale(lambda)),
        PolyDiffOp::multiplication(crate::MultiPoly::constant(1, lambda)),
    ];
    Representation::new(alg, gens)
}
