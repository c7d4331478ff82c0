//! Turns a [`ModelConfig`] into a weight and a grid operator.

use std::fmt;

use orbitcount_core::nilpotent::{builtin, Builtin, PolyDiffOp, Representation, StratifiedAlgebra};
use orbitcount_core::phasespace::{RepresentationWeight, SchrodingerWeight, WeightEvaluator};
use orbitcount_core::schrodinger::SchrodingerModel;
use orbitcount_core::spectral::{assemble, GridSpec, HermitianOperatorGrid, OperatorSpec};
use orbitcount_core::{Error as CoreError, MultiPoly};

use crate::config::{BuiltinName, GeneratorConfig, ModelConfig, TermConfig};
use crate::error::{HarnessError, Result};

/// Points per axis of the non-negativity spot check of `V`.
const POSITIVITY_POINTS: usize = 41;

pub enum Model {
    Schrodinger(SchrodingerModel),
    Representation { rep: Representation, label: String },
}

impl fmt::Debug for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}

fn poly(n: usize, terms: &[TermConfig]) -> Result<MultiPoly> {
    Ok(MultiPoly::from_terms(
        n,
        terms.iter().map(|t| (t.exponents.clone(), t.coeff)),
    )?)
}

fn generator(n: usize, g: &GeneratorConfig) -> Result<PolyDiffOp> {
    let a = if g.a.is_empty() {
        vec![MultiPoly::zero(n); n]
    } else {
        g.a.iter().map(|t| poly(n, t)).collect::<Result<Vec<_>>>()?
    };
    Ok(PolyDiffOp::new(a, poly(n, &g.b)?)?)
}

impl Model {
    pub fn from_config(cfg: &ModelConfig) -> Result<Self> {
        match cfg {
            ModelConfig::Builtin { name, parameter } => {
                let which = match name {
                    BuiltinName::Heisenberg => Builtin::Heisenberg(*parameter),
                    BuiltinName::Engel => Builtin::Engel(*parameter),
                };
                let label = match name {
                    BuiltinName::Heisenberg => format!("heisenberg({parameter})"),
                    BuiltinName::Engel => format!("engel({parameter})"),
                };
                Ok(Model::Representation {
                    rep: builtin(which)?,
                    label,
                })
            }
            ModelConfig::Schrodinger {
                dim,
                potential,
                v_square_root,
                vector_potential,
                degree_bound,
            } => {
                let n = *dim;
                if n == 0 || n > 3 {
                    return Err(HarnessError::Config(format!("dimension must be 1, 2 or 3, got {n}")));
                }
                let a = if vector_potential.is_empty() {
                    vec![MultiPoly::zero(n); n]
                } else {
                    vector_potential.iter().map(|t| poly(n, t)).collect::<Result<Vec<_>>>()?
                };
                let mut model = match v_square_root {
                    Some(_) if !potential.is_empty() => {
                        return Err(HarnessError::Config("give either potential or V_square_root, not both".into()))
                    }
                    Some(root) => SchrodingerModel::from_square_root(a, poly(n, root)?)?,
                    None => SchrodingerModel::new(a, poly(n, potential)?)?,
                };
                if let Some(r) = degree_bound {
                    model = model.with_degree_bound(*r)?;
                }
                Ok(Model::Schrodinger(model))
            }
            ModelConfig::Representation {
                dim,
                strata,
                constants,
                generators,
            } => {
                let alg = StratifiedAlgebra::new(strata, constants)?;
                let gens = generators.iter().map(|g| generator(*dim, g)).collect::<Result<Vec<_>>>()?;
                Ok(Model::Representation {
                    rep: Representation::new(alg, gens)?,
                    label: "representation".into(),
                })
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Model::Schrodinger(m) => format!(
                "schrodinger(n={}, r={}, V={}, A=[{}])",
                m.dim(),
                m.degree_bound(),
                m.potential(),
                m.vector_potential().iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ")
            ),
            Model::Representation { rep, label } => format!("{label} on R^{}", rep.n()),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Model::Schrodinger(m) => m.dim(),
            Model::Representation { rep, .. } => rep.n(),
        }
    }

    pub fn representation(&self) -> Option<&Representation> {
        match self {
            Model::Representation { rep, .. } => Some(rep),
            Model::Schrodinger(_) => None,
        }
    }

    /// Rejects degenerate Schrödinger models (with the offending direction)
    /// and representations whose weight cannot be minimized over `ξ`.
    pub fn gate(&self) -> Result<()> {
        match self {
            Model::Schrodinger(m) => m.require_nondegenerate()?,
            Model::Representation { rep, .. } => {
                RepresentationWeight::new(rep.clone())?;
            }
        }
        Ok(())
    }

    /// Warnings from the non-negativity spot check of `V` on `[-l, l]^n`.
    pub fn positivity_notes(&self, half_width: f64) -> Vec<String> {
        let Model::Schrodinger(m) = self else {
            return Vec::new();
        };
        let pc = m.positivity_check(half_width, POSITIVITY_POINTS);
        if pc.passed() {
            return Vec::new();
        }
        let msg = format!(
            "potential takes the negative value {} at {:?} on the spot-check grid",
            pc.min_value, pc.at
        );
        log::warn!("{msg}");
        vec![msg]
    }

    /// [`Model::gate`] followed by [`Model::positivity_notes`].
    pub fn check(&self, half_width: f64) -> Result<Vec<String>> {
        self.gate()?;
        Ok(self.positivity_notes(half_width))
    }

    pub fn weight(&self) -> Result<Box<dyn WeightEvaluator>> {
        Ok(match self {
            Model::Schrodinger(m) => Box::new(SchrodingerWeight::new(m)),
            Model::Representation { rep, .. } => Box::new(RepresentationWeight::new(rep.clone())?),
        })
    }

    pub fn assemble(&self, grid: &GridSpec) -> Result<HermitianOperatorGrid> {
        let out = match self {
            Model::Schrodinger(m) => assemble(OperatorSpec::Schrodinger(m), grid),
            Model::Representation { rep, .. } => assemble(OperatorSpec::Sublaplacian(&rep.sublaplacian_ops()), grid),
        };
        out.map_err(HarnessError::from)
    }
}

/// Rejection message of the degeneracy gate, if `e` is one.
pub fn degeneracy_direction(e: &HarnessError) -> Option<&[f64]> {
    match e {
        HarnessError::Core(CoreError::Degenerate { direction }) => Some(direction),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentConfig;

    fn schrodinger(potential: &str) -> ModelConfig {
        let text = format!(
            "spec_version = \"1\"\n[model]\nkind = \"schrodinger\"\ndim = 2\npotential = {potential}\n"
        );
        ExperimentConfig::from_toml(&text).unwrap().model
    }

    #[test]
    fn degenerate_potential_is_rejected_with_direction() {
        // (x1 + x2)^2
        let m = Model::from_config(&schrodinger(
            "[{ exponents = [2, 0], coeff = 1.0 }, { exponents = [1, 1], coeff = 2.0 }, { exponents = [0, 2], coeff = 1.0 }]",
        ))
        .unwrap();
        let err = m.check(4.0).unwrap_err();
        let d = degeneracy_direction(&err).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((d[0] * s - d[1] * s).abs() > 0.999, "{d:?}");
        assert_eq!(err.exit_code(), crate::error::exit::INVALID_INPUT);
    }

    #[test]
    fn negative_potential_warns() {
        let m = Model::from_config(&schrodinger(
            "[{ exponents = [2, 0], coeff = 1.0 }, { exponents = [0, 2], coeff = 1.0 }, { exponents = [0, 0], coeff = -1.0 }]",
        ))
        .unwrap();
        let notes = m.check(4.0).unwrap();
        assert_eq!(notes.len(), 1);
    }

    #[test]
    fn square_root_potential_and_degree_bound() {
        let text = r#"
spec_version = "1"
[model]
kind = "schrodinger"
dim = 1
V_square_root = [{ exponents = [2], coeff = 1.0 }, { exponents = [0], coeff = -1.0 }]
degree_bound = 6
"#;
        let m = Model::from_config(&ExperimentConfig::from_toml(text).unwrap().model).unwrap();
        let Model::Schrodinger(s) = &m else { panic!("not a Schrodinger model") };
        assert_eq!(s.degree_bound(), 6);
        assert_eq!(s.potential().evaluate(&[0.0]).unwrap(), 1.0);
        assert!(m.check(5.0).unwrap().is_empty());

        let both = text.replace("degree_bound = 6", "potential = [{ exponents = [0], coeff = 1.0 }]");
        assert!(Model::from_config(&ExperimentConfig::from_toml(&both).unwrap().model).is_err());
        let low = text.replace("degree_bound = 6", "degree_bound = 2");
        assert!(Model::from_config(&ExperimentConfig::from_toml(&low).unwrap().model).is_err());
    }

    #[test]
    fn builtins_and_user_representations_agree() {
        let text = r#"
spec_version = "1"
[model]
kind = "representation"
dim = 1
strata = [2, 1]
constants = [[0, 1, 2, 1.0]]
[[model.generators]]
a = [[{ exponents = [0], coeff = 1.0 }]]
[[model.generators]]
b = [{ exponents = [1], coeff = 1.0 }]
[[model.generators]]
b = [{ exponents = [0], coeff = 1.0 }]
"#;
        let user = Model::from_config(&ExperimentConfig::from_toml(text).unwrap().model).unwrap();
        let heis = Model::from_config(&ModelConfig::Builtin {
            name: BuiltinName::Heisenberg,
            parameter: 1.0,
        })
        .unwrap();
        let (u, h) = (user.representation().unwrap(), heis.representation().unwrap());
        for x in [-2.0, 0.3, 1.7] {
            assert_eq!(u.m_pi(&[x], &[0.4]), h.m_pi(&[x], &[0.4]));
        }
    }

    #[test]
    fn broken_homomorphism_is_invalid_input() {
        let text = r#"
spec_version = "1"
[model]
kind = "representation"
dim = 1
strata = [2, 1]
constants = [[0, 1, 2, 1.0]]
[[model.generators]]
a = [[{ exponents = [0], coeff = 1.0 }]]
[[model.generators]]
b = [{ exponents = [1], coeff = 1.0 }]
[[model.generators]]
b = [{ exponents = [0], coeff = 2.0 }]
"#;
        let err = Model::from_config(&ExperimentConfig::from_toml(text).unwrap().model).unwrap_err();
        assert_eq!(err.exit_code(), crate::error::exit::INVALID_INPUT);
    }
}
