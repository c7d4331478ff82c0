//! TOML experiment configuration.
//!
//! ```toml
//! spec_version = "1"
//! ceiling_c = 10.0
//!
//! [model]
//! kind = "builtin"
//! name = "heisenberg"
//! parameter = 1.0
//!
//! [lambda]
//! min = 4.5
//! max = 100.0
//! count = 20
//! scale_with_parameter = true
//!
//! [monte_carlo]
//! samples = 200000
//! seed = 7
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use orbitcount_core::phasespace::geometric_nodes;
use orbitcount_core::spectral::DEFAULT_POINT_CAP;

use crate::error::{HarnessError, Result};

/// Schema version understood by this build.
pub const SPEC_VERSION: &str = "1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub spec_version: String,
    pub model: ModelConfig,
    #[serde(default)]
    pub lambda: Option<AxisConfig>,
    #[serde(default)]
    pub t: Option<AxisConfig>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub monte_carlo: MonteCarloConfig,
    #[serde(default)]
    pub heat: HeatConfig,
    #[serde(default)]
    pub sobolev: SobolevConfig,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default = "default_ceiling")]
    pub ceiling_c: f64,
}

fn default_ceiling() -> f64 {
    10.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuiltinName {
    Heisenberg,
    Engel,
}

/// One `coeff · x^exponents` term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    pub exponents: Vec<u32>,
    pub coeff: f64,
}

/// `Σ a_k ∂_k + i b`; an empty `a` means no derivative part.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorConfig {
    #[serde(default)]
    pub a: Vec<Vec<TermConfig>>,
    #[serde(default)]
    pub b: Vec<TermConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelConfig {
    Builtin {
        name: BuiltinName,
        parameter: f64,
    },
    /// `V` is given either as `potential` or as `V_square_root` (then
    /// `V = w²` is non-negative by construction).
    Schrodinger {
        dim: usize,
        #[serde(default)]
        potential: Vec<TermConfig>,
        #[serde(default, rename = "V_square_root")]
        v_square_root: Option<Vec<TermConfig>>,
        #[serde(default)]
        vector_potential: Vec<Vec<TermConfig>>,
        #[serde(default)]
        degree_bound: Option<usize>,
    },
    /// Zero-based structure constants `[i, j, k, c]` meaning `[Y_i, Y_j] ∋ c Y_k`.
    Representation {
        dim: usize,
        strata: Vec<usize>,
        constants: Vec<(usize, usize, usize, f64)>,
        generators: Vec<GeneratorConfig>,
    },
}

impl ModelConfig {
    pub fn parameter(&self) -> Option<f64> {
        match self {
            ModelConfig::Builtin { parameter, .. } => Some(*parameter),
            _ => None,
        }
    }

    /// Copy with the builtin parameter replaced.
    pub fn with_parameter(&self, value: f64) -> Result<Self> {
        match self {
            ModelConfig::Builtin { name, .. } => Ok(ModelConfig::Builtin {
                name: *name,
                parameter: value,
            }),
            _ => Err(HarnessError::Config(
                "parameter sweeps need a builtin model".into(),
            )),
        }
    }
}

/// Either explicit `values` or `count` geometric points in `[min, max]`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisConfig {
    #[serde(default)]
    pub values: Option<Vec<f64>>,
    #[serde(default)]
    pub min: Option<f64>,
    #[serde(default)]
    pub max: Option<f64>,
    #[serde(default)]
    pub count: Option<usize>,
    /// Multiply every point by the builtin parameter.
    #[serde(default)]
    pub scale_with_parameter: bool,
}

impl AxisConfig {
    pub fn geometric(min: f64, max: f64, count: usize) -> Self {
        AxisConfig {
            min: Some(min),
            max: Some(max),
            count: Some(count),
            ..Self::default()
        }
    }

    pub fn values(values: Vec<f64>) -> Self {
        AxisConfig {
            values: Some(values),
            ..Self::default()
        }
    }

    pub fn points(&self, name: &str, parameter: Option<f64>) -> Result<Vec<f64>> {
        let base = match (&self.values, self.min, self.max, self.count) {
            (Some(v), None, None, None) => v.clone(),
            (None, Some(lo), Some(hi), Some(count)) => {
                if !(lo > 0.0 && hi >= lo && hi.is_finite()) || count == 0 {
                    return Err(HarnessError::Config(format!(
                        "{name}: need 0 < min <= max and count >= 1"
                    )));
                }
                geometric_nodes(lo, hi, count)
            }
            _ => {
                return Err(HarnessError::Config(format!(
                    "{name}: give either `values` or all of `min`, `max`, `count`"
                )))
            }
        };
        let scale = if self.scale_with_parameter {
            parameter.ok_or_else(|| {
                HarnessError::Config(format!("{name}: scale_with_parameter needs a builtin model"))
            })?
        } else {
            1.0
        };
        let pts: Vec<f64> = base.iter().map(|v| v * scale).collect();
        if pts.is_empty() {
            return Err(HarnessError::Config(format!("{name}: grid is empty")));
        }
        if let Some(v) = pts.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(HarnessError::Config(format!("{name}: point {v} is not positive")));
        }
        Ok(pts)
    }
}

/// Discretization box and resolution. Missing fields are chosen
/// automatically.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default)]
    pub half_width: Option<f64>,
    #[serde(default)]
    pub points: Option<usize>,
    /// Largest two-grid relative eigenvalue error accepted at the top of the λ range.
    #[serde(default = "default_richardson")]
    pub richardson_tol: f64,
    /// Largest admissible `N(λ_max) / dim`.
    #[serde(default = "default_count_fraction")]
    pub count_fraction: f64,
    #[serde(default = "default_point_cap")]
    pub point_cap: usize,
}

fn default_richardson() -> f64 {
    0.02
}

fn default_count_fraction() -> f64 {
    0.2
}

fn default_point_cap() -> usize {
    DEFAULT_POINT_CAP
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            half_width: None,
            points: None,
            richardson_tol: default_richardson(),
            count_fraction: default_count_fraction(),
            point_cap: default_point_cap(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloConfig {
    #[serde(default = "default_samples")]
    pub samples: u64,
    #[serde(default)]
    pub seed: u64,
    /// Worker threads; results do not depend on it.
    #[serde(default)]
    pub workers: Option<usize>,
}

fn default_samples() -> u64 {
    200_000
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        MonteCarloConfig {
            samples: default_samples(),
            seed: 0,
            workers: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeatConfig {
    /// Spectral cutoff `Λ`.
    #[serde(default = "default_cutoff")]
    pub cutoff: f64,
    #[serde(default = "default_nodes")]
    pub nodes: usize,
    #[serde(default = "default_node_samples")]
    pub samples_per_node: u64,
    /// Constant in the tail bound; the fitted count constant when absent.
    #[serde(default)]
    pub tail_slack: Option<f64>,
}

fn default_cutoff() -> f64 {
    60.0
}

fn default_nodes() -> usize {
    64
}

fn default_node_samples() -> u64 {
    100_000
}

impl Default for HeatConfig {
    fn default() -> Self {
        HeatConfig {
            cutoff: default_cutoff(),
            nodes: default_nodes(),
            samples_per_node: default_node_samples(),
            tail_slack: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SobolevConfig {
    #[serde(default = "default_orders")]
    pub orders: Vec<usize>,
    #[serde(default = "default_functions")]
    pub functions: usize,
    #[serde(default = "default_sobolev_points")]
    pub points: usize,
}

fn default_orders() -> Vec<usize> {
    vec![1, 2]
}

fn default_functions() -> usize {
    100
}

fn default_sobolev_points() -> usize {
    400
}

impl Default for SobolevConfig {
    fn default() -> Self {
        SobolevConfig {
            orders: default_orders(),
            functions: default_functions(),
            points: default_sobolev_points(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    Count,
    Heat,
    Sobolev,
}

/// Family sweep over the builtin parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameters: Vec<f64>,
    #[serde(default = "default_sweep_kind")]
    pub experiment: SweepKind,
    /// Largest admissible max/min ratio of the fitted quantity across the family.
    #[serde(default = "default_variation")]
    pub max_variation: f64,
}

fn default_sweep_kind() -> SweepKind {
    SweepKind::Count
}

fn default_variation() -> f64 {
    2.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_out")]
    pub dir: PathBuf,
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: default_out() }
    }
}

/// Command-line overrides applied on top of a loaded file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub samples: Option<u64>,
    pub ceiling_c: Option<f64>,
    pub workers: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> std::result::Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        let cfg = Self::from_toml(&text).map_err(|e| HarnessError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration is always representable in TOML")
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(s) = o.seed {
            self.monte_carlo.seed = s;
        }
        if let Some(d) = &o.out {
            self.output.dir = d.clone();
        }
        if let Some(n) = o.samples {
            self.monte_carlo.samples = n;
        }
        if let Some(c) = o.ceiling_c {
            self.ceiling_c = c;
        }
        if let Some(w) = o.workers {
            self.monte_carlo.workers = Some(w);
        }
    }

    /// Schema-level checks that need no numerics.
    pub fn validate(&self) -> Result<()> {
        if self.spec_version != SPEC_VERSION {
            return Err(HarnessError::Config(format!(
                "unsupported spec_version {:?}, expected {SPEC_VERSION:?}",
                self.spec_version
            )));
        }
        if !(self.ceiling_c >= 1.0) {
            return Err(HarnessError::Config(format!("ceiling_c must be >= 1, got {}", self.ceiling_c)));
        }
        if self.monte_carlo.samples < 1000 {
            return Err(HarnessError::Config("monte_carlo.samples must be at least 1000".into()));
        }
        if self.monte_carlo.workers == Some(0) {
            return Err(HarnessError::Config("monte_carlo.workers must be positive".into()));
        }
        if self.heat.samples_per_node < 1000 || self.heat.nodes < 2 {
            return Err(HarnessError::Config("heat needs nodes >= 2 and samples_per_node >= 1000".into()));
        }
        if !(self.heat.cutoff > 0.0 && self.heat.cutoff.is_finite()) {
            return Err(HarnessError::Config("heat.cutoff must be positive".into()));
        }
        if let Some(s) = self.heat.tail_slack {
            if !(s >= 1.0) {
                return Err(HarnessError::Config("heat.tail_slack must be >= 1".into()));
            }
        }
        let g = &self.grid;
        if g.half_width.is_some_and(|l| !(l > 0.0 && l.is_finite())) {
            return Err(HarnessError::Config("grid.half_width must be positive".into()));
        }
        if !(g.richardson_tol > 0.0) || !(g.count_fraction > 0.0 && g.count_fraction <= 1.0) {
            return Err(HarnessError::Config("grid tolerances must be positive".into()));
        }
        let param = self.model.parameter();
        if let Some(axis) = &self.lambda {
            axis.points("lambda", param)?;
        }
        if let Some(axis) = &self.t {
            axis.points("t", param)?;
        }
        if let Some(sw) = &self.sweep {
            if sw.parameters.is_empty() || sw.parameters.iter().any(|p| !(*p > 0.0)) {
                return Err(HarnessError::Config("sweep.parameters must be nonempty and positive".into()));
            }
            if !(sw.max_variation >= 1.0) {
                return Err(HarnessError::Config("sweep.max_variation must be >= 1".into()));
            }
            self.model.with_parameter(1.0)?;
        }
        Ok(())
    }

    pub fn lambda_points(&self) -> Result<Vec<f64>> {
        self.lambda
            .as_ref()
            .ok_or_else(|| HarnessError::Config("missing [lambda] grid".into()))?
            .points("lambda", self.model.parameter())
    }

    pub fn t_points(&self) -> Result<Vec<f64>> {
        self.t
            .as_ref()
            .ok_or_else(|| HarnessError::Config("missing [t] grid".into()))?
            .points("t", self.model.parameter())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
spec_version = "1"
[model]
kind = "builtin"
name = "heisenberg"
parameter = 4.0
[lambda]
min = 4.5
max = 100.0
count = 3
scale_with_parameter = true
"#;

    #[test]
    fn parses_defaults_and_scales_axis() {
        let cfg = ExperimentConfig::from_toml(MINIMAL).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.ceiling_c, 10.0);
        assert_eq!(cfg.monte_carlo.samples, 200_000);
        let l = cfg.lambda_points().unwrap();
        assert_eq!(l.len(), 3);
        assert!((l[0] - 18.0).abs() < 1e-12 && (l[2] - 400.0).abs() < 1e-9);
        assert!(cfg.t_points().is_err());
    }

    #[test]
    fn rejects_bad_documents() {
        let wrong_version = MINIMAL.replace("\"1\"", "\"2\"");
        assert!(ExperimentConfig::from_toml(&wrong_version).unwrap().validate().is_err());
        let unknown = format!("{MINIMAL}\n[grid]\nbogus = 1\n");
        assert!(ExperimentConfig::from_toml(&unknown).is_err());
        let empty = MINIMAL.replace("count = 3", "count = 0");
        assert!(ExperimentConfig::from_toml(&empty).unwrap().validate().is_err());
        let both = format!("{MINIMAL}values = [1.0]\n");
        assert!(ExperimentConfig::from_toml(&both).unwrap().validate().is_err());
    }

    #[test]
    fn representation_model_round_trips() {
        let text = r#"
spec_version = "1"
[model]
kind = "representation"
dim = 1
strata = [2, 1]
constants = [[0, 1, 2, 1]]
[[model.generators]]
a = [[{ exponents = [0], coeff = 1.0 }]]
[[model.generators]]
b = [{ exponents = [1], coeff = 1.0 }]
[[model.generators]]
b = [{ exponents = [0], coeff = 1.0 }]
"#;
        let cfg = ExperimentConfig::from_toml(text).unwrap();
        cfg.validate().unwrap();
        let again = ExperimentConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn overrides_win() {
        let mut cfg = ExperimentConfig::from_toml(MINIMAL).unwrap();
        cfg.apply(&Overrides {
            seed: Some(9),
            samples: Some(5000),
            ceiling_c: Some(3.0),
            out: Some("elsewhere".into()),
            workers: Some(2),
        });
        assert_eq!(cfg.monte_carlo.seed, 9);
        assert_eq!(cfg.monte_carlo.samples, 5000);
        assert_eq!(cfg.ceiling_c, 3.0);
        assert_eq!(cfg.output.dir, PathBuf::from("elsewhere"));
        assert_eq!(cfg.monte_carlo.workers, Some(2));
    }
}
