//! Count, heat, volume, Sobolev and family-sweep experiments.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use orbitcount_core::fit::{fit_constant, fit_constant_with, loglog_slope, FitMode, FitRow};
use orbitcount_core::interp::power_law;
use orbitcount_core::phasespace::{derive_seed, QuadratureSpec};
use orbitcount_core::spectral::{heat_trace, inertia_count, lowest_eigs, SobolevContext};
use orbitcount_core::Error as CoreError;

use crate::autogrid::{box_half_width, choose_grid};
use crate::config::{ExperimentConfig, SweepKind};
use crate::error::{HarnessError, Result};
use crate::exec::{n0_curve, n0_parallel, Executor};
use crate::model::Model;
use crate::report::{Provenance, Report};

/// Seed tag of the heat experiment's quadrature curve.
const HEAT_TAG: u64 = 0x4845_4154;
/// Largest supported Sobolev order.
pub const MAX_SOBOLEV_ORDER: usize = 2;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountRow {
    pub lambda: f64,
    pub n: usize,
    pub n0: f64,
    pub n0_stderr: f64,
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeatRow {
    pub t: f64,
    pub z: f64,
    pub tail_bound: f64,
    pub terms: usize,
    pub z0: f64,
    pub z0_stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VolumeRow {
    pub lambda: f64,
    pub n0: f64,
    pub stderr: f64,
    pub hits: u64,
    pub samples: u64,
    pub x_half: f64,
    pub xi_half: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SobolevRow {
    pub order: usize,
    pub functions: usize,
    pub finite: usize,
    pub max_ratio: f64,
    pub min_ratio: f64,
    pub mean_ratio: f64,
    pub length_scale: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub parameter: f64,
    pub order: Option<usize>,
    pub value: Option<f64>,
    pub pass: bool,
}

/// Per-member report of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub enum MemberReport {
    Count(Report<CountRow>),
    Heat(Report<HeatRow>),
    Sobolev(Report<SobolevRow>),
}

impl MemberReport {
    pub fn pass(&self) -> bool {
        match self {
            MemberReport::Count(r) => r.pass,
            MemberReport::Heat(r) => r.pass,
            MemberReport::Sobolev(r) => r.pass,
        }
    }

    pub fn write(&self, dir: &Path, stem: &str) -> Result<Vec<PathBuf>> {
        match self {
            MemberReport::Count(r) => r.write(dir, stem),
            MemberReport::Heat(r) => r.write(dir, stem),
            MemberReport::Sobolev(r) => r.write(dir, stem),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepOutcome {
    pub summary: Report<SweepRow>,
    pub members: Vec<MemberReport>,
}

fn provenance(cfg: &ExperimentConfig, experiment: &str, model: &Model) -> Provenance {
    Provenance::new(experiment, model.describe(), cfg.monte_carlo.seed, cfg.monte_carlo.samples)
}

/// Splits an infeasible fit into a note; other errors propagate.
fn settle_fit(fit: orbitcount_core::Result<f64>, notes: &mut Vec<String>) -> Result<Option<f64>> {
    match fit {
        Ok(c) => Ok(Some(c)),
        Err(e @ CoreError::Infeasible { .. }) => {
            notes.push(e.to_string());
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// `N(λ)` by inertia against `N₀(λ)` by Monte Carlo on every grid point,
/// and the fitted two-sided constant.
pub fn run_count(cfg: &ExperimentConfig, exec: &Executor) -> Result<Report<CountRow>> {
    let model = Model::from_config(&cfg.model)?;
    model.gate()?;
    let lambdas = cfg.lambda_points()?;
    let w = model.weight()?;
    let (choice, op) = choose_grid(&model, &*w, max_of(&lambdas), &cfg.grid)?;
    let mut notes = model.positivity_notes(choice.half_width);
    let (samples, seed) = (cfg.monte_carlo.samples, cfg.monte_carlo.seed);
    let rows = exec.install(|| {
        lambdas
            .par_iter()
            .enumerate()
            .map(|(i, &lambda)| {
                let n = inertia_count(&op.matrix, lambda)?;
                let est = n0_parallel(&*w, lambda, samples, derive_seed(seed, i as u64))?;
                Ok(CountRow {
                    lambda,
                    n,
                    n0: est.value,
                    n0_stderr: est.stderr,
                    ratio: (est.value > 0.0).then(|| n as f64 / est.value),
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let fit_rows: Vec<FitRow> = rows
        .iter()
        .map(|r| FitRow {
            x: r.lambda,
            value: r.n as f64,
            proxy: r.n0,
        })
        .collect();
    let fitted = settle_fit(fit_constant(&fit_rows, FitMode::Count), &mut notes)?;
    let mut metrics = BTreeMap::new();
    let xs: Vec<f64> = rows.iter().map(|r| r.lambda).collect();
    let ns: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let n0s: Vec<f64> = rows.iter().map(|r| r.n0).collect();
    if let Some(s) = loglog_slope(&xs, &ns) {
        metrics.insert("slope_n".into(), s);
    }
    if let Some(s) = loglog_slope(&xs, &n0s) {
        metrics.insert("slope_n0".into(), s);
    }
    let mut prov = provenance(cfg, "count", &model);
    prov.grid = Some(choice);
    Ok(Report {
        fitted_c: fitted,
        pass: fitted.is_some_and(|c| c <= cfg.ceiling_c),
        ceiling: cfg.ceiling_c,
        rows,
        metrics,
        notes,
        provenance: prov,
    })
}

/// `Z(t)` from the certified eigenvalues below the cutoff against `Z₀(t)`
/// from a shared `N₀` curve, and the fitted heat constant.
pub fn run_heat(cfg: &ExperimentConfig, exec: &Executor) -> Result<Report<HeatRow>> {
    let model = Model::from_config(&cfg.model)?;
    model.gate()?;
    let ts = cfg.t_points()?;
    let cutoff = cfg.heat.cutoff;
    let w = model.weight()?;
    let (choice, op) = choose_grid(&model, &*w, cutoff, &cfg.grid)?;
    let mut notes = model.positivity_notes(choice.half_width);
    let count = inertia_count(&op.matrix, cutoff)?;
    let eigs = if count > 0 { lowest_eigs(&op.matrix, count)? } else { Vec::new() };
    let t_min = ts.iter().copied().fold(f64::INFINITY, f64::min);
    let spec = QuadratureSpec {
        nodes: cfg.heat.nodes,
        ..QuadratureSpec::new(t_min, cfg.heat.samples_per_node, derive_seed(cfg.monte_carlo.seed, HEAT_TAG))
    };
    let curve = exec.install(|| n0_curve(&*w, &spec))?;
    let n0 = |s: f64| power_law(&curve.nodes, &curve.values, s);

    let mut metrics = BTreeMap::new();
    let slack = match cfg.heat.tail_slack {
        Some(s) => s,
        None => {
            let lowest = eigs.first().copied().unwrap_or(cutoff);
            let rows: Vec<FitRow> = curve
                .nodes
                .iter()
                .filter(|&&s| s > lowest && s <= cutoff)
                .map(|&s| FitRow {
                    x: s,
                    value: eigs.iter().filter(|&&l| l < s).count() as f64,
                    proxy: n0(s),
                })
                .collect();
            let fitted = if rows.is_empty() {
                None
            } else {
                settle_fit(fit_constant_with(&rows, FitMode::Count, n0), &mut notes)?
            };
            fitted.unwrap_or_else(|| {
                notes.push(format!("count fit for the tail failed; tail slack set to the ceiling {}", cfg.ceiling_c));
                cfg.ceiling_c
            })
        }
    };
    metrics.insert("tail_slack".into(), slack);
    metrics.insert("cutoff".into(), cutoff);
    metrics.insert("eigenvalues_below_cutoff".into(), count as f64);

    let rows = ts
        .iter()
        .map(|&t| {
            let h = heat_trace(&eigs, count, cutoff, t, n0, slack)?;
            Ok(HeatRow {
                t,
                z: h.value,
                tail_bound: h.tail_bound,
                terms: h.terms,
                z0: curve.z0(t)?,
                z0_stderr: curve.z0_stderr(t),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let fit_rows: Vec<FitRow> = rows
        .iter()
        .map(|r| FitRow {
            x: r.t,
            value: r.z,
            proxy: r.z0,
        })
        .collect();
    let fitted = settle_fit(
        fit_constant_with(&fit_rows, FitMode::Heat, |t| curve.z0(t).unwrap_or(f64::NAN)),
        &mut notes,
    )?;
    let mut prov = provenance(cfg, "heat", &model);
    prov.samples = cfg.heat.samples_per_node;
    prov.grid = Some(choice);
    Ok(Report {
        fitted_c: fitted,
        pass: fitted.is_some_and(|c| c <= cfg.ceiling_c),
        ceiling: cfg.ceiling_c,
        rows,
        metrics,
        notes,
        provenance: prov,
    })
}

/// `N₀(λ)` alone.
pub fn run_volume(cfg: &ExperimentConfig, exec: &Executor) -> Result<Report<VolumeRow>> {
    let model = Model::from_config(&cfg.model)?;
    model.gate()?;
    let lambdas = cfg.lambda_points()?;
    let w = model.weight()?;
    let (samples, seed) = (cfg.monte_carlo.samples, cfg.monte_carlo.seed);
    let rows = exec.install(|| {
        lambdas
            .par_iter()
            .enumerate()
            .map(|(i, &lambda)| {
                let e = n0_parallel(&*w, lambda, samples, derive_seed(seed, i as u64))?;
                Ok(VolumeRow {
                    lambda,
                    n0: e.value,
                    stderr: e.stderr,
                    hits: e.hits,
                    samples: e.samples,
                    x_half: e.bbox.x_half,
                    xi_half: e.bbox.xi_half,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let notes = match cfg.grid.half_width {
        Some(l) => model.positivity_notes(l),
        None => model.positivity_notes(box_half_width(&*w, max_of(&lambdas).sqrt())?),
    };
    Ok(Report {
        fitted_c: None,
        pass: true,
        ceiling: cfg.ceiling_c,
        rows,
        metrics: BTreeMap::new(),
        notes,
        provenance: provenance(cfg, "volume", &model),
    })
}

/// Largest ratio `Σ‖M_π^{m-|I|} π(X_I) u‖² / ‖u‖²_{m,π}` over a random
/// band-limited ensemble, per order `m`.
pub fn run_sobolev(cfg: &ExperimentConfig, exec: &Executor) -> Result<Report<SobolevRow>> {
    let model = Model::from_config(&cfg.model)?;
    let rep = model
        .representation()
        .ok_or_else(|| HarnessError::Config("the Sobolev check needs a representation model".into()))?;
    if let Some(m) = cfg.sobolev.orders.iter().find(|&&m| m > MAX_SOBOLEV_ORDER) {
        return Err(HarnessError::Config(format!(
            "unsupported Sobolev order m = {m}; supported orders are 0..={MAX_SOBOLEV_ORDER}"
        )));
    }
    if cfg.sobolev.orders.is_empty() || cfg.sobolev.functions == 0 {
        return Err(HarnessError::Config("sobolev needs at least one order and one function".into()));
    }
    let ctx = SobolevContext::scale_adapted(rep, cfg.sobolev.points)?;
    let ensemble = ctx.ensemble(cfg.sobolev.functions, cfg.monte_carlo.seed)?;
    let rows = exec.install(|| {
        cfg.sobolev
            .orders
            .par_iter()
            .map(|&m| {
                let ratios = ensemble
                    .par_iter()
                    .map(|u| Ok(ctx.ratio(u, m)?.unwrap_or(f64::NAN)))
                    .collect::<Result<Vec<f64>>>()?;
                let finite: Vec<f64> = ratios.iter().copied().filter(|r| r.is_finite()).collect();
                Ok(SobolevRow {
                    order: m,
                    functions: ratios.len(),
                    finite: finite.len(),
                    max_ratio: max_of(&ratios),
                    min_ratio: ratios.iter().copied().fold(f64::INFINITY, f64::min),
                    mean_ratio: ratios.iter().sum::<f64>() / ratios.len() as f64,
                    length_scale: ctx.length_scale(),
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let pass = rows.iter().all(|r| r.finite == r.functions);
    let mut prov = provenance(cfg, "sobolev", &model);
    prov.samples = cfg.sobolev.functions as u64;
    Ok(Report {
        fitted_c: None,
        pass,
        ceiling: cfg.ceiling_c,
        rows,
        metrics: BTreeMap::new(),
        notes: vec!["test functions with ||forward difference||^2 > ||u||^2 / h^2 are redrawn (band limit)".into()],
        provenance: prov,
    })
}

/// Runs the configured experiment for every family parameter and checks
/// that the fitted quantity varies by less than `max_variation`.
pub fn run_sweep(cfg: &ExperimentConfig, exec: &Executor) -> Result<SweepOutcome> {
    let sw = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| HarnessError::Config("missing [sweep] section".into()))?;
    let members = exec.install(|| {
        sw.parameters
            .par_iter()
            .map(|&p| {
                let mut member = cfg.clone();
                member.model = cfg.model.with_parameter(p)?;
                member.sweep = None;
                Ok(match sw.experiment {
                    SweepKind::Count => MemberReport::Count(run_count(&member, exec)?),
                    SweepKind::Heat => MemberReport::Heat(run_heat(&member, exec)?),
                    SweepKind::Sobolev => MemberReport::Sobolev(run_sobolev(&member, exec)?),
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut rows = Vec::new();
    for (&p, m) in sw.parameters.iter().zip(&members) {
        match m {
            MemberReport::Count(r) => rows.push(SweepRow {
                parameter: p,
                order: None,
                value: r.fitted_c,
                pass: r.pass,
            }),
            MemberReport::Heat(r) => rows.push(SweepRow {
                parameter: p,
                order: None,
                value: r.fitted_c,
                pass: r.pass,
            }),
            MemberReport::Sobolev(r) => rows.extend(r.rows.iter().map(|s| SweepRow {
                parameter: p,
                order: Some(s.order),
                value: Some(s.max_ratio),
                pass: r.pass,
            })),
        }
    }
    let mut groups: BTreeMap<Option<usize>, Vec<Option<f64>>> = BTreeMap::new();
    for r in &rows {
        groups.entry(r.order).or_default().push(r.value);
    }
    let mut metrics = BTreeMap::new();
    let mut stable = true;
    for (order, values) in &groups {
        let key = match order {
            Some(m) => format!("variation_m{m}"),
            None => "variation".to_string(),
        };
        let v: Option<Vec<f64>> = values.iter().copied().collect();
        let variation = match v {
            Some(v) if v.iter().all(|x| *x > 0.0 && x.is_finite()) => {
                max_of(&v) / v.iter().copied().fold(f64::INFINITY, f64::min)
            }
            _ => f64::INFINITY,
        };
        stable &= variation < sw.max_variation;
        metrics.insert(key, variation);
    }
    let fitted = match sw.experiment {
        SweepKind::Sobolev => None,
        _ => rows.iter().map(|r| r.value).collect::<Option<Vec<f64>>>().map(|v| max_of(&v)),
    };
    let first = Model::from_config(&cfg.model.with_parameter(sw.parameters[0])?)?;
    let mut prov = provenance(cfg, "sweep", &first);
    prov.model = format!("{} family over {:?}", prov.model, sw.parameters);
    let summary = Report {
        fitted_c: fitted,
        pass: stable && members.iter().all(MemberReport::pass),
        ceiling: cfg.ceiling_c,
        rows,
        metrics,
        notes: Vec::new(),
        provenance: prov,
    };
    Ok(SweepOutcome { summary, members })
}

/// Schema, algebra and degeneracy checks, without numerics beyond the gate.
pub fn run_validate(cfg: &ExperimentConfig) -> Result<Vec<String>> {
    cfg.validate()?;
    let model = Model::from_config(&cfg.model)?;
    let mut lines = vec![format!("model: {}", model.describe())];
    if let Some(rep) = model.representation() {
        let alg = rep.algebra();
        lines.push(format!(
            "algebra: dimension {}, step {}, first stratum {}",
            alg.dim(),
            alg.step(),
            alg.p()
        ));
    }
    let hint = cfg.grid.half_width.unwrap_or(4.0);
    lines.extend(model.check(hint)?);
    if let Ok(l) = cfg.lambda_points() {
        lines.push(format!("lambda grid: {} points in [{}, {}]", l.len(), l[0], max_of(&l)));
    }
    if let Ok(t) = cfg.t_points() {
        lines.push(format!("t grid: {} points", t.len()));
    }
    if let Some(sw) = &cfg.sweep {
        for &p in &sw.parameters {
            Model::from_config(&cfg.model.with_parameter(p)?)?.gate()?;
        }
        lines.push(format!("sweep: {} members", sw.parameters.len()));
    }
    lines.push("valid".into());
    Ok(lines)
}
