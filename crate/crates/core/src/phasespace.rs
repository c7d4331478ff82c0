//! Phase-space proxies: the volume `N₀(λ)` of `{(x, ξ) : M(x, ξ)² ≤ λ}` and
//! `Z₀(t) = ∫ exp(-t M(x, ξ)²) dx dξ`.
//!
//! Sampling is split into fixed-size chunks. Chunk `k` draws from the ChaCha8
//! stream `k` of the seed, and chunk results are integers or are merged in
//! chunk order, so any parallel schedule over chunks reproduces the serial
//! result bit for bit.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // resolved through std when dev-dependency features enable it
use num_traits::Float as _;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::{interp, spectral};
use crate::nilpotent::Representation;
use crate::schrodinger::{MWeight, SchrodingerModel};

/// Samples per chunk.
pub const CHUNK: usize = 4096;
/// Largest half-width tried by [`bounding_box`].
pub const BOX_CAP: f64 = (1u64 << 20) as f64;
/// Boundary points per face of the x-cube used by [`bounding_box`].
const FACE_POINTS: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightKind {
    Schrodinger,
    Representation,
}

/// A phase-space weight `w(x, ξ) ≥ |ξ|`.
pub trait WeightEvaluator: Sync {
    /// Configuration-space dimension `n`.
    fn dim(&self) -> usize;
    fn weight(&self, x: &[f64], xi: &[f64]) -> f64;
    /// `inf_ξ w(x, ξ)`.
    fn floor(&self, x: &[f64]) -> f64;
    fn kind(&self) -> WeightKind;
}

/// `M(x, ξ) = |ξ| + M(x)` of a Schrödinger model.
#[derive(Clone, Debug)]
pub struct SchrodingerWeight {
    m: MWeight,
}

impl SchrodingerWeight {
    pub fn new(model: &SchrodingerModel) -> Self {
        SchrodingerWeight { m: model.weight() }
    }

    pub fn m(&self) -> &MWeight {
        &self.m
    }
}

impl WeightEvaluator for SchrodingerWeight {
    fn dim(&self) -> usize {
        self.m.dim()
    }

    fn weight(&self, x: &[f64], xi: &[f64]) -> f64 {
        self.m.m_symbol(x, xi)
    }

    fn floor(&self, x: &[f64]) -> f64 {
        self.m.m_weight(x)
    }

    fn kind(&self) -> WeightKind {
        WeightKind::Schrodinger
    }
}

/// `M_π(x, ξ)` of a representation.
#[derive(Clone, Debug)]
pub struct RepresentationWeight {
    rep: Representation,
}

impl RepresentationWeight {
    /// Fails if the stratum-1 symbols do not determine `ξ` at the origin.
    pub fn new(rep: Representation) -> Result<Self> {
        rep.stratum_one_seed(&vec![0.0; rep.n()])?;
        Ok(RepresentationWeight { rep })
    }

    pub fn representation(&self) -> &Representation {
        &self.rep
    }
}

impl WeightEvaluator for RepresentationWeight {
    fn dim(&self) -> usize {
        self.rep.n()
    }

    fn weight(&self, x: &[f64], xi: &[f64]) -> f64 {
        self.rep.m_pi(x, xi)
    }

    /// Falls back to 0 where the minimization is structurally impossible,
    /// which makes the box search report an unbounded sublevel set.
    fn floor(&self, x: &[f64]) -> f64 {
        self.rep.m_pi_inf(x).unwrap_or(0.0)
    }

    fn kind(&self) -> WeightKind {
        WeightKind::Representation
    }
}

/// Sampling region `[-x_half, x_half]^n × [-xi_half, xi_half]^n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseBox {
    pub n: usize,
    pub x_half: f64,
    pub xi_half: f64,
}

impl PhaseBox {
    pub fn volume(&self) -> f64 {
        (4.0 * self.x_half * self.xi_half).powi(self.n as i32)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VolumeEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: u64,
    pub hits: u64,
    pub bbox: PhaseBox,
    /// Smallest weight seen among the samples.
    pub min_weight: f64,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")))
    }
}

/// Box containing `{w² ≤ λ}`: `|ξ_k| ≤ √λ`, and `[-L, L]^n` with `L` doubled
/// from 1 until `inf_ξ w` exceeds `√λ` at every boundary sample point.
pub fn bounding_box<W: WeightEvaluator + ?Sized>(w: &W, lambda: f64) -> Result<PhaseBox> {
    check_lambda(lambda)?;
    let n = w.dim();
    let root = lambda.sqrt();
    let mut l = 1.0;
    loop {
        if boundary_clears(w, l, root) {
            return Ok(PhaseBox {
                n,
                x_half: l,
                xi_half: root,
            });
        }
        if l >= BOX_CAP {
            return Err(Error::UnboundedSublevel { lambda, cap: BOX_CAP });
        }
        l *= 2.0;
    }
}

/// `true` when `inf_ξ w > level` at every sample point of the boundary of
/// `[-l, l]^n` (all corners, then a Kronecker sequence on each face).
pub fn boundary_clears<W: WeightEvaluator + ?Sized>(w: &W, l: f64, level: f64) -> bool {
    let n = w.dim();
    let face = face_points(n);
    let mut x = vec![0.0; n];
    for axis in 0..n {
        for side in [-1.0, 1.0] {
            for pt in &face {
                let mut it = pt.iter();
                for (k, xk) in x.iter_mut().enumerate() {
                    *xk = if k == axis {
                        side * l
                    } else {
                        l * it.next().copied().unwrap_or(0.0)
                    };
                }
                if w.floor(&x) <= level {
                    return false;
                }
            }
        }
    }
    true
}

/// Deterministic points in `[-1, 1]^{n-1}` on a face, from a Kronecker
/// sequence; a single point when `n = 1`.
fn face_points(n: usize) -> Vec<Vec<f64>> {
    if n <= 1 {
        return vec![Vec::new()];
    }
    let d = n - 1;
    // generalized golden ratio: root of x^{d+1} = x + 1
    let mut phi = 2.0f64;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (d as f64 + 1.0));
    }
    let alpha: Vec<f64> = (1..=d).map(|k| (1.0 / phi.powi(k as i32)).fract()).collect();
    let mut pts = Vec::with_capacity(FACE_POINTS);
    // the corners first: they are where sublevel sets of anisotropic weights escape
    for c in 0..(1usize << d).min(FACE_POINTS) {
        pts.push((0..d).map(|k| if c >> k & 1 == 1 { 1.0 } else { -1.0 }).collect());
    }
    let mut i = 0usize;
    while pts.len() < FACE_POINTS {
        i += 1;
        pts.push(alpha.iter().map(|a| 2.0 * (0.5 + a * i as f64).fract() - 1.0).collect());
    }
    pts
}

/// Counts for one sampling chunk.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChunkTally {
    pub hits: u64,
    pub samples: u64,
    pub min_weight: f64,
}

impl ChunkTally {
    pub fn empty() -> Self {
        ChunkTally {
            hits: 0,
            samples: 0,
            min_weight: f64::INFINITY,
        }
    }

    pub fn merge(self, other: Self) -> Self {
        ChunkTally {
            hits: self.hits + other.hits,
            samples: self.samples + other.samples,
            min_weight: self.min_weight.min(other.min_weight),
        }
    }
}

/// `(chunk index, sample count)` pairs covering `n_samples`.
pub fn chunk_plan(n_samples: u64) -> Vec<(u64, usize)> {
    let full = n_samples / CHUNK as u64;
    let rest = (n_samples % CHUNK as u64) as usize;
    let mut plan: Vec<(u64, usize)> = (0..full).map(|k| (k, CHUNK)).collect();
    if rest > 0 {
        plan.push((full, rest));
    }
    plan
}

/// Random generator of chunk `index` for `seed`.
pub fn chunk_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Decorrelated seed for sub-task `tag` (SplitMix64 finalizer).
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn sample_point(rng: &mut ChaCha8Rng, bbox: &PhaseBox, x: &mut [f64], xi: &mut [f64]) {
    for v in x.iter_mut() {
        *v = bbox.x_half * (2.0 * rng.random::<f64>() - 1.0);
    }
    for v in xi.iter_mut() {
        *v = bbox.xi_half * (2.0 * rng.random::<f64>() - 1.0);
    }
}

/// Hit count of `{w² ≤ λ}` for one chunk of uniform samples in `bbox`.
pub fn tally_chunk<W: WeightEvaluator + ?Sized>(
    w: &W,
    bbox: &PhaseBox,
    lambda: f64,
    seed: u64,
    index: u64,
    len: usize,
) -> ChunkTally {
    let mut rng = chunk_rng(seed, index);
    let n = w.dim();
    let (mut x, mut xi) = (vec![0.0; n], vec![0.0; n]);
    let root = lambda.sqrt();
    let mut tally = ChunkTally::empty();
    for _ in 0..len {
        sample_point(&mut rng, bbox, &mut x, &mut xi);
        let v = w.weight(&x, &xi);
        tally.min_weight = tally.min_weight.min(v);
        if v <= root {
            tally.hits += 1;
        }
    }
    tally.samples = len as u64;
    tally
}

/// Turns merged tallies into a volume with its binomial standard error.
pub fn volume_from_tally(tally: ChunkTally, bbox: PhaseBox) -> VolumeEstimate {
    let vol = bbox.volume();
    let (value, stderr) = if tally.samples == 0 {
        (0.0, 0.0)
    } else {
        let n = tally.samples as f64;
        let p = tally.hits as f64 / n;
        (vol * p, vol * (p * (1.0 - p) / n).sqrt())
    };
    VolumeEstimate {
        value,
        stderr,
        samples: tally.samples,
        hits: tally.hits,
        bbox,
        min_weight: tally.min_weight,
    }
}

fn check_samples(n_samples: u64) -> Result<()> {
    if n_samples < 1000 {
        return Err(Error::InvalidParameter(format!(
            "at least 1000 samples required, got {n_samples}"
        )));
    }
    Ok(())
}

/// Monte Carlo estimate of `N₀(λ)`.
pub fn n0_estimate<W: WeightEvaluator + ?Sized>(w: &W, lambda: f64, n_samples: u64, seed: u64) -> Result<VolumeEstimate> {
    check_samples(n_samples)?;
    let bbox = bounding_box(w, lambda)?;
    let tally = chunk_plan(n_samples)
        .into_iter()
        .map(|(k, len)| tally_chunk(w, &bbox, lambda, seed, k, len))
        .fold(ChunkTally::empty(), ChunkTally::merge);
    Ok(volume_from_tally(tally, bbox))
}

/// Indicator quadrature of `N₀(λ)` on a `pts^{2n}` cell grid over the
/// bounding box. Sample points sit at irrational offsets inside the cells so
/// that polyhedral sublevel boundaries do not pass through them. Only for
/// `2n ≤ 4`.
pub fn n0_grid_oracle<W: WeightEvaluator + ?Sized>(w: &W, lambda: f64, pts: usize) -> Result<f64> {
    let n = w.dim();
    if 2 * n > 4 {
        return Err(Error::InvalidParameter(format!(
            "grid oracle needs 2n <= 4, got n = {n}"
        )));
    }
    if pts < 64 {
        return Err(Error::InvalidParameter(format!("grid oracle needs >= 64 points per axis, got {pts}")));
    }
    let bbox = bounding_box(w, lambda)?;
    let root = lambda.sqrt();
    let hx = 2.0 * bbox.x_half / pts as f64;
    let hk = 2.0 * bbox.xi_half / pts as f64;
    let total = pts.pow(2 * n as u32);
    let (mut x, mut xi) = (vec![0.0; n], vec![0.0; n]);
    let mut hits = 0u64;
    for flat in 0..total {
        let mut rest = flat;
        for k in 0..n {
            x[k] = -bbox.x_half + hx * ((rest % pts) as f64 + X_OFFSET);
            rest /= pts;
        }
        for k in 0..n {
            xi[k] = -bbox.xi_half + hk * ((rest % pts) as f64 + XI_OFFSET);
            rest /= pts;
        }
        if w.weight(&x, &xi) <= root {
            hits += 1;
        }
    }
    Ok(bbox.volume() * hits as f64 / total as f64)
}

const X_OFFSET: f64 = 0.618_033_988_749_894_8;
const XI_OFFSET: f64 = 0.414_213_562_373_095_1;

/// `count` geometric nodes from `lo` to `hi` inclusive.
pub fn geometric_nodes(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let ratio = (hi / lo).ln() / (count - 1) as f64;
    (0..count).map(|i| lo * (ratio * i as f64).exp()).collect()
}

/// Settings for the layer-cake evaluation of `Z₀`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    pub nodes: usize,
    pub samples_per_node: u64,
    pub seed: u64,
    /// Smallest `t` the curve must serve; sets the upper node `50 / t_min`.
    pub t_min: f64,
}

impl QuadratureSpec {
    pub fn new(t_min: f64, samples_per_node: u64, seed: u64) -> Self {
        QuadratureSpec {
            nodes: 64,
            samples_per_node,
            seed,
            t_min,
        }
    }
}

/// Smallest weight seen over a pilot sample of the sublevel box at
/// `λ = (2 inf_ξ w(0, ξ))² + 1`, which is non-empty by construction.
pub fn pilot_min_weight<W: WeightEvaluator + ?Sized>(w: &W, n_samples: u64, seed: u64) -> Result<f64> {
    let origin = vec![0.0; w.dim()];
    let f0 = w.floor(&origin);
    let lambda = (2.0 * f0).powi(2) + 1.0;
    let est = n0_estimate(w, lambda, n_samples.max(1000), derive_seed(seed, u64::MAX))?;
    Ok(est.min_weight.min(f0))
}

/// `N₀` sampled on geometric nodes, reused across `t` for `Z₀(t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct N0Curve {
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
    pub stderrs: Vec<f64>,
}

impl N0Curve {
    /// Nodes spanning `[s_min / 10, 50 / t_min]`, where `s_min` is the squared
    /// pilot minimum of the weight.
    pub fn node_grid<W: WeightEvaluator + ?Sized>(w: &W, spec: &QuadratureSpec) -> Result<Vec<f64>> {
        check_t(spec.t_min)?;
        let wmin = pilot_min_weight(w, spec.samples_per_node, spec.seed)?;
        let lo = (wmin * wmin / 10.0).max(f64::MIN_POSITIVE.sqrt());
        let hi = (50.0 / spec.t_min).max(lo * 1e3);
        Ok(geometric_nodes(lo, hi, spec.nodes.max(2)))
    }

    pub fn from_estimates(nodes: Vec<f64>, estimates: &[VolumeEstimate]) -> Self {
        N0Curve {
            nodes,
            values: estimates.iter().map(|e| e.value).collect(),
            stderrs: estimates.iter().map(|e| e.stderr).collect(),
        }
    }

    /// Serial construction; node `i` uses seed `derive_seed(seed, i)`.
    pub fn build<W: WeightEvaluator + ?Sized>(w: &W, spec: &QuadratureSpec) -> Result<Self> {
        let nodes = Self::node_grid(w, spec)?;
        let estimates = nodes
            .iter()
            .enumerate()
            .map(|(i, &s)| n0_estimate(w, s, spec.samples_per_node, derive_seed(spec.seed, i as u64)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_estimates(nodes, &estimates))
    }

    /// `Z₀(t) = ∫ t e^{-ts} N₀(s) ds`, trapezoidal in `log s` over the nodes.
    /// Beyond the last node `N₀` is continued as the power law through the
    /// last two nodes, which keeps `Z₀` meaningful for `t` below `t_min`.
    pub fn z0(&self, t: f64) -> Result<f64> {
        check_t(t)?;
        let g: Vec<f64> = self
            .nodes
            .iter()
            .zip(&self.values)
            .map(|(&s, &n0)| t * (-t * s).exp() * n0 * s)
            .collect();
        let mut acc = 0.0;
        for i in 1..self.nodes.len() {
            let du = (self.nodes[i] / self.nodes[i - 1]).ln();
            acc += 0.5 * du * (g[i] + g[i - 1]);
        }
        if let Some(&last) = self.nodes.last() {
            let beyond = |s: f64| interp::power_law(&self.nodes, &self.values, s);
            acc += spectral::tail_bound(beyond, 1.0, last, t);
        }
        Ok(acc)
    }

    /// Propagated Monte Carlo standard error of [`N0Curve::z0`], treating
    /// nodes as independent.
    pub fn z0_stderr(&self, t: f64) -> f64 {
        let m = self.nodes.len();
        let mut var = 0.0;
        for i in 0..m {
            let lo = if i > 0 { (self.nodes[i] / self.nodes[i - 1]).ln() } else { 0.0 };
            let hi = if i + 1 < m { (self.nodes[i + 1] / self.nodes[i]).ln() } else { 0.0 };
            let s = self.nodes[i];
            let wgt = 0.5 * (lo + hi) * t * (-t * s).exp() * s;
            var += (wgt * self.stderrs[i]).powi(2);
        }
        var.sqrt()
    }
}

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("t must be positive, got {t}")))
    }
}

/// `Z₀(t)` through a freshly built [`N0Curve`].
pub fn z0_estimate<W: WeightEvaluator + ?Sized>(w: &W, t: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_t(t)?;
    let spec = QuadratureSpec {
        t_min: spec.t_min.min(t),
        ..*spec
    };
    N0Curve::build(w, &spec)?.z0(t)
}

/// Direct Monte Carlo of `∫ exp(-t w²)` over the box of `{w² ≤ 40 / t}`,
/// outside which the integrand is below `e^{-40}`. Chunk sums are added in
/// chunk order.
pub fn z0_direct<W: WeightEvaluator + ?Sized>(w: &W, t: f64, n_samples: u64, seed: u64) -> Result<VolumeEstimate> {
    check_t(t)?;
    check_samples(n_samples)?;
    let bbox = bounding_box(w, 40.0 / t)?;
    let n = w.dim();
    let (mut sum, mut sum2, mut count, mut minw) = (0.0, 0.0, 0u64, f64::INFINITY);
    for (k, len) in chunk_plan(n_samples) {
        let mut rng = chunk_rng(seed, k);
        let (mut x, mut xi) = (vec![0.0; n], vec![0.0; n]);
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..len {
            sample_point(&mut rng, &bbox, &mut x, &mut xi);
            let v = w.weight(&x, &xi);
            minw = minw.min(v);
            let f = (-t * v * v).exp();
            s1 += f;
            s2 += f * f;
        }
        sum += s1;
        sum2 += s2;
        count += len as u64;
    }
    let vol = bbox.volume();
    let nf = count as f64;
    let mean = sum / nf;
    let var = (sum2 / nf - mean * mean).max(0.0);
    Ok(VolumeEstimate {
        value: vol * mean,
        stderr: vol * (var / nf).sqrt(),
        samples: count,
        hits: 0,
        bbox,
        min_weight: minw,
    })
}
