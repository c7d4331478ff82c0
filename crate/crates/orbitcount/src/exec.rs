//! Parallel Monte Carlo over fixed sampling chunks.
//!
//! Chunk tallies are integer counts merged by an associative, commutative
//! reduction, so the estimates are identical for every worker count.

use rayon::prelude::*;
use rayon::ThreadPool;

use orbitcount_core::phasespace::{
    bounding_box, chunk_plan, derive_seed, tally_chunk, volume_from_tally, ChunkTally, N0Curve,
    QuadratureSpec, VolumeEstimate, WeightEvaluator,
};
use orbitcount_core::Error as CoreError;

use crate::error::{HarnessError, Result};

pub struct Executor {
    pool: ThreadPool,
}

impl Executor {
    /// `None` uses one worker per available core.
    pub fn new(workers: Option<usize>) -> Result<Self> {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(w) = workers {
            b = b.num_threads(w);
        }
        let pool = b
            .build()
            .map_err(|e| HarnessError::Config(format!("cannot start worker pool: {e}")))?;
        Ok(Executor { pool })
    }

    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }

    pub fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        self.pool.install(f)
    }
}

/// Parallel equivalent of [`orbitcount_core::phasespace::n0_estimate`].
pub fn n0_parallel<W: WeightEvaluator + ?Sized>(w: &W, lambda: f64, samples: u64, seed: u64) -> Result<VolumeEstimate> {
    if samples < 1000 {
        return Err(CoreError::InvalidParameter(format!("at least 1000 samples required, got {samples}")).into());
    }
    let bbox = bounding_box(w, lambda)?;
    let tally = chunk_plan(samples)
        .into_par_iter()
        .map(|(k, len)| tally_chunk(w, &bbox, lambda, seed, k, len))
        .reduce(ChunkTally::empty, ChunkTally::merge);
    Ok(volume_from_tally(tally, bbox))
}

/// Parallel equivalent of [`N0Curve::build`].
pub fn n0_curve<W: WeightEvaluator + ?Sized>(w: &W, spec: &QuadratureSpec) -> Result<N0Curve> {
    let nodes = N0Curve::node_grid(w, spec)?;
    let estimates = nodes
        .par_iter()
        .enumerate()
        .map(|(i, &s)| n0_parallel(w, s, spec.samples_per_node, derive_seed(spec.seed, i as u64)))
        .collect::<Result<Vec<_>>>()?;
    Ok(N0Curve::from_estimates(nodes, &estimates))
}

#[cfg(test)]
mod tests {
    use super::*;
    use orbitcount_core::nilpotent::heisenberg;
    use orbitcount_core::phasespace::{n0_estimate, RepresentationWeight};

    #[test]
    fn parallel_matches_serial_for_any_worker_count() {
        let w = RepresentationWeight::new(heisenberg(1.0).unwrap()).unwrap();
        let serial = n0_estimate(&w, 16.0, 50_000, 3).unwrap();
        for workers in [1, 3, 8] {
            let ex = Executor::new(Some(workers)).unwrap();
            let par = ex.install(|| n0_parallel(&w, 16.0, 50_000, 3)).unwrap();
            assert_eq!(par, serial);
        }
    }

    #[test]
    fn parallel_curve_matches_serial_build() {
        let w = RepresentationWeight::new(heisenberg(1.0).unwrap()).unwrap();
        let spec = QuadratureSpec {
            nodes: 8,
            ..QuadratureSpec::new(0.5, 2000, 11)
        };
        let ex = Executor::new(Some(4)).unwrap();
        assert_eq!(ex.install(|| n0_curve(&w, &spec)).unwrap(), N0Curve::build(&w, &spec).unwrap());
    }
}
