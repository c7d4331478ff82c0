use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // resolved through std when dev-dependency features enable it
use num_traits::Float as _;

use crate::error::{Error, Result};

/// Default cap on the number of grid nodes.
pub const DEFAULT_POINT_CAP: usize = 4_000_000;

/// Interior nodes of a Dirichlet grid on `[-L, L]^n`: `m` per axis, spacing
/// `h = 2L / (m + 1)`, node `i` of an axis at `-L + (i + 1) h`. Flat indices
/// are lexicographic with axis 0 fastest.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub n: usize,
    pub half_width: f64,
    pub m: usize,
}

impl GridSpec {
    pub fn new(n: usize, half_width: f64, m: usize) -> Result<Self> {
        Self::with_cap(n, half_width, m, DEFAULT_POINT_CAP)
    }

    pub fn with_cap(n: usize, half_width: f64, m: usize, cap: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("grid dimension must be positive".into()));
        }
        if m < 8 {
            return Err(Error::InvalidParameter(format!("grid needs m >= 8 points per axis, got {m}")));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidParameter(format!("grid half-width must be positive, got {half_width}")));
        }
        let points = (0..n).try_fold(1usize, |acc, _| acc.checked_mul(m));
        match points {
            Some(p) if p <= cap => Ok(GridSpec { n, half_width, m }),
            _ => Err(Error::GridCap {
                points: points.unwrap_or(usize::MAX),
                cap,
            }),
        }
    }

    pub fn h(&self) -> f64 {
        2.0 * self.half_width / (self.m + 1) as f64
    }

    pub fn len(&self) -> usize {
        self.m.pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Flat-index offset between neighbours along `axis`.
    pub fn stride(&self, axis: usize) -> usize {
        self.m.pow(axis as u32)
    }

    /// Coordinate of axis index `i` (may be `-1` or `m` for boundary ghosts).
    pub fn coord(&self, i: isize) -> f64 {
        -self.half_width + (i + 1) as f64 * self.h()
    }

    /// Per-axis indices of a flat node index.
    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.n];
        for v in idx.iter_mut() {
            *v = flat % self.m;
            flat /= self.m;
        }
        idx
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .into_iter()
            .map(|i| self.coord(i as isize))
            .collect()
    }

    /// Coordinates of every node, row by row.
    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|k| self.point(k)).collect()
    }

    /// `h^{n/2}`, the weight turning vector norms into discrete `L²` norms.
    pub fn l2_weight(&self) -> f64 {
        self.h().powf(self.n as f64 / 2.0)
    }

    /// Lower bandwidth of lexicographic nearest-neighbour operators.
    pub fn bandwidth(&self) -> usize {
        self.stride(self.n - 1)
    }
}
