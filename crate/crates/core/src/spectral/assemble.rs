use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::grid::GridSpec;
use super::matrix::{HermitianMatrix, SparseHermitian};
use crate::error::{Error, Result};
use crate::nilpotent::PolyDiffOp;
use crate::polynomial::MultiPoly;
use crate::schrodinger::SchrodingerModel;

/// Operator to discretize.
#[derive(Clone, Copy, Debug)]
pub enum OperatorSpec<'a> {
    /// `Σ (D_j - A_j)² + V`.
    Schrodinger(&'a SchrodingerModel),
    /// `Σ π(X_j)* π(X_j)` for the given first-stratum images.
    Sublaplacian(&'a [PolyDiffOp]),
}

/// Discretized operator together with its grid.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperatorGrid {
    pub grid: GridSpec,
    pub matrix: HermitianMatrix,
}

/// Sparse (not necessarily square-symmetric) grid operator acting on nodal
/// values with zero Dirichlet extension.
#[derive(Clone, Debug, PartialEq)]
pub struct GridOp {
    rows: Vec<Vec<(usize, Complex64)>>,
}

impl GridOp {
    pub fn apply(&self, u: &[Complex64]) -> Vec<Complex64> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(j, v)| v * u[j]).sum())
            .collect()
    }

    pub fn rows(&self) -> &[Vec<(usize, Complex64)>] {
        &self.rows
    }
}

/// Nodal discretization of `π(X) = Σ a_k ∂_k + i b`: each `a_k ∂_k` becomes
/// the symmetrized centred product `½(D_k a_k + a_k D_k)`, so the result is
/// exactly skew-Hermitian.
pub fn nodal_operator(op: &PolyDiffOp, grid: &GridSpec) -> Result<GridOp> {
    check_dim(grid, op.nvars())?;
    let h = grid.h();
    let m = grid.m;
    let mut rows = Vec::with_capacity(grid.len());
    let mut y = vec![0.0; grid.n];
    for p in 0..grid.len() {
        let idx = grid.multi_index(p);
        let x = grid.point(p);
        let mut row: Vec<(usize, Complex64)> = Vec::new();
        for (k, ak) in op.a().iter().enumerate() {
            if ak.is_zero() {
                continue;
            }
            let stride = grid.stride(k);
            let a_here = ak.eval_unchecked(&x);
            if idx[k] + 1 < m {
                y.copy_from_slice(&x);
                y[k] = grid.coord(idx[k] as isize + 1);
                let a_up = ak.eval_unchecked(&y);
                row.push((p + stride, Complex64::new((a_up + a_here) / (4.0 * h), 0.0)));
            }
            if idx[k] > 0 {
                y.copy_from_slice(&x);
                y[k] = grid.coord(idx[k] as isize - 1);
                let a_down = ak.eval_unchecked(&y);
                row.push((p - stride, Complex64::new(-(a_down + a_here) / (4.0 * h), 0.0)));
            }
        }
        if !op.b().is_zero() {
            row.push((p, Complex64::new(0.0, op.b().eval_unchecked(&x))));
        }
        rows.push(row);
    }
    Ok(GridOp { rows })
}

fn check_dim(grid: &GridSpec, n: usize) -> Result<()> {
    if grid.n != n {
        return Err(Error::Dimension {
            expected: grid.n,
            found: n,
        });
    }
    Ok(())
}

/// Lower-triangle accumulator for `Σ_r F_rᴴ F_r`.
struct Accumulator {
    rows: Vec<Vec<(usize, Complex64)>>,
}

impl Accumulator {
    fn new(n: usize) -> Self {
        Accumulator {
            rows: vec![Vec::new(); n],
        }
    }

    fn add(&mut self, i: usize, j: usize, v: Complex64) {
        let row = &mut self.rows[i];
        match row.iter_mut().find(|e| e.0 == j) {
            Some(e) => e.1 += v,
            None => row.push((j, v)),
        }
    }

    /// Adds `fᴴ f` for one factor row `f`.
    fn add_gram(&mut self, factor: &[(usize, Complex64)]) {
        for &(c1, v1) in factor {
            for &(c2, v2) in factor {
                if c1 >= c2 {
                    self.add(c1, c2, v1.conj() * v2);
                }
            }
        }
    }

    fn finish(self) -> Result<HermitianMatrix> {
        Ok(HermitianMatrix::from_complex(SparseHermitian::from_lower_rows(self.rows)?))
    }
}

/// Staggered factor of `-i a ∂ + b` on the edge from node `p` (lower) to
/// node `q` (upper): `α u_q + β u_p` with coefficients at the edge midpoint.
fn edge_coefficients(a_mid: f64, b_mid: f64, h: f64) -> (Complex64, Complex64) {
    let alpha = Complex64::new(b_mid / 2.0, -a_mid / h);
    let beta = Complex64::new(b_mid / 2.0, a_mid / h);
    (alpha, beta)
}

/// Adds `Fᴴ F` for the staggered discretization of `-i a ∂_axis + b` along
/// `axis`, including the two Dirichlet boundary edges of every grid line.
fn add_edge_term(acc: &mut Accumulator, grid: &GridSpec, axis: usize, a: &MultiPoly, b: &MultiPoly) {
    let h = grid.h();
    let stride = grid.stride(axis);
    let m = grid.m;
    for p in 0..grid.len() {
        let idx = grid.multi_index(p);
        let mut mid = grid.point(p);
        let i = idx[axis];
        // edge towards the upper neighbour (or the upper ghost)
        mid[axis] = grid.coord(i as isize) + h / 2.0;
        let (alpha, beta) = edge_coefficients(a.eval_unchecked(&mid), b.eval_unchecked(&mid), h);
        if i + 1 < m {
            acc.add_gram(&[(p, beta), (p + stride, alpha)]);
        } else {
            acc.add_gram(&[(p, beta)]);
        }
        if i == 0 {
            mid[axis] = grid.coord(-1) + h / 2.0;
            let (alpha, _) = edge_coefficients(a.eval_unchecked(&mid), b.eval_unchecked(&mid), h);
            acc.add_gram(&[(p, alpha)]);
        }
    }
}

/// Discretizes the operator on `grid`.
///
/// First-order factors are staggered: `(D_j - A_j) u` lives on grid edges,
/// with `A_j` at the edge midpoint and `u` averaged over the two ends, and the
/// operator is assembled as `Σ FᴴF + diag V`. With `A = 0, V = 0` this is the
/// standard `(2, -1)/h²` Laplacian stencil. Sublaplacian generators that are
/// multiplications contribute `diag b²`; generators with derivatives along
/// several axes use the centred nodal form of [`nodal_operator`].
pub fn assemble(op: OperatorSpec<'_>, grid: &GridSpec) -> Result<HermitianOperatorGrid> {
    let mut acc = Accumulator::new(grid.len());
    match op {
        OperatorSpec::Schrodinger(model) => {
            check_dim(grid, model.dim())?;
            let one = MultiPoly::constant(grid.n, 1.0);
            for (j, aj) in model.vector_potential().iter().enumerate() {
                add_edge_term(&mut acc, grid, j, &one, &-aj);
            }
            let v = model.potential();
            if !v.is_zero() {
                for p in 0..grid.len() {
                    let val = v.eval_unchecked(&grid.point(p));
                    acc.add(p, p, Complex64::new(val, 0.0));
                }
            }
        }
        OperatorSpec::Sublaplacian(ops) => {
            for g in ops {
                check_dim(grid, g.nvars())?;
                let dirs: Vec<usize> = (0..grid.n).filter(|&k| !g.a()[k].is_zero()).collect();
                match dirs.as_slice() {
                    [] => {
                        for p in 0..grid.len() {
                            let b = g.b().eval_unchecked(&grid.point(p));
                            acc.add(p, p, Complex64::new(b * b, 0.0));
                        }
                    }
                    [k] => add_edge_term(&mut acc, grid, *k, &g.a()[*k], g.b()),
                    _ => {
                        let nodal = nodal_operator(g, grid)?;
                        let minus_i = Complex64::new(0.0, -1.0);
                        for row in nodal.rows() {
                            let f: Vec<(usize, Complex64)> = row.iter().map(|&(c, v)| (c, minus_i * v)).collect();
                            acc.add_gram(&f);
                        }
                    }
                }
            }
        }
    }
    let matrix = acc.finish()?;
    if matrix.dim() == 0 {
        return Err(Error::InvalidParameter(format!("empty grid {grid:?}")));
    }
    Ok(HermitianOperatorGrid { grid: *grid, matrix })
}
