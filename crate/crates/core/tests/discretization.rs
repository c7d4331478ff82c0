//! Discretization accuracy: grid convergence, gauge near-invariance and
//! known ground states.

use orbitcount_core::nilpotent::engel;
use orbitcount_core::schrodinger::SchrodingerModel;
use orbitcount_core::spectral::{assemble, kth_eigenvalue, lowest_eigs, GridSpec, OperatorSpec};
use orbitcount_core::MultiPoly;

fn var(n: usize, i: usize) -> MultiPoly {
    MultiPoly::var(n, i).unwrap()
}

fn harmonic_ground(m: usize) -> f64 {
    let model = SchrodingerModel::electric(var(1, 0).pow(2)).unwrap();
    let grid = GridSpec::new(1, 8.0, m).unwrap();
    let op = assemble(OperatorSpec::Schrodinger(&model), &grid).unwrap();
    kth_eigenvalue(&op.matrix, 0, 1e-13).unwrap()
}

#[test]
fn harmonic_ground_state_converges_at_second_order() {
    let coarse = harmonic_ground(159) - 1.0;
    let fine = harmonic_ground(319) - 1.0;
    let ratio = coarse / fine;
    assert!((3.6..=4.4).contains(&ratio), "error ratio {ratio} ({coarse}, {fine})");
}

#[test]
fn pure_gauge_potential_barely_moves_the_spectrum() {
    let (x1, x2) = (var(2, 0), var(2, 1));
    let v = &x1.pow(2) + &x2.pow(2);
    let plain = SchrodingerModel::electric(v.clone()).unwrap();
    // A = ∇(x₁x₂)
    let gauged = SchrodingerModel::new(vec![x2.clone(), x1.clone()], v).unwrap();
    assert!(gauged.magnetic_matrix().is_zero());
    let grid = GridSpec::new(2, 6.0, 119).unwrap();
    let a = lowest_eigs(&assemble(OperatorSpec::Schrodinger(&plain), &grid).unwrap().matrix, 6).unwrap();
    let b = lowest_eigs(&assemble(OperatorSpec::Schrodinger(&gauged), &grid).unwrap().matrix, 6).unwrap();
    for (k, (p, q)) in a.iter().zip(&b).enumerate() {
        assert!((p - q).abs() <= 0.01 * p, "eigenvalue {k}: {p} vs {q}");
    }
    for (k, (p, exact)) in a.iter().zip([2.0, 4.0, 4.0, 6.0, 6.0, 6.0]).enumerate() {
        assert!((p - exact).abs() <= 0.01 * exact, "eigenvalue {k}: {p}");
    }
}

#[test]
fn quartic_oscillator_ground_state() {
    // engel(2) realizes -d²/dx² + x⁴, ground state 1.0603620904…
    let rep = engel(2.0).unwrap();
    let ops = rep.sublaplacian_ops();
    let grid = GridSpec::new(1, 6.0, 1199).unwrap();
    let op = assemble(OperatorSpec::Sublaplacian(&ops), &grid).unwrap();
    let e0 = kth_eigenvalue(&op.matrix, 0, 1e-10).unwrap();
    assert!((e0 - 1.060_362_090_4).abs() < 1e-3, "{e0}");
}
