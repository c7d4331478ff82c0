//! Stratified nilpotent Lie algebras, their representations by first-order
//! polynomial differential operators in triangular form, orbit functionals,
//! homogeneous norms and the weights `M_π`.
//!
//! Basis indices are zero-based throughout: the first stratum is
//! `Y_0..Y_{p-1}`.

mod algebra;
mod operator;
mod representation;

pub use algebra::{SequenceTable, StratifiedAlgebra, SEQUENCE_CAP};
pub use operator::PolyDiffOp;
pub use representation::{
    builtin, dilate_form, engel, heisenberg, homogeneous_norm, Builtin, OrbitForm, Representation,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::{AlgebraViolation, Error};
    use crate::MultiPoly;
    use alloc::vec;
    use alloc::vec::Vec;
    use proptest::prelude::*;

    fn x1() -> MultiPoly {
        MultiPoly::var(1, 0).unwrap()
    }

    #[test]
    fn heisenberg_algebra_validates() {
        let alg = StratifiedAlgebra::new(&[2, 1], &[(0, 1, 2, 1.0)]).unwrap();
        assert_eq!((alg.dim(), alg.step(), alg.p()), (3, 2, 2));
        assert_eq!(alg.constant(1, 0, 2), -1.0);
    }

    #[test]
    fn single_stratum_heisenberg_fails_grading() {
        let alg = StratifiedAlgebra::from_constants(&[3], &[(0, 1, 2, 1.0)]).unwrap();
        assert!(matches!(alg.validate(), Err(AlgebraViolation::Grading { .. })));
    }

    #[test]
    fn abelian_two_strata_fails_generation() {
        let alg = StratifiedAlgebra::from_constants(&[1, 1], &[]).unwrap();
        assert_eq!(alg.validate(), Err(AlgebraViolation::Generation { rank: 1, dim: 2 }));
    }

    #[test]
    fn antisymmetry_and_jacobi_violations() {
        let mut c = vec![vec![vec![0.0; 3]; 3]; 3];
        c[0][1][2] = 1.0;
        let alg = StratifiedAlgebra::from_tensor(&[2, 1], c).unwrap();
        assert_eq!(alg.validate(), Err(AlgebraViolation::Antisymmetry { i: 0, j: 1, k: 2 }));

        // [Y0,Y1]=Y1 and [Y0,Y2]=Y1, [Y1,Y2]=Y0 is not a Lie algebra
        let alg = StratifiedAlgebra::from_constants(
            &[3],
            &[(0, 1, 1, 1.0), (0, 2, 1, 1.0), (1, 2, 0, 1.0)],
        )
        .unwrap();
        assert!(matches!(alg.validate(), Err(AlgebraViolation::Jacobi { .. })));
        assert!(matches!(
            StratifiedAlgebra::new(&[2, 0], &[]),
            Err(Error::Algebra(AlgebraViolation::Strata(_)))
        ));
    }

    #[test]
    fn bracket_examples() {
        let d = PolyDiffOp::derivative(1, 0).unwrap();
        let mu = 3.0;
        let h = PolyDiffOp::multiplication(x1().scale(mu));
        assert_eq!(d.bracket(&h).unwrap(), PolyDiffOp::multiplication(MultiPoly::constant(1, mu)));
        assert!(h.bracket(&h).unwrap().is_zero());
        assert!(d.bracket(&d).unwrap().is_zero());
        let e = PolyDiffOp::multiplication(x1().pow(2).scale(mu / 2.0));
        assert_eq!(d.bracket(&e).unwrap(), h);
        assert!(d.bracket(&PolyDiffOp::zero(2)).is_err());
    }

    #[test]
    fn bracket_of_vector_fields() {
        // [∂_0, x0 ∂_1] = ∂_1
        let d0 = PolyDiffOp::derivative(2, 0).unwrap();
        let x0 = MultiPoly::var(2, 0).unwrap();
        let f = PolyDiffOp::new(vec![MultiPoly::zero(2), x0], MultiPoly::zero(2)).unwrap();
        assert_eq!(d0.bracket(&f).unwrap(), PolyDiffOp::derivative(2, 1).unwrap());
    }

    #[test]
    fn symbol_examples() {
        let d = PolyDiffOp::derivative(1, 0).unwrap();
        assert_eq!(d.symbol(&[0.4], &[2.5]).im, 2.5);
        assert_eq!(d.symbol(&[0.4], &[2.5]).re, 0.0);
        let h = heisenberg(2.0).unwrap();
        assert_eq!(h.generator(1).symbol(&[1.5], &[9.0]).im, 3.0);
        assert_eq!(h.generator(2).symbol(&[-7.0], &[1.0]).im, 2.0);
    }

    #[test]
    fn iterated_commutator_examples() {
        let h = heisenberg(1.5).unwrap();
        assert_eq!(h.iterated_commutator(&[0, 1]).unwrap(), *h.generator(2));
        assert!(h.iterated_commutator(&[0, 0]).unwrap().is_zero());
        assert_eq!(h.iterated_commutator(&[1]).unwrap(), *h.generator(1));
        assert!(h.iterated_commutator(&[0, 2]).is_err());
        assert!(h.iterated_commutator(&[]).is_err());
        let e = engel(2.0).unwrap();
        assert_eq!(e.iterated_commutator(&[0, 0, 1]).unwrap(), *e.generator(3));
        for seq in e.algebra().sequences(4).unwrap() {
            if seq.len() == 4 {
                assert!(e.iterated_commutator(&seq).unwrap().is_zero(), "{seq:?}");
            }
        }
    }

    #[test]
    fn orbit_form_examples() {
        let h = heisenberg(1.0).unwrap();
        assert_eq!(h.orbit_form(&[2.0], &[3.0]).values, vec![3.0, 2.0, 1.0]);
        let e = engel(2.0).unwrap();
        let l = e.orbit_form(&[0.0], &[1.0]);
        assert_eq!(l.values, vec![1.0, 0.0, 0.0, 2.0]);
        assert_eq!(l.point, Some((vec![0.0], vec![1.0])));
        let l0 = h.orbit_form(&[0.0], &[0.0]);
        assert_eq!(&l0.values[..2], &[0.0, 0.0]);
    }

    #[test]
    fn homogeneous_norm_examples() {
        let h = heisenberg(1.0).unwrap();
        let (x, xi) = (-1.25, 0.5);
        let l = h.orbit_form(&[x], &[xi]);
        let n = homogeneous_norm(&l, h.algebra(), 2).unwrap();
        assert_eq!(n, 0.5 + 1.25 + 2.0);
        let zero = OrbitForm::new(vec![0.0; 3]);
        assert_eq!(homogeneous_norm(&zero, h.algebra(), 2).unwrap(), 0.0);
        assert!(homogeneous_norm(&OrbitForm::new(vec![1.0]), h.algebra(), 2).is_err());
    }

    #[test]
    fn dilation_examples() {
        let h = heisenberg(1.0).unwrap();
        let l = OrbitForm::new(vec![1.0, 1.0, 1.0]);
        assert_eq!(dilate_form(&l, 2.0, h.algebra()).unwrap().values, vec![2.0, 2.0, 4.0]);
        assert_eq!(dilate_form(&l, 1.0, h.algebra()).unwrap().values, l.values);
        assert!(dilate_form(&l, 0.0, h.algebra()).is_err());
        assert!(dilate_form(&l, -1.0, h.algebra()).is_err());
    }

    #[test]
    fn heisenberg_weight_closed_form() {
        for &mu in &[0.5, 1.0, 4.0, 16.0] {
            let h = heisenberg(mu).unwrap();
            for &(x, xi) in &[(0.0, 0.0), (1.5, -2.0), (-3.0, 0.25)] {
                let expected = f64::abs(xi) + mu * f64::abs(x) + 2.0 * mu.sqrt();
                let got = h.m_pi(&[x], &[xi]);
                assert!((got - expected).abs() <= 1e-12 * expected, "{mu} {x} {xi}");
                let inf = h.m_pi_inf(&[x]).unwrap();
                let expected_inf = mu * f64::abs(x) + 2.0 * mu.sqrt();
                assert!((inf - expected_inf).abs() <= 1e-8 * expected_inf, "{inf} {expected_inf}");
            }
        }
    }

    #[test]
    fn engel_weight_closed_form() {
        let e = engel(2.0).unwrap();
        for &(x, xi) in &[(0.0, 0.0), (0.7, 1.0), (-2.0, -3.5)] {
            let expected =
                f64::abs(xi) + x * x + 2.0 * (2.0 * f64::abs(x)).sqrt() + 2.0 * 2f64.powf(1.0 / 3.0);
            assert!((e.m_pi(&[x], &[xi]) - expected).abs() <= 1e-12 * expected);
        }
    }

    #[test]
    fn sublaplacian_generators() {
        let h = heisenberg(4.0).unwrap();
        let ops = h.sublaplacian_ops();
        assert_eq!(ops.len(), 2);
        assert_eq!(ops[0], PolyDiffOp::derivative(1, 0).unwrap());
        // (iμx)² = -μ²x², so π(X_1)*π(X_1) is multiplication by μ²x²
        assert_eq!(&ops[1].b().pow(2), &x1().pow(2).scale(16.0));
        let e = engel(2.0).unwrap();
        assert_eq!(e.sublaplacian_ops()[1].b().pow(2), x1().pow(4));
        let abelian = Representation::new(
            StratifiedAlgebra::new(&[1], &[]).unwrap(),
            vec![PolyDiffOp::derivative(1, 0).unwrap()],
        )
        .unwrap();
        assert_eq!(abelian.sublaplacian_ops().len(), 1);
    }

    #[test]
    fn builtins_reject_nonpositive_parameters() {
        assert!(heisenberg(0.0).is_err());
        assert!(engel(-1.0).is_err());
        assert!(builtin(Builtin::Heisenberg(f64::NAN)).is_err());
        assert!(builtin(Builtin::Engel(2.0)).is_ok());
    }

    #[test]
    fn non_homomorphism_rejected() {
        let alg = StratifiedAlgebra::new(&[2, 1], &[(0, 1, 2, 1.0)]).unwrap();
        let gens = vec![
            PolyDiffOp::derivative(1, 0).unwrap(),
            PolyDiffOp::multiplication(x1()),
            PolyDiffOp::multiplication(MultiPoly::constant(1, 2.0)),
        ];
        assert_eq!(Representation::new(alg, gens).unwrap_err(), Error::Homomorphism { i: 0, j: 1 });
    }

    #[test]
    fn non_triangular_rejected() {
        let alg = StratifiedAlgebra::new(&[1], &[]).unwrap();
        let gens = vec![PolyDiffOp::new(vec![x1()], MultiPoly::zero(1)).unwrap()];
        assert!(matches!(Representation::new(alg, gens), Err(Error::Structural(_))));
    }

    #[test]
    fn singular_stratum_one_is_structural() {
        // both stratum-1 generators are multiplications: ξ is undetermined
        let alg = StratifiedAlgebra::new(&[1], &[]).unwrap();
        let rep = Representation::new(alg, vec![PolyDiffOp::multiplication(x1())]).unwrap();
        assert!(matches!(rep.m_pi_inf(&[1.0]), Err(Error::Structural(_))));
    }

    #[test]
    fn sequence_cap_enforced() {
        let alg = StratifiedAlgebra::from_constants(&[20], &[]).unwrap();
        assert!(alg.sequences(3).is_ok());
        assert!(alg.sequences(4).is_err());
    }

    fn random_form() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-10.0f64..10.0, 4)
    }

    proptest! {
        #[test]
        fn norm_is_homogeneous(v in random_form(), ti in 0usize..3) {
            let t = [0.5, 2.0, 7.0][ti];
            let e = engel(1.0).unwrap();
            let l = OrbitForm::new(v);
            let base = homogeneous_norm(&l, e.algebra(), 3).unwrap();
            let scaled = homogeneous_norm(&dilate_form(&l, t, e.algebra()).unwrap(), e.algebra(), 3).unwrap();
            prop_assert!((scaled - t * base).abs() <= 1e-12 * (t * base).max(1e-300));
        }

        #[test]
        fn m_pi_matches_norm_of_orbit_form(x in -5.0f64..5.0, xi in -5.0f64..5.0, lam in 0.1f64..10.0) {
            for rep in [heisenberg(lam).unwrap(), engel(lam).unwrap()] {
                let m = rep.m_pi(&[x], &[xi]);
                let l = rep.orbit_form(&[x], &[xi]);
                let n = homogeneous_norm(&l, rep.algebra(), rep.algebra().step()).unwrap();
                prop_assert!((m - n).abs() <= 1e-12 * m);
            }
        }

        #[test]
        fn m_pi_inf_is_a_lower_bound(x in -5.0f64..5.0, xis in prop::collection::vec(-20.0f64..20.0, 8)) {
            let e = engel(2.0).unwrap();
            let inf = e.m_pi_inf(&[x]).unwrap();
            for xi in xis {
                prop_assert!(inf <= e.m_pi(&[x], &[xi]) + 1e-12);
            }
        }

        #[test]
        fn bracket_symbol_paths_agree(
            c in prop::collection::vec(-3i32..=3, 8), x in -2.0f64..2.0, y in -2.0f64..2.0,
            k0 in -2.0f64..2.0, k1 in -2.0f64..2.0,
        ) {
            // o1 = c0 ∂0 + (c1 x0) ∂1 + i(c2 x0 x1 + c3), o2 = c4 ∂0 + (c5 x0²) ∂1 + i(c6 x1² + c7 x0)
            let v = |i: usize, j: usize| MultiPoly::monomial(crate::Monomial::new(vec![i as u32, j as u32]), 1.0);
            let f = |k: usize| c[k] as f64;
            let o1 = PolyDiffOp::new(
                vec![MultiPoly::constant(2, f(0)), v(1, 0).scale(f(1))],
                &v(1, 1).scale(f(2)) + &MultiPoly::constant(2, f(3)),
            ).unwrap();
            let o2 = PolyDiffOp::new(
                vec![MultiPoly::constant(2, f(4)), v(2, 0).scale(f(5))],
                &v(0, 2).scale(f(6)) + &v(1, 0).scale(f(7)),
            ).unwrap();
            let br = o1.bracket(&o2).unwrap();
            // direct formula from pointwise derivatives
            let a1 = [f(0), f(1) * x];
            let a2 = [f(4), f(5) * x * x];
            let da1 = [[0.0, 0.0], [f(1), 0.0]];
            let da2 = [[0.0, 0.0], [2.0 * f(5) * x, 0.0]];
            let db1 = [f(2) * y, f(2) * x];
            let db2 = [f(7), 2.0 * f(6) * y];
            let mut expect = 0.0;
            let xi = [k0, k1];
            for k in 0..2 {
                let ak: f64 = (0..2).map(|j| a1[j] * da2[k][j] - a2[j] * da1[k][j]).sum();
                expect += ak * xi[k];
            }
            expect += (0..2).map(|j| a1[j] * db2[j] - a2[j] * db1[j]).sum::<f64>();
            let got = br.symbol(&[x, y], &xi).im;
            prop_assert!((got - expect).abs() <= 1e-12 * (1.0 + expect.abs()));
        }
    }

    #[test]
    fn engel_generation_is_full() {
        let e = engel(1.0).unwrap();
        let seqs: Vec<_> = e.algebra().sequences(3).unwrap();
        assert_eq!(seqs.len(), 2 + 4 + 8);
        assert_eq!(seqs[0], vec![0]);
        assert_eq!(seqs[2], vec![0, 0]);
    }
}
