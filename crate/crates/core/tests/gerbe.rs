use caloron_core::caloron::{cal_forward, CaloronFields, Connection3d, LiftedConnection};
use caloron_core::functionals::caloron_bf_action;
use caloron_core::gerbe::*;
use caloron_core::lie::SuN;
use caloron_core::loops::*;
use caloron_core::manifold::{FieldGrid, Kappa, Shape};
use caloron_core::sampling::FieldSampler;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_fields(d: i64, n: usize, seed: u64) -> CaloronFields {
    let s = Shape::cube(d, n);
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let a = FieldSampler::default().one_form(&mut r, s, 3);
    cal_forward(&Connection3d::new(a, Kappa::standard(s)).unwrap()).unwrap()
}

fn random_check(r: &mut ChaCha8Rng, n: usize) -> CheckVector {
    use rand::Rng;
    CheckVector {
        x: r.random_range(-1.0..1.0),
        xi: LoopElement::random(r, n, 3, 3, 0.7),
    }
}

#[test]
fn principal_curvature_lemma_on_trivial_bundle() {
    let g = SuN::new(2).unwrap();
    let f = random_fields(0, 16, 4);
    for k in 1..=3 {
        let rep = principal_curvature_check(&g, &f, &SplittingSigma::standard(), k).unwrap();
        assert!(rep.lemma_residual < 1e-9 * rep.scale.max(1.0), "{rep:?}");
        assert!(rep.center_residual < 1e-10, "{rep:?}");
    }
}

#[test]
fn principal_curvature_lemma_on_twisted_bundle() {
    let g = SuN::new(2).unwrap();
    let f = random_fields(1, 16, 8);
    let mut r = ChaCha8Rng::seed_from_u64(1);
    let shifted = SplittingSigma::shifted(0.3, LoopElement::random(&mut r, 16, 3, 2, 1.0));
    let rep = principal_curvature_check(&g, &f, &shifted, 2).unwrap();
    // F_Λ loop part agrees with the caloron-side assembly up to the x-stencil error.
    assert!(rep.lemma_residual < 1e-4 * rep.scale, "{rep:?}");
    assert!(rep.center_residual < 1e-10, "{rep:?}");
}

#[test]
fn flat_connection_without_higgs_has_only_rotation_curvature() {
    let g = SuN::new(2).unwrap();
    let s = Shape::cube(1, 16);
    let f = CaloronFields {
        lambda: {
            let mut l = Kappa::standard(s).form().clone();
            l.comps_mut()[2].iter_mut().for_each(|v| *v = 0.0);
            l
        },
        big_lambda: FieldGrid::zeros(s, 1, 3),
        phi: FieldGrid::zeros(s, 0, 3),
    };
    let pc = principal_curvature(&g, &f, &SplittingSigma::standard(), 1).unwrap();
    for v in &pc {
        assert!((v.x - 1.0).abs() < 1e-12);
        assert!(v.xi.sup_norm() < 1e-12 && v.y.abs() < 1e-12);
    }
}

#[test]
fn z_sigma_matches_group_cocycle_and_composes() {
    let g = SuN::new(2).unwrap();
    let n = 32;
    let mut r = ChaCha8Rng::seed_from_u64(21);
    let sigma = SplittingSigma::standard();
    for k in 1..=3 {
        for _ in 0..10 {
            let g1 = LoopGroupElement::from_exp(&g, &LoopElement::random(&mut r, n, 3, 2, 0.6));
            let g2 = LoopGroupElement::from_exp(&g, &LoopElement::random(&mut r, n, 3, 2, 0.6));
            let u = random_check(&mut r, n);
            let z = z_sigma(&g, &g1, &u, &sigma, k).unwrap();
            let oracle = group_cocycle_sigma(&g1, &u, k).unwrap();
            assert!((z - oracle).abs() < 1e-9);
            // Z(γ₁γ₂, X) = Z(γ₁, Ad_γ₂ X) + Z(γ₂, X).
            let g12 = g1.mul(&g, &g2).unwrap();
            let lhs = z_sigma(&g, &g12, &u, &sigma, k).unwrap();
            let ad2 = check_adjoint(&g, &g2, &u).unwrap();
            let rhs = z_sigma(&g, &g1, &ad2, &sigma, k).unwrap() + z_sigma(&g, &g2, &u, &sigma, k).unwrap();
            assert!((lhs - rhs).abs() < 1e-8, "{lhs} {rhs}");
        }
    }
}

#[test]
fn omega_sigma_is_a_cocycle() {
    let g = SuN::new(2).unwrap();
    let n = 32;
    let mut r = ChaCha8Rng::seed_from_u64(5);
    let shifted = SplittingSigma::shifted(-0.4, LoopElement::random(&mut r, n, 3, 2, 1.0));
    for sigma in [SplittingSigma::standard(), shifted] {
        for _ in 0..50 {
            let (a, b, c) = (random_check(&mut r, n), random_check(&mut r, n), random_check(&mut r, n));
            let om = |u: &CheckVector, v: &CheckVector| omega_sigma(&g, u, v, &sigma, 2).unwrap();
            let br = |u: &CheckVector, v: &CheckVector| check_bracket(&g, u, v).unwrap();
            let cyc = om(&br(&a, &b), &c) + om(&br(&b, &c), &a) + om(&br(&c, &a), &b);
            assert!(cyc.abs() < 1e-9, "{cyc}");
            assert!((om(&a, &b) + om(&b, &a)).abs() < 1e-12);
        }
    }
}

#[test]
fn lift_trivialization_and_twist() {
    let g = SuN::new(2).unwrap();
    let f = random_fields(0, 16, 30);
    let first = LiftedConnection::untwisted(f.clone());
    let same = lift_trivialization_check(&g, &first, &first, 2).unwrap();
    assert_eq!(same.first, same.second);
    assert!(same.pointwise_residual < 1e-12, "{same:?}");
    for n in [1, 3] {
        let mut second = first.clone();
        second.alpha.twist = n;
        let rep = lift_trivialization_check(&g, &first, &second, 2).unwrap();
        assert!((rep.second - rep.first - n as f64).abs() < 1e-8);
        assert!(rep.mod_one_distance < 1e-8);
        // The action is minus the integrated s(F_L̃).
        let s = caloron_bf_action(&g, &second, 2).unwrap().value;
        assert!((s + rep.second).abs() < 1e-10, "{s} {}", rep.second);
    }
}

#[test]
fn splitting_change_is_linear() {
    let g = SuN::new(2).unwrap();
    let n = 16;
    let f = random_fields(0, n, 6);
    let mut r = ChaCha8Rng::seed_from_u64(2);
    let sigma = SplittingSigma::standard();
    let sigma2 = SplittingSigma::shifted(0.8, LoopElement::random(&mut r, n, 3, 2, 1.0));
    for _ in 0..5 {
        let (u, v) = (random_check(&mut r, n), random_check(&mut r, n));
        let gamma = LoopGroupElement::from_exp(&g, &LoopElement::random(&mut r, n, 3, 2, 0.5));
        let rep = splitting_response(&g, &sigma, &sigma2, &u, &v, &gamma, &f, 2).unwrap();
        assert!(rep.omega < 1e-9 && rep.z < 1e-9 && rep.curving < 1e-9, "{rep:?}");
    }
}

mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn lemma_holds_on_the_torus(seed in any::<u64>(), k in 1i64..4) {
            let g = SuN::new(2).unwrap();
            let f = random_fields(0, 16, seed);
            let rep = principal_curvature_check(&g, &f, &SplittingSigma::standard(), k).unwrap();
            prop_assert!(rep.lemma_residual < 1e-9 * rep.scale.max(1.0), "{:?}", rep);
        }

        #[test]
        fn heisenberg_cocycles_have_closed_forms(
            x in prop::array::uniform2(-3.0f64..3.0),
            y in prop::array::uniform2(-3.0f64..3.0),
            k in prop::array::uniform2(-3.0f64..3.0),
        ) {
            let om = heisenberg::omega_sigma(x, y);
            prop_assert!((om - (x[0] * y[1] - x[1] * y[0])).abs() < 1e-12);
            prop_assert!((om + heisenberg::omega_sigma(y, x)).abs() < 1e-12);
            let z = heisenberg::z_sigma(k, x);
            prop_assert!((z - (k[0] * x[1] - k[1] * x[0])).abs() < 1e-12);
        }
    }
}
