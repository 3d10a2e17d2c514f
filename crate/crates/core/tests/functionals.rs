use caloron_core::caloron::{cal_forward, CaloronFields, Connection3d, LiftedConnection};
use caloron_core::functionals::*;
use caloron_core::gauge::{winding_map, Hedgehog};
use caloron_core::lie::SuN;
use caloron_core::loops::{LoopElement, LoopGroupElement};
use caloron_core::manifold::{FieldGrid, Kappa, Shape};
use caloron_core::sampling::FieldSampler;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn su2() -> SuN {
    SuN::new(2).unwrap()
}

#[test]
fn winding_maps_have_integer_chern_simons() {
    let g = su2();
    let s = Shape::cube(0, 48);
    let hs = [Hedgehog { center: [0.4, 0.5, 0.55], radius: 0.15, charge: 1 }];
    let mc = winding_map(s, &hs).unwrap().maurer_cartan(&g).unwrap();
    for k in 1..=3 {
        let cs = cs_action(&g, &mc, k).unwrap().value;
        assert!((cs - k as f64).abs() < 1e-5, "k={k}: {cs}");
    }
    let anti = [Hedgehog { charge: -1, ..hs[0] }];
    let mc = winding_map(s, &anti).unwrap().maurer_cartan(&g).unwrap();
    assert!((cs_action(&g, &mc, 1).unwrap().value + 1.0).abs() < 1e-5);
}

#[test]
fn caloron_action_equals_minus_chern_simons() {
    let g = su2();
    let s = Shape::cube(0, 16);
    let mut r = ChaCha8Rng::seed_from_u64(21);
    let a = FieldSampler::default().one_form(&mut r, s, g.dim());
    let conn = Connection3d::new(a.clone(), Kappa::standard(s)).unwrap();
    let lc = LiftedConnection::untwisted(cal_forward(&conn).unwrap());
    for k in 1..=3 {
        let sc = caloron_bf_action(&g, &lc, k).unwrap().value;
        let cs = cs_action(&g, &a, k).unwrap().value;
        assert!((sc + cs).abs() < 1e-10, "k={k}: {sc} vs {cs}");
    }
}

// F_L = dλ V holds while d_L V ≠ 0, so the caloron equations need both
// pieces before they imply flatness.
#[test]
fn bf_equation_alone_does_not_force_flatness() {
    let s = Shape::cube(0, 16);
    let phi = FieldGrid::from_fn(s, 0, 3, |x, y, _t, c| {
        c[0][0] = (2.0 * std::f64::consts::PI * x).sin();
        c[0][2] = 0.3 * (2.0 * std::f64::consts::PI * y).cos();
    });
    let f = CaloronFields {
        lambda: FieldGrid::zeros(s, 1, 1),
        big_lambda: FieldGrid::zeros(s, 1, 3),
        phi,
    };
    let res = eom_residual(&su2(), &f).unwrap();
    assert!(res.bf_residual < 1e-12, "{res:?}");
    assert!(res.bianchi_residual > 1.0, "{res:?}");
    assert!(res.flatness_residual > 1.0, "{res:?}");
}

#[test]
fn flow_relaxes_a_perturbed_flat_connection() {
    let g = su2();
    let s = Shape::cube(0, 16);
    let mut r = ChaCha8Rng::seed_from_u64(4);
    let mut a = FieldSampler { amplitude: 0.03, ..FieldSampler::default() }.one_form(&mut r, s, 3);
    for (c, h) in a.comps_mut().iter_mut().zip([1.1, 0.7, 1.6]) {
        c.chunks_mut(3).for_each(|v| v[2] += h);
    }
    let start = cal_forward(&Connection3d::new(a, Kappa::standard(s)).unwrap()).unwrap();
    let res = relax_to_flat(&g, &start, FlowOptions::default()).unwrap();
    assert!(res.residual.flatness_residual < 1e-5, "{:?}", res.residual);
    assert!(res.energy.windows(2).all(|w| w[1] <= w[0]));

    let twisted = Shape::cube(1, 16);
    let c = Connection3d::new(FieldGrid::zeros(twisted, 1, 3), Kappa::standard(twisted)).unwrap();
    assert!(relax_to_flat(&g, &cal_forward(&c).unwrap(), FlowOptions::default()).is_err());
}

#[test]
fn moment_ratio_is_field_independent() {
    let g = su2();
    let s = Shape::cube(1, 16);
    let kappa = Kappa::standard(s);
    let mut r = ChaCha8Rng::seed_from_u64(8);
    for k in 1..=2 {
        for _ in 0..4 {
            let a = FieldSampler::default().horizontal_one_form(&mut r, s, 3);
            let mu = bw_moment(&g, &a, &kappa).unwrap();
            let ratio = contact_pair(&mu, &mu, &kappa).unwrap() / contact_cs_action(&g, &a, &kappa, k).unwrap().value;
            let expect = -16.0 * std::f64::consts::PI.powi(2) / k as f64;
            assert!((ratio / expect - 1.0).abs() < 1e-9, "{ratio}");
        }
    }
    let a = FieldSampler::default().horizontal_one_form(&mut r, Shape::cube(0, 8), 3);
    assert!(contact_cs_action(&g, &a, &Kappa::standard(Shape::cube(0, 8)), 1).is_err());
}

#[test]
fn circle_distance_wraps() {
    assert_eq!(circle_distance(0.25, 0.25), 0.0);
    assert!((circle_distance(0.99, 0.01) - 0.02).abs() < 1e-15);
    assert!((circle_distance(3.1, -0.9) - 0.0).abs() < 1e-12);
    assert!((circle_distance(0.0, 0.5) - 0.5).abs() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn chern_simons_variation_matches_finite_difference(seed in any::<u64>(), k in 1i64..4) {
        let g = su2();
        let s = Shape::cube(0, 12);
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let samp = FieldSampler::default();
        let (a, da) = (samp.one_form(&mut r, s, 3), samp.one_form(&mut r, s, 3));
        let cs = |t: f64| cs_action(&g, &a.axpy(t, &da).unwrap(), k).unwrap().value;
        let h = 0.1;
        let fd = (cs(-2.0 * h) - 8.0 * cs(-h) + 8.0 * cs(h) - cs(2.0 * h)) / (12.0 * h);
        let an = cs_variation(&g, &a, &da, k).unwrap();
        prop_assert!((fd - an).abs() < 1e-9 * an.abs().max(1.0));
    }

    #[test]
    fn wilson_orbit_identity_holds(seed in any::<u64>(), k in 1i64..4) {
        let g = su2();
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let gamma = LoopGroupElement::from_exp(&g, &LoopElement::random(&mut r, 64, 3, 3, 0.8));
        let phi = LoopElement::random(&mut r, 64, 3, 3, 0.8);
        let rep = wilson_orbit_identity(&g, &gamma, &phi, &[0.3, -0.7, 1.1], k).unwrap();
        prop_assert!(rep.residual < 1e-8, "{:?}", rep);
    }

    #[test]
    fn msv_identity_on_the_torus(seed in any::<u64>(), k in 1i64..4) {
        let g = su2();
        let s = Shape::cube(0, 12);
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let mut field = || cal_forward(&Connection3d::new(
            FieldSampler::default().one_form(&mut r, s, 3),
            Kappa::standard(s),
        ).unwrap()).unwrap();
        let (base, dir) = (field(), field());
        prop_assert!(msv_identity(&g, &base, &dir, k).unwrap().relative_residual < 1e-9);
    }
}
