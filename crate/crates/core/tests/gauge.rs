use caloron_core::caloron::{cal_forward, AlphaField, Connection3d, LiftedConnection};
use caloron_core::functionals::{caloron_bf_action, circle_distance};
use caloron_core::gauge::*;
use caloron_core::lie::SuN;
use caloron_core::manifold::{project_horizontal, FieldGrid, Kappa, Shape};
use caloron_core::sampling::FieldSampler;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn element(g: &SuN, s: Shape, r: &mut ChaCha8Rng) -> ExtendedAlgebraElement {
    let samp = FieldSampler::default();
    ExtendedAlgebraElement::new(
        g,
        samp.base_scalar(r, s, 1),
        samp.scalar(r, s, g.dim()),
        samp.base_scalar(r, s, 1),
    )
    .unwrap()
}

fn base_one_form(s: Shape, r: &mut ChaCha8Rng, amp: f64) -> FieldGrid {
    let samp = FieldSampler { amplitude: amp, ..FieldSampler::default() };
    let (bx, by) = (samp.base_scalar(r, s, 1), samp.base_scalar(r, s, 1));
    FieldGrid::from_components(
        s,
        1,
        1,
        vec![bx.comp(0).to_vec(), by.comp(0).to_vec(), vec![0.0; s.npts()]],
    )
    .unwrap()
    .with_base_only(true)
}

fn cconnection(g: &SuN, s: Shape, r: &mut ChaCha8Rng) -> CConnection {
    let kappa = Kappa::new(Kappa::standard(s).form().axpy(1.0, &base_one_form(s, r, 0.2)).unwrap()).unwrap();
    let a = FieldSampler::default().horizontal_one_form(r, s, g.dim());
    CConnection::new(kappa, a, base_one_form(s, r, 0.5)).unwrap()
}

fn tangent(g: &SuN, s: Shape, r: &mut ChaCha8Rng) -> CConnectionTangent {
    CConnectionTangent {
        kappa: base_one_form(s, r, 0.5),
        a: FieldSampler::default().horizontal_one_form(r, s, g.dim()),
        b: base_one_form(s, r, 0.5),
    }
}

#[test]
fn extended_bracket_jacobi_and_invariance() {
    let g = SuN::new(2).unwrap();
    for d in [0, 1] {
        let s = Shape::cube(d, 16);
        let mut r = ChaCha8Rng::seed_from_u64(40 + d as u64);
        for _ in 0..10 {
            let (u, v, w) = (element(&g, s, &mut r), element(&g, s, &mut r), element(&g, s, &mut r));
            let br = |a: &ExtendedAlgebraElement, b: &ExtendedAlgebraElement| extended_bracket(&g, a, b, 2).unwrap();
            let jac = br(&u, &br(&v, &w))
                .axpy(1.0, &br(&v, &br(&w, &u)))
                .unwrap()
                .axpy(1.0, &br(&w, &br(&u, &v)))
                .unwrap();
            assert!(jac.sup_norm() < 1e-9, "jacobi {}", jac.sup_norm());
            let inv = extended_pair(&br(&w, &u), &v, 2)
                .unwrap()
                .axpy(1.0, &extended_pair(&u, &br(&w, &v), 2).unwrap())
                .unwrap();
            assert!(inv.sup_norm() < 1e-9, "invariance {}", inv.sup_norm());
            let c = ExtendedAlgebraElement::central(&g, u.y.clone()).unwrap();
            assert!(br(&c, &v).sup_norm() < 1e-15);
        }
    }
}

#[test]
fn k0_cocycle() {
    let g = SuN::new(2).unwrap();
    let s = Shape::cube(1, 16);
    let kappa = Kappa::standard(s);
    let samp = FieldSampler::default();
    let mut r = ChaCha8Rng::seed_from_u64(8);
    assert!(cocycle_k0(&samp.scalar(&mut r, Shape::cube(0, 16), 3), &samp.scalar(&mut r, Shape::cube(0, 16), 3), &Kappa::standard(Shape::cube(0, 16))).is_err());
    for _ in 0..10 {
        let xs: Vec<FieldGrid> = (0..3).map(|_| samp.scalar(&mut r, s, 3)).collect();
        let k0 = |a: &FieldGrid, b: &FieldGrid| cocycle_k0(a, b, &kappa).unwrap();
        let br = |a: &FieldGrid, b: &FieldGrid| caloron_core::manifold::wedge_bracket(&g, a, b).unwrap();
        assert!((k0(&xs[0], &xs[1]) + k0(&xs[1], &xs[0])).abs() < 1e-10);
        let cyc = k0(&br(&xs[0], &xs[1]), &xs[2]) + k0(&br(&xs[1], &xs[2]), &xs[0]) + k0(&br(&xs[2], &xs[0]), &xs[1]);
        assert!(cyc.abs() < 1e-8, "{cyc}");
        let flat = samp.base_scalar(&mut r, s, 3);
        assert!(k0(&flat, &xs[0]).abs() < 1e-12);
    }
}

#[test]
fn moment_map_examples() {
    let g = SuN::new(2).unwrap();
    let s = Shape::cube(0, 16);
    let mut r = ChaCha8Rng::seed_from_u64(3);
    let zero = CConnection::new(Kappa::standard(s), FieldGrid::zeros(s, 1, 3), FieldGrid::zeros(s, 1, 1).with_base_only(true)).unwrap();
    let m = moment_f(&g, &zero, 1).unwrap();
    assert!(m.rotation.sup_norm() + m.loop_part.sup_norm() + m.central.sup_norm() < 1e-14);

    let samp = FieldSampler::default();
    let a = FieldGrid::from_components(
        s,
        1,
        3,
        vec![samp.base_scalar(&mut r, s, 3).comp(0).to_vec(), samp.base_scalar(&mut r, s, 3).comp(0).to_vec(), vec![0.0; s.npts() * 3]],
    )
    .unwrap();
    let b = base_one_form(s, &mut r, 0.5);
    let l = CConnection::new(Kappa::standard(s), a, b.clone()).unwrap();
    let m = moment_f(&g, &l, 2).unwrap();
    let db = caloron_core::manifold::exterior_d_sigma(&b).unwrap();
    assert!(m.central.distance(&db).unwrap() < 1e-14);

    let l = cconnection(&g, Shape::cube(1, 16), &mut r);
    assert!(moment_f(&g, &l, 2).unwrap().horizontality_defect() < 1e-9);
}

#[test]
fn hamiltonian_property_by_finite_differences() {
    let g = SuN::new(2).unwrap();
    for d in [0, 1] {
        let s = Shape::cube(d, 16);
        let mut r = ChaCha8Rng::seed_from_u64(90 + d as u64);
        for _ in 0..3 {
            let l = cconnection(&g, s, &mut r);
            let u = element(&g, s, &mut r);
            let dir = tangent(&g, s, &mut r);
            let rep = hamiltonian_fd_check(&g, &l, &u, &dir, 2, 1e-4).unwrap();
            assert!(rep.relative_residual < 1e-6, "d={d} {rep:?}");
        }
    }
}

#[test]
fn symplectic_form_is_antisymmetric() {
    let g = SuN::new(2).unwrap();
    let s = Shape::cube(1, 16);
    let mut r = ChaCha8Rng::seed_from_u64(12);
    let (x, y) = (tangent(&g, s, &mut r), tangent(&g, s, &mut r));
    let (a, b) = (omega_cconnection(&x, &y, 1).unwrap(), omega_cconnection(&y, &x, 1).unwrap());
    assert!((a + b).abs() < 1e-14);
}

#[test]
fn gauge_actions_commute_with_caloron_maps() {
    let g = SuN::new(2).unwrap();
    for d in [0, 1] {
        let s = Shape::cube(d, 16);
        let mut r = ChaCha8Rng::seed_from_u64(70 + d as u64);
        let samp = FieldSampler::default();
        let kappa = Kappa::standard(s);
        for _ in 0..3 {
            let a = samp.one_form(&mut r, s, 3);
            let gm = GaugeMap3d::exp_of(&g, &samp.scalar(&mut r, s, 3)).unwrap();
            let ag = gauge_act_3d(&g, &gm, &a).unwrap();
            let lhs = project_horizontal(&ag, &kappa).unwrap();
            let rhs = gauge_act_reduced(&g, &gm, &project_horizontal(&a, &kappa).unwrap(), &kappa).unwrap();
            assert!(lhs.distance(&rhs).unwrap() < 1e-8);
            let c = Connection3d::new(a, kappa.clone()).unwrap();
            let via_3d = cal_forward(&Connection3d::new(ag, kappa.clone()).unwrap()).unwrap();
            let via_cal = gauge_act_caloron(&g, &gm, &cal_forward(&c).unwrap()).unwrap();
            assert!(via_3d.big_lambda.distance(&via_cal.big_lambda).unwrap() < 1e-8);
            assert!(via_3d.phi.distance(&via_cal.phi).unwrap() < 1e-8);
        }
        let id = GaugeMap3d::identity(s, 2);
        let a = samp.one_form(&mut r, s, 3);
        assert!(gauge_act_3d(&g, &id, &a).unwrap().distance(&a).unwrap() < 1e-14);
    }
}

#[test]
fn lift_twist_shifts_action_by_integers() {
    let g = SuN::new(2).unwrap();
    let s = Shape::cube(0, 16);
    let mut r = ChaCha8Rng::seed_from_u64(15);
    let a = FieldSampler::default().one_form(&mut r, s, 3);
    let f = cal_forward(&Connection3d::new(a, Kappa::standard(s)).unwrap()).unwrap();
    let lc = LiftedConnection::untwisted(f);
    let s0 = caloron_bf_action(&g, &lc, 2).unwrap().value;

    // A closed β: dβ = 0 for constant coefficients.
    let closed = FieldGrid::from_fn(s, 1, 1, |_, _, _, c| {
        c[0][0] = 0.4;
        c[1][0] = -1.1;
    })
    .with_base_only(true);
    let lt = lift_twist(&lc, &AlphaField { periodic: closed, twist: 0 }).unwrap();
    assert!((caloron_bf_action(&g, &lt, 2).unwrap().value - s0).abs() < 1e-12);

    for n in [1, 3] {
        let beta = AlphaField { periodic: base_one_form(s, &mut r, 0.5), twist: n };
        let lt = lift_twist(&lc, &beta).unwrap();
        let shift = caloron_bf_action(&g, &lt, 2).unwrap().value - s0;
        assert!((shift + n as f64).abs() < 1e-8, "{shift}");
        assert!(circle_distance(shift, 0.0) < 1e-8);
    }
}

mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn twist_shift_is_the_integer_twist(seed in any::<u64>(), n in -4i64..5, k in 1i64..4) {
            let g = SuN::new(2).unwrap();
            let s = Shape::cube(0, 12);
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            let a = FieldSampler::default().one_form(&mut r, s, 3);
            let lc = LiftedConnection::untwisted(cal_forward(&Connection3d::new(a, Kappa::standard(s)).unwrap()).unwrap());
            let beta = AlphaField { periodic: base_one_form(s, &mut r, 0.5), twist: n };
            let shift = caloron_bf_action(&g, &lift_twist(&lc, &beta).unwrap(), k).unwrap().value
                - caloron_bf_action(&g, &lc, k).unwrap().value;
            prop_assert!((shift + n as f64).abs() < 1e-8, "{shift}");
        }

        #[test]
        fn symplectic_form_is_antisymmetric_and_bilinear(seed in any::<u64>(), k in 1i64..4, c in -2.0f64..2.0) {
            let g = SuN::new(2).unwrap();
            let s = Shape::cube(1, 12);
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            let (x, y, z) = (tangent(&g, s, &mut r), tangent(&g, s, &mut r), tangent(&g, s, &mut r));
            let om = |p: &CConnectionTangent, q: &CConnectionTangent| omega_cconnection(p, q, k).unwrap();
            prop_assert!((om(&x, &y) + om(&y, &x)).abs() < 1e-13);
            let yz = CConnectionTangent {
                kappa: y.kappa.axpy(c, &z.kappa).unwrap(),
                a: y.a.axpy(c, &z.a).unwrap(),
                b: y.b.axpy(c, &z.b).unwrap(),
            };
            prop_assert!((om(&x, &yz) - om(&x, &y) - c * om(&x, &z)).abs() < 1e-12 * (1.0 + om(&x, &y).abs()));
        }
    }
}
