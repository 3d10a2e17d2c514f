use caloron_core::lie::{ad_series, SuN};
use caloron_core::loops::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const N_THETA: usize = 32;

fn coords(r: &mut ChaCha8Rng, dim: usize, scale: f64) -> Vec<f64> {
    (0..dim).map(|_| r.random_range(-scale..scale)).collect()
}

fn affine(g: &SuN, r: &mut ChaCha8Rng) -> AffineVector {
    AffineVector {
        x: r.random_range(-1.0..1.0),
        xi: LoopElement::random(r, N_THETA, g.dim(), 3, 0.7),
        y: r.random_range(-1.0..1.0),
    }
}

fn group(g: &SuN, r: &mut ChaCha8Rng) -> LoopGroupElement {
    LoopGroupElement::from_exp(g, &LoopElement::random(r, N_THETA, g.dim(), 1, 0.5))
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lie_bracket_satisfies_jacobi(seed in any::<u64>(), rank in 2usize..5) {
        let g = SuN::new(rank).unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let (x, y, z) = (coords(&mut r, g.dim(), 1.0), coords(&mut r, g.dim(), 1.0), coords(&mut r, g.dim(), 1.0));
        let b = |p: &[f64], q: &[f64]| g.bracket_coords(p, q);
        let jac: Vec<f64> = (0..g.dim())
            .map(|i| b(&x, &b(&y, &z))[i] + b(&y, &b(&z, &x))[i] + b(&z, &b(&x, &y))[i])
            .collect();
        prop_assert!(norm(&jac) < 1e-12);
    }

    #[test]
    fn pairing_is_ad_invariant_and_symmetric(seed in any::<u64>(), rank in 2usize..5) {
        let g = SuN::new(rank).unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let (x, y, z) = (coords(&mut r, g.dim(), 1.0), coords(&mut r, g.dim(), 1.0), coords(&mut r, g.dim(), 1.0));
        let lhs = SuN::pair_coords(&g.bracket_coords(&z, &x), &y) + SuN::pair_coords(&x, &g.bracket_coords(&z, &y));
        prop_assert!(lhs.abs() < 1e-12);
        let (mx, my) = (g.to_matrix(&x), g.to_matrix(&y));
        prop_assert!((mx.pair(&my).unwrap() - my.pair(&mx).unwrap()).abs() < 1e-13);
        prop_assert!((mx.pair(&my).unwrap() - SuN::pair_coords(&x, &y)).abs() < 1e-12);
    }

    #[test]
    fn adjoint_matches_its_series(seed in any::<u64>(), rank in 2usize..4) {
        let g = SuN::new(rank).unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let mut x = coords(&mut r, g.dim(), 1.0);
        let n = norm(&x);
        if n > 1.0 {
            x.iter_mut().for_each(|v| *v /= n);
        }
        let y = g.to_matrix(&coords(&mut r, g.dim(), 1.0));
        let mx = g.to_matrix(&x);
        let exact = mx.exp().adjoint(&y).unwrap();
        let series = ad_series(&mx, &y, 12);
        prop_assert!((exact.0 - series.0).norm() < 1e-8);
    }

    #[test]
    fn exponential_lands_in_the_group(seed in any::<u64>(), rank in 2usize..5) {
        let g = SuN::new(rank).unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let u = g.exp_coords(&coords(&mut r, g.dim(), 2.0)).0;
        let id = caloron_core::lie::CMat::identity(rank, rank);
        prop_assert!((u.adjoint() * &u - id).norm() < 1e-12);
        prop_assert!((u.determinant() - 1.0).norm() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn affine_bracket_satisfies_jacobi(seed in any::<u64>(), k in 1i64..4) {
        let g = SuN::new(2).unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let (u, v, w) = (affine(&g, &mut r), affine(&g, &mut r), affine(&g, &mut r));
        let br = |a: &AffineVector, b: &AffineVector| affine_bracket(&g, a, b, k).unwrap();
        let jac = br(&u, &br(&v, &w))
            .axpy(1.0, &br(&v, &br(&w, &u))).unwrap()
            .axpy(1.0, &br(&w, &br(&u, &v))).unwrap();
        prop_assert!(jac.sup_norm() < 1e-10, "{}", jac.sup_norm());
    }

    #[test]
    fn affine_pair_is_invariant(seed in any::<u64>(), k in 1i64..4) {
        let g = SuN::new(2).unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let (u, v, w) = (affine(&g, &mut r), affine(&g, &mut r), affine(&g, &mut r));
        let lhs = affine_pair(&affine_bracket(&g, &w, &u, k).unwrap(), &v, k).unwrap()
            + affine_pair(&u, &affine_bracket(&g, &w, &v, k).unwrap(), k).unwrap();
        prop_assert!(lhs.abs() < 1e-10);
        prop_assert!((affine_pair(&u, &v, k).unwrap() - affine_pair(&v, &u, k).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn affine_adjoint_preserves_the_pairing(seed in any::<u64>(), k in 1i64..4) {
        let g = SuN::new(2).unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let gamma = group(&g, &mut r);
        let (u, v) = (affine(&g, &mut r), affine(&g, &mut r));
        let ad = |a: &AffineVector| affine_adjoint(&g, &gamma, a, k).unwrap();
        let before = affine_pair(&u, &v, k).unwrap();
        let after = affine_pair(&ad(&u), &ad(&v), k).unwrap();
        prop_assert!((before - after).abs() < 1e-9, "{before} vs {after}");
    }

    #[test]
    fn higgs_orbit_stays_on_its_constraints(seed in any::<u64>(), k in 1i64..4) {
        let g = SuN::new(2).unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let gamma = group(&g, &mut r);
        let o = affine_adjoint(&g, &gamma, &AffineVector::d(N_THETA, 3), k).unwrap();
        prop_assert!((o.x - 1.0).abs() < 1e-12);
        let expect = 0.5 * level_weight(k) * loop_pair(&o.xi, &o.xi).unwrap();
        prop_assert!((o.y - expect).abs() < 1e-10, "{} vs {expect}", o.y);
    }

    #[test]
    fn beta_map_is_equivariant(seed in any::<u64>()) {
        let g = SuN::new(2).unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let (u, v, w) = (affine(&g, &mut r).check_part(), affine(&g, &mut r).check_part(), affine(&g, &mut r).check_part());
        // ad_w is a derivation: [w, β(u,v)] = β([w,u], v) + β(u, [w,v]).
        let lhs = check_bracket(&g, &w, &beta_map(&u, &v).unwrap()).unwrap();
        let rhs = beta_map(&check_bracket(&g, &w, &u).unwrap(), &v).unwrap();
        let rhs2 = beta_map(&u, &check_bracket(&g, &w, &v).unwrap()).unwrap();
        let res = lhs.xi.axpy(-1.0, &rhs.xi).unwrap().axpy(-1.0, &rhs2.xi).unwrap();
        prop_assert!(res.sup_norm() < 1e-10 && (lhs.x - rhs.x - rhs2.x).abs() < 1e-12);
    }
}
