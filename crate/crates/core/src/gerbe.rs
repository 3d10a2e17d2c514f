//! Lifting-gerbe data for the level-k extension of `t_R + Lg`, at the level
//! of Lie-algebra-valued forms: splittings, their cocycles, the curving and
//! the principal curvature, plus a Heisenberg toy with closed forms.
//!
//! Field-level quantities are reported per base point as the `dx∧dy`
//! coefficient; loops are read off along each fiber of the grid.

use crate::caloron::{looped_curvature, CaloronFields, LiftedConnection};
use crate::error::{Error, Result};
use crate::lie::SuN;
use crate::loops::{
    affine_adjoint, affine_bracket, affine_pair, check_adjoint, check_bracket, higgs, level_weight,
    loop_pair, AffineVector, CheckVector, LoopElement, LoopGroupElement,
};
use crate::manifold::{exterior_d, exterior_d_sigma, FieldGrid};

/// Vector-space splitting `σ(x, ξ) = (x, ξ, p(x, ξ))` of the projection
/// from the affine algebra, with `p(x, ξ) = p_x x + <<p_ξ, ξ>>`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplittingSigma {
    shift: Option<(f64, LoopElement)>,
}

impl SplittingSigma {
    /// `σ(x, ξ) = (x, ξ, 0)`.
    pub fn standard() -> Self {
        Self { shift: None }
    }

    /// Splitting with central part `p_x x + <<p_ξ, ξ>>`.
    pub fn shifted(p_x: f64, p_xi: LoopElement) -> Self {
        Self {
            shift: Some((p_x, p_xi)),
        }
    }

    /// Central component `p(u)`.
    pub fn central(&self, u: &CheckVector) -> Result<f64> {
        match &self.shift {
            None => Ok(0.0),
            Some((px, pxi)) => Ok(px * u.x + loop_pair(pxi, &u.xi)?),
        }
    }

    /// `σ(u)`.
    pub fn apply(&self, u: &CheckVector) -> Result<AffineVector> {
        let mut v = u.lift();
        v.y = self.central(u)?;
        Ok(v)
    }

    /// `σ' - σ` as a central-valued functional.
    pub fn difference(&self, other: &Self, u: &CheckVector) -> Result<f64> {
        Ok(other.central(u)? - self.central(u)?)
    }
}

/// `ω_σ(u, v) = [σu, σv] - σ[u, v]`, a central number.
pub fn omega_sigma(g: &SuN, u: &CheckVector, v: &CheckVector, sigma: &SplittingSigma, k: i64) -> Result<f64> {
    let top = affine_bracket(g, &sigma.apply(u)?, &sigma.apply(v)?, k)?;
    let low = sigma.apply(&check_bracket(g, u, v)?)?;
    let diff = top.axpy(-1.0, &low)?;
    debug_assert!(diff.xi.sup_norm() < 1e-9 && diff.x == 0.0);
    Ok(diff.y)
}

/// `Z_σ(γ, u) = Ad_γ σ(u) - σ(Ad_γ u)`, a central number.
pub fn z_sigma(
    g: &SuN,
    gamma: &LoopGroupElement,
    u: &CheckVector,
    sigma: &SplittingSigma,
    k: i64,
) -> Result<f64> {
    let top = affine_adjoint(g, gamma, &sigma.apply(u)?, k)?;
    let low = sigma.apply(&check_adjoint(g, gamma, u)?)?;
    Ok(top.y - low.y)
}

/// Bundle splitting `s_V(X) = -<<<X, Ṽ>>>` built from a Higgs field, one
/// value of `Ṽ` per base point. The sign makes `s_V(c) = 1`.
#[derive(Debug, Clone)]
pub struct BundleSplittingS {
    higgs: Vec<AffineVector>,
    k: i64,
}

impl BundleSplittingS {
    /// `Ṽ = (1, -Φ, (w/2)<<Φ,Φ>>)` at every base point of `phi`.
    pub fn from_higgs(phi: &FieldGrid, k: i64) -> Result<Self> {
        if phi.form_degree() != 0 {
            return Err(Error::WrongDegree {
                expected: 0,
                got: phi.form_degree(),
            });
        }
        let higgs = (0..phi.shape().nbase())
            .map(|b| higgs(&fiber_loop(phi, 0, b), k))
            .collect();
        Ok(Self { higgs, k })
    }

    /// Number of base points.
    pub fn len(&self) -> usize {
        self.higgs.len()
    }

    /// Whether there are no base points.
    pub fn is_empty(&self) -> bool {
        self.higgs.is_empty()
    }

    /// `s_V(X)` at base point `b`.
    pub fn apply(&self, b: usize, x: &AffineVector) -> Result<f64> {
        Ok(-affine_pair(x, &self.higgs[b], self.k)?)
    }
}

/// Loop of component `c` over base point `b`.
pub fn fiber_loop(w: &FieldGrid, c: usize, b: usize) -> LoopElement {
    let s = w.shape();
    let v = w.vdim();
    let data = w.comp(c)[b * s.nt * v..(b + 1) * s.nt * v].to_vec();
    LoopElement::from_data(s.nt, v, data).expect("fiber layout")
}

fn fiber_mean(w: &FieldGrid, c: usize, b: usize) -> f64 {
    let nt = w.shape().nt;
    w.comp(c)[b * nt..(b + 1) * nt].iter().sum::<f64>() / nt as f64
}

/// Components `L_x`, `L_y` of the `t_R + Lg`-valued connection `L = (λ, Λ)`.
fn connection_legs(f: &CaloronFields, b: usize) -> [CheckVector; 2] {
    [0, 1].map(|i| CheckVector {
        x: fiber_mean(&f.lambda, i, b),
        xi: fiber_loop(&f.big_lambda, i, b),
    })
}

/// `F_L = dL + ½[L∧L]` at each base point (`dx∧dy` coefficient), assembled
/// with the bracket of `t_R + Lg` loop by loop.
pub fn loop_curvature_xy(g: &SuN, f: &CaloronFields) -> Result<Vec<CheckVector>> {
    let s = f.shape();
    let d_lambda = exterior_d(f.kappa()?.form())?;
    let d_big = exterior_d_sigma(&f.big_lambda)?;
    (0..s.nbase())
        .map(|b| {
            let [lx, ly] = connection_legs(f, b);
            let br = check_bracket(g, &lx, &ly)?;
            Ok(CheckVector {
                x: fiber_mean(&d_lambda, 0, b),
                xi: fiber_loop(&d_big, 0, b).axpy(1.0, &br.xi)?,
            })
        })
        .collect()
}

/// `𝓕_φ = (1 - s)σ(F_L)` at each base point.
pub fn principal_curvature(
    g: &SuN,
    f: &CaloronFields,
    sigma: &SplittingSigma,
    k: i64,
) -> Result<Vec<AffineVector>> {
    let s = BundleSplittingS::from_higgs(&f.phi, k)?;
    loop_curvature_xy(g, f)?
        .iter()
        .enumerate()
        .map(|(b, fl)| {
            let mut v = sigma.apply(fl)?;
            v.y -= s.apply(b, &v)?;
            Ok(v)
        })
        .collect()
}

/// Closed form `(dλ, F_Λ + λ∧DΛ, -w<<F_Λ + λ∧DΛ, Φ>> - (w/2) dλ <<Φ,Φ>>)`
/// built from the caloron-side curvature.
pub fn principal_curvature_closed(g: &SuN, f: &CaloronFields, k: i64) -> Result<Vec<AffineVector>> {
    let w = level_weight(k);
    let lc = looped_curvature(g, f)?;
    (0..f.shape().nbase())
        .map(|b| {
            let fl = fiber_loop(&lc.f_loop, 0, b);
            let phi = fiber_loop(&f.phi, 0, b);
            let dl = fiber_mean(&lc.d_lambda, 0, b);
            let y = -w * loop_pair(&fl, &phi)? - 0.5 * w * dl * loop_pair(&phi, &phi)?;
            Ok(AffineVector { x: dl, xi: fl, y })
        })
        .collect()
}

/// Residuals of the principal-curvature checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrincipalCurvatureReport {
    /// Sup distance between `(1 - s)σ(F_L)` and the closed form.
    pub lemma_residual: f64,
    /// Sup of `|𝓕_φ.y + s(σF_L) - σ(F_L).y|`.
    pub center_residual: f64,
    /// Sup norm of the closed form.
    pub scale: f64,
}

/// Compares the principal curvature with its closed form and checks that
/// `s` is the identity on the center.
pub fn principal_curvature_check(
    g: &SuN,
    f: &CaloronFields,
    sigma: &SplittingSigma,
    k: i64,
) -> Result<PrincipalCurvatureReport> {
    let s = BundleSplittingS::from_higgs(&f.phi, k)?;
    let fl = loop_curvature_xy(g, f)?;
    let pc = principal_curvature(g, f, sigma, k)?;
    let closed = principal_curvature_closed(g, f, k)?;
    let (mut lemma, mut center, mut scale) = (0.0f64, 0.0f64, 0.0f64);
    for (b, ((p, c), f)) in pc.iter().zip(&closed).zip(&fl).enumerate() {
        // (1 - s)σ does not depend on the central part of σ.
        lemma = lemma.max(p.axpy(-1.0, c)?.sup_norm());
        scale = scale.max(c.sup_norm());
        let sf = sigma.apply(f)?;
        center = center.max((p.y + s.apply(b, &sf)? - sf.y).abs());
    }
    Ok(PrincipalCurvatureReport {
        lemma_residual: lemma,
        center_residual: center,
        scale,
    })
}

/// Curving `f = -(½ω_σ(L,L) + s(σ(F_L)))` at each base point.
pub fn curving_f(g: &SuN, f: &CaloronFields, sigma: &SplittingSigma, k: i64) -> Result<Vec<f64>> {
    let s = BundleSplittingS::from_higgs(&f.phi, k)?;
    let fl = loop_curvature_xy(g, f)?;
    (0..f.shape().nbase())
        .map(|b| {
            let [lx, ly] = connection_legs(f, b);
            // ½ω(L∧L)_xy = ω(L_x, L_y).
            let om = omega_sigma(g, &lx, &ly, sigma, k)?;
            Ok(-(om + s.apply(b, &sigma.apply(&fl[b])?)?))
        })
        .collect()
}

/// Curvature of the lift `L̃ = σ(L) + α c` at each base point, assembled
/// directly from the affine bracket.
pub fn lifted_curvature_xy(
    g: &SuN,
    lc: &LiftedConnection,
    sigma: &SplittingSigma,
    k: i64,
) -> Result<Vec<AffineVector>> {
    let f = &lc.fields;
    let d_alpha = lc.alpha.d_alpha()?;
    let d_lambda = exterior_d(f.kappa()?.form())?;
    let d_big = exterior_d_sigma(&f.big_lambda)?;
    (0..f.shape().nbase())
        .map(|b| {
            let [lx, ly] = connection_legs(f, b);
            let dl = CheckVector {
                x: fiber_mean(&d_lambda, 0, b),
                xi: fiber_loop(&d_big, 0, b),
            };
            // p has constant coefficients, so d(p(L)) = p(dL).
            let mut dv = sigma.apply(&dl)?;
            dv.y += fiber_mean(&d_alpha, 0, b);
            let br = affine_bracket(g, &sigma.apply(&lx)?, &sigma.apply(&ly)?, k)?;
            dv.axpy(1.0, &br)
        })
        .collect()
}

/// Report of the lift trivialization checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiftTrivializationReport {
    /// Sup over Σ of `|f - dα + s(F_L̃)|` for the first lift.
    pub pointwise_residual: f64,
    /// `∫_Σ s(F_L̃)` for the first lift.
    pub first: f64,
    /// `∫_Σ s(F_L̃)` for the second lift.
    pub second: f64,
    /// Circle distance between the two integrals.
    pub mod_one_distance: f64,
}

/// Checks `f - dα = -s(F_L̃)` pointwise and compares `∫ s(F_L̃)` across two
/// lifts of the same caloron fields.
pub fn lift_trivialization_check(
    g: &SuN,
    first: &LiftedConnection,
    second: &LiftedConnection,
    k: i64,
) -> Result<LiftTrivializationReport> {
    if first.fields != second.fields {
        return Err(Error::GridMismatch("lifts of different caloron fields".into()));
    }
    let sigma = SplittingSigma::standard();
    let s = BundleSplittingS::from_higgs(&first.fields.phi, k)?;
    let curving = curving_f(g, &first.fields, &sigma, k)?;
    let integral = |lc: &LiftedConnection| -> Result<(f64, Vec<f64>)> {
        let fl = lifted_curvature_xy(g, lc, &sigma, k)?;
        let vals: Vec<f64> = fl
            .iter()
            .enumerate()
            .map(|(b, v)| s.apply(b, v))
            .collect::<Result<_>>()?;
        Ok((vals.iter().sum::<f64>() / vals.len() as f64, vals))
    };
    let (i1, s1) = integral(first)?;
    let (i2, _) = integral(second)?;
    let da = first.alpha.d_alpha()?;
    let mut pointwise = 0.0f64;
    for (b, (fv, sv)) in curving.iter().zip(&s1).enumerate() {
        pointwise = pointwise.max((fv - fiber_mean(&da, 0, b) + sv).abs());
    }
    Ok(LiftTrivializationReport {
        pointwise_residual: pointwise,
        first: i1,
        second: i2,
        mod_one_distance: crate::functionals::circle_distance(i1, i2),
    })
}

/// Residuals of the σ → σ' response identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplittingResponse {
    /// `|ω_σ'(u,v) - ω_σ(u,v) + (σ'-σ)[u,v]|`.
    pub omega: f64,
    /// `|Z_σ'(γ,u) - Z_σ(γ,u) - (σ'-σ)(u) + (σ'-σ)(Ad_γ u)|`.
    pub z: f64,
    /// Sup over Σ of `|f_σ' - f_σ + d((σ'-σ)(L))|`, with the exterior
    /// derivative taken on grid fields.
    pub curving: f64,
}

/// Linear response of the cocycles and the curving to a change of splitting.
#[allow(clippy::too_many_arguments)]
pub fn splitting_response(
    g: &SuN,
    sigma: &SplittingSigma,
    sigma2: &SplittingSigma,
    u: &CheckVector,
    v: &CheckVector,
    gamma: &LoopGroupElement,
    f: &CaloronFields,
    k: i64,
) -> Result<SplittingResponse> {
    let om = omega_sigma(g, u, v, sigma2, k)? - omega_sigma(g, u, v, sigma, k)?
        + sigma.difference(sigma2, &check_bracket(g, u, v)?)?;
    let z = z_sigma(g, gamma, u, sigma2, k)? - z_sigma(g, gamma, u, sigma, k)?
        - sigma.difference(sigma2, u)?
        + sigma.difference(sigma2, &check_adjoint(g, gamma, u)?)?;

    // (σ'-σ)(L) as a real 1-form on the grid, then d of it.
    let shape = f.shape();
    let mut p_l = FieldGrid::zeros(shape, 1, 1);
    let mut lam_part = [0.0f64; 2];
    let zero = LoopElement::zeros(shape.nt, g.dim());
    let px = sigma.difference(sigma2, &CheckVector { x: 1.0, xi: zero })?;
    for b in 0..shape.nbase() {
        let [lx, ly] = connection_legs(f, b);
        for (i, li) in [lx, ly].iter().enumerate() {
            lam_part[i] = px * li.x;
            let val = sigma.difference(sigma2, li)? - lam_part[i];
            for l in 0..shape.nt {
                p_l.comps_mut()[i][b * shape.nt + l] = val;
            }
        }
    }
    // The λ part is handled through dκ, since λ is only periodic up to the twist.
    let d_pl = exterior_d_sigma(&p_l)?;
    let d_kappa = exterior_d(f.kappa()?.form())?;
    let f1 = curving_f(g, f, sigma, k)?;
    let f2 = curving_f(g, f, sigma2, k)?;
    let mut curving = 0.0f64;
    for b in 0..shape.nbase() {
        let exact = fiber_mean(&d_pl, 0, b) + px * fiber_mean(&d_kappa, 0, b);
        curving = curving.max((f2[b] - f1[b] + exact).abs());
    }
    Ok(SplittingResponse {
        omega: om.abs(),
        z: z.abs(),
        curving,
    })
}

/// The three-dimensional Heisenberg algebra as a central extension of the
/// abelian plane, realized by strictly upper triangular 3×3 matrices.
pub mod heisenberg {
    use nalgebra::Matrix3;

    /// `(a, b, c) ↦ [[0, a, c], [0, 0, b], [0, 0, 0]]`.
    pub fn matrix(v: [f64; 3]) -> Matrix3<f64> {
        Matrix3::new(0.0, v[0], v[2], 0.0, 0.0, v[1], 0.0, 0.0, 0.0)
    }

    /// Inverse of [`matrix`] on the strictly upper triangle.
    pub fn coords(m: &Matrix3<f64>) -> [f64; 3] {
        [m[(0, 1)], m[(1, 2)], m[(0, 2)]]
    }

    /// Matrix commutator.
    pub fn bracket(u: [f64; 3], v: [f64; 3]) -> [f64; 3] {
        let (a, b) = (matrix(u), matrix(v));
        coords(&(a * b - b * a))
    }

    /// `σ(a, b) = (a, b, 0)`.
    pub fn sigma(x: [f64; 2]) -> [f64; 3] {
        [x[0], x[1], 0.0]
    }

    /// `ω_σ(X, Y) = [σX, σY] - σ[X, Y]`; the plane is abelian.
    pub fn omega_sigma(x: [f64; 2], y: [f64; 2]) -> f64 {
        bracket(sigma(x), sigma(y))[2]
    }

    /// `Z_σ(exp σk, X)` through the matrix exponential `I + K + K²/2`.
    pub fn z_sigma(k: [f64; 2], x: [f64; 2]) -> f64 {
        let km = matrix(sigma(k));
        let e = Matrix3::identity() + km + km * km * 0.5;
        let ei = Matrix3::identity() - km + km * km * 0.5;
        coords(&(e * matrix(sigma(x)) * ei))[2]
    }

    /// Affine-linear connection `A_i = Σ_μ (c[i][μ] + Σ_ν m[i][μ][ν] x_ν) dx^μ`
    /// on the plane, with a central part `a` of the same form.
    #[derive(Debug, Clone, Copy, PartialEq)]
    pub struct ToyConnection {
        /// Constant parts, indexed `[generator][leg]`.
        pub c: [[f64; 2]; 2],
        /// Linear parts, indexed `[generator][leg][coordinate]`.
        pub m: [[[f64; 2]; 2]; 2],
        /// Central 1-form: constant and linear parts.
        pub central: ([f64; 2], [[f64; 2]; 2]),
    }

    impl ToyConnection {
        fn leg(&self, mu: usize, p: [f64; 2]) -> [f64; 2] {
            [0, 1].map(|i| self.c[i][mu] + self.m[i][mu][0] * p[0] + self.m[i][mu][1] * p[1])
        }

        fn da(&self) -> f64 {
            self.central.1[1][0] - self.central.1[0][1]
        }

        /// `F_A = dA` (abelian base), `dx∧dy` coefficient.
        pub fn curvature(&self) -> [f64; 2] {
            [0, 1].map(|i| self.m[i][1][0] - self.m[i][0][1])
        }

        /// Curvature of `Ã = σ(A) + a c` from matrix commutators.
        pub fn lifted_curvature(&self, p: [f64; 2]) -> [f64; 3] {
            let f = self.curvature();
            let (ax, ay) = (self.leg(0, p), self.leg(1, p));
            let br = bracket(sigma(ax), sigma(ay));
            [f[0] + br[0], f[1] + br[1], self.da() + br[2]]
        }
    }

    /// Splitting `s(a, b, c) = c + v·(a, b)`.
    pub fn s_apply(v: [f64; 2], x: [f64; 3]) -> f64 {
        x[2] + v[0] * x[0] + v[1] * x[1]
    }

    /// Curving `-(½ω_σ(A,A) + s(σF_A))` at `p`.
    pub fn curving(a: &ToyConnection, v: [f64; 2], p: [f64; 2]) -> f64 {
        let om = omega_sigma(a.leg(0, p), a.leg(1, p));
        -(om + s_apply(v, sigma(a.curvature())))
    }

    /// Principal curvature `(1 - s)σ(F_A)`.
    pub fn principal_curvature(a: &ToyConnection, v: [f64; 2]) -> [f64; 3] {
        let sf = sigma(a.curvature());
        [sf[0], sf[1], sf[2] - s_apply(v, sf)]
    }

    /// Closed forms for the quantities above.
    pub mod closed {
        use super::ToyConnection;

        /// `x₁y₂ - x₂y₁`.
        pub fn omega(x: [f64; 2], y: [f64; 2]) -> f64 {
            x[0] * y[1] - x[1] * y[0]
        }

        /// `k₁x₂ - k₂x₁`.
        pub fn z(k: [f64; 2], x: [f64; 2]) -> f64 {
            omega(k, x)
        }

        /// `-(A₁ₓA₂ᵧ - A₁ᵧA₂ₓ + v·F)`.
        pub fn curving(a: &ToyConnection, v: [f64; 2], p: [f64; 2]) -> f64 {
            let leg = |i: usize, mu: usize| a.c[i][mu] + a.m[i][mu][0] * p[0] + a.m[i][mu][1] * p[1];
            let f = [0, 1].map(|i| a.m[i][1][0] - a.m[i][0][1]);
            -(leg(0, 0) * leg(1, 1) - leg(0, 1) * leg(1, 0) + v[0] * f[0] + v[1] * f[1])
        }

        /// `(F₁, F₂, -v·F)`.
        pub fn principal_curvature(a: &ToyConnection, v: [f64; 2]) -> [f64; 3] {
            let f = [0, 1].map(|i| a.m[i][1][0] - a.m[i][0][1]);
            [f[0], f[1], -(v[0] * f[0] + v[1] * f[1])]
        }
    }

    /// Largest deviation between the matrix evaluations and the closed forms
    /// over one random instance, including `f - da = -s(F_Ã)`.
    pub fn toy_residual<R: rand::Rng + ?Sized>(rng: &mut R) -> f64 {
        let mut r = || rng.random_range(-1.0..1.0);
        let x = [r(), r()];
        let y = [r(), r()];
        let k = [r(), r()];
        let v = [r(), r()];
        let p = [r(), r()];
        let a = ToyConnection {
            c: [[r(), r()], [r(), r()]],
            m: [[[r(), r()], [r(), r()]], [[r(), r()], [r(), r()]]],
            central: ([r(), r()], [[r(), r()], [r(), r()]]),
        };
        let pc = principal_curvature(&a, v);
        let pcc = closed::principal_curvature(&a, v);
        let f = curving(&a, v, p);
        let lift = s_apply(v, a.lifted_curvature(p));
        [
            omega_sigma(x, y) - closed::omega(x, y),
            z_sigma(k, x) - closed::z(k, x),
            f - closed::curving(&a, v, p),
            pc[0] - pcc[0],
            pc[1] - pcc[1],
            pc[2] - pcc[2],
            f - a.da() + lift,
        ]
        .iter()
        .fold(0.0, |m, e: &f64| m.max(e.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn trig(n: usize, a: usize, f: fn(f64) -> f64) -> LoopElement {
        LoopElement::from_fn(n, 3, move |th| {
            let mut v = vec![0.0; 3];
            v[a] = f(2.0 * PI * th);
            v
        })
    }

    #[test]
    fn omega_matches_affine_bracket_center() {
        let g = SuN::new(2).unwrap();
        let n = 32;
        let u = CheckVector { x: 0.0, xi: trig(n, 0, f64::cos) };
        let v = CheckVector { x: 0.0, xi: trig(n, 0, f64::sin) };
        let om = omega_sigma(&g, &u, &v, &SplittingSigma::standard(), 2).unwrap();
        let br = affine_bracket(&g, &u.lift(), &v.lift(), 2).unwrap();
        assert!((om - br.y).abs() < 1e-15);
        // w_2 <<cos, D sin>> = -π w_2 = -1/(4π).
        assert!((om + 1.0 / (4.0 * PI)).abs() < 1e-14);
        assert!(omega_sigma(&g, &u, &u, &SplittingSigma::standard(), 2).unwrap().abs() < 1e-15);
    }

    #[test]
    fn z_of_constant_loop_vanishes() {
        let g = SuN::new(2).unwrap();
        let h = g.exp_coords(&[0.4, 0.1, -0.3]).0;
        let gamma = LoopGroupElement::constant(&g, &h, 16);
        let u = CheckVector { x: 0.7, xi: trig(16, 1, f64::sin) };
        let z = z_sigma(&g, &gamma, &u, &SplittingSigma::standard(), 3).unwrap();
        assert!(z.abs() < 1e-15);
    }

    #[test]
    fn heisenberg_closed_forms() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            assert!(heisenberg::toy_residual(&mut rng) < 1e-12);
        }
        assert_eq!(heisenberg::omega_sigma([1.0, 0.0], [0.0, 1.0]), 1.0);
    }
}
