//! Action functionals: Chern-Simons, the contact reduction CS′ with its
//! moment map, the caloron BF action, equations of motion, the MSV identity,
//! and fiber Wilson loops.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::caloron::{
    cal_inverse, curvature_3d, looped_curvature, CaloronFields, Connection3d, LiftedConnection,
};
use crate::error::{Error, Result};
use crate::lie::{CMat, SuN};
use crate::loops::{
    affine_adjoint, affine_pair, higgs, level_weight, AffineVector, LoopElement, LoopGroupElement,
};
use crate::manifold::{
    exterior_d, fiber_average_k, fiber_integrate, interior_r, project_horizontal, wedge_bracket,
    wedge_pair, wedge_scalar, FieldGrid, Kappa,
};
use crate::spectral;

/// Distance between `a` and `b` on the circle `R/Z`.
pub fn circle_distance(a: f64, b: f64) -> f64 {
    let r = (a - b).rem_euclid(1.0);
    r.min(1.0 - r)
}

/// Value of an action with its reduction mod 1 and named contributions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActionValue {
    /// Total.
    pub value: f64,
    /// `value mod 1` in `[0, 1)`.
    pub mod_one: f64,
    /// Named term contributions summing to `value`.
    pub breakdown: Vec<(String, f64)>,
}

impl ActionValue {
    fn from_terms(terms: Vec<(String, f64)>) -> Self {
        let value = terms.iter().map(|(_, v)| v).sum::<f64>();
        Self {
            value,
            mod_one: value.rem_euclid(1.0),
            breakdown: terms,
        }
    }

    /// Named contribution, or 0 if absent.
    pub fn term(&self, name: &str) -> f64 {
        self.breakdown
            .iter()
            .find(|(n, _)| n == name)
            .map_or(0.0, |(_, v)| *v)
    }
}

const CS_NORM: f64 = 1.0 / (16.0 * PI * PI);

/// `CS_k(A) = k ∫ cs(A)` with `cs(A) = (1/16π²)<A ∧ (F - ⅙[A∧A])>`.
pub fn cs_action(g: &SuN, a: &FieldGrid, k: i64) -> Result<ActionValue> {
    let da = exterior_d(a)?;
    let aa = wedge_bracket(g, a, a)?;
    let t1 = fiber_integrate(&wedge_pair(a, &da)?)?;
    let t2 = fiber_integrate(&wedge_pair(a, &aa)?)?;
    let kk = k as f64 * CS_NORM;
    Ok(ActionValue::from_terms(vec![
        ("A^dA".into(), kk * t1),
        ("A^[A,A]/3".into(), kk * t2 / 3.0),
    ]))
}

/// Directional derivative `(k/8π²)∫<δA ∧ F_A>` of `CS_k`.
pub fn cs_variation(g: &SuN, a: &FieldGrid, da: &FieldGrid, k: i64) -> Result<f64> {
    let f = curvature_3d(g, a)?;
    Ok(2.0 * k as f64 * CS_NORM * fiber_integrate(&wedge_pair(da, &f)?)?)
}

fn contact_degree(kappa: &Kappa) -> Result<f64> {
    let d = kappa.shape().degree;
    if d == 0 {
        return Err(Error::DegenerateContact);
    }
    Ok(d as f64)
}

/// The function `f` with `f κ∧dκ = κ∧F_a - dκ∧a` (coefficient-wise division).
pub fn contact_f(g: &SuN, a: &FieldGrid, kappa: &Kappa) -> Result<FieldGrid> {
    let d = contact_degree(kappa)?;
    let fa = curvature_3d(g, a)?;
    let dk = exterior_d(kappa.form())?;
    let top = wedge_scalar(kappa.form(), &fa)?.axpy(-1.0, &wedge_scalar(&dk, a)?)?;
    let dim = a.vdim();
    let comps = vec![top.comp(0).iter().map(|v| v / d).collect()];
    FieldGrid::from_components(a.shape(), 0, dim, comps)
}

fn mean_pair(x: &FieldGrid, y: &FieldGrid) -> Result<f64> {
    let p = wedge_pair(x, y)?;
    Ok(p.comp(0).iter().sum::<f64>() / x.shape().npts() as f64)
}

fn check_horizontal(a: &FieldGrid) -> Result<()> {
    if a.form_degree() != 1 || a.comp(2).iter().any(|v| *v != 0.0) {
        return Err(Error::Shape("expected a horizontal 1-form (ι_R a = 0)".into()));
    }
    Ok(())
}

/// `CS′(a, κ) = CS_k(a) - (k/16π²)∫κ∧dκ <f, f>`.
pub fn contact_cs_action(g: &SuN, a: &FieldGrid, kappa: &Kappa, k: i64) -> Result<ActionValue> {
    check_horizontal(a)?;
    let d = contact_degree(kappa)?;
    let f = contact_f(g, a, kappa)?;
    let cs = cs_action(g, a, k)?;
    let ff = d * mean_pair(&f, &f)?;
    Ok(ActionValue::from_terms(vec![
        ("CS(a)".into(), cs.value),
        ("-<<f,f>>".into(), -(k as f64) * CS_NORM * ff),
    ]))
}

/// Element `(x, ξ, y)` of the contact extension with `ξ` a function on `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContactVector {
    /// Rotation component.
    pub x: f64,
    /// Lie-valued 0-form.
    pub xi: FieldGrid,
    /// Central component.
    pub y: f64,
}

/// `∫κ∧dκ <ξ₁,ξ₂> - x₁y₂ - x₂y₁`.
pub fn contact_pair(u: &ContactVector, v: &ContactVector, kappa: &Kappa) -> Result<f64> {
    let d = contact_degree(kappa)?;
    Ok(d * mean_pair(&u.xi, &v.xi)? - u.x * v.y - v.x * u.y)
}

/// `½∫κ∧<L_R a ∧ a>`.
pub fn rotation_term(a: &FieldGrid, kappa: &Kappa) -> Result<f64> {
    let lra = a.partial(2);
    Ok(0.5 * fiber_integrate(&wedge_scalar(kappa.form(), &wedge_pair(&lra, a)?)?)?)
}

/// Moment map `μ = -(1, f, ½∫κ∧<L_R a ∧ a>)` of the reduced gauge action.
pub fn bw_moment(g: &SuN, a: &FieldGrid, kappa: &Kappa) -> Result<ContactVector> {
    check_horizontal(a)?;
    let f = contact_f(g, a, kappa)?;
    Ok(ContactVector {
        x: -1.0,
        xi: f.scaled(-1.0),
        y: -rotation_term(a, kappa)?,
    })
}

/// Comoment `v_a(u, ξ) = -∫κ∧<ξ, F_a> + (u/2)∫κ∧<L_R a ∧ a>`.
pub fn comoment(g: &SuN, a: &FieldGrid, kappa: &Kappa, u: f64, xi: &FieldGrid) -> Result<f64> {
    let fa = curvature_3d(g, a)?;
    let t = fiber_integrate(&wedge_scalar(kappa.form(), &wedge_pair(xi, &fa)?)?)?;
    Ok(-t + u * rotation_term(a, kappa)?)
}

/// `Ω_κ(X, Y) = ∫κ∧<X ∧ Y>` on horizontal 1-forms.
pub fn omega_kappa(x: &FieldGrid, y: &FieldGrid, kappa: &Kappa) -> Result<f64> {
    fiber_integrate(&wedge_scalar(kappa.form(), &wedge_pair(x, y)?)?)
}

/// Fundamental vector field of `(u, ξ)` at `a`: `P̄_κ(dξ + [a, ξ]) + u L_R a`.
pub fn reduced_action_vector(
    g: &SuN,
    a: &FieldGrid,
    kappa: &Kappa,
    u: f64,
    xi: &FieldGrid,
) -> Result<FieldGrid> {
    let dxi = exterior_d(xi)?.axpy(1.0, &wedge_bracket(g, a, xi)?)?;
    project_horizontal(&dxi, kappa)?.axpy(u, &a.partial(2))
}

/// Pointwise terms of `<<<F_L̃, Ṽ>>>` before integration (real 2-forms).
#[derive(Debug, Clone, PartialEq)]
pub struct BfDensity {
    /// `-w <F_Λ + λ∧DΛ, Φ>`.
    pub curvature_term: FieldGrid,
    /// `-(w/2) dλ <Φ, Φ>`.
    pub higgs_term: FieldGrid,
    /// `-(w/2) <Λ ∧ DΛ>`.
    pub cocycle_term: FieldGrid,
    /// `-dα`.
    pub central_term: FieldGrid,
}

impl BfDensity {
    /// Sum of all terms.
    pub fn total(&self) -> Result<FieldGrid> {
        self.curvature_term
            .axpy(1.0, &self.higgs_term)?
            .axpy(1.0, &self.cocycle_term)?
            .axpy(1.0, &self.central_term)
    }
}

/// Pointwise caloron BF integrand with `D = -∂_θ` and `w = k/8π²`.
pub fn bf_density(g: &SuN, lc: &LiftedConnection, k: i64) -> Result<BfDensity> {
    let w = level_weight(k);
    let f = &lc.fields;
    let lam = &f.big_lambda;
    let dlam_loop = lam.partial(2).scaled(-1.0);
    let f_lam = exterior_d_sigma_curv(g, f)?;
    let dl = exterior_d(f.kappa()?.form())?;
    let curvature_term = wedge_pair(&f.phi, &f_lam)?.scaled(-w);
    let higgs_term = wedge_scalar(&dl, &wedge_pair(&f.phi, &f.phi)?)?.scaled(-0.5 * w);
    let cocycle_term = wedge_pair(lam, &dlam_loop)?.scaled(-0.5 * w);
    let central_term = lc.alpha.d_alpha()?.scaled(-1.0);
    Ok(BfDensity {
        curvature_term,
        higgs_term,
        cocycle_term,
        central_term,
    })
}

// F_Λ + λ∧DΛ.
fn exterior_d_sigma_curv(g: &SuN, f: &CaloronFields) -> Result<FieldGrid> {
    let lam = &f.big_lambda;
    crate::manifold::exterior_d_sigma(lam)?
        .axpy(0.5, &wedge_bracket(g, lam, lam)?)?
        .axpy(-1.0, &wedge_scalar(&f.lambda, &lam.partial(2))?)
}

fn integrate_sigma(w: &FieldGrid) -> f64 {
    w.comp(0).iter().sum::<f64>() / w.shape().npts() as f64
}

/// `S^Cal = ∫_Σ <<<F_L̃, Ṽ>>>`.
pub fn caloron_bf_action(g: &SuN, lc: &LiftedConnection, k: i64) -> Result<ActionValue> {
    let dens = bf_density(g, lc, k)?;
    Ok(ActionValue::from_terms(vec![
        ("curvature".into(), integrate_sigma(&dens.curvature_term)),
        ("higgs".into(), integrate_sigma(&dens.higgs_term)),
        ("cocycle".into(), integrate_sigma(&dens.cocycle_term)),
        ("central".into(), integrate_sigma(&dens.central_term)),
    ]))
}

/// Directional derivative of `S^Cal` in `Φ`: `-w∫_Σ <<δΦ, F_Λ + λ∧DΛ + dλ Φ>>`.
pub fn bf_phi_variation(g: &SuN, f: &CaloronFields, dphi: &FieldGrid, k: i64) -> Result<f64> {
    let rhs = looped_curvature(g, f)?.beta_f_v(&f.phi)?;
    Ok(-level_weight(k) * integrate_sigma(&wedge_pair(dphi, &rhs)?))
}

/// Independent 3d evaluation
/// `-w∫_M(<φ, κ∧F_a - dκ∧a> + ½κ∧dκ<φ,φ> + ½κ∧<L_R a ∧ a>) - ∫κ∧dα`
/// with `a = P̄_κ A`, `φ = ι_R A`.
pub fn bf_action_3d(
    g: &SuN,
    c: &Connection3d,
    alpha: &crate::caloron::AlphaField,
    k: i64,
) -> Result<ActionValue> {
    let w = level_weight(k);
    let kappa = &c.kappa;
    let a = project_horizontal(&c.a, kappa)?;
    let phi = interior_r(&c.a)?;
    let fa = curvature_3d(g, &a)?;
    let dk = exterior_d(kappa.form())?;
    let top = wedge_scalar(kappa.form(), &fa)?.axpy(-1.0, &wedge_scalar(&dk, &a)?)?;
    let t1 = fiber_integrate(&wedge_pair(&phi, &top)?)?;
    let kdk = wedge_scalar(kappa.form(), &dk)?;
    let t2 = 0.5 * fiber_integrate(&wedge_scalar(&kdk, &wedge_pair(&phi, &phi)?)?)?;
    let t3 = rotation_term(&a, kappa)?;
    let t4 = fiber_integrate(&wedge_scalar(kappa.form(), &alpha.d_alpha()?)?)?;
    Ok(ActionValue::from_terms(vec![
        ("phi.(kF-dk.a)".into(), -w * t1),
        ("kdk.phi^2/2".into(), -w * t2),
        ("k<L_R a^a>/2".into(), -w * t3),
        ("k^d(alpha)".into(), -t4),
    ]))
}

/// Equation-of-motion residuals (sup norms).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EomResidual {
    /// `|F_L - dλ V|`, i.e. of `F_Λ + λ∧DΛ + dλ Φ`.
    pub bf_residual: f64,
    /// `|d_L V|`.
    pub bianchi_residual: f64,
    /// `|F_A|` of the reassembled 3d connection.
    pub flatness_residual: f64,
}

/// Residuals of the caloron equations of motion and of 3d flatness.
pub fn eom_residual(g: &SuN, f: &CaloronFields) -> Result<EomResidual> {
    let lc = looped_curvature(g, f)?;
    let bf = lc.beta_f_v(&f.phi)?;
    let c = cal_inverse(f)?;
    Ok(EomResidual {
        bf_residual: bf.sup_norm(),
        bianchi_residual: lc.nabla_phi.sup_norm(),
        flatness_residual: curvature_3d(g, &c.a)?.sup_norm(),
    })
}

/// Residual report for the MSV identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MsvReport {
    /// Sup of `d<<<F_L̃,Ṽ>>> + (w/2) msv(L,V)` over the family base.
    pub absolute_residual: f64,
    /// Absolute residual divided by the larger side.
    pub relative_residual: f64,
    /// Sup of the left side.
    pub lhs_norm: f64,
}

fn bf_xy_density(g: &SuN, f: &CaloronFields, k: i64) -> Result<Vec<f64>> {
    let lc = LiftedConnection::untwisted(f.clone());
    let t = fiber_average_k(&bf_density(g, &lc, k)?.total()?);
    Ok(t.comp(0).to_vec())
}

fn shifted(base: &CaloronFields, dir: &CaloronFields, t: f64) -> Result<CaloronFields> {
    Ok(CaloronFields {
        lambda: base.lambda.clone(),
        big_lambda: base.big_lambda.axpy(t, &dir.big_lambda)?,
        phi: base.phi.axpy(t, &dir.phi)?,
    })
}

/// Checks `d<<<F_L̃,Ṽ>>> = -(w/2) msv(L,V)` with `msv = 2<<G ∧ ∇Φ>>`,
/// `G = F_Λ + λ∧DΛ + dλΦ`, on the family `(Λ, Φ) + t (δΛ, δΦ)` over the
/// 3d base `(t, x, y)`. `∂_t` is a five-point stencil, exact for the cubic
/// t-dependence of the integrand.
pub fn msv_identity(
    g: &SuN,
    base: &CaloronFields,
    dir: &CaloronFields,
    k: i64,
) -> Result<MsvReport> {
    let w = level_weight(k);
    let h = 0.25;
    let s_at = |t: f64| -> Result<Vec<f64>> { bf_xy_density(g, &shifted(base, dir, t)?, k) };
    let (sm2, sm1, sp1, sp2) = (s_at(-2.0 * h)?, s_at(-h)?, s_at(h)?, s_at(2.0 * h)?);
    let dt_sxy: Vec<f64> = (0..sm2.len())
        .map(|p| (sm2[p] - 8.0 * sm1[p] + 8.0 * sp1[p] - sp2[p]) / (12.0 * h))
        .collect();
    // S_ti = -w <<∂_tΛ_i, Φ>> as a base 1-form (components t x, t y).
    let lam1 = &dir.big_lambda;
    let s = base.shape();
    let mut sti = FieldGrid::zeros(s, 1, 1);
    for ax in 0..2 {
        let comp_i = FieldGrid::from_components(s, 0, lam1.vdim(), vec![lam1.comp(ax).to_vec()])?;
        let pr = wedge_pair(&comp_i, &base.phi)?;
        sti.comps_mut()[ax] = pr.comp(0).iter().map(|v| -w * v).collect();
    }
    let sti = fiber_average_k(&sti);
    let dx_sty = sti.partial(0);
    let dy_stx = sti.partial(1);
    let lhs: Vec<f64> = (0..s.npts())
        .map(|p| dt_sxy[p] - dx_sty.comp(1)[p] + dy_stx.comp(0)[p])
        .collect();

    let lc = looped_curvature(g, base)?;
    let gxy = lc.beta_f_v(&base.phi)?;
    let nab = &lc.nabla_phi;
    let dim = base.phi.vdim();
    let mut inner = vec![0.0; s.npts()];
    for (p, v) in inner.iter_mut().enumerate() {
        let sl = |w: &FieldGrid, c: usize| w.comp(c)[p * dim..(p + 1) * dim].to_vec();
        let dot = |a: &[f64], b: &[f64]| SuN::pair_coords(a, b);
        *v = dot(&sl(&gxy, 0), &sl(&dir.phi, 0)) + dot(&sl(lam1, 0), &sl(nab, 1))
            - dot(&sl(lam1, 1), &sl(nab, 0));
    }
    let inner = FieldGrid::from_components(s, 0, 1, vec![inner])?;
    let msv = fiber_average_k(&inner).scaled(2.0);
    let rhs: Vec<f64> = msv.comp(0).iter().map(|v| -0.5 * w * v).collect();

    let abs = lhs.iter().zip(&rhs).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let ln = lhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let rn = rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(MsvReport {
        absolute_residual: abs,
        relative_residual: abs / ln.max(rn).max(f64::MIN_POSITIVE),
        lhs_norm: ln,
    })
}

/// Holonomy around the fiber over base node `(i, j)` for `U' = -A_θ U`,
/// later steps on the left. Each step is a fourth-order Magnus step with
/// `A_θ` interpolated spectrally to the two Gauss points.
pub fn wilson_holonomy(g: &SuN, a: &FieldGrid, i: usize, j: usize) -> Result<CMat> {
    if a.form_degree() != 1 || a.vdim() != g.dim() {
        return Err(Error::Shape("holonomy needs a Lie-valued 1-form".into()));
    }
    let s = a.shape();
    if i >= s.nx || j >= s.ny {
        return Err(Error::Shape("base point outside the grid".into()));
    }
    let (n, dim) = (s.nt, g.dim());
    let dt = 1.0 / n as f64;
    let plans = spectral::plans(n);
    let gauss = |c: f64| -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; dim]; n];
        for comp in 0..dim {
            let mut buf: Vec<Complex64> = (0..n)
                .map(|l| Complex64::new(a.at(2, s.idx(i, j, l))[comp], 0.0))
                .collect();
            plans.shift(&mut buf, c * dt);
            for (o, v) in out.iter_mut().zip(&buf) {
                o[comp] = v.re;
            }
        }
        out
    };
    let off = 3f64.sqrt() / 6.0;
    let (b1, b2) = (gauss(0.5 - off), gauss(0.5 + off));
    let mut u = CMat::identity(g.rank(), g.rank());
    for l in 0..n {
        // Generator -A: Ω = -(dt/2)(A₁ + A₂) + (√3/12) dt² [A₂, A₁].
        let mut omega: Vec<f64> = b1[l].iter().zip(&b2[l]).map(|(p, q)| -0.5 * dt * (p + q)).collect();
        g.bracket_acc(&b2[l], &b1[l], 3f64.sqrt() / 12.0 * dt * dt, &mut omega);
        u = g.exp_coords(&omega).0 * u;
    }
    Ok(u)
}

/// Trace of the fiber holonomy in the fundamental representation.
pub fn wilson_trace(g: &SuN, a: &FieldGrid, i: usize, j: usize) -> Result<Complex64> {
    Ok(wilson_holonomy(g, a, i, j)?.trace())
}

/// Both sides of `w⁻¹<<<Ad_γ α̃, ṽ_φ>>> = -cs_α(U, A)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WilsonOrbitReport {
    /// `w⁻¹<<<Ad_γ α̃, ṽ_φ>>>`.
    pub lhs: f64,
    /// `cs_α = ∮<α, γ⁻¹(∂_θ + φ)γ>`.
    pub cs_alpha: f64,
    /// `|lhs + cs_alpha|`.
    pub residual: f64,
}

/// Orbit form of the fiber Wilson-loop action.
///
/// The left side uses the affine adjoint action (with `γ`'s exact log
/// derivative); `cs_α` differentiates the sampled matrix entries spectrally.
pub fn wilson_orbit_identity(
    g: &SuN,
    gamma: &LoopGroupElement,
    phi: &LoopElement,
    alpha: &[f64],
    k: i64,
) -> Result<WilsonOrbitReport> {
    let n = gamma.n_theta();
    let dim = g.dim();
    if phi.n_theta() != n || alpha.len() != dim {
        return Err(Error::Shape("loop grid or coweight dimension mismatch".into()));
    }
    let alpha_tilde = AffineVector {
        x: 0.0,
        xi: LoopElement::constant(n, alpha),
        y: 0.0,
    };
    let u = affine_adjoint(g, gamma, &alpha_tilde, k)?;
    let lhs = affine_pair(&u, &higgs(phi, k), k)? / level_weight(k);

    let r = g.rank();
    let samples = gamma.samples();
    let mut dsamples = vec![CMat::zeros(r, r); n];
    for a in 0..r {
        for b in 0..r {
            let re: Vec<f64> = samples.iter().map(|m| m[(a, b)].re).collect();
            let im: Vec<f64> = samples.iter().map(|m| m[(a, b)].im).collect();
            let (dre, dim_) = (spectral::diff_real(&re), spectral::diff_real(&im));
            for l in 0..n {
                dsamples[l][(a, b)] = Complex64::new(dre[l], dim_[l]);
            }
        }
    }
    let alpha_m = g.to_matrix(alpha).0;
    let mut acc = 0.0;
    for l in 0..n {
        let gm = &samples[l];
        let ph = g.to_matrix(phi.sample(l)).0;
        let cov = gm.adjoint() * (&dsamples[l] + ph * gm);
        acc += crate::lie::pair_matrices(&alpha_m, &cov);
    }
    let cs_alpha = acc / n as f64;
    Ok(WilsonOrbitReport {
        lhs,
        cs_alpha,
        residual: (lhs + cs_alpha).abs(),
    })
}

/// Options for the flatness solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowOptions {
    /// Maximum iterations.
    pub max_iter: usize,
    /// Stop once `sup|F_A|` drops below this.
    pub tol: f64,
    /// Helmholtz preconditioner constant `c` in `(1 - cΔ)⁻¹`.
    pub precond: f64,
    /// Initial step.
    pub step: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self {
            max_iter: 500,
            tol: 1e-6,
            precond: 1.0,
            step: 1.0,
        }
    }
}

/// Outcome of [`relax_to_flat`].
#[derive(Debug, Clone, PartialEq)]
pub struct FlowResult {
    /// Final caloron fields.
    pub fields: CaloronFields,
    /// Iterations used.
    pub iterations: usize,
    /// `E = ½⟨|F_A|²⟩` per iteration.
    pub energy: Vec<f64>,
    /// Final residuals.
    pub residual: EomResidual,
}

fn energy_and_gradient(g: &SuN, a: &FieldGrid) -> Result<(f64, FieldGrid)> {
    let f = curvature_3d(g, a)?;
    let s = a.shape();
    let npts = s.npts() as f64;
    let energy = 0.5 * f.comps().iter().flatten().map(|v| v * v).sum::<f64>() / npts;
    // grad_j = -Σ_i (∂_i F_ij + [A_i, F_ij]); F components are xy, xθ, yθ.
    let dim = a.vdim();
    let comp = |i: usize, j: usize| -> Option<(usize, f64)> {
        match (i, j) {
            (0, 1) => Some((0, 1.0)),
            (1, 0) => Some((0, -1.0)),
            (0, 2) => Some((1, 1.0)),
            (2, 0) => Some((1, -1.0)),
            (1, 2) => Some((2, 1.0)),
            (2, 1) => Some((2, -1.0)),
            _ => None,
        }
    };
    let parts: Vec<FieldGrid> = (0..3).map(|ax| f.partial(ax)).collect();
    let mut grad = FieldGrid::zeros(s, 1, dim);
    for j in 0..3 {
        let mut out = vec![0.0; s.npts() * dim];
        for i in 0..3 {
            let Some((c, sg)) = comp(i, j) else { continue };
            for p in 0..s.npts() {
                let fij = f.at(c, p);
                let dfi = parts[i].at(c, p);
                let o = &mut out[p * dim..(p + 1) * dim];
                for (oo, v) in o.iter_mut().zip(dfi) {
                    *oo -= sg * v;
                }
                g.bracket_acc(a.at(i, p), fij, -sg, o);
            }
        }
        grad.comps_mut()[j] = out;
    }
    Ok((energy, grad))
}

/// Preconditioned gradient descent on `½|F_A|²` over the caloron fields
/// `(Λ, Φ)` (torus chart, `d = 0`). The gradient is pulled back through
/// `A = Λ + κΦ`.
pub fn relax_to_flat(g: &SuN, start: &CaloronFields, opts: FlowOptions) -> Result<FlowResult> {
    let s = start.shape();
    if s.degree != 0 {
        return Err(Error::InvalidGeometry(
            "the flatness solver runs on the torus chart".into(),
        ));
    }
    let mut fields = start.clone();
    let mut energy = Vec::new();
    let mut step = opts.step;
    let dims = [s.nx, s.ny, s.nt];
    let dim = g.dim();
    let mut iterations = 0;
    let (mut e, mut grad) = energy_and_gradient(g, &cal_inverse(&fields)?.a)?;
    energy.push(e);
    while iterations < opts.max_iter {
        let fr = curvature_3d(g, &cal_inverse(&fields)?.a)?.sup_norm();
        if fr < opts.tol {
            break;
        }
        iterations += 1;
        // Chain rule: ∂E/∂Λ_i = G_i, ∂E/∂Φ = G_θ + λ_y G_y.
        let mut d_lam = FieldGrid::zeros(s, 1, dim);
        let mut d_phi = FieldGrid::zeros(s, 0, dim);
        for ax in 0..2 {
            d_lam.comps_mut()[ax] = grad.comp(ax).to_vec();
        }
        let ly = fields.lambda.comp(1);
        d_phi.comps_mut()[0] = (0..s.npts() * dim)
            .map(|q| grad.comp(2)[q] + ly[q / dim] * grad.comp(1)[q])
            .collect();
        for c in d_lam.comps_mut().iter_mut().take(2) {
            spectral::helmholtz_inverse_3d(c, dims, dim, opts.precond);
        }
        spectral::helmholtz_inverse_3d(&mut d_phi.comps_mut()[0], dims, dim, opts.precond);
        loop {
            let trial = CaloronFields {
                lambda: fields.lambda.clone(),
                big_lambda: fields.big_lambda.axpy(-step, &d_lam)?,
                phi: fields.phi.axpy(-step, &d_phi)?,
            };
            let (e_new, g_new) = energy_and_gradient(g, &cal_inverse(&trial)?.a)?;
            if e_new <= e || step < 1e-8 {
                fields = trial;
                e = e_new;
                grad = g_new;
                step = (step * 1.5).min(4.0 * opts.step);
                break;
            }
            step *= 0.5;
        }
        energy.push(e);
    }
    let residual = eom_residual(g, &fields)?;
    Ok(FlowResult {
        fields,
        iterations,
        energy,
        residual,
    })
}
