//! Gauge transformations on `M_d` and their caloron-side avatars, the
//! extended algebra acting on `ℓ̃ = (κ, a, b)`, and lift twisting.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::caloron::{AlphaField, CaloronFields, LiftedConnection};
use crate::error::{Error, Result};
use crate::lie::{CMat, SuN};
use crate::loops::level_weight;
use crate::manifold::{
    exterior_d, exterior_d_sigma, fiber_average_k, fiber_integrate, project_horizontal,
    wedge_bracket, wedge_pair, wedge_scalar, FieldGrid, Kappa, Shape,
};

/// A sampled map `g: M_d -> SU(n)` with an integer winding label.
#[derive(Debug, Clone)]
pub struct GaugeMap3d {
    shape: Shape,
    samples: Vec<CMat>,
    winding: i64,
}

impl GaugeMap3d {
    /// Samples `f` at every node.
    pub fn from_fn(shape: Shape, winding: i64, f: impl Fn(f64, f64, f64) -> CMat) -> Self {
        let mut samples = Vec::with_capacity(shape.npts());
        for i in 0..shape.nx {
            for j in 0..shape.ny {
                for l in 0..shape.nt {
                    let (x, y, t) = shape.coords(i, j, l);
                    samples.push(f(x, y, t));
                }
            }
        }
        Self {
            shape,
            samples,
            winding,
        }
    }

    /// The identity map.
    pub fn identity(shape: Shape, n: usize) -> Self {
        Self::from_fn(shape, 0, |_, _, _| CMat::identity(n, n))
    }

    /// Pointwise exponential of a Lie-valued 0-form (contractible, winding 0).
    pub fn exp_of(g: &SuN, xi: &FieldGrid) -> Result<Self> {
        if xi.form_degree() != 0 || xi.vdim() != g.dim() {
            return Err(Error::Shape("exponent must be a Lie-valued 0-form".into()));
        }
        let shape = xi.shape();
        let samples = (0..shape.npts())
            .map(|p| g.exp_coords(xi.at(0, p)).0)
            .collect();
        Ok(Self {
            shape,
            samples,
            winding: 0,
        })
    }

    /// Grid shape.
    pub fn shape(&self) -> Shape {
        self.shape
    }

    /// Winding label.
    pub fn winding(&self) -> i64 {
        self.winding
    }

    /// Samples in node order.
    pub fn samples(&self) -> &[CMat] {
        &self.samples
    }

    /// Largest unitarity defect `|g g^† - 1|`.
    pub fn unitarity_defect(&self) -> f64 {
        self.samples
            .iter()
            .map(|m| {
                let n = m.nrows();
                (m * m.adjoint() - CMat::identity(n, n)).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Pointwise inverse.
    pub fn inverse(&self) -> Self {
        Self {
            samples: self.samples.iter().map(|m| m.adjoint()).collect(),
            winding: -self.winding,
            ..*self
        }
    }

    /// Pointwise product `self · other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.shape != other.shape {
            return Err(Error::GridMismatch("gauge maps on different grids".into()));
        }
        Ok(Self {
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a * b)
                .collect(),
            winding: self.winding + other.winding,
            shape: self.shape,
        })
    }

    /// Left Maurer-Cartan form `g^-1 dg` from derivatives of the matrix entries.
    pub fn maurer_cartan(&self, g: &SuN) -> Result<FieldGrid> {
        let n = g.rank();
        if self.samples.first().map(|m| m.nrows()) != Some(n) {
            return Err(Error::RankMismatch(
                self.samples.first().map_or(0, |m| m.nrows()),
                n,
            ));
        }
        let s = self.shape;
        let nn = n * n;
        let mut entries = FieldGrid::zeros(s, 0, 2 * nn);
        for (p, m) in self.samples.iter().enumerate() {
            let slot = &mut entries.comps_mut()[0][p * 2 * nn..(p + 1) * 2 * nn];
            for (q, z) in m.iter().enumerate() {
                slot[2 * q] = z.re;
                slot[2 * q + 1] = z.im;
            }
        }
        let parts: Vec<FieldGrid> = (0..3).map(|ax| entries.partial(ax)).collect();
        let dim = g.dim();
        let mut out = FieldGrid::zeros(s, 1, dim);
        for (p, m) in self.samples.iter().enumerate() {
            let inv = m.adjoint();
            for (ax, part) in parts.iter().enumerate() {
                let v = part.at(0, p);
                let dm = CMat::from_fn(n, n, |r, c| {
                    let q = r + c * n;
                    Complex64::new(v[2 * q], v[2 * q + 1])
                });
                let coords = g.coords(&(&inv * dm));
                out.comps_mut()[ax][p * dim..(p + 1) * dim].copy_from_slice(&coords);
            }
        }
        Ok(out)
    }

    /// `g^-1 X g` for a Lie-valued form of any degree.
    pub fn adjoint_inv(&self, g: &SuN, w: &FieldGrid) -> Result<FieldGrid> {
        if w.shape() != self.shape || w.vdim() != g.dim() {
            return Err(Error::GridMismatch("adjoint of mismatched field".into()));
        }
        let dim = g.dim();
        let mut out = w.clone();
        let ncomp = w.comps().len();
        for (p, m) in self.samples.iter().enumerate() {
            for c in 0..ncomp {
                let v = g.adjoint_inv_coords(m, w.at(c, p));
                out.comps_mut()[c][p * dim..(p + 1) * dim].copy_from_slice(&v);
            }
        }
        Ok(out)
    }
}

/// `A ↦ g^-1 A g + g^-1 dg`.
pub fn gauge_act_3d(g: &SuN, gm: &GaugeMap3d, a: &FieldGrid) -> Result<FieldGrid> {
    gm.adjoint_inv(g, a)?.axpy(1.0, &gm.maurer_cartan(g)?)
}

/// Reduced action on horizontal `a`: `a ↦ g^-1 a g + P̄_κ(g^-1 dg)`.
pub fn gauge_act_reduced(
    g: &SuN,
    gm: &GaugeMap3d,
    a: &FieldGrid,
    kappa: &Kappa,
) -> Result<FieldGrid> {
    gm.adjoint_inv(g, a)?
        .axpy(1.0, &project_horizontal(&gm.maurer_cartan(g)?, kappa)?)
}

/// Loop-group gauge action on caloron fields:
/// `Λ ↦ g^-1 Λ g + g^-1 (d_Σ - λ ∂_θ) g`, `Φ ↦ g^-1 Φ g + g^-1 ∂_θ g`.
pub fn gauge_act_caloron(g: &SuN, gm: &GaugeMap3d, f: &CaloronFields) -> Result<CaloronFields> {
    let mc = gm.maurer_cartan(g)?;
    let dim = g.dim();
    let s = f.shape();
    let mut shift = FieldGrid::zeros(s, 1, dim);
    let mut phi_shift = FieldGrid::zeros(s, 0, dim);
    for p in 0..s.npts() {
        let mt = mc.at(2, p).to_vec();
        for ax in 0..2 {
            let lam = f.lambda.at(ax, p)[0];
            let src = mc.at(ax, p);
            let dst = &mut shift.comps_mut()[ax][p * dim..(p + 1) * dim];
            for (o, (a, b)) in dst.iter_mut().zip(src.iter().zip(&mt)) {
                *o = a - lam * b;
            }
        }
        phi_shift.comps_mut()[0][p * dim..(p + 1) * dim].copy_from_slice(&mt);
    }
    Ok(CaloronFields {
        lambda: f.lambda.clone(),
        big_lambda: gm.adjoint_inv(g, &f.big_lambda)?.axpy(1.0, &shift)?,
        phi: gm.adjoint_inv(g, &f.phi)?.axpy(1.0, &phi_shift)?,
    })
}

/// Localized SU(2) winding map of charge ±1 centred at `center` on `T³`.
///
/// `g = cos F - i sin F (p̂·σ)` with `F = π erf(r/ρ)`; `g = -1` away from
/// the centre, so the periodic extension is smooth to the erf tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hedgehog {
    /// Centre in `[0,1)³`.
    pub center: [f64; 3],
    /// Core radius `ρ`.
    pub radius: f64,
    /// Degree, `+1` or `-1`; the two differ by reflecting x.
    pub charge: i32,
}

fn pauli() -> [CMat; 3] {
    let z = Complex64::new(0.0, 0.0);
    let o = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    [
        CMat::from_row_slice(2, 2, &[z, o, o, z]),
        CMat::from_row_slice(2, 2, &[z, -i, i, z]),
        CMat::from_row_slice(2, 2, &[o, z, z, -o]),
    ]
}

impl Hedgehog {
    fn offset(&self, x: f64, y: f64, t: f64) -> [f64; 3] {
        let mut p = [x - self.center[0], y - self.center[1], t - self.center[2]];
        for v in p.iter_mut() {
            *v -= v.round();
        }
        if self.charge > 0 {
            p[0] = -p[0];
        }
        p
    }

    /// Value and the three partial derivatives at `(x, y, θ)`.
    pub fn value_and_grad(&self, x: f64, y: f64, t: f64) -> (CMat, [CMat; 3]) {
        let p = self.offset(x, y, t);
        let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt().max(1e-300);
        let rho = self.radius;
        let f = PI * libm::erf(r / rho);
        let fp = PI * 2.0 / PI.sqrt() / rho * (-(r / rho).powi(2)).exp();
        let sig = pauli();
        let one = CMat::identity(2, 2);
        let i = Complex64::new(0.0, 1.0);
        let n = [p[0] / r, p[1] / r, p[2] / r];
        let ns = &sig[0] * Complex64::from(n[0]) + &sig[1] * Complex64::from(n[1]) + &sig[2] * Complex64::from(n[2]);
        let (sf, cf) = f.sin_cos();
        let val = &one * Complex64::from(cf) - &ns * (i * sf);
        let mut grad: [CMat; 3] = [CMat::zeros(2, 2), CMat::zeros(2, 2), CMat::zeros(2, 2)];
        for (a, gr) in grad.iter_mut().enumerate() {
            let sgn = if a == 0 && self.charge > 0 { -1.0 } else { 1.0 };
            // ∂_a n̂_b = (δ_ab - n_a n_b)/r
            let mut dns = CMat::zeros(2, 2);
            for (b, sb) in sig.iter().enumerate() {
                let dn = ((a == b) as i32 as f64 - n[a] * n[b]) / r;
                dns += sb * Complex64::from(dn);
            }
            let df = fp * n[a];
            *gr = (&one * Complex64::from(-sf * df) - &ns * (i * (cf * df)) - dns * (i * sf))
                * Complex64::from(sgn);
        }
        (val, grad)
    }
}

/// Product of hedgehogs with analytic derivatives.
pub fn hedgehog_product(hs: &[Hedgehog], x: f64, y: f64, t: f64) -> (CMat, [CMat; 3]) {
    let mut val = CMat::identity(2, 2);
    let mut grad = [CMat::zeros(2, 2), CMat::zeros(2, 2), CMat::zeros(2, 2)];
    for h in hs {
        let (v, g) = h.value_and_grad(x, y, t);
        for a in 0..3 {
            grad[a] = &grad[a] * &v + &val * &g[a];
        }
        val *= v;
    }
    (val, grad)
}

/// Winding gauge map on `T³` built from hedgehogs; the label is the total charge.
pub fn winding_map(shape: Shape, hs: &[Hedgehog]) -> Result<GaugeMap3d> {
    if shape.degree != 0 {
        return Err(Error::InvalidGeometry(
            "hedgehog winding maps are built on the torus chart".into(),
        ));
    }
    let charge: i64 = hs.iter().map(|h| h.charge as i64).sum();
    Ok(GaugeMap3d::from_fn(shape, charge, |x, y, t| {
        hedgehog_product(hs, x, y, t).0
    }))
}

/// Degree `(1/24π²)∫Tr((g^-1 dg)³)` from analytic derivatives on an `n³` midpoint grid.
pub fn winding_degree_quadrature(hs: &[Hedgehog], n: usize) -> f64 {
    let mut acc = 0.0;
    let h = 1.0 / n as f64;
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                let (x, y, t) = ((i as f64 + 0.5) * h, (j as f64 + 0.5) * h, (l as f64 + 0.5) * h);
                let (v, g) = hedgehog_product(hs, x, y, t);
                let inv = v.adjoint();
                let th: Vec<CMat> = g.iter().map(|d| &inv * d).collect();
                // Tr(θ∧θ∧θ) = 3 Tr(θ_x [θ_y, θ_θ]) dx∧dy∧dθ
                let comm = &th[1] * &th[2] - &th[2] * &th[1];
                acc += 3.0 * (&th[0] * comm).trace().re;
            }
        }
    }
    acc * h * h * h / (24.0 * PI * PI)
}

/// Element `(x, ξ, y)` of the extended algebra: `x`, `y` functions on Σ,
/// `ξ` a Lie-valued function on `M_d`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedAlgebraElement {
    /// Rotation component (θ-independent real 0-form).
    pub x: FieldGrid,
    /// Gauge component.
    pub xi: FieldGrid,
    /// Central component (θ-independent real 0-form).
    pub y: FieldGrid,
}

impl ExtendedAlgebraElement {
    /// Checks degrees, value dimensions and θ-independence of `x`, `y`.
    pub fn new(g: &SuN, x: FieldGrid, xi: FieldGrid, y: FieldGrid) -> Result<Self> {
        for (f, v) in [(&x, 1), (&xi, g.dim()), (&y, 1)] {
            if f.form_degree() != 0 || f.vdim() != v || f.shape() != xi.shape() {
                return Err(Error::Shape("extended algebra components".into()));
            }
        }
        for f in [&x, &y] {
            if f.partial(2).sup_norm() > 1e-10 {
                return Err(Error::Shape("x and y must be θ-independent".into()));
            }
        }
        Ok(Self {
            x: x.with_base_only(true),
            xi,
            y: y.with_base_only(true),
        })
    }

    /// The central element with `y` given.
    pub fn central(g: &SuN, y: FieldGrid) -> Result<Self> {
        let s = y.shape();
        Self::new(g, FieldGrid::zeros(s, 0, 1), FieldGrid::zeros(s, 0, g.dim()), y)
    }

    /// Grid shape.
    pub fn shape(&self) -> Shape {
        self.xi.shape()
    }

    /// Largest component magnitude.
    pub fn sup_norm(&self) -> f64 {
        self.x.sup_norm().max(self.xi.sup_norm()).max(self.y.sup_norm())
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: f64, other: &Self) -> Result<Self> {
        Ok(Self {
            x: self.x.axpy(c, &other.x)?,
            xi: self.xi.axpy(c, &other.xi)?,
            y: self.y.axpy(c, &other.y)?,
        })
    }
}

/// Bracket `(0, [ξ₁,ξ₂] - x₁L_Rξ₂ + x₂L_Rξ₁, w K<ξ₁, Dξ₂>)`, pointwise on Σ.
pub fn extended_bracket(
    g: &SuN,
    u: &ExtendedAlgebraElement,
    v: &ExtendedAlgebraElement,
    k: i64,
) -> Result<ExtendedAlgebraElement> {
    let (du, dv) = (u.xi.partial(2), v.xi.partial(2));
    let xi = wedge_bracket(g, &u.xi, &v.xi)?
        .axpy(-1.0, &wedge_scalar(&u.x, &dv)?)?
        .axpy(1.0, &wedge_scalar(&v.x, &du)?)?;
    let y = fiber_average_k(&wedge_pair(&u.xi, &dv)?).scaled(-level_weight(k));
    Ok(ExtendedAlgebraElement {
        x: FieldGrid::zeros(u.shape(), 0, 1).with_base_only(true),
        xi,
        y,
    })
}

/// Pairing `w K<ξ₁,ξ₂> - x₁y₂ - x₂y₁`, a function on Σ.
pub fn extended_pair(u: &ExtendedAlgebraElement, v: &ExtendedAlgebraElement, k: i64) -> Result<FieldGrid> {
    fiber_average_k(&wedge_pair(&u.xi, &v.xi)?)
        .scaled(level_weight(k))
        .axpy(-1.0, &wedge_scalar(&u.x, &v.y)?)?
        .axpy(-1.0, &wedge_scalar(&v.x, &u.y)?)
}

/// `k₀(ξ₁, ξ₂) = ∫_M κ∧dκ <L_Rξ₁, ξ₂>`.
pub fn cocycle_k0(xi1: &FieldGrid, xi2: &FieldGrid, kappa: &Kappa) -> Result<f64> {
    if kappa.shape().degree == 0 {
        return Err(Error::DegenerateContact);
    }
    let vol = wedge_scalar(kappa.form(), &exterior_d(kappa.form())?)?;
    fiber_integrate(&wedge_scalar(&vol, &wedge_pair(&xi1.partial(2), xi2)?)?)
}

/// `ℓ̃ = (κ, a, b)`: a contact connection, a horizontal Lie-valued 1-form and
/// a real 1-form on Σ.
#[derive(Debug, Clone, PartialEq)]
pub struct CConnection {
    /// Circle-bundle connection.
    pub kappa: Kappa,
    /// Horizontal part, `ι_R a = 0`.
    pub a: FieldGrid,
    /// Basic real 1-form.
    pub b: FieldGrid,
}

/// Tangent vector `(δκ, δa, δb)` to the space of `ℓ̃`.
#[derive(Debug, Clone, PartialEq)]
pub struct CConnectionTangent {
    /// Real base 1-form.
    pub kappa: FieldGrid,
    /// Horizontal Lie-valued 1-form.
    pub a: FieldGrid,
    /// Real base 1-form.
    pub b: FieldGrid,
}

fn horizontal_defect(w: &FieldGrid) -> f64 {
    w.comp(2).iter().fold(0.0, |m, v| m.max(v.abs()))
}

impl CConnection {
    /// Checks `ι_R a = 0`, `ι_R b = 0` and `L_R b = 0`.
    pub fn new(kappa: Kappa, a: FieldGrid, b: FieldGrid) -> Result<Self> {
        if a.form_degree() != 1 || b.form_degree() != 1 || b.vdim() != 1 {
            return Err(Error::Shape("ℓ̃ components must be 1-forms".into()));
        }
        if a.shape() != kappa.shape() || b.shape() != kappa.shape() {
            return Err(Error::GridMismatch("ℓ̃ components on different grids".into()));
        }
        if horizontal_defect(&a) > 1e-12 || horizontal_defect(&b) > 1e-12 {
            return Err(Error::Shape("a and b must be horizontal".into()));
        }
        if b.partial(2).sup_norm() > 1e-10 {
            return Err(Error::Shape("b must be θ-independent".into()));
        }
        Ok(Self {
            kappa,
            a,
            b: b.with_base_only(true),
        })
    }

    /// `ℓ̃ + ε t`.
    pub fn shifted(&self, eps: f64, t: &CConnectionTangent) -> Result<Self> {
        Self::new(
            Kappa::new(self.kappa.form().axpy(eps, &t.kappa)?)?,
            self.a.axpy(eps, &t.a)?,
            self.b.axpy(eps, &t.b)?,
        )
    }
}

/// Infinitesimal action `d_ℓ̃(x, ξ, y)`:
/// `δκ = dx`, `δa = P̄_κ dξ + [a, ξ] + x L_R a`, `δb = dy + w K<a, Dξ>`.
pub fn rep_on_cconnection(
    g: &SuN,
    u: &ExtendedAlgebraElement,
    l: &CConnection,
    k: i64,
) -> Result<CConnectionTangent> {
    let dxi = exterior_d(&u.xi)?;
    let a = dxi
        .axpy(-1.0, &wedge_scalar(l.kappa.form(), &u.xi.partial(2))?)?
        .axpy(1.0, &wedge_bracket(g, &l.a, &u.xi)?)?
        .axpy(1.0, &wedge_scalar(&u.x, &l.a.partial(2))?)?;
    let mut a = a;
    a.comps_mut()[2].iter_mut().for_each(|v| *v = 0.0);
    let b = exterior_d_sigma(&u.y)?.axpy(
        -level_weight(k),
        &fiber_average_k(&wedge_pair(&l.a, &u.xi.partial(2))?),
    )?;
    Ok(CConnectionTangent {
        kappa: exterior_d_sigma(&u.x)?,
        a,
        b: b.with_base_only(true),
    })
}

/// Components of `F_ℓ̃ = dℓ̃ + ½[ℓ̃, ℓ̃]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentF {
    /// `dκ`.
    pub rotation: FieldGrid,
    /// `F_a - κ∧L_R a`.
    pub loop_part: FieldGrid,
    /// `db + (w/2) K<a ∧ Da>`.
    pub central: FieldGrid,
}

impl MomentF {
    /// Largest `dθ`-leg coefficient over the three components.
    pub fn horizontality_defect(&self) -> f64 {
        [&self.rotation, &self.loop_part, &self.central]
            .iter()
            .map(|w| {
                w.comp(1)
                    .iter()
                    .chain(w.comp(2))
                    .fold(0.0f64, |m, v| m.max(v.abs()))
            })
            .fold(0.0, f64::max)
    }
}

/// Moment map `F_ℓ̃`.
pub fn moment_f(g: &SuN, l: &CConnection, k: i64) -> Result<MomentF> {
    let fa = crate::caloron::curvature_3d(g, &l.a)?;
    let da = l.a.partial(2);
    let loop_part = fa.axpy(-1.0, &wedge_scalar(l.kappa.form(), &da)?)?;
    let central = exterior_d_sigma(&l.b)?.axpy(
        -0.5 * level_weight(k),
        &fiber_average_k(&wedge_pair(&l.a, &da)?),
    )?;
    Ok(MomentF {
        rotation: exterior_d(l.kappa.form())?,
        loop_part,
        central,
    })
}

fn sigma_mean(w: &FieldGrid) -> f64 {
    w.comp(0).iter().sum::<f64>() / w.shape().npts() as f64
}

/// `Ω(X, Y) = ∫_Σ (w K<δa₁∧δa₂> - δκ₁∧δb₂ - δb₁∧δκ₂)`.
pub fn omega_cconnection(x: &CConnectionTangent, y: &CConnectionTangent, k: i64) -> Result<f64> {
    let aa = fiber_average_k(&wedge_pair(&x.a, &y.a)?);
    let kb = wedge_scalar(&x.kappa, &y.b)?;
    let bk = wedge_scalar(&x.b, &y.kappa)?;
    Ok(level_weight(k) * sigma_mean(&aa) - sigma_mean(&kb) - sigma_mean(&bk))
}

/// `H_u(ℓ̃) = ∫_Σ <<<F_ℓ̃, u>>>`.
pub fn hamiltonian(g: &SuN, l: &CConnection, u: &ExtendedAlgebraElement, k: i64) -> Result<f64> {
    let m = moment_f(g, l, k)?;
    let pair = fiber_average_k(&wedge_pair(&m.loop_part, &u.xi)?);
    let xc = wedge_scalar(&u.x, &m.central)?;
    let yr = wedge_scalar(&u.y, &m.rotation)?;
    Ok(level_weight(k) * sigma_mean(&pair) - sigma_mean(&xc) - sigma_mean(&yr))
}

/// Both sides of `Ω(X_u, Y) = -δ_Y H_u`, the derivative by central
/// differences with one Richardson step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianCheck {
    /// `Ω(X_u, Y)`.
    pub omega: f64,
    /// `-δ_Y H_u`.
    pub minus_dh: f64,
    /// Relative difference.
    pub relative_residual: f64,
}

/// Finite-difference check of the moment map property.
pub fn hamiltonian_fd_check(
    g: &SuN,
    l: &CConnection,
    u: &ExtendedAlgebraElement,
    dir: &CConnectionTangent,
    k: i64,
    step: f64,
) -> Result<HamiltonianCheck> {
    let xu = rep_on_cconnection(g, u, l, k)?;
    let omega = omega_cconnection(&xu, dir, k)?;
    let central = |h: f64| -> Result<f64> {
        let p = hamiltonian(g, &l.shifted(h, dir)?, u, k)?;
        let m = hamiltonian(g, &l.shifted(-h, dir)?, u, k)?;
        Ok((p - m) / (2.0 * h))
    };
    let (d1, d2) = (central(step)?, central(0.5 * step)?);
    let dh = (4.0 * d2 - d1) / 3.0;
    let scale = omega.abs().max(dh.abs()).max(f64::MIN_POSITIVE);
    Ok(HamiltonianCheck {
        omega,
        minus_dh: -dh,
        relative_residual: (omega + dh).abs() / scale,
    })
}

/// Shifts the central connection of a lift by `β`: `α ↦ α + β`.
pub fn lift_twist(lc: &LiftedConnection, beta: &AlphaField) -> Result<LiftedConnection> {
    if !beta.periodic.base_only() || horizontal_defect(&beta.periodic) > 0.0 {
        return Err(Error::Shape("β must be a 1-form on Σ".into()));
    }
    let mut out = lc.clone();
    out.alpha = AlphaField {
        periodic: lc.alpha.periodic.axpy(1.0, &beta.periodic)?.with_base_only(true),
        twist: lc.alpha.twist + beta.twist,
    };
    Ok(out)
}

/// Large gauge transformation of a lift: the caloron fields move by
/// `gauge_act_caloron` and the central connection picks up the integer twist
/// class `-k·deg(g)` attached to the transformation.
pub fn gauge_act_lift(g: &SuN, gm: &GaugeMap3d, lc: &LiftedConnection, k: i64) -> Result<LiftedConnection> {
    let fields = gauge_act_caloron(g, gm, &lc.fields)?;
    let mut alpha = AlphaField::zero(fields.shape());
    alpha.twist = -k * gm.winding();
    lift_twist(&LiftedConnection { fields, alpha: lc.alpha.clone() }, &alpha)
}
