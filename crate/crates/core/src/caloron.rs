//! The caloron correspondence between connections on `M_d` and loop-valued
//! connection/Higgs pairs on the base, and the looped-connection curvature.
//!
//! Caloron fields live on the same `(x, y, θ)` grid as 3d fields: a
//! loop-valued form on Σ is a form without `dθ` legs whose coefficients are
//! read as loops along each fiber. Their coefficients glue across the
//! x-cycle by a plain rotation of the loop by `d·y`.

use crate::error::{Error, Result};
use crate::lie::SuN;
use crate::manifold::{
    exterior_d, exterior_d_sigma, project_horizontal, interior_r, wedge_bracket, wedge_scalar,
    FieldGrid, Kappa, Shape,
};

/// A 3d connection `A` together with the fiber connection `κ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Connection3d {
    /// Lie-valued 1-form on `M_d`.
    pub a: FieldGrid,
    /// Circle-bundle connection.
    pub kappa: Kappa,
}

impl Connection3d {
    /// Checks that `a` is a 1-form on the grid of `kappa`.
    pub fn new(a: FieldGrid, kappa: Kappa) -> Result<Self> {
        if a.form_degree() != 1 {
            return Err(Error::WrongDegree {
                expected: 1,
                got: a.form_degree(),
            });
        }
        if a.shape() != kappa.shape() {
            return Err(Error::GridMismatch("A and κ live on different grids".into()));
        }
        Ok(Self { a, kappa })
    }

    /// Grid shape.
    pub fn shape(&self) -> Shape {
        self.a.shape()
    }
}

/// Loop-valued connection `L = (λ, Λ)` and Higgs field `Φ` (with `V = (1, -Φ)`).
#[derive(Debug, Clone, PartialEq)]
pub struct CaloronFields {
    /// Real 1-form on Σ, the base part of κ.
    pub lambda: FieldGrid,
    /// Loop-valued 1-form on Σ (no `dθ` component).
    pub big_lambda: FieldGrid,
    /// Loop-valued 0-form.
    pub phi: FieldGrid,
}

impl CaloronFields {
    /// Grid shape.
    pub fn shape(&self) -> Shape {
        self.phi.shape()
    }

    /// Rebuilds κ = dθ + λ.
    pub fn kappa(&self) -> Result<Kappa> {
        let mut k = self.lambda.clone();
        k.comps_mut()[2].iter_mut().for_each(|v| *v = 1.0);
        Kappa::new(k)
    }

    /// Largest `dθ` coefficient of Λ (zero for valid fields).
    pub fn horizontality_defect(&self) -> f64 {
        self.big_lambda.comp(2).iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// `(κ, A) ↦ (λ, Λ, Φ)` with `λ = κ - dθ`, `Λ = P̄_κ A`, `Φ = ι_R A`.
pub fn cal_forward(c: &Connection3d) -> Result<CaloronFields> {
    let mut lambda = c.kappa.form().clone();
    lambda.comps_mut()[2].iter_mut().for_each(|v| *v = 0.0);
    Ok(CaloronFields {
        lambda,
        big_lambda: project_horizontal(&c.a, &c.kappa)?,
        phi: interior_r(&c.a)?,
    })
}

/// `(λ, Λ, Φ) ↦ (κ, A)` with `A = Λ + κ Φ`.
pub fn cal_inverse(f: &CaloronFields) -> Result<Connection3d> {
    let kappa = f.kappa()?;
    let a = f.big_lambda.axpy(1.0, &wedge_scalar(kappa.form(), &f.phi)?)?;
    Connection3d::new(a, kappa)
}

/// `F_A = dA + ½[A ∧ A]` on `M_d`.
pub fn curvature_3d(g: &SuN, a: &FieldGrid) -> Result<FieldGrid> {
    exterior_d(a)?.axpy(0.5, &wedge_bracket(g, a, a)?)
}

/// Pieces of the looped curvature.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopedCurvature {
    /// `dλ`, the rotation component of `F_L`.
    pub d_lambda: FieldGrid,
    /// Loop component of `F_L`: `F_Λ - λ ∧ ∂_θΛ`.
    pub f_loop: FieldGrid,
    /// `∇Φ = d_ΣΦ + [Λ, Φ] - λ ∂_θΦ - ∂_θΛ`, so that `d_L V = (0, -∇Φ)`.
    pub nabla_phi: FieldGrid,
}

impl LoopedCurvature {
    /// `β(F_L, V) = F_Λ - λ∧∂_θΛ + dλ Φ`.
    pub fn beta_f_v(&self, phi: &FieldGrid) -> Result<FieldGrid> {
        self.f_loop.axpy(1.0, &wedge_scalar(&self.d_lambda, phi)?)
    }
}

/// Computes `F_L` and `d_L V` on the caloron side.
pub fn looped_curvature(g: &SuN, f: &CaloronFields) -> Result<LoopedCurvature> {
    // dλ = dκ: λ itself is not twisted-periodic, κ is.
    let d_lambda = exterior_d(f.kappa()?.form())?;
    let lam = &f.big_lambda;
    let f_lam = exterior_d_sigma(lam)?.axpy(0.5, &wedge_bracket(g, lam, lam)?)?;
    let f_loop = f_lam.axpy(-1.0, &wedge_scalar(&f.lambda, &lam.partial(2))?)?;
    let nabla_phi = exterior_d_sigma(&f.phi)?
        .axpy(1.0, &wedge_bracket(g, lam, &f.phi)?)?
        .axpy(-1.0, &wedge_scalar(&f.lambda, &f.phi.partial(2))?)?
        .axpy(-1.0, &lam.partial(2))?;
    Ok(LoopedCurvature {
        d_lambda,
        f_loop,
        nabla_phi,
    })
}

/// Residuals of the looped curvature identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureIdentityReport {
    /// `|F_Ã - (β(F_L,V) - β(L, d_L V))|` relative to the larger side, on Σ.
    pub relative_residual: f64,
    /// Absolute sup residual on Σ.
    pub absolute_residual: f64,
    /// Sup norm of the left side.
    pub lhs_norm: f64,
    /// Relative residual of the full 3d statement `F_A = β(F_L,V) - κ∧∇Φ`.
    pub full_relative_residual: f64,
}

/// Compares `F_Ã` (from the reassembled 3d connection) with `β(F_L,V) - β(L, d_L V)`.
///
/// On Σ only the `dx∧dy` coefficient survives; the full 3d comparison
/// additionally checks the mixed legs against `-κ∧∇Φ`.
pub fn looped_curvature_identity(g: &SuN, f: &CaloronFields) -> Result<CurvatureIdentityReport> {
    let c = cal_inverse(f)?;
    let fa = curvature_3d(g, &c.a)?;
    let lc = looped_curvature(g, f)?;
    let bfv = lc.beta_f_v(&f.phi)?;
    // β(L, d_L V) = λ ∧ ∇Φ.
    let rhs_sigma = bfv.axpy(-1.0, &wedge_scalar(&f.lambda, &lc.nabla_phi)?)?;
    let rhs_full = bfv.axpy(-1.0, &wedge_scalar(c.kappa.form(), &lc.nabla_phi)?)?;

    let xy = |w: &FieldGrid| w.comp(0).to_vec();
    let (l0, r0) = (xy(&fa), xy(&rhs_sigma));
    let abs = l0.iter().zip(&r0).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let lhs_norm = l0.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let rhs_norm = r0.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = lhs_norm.max(rhs_norm).max(f64::MIN_POSITIVE);
    let full_abs = fa.distance(&rhs_full)?;
    let full_scale = fa.sup_norm().max(rhs_full.sup_norm()).max(f64::MIN_POSITIVE);
    Ok(CurvatureIdentityReport {
        relative_residual: abs / scale,
        absolute_residual: abs,
        lhs_norm,
        full_relative_residual: full_abs / full_scale,
    })
}

/// Central 1-form `α` of a lift: a periodic base 1-form plus an integer
/// twist `n` contributing `n dx∧dy` to `dα`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaField {
    /// Periodic, θ-independent part (a real 1-form without `dθ` leg).
    pub periodic: FieldGrid,
    /// Chern number of the twisting line bundle.
    pub twist: i64,
}

impl AlphaField {
    /// `α = 0`.
    pub fn zero(shape: Shape) -> Self {
        Self {
            periodic: FieldGrid::zeros(shape, 1, 1).with_base_only(true),
            twist: 0,
        }
    }

    /// `dα` as a real 2-form.
    pub fn d_alpha(&self) -> Result<FieldGrid> {
        let mut da = exterior_d_sigma(&self.periodic)?;
        let n = self.twist as f64;
        da.comps_mut()[0].iter_mut().for_each(|v| *v += n);
        Ok(da.with_base_only(true))
    }
}

/// Caloron fields together with the central component of a lifted connection.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedConnection {
    /// `(λ, Λ, Φ)`.
    pub fields: CaloronFields,
    /// Central connection component.
    pub alpha: AlphaField,
}

impl LiftedConnection {
    /// Lift with `α = 0`.
    pub fn untwisted(fields: CaloronFields) -> Self {
        let alpha = AlphaField::zero(fields.shape());
        Self { fields, alpha }
    }
}
