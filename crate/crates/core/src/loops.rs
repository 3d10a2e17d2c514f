//! Loop algebra, the rotation-extended algebra `t_R + Lg` and the level-k
//! affine algebra `t_R + Lg + t_c`.
//!
//! Loops are sampled on a uniform grid of the period-1 circle. The loop
//! derivative entering every bracket and cocycle is the rotation generator
//! `D = -d/dθ`; the loop pairing is the normalized fiber average of the
//! su(n) pairing. Level-k central terms carry the weight [`level_weight`].

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::lie::{CMat, SuN};
use crate::spectral;

/// Weight of the unit level relative to the loop pairing: `1/(8π²)`.
pub const LEVEL_NORM: f64 = 1.0 / (8.0 * PI * PI);

/// Weight `k/(8π²)` multiplying every level-k central term.
pub fn level_weight(k: i64) -> f64 {
    k as f64 * LEVEL_NORM
}

/// Loop in su(n), stored as coordinates `data[l * dim + a]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopElement {
    n_theta: usize,
    dim: usize,
    data: Vec<f64>,
}

impl LoopElement {
    /// Zero loop.
    pub fn zeros(n_theta: usize, dim: usize) -> Self {
        Self {
            n_theta,
            dim,
            data: vec![0.0; n_theta * dim],
        }
    }

    /// Wraps raw coordinates.
    pub fn from_data(n_theta: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n_theta * dim {
            return Err(Error::Shape(format!(
                "loop data length {} != {n_theta} x {dim}",
                data.len()
            )));
        }
        Ok(Self {
            n_theta,
            dim,
            data,
        })
    }

    /// Samples `f(θ)` at `θ_l = l / n_theta`.
    pub fn from_fn(n_theta: usize, dim: usize, f: impl Fn(f64) -> Vec<f64>) -> Self {
        let mut data = Vec::with_capacity(n_theta * dim);
        for l in 0..n_theta {
            let v = f(l as f64 / n_theta as f64);
            assert_eq!(v.len(), dim, "sample dimension");
            data.extend(v);
        }
        Self {
            n_theta,
            dim,
            data,
        }
    }

    /// Constant loop.
    pub fn constant(n_theta: usize, x: &[f64]) -> Self {
        Self::from_fn(n_theta, x.len(), |_| x.to_vec())
    }

    /// Random real trigonometric loop with modes `|m| <= max_mode`.
    pub fn random<R: Rng + ?Sized>(
        rng: &mut R,
        n_theta: usize,
        dim: usize,
        max_mode: usize,
        amplitude: f64,
    ) -> Self {
        let mut coeffs = Vec::new();
        for _ in 0..dim {
            let mut per = Vec::new();
            for _ in 0..=max_mode {
                per.push((
                    rng.random_range(-1.0..1.0) * amplitude,
                    rng.random_range(-1.0..1.0) * amplitude,
                ));
            }
            coeffs.push(per);
        }
        Self::from_fn(n_theta, dim, |t| {
            coeffs
                .iter()
                .map(|per| {
                    per.iter()
                        .enumerate()
                        .map(|(m, (a, b))| {
                            let w = 2.0 * PI * m as f64 * t;
                            if m == 0 {
                                *a
                            } else {
                                a * w.cos() + b * w.sin()
                            }
                        })
                        .sum()
                })
                .collect()
        })
    }

    /// Number of θ samples.
    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    /// Coordinate dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Raw coordinates.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Mutable raw coordinates.
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Coordinates at sample `l`.
    pub fn sample(&self, l: usize) -> &[f64] {
        &self.data[l * self.dim..(l + 1) * self.dim]
    }

    /// `d/dθ` computed spectrally.
    pub fn theta_derivative(&self) -> Self {
        let p = spectral::plans(self.n_theta);
        let mut out = vec![0.0; self.data.len()];
        let mut scratch = Vec::with_capacity(self.n_theta);
        for a in 0..self.dim {
            spectral::diff_real_strided(&p, &self.data, &mut out, a, self.dim, &mut scratch);
        }
        Self {
            data: out,
            ..*self
        }
    }

    /// Rotation generator `D = -d/dθ`.
    pub fn rotation_derivative(&self) -> Self {
        self.theta_derivative().scaled(-1.0)
    }

    /// `c * self`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            data: self.data.iter().map(|v| c * v).collect(),
            ..*self
        }
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: f64, other: &Self) -> Result<Self> {
        check_grid(self, other)?;
        Ok(Self {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + c * b)
                .collect(),
            ..*self
        })
    }

    /// Pointwise bracket.
    pub fn bracket(&self, g: &SuN, other: &Self) -> Result<Self> {
        check_grid(self, other)?;
        let mut out = vec![0.0; self.data.len()];
        let d = self.dim;
        for l in 0..self.n_theta {
            let r = l * d..(l + 1) * d;
            g.bracket_acc(&self.data[r.clone()], &other.data[r.clone()], 1.0, &mut out[r]);
        }
        Ok(Self { data: out, ..*self })
    }

    /// Pointwise `γ ξ γ^-1`.
    pub fn conjugated(&self, g: &SuN, gamma: &[CMat]) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for (l, h) in gamma.iter().enumerate() {
            data.extend(g.adjoint_coords(h, self.sample(l)));
        }
        Self { data, ..*self }
    }

    /// Largest coordinate magnitude.
    pub fn sup_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest Fourier coefficient above `cutoff` over all coordinates.
    pub fn band_tail(&self, cutoff: usize) -> f64 {
        let p = spectral::plans(self.n_theta);
        let mut worst: f64 = 0.0;
        for a in 0..self.dim {
            let mut buf: Vec<Complex64> = (0..self.n_theta)
                .map(|l| Complex64::new(self.data[l * self.dim + a], 0.0))
                .collect();
            worst = worst.max(p.tail(&mut buf, cutoff));
        }
        worst
    }
}

fn check_grid(a: &LoopElement, b: &LoopElement) -> Result<()> {
    if a.n_theta != b.n_theta || a.dim != b.dim {
        Err(Error::GridMismatch(format!(
            "loops on {}x{} and {}x{}",
            a.n_theta, a.dim, b.n_theta, b.dim
        )))
    } else {
        Ok(())
    }
}

/// Normalized fiber average `<<ξ₁, ξ₂>>`.
pub fn loop_pair(a: &LoopElement, b: &LoopElement) -> Result<f64> {
    check_grid(a, b)?;
    let s: f64 = a.data.iter().zip(&b.data).map(|(x, y)| x * y).sum();
    Ok(s / a.n_theta as f64)
}

/// Element `(x, ξ)` of `t_R + Lg`.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckVector {
    /// Rotation component.
    pub x: f64,
    /// Loop component.
    pub xi: LoopElement,
}

/// Element `(x, ξ, y)` of the affine algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineVector {
    /// Rotation component.
    pub x: f64,
    /// Loop component.
    pub xi: LoopElement,
    /// Central component.
    pub y: f64,
}

impl AffineVector {
    /// The rotation generator `d = (1, 0, 0)`.
    pub fn d(n_theta: usize, dim: usize) -> Self {
        Self {
            x: 1.0,
            xi: LoopElement::zeros(n_theta, dim),
            y: 0.0,
        }
    }

    /// The central generator `c = (0, 0, 1)`.
    pub fn c(n_theta: usize, dim: usize) -> Self {
        Self {
            x: 0.0,
            xi: LoopElement::zeros(n_theta, dim),
            y: 1.0,
        }
    }

    /// Drops the central component.
    pub fn check_part(&self) -> CheckVector {
        CheckVector {
            x: self.x,
            xi: self.xi.clone(),
        }
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: f64, other: &Self) -> Result<Self> {
        Ok(Self {
            x: self.x + c * other.x,
            xi: self.xi.axpy(c, &other.xi)?,
            y: self.y + c * other.y,
        })
    }

    /// Largest component magnitude.
    pub fn sup_norm(&self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.xi.sup_norm())
    }
}

impl CheckVector {
    /// Lift with zero central component.
    pub fn lift(&self) -> AffineVector {
        AffineVector {
            x: self.x,
            xi: self.xi.clone(),
            y: 0.0,
        }
    }

    /// Largest component magnitude.
    pub fn sup_norm(&self) -> f64 {
        self.x.abs().max(self.xi.sup_norm())
    }
}

/// Loop part `[ξ₁,ξ₂] + x₁Dξ₂ - x₂Dξ₁` shared by both brackets.
fn loop_part(g: &SuN, x1: f64, xi1: &LoopElement, x2: f64, xi2: &LoopElement) -> Result<LoopElement> {
    let mut out = xi1.bracket(g, xi2)?;
    if x1 != 0.0 {
        out = out.axpy(x1, &xi2.rotation_derivative())?;
    }
    if x2 != 0.0 {
        out = out.axpy(-x2, &xi1.rotation_derivative())?;
    }
    Ok(out)
}

/// Bracket of `t_R + Lg`.
pub fn check_bracket(g: &SuN, u: &CheckVector, v: &CheckVector) -> Result<CheckVector> {
    Ok(CheckVector {
        x: 0.0,
        xi: loop_part(g, u.x, &u.xi, v.x, &v.xi)?,
    })
}

/// Affine bracket at level `k`.
pub fn affine_bracket(g: &SuN, u: &AffineVector, v: &AffineVector, k: i64) -> Result<AffineVector> {
    let xi = loop_part(g, u.x, &u.xi, v.x, &v.xi)?;
    let y = level_weight(k) * loop_pair(&u.xi, &v.xi.rotation_derivative())?;
    Ok(AffineVector { x: 0.0, xi, y })
}

/// Affine pairing at level `k`: `w_k <<ξ₁,ξ₂>> - x₁y₂ - x₂y₁`.
pub fn affine_pair(u: &AffineVector, v: &AffineVector, k: i64) -> Result<f64> {
    Ok(level_weight(k) * loop_pair(&u.xi, &v.xi)? - u.x * v.y - v.x * u.y)
}

/// Higgs value `(1, -Φ, (w_k/2)<<Φ,Φ>>)` on the orbit of `d`.
pub fn higgs(phi: &LoopElement, k: i64) -> AffineVector {
    let pp = loop_pair(phi, phi).expect("same grid");
    AffineVector {
        x: 1.0,
        xi: phi.scaled(-1.0),
        y: 0.5 * level_weight(k) * pp,
    }
}

/// `β((t,X),(s,Y)) = (0, sX - tY)`.
pub fn beta_map(u: &CheckVector, v: &CheckVector) -> Result<CheckVector> {
    Ok(CheckVector {
        x: 0.0,
        xi: u.xi.scaled(v.x).axpy(-u.x, &v.xi)?,
    })
}

/// Loop in SU(n) with its left logarithmic derivative `γ^-1 Dγ`.
#[derive(Debug, Clone)]
pub struct LoopGroupElement {
    samples: Vec<CMat>,
    log_derivative: LoopElement,
    winding: i64,
}

impl LoopGroupElement {
    /// Constant loop at `h`.
    pub fn constant(g: &SuN, h: &CMat, n_theta: usize) -> Self {
        Self {
            samples: vec![h.clone(); n_theta],
            log_derivative: LoopElement::zeros(n_theta, g.dim()),
            winding: 0,
        }
    }

    /// `θ ↦ exp(η(θ))`; the log derivative comes from the series
    /// `Σ_j (-1)^j/(j+1)! ad_η^j (Dη)`.
    pub fn from_exp(g: &SuN, eta: &LoopElement) -> Self {
        let d_eta = eta.rotation_derivative();
        let dim = g.dim();
        let mut samples = Vec::with_capacity(eta.n_theta());
        let mut logd = Vec::with_capacity(eta.data().len());
        for l in 0..eta.n_theta() {
            let e = eta.sample(l);
            samples.push(g.exp_coords(e).0);
            let mut term = d_eta.sample(l).to_vec();
            let mut acc = term.clone();
            for j in 1..200 {
                let mut next = vec![0.0; dim];
                g.bracket_acc(e, &term, -1.0 / (j + 1) as f64, &mut next);
                term = next;
                let size = term.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
                for (a, t) in acc.iter_mut().zip(&term) {
                    *a += t;
                }
                if size < 1e-18 {
                    break;
                }
            }
            logd.extend(acc);
        }
        Self {
            samples,
            log_derivative: LoopElement::from_data(eta.n_theta(), dim, logd).expect("shape"),
            winding: 0,
        }
    }

    /// Loop from samples; the log derivative is computed by spectral
    /// differentiation of the matrix entries.
    pub fn from_samples(g: &SuN, samples: Vec<CMat>, winding: i64) -> Self {
        let n = samples.len();
        let r = g.rank();
        let p = spectral::plans(n);
        let mut deriv = vec![CMat::zeros(r, r); n];
        let mut buf = Vec::with_capacity(n);
        for i in 0..r {
            for j in 0..r {
                buf.clear();
                buf.extend(samples.iter().map(|s| s[(i, j)]));
                p.diff(&mut buf);
                for (l, v) in buf.iter().enumerate() {
                    deriv[l][(i, j)] = -v / n as f64;
                }
            }
        }
        let mut logd = Vec::with_capacity(n * g.dim());
        for (s, ds) in samples.iter().zip(&deriv) {
            logd.extend(g.coords(&(s.adjoint() * ds)));
        }
        Self {
            samples,
            log_derivative: LoopElement::from_data(n, g.dim(), logd).expect("shape"),
            winding,
        }
    }

    /// Group samples.
    pub fn samples(&self) -> &[CMat] {
        &self.samples
    }

    /// Number of samples.
    pub fn n_theta(&self) -> usize {
        self.samples.len()
    }

    /// Homotopy label supplied at construction.
    pub fn winding(&self) -> i64 {
        self.winding
    }

    /// Left log derivative `γ^-1 Dγ`.
    pub fn log_derivative(&self) -> &LoopElement {
        &self.log_derivative
    }

    /// Right log derivative `(Dγ) γ^-1 = Ad_γ(γ^-1 Dγ)`.
    pub fn right_log_derivative(&self, g: &SuN) -> LoopElement {
        self.log_derivative.conjugated(g, &self.samples)
    }

    /// Pointwise product `γ₁γ₂`.
    pub fn mul(&self, g: &SuN, other: &Self) -> Result<Self> {
        if self.n_theta() != other.n_theta() {
            return Err(Error::GridMismatch("loop group sizes differ".into()));
        }
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a * b)
            .collect();
        let inv_other: Vec<CMat> = other.samples.iter().map(|s| s.adjoint()).collect();
        let log_derivative = self
            .log_derivative
            .conjugated(g, &inv_other)
            .axpy(1.0, &other.log_derivative)?;
        Ok(Self {
            samples,
            log_derivative,
            winding: self.winding + other.winding,
        })
    }

    /// Pointwise inverse.
    pub fn inverse(&self, g: &SuN) -> Self {
        Self {
            samples: self.samples.iter().map(|s| s.adjoint()).collect(),
            log_derivative: self.right_log_derivative(g).scaled(-1.0),
            winding: -self.winding,
        }
    }
}

/// Adjoint action on `t_R + Lg`: `(x, Ad_γξ - x (Dγ)γ^-1)`.
pub fn check_adjoint(g: &SuN, gamma: &LoopGroupElement, u: &CheckVector) -> Result<CheckVector> {
    if gamma.n_theta() != u.xi.n_theta() {
        return Err(Error::GridMismatch("loop group and loop sizes differ".into()));
    }
    let xi = u
        .xi
        .conjugated(g, gamma.samples())
        .axpy(-u.x, &gamma.right_log_derivative(g))?;
    Ok(CheckVector { x: u.x, xi })
}

/// Affine adjoint action at level `k`.
pub fn affine_adjoint(g: &SuN, gamma: &LoopGroupElement, v: &AffineVector, k: i64) -> Result<AffineVector> {
    let c = check_adjoint(g, gamma, &v.check_part())?;
    let ell = gamma.log_derivative();
    let w = level_weight(k);
    let y = v.y - w * loop_pair(ell, &v.xi)? + 0.5 * w * v.x * loop_pair(ell, ell)?;
    Ok(AffineVector { x: c.x, xi: c.xi, y })
}

/// Group cocycle `σ(γ,(x,ξ)) = w_k <<-ξ + ½ x γ^-1Dγ, γ^-1Dγ>>`.
pub fn group_cocycle_sigma(gamma: &LoopGroupElement, u: &CheckVector, k: i64) -> Result<f64> {
    let ell = gamma.log_derivative();
    let arg = u.xi.scaled(-1.0).axpy(0.5 * u.x, ell)?;
    Ok(level_weight(k) * loop_pair(&arg, ell)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn t(a: usize) -> Vec<f64> {
        let mut v = vec![0.0; 3];
        v[a] = 1.0;
        v
    }

    fn trig(n: usize, a: usize, f: fn(f64) -> f64) -> LoopElement {
        LoopElement::from_fn(n, 3, move |th| {
            let mut v = t(a);
            v[a] = f(2.0 * PI * th);
            v
        })
    }

    #[test]
    fn loop_pair_examples() {
        let c1 = trig(32, 0, f64::cos);
        let c2 = trig(32, 1, f64::cos);
        assert!((loop_pair(&c1, &c1).unwrap() - 0.5).abs() < 1e-15);
        assert!(loop_pair(&c1, &c2).unwrap().abs() < 1e-15);
        assert_eq!(loop_pair(&c1, &LoopElement::zeros(32, 3)).unwrap(), 0.0);
        assert!(loop_pair(&c1, &LoopElement::zeros(16, 3)).is_err());
    }

    #[test]
    fn bracket_examples() {
        let g = SuN::new(2).unwrap();
        let n = 32;
        let s1 = trig(n, 0, f64::sin);
        let c1 = trig(n, 0, f64::cos);
        let u = AffineVector { x: 1.0, xi: LoopElement::zeros(n, 3), y: 0.0 };
        let v = AffineVector { x: 0.0, xi: s1.clone(), y: 0.0 };
        let r = affine_bracket(&g, &u, &v, 1).unwrap();
        // D sin(2πθ) = -2π cos(2πθ).
        let expect = c1.scaled(-2.0 * PI);
        assert!(r.xi.axpy(-1.0, &expect).unwrap().sup_norm() < 1e-12);
        assert_eq!(r.x, 0.0);
        assert!(r.y.abs() < 1e-15);

        let a = AffineVector { x: 0.0, xi: c1.clone(), y: 0.0 };
        let r = affine_bracket(&g, &a, &v, 2).unwrap();
        assert!(r.xi.sup_norm() < 1e-15);
        // w_2 <<cos, D sin>> = w_2 (-2π)(1/2).
        assert!((r.y - level_weight(2) * (-PI)).abs() < 1e-14);

        let c = AffineVector::c(n, 3);
        let r = affine_bracket(&g, &c, &a, 3).unwrap();
        assert_eq!(r.sup_norm(), 0.0);
    }

    #[test]
    fn pairing_examples() {
        let n = 16;
        let d = AffineVector::d(n, 3);
        let c = AffineVector::c(n, 3);
        assert_eq!(affine_pair(&d, &c, 1).unwrap(), -1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let phi = LoopElement::random(&mut rng, n, 3, 2, 1.0);
        for k in 1..=3 {
            let v = higgs(&phi, k);
            assert!(affine_pair(&v, &v, k).unwrap().abs() < 1e-15);
            assert_eq!(affine_pair(&v, &c, k).unwrap(), -1.0);
        }
    }

    #[test]
    fn adjoint_of_winding_torus_loop() {
        // γ(θ) = exp(4πθ t₃) is a closed loop; γ^-1 Dγ = -4π t₃.
        let g = SuN::new(2).unwrap();
        let n = 32;
        let samples: Vec<CMat> = (0..n)
            .map(|l| g.exp_coords(&[0.0, 0.0, 4.0 * PI * l as f64 / n as f64]).0)
            .collect();
        let gamma = LoopGroupElement::from_samples(&g, samples, 0);
        let ell = LoopElement::constant(n, &[0.0, 0.0, -4.0 * PI]);
        assert!(gamma.log_derivative().axpy(-1.0, &ell).unwrap().sup_norm() < 1e-11);
        for k in 1..=3 {
            let r = affine_adjoint(&g, &gamma, &AffineVector::d(n, 3), k).unwrap();
            let expect_xi = LoopElement::constant(n, &[0.0, 0.0, 4.0 * PI]);
            assert_eq!(r.x, 1.0);
            assert!(r.xi.axpy(-1.0, &expect_xi).unwrap().sup_norm() < 1e-11);
            let expect_y = 0.5 * level_weight(k) * 16.0 * PI * PI;
            assert!((r.y - expect_y).abs() < 1e-11);
            let s = group_cocycle_sigma(
                &gamma,
                &CheckVector { x: 1.0, xi: LoopElement::zeros(n, 3) },
                k,
            )
            .unwrap();
            assert!((s - expect_y).abs() < 1e-11);
        }
    }

    #[test]
    fn constant_loop_adjoint_is_pointwise() {
        let g = SuN::new(2).unwrap();
        let n = 16;
        let h = g.exp_coords(&[0.3, -0.7, 1.1]).0;
        let gamma = LoopGroupElement::constant(&g, &h, n);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let xi = LoopElement::random(&mut rng, n, 3, 2, 1.0);
        let v = AffineVector { x: 0.0, xi: xi.clone(), y: 0.0 };
        let r = affine_adjoint(&g, &gamma, &v, 2).unwrap();
        let expect = xi.conjugated(&g, gamma.samples());
        assert!(r.xi.axpy(-1.0, &expect).unwrap().sup_norm() < 1e-14);
        assert_eq!(r.y, 0.0);
        let c = affine_adjoint(&g, &gamma, &AffineVector::c(n, 3), 2).unwrap();
        assert_eq!(c, AffineVector::c(n, 3));
    }

    #[test]
    fn beta_examples() {
        let n = 16;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let eta = LoopElement::random(&mut rng, n, 3, 2, 1.0);
        let phi = LoopElement::random(&mut rng, n, 3, 2, 1.0);
        let lam = 0.37;
        let big = LoopElement::random(&mut rng, n, 3, 2, 1.0);
        let v = CheckVector { x: 1.0, xi: phi.scaled(-1.0) };
        let r = beta_map(&CheckVector { x: 0.0, xi: eta.clone() }, &v).unwrap();
        assert_eq!(r.xi, eta);
        let z = beta_map(
            &CheckVector { x: 1.0, xi: LoopElement::zeros(n, 3) },
            &CheckVector { x: 1.0, xi: LoopElement::zeros(n, 3) },
        )
        .unwrap();
        assert_eq!(z.sup_norm(), 0.0);
        let r = beta_map(&CheckVector { x: lam, xi: big.clone() }, &v).unwrap();
        let expect = big.axpy(lam, &phi).unwrap();
        assert!(r.xi.axpy(-1.0, &expect).unwrap().sup_norm() < 1e-15);
    }
}
