//! Finite-dimensional shadow of norm-squared localization: Duistermaat-Heckman
//! transforms of su(2) coadjoint orbits under the maximal torus, the
//! Gaussian pairing form of `Z_X(ε)`, and the double-Fourier form of the
//! pair integral `Z_{X,Y}`.
//!
//! Fourier conventions: one factor `1/2π` per pairing slot, and `f_ε` has
//! unit integral, so `Z_X(ε) = ∫ f_ε(ξ) DH_X(ξ) dξ` exactly.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// The orbit `S²_r` with the height moment map `μ = r cos ϑ` and
/// symplectic form `r dcosϑ ∧ dφ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianOrbit {
    /// Orbit radius.
    pub radius: f64,
}

/// Quadrature resolution on the sphere and on Fourier axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    /// Gauss-Legendre nodes in `cos ϑ`.
    pub sphere_nodes: usize,
    /// Midpoint nodes in the torus angle φ.
    pub angle_nodes: usize,
    /// Gauss-Legendre nodes on each Fourier axis.
    pub fourier_nodes: usize,
    /// Fourier cutoff is `cutoff_scale / r` on the slot of an orbit of radius `r`.
    pub cutoff_scale: f64,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            sphere_nodes: 96,
            angle_nodes: 8,
            fourier_nodes: 4096,
            cutoff_scale: 40.0,
        }
    }
}

impl QuadratureOptions {
    /// Same options with every node count doubled.
    pub fn doubled(&self) -> Self {
        Self {
            sphere_nodes: 2 * self.sphere_nodes,
            angle_nodes: 2 * self.angle_nodes,
            fourier_nodes: 2 * self.fourier_nodes,
            ..*self
        }
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration on the
/// three-term recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * pn - pn1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn scaled_rule(n: usize, half_width: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    (
        x.iter().map(|v| v * half_width).collect(),
        w.iter().map(|v| v * half_width).collect(),
    )
}

impl HamiltonianOrbit {
    /// Checks `r > 0`.
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Config(format!("orbit radius must be positive, got {radius}")));
        }
        Ok(Self { radius })
    }

    /// Closed-form symplectic volume `4πr`.
    pub fn symplectic_volume(&self) -> f64 {
        4.0 * PI * self.radius
    }

    /// `∫_X f(μ) ω` by product quadrature on the sphere.
    pub fn integrate<T>(&self, opts: &QuadratureOptions, f: impl Fn(f64) -> T) -> T
    where
        T: std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Default,
    {
        let (z, w) = gauss_legendre(opts.sphere_nodes);
        let dphi = 2.0 * PI / opts.angle_nodes as f64;
        let mut acc = T::default();
        for _ in 0..opts.angle_nodes {
            for (zi, wi) in z.iter().zip(&w) {
                acc = acc + f(self.radius * zi) * (wi * self.radius * dphi);
            }
        }
        acc
    }

    fn resolution_guard(&self, max_freq: f64, opts: &QuadratureOptions) -> Result<()> {
        let need = (self.radius * max_freq / 2.0).ceil() as usize + 16;
        if opts.sphere_nodes < need {
            return Err(Error::Quadrature(format!(
                "{} sphere nodes cannot resolve frequency {max_freq} on radius {} (need {need})",
                opts.sphere_nodes, self.radius
            )));
        }
        Ok(())
    }

    /// `DH_X(ξ) = ∫_X e^{iξμ} ω` at each sample.
    pub fn dh(&self, xis: &[f64], opts: &QuadratureOptions) -> Result<Vec<Complex64>> {
        let top = xis.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        self.resolution_guard(top, opts)?;
        Ok(xis
            .iter()
            .map(|&xi| self.integrate(opts, |mu| Complex64::from_polar(1.0, xi * mu)))
            .collect())
    }
}

/// A finite disjoint union of orbits.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitUnion(pub Vec<HamiltonianOrbit>);

impl OrbitUnion {
    /// `DH` of the union, the sum over components.
    pub fn dh(&self, xis: &[f64], opts: &QuadratureOptions) -> Result<Vec<Complex64>> {
        let mut out = vec![Complex64::new(0.0, 0.0); xis.len()];
        for o in &self.0 {
            for (acc, v) in out.iter_mut().zip(o.dh(xis, opts)?) {
                *acc += v;
            }
        }
        Ok(out)
    }
}

/// Unit-integral Gaussian `f_ε(ξ) = √(ε/2π) e^{-εξ²/2}`.
pub fn gaussian_f(eps: f64, xi: f64) -> f64 {
    (eps / (2.0 * PI)).sqrt() * (-0.5 * eps * xi * xi).exp()
}

/// Both evaluations of `Z_X(ε)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZNormSquared {
    /// `∫_X e^{-μ²/2ε} ω` by sphere quadrature.
    pub direct: f64,
    /// `(f_ε, DH_X)` on a truncated Fourier axis.
    pub pairing: f64,
}

impl ZNormSquared {
    /// `|direct - pairing| / |direct|`.
    pub fn relative_difference(&self) -> f64 {
        (self.direct - self.pairing).abs() / self.direct.abs()
    }
}

/// `Z_X(ε)` directly and through the Gaussian pairing form.
pub fn z_norm_squared(orbit: &HamiltonianOrbit, eps: f64, opts: &QuadratureOptions) -> Result<ZNormSquared> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::Config(format!("ε must be positive, got {eps}")));
    }
    let direct = orbit.integrate(opts, |mu| (-mu * mu / (2.0 * eps)).exp());
    // f_ε is negligible beyond 40/√ε; a narrower window keeps it resolved.
    let cutoff = (opts.cutoff_scale / orbit.radius).min(opts.cutoff_scale / eps.sqrt());
    let (xs, ws) = scaled_rule(opts.fourier_nodes, cutoff);
    let dh = orbit.dh(&xs, opts)?;
    let pairing = xs
        .iter()
        .zip(&ws)
        .zip(&dh)
        .map(|((x, w), d)| w * gaussian_f(eps, *x) * d.re)
        .sum();
    Ok(ZNormSquared { direct, pairing })
}

/// Both evaluations of `Z_{X,Y} = ∫_{X×Y} e^{iμ_Xμ_Y} ω_X ω_Y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZPair {
    /// Product sphere quadrature.
    pub direct: Complex64,
    /// `∫∫ dη dξ/2π e^{-iηξ} DH_X(η) DH_Y(ξ)` with cutoffs `40/r` per slot.
    pub factorized: Complex64,
}

impl ZPair {
    /// `|direct - factorized| / |direct|`.
    pub fn relative_difference(&self) -> f64 {
        (self.direct - self.factorized).norm() / self.direct.norm()
    }
}

/// `Z_{X,Y}` directly and through the double-Fourier factorization.
pub fn z_pair(x: &HamiltonianOrbit, y: &HamiltonianOrbit, opts: &QuadratureOptions) -> Result<ZPair> {
    let direct = x.integrate(opts, |mx| {
        y.integrate(opts, |my| Complex64::from_polar(1.0, mx * my))
    });
    let (eta, weta) = scaled_rule(opts.fourier_nodes, opts.cutoff_scale / x.radius);
    let (xi, wxi) = scaled_rule(opts.fourier_nodes, opts.cutoff_scale / y.radius);
    let dx = x.dh(&eta, opts)?;
    let dy = y.dh(&xi, opts)?;
    let right: Vec<Complex64> = dy.iter().zip(&wxi).map(|(d, w)| d * *w).collect();
    let mut factorized = Complex64::new(0.0, 0.0);
    for ((e, we), de) in eta.iter().zip(&weta).zip(&dx) {
        let inner: Complex64 = xi
            .iter()
            .zip(&right)
            .map(|(s, r)| Complex64::from_polar(1.0, -e * s) * r)
            .sum();
        factorized += de * *we * inner;
    }
    Ok(ZPair {
        direct,
        factorized: factorized / (2.0 * PI),
    })
}

/// Pushforward density `ρ(t) = ∫ dξ/2π e^{-iξt} DH_X(ξ)` on a truncated axis.
pub fn pushforward_density(orbit: &HamiltonianOrbit, ts: &[f64], opts: &QuadratureOptions) -> Result<Vec<f64>> {
    let (xs, ws) = scaled_rule(opts.fourier_nodes, opts.cutoff_scale / orbit.radius);
    let dh = orbit.dh(&xs, opts)?;
    Ok(ts
        .iter()
        .map(|t| {
            xs.iter()
                .zip(&ws)
                .zip(&dh)
                .map(|((x, w), d)| w * (Complex64::from_polar(1.0, -x * t) * d).re)
                .sum::<f64>()
                / (2.0 * PI)
        })
        .collect())
}

/// Length of `{t : ρ(t) > ½ max ρ}` on a uniform sample grid.
pub fn support_width(ts: &[f64], rho: &[f64]) -> f64 {
    let top = rho.iter().fold(0.0f64, |m, v| m.max(*v));
    let h = if ts.len() > 1 { ts[1] - ts[0] } else { 0.0 };
    rho.iter().filter(|v| **v > 0.5 * top).count() as f64 * h
}

/// Writes `xi,re,im` rows.
pub fn write_dh_csv<W: Write>(out: &mut W, xis: &[f64], dh: &[Complex64]) -> Result<()> {
    writeln!(out, "xi,re,im")?;
    for (x, d) in xis.iter().zip(dh) {
        writeln!(out, "{x:.17e},{:.17e},{:.17e}", d.re, d.im)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in [1, 2, 5, 64, 4096] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-12, "n={n}");
            let deg = (2 * n - 1).min(40) as i32;
            let exact = if deg % 2 == 0 { 2.0 / (deg as f64 + 1.0) } else { 0.0 };
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg)).sum();
            assert!((q - exact).abs() < 1e-12, "n={n} {q} {exact}");
        }
    }

    #[test]
    fn dh_at_zero_is_volume() {
        let o = HamiltonianOrbit::new(1.7).unwrap();
        let v = o.dh(&[0.0], &QuadratureOptions::default()).unwrap()[0];
        assert!((v.re - o.symplectic_volume()).abs() < 1e-12);
        assert!(v.im.abs() < 1e-12);
    }

    #[test]
    fn guard_rejects_coarse_sphere_rule() {
        let o = HamiltonianOrbit::new(1.0).unwrap();
        let opts = QuadratureOptions { sphere_nodes: 8, ..Default::default() };
        assert!(matches!(o.dh(&[100.0], &opts), Err(Error::Quadrature(_))));
        assert!(HamiltonianOrbit::new(-1.0).is_err());
    }
}
