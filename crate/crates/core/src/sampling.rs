//! Seeded random band-limited fields on `M_d`.

use std::f64::consts::PI;

use rand::Rng;

use crate::manifold::{from_frame, FieldGrid, Shape};

/// Parameters for random field generation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSampler {
    /// Largest Fourier mode in y and θ (and x on the torus).
    pub max_mode: usize,
    /// Number of random plane-wave or packet terms per scalar.
    pub terms: usize,
    /// Overall amplitude.
    pub amplitude: f64,
    /// Width of the x-packets used on twisted bundles.
    pub width: f64,
}

impl Default for FieldSampler {
    fn default() -> Self {
        Self {
            max_mode: 2,
            terms: 4,
            amplitude: 0.5,
            width: 0.3,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Term {
    mx: i64,
    my: i64,
    mt: i64,
    x0: f64,
    phase: f64,
    amp: f64,
}

impl FieldSampler {
    /// Largest mode that keeps one product alias-free on an `n`-point axis.
    pub fn safe_mode(n: usize) -> usize {
        (n / 6).max(1)
    }

    fn draw_terms<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Vec<Term> {
        let m = self.max_mode as i64;
        (0..count)
            .map(|_| Term {
                mx: rng.random_range(-m..=m),
                my: rng.random_range(-m..=m),
                mt: rng.random_range(-m..=m),
                x0: rng.random_range(0.0..1.0),
                phase: rng.random_range(0.0..2.0 * PI),
                amp: self.amplitude * rng.random_range(-1.0..1.0) / (count as f64).sqrt(),
            })
            .collect()
    }

    fn eval(&self, t: &Term, degree: i64, x: f64, y: f64, th: f64) -> f64 {
        if degree == 0 {
            let arg = 2.0 * PI * (t.mx as f64 * x + t.my as f64 * y + t.mt as f64 * th) + t.phase;
            return t.amp * arg.cos();
        }
        // f(x, y, θ) = Σ_j g(x - j, y, θ + d j y) satisfies f(x+1, y, θ) = f(x, y, θ + d y).
        let d = degree as f64;
        let s2 = 2.0 * self.width * self.width;
        let mut acc = 0.0;
        for j in -5i64..=5 {
            let u = x - j as f64 - t.x0;
            let env = (-u * u / s2).exp();
            if env < 1e-18 {
                continue;
            }
            let tj = th + d * j as f64 * y;
            let arg = 2.0 * PI * (t.my as f64 * y + t.mt as f64 * tj) + t.phase;
            acc += env * arg.cos();
        }
        t.amp * acc
    }

    /// Random twisted-periodic scalar field with `vdim` independent slots.
    pub fn scalar<R: Rng + ?Sized>(&self, rng: &mut R, shape: Shape, vdim: usize) -> FieldGrid {
        self.scalar_masked(rng, shape, vdim, true)
    }

    /// Random θ-independent scalar field (a field on the base).
    pub fn base_scalar<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        shape: Shape,
        vdim: usize,
    ) -> FieldGrid {
        self.scalar_masked(rng, shape, vdim, false).with_base_only(true)
    }

    fn scalar_masked<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        shape: Shape,
        vdim: usize,
        fiber: bool,
    ) -> FieldGrid {
        let mut terms: Vec<Vec<Term>> = (0..vdim).map(|_| self.draw_terms(rng, self.terms)).collect();
        if !fiber {
            terms.iter_mut().flatten().for_each(|t| t.mt = 0);
        }
        FieldGrid::from_fn(shape, 0, vdim, |x, y, th, c| {
            for (a, ts) in terms.iter().enumerate() {
                c[0][a] = ts.iter().map(|t| self.eval(t, shape.degree, x, y, th)).sum();
            }
        })
    }

    /// Random `p`-form whose adapted-coframe coefficients are random scalars.
    /// `slots[c] = false` leaves adapted component `c` at zero.
    pub fn form<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        shape: Shape,
        p: usize,
        vdim: usize,
        slots: &[bool],
    ) -> FieldGrid {
        let ncomp = crate::manifold::components(p).len();
        let comps = (0..ncomp)
            .map(|c| {
                if slots.get(c).copied().unwrap_or(true) {
                    self.scalar(rng, shape, vdim).comps()[0].clone()
                } else {
                    vec![0.0; shape.npts() * vdim]
                }
            })
            .collect();
        let frame = FieldGrid::from_components(shape, p, vdim, comps).expect("consistent layout");
        from_frame(frame)
    }

    /// Random Lie-valued 1-form (all adapted components populated).
    pub fn one_form<R: Rng + ?Sized>(&self, rng: &mut R, shape: Shape, vdim: usize) -> FieldGrid {
        self.form(rng, shape, 1, vdim, &[true, true, true])
    }

    /// Random horizontal 1-form (no κ component).
    pub fn horizontal_one_form<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        shape: Shape,
        vdim: usize,
    ) -> FieldGrid {
        self.form(rng, shape, 1, vdim, &[true, true, false])
    }
}
