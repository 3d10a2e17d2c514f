//! Registered verification checks, grouped by suite.
//!
//! Checks on the torus chart always run; `twisted` checks use the configured
//! bundle degree. Level-dependent checks run once per level `1..=k`. A few
//! checks pin their own resolution (winding maps at 64³, the flow and the
//! moment-map ratio at 24³, fiber loops at 64 samples); the pinned grid is
//! echoed in each report.

use std::f64::consts::PI;
use std::fmt;
use std::rc::Rc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::caloron::{cal_forward, cal_inverse, looped_curvature_identity, AlphaField, CaloronFields, Connection3d, LiftedConnection};
use crate::error::{Error, Result};
use crate::functionals::*;
use crate::gauge::*;
use crate::gerbe::{self, heisenberg, SplittingSigma};
use crate::lie::{ad_series, SuN};
use crate::localization::*;
use crate::loops::*;
use crate::manifold::*;
use crate::sampling::FieldSampler;

/// Settings shared by all checks of a run.
#[derive(Debug, Clone)]
pub struct Context {
    pub g: SuN,
    pub su2: SuN,
    pub torus: Shape,
    pub twisted: Shape,
    pub levels: Vec<i64>,
}

impl Context {
    /// Builds the context from a validated geometry.
    pub fn new(geo: &GeometrySpec) -> Result<Self> {
        let twisted = geo.shape();
        let torus = Shape { degree: 0, ..twisted };
        torus.validate()?;
        twisted.validate()?;
        Ok(Self {
            g: SuN::new(geo.group_rank)?,
            su2: SuN::new(2)?,
            torus,
            twisted,
            levels: (1..=geo.level).collect(),
        })
    }

    fn nt(&self) -> usize {
        self.torus.nt
    }

    fn echo(&self, s: Shape, level: Option<i64>, instances: usize) -> CheckEcho {
        CheckEcho {
            grid: [s.nx, s.ny, s.nt],
            degree: s.degree,
            level,
            rank: self.g.rank(),
            instances,
        }
    }

    fn echo_su2(&self, s: Shape, level: Option<i64>, instances: usize) -> CheckEcho {
        CheckEcho { rank: 2, ..self.echo(s, level, instances) }
    }
}

/// Parameters a check actually ran with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CheckEcho {
    pub grid: [usize; 3],
    pub degree: i64,
    pub level: Option<i64>,
    pub rank: usize,
    pub instances: usize,
}

type Runner = Box<dyn Fn(&mut ChaCha8Rng) -> Result<f64>>;

/// A registered check: an error norm producer with its tolerance.
pub struct Check {
    pub id: String,
    pub anchor: &'static str,
    pub tolerance: f64,
    pub echo: CheckEcho,
    runner: Runner,
}

impl Check {
    /// Evaluates the error norm.
    pub fn run(&self, rng: &mut ChaCha8Rng) -> Result<f64> {
        (self.runner)(rng)
    }
}

impl fmt::Debug for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Check")
            .field("id", &self.id)
            .field("tolerance", &self.tolerance)
            .finish_non_exhaustive()
    }
}

struct Registry {
    ctx: Rc<Context>,
    out: Vec<Check>,
}

impl Registry {
    fn add(
        &mut self,
        id: impl Into<String>,
        anchor: &'static str,
        tolerance: f64,
        echo: CheckEcho,
        f: impl Fn(&Context, &mut ChaCha8Rng) -> Result<f64> + 'static,
    ) {
        let ctx = Rc::clone(&self.ctx);
        self.out.push(Check {
            id: id.into(),
            anchor,
            tolerance,
            echo,
            runner: Box::new(move |r| f(&ctx, r)),
        });
    }
}

/// Checks of one suite.
pub fn register(suite: &str, ctx: &Context) -> Result<Vec<Check>> {
    let mut reg = Registry { ctx: Rc::new(ctx.clone()), out: Vec::new() };
    match suite {
        "algebra" => algebra(&mut reg),
        "manifold" => manifold(&mut reg),
        "caloron" => caloron(&mut reg),
        "functionals" => functionals(&mut reg),
        "gauge" => gauge(&mut reg),
        "gerbe" => gerbe_suite(&mut reg),
        "localization" => localization(&mut reg),
        other => return Err(Error::Config(format!("unknown suite {other:?}"))),
    }
    Ok(reg.out)
}

fn max_over(n: usize, mut f: impl FnMut() -> Result<f64>) -> Result<f64> {
    let mut m = 0.0f64;
    for _ in 0..n {
        let e = f()?;
        if e.is_nan() {
            return Ok(f64::NAN);
        }
        m = m.max(e);
    }
    Ok(m)
}

fn coords(r: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| r.random_range(-1.0..1.0)).collect()
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

fn add3(a: Vec<f64>, b: Vec<f64>, c: Vec<f64>) -> Vec<f64> {
    a.iter().zip(&b).zip(&c).map(|((x, y), z)| x + y + z).collect()
}

fn loop_mode(nt: usize) -> usize {
    FieldSampler::safe_mode(nt).min(3)
}

fn rloop(ctx: &Context, r: &mut ChaCha8Rng) -> LoopElement {
    LoopElement::random(r, ctx.nt(), ctx.g.dim(), loop_mode(ctx.nt()), 0.7)
}

fn rcheck(ctx: &Context, r: &mut ChaCha8Rng) -> CheckVector {
    CheckVector { x: r.random_range(-1.0..1.0), xi: rloop(ctx, r) }
}

fn raffine(ctx: &Context, r: &mut ChaCha8Rng) -> AffineVector {
    AffineVector { x: r.random_range(-1.0..1.0), xi: rloop(ctx, r), y: r.random_range(-1.0..1.0) }
}

fn rgroup(ctx: &Context, r: &mut ChaCha8Rng) -> LoopGroupElement {
    // Mode-1 exponents keep exp(η) resolved on the θ grid.
    let eta = LoopElement::random(r, ctx.nt(), ctx.g.dim(), 1, 0.5);
    LoopGroupElement::from_exp(&ctx.g, &eta)
}

fn check_dist(a: &CheckVector, b: &CheckVector) -> Result<f64> {
    Ok(a.lift().axpy(-1.0, &b.lift())?.sup_norm())
}

// ---------------------------------------------------------------- algebra

fn algebra(reg: &mut Registry) {
    let ctx = Rc::clone(&reg.ctx);
    let pt = ctx.echo(Shape { nx: 1, ny: 1, nt: 1, degree: 0 }, None, 50);
    let lp = |n| ctx.echo(Shape { nx: 1, ny: 1, ..ctx.torus }, None, n);

    reg.add("algebra.lie.jacobi", "Jacobi identity of su(n)", 1e-12, pt, |c, r| {
        let g = &c.g;
        max_over(50, || {
            let (x, y, z) = (coords(r, g.dim()), coords(r, g.dim()), coords(r, g.dim()));
            let b = |a: &[f64], b: &[f64]| g.bracket_coords(a, b);
            let j = add3(b(&x, &b(&y, &z)), b(&y, &b(&z, &x)), b(&z, &b(&x, &y)));
            Ok(j.iter().fold(0.0f64, |m, v| m.max(v.abs())))
        })
    });
    reg.add("algebra.lie.pair_invariance", "ad-invariance of the Killing-type pairing", 1e-12, pt, |c, r| {
        let g = &c.g;
        max_over(50, || {
            let (x, y, z) = (coords(r, g.dim()), coords(r, g.dim()), coords(r, g.dim()));
            Ok((SuN::pair_coords(&g.bracket_coords(&z, &x), &y) + SuN::pair_coords(&x, &g.bracket_coords(&z, &y))).abs())
        })
    });
    reg.add("algebra.lie.ad_series", "Ad of an exponential as the ad series", 1e-8, pt, |c, r| {
        let g = &c.g;
        max_over(50, || {
            let mut x = coords(r, g.dim());
            let norm = SuN::pair_coords(&x, &x).sqrt();
            let target = r.random_range(0.0..1.0);
            x.iter_mut().for_each(|v| *v *= target / norm);
            let y = coords(r, g.dim());
            let lhs = g.adjoint_coords(&g.exp_coords(&x).0, &y);
            let rhs = g.coords(&ad_series(&g.to_matrix(&x), &g.to_matrix(&y), 12).0);
            Ok(sup_diff(&lhs, &rhs))
        })
    });
    reg.add("algebra.lie.ad_invariance", "Ad-invariance of the pairing", 1e-12, pt, |c, r| {
        let g = &c.g;
        max_over(50, || {
            let h = g.exp_coords(&coords(r, g.dim())).0;
            let (x, y) = (coords(r, g.dim()), coords(r, g.dim()));
            let (ax, ay) = (g.adjoint_coords(&h, &x), g.adjoint_coords(&h, &y));
            Ok((SuN::pair_coords(&ax, &ay) - SuN::pair_coords(&x, &y)).abs())
        })
    });
    reg.add("algebra.lie.ad_bracket", "Ad is a Lie algebra automorphism", 1e-12, pt, |c, r| {
        let g = &c.g;
        max_over(50, || {
            let h = g.exp_coords(&coords(r, g.dim())).0;
            let (x, y) = (coords(r, g.dim()), coords(r, g.dim()));
            let lhs = g.adjoint_coords(&h, &g.bracket_coords(&x, &y));
            let rhs = g.bracket_coords(&g.adjoint_coords(&h, &x), &g.adjoint_coords(&h, &y));
            Ok(sup_diff(&lhs, &rhs))
        })
    });

    reg.add("algebra.loops.check_jacobi", "Jacobi identity of the rotation-extended loop algebra", 1e-10, lp(10), |c, r| {
        let g = &c.g;
        max_over(10, || {
            let (u, v, w) = (rcheck(c, r), rcheck(c, r), rcheck(c, r));
            let b = |a: &CheckVector, b: &CheckVector| check_bracket(g, a, b);
            let j = b(&u, &b(&v, &w)?)?.lift().axpy(1.0, &b(&v, &b(&w, &u)?)?.lift())?.axpy(1.0, &b(&w, &b(&u, &v)?)?.lift())?;
            Ok(j.sup_norm())
        })
    });
    reg.add("algebra.loops.beta_equivariance", "equivariance of the beta map", 1e-10, lp(10), |c, r| {
        let g = &c.g;
        max_over(10, || {
            let (u, v, w) = (rcheck(c, r), rcheck(c, r), rcheck(c, r));
            let lhs = beta_map(&check_bracket(g, &w, &u)?, &v)?.lift().axpy(1.0, &beta_map(&u, &check_bracket(g, &w, &v)?)?.lift())?;
            let rhs = check_bracket(g, &w, &beta_map(&u, &v)?)?.lift();
            Ok(lhs.axpy(-1.0, &rhs)?.sup_norm())
        })
    });
    reg.add("algebra.loops.beta_group_equivariance", "equivariance of the beta map", 1e-10, lp(10), |c, r| {
        let g = &c.g;
        max_over(10, || {
            let (u, v, gm) = (rcheck(c, r), rcheck(c, r), rgroup(c, r));
            let lhs = beta_map(&check_adjoint(g, &gm, &u)?, &check_adjoint(g, &gm, &v)?)?;
            let rhs = check_adjoint(g, &gm, &beta_map(&u, &v)?)?;
            check_dist(&lhs, &rhs)
        })
    });
    reg.add("algebra.loops.adjoint_bracket", "loop group adjoint action preserves the bracket", 1e-9, lp(10), |c, r| {
        let g = &c.g;
        max_over(10, || {
            let (u, v, gm) = (rcheck(c, r), rcheck(c, r), rgroup(c, r));
            let lhs = check_adjoint(g, &gm, &check_bracket(g, &u, &v)?)?;
            let rhs = check_bracket(g, &check_adjoint(g, &gm, &u)?, &check_adjoint(g, &gm, &v)?)?;
            check_dist(&lhs, &rhs)
        })
    });
    reg.add("algebra.loops.adjoint_homomorphism", "loop group adjoint action is a homomorphism", 1e-9, lp(10), |c, r| {
        let g = &c.g;
        max_over(10, || {
            let (u, g1, g2) = (rcheck(c, r), rgroup(c, r), rgroup(c, r));
            let lhs = check_adjoint(g, &g1.mul(g, &g2)?, &u)?;
            let rhs = check_adjoint(g, &g1, &check_adjoint(g, &g2, &u)?)?;
            check_dist(&lhs, &rhs)
        })
    });

    for &k in &ctx.levels {
        let e = |n| ctx.echo(Shape { nx: 1, ny: 1, ..ctx.torus }, Some(k), n);
        reg.add(format!("algebra.affine.jacobi.k{k}"), "Jacobi identity of the affine bracket", 1e-10, e(10), move |c, r| {
            let g = &c.g;
            max_over(10, || {
                let (u, v, w) = (raffine(c, r), raffine(c, r), raffine(c, r));
                let b = |a: &AffineVector, b: &AffineVector| affine_bracket(g, a, b, k);
                let j = b(&u, &b(&v, &w)?)?.axpy(1.0, &b(&v, &b(&w, &u)?)?)?.axpy(1.0, &b(&w, &b(&u, &v)?)?)?;
                Ok(j.sup_norm())
            })
        });
        reg.add(format!("algebra.affine.invariance.k{k}"), "invariance of the affine pairing", 1e-10, e(10), move |c, r| {
            let g = &c.g;
            max_over(10, || {
                let (u, v, w) = (raffine(c, r), raffine(c, r), raffine(c, r));
                let a = affine_pair(&affine_bracket(g, &w, &u, k)?, &v, k)?;
                let b = affine_pair(&u, &affine_bracket(g, &w, &v, k)?, k)?;
                Ok((a + b).abs())
            })
        });
        reg.add(format!("algebra.affine.ad_invariance.k{k}"), "affine adjoint action preserves the pairing", 1e-9, e(10), move |c, r| {
            let g = &c.g;
            max_over(10, || {
                let (u, v, gm) = (raffine(c, r), raffine(c, r), rgroup(c, r));
                let lhs = affine_pair(&affine_adjoint(g, &gm, &u, k)?, &affine_adjoint(g, &gm, &v, k)?, k)?;
                Ok((lhs - affine_pair(&u, &v, k)?).abs())
            })
        });
        reg.add(format!("algebra.affine.ad_homomorphism.k{k}"), "affine adjoint action is a homomorphism", 1e-9, e(10), move |c, r| {
            let g = &c.g;
            max_over(10, || {
                let (u, g1, g2) = (raffine(c, r), rgroup(c, r), rgroup(c, r));
                let lhs = affine_adjoint(g, &g1.mul(g, &g2)?, &u, k)?;
                let rhs = affine_adjoint(g, &g1, &affine_adjoint(g, &g2, &u, k)?, k)?;
                Ok(lhs.axpy(-1.0, &rhs)?.sup_norm())
            })
        });
        reg.add(format!("algebra.affine.higgs_orbit.k{k}"), "Higgs fields as the orbit of the rotation generator", 1e-10, e(10), move |c, r| {
            let g = &c.g;
            max_over(10, || {
                let gm = rgroup(c, r);
                let v = affine_adjoint(g, &gm, &AffineVector::d(c.nt(), g.dim()), k)?;
                let expect = 0.5 * level_weight(k) * loop_pair(&v.xi, &v.xi)?;
                Ok((v.x - 1.0).abs().max((v.y - expect).abs()))
            })
        });
        reg.add(format!("algebra.affine.cocycle.k{k}"), "2-cocycle identity of the affine central term", 1e-10, e(10), move |c, r| {
            let g = &c.g;
            max_over(10, || {
                let (u, v, w) = (rcheck(c, r), rcheck(c, r), rcheck(c, r));
                let cc = |a: &CheckVector, b: &CheckVector| -> Result<f64> { Ok(affine_bracket(g, &a.lift(), &b.lift(), k)?.y) };
                let br = |a: &CheckVector, b: &CheckVector| check_bracket(g, a, b);
                Ok((cc(&br(&u, &v)?, &w)? + cc(&br(&v, &w)?, &u)? + cc(&br(&w, &u)?, &v)?).abs())
            })
        });
        reg.add(format!("algebra.sigma.omega_cocycle.k{k}"), "omega_sigma is an antisymmetric 2-cocycle", 1e-10, e(10), move |c, r| {
            let g = &c.g;
            let sigma = SplittingSigma::shifted(r.random_range(-1.0..1.0), rloop(c, r));
            max_over(10, || {
                let (u, v, w) = (rcheck(c, r), rcheck(c, r), rcheck(c, r));
                let om = |a: &CheckVector, b: &CheckVector| gerbe::omega_sigma(g, a, b, &sigma, k);
                let br = |a: &CheckVector, b: &CheckVector| check_bracket(g, a, b);
                let cyc = om(&br(&u, &v)?, &w)? + om(&br(&v, &w)?, &u)? + om(&br(&w, &u)?, &v)?;
                Ok(cyc.abs().max((om(&u, &v)? + om(&v, &u)?).abs()))
            })
        });
        reg.add(format!("algebra.sigma.z_group.k{k}"), "Z_sigma against the affine adjoint central defect", 1e-9, e(10), move |c, r| {
            let g = &c.g;
            max_over(10, || {
                let (u, gm) = (rcheck(c, r), rgroup(c, r));
                let z = gerbe::z_sigma(g, &gm, &u, &SplittingSigma::standard(), k)?;
                Ok((z - group_cocycle_sigma(&gm, &u, k)?).abs())
            })
        });
        reg.add(format!("algebra.sigma.z_crossed.k{k}"), "Z_sigma crossed homomorphism identity", 1e-9, e(10), move |c, r| {
            let g = &c.g;
            let sigma = SplittingSigma::standard();
            max_over(10, || {
                let (u, g1, g2) = (rcheck(c, r), rgroup(c, r), rgroup(c, r));
                let lhs = gerbe::z_sigma(g, &g1.mul(g, &g2)?, &u, &sigma, k)?;
                let rhs = gerbe::z_sigma(g, &g1, &check_adjoint(g, &g2, &u)?, &sigma, k)? + gerbe::z_sigma(g, &g2, &u, &sigma, k)?;
                Ok((lhs - rhs).abs())
            })
        });
        reg.add(format!("algebra.sigma.z_constant.k{k}"), "Z_sigma vanishes on constant loops", 1e-12, e(10), move |c, r| {
            let g = &c.g;
            max_over(10, || {
                let h = g.exp_coords(&coords(r, g.dim())).0;
                let gm = LoopGroupElement::constant(g, &h, c.nt());
                Ok(gerbe::z_sigma(g, &gm, &rcheck(c, r), &SplittingSigma::standard(), k)?.abs())
            })
        });
        for (tag, s) in [("torus", ctx.torus), ("twisted", ctx.twisted)] {
            let es = ctx.echo(s, Some(k), 3);
            reg.add(format!("algebra.ext.jacobi.{tag}.k{k}"), "Jacobi identity of the extended gauge algebra", 1e-9, es, move |c, r| {
                let g = &c.g;
                max_over(3, || {
                    let (u, v, w) = (ext_element(g, s, r, true)?, ext_element(g, s, r, true)?, ext_element(g, s, r, true)?);
                    Ok(ext_jacobi(g, &u, &v, &w, k)?.sup_norm())
                })
            });
            reg.add(format!("algebra.ext.invariance.{tag}.k{k}"), "invariance of the extended gauge algebra pairing", 1e-9, es, move |c, r| {
                let g = &c.g;
                max_over(3, || {
                    let (u, v, w) = (ext_element(g, s, r, true)?, ext_element(g, s, r, true)?, ext_element(g, s, r, true)?);
                    let a = extended_pair(&extended_bracket(g, &w, &u, k)?, &v, k)?;
                    let b = extended_pair(&u, &extended_bracket(g, &w, &v, k)?, k)?;
                    Ok(a.axpy(1.0, &b)?.sup_norm())
                })
            });
            reg.add(format!("algebra.ext.gamma_cocycle.{tag}.k{k}"), "2-cocycle identity of gamma", 1e-9, es, move |c, r| {
                let g = &c.g;
                max_over(3, || {
                    let (u, v, w) = (ext_element(g, s, r, false)?, ext_element(g, s, r, false)?, ext_element(g, s, r, false)?);
                    Ok(ext_jacobi(g, &u, &v, &w, k)?.y.sup_norm())
                })
            });
        }
    }

    let es = ctx.echo(ctx.twisted, None, 5);
    let s = ctx.twisted;
    reg.add("algebra.k0.antisymmetry", "the contact cocycle k0", 1e-10, es, move |c, r| {
        let samp = FieldSampler::default();
        max_over(5, || {
            let (a, b) = (samp.scalar(r, s, c.g.dim()), samp.scalar(r, s, c.g.dim()));
            let kappa = Kappa::standard(s);
            Ok((cocycle_k0(&a, &b, &kappa)? + cocycle_k0(&b, &a, &kappa)?).abs())
        })
    });
    reg.add("algebra.k0.cocycle", "2-cocycle identity of k0", 1e-8, es, move |c, r| {
        let samp = FieldSampler::default();
        let kappa = Kappa::standard(s);
        max_over(5, || {
            let xs: Vec<FieldGrid> = (0..3).map(|_| samp.scalar(r, s, c.g.dim())).collect();
            let k0 = |a: &FieldGrid, b: &FieldGrid| cocycle_k0(a, b, &kappa);
            let br = |a: &FieldGrid, b: &FieldGrid| wedge_bracket(&c.g, a, b);
            Ok((k0(&br(&xs[0], &xs[1])?, &xs[2])? + k0(&br(&xs[1], &xs[2])?, &xs[0])? + k0(&br(&xs[2], &xs[0])?, &xs[1])?).abs())
        })
    });
    reg.add("algebra.k0.base_kernel", "k0 vanishes on fiber-constant functions", 1e-12, es, move |c, r| {
        let samp = FieldSampler::default();
        let kappa = Kappa::standard(s);
        max_over(5, || {
            let (flat, x) = (samp.base_scalar(r, s, c.g.dim()), samp.scalar(r, s, c.g.dim()));
            Ok(cocycle_k0(&flat, &x, &kappa)?.abs())
        })
    });
}

fn ext_element(g: &SuN, s: Shape, r: &mut ChaCha8Rng, with_x: bool) -> Result<ExtendedAlgebraElement> {
    let samp = FieldSampler::default();
    let x = if with_x { samp.base_scalar(r, s, 1) } else { FieldGrid::zeros(s, 0, 1).with_base_only(true) };
    let xi = samp.scalar(r, s, g.dim());
    let y = if with_x { samp.base_scalar(r, s, 1) } else { FieldGrid::zeros(s, 0, 1).with_base_only(true) };
    ExtendedAlgebraElement::new(g, x, xi, y)
}

fn ext_jacobi(
    g: &SuN,
    u: &ExtendedAlgebraElement,
    v: &ExtendedAlgebraElement,
    w: &ExtendedAlgebraElement,
    k: i64,
) -> Result<ExtendedAlgebraElement> {
    let b = |a: &ExtendedAlgebraElement, b: &ExtendedAlgebraElement| extended_bracket(g, a, b, k);
    b(u, &b(v, w)?)?.axpy(1.0, &b(v, &b(w, u)?)?)?.axpy(1.0, &b(w, &b(u, v)?)?)
}

// --------------------------------------------------------------- manifold

fn packet(d: i64, x0: f64, x: f64, y: f64, th: f64) -> f64 {
    (-6i64..=6)
        .map(|j| {
            let u = x - j as f64 - x0;
            (-u * u / 0.18).exp() * (2.0 * PI * (y + th + (d * j) as f64 * y)).cos()
        })
        .sum()
}

fn manifold(reg: &mut Registry) {
    let ctx = Rc::clone(&reg.ctx);
    for (tag, s, tol) in [("torus", ctx.torus, 1e-10), ("twisted", ctx.twisted, 1e-8)] {
        reg.add(format!("manifold.d_squared.{tag}"), "d squared vanishes", tol, ctx.echo(s, None, 3), move |_, r| {
            let samp = FieldSampler::default();
            max_over(3, || {
                let f = samp.scalar(r, s, 1);
                let a = samp.one_form(r, s, 1);
                let ddf = exterior_d(&exterior_d(&f)?)?.sup_norm();
                Ok(ddf.max(exterior_d(&exterior_d(&a)?)?.sup_norm()))
            })
        });
        // Products double the bandwidth, so the x stencil error of d(fω) sits
        // near 1e-6 relative at 32 points on the twisted chart.
        let leibniz_tol = if s.degree == 0 { tol } else { 1e-5 };
        reg.add(format!("manifold.leibniz.{tag}"), "Leibniz rule for d", leibniz_tol, ctx.echo(s, None, 3), move |_, r| {
            let samp = FieldSampler::default();
            max_over(3, || {
                let f = samp.scalar(r, s, 1);
                let w = samp.one_form(r, s, 1);
                let lhs = exterior_d(&wedge_scalar(&f, &w)?)?;
                let rhs = wedge_scalar(&exterior_d(&f)?, &w)?.axpy(1.0, &wedge_scalar(&f, &exterior_d(&w)?)?)?;
                Ok(lhs.distance(&rhs)? / rhs.sup_norm().max(1.0))
            })
        });
        reg.add(format!("manifold.stokes.{tag}"), "Stokes theorem at top degree", tol, ctx.echo(s, None, 3), move |_, r| {
            let samp = FieldSampler::default();
            max_over(3, || Ok(fiber_integrate(&exterior_d(&samp.form(r, s, 2, 1, &[true; 3]))?)?.abs()))
        });
    }
    let s = ctx.twisted;
    reg.add("manifold.gluing", "twisted gluing of the nilmanifold", 1e-12, ctx.echo(s, None, 1), move |_, r| {
        let d = s.degree;
        let x0 = r.random_range(0.0..1.0);
        let f = FieldGrid::from_fn(s, 0, 1, |x, y, t, c| c[0][0] = packet(d, x0, x, y, t));
        let n = s.nx as i64;
        let mut worst = 0.0f64;
        for ii in [-3, -1, n, n + 2, 2 * n + 1] {
            for j in 0..s.ny {
                for l in 0..s.nt {
                    let (_, y, t) = s.coords(0, j, l);
                    let x = ii as f64 / s.nx as f64;
                    worst = worst.max((f.glued_value(0, ii, j, l, 0) - packet(d, x0, x, y, t)).abs());
                }
            }
        }
        Ok(worst)
    });
    reg.add("manifold.contact_volume", "kappa wedge d kappa is the constant volume d", 1e-12, ctx.echo(s, None, 1), move |_, _| {
        let k = Kappa::standard(s);
        let vol = wedge_scalar(k.form(), &exterior_d(k.form())?)?;
        let d = s.degree as f64;
        let min = vol.comp(0).iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
        Ok((fiber_integrate(&vol)? - d).abs().max((min - d.abs()).abs()))
    });
    reg.add("manifold.field_io_roundtrip", "plumbing", 0.5, ctx.echo(s, None, 1), move |c, r| {
        let a = FieldSampler::default().one_form(r, s, c.g.dim());
        let json = crate::field_io::from_json(&crate::field_io::to_json(&a)?)?;
        let bin = crate::field_io::from_bytes(&crate::field_io::to_bytes(&a))?;
        Ok(if json == a && bin == a { 0.0 } else { 1.0 })
    });
}

// ---------------------------------------------------------------- caloron

fn random_connection(g: &SuN, s: Shape, r: &mut ChaCha8Rng) -> Result<Connection3d> {
    Connection3d::new(FieldSampler::default().one_form(r, s, g.dim()), Kappa::standard(s))
}

fn fields_distance(a: &CaloronFields, b: &CaloronFields) -> Result<f64> {
    Ok(a.lambda
        .distance(&b.lambda)?
        .max(a.big_lambda.distance(&b.big_lambda)?)
        .max(a.phi.distance(&b.phi)?))
}

fn caloron(reg: &mut Registry) {
    let ctx = Rc::clone(&reg.ctx);
    for (tag, s) in [("torus", ctx.torus), ("twisted", ctx.twisted)] {
        reg.add(format!("caloron.roundtrip.{tag}"), "the caloron constructions are mutually inverse", 1e-12, ctx.echo(s, None, 3), move |c, r| {
            max_over(3, || {
                let conn = random_connection(&c.g, s, r)?;
                let f = cal_forward(&conn)?;
                let back = cal_inverse(&f)?;
                Ok(back.a.distance(&conn.a)?.max(fields_distance(&cal_forward(&back)?, &f)?))
            })
        });
        reg.add(format!("caloron.equivariance.{tag}"), "gauge equivariance of the caloron correspondence", 1e-8, ctx.echo(s, None, 3), move |c, r| {
            let g = &c.g;
            let samp = FieldSampler::default();
            max_over(3, || {
                let conn = random_connection(g, s, r)?;
                let gm = GaugeMap3d::exp_of(g, &samp.scalar(r, s, g.dim()))?;
                let via_3d = cal_forward(&Connection3d::new(gauge_act_3d(g, &gm, &conn.a)?, conn.kappa.clone())?)?;
                let via_cal = gauge_act_caloron(g, &gm, &cal_forward(&conn)?)?;
                let red = project_horizontal(&gauge_act_3d(g, &gm, &conn.a)?, &conn.kappa)?
                    .distance(&gauge_act_reduced(g, &gm, &project_horizontal(&conn.a, &conn.kappa)?, &conn.kappa)?)?;
                Ok(fields_distance(&via_3d, &via_cal)?.max(red))
            })
        });
        reg.add(format!("caloron.higgs_contraction.{tag}"), "the Higgs field is the fiber component", 1e-12, ctx.echo(s, None, 3), move |c, r| {
            max_over(3, || {
                let f = cal_forward(&random_connection(&c.g, s, r)?)?;
                interior_r(&cal_inverse(&f)?.a)?.distance(&f.phi)
            })
        });
    }
    reg.add("caloron.curvature.torus", "curvature of the looped connection", 1e-9, ctx.echo(ctx.torus, None, 3), move |c, r| {
        let s = c.torus;
        max_over(3, || {
            let rep = looped_curvature_identity(&c.g, &cal_forward(&random_connection(&c.g, s, r)?)?)?;
            Ok(rep.relative_residual.max(rep.full_relative_residual))
        })
    });
    reg.add("caloron.curvature.twisted", "curvature of the looped connection", 1e-6, ctx.echo(ctx.twisted, None, 3), move |c, r| {
        let s = c.twisted;
        max_over(3, || {
            let rep = looped_curvature_identity(&c.g, &cal_forward(&random_connection(&c.g, s, r)?)?)?;
            Ok(rep.relative_residual.max(rep.full_relative_residual))
        })
    });
    let coarse = Shape::cube(ctx.twisted.degree, 16);
    let fine = Shape::cube(ctx.twisted.degree, 32);
    reg.add("caloron.curvature_order", "curvature of the looped connection", 0.5, ctx.echo(fine, None, 1), move |c, r| {
        // Error is the shortfall of the observed x-refinement order below 6.
        let mut res = [0.0; 2];
        for (out, s) in res.iter_mut().zip([coarse, fine]) {
            let mut rr = r.clone();
            let rep = looped_curvature_identity(&c.g, &cal_forward(&random_connection(&c.g, s, &mut rr)?)?)?;
            *out = rep.relative_residual;
        }
        Ok((6.0 - (res[0] / res[1]).log2()).max(0.0))
    });
}

// ------------------------------------------------------------ functionals

fn hedgehogs(r: &mut ChaCha8Rng, charges: &[i32]) -> Vec<Hedgehog> {
    charges
        .iter()
        .enumerate()
        .map(|(i, &charge)| Hedgehog {
            center: [
                0.25 + 0.5 * i as f64 + r.random_range(-0.05..0.05),
                0.5 + r.random_range(-0.1..0.1),
                0.5 + r.random_range(-0.1..0.1),
            ],
            radius: 0.1,
            charge,
        })
        .collect()
}

fn pure_gauge_start(g: &SuN, s: Shape, r: &mut ChaCha8Rng, perturbation: f64) -> Result<FieldGrid> {
    let xi = FieldSampler { amplitude: 0.3, ..FieldSampler::default() }.scalar(r, s, g.dim());
    let flat = GaugeMap3d::exp_of(g, &xi)?.maurer_cartan(g)?;
    if perturbation == 0.0 {
        return Ok(flat);
    }
    let pert = FieldSampler { amplitude: perturbation, ..FieldSampler::default() }.one_form(r, s, g.dim());
    flat.axpy(1.0, &pert)
}

/// Constant abelian flat connection with generic holonomy, perturbed by a
/// mean-free 1-form and moved by a mild gauge map. Starting away from the
/// trivial connection avoids its quartic directions.
fn perturbed_flat_start(g: &SuN, s: Shape, r: &mut ChaCha8Rng, perturbation: f64) -> Result<FieldGrid> {
    let xi = FieldSampler { amplitude: 0.1, ..FieldSampler::default() }.scalar(r, s, g.dim());
    let gm = GaugeMap3d::exp_of(g, &xi)?;
    let mut a = FieldSampler { amplitude: perturbation, ..FieldSampler::default() }.one_form(r, s, g.dim());
    let (n, dim) = (s.npts(), g.dim());
    for (c, h) in a.comps_mut().iter_mut().zip([1.1, 0.7, 1.6]) {
        for j in 0..dim {
            let mean = (0..n).map(|p| c[p * dim + j]).sum::<f64>() / n as f64;
            (0..n).for_each(|p| c[p * dim + j] -= mean);
        }
        // Last basis element lies in the Cartan subalgebra.
        (0..n).for_each(|p| c[p * dim + dim - 1] += h);
    }
    gauge_act_3d(g, &gm, &a)
}

fn functionals(reg: &mut Registry) {
    let ctx = Rc::clone(&reg.ctx);
    let levels = ctx.levels.clone();
    let kmax = *levels.last().expect("at least one level");
    let wind = Shape::cube(0, 64);
    for (deg, charges) in [(1i64, vec![1]), (2, vec![1, 1])] {
        let ls = levels.clone();
        reg.add(format!("functionals.cs_quantization.deg{deg}"), "integer quantization of Chern-Simons on winding maps", 1e-6, ctx.echo_su2(wind, Some(kmax), ls.len()), move |c, r| {
            let g = &c.su2;
            let gm = winding_map(wind, &hedgehogs(r, &charges))?;
            let mc = gm.maurer_cartan(g)?;
            let cs1 = cs_action(g, &mc, 1)?.value;
            Ok(ls.iter().fold(0.0f64, |m, &k| m.max((k as f64 * cs1 - (k * deg) as f64).abs())))
        });
    }
    let ls = levels.clone();
    reg.add("functionals.cs_gauge_invariance", "gauge invariance of Chern-Simons mod Z", 1e-6, ctx.echo_su2(wind, Some(kmax), ls.len()), move |c, r| {
        let g = &c.su2;
        let a = FieldSampler::default().one_form(r, wind, 3);
        let gm = winding_map(wind, &hedgehogs(r, &[1]))?;
        let ag = gauge_act_3d(g, &gm, &a)?;
        let mut worst = 0.0f64;
        for &k in &ls {
            let d = cs_action(g, &ag, k)?.value - cs_action(g, &a, k)?.value;
            worst = worst.max(circle_distance(d, 0.0));
        }
        Ok(worst)
    });
    let s = ctx.torus;
    reg.add("functionals.cs_variation", "first variation of Chern-Simons", 1e-9, ctx.echo(s, Some(1), 3), move |c, r| {
        let samp = FieldSampler::default();
        max_over(3, || {
            let (a, da) = (samp.one_form(r, s, c.g.dim()), samp.one_form(r, s, c.g.dim()));
            let cs = |t: f64| -> Result<f64> { Ok(cs_action(&c.g, &a.axpy(t, &da)?, 1)?.value) };
            let h = 0.1;
            // Five-point stencil, exact on the cubic t-dependence.
            let fd = (cs(-2.0 * h)? - 8.0 * cs(-h)? + 8.0 * cs(h)? - cs(2.0 * h)?) / (12.0 * h);
            let an = cs_variation(&c.g, &a, &da, 1)?;
            Ok((fd - an).abs() / an.abs().max(1e-3))
        })
    });
    for (tag, sh) in [("torus", ctx.torus), ("twisted", ctx.twisted)] {
        reg.add(format!("functionals.bf_phi_variation.{tag}"), "Φ-variation of the caloron action", 1e-6, ctx.echo(sh, Some(kmax), 3), move |c, r| {
            max_over(3, || {
                let f = cal_forward(&random_connection(&c.g, sh, r)?)?;
                let dphi = FieldSampler::default().scalar(r, sh, c.g.dim());
                let action = |t: f64| -> Result<f64> {
                    let ft = CaloronFields { phi: f.phi.axpy(t, &dphi)?, ..f.clone() };
                    Ok(caloron_bf_action(&c.g, &LiftedConnection::untwisted(ft), kmax)?.value)
                };
                // S^Cal is quadratic in Φ, so the central difference is exact.
                let h = 0.1;
                let fd = (action(h)? - action(-h)?) / (2.0 * h);
                let an = bf_phi_variation(&c.g, &f, &dphi, kmax)?;
                Ok((fd - an).abs() / an.abs().max(1e-3))
            })
        });
    }
    let wil = Shape { nx: 4, ny: 4, nt: 256, degree: 0 };
    reg.add("functionals.wilson_conjugation", "Wilson loop gauge invariance", 1e-8, ctx.echo(wil, None, 16), move |c, r| {
        let a = FieldSampler::default().one_form(r, wil, c.g.dim());
        let xi = FieldSampler { amplitude: 0.5, max_mode: 1, ..FieldSampler::default() }.scalar(r, wil, c.g.dim());
        let ag = gauge_act_3d(&c.g, &GaugeMap3d::exp_of(&c.g, &xi)?, &a)?;
        let mut worst = 0.0f64;
        for i in 0..wil.nx {
            for j in 0..wil.ny {
                worst = worst.max((wilson_trace(&c.g, &ag, i, j)? - wilson_trace(&c.g, &a, i, j)?).norm());
            }
        }
        Ok(worst)
    });
    reg.add("functionals.bf_pure_gauge", "flat connections solve the caloron equations of motion", 1e-7, ctx.echo(s, None, 3), move |c, r| {
        max_over(3, || {
            let a = pure_gauge_start(&c.g, s, r, 0.0)?;
            Ok(eom_residual(&c.g, &cal_forward(&Connection3d::new(a, Kappa::standard(s))?)?)?.bf_residual)
        })
    });
    let flow = Shape::cube(0, 24);
    reg.add("functionals.eom_flow", "flat connections solve the caloron equations of motion", 1e-5, ctx.echo(flow, None, 1), move |c, r| {
        let a = perturbed_flat_start(&c.g, flow, r, 0.05)?;
        let f = cal_forward(&Connection3d::new(a, Kappa::standard(flow))?)?;
        let res = relax_to_flat(&c.g, &f, FlowOptions { tol: 1e-6, ..FlowOptions::default() })?;
        Ok(res.residual.flatness_residual)
    });
    for &k in &levels {
        reg.add(format!("functionals.bf_equals_cs.k{k}"), "the caloron BF action equals minus Chern-Simons", 1e-10, ctx.echo(s, Some(k), 1), move |c, r| {
            let conn = random_connection(&c.g, s, r)?;
            let lc = LiftedConnection::untwisted(cal_forward(&conn)?);
            let sc = caloron_bf_action(&c.g, &lc, k)?.value;
            let s3 = bf_action_3d(&c.g, &conn, &lc.alpha, k)?.value;
            let cs = cs_action(&c.g, &conn.a, k)?.value;
            Ok((sc - s3).abs().max((sc + cs).abs()))
        });
    }
    let bw = Shape { degree: ctx.twisted.degree, ..Shape::cube(0, 24) };
    for &k in &levels {
        reg.add(format!("functionals.bw_ratio.k{k}"), "moment map square proportional to CS prime", 1e-5, ctx.echo(bw, Some(k), 20), move |c, r| {
            let kappa = Kappa::standard(bw);
            let mut ratios = Vec::with_capacity(20);
            for _ in 0..20 {
                let a = FieldSampler::default().horizontal_one_form(r, bw, c.g.dim());
                let mu = bw_moment(&c.g, &a, &kappa)?;
                let mm = contact_pair(&mu, &mu, &kappa)?;
                ratios.push(mm / contact_cs_action(&c.g, &a, &kappa, k)?.value);
            }
            let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
            let var = ratios.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / ratios.len() as f64;
            Ok(var.sqrt() / mean.abs())
        });
    }
    for &k in &levels {
        for (tag, s, tol) in [("torus", ctx.torus, 1e-9), ("twisted", ctx.twisted, 1e-6)] {
            reg.add(format!("functionals.msv.{tag}.k{k}"), "the MSV identity", tol, ctx.echo(s, Some(k), 1), move |c, r| {
                // The x stencil acts on triple products here; wider packets keep them resolved.
                let samp = FieldSampler { width: 0.45, ..FieldSampler::default() };
                let mut conn = || Connection3d::new(samp.one_form(r, s, c.g.dim()), Kappa::standard(s));
                let f = cal_forward(&conn()?)?;
                let dir = cal_forward(&conn()?)?;
                Ok(msv_identity(&c.g, &f, &dir, k)?.relative_residual)
            });
        }
    }
    let fiber = Shape { nx: 1, ny: 1, nt: 64, degree: 0 };
    for &k in &levels {
        reg.add(format!("functionals.wilson_orbit.k{k}"), "Wilson loop as an orbit pairing", 1e-8, ctx.echo(fiber, Some(k), 50), move |c, r| {
            let g = &c.g;
            max_over(50, || {
                let gamma = LoopGroupElement::from_exp(g, &LoopElement::random(r, 64, g.dim(), 3, 0.8));
                let phi = LoopElement::random(r, 64, g.dim(), 3, 0.8);
                Ok(wilson_orbit_identity(g, &gamma, &phi, &coords(r, g.dim()), k)?.residual)
            })
        });
    }
}

// ------------------------------------------------------------------ gauge

fn base_one_form(s: Shape, r: &mut ChaCha8Rng, amp: f64) -> Result<FieldGrid> {
    let samp = FieldSampler { amplitude: amp, ..FieldSampler::default() };
    let (bx, by) = (samp.base_scalar(r, s, 1), samp.base_scalar(r, s, 1));
    Ok(FieldGrid::from_components(s, 1, 1, vec![bx.comp(0).to_vec(), by.comp(0).to_vec(), vec![0.0; s.npts()]])?
        .with_base_only(true))
}

fn cconnection(g: &SuN, s: Shape, r: &mut ChaCha8Rng) -> Result<CConnection> {
    let kappa = Kappa::new(Kappa::standard(s).form().axpy(1.0, &base_one_form(s, r, 0.2)?)?)?;
    let a = FieldSampler::default().horizontal_one_form(r, s, g.dim());
    CConnection::new(kappa, a, base_one_form(s, r, 0.5)?)
}

fn tangent(g: &SuN, s: Shape, r: &mut ChaCha8Rng) -> Result<CConnectionTangent> {
    Ok(CConnectionTangent {
        kappa: base_one_form(s, r, 0.5)?,
        a: FieldSampler::default().horizontal_one_form(r, s, g.dim()),
        b: base_one_form(s, r, 0.5)?,
    })
}

fn gauge(reg: &mut Registry) {
    let ctx = Rc::clone(&reg.ctx);
    let kmax = *ctx.levels.last().expect("at least one level");
    for &k in &ctx.levels {
        for (tag, s) in [("torus", ctx.torus), ("twisted", ctx.twisted)] {
            reg.add(format!("gauge.hamiltonian.{tag}.k{k}"), "the moment map of the extended gauge action", 1e-7, ctx.echo(s, Some(k), 2), move |c, r| {
                max_over(2, || {
                    let l = cconnection(&c.g, s, r)?;
                    let u = ext_element(&c.g, s, r, true)?;
                    let dir = tangent(&c.g, s, r)?;
                    Ok(hamiltonian_fd_check(&c.g, &l, &u, &dir, k, 1e-4)?.relative_residual)
                })
            });
        }
    }
    let s = ctx.twisted;
    reg.add("gauge.omega_antisymmetry", "the symplectic form on connections", 1e-12, ctx.echo(s, Some(kmax), 3), move |c, r| {
        max_over(3, || {
            let (x, y) = (tangent(&c.g, s, r)?, tangent(&c.g, s, r)?);
            let (a, b) = (omega_cconnection(&x, &y, kmax)?, omega_cconnection(&y, &x, kmax)?);
            Ok((a + b).abs() / a.abs().max(1.0))
        })
    });
    reg.add("gauge.moment_horizontal", "the moment map of the extended gauge action", 1e-9, ctx.echo(s, Some(kmax), 3), move |c, r| {
        max_over(3, || Ok(moment_f(&c.g, &cconnection(&c.g, s, r)?, kmax)?.horizontality_defect()))
    });
    let t = ctx.torus;
    for n in [1i64, 3] {
        reg.add(format!("gauge.lift_twist.n{n}"), "lift twists shift the action by integers", 1e-8, ctx.echo(t, Some(kmax), 1), move |c, r| {
            let f = cal_forward(&random_connection(&c.g, t, r)?)?;
            let lc = LiftedConnection::untwisted(f);
            let s0 = caloron_bf_action(&c.g, &lc, kmax)?.value;
            let beta = AlphaField { periodic: base_one_form(t, r, 0.5)?, twist: n };
            let shift = caloron_bf_action(&c.g, &lift_twist(&lc, &beta)?, kmax)?.value - s0;
            Ok((shift + n as f64).abs())
        });
    }
    reg.add("gauge.closed_twist", "lift twists shift the action by integers", 1e-12, ctx.echo(t, Some(kmax), 1), move |c, r| {
        let lc = LiftedConnection::untwisted(cal_forward(&random_connection(&c.g, t, r)?)?);
        let (p, q) = (r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
        let closed = FieldGrid::from_fn(t, 1, 1, |_, _, _, cc| {
            cc[0][0] = p;
            cc[1][0] = q;
        })
        .with_base_only(true);
        let lt = lift_twist(&lc, &AlphaField { periodic: closed, twist: 0 })?;
        Ok((caloron_bf_action(&c.g, &lt, kmax)?.value - caloron_bf_action(&c.g, &lc, kmax)?.value).abs())
    });
    let wind = Shape::cube(0, 64);
    let ls = ctx.levels.clone();
    reg.add("gauge.composite_mod_z", "caloron action is gauge invariant mod Z", 1e-6, ctx.echo_su2(wind, Some(kmax), ls.len()), move |c, r| {
        let g = &c.su2;
        let f = cal_forward(&random_connection(g, wind, r)?)?;
        let lc = LiftedConnection::untwisted(f);
        let gm = winding_map(wind, &hedgehogs(r, &[1]))?;
        let n = r.random_range(1..=3);
        let beta = AlphaField { periodic: base_one_form(wind, r, 0.5)?, twist: n };
        let mut worst = 0.0f64;
        for &k in &ls {
            let s0 = caloron_bf_action(g, &lc, k)?.value;
            let moved = lift_twist(&gauge_act_lift(g, &gm, &lc, k)?, &beta)?;
            let s1 = caloron_bf_action(g, &moved, k)?.value;
            worst = worst.max(circle_distance(s1, s0));
        }
        Ok(worst)
    });
}

// ------------------------------------------------------------------ gerbe

fn gerbe_suite(reg: &mut Registry) {
    let ctx = Rc::clone(&reg.ctx);
    for &k in &ctx.levels {
        for (tag, s, tol) in [("torus", ctx.torus, 1e-9), ("twisted", ctx.twisted, 1e-4)] {
            reg.add(format!("gerbe.lemma.{tag}.k{k}"), "principal curvature of the loop case", tol, ctx.echo(s, Some(k), 1), move |c, r| {
                let f = cal_forward(&random_connection(&c.g, s, r)?)?;
                let n = s.nt;
                let sigma = SplittingSigma::shifted(r.random_range(-1.0..1.0), LoopElement::random(r, n, c.g.dim(), loop_mode(n), 1.0));
                let rep = gerbe::principal_curvature_check(&c.g, &f, &sigma, k)?;
                Ok(rep.lemma_residual / rep.scale.max(1.0))
            });
        }
        let s = ctx.torus;
        reg.add(format!("gerbe.center.k{k}"), "the splitting is the identity on the center", 1e-10, ctx.echo(s, Some(k), 1), move |c, r| {
            let f = cal_forward(&random_connection(&c.g, s, r)?)?;
            Ok(gerbe::principal_curvature_check(&c.g, &f, &SplittingSigma::standard(), k)?.center_residual)
        });
        reg.add(format!("gerbe.lift_trivialization.k{k}"), "curving and lift trivialization", 1e-8, ctx.echo(s, Some(k), 1), move |c, r| {
            let first = LiftedConnection::untwisted(cal_forward(&random_connection(&c.g, s, r)?)?);
            let mut second = first.clone();
            second.alpha.twist = r.random_range(1..=3);
            let rep = gerbe::lift_trivialization_check(&c.g, &first, &second, k)?;
            let action = caloron_bf_action(&c.g, &second, k)?.value;
            Ok(rep
                .pointwise_residual
                .max((rep.second - rep.first - second.alpha.twist as f64).abs())
                .max((action + rep.second).abs()))
        });
        reg.add(format!("gerbe.splitting_response.k{k}"), "change of splitting", 1e-9, ctx.echo(s, Some(k), 3), move |c, r| {
            let n = s.nt;
            let f = cal_forward(&random_connection(&c.g, s, r)?)?;
            let sigma2 = SplittingSigma::shifted(r.random_range(-1.0..1.0), LoopElement::random(r, n, c.g.dim(), loop_mode(n), 1.0));
            max_over(3, || {
                let (u, v) = (rcheck(c, r), rcheck(c, r));
                let gamma = rgroup(c, r);
                let rep = gerbe::splitting_response(&c.g, &SplittingSigma::standard(), &sigma2, &u, &v, &gamma, &f, k)?;
                Ok(rep.omega.max(rep.z).max(rep.curving))
            })
        });
    }
    let pt = CheckEcho { grid: [1, 1, 1], degree: 0, level: None, rank: 0, instances: 50 };
    reg.add("gerbe.heisenberg", "Heisenberg toy model", 1e-12, pt, |_, r| max_over(50, || Ok(heisenberg::toy_residual(r))));
}

// ----------------------------------------------------------- localization

fn dh_oracle(r: f64, xi: f64) -> f64 {
    if xi == 0.0 {
        4.0 * PI * r
    } else {
        4.0 * PI * (r * xi).sin() / xi
    }
}

fn localization(reg: &mut Registry) {
    let pt = |n| CheckEcho { grid: [1, 1, 1], degree: 0, level: None, rank: 0, instances: n };
    reg.add("localization.dh_sinc", "Duistermaat-Heckman for the height function", 1e-6, pt(5), |_, r| {
        let opts = QuadratureOptions::default();
        max_over(5, || {
            let o = HamiltonianOrbit::new(r.random_range(0.5..2.0))?;
            let xis: Vec<f64> = (0..16).map(|_| r.random_range(-20.0..20.0)).collect();
            let dh = o.dh(&xis, &opts)?;
            Ok(xis.iter().zip(&dh).fold(0.0f64, |m, (x, d)| {
                let e = dh_oracle(o.radius, *x);
                m.max((d.re - e).abs() / e.abs().max(1.0)).max(d.im.abs())
            }))
        })
    });
    reg.add("localization.dh_even", "Duistermaat-Heckman for the height function", 1e-12, pt(5), |_, r| {
        let opts = QuadratureOptions::default();
        max_over(5, || {
            let o = HamiltonianOrbit::new(r.random_range(0.5..2.0))?;
            let xis: Vec<f64> = (0..8).map(|_| r.random_range(0.0..20.0)).collect();
            let neg: Vec<f64> = xis.iter().map(|x| -x).collect();
            let (a, b) = (o.dh(&xis, &opts)?, o.dh(&neg, &opts)?);
            Ok(a.iter().zip(&b).fold(0.0f64, |m, (p, q)| m.max((p.re - q.re).abs())))
        })
    });
    reg.add("localization.union_additivity", "Duistermaat-Heckman for the height function", 1e-12, pt(5), |_, r| {
        let opts = QuadratureOptions::default();
        max_over(5, || {
            let (a, b) = (HamiltonianOrbit::new(r.random_range(0.5..2.0))?, HamiltonianOrbit::new(r.random_range(0.5..2.0))?);
            let xis: Vec<f64> = (0..8).map(|_| r.random_range(-10.0..10.0)).collect();
            let u = OrbitUnion(vec![a, b]).dh(&xis, &opts)?;
            let (da, db) = (a.dh(&xis, &opts)?, b.dh(&xis, &opts)?);
            Ok((0..xis.len()).fold(0.0f64, |m, i| m.max((u[i] - da[i] - db[i]).norm())))
        })
    });
    reg.add("localization.z_routes", "localization of the pairing against f_eps", 1e-6, pt(3), |_, _| {
        let opts = QuadratureOptions::default();
        let o = HamiltonianOrbit::new(1.0)?;
        let mut worst = 0.0f64;
        for eps in [0.1, 1.0, 10.0] {
            worst = worst.max(z_norm_squared(&o, eps, &opts)?.relative_difference());
        }
        Ok(worst)
    });
    reg.add("localization.z_doubling", "localization of the pairing against f_eps", 1e-8, pt(1), |_, _| {
        let opts = QuadratureOptions::default();
        let o = HamiltonianOrbit::new(1.0)?;
        let (a, b) = (z_norm_squared(&o, 1.0, &opts)?, z_norm_squared(&o, 1.0, &opts.doubled())?);
        Ok((a.pairing - b.pairing).abs() / b.pairing.abs())
    });
    reg.add("localization.z_pair", "factorization of the orbit pairing", 1e-5, pt(1), |_, _| {
        let opts = QuadratureOptions::default();
        Ok(z_pair(&HamiltonianOrbit::new(1.0)?, &HamiltonianOrbit::new(2.0)?, &opts)?.relative_difference())
    });
    reg.add("localization.support_doubling", "pushforward measure supported on the moment image", 0.03, pt(1), |_, _| {
        let opts = QuadratureOptions { fourier_nodes: 2048, ..QuadratureOptions::default() };
        let ts: Vec<f64> = (0..801).map(|i| -4.0 + 0.01 * i as f64).collect();
        let w1 = support_width(&ts, &pushforward_density(&HamiltonianOrbit::new(1.0)?, &ts, &opts)?);
        let w2 = support_width(&ts, &pushforward_density(&HamiltonianOrbit::new(2.0)?, &ts, &opts)?);
        Ok((w1 - 2.0).abs().max((w2 / w1 - 2.0).abs()))
    });
}
