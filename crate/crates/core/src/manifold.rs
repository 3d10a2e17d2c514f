//! Sampled differential forms on the degree-d circle bundle `M_d -> T²`.
//!
//! `M_d` is `R² × S¹` modulo `(x,y,θ) ~ (x+1, y, θ-d·y) ~ (x, y+1, θ) ~ (x, y, θ+1)`,
//! a quotient that preserves `κ = dθ + d·x·dy`. Nodes sit at
//! `(i/n_x, j/n_y, l/n_θ)`. Coefficients are stored in the coordinate
//! coframe with component order `dx, dy, dθ` (2-forms: `dx∧dy, dx∧dθ, dy∧dθ`;
//! 3-forms: `dx∧dy∧dθ`). Derivatives in y and θ are spectral; in x they are
//! spectral for `d = 0` and 6th-order centred differences with twisted ghost
//! cells otherwise.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::SuN;
use crate::spectral;

/// Geometry and discretization parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeometrySpec {
    /// Degree `d` of the circle bundle.
    pub degree: i64,
    /// Grid size in x.
    pub n_x: usize,
    /// Grid size in y.
    pub n_y: usize,
    /// Grid size along the fiber.
    pub n_theta: usize,
    /// Level `k`.
    pub level: i64,
    /// `n` of su(n).
    pub group_rank: usize,
}

impl Default for GeometrySpec {
    fn default() -> Self {
        Self {
            degree: 0,
            n_x: 32,
            n_y: 32,
            n_theta: 32,
            level: 1,
            group_rank: 2,
        }
    }
}

impl GeometrySpec {
    /// Checks grid constraints.
    pub fn validate(&self) -> Result<()> {
        self.shape().validate()?;
        if self.group_rank < 2 {
            return Err(Error::InvalidGeometry(format!(
                "group rank {} < 2",
                self.group_rank
            )));
        }
        Ok(())
    }

    /// Grid shape.
    pub fn shape(&self) -> Shape {
        Shape {
            degree: self.degree,
            nx: self.n_x,
            ny: self.n_y,
            nt: self.n_theta,
        }
    }
}

/// Grid shape together with the bundle degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shape {
    /// Bundle degree `d`.
    pub degree: i64,
    /// Points in x.
    pub nx: usize,
    /// Points in y.
    pub ny: usize,
    /// Points in θ.
    pub nt: usize,
}

/// Upper bound on grid points accepted by constructors and decoders.
pub const MAX_POINTS: usize = 1 << 24;

impl Shape {
    /// Cubic grid of size `n`.
    pub fn cube(degree: i64, n: usize) -> Self {
        Self {
            degree,
            nx: n,
            ny: n,
            nt: n,
        }
    }

    /// Checks sizes and the divisibility needed for exact gluing shifts.
    pub fn validate(&self) -> Result<()> {
        if self.nx < 8 || self.ny < 8 || self.nt < 8 {
            return Err(Error::InvalidGeometry(format!(
                "grid sizes must be >= 8, got {}x{}x{}",
                self.nx, self.ny, self.nt
            )));
        }
        if !self.nt.is_multiple_of(self.ny) {
            return Err(Error::InvalidGeometry(format!(
                "n_theta = {} is not a multiple of n_y = {}",
                self.nt, self.ny
            )));
        }
        if self
            .nx
            .checked_mul(self.ny)
            .and_then(|v| v.checked_mul(self.nt))
            .is_none_or(|v| v > MAX_POINTS)
        {
            return Err(Error::InvalidGeometry("grid too large".into()));
        }
        Ok(())
    }

    /// Total number of nodes.
    pub fn npts(&self) -> usize {
        self.nx * self.ny * self.nt
    }

    /// Number of base nodes.
    pub fn nbase(&self) -> usize {
        self.nx * self.ny
    }

    /// Linear index of node `(i, j, l)`; θ varies fastest.
    #[inline]
    pub fn idx(&self, i: usize, j: usize, l: usize) -> usize {
        (i * self.ny + j) * self.nt + l
    }

    /// Node coordinates.
    #[inline]
    pub fn coords(&self, i: usize, j: usize, l: usize) -> (f64, f64, f64) {
        (
            i as f64 / self.nx as f64,
            j as f64 / self.ny as f64,
            l as f64 / self.nt as f64,
        )
    }

    /// θ-index shift `d·y_j` in grid units, reduced mod `n_θ`.
    #[inline]
    pub fn theta_shift(&self, j: usize) -> usize {
        let s = self.degree * j as i64 * (self.nt / self.ny) as i64;
        s.rem_euclid(self.nt as i64) as usize
    }
}

/// Multi-indices of the coordinate components of `p`-forms.
pub fn components(p: usize) -> &'static [&'static [usize]] {
    const C0: &[&[usize]] = &[&[]];
    const C1: &[&[usize]] = &[&[0], &[1], &[2]];
    const C2: &[&[usize]] = &[&[0, 1], &[0, 2], &[1, 2]];
    const C3: &[&[usize]] = &[&[0, 1, 2]];
    match p {
        0 => C0,
        1 => C1,
        2 => C2,
        _ => C3,
    }
}

fn component_index(p: usize, set: &[usize]) -> usize {
    components(p)
        .iter()
        .position(|c| *c == set)
        .expect("valid multi-index")
}

/// Coefficient transition across the x-gluing.
///
/// `up = true` gives `M` with `w(x+1, y, θ) = M w(x, y, θ + d y)`;
/// `up = false` gives `w(x-1, y, θ) = M w(x, y, θ - d y)`.
pub fn transition(p: usize, d: f64, up: bool) -> [[f64; 3]; 3] {
    let s = if up { d } else { -d };
    let mut m = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    match p {
        1 => m[1][2] = s,
        2 => m[0][1] = s,
        _ => {}
    }
    m
}

/// A sampled `p`-form with values in `R^vdim` (real or Lie coordinates).
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    shape: Shape,
    form_degree: usize,
    vdim: usize,
    base_only: bool,
    comps: Vec<Vec<f64>>,
}

const FD6: [f64; 3] = [3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0];

impl FieldGrid {
    /// Zero form.
    pub fn zeros(shape: Shape, form_degree: usize, vdim: usize) -> Self {
        assert!(form_degree <= 3, "form degree");
        let ncomp = components(form_degree).len();
        Self {
            shape,
            form_degree,
            vdim,
            base_only: false,
            comps: vec![vec![0.0; shape.npts() * vdim]; ncomp],
        }
    }

    /// Wraps component arrays.
    pub fn from_components(
        shape: Shape,
        form_degree: usize,
        vdim: usize,
        comps: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if form_degree > 3 {
            return Err(Error::DegreeOverflow(form_degree));
        }
        if comps.len() != components(form_degree).len()
            || comps.iter().any(|c| c.len() != shape.npts() * vdim)
        {
            return Err(Error::Shape("component arrays do not match grid".into()));
        }
        Ok(Self {
            shape,
            form_degree,
            vdim,
            base_only: false,
            comps,
        })
    }

    /// Samples `f(x, y, θ)` into a `p`-form; `f` writes all components for one node.
    pub fn from_fn(
        shape: Shape,
        form_degree: usize,
        vdim: usize,
        f: impl Fn(f64, f64, f64, &mut [Vec<f64>]),
    ) -> Self {
        let mut out = Self::zeros(shape, form_degree, vdim);
        let ncomp = out.comps.len();
        let mut buf = vec![vec![0.0; vdim]; ncomp];
        for i in 0..shape.nx {
            for j in 0..shape.ny {
                for l in 0..shape.nt {
                    let (x, y, t) = shape.coords(i, j, l);
                    for b in buf.iter_mut() {
                        b.iter_mut().for_each(|v| *v = 0.0);
                    }
                    f(x, y, t, &mut buf);
                    let p = shape.idx(i, j, l);
                    for (c, b) in buf.iter().enumerate() {
                        out.comps[c][p * vdim..(p + 1) * vdim].copy_from_slice(b);
                    }
                }
            }
        }
        out
    }

    /// Grid shape.
    pub fn shape(&self) -> Shape {
        self.shape
    }

    /// Form degree.
    pub fn form_degree(&self) -> usize {
        self.form_degree
    }

    /// Values per node and component.
    pub fn vdim(&self) -> usize {
        self.vdim
    }

    /// Whether the field is flagged θ-independent (a field on Σ).
    pub fn base_only(&self) -> bool {
        self.base_only
    }

    /// Sets the base-only flag.
    pub fn with_base_only(mut self, flag: bool) -> Self {
        self.base_only = flag;
        self
    }

    /// Component arrays.
    pub fn comps(&self) -> &[Vec<f64>] {
        &self.comps
    }

    /// Mutable component arrays.
    pub fn comps_mut(&mut self) -> &mut [Vec<f64>] {
        &mut self.comps
    }

    /// Component array `c`.
    pub fn comp(&self, c: usize) -> &[f64] {
        &self.comps[c]
    }

    /// Values of component `c` at node index `p`.
    #[inline]
    pub fn at(&self, c: usize, p: usize) -> &[f64] {
        &self.comps[c][p * self.vdim..(p + 1) * self.vdim]
    }

    fn same_layout(&self, other: &Self) -> Result<()> {
        if self.shape != other.shape
            || self.form_degree != other.form_degree
            || self.vdim != other.vdim
        {
            return Err(Error::GridMismatch(format!(
                "fields ({:?}, p={}, v={}) and ({:?}, p={}, v={})",
                self.shape, self.form_degree, self.vdim, other.shape, other.form_degree, other.vdim
            )));
        }
        Ok(())
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: f64, other: &Self) -> Result<Self> {
        self.same_layout(other)?;
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.iter().zip(b).map(|(u, v)| u + c * v).collect())
            .collect();
        Ok(Self {
            comps,
            base_only: self.base_only && other.base_only,
            ..*self
        })
    }

    /// `c * self`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            comps: self
                .comps
                .iter()
                .map(|a| a.iter().map(|v| c * v).collect())
                .collect(),
            ..*self
        }
    }

    /// Largest absolute coefficient.
    pub fn sup_norm(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Sup-norm of `self - other`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(self.axpy(-1.0, other)?.sup_norm())
    }

    /// Root mean square of all coefficients.
    pub fn rms(&self) -> f64 {
        let n: usize = self.comps.iter().map(|c| c.len()).sum();
        let s: f64 = self.comps.iter().flat_map(|c| c.iter()).map(|v| v * v).sum();
        (s / n.max(1) as f64).sqrt()
    }

    /// Derivatives `[∂_x, ∂_y, ∂_θ]` of every component.
    pub fn partials(&self) -> [Vec<Vec<f64>>; 3] {
        [self.partial_x(), self.partial_spectral(1), self.partial_spectral(2)]
    }

    /// Partial derivative along `axis` (0 = x, 1 = y, 2 = θ) of every coefficient.
    pub fn partial(&self, axis: usize) -> FieldGrid {
        let comps = match axis {
            0 => self.partial_x(),
            a => self.partial_spectral(a),
        };
        Self { comps, ..*self }
    }

    fn partial_spectral(&self, axis: usize) -> Vec<Vec<f64>> {
        let s = self.shape;
        let v = self.vdim;
        let (n, stride) = match axis {
            0 => (s.nx, s.ny * s.nt * v),
            1 => (s.ny, s.nt * v),
            _ => (s.nt, v),
        };
        let plans = spectral::plans(n);
        let mut scratch = Vec::with_capacity(n);
        self.comps
            .iter()
            .map(|data| {
                let mut out = vec![0.0; data.len()];
                let (o1, o2) = match axis {
                    0 => (s.ny * s.nt, 1),
                    1 => (s.nx, s.nt),
                    _ => (s.nx * s.ny, 1),
                };
                for outer in 0..o1 {
                    for inner in 0..o2 {
                        let base = match axis {
                            0 => outer * v,
                            1 => outer * s.ny * s.nt * v + inner * v,
                            _ => outer * s.nt * v,
                        };
                        for a in 0..v {
                            spectral::diff_real_strided(
                                &plans,
                                data,
                                &mut out,
                                base + a,
                                stride,
                                &mut scratch,
                            );
                        }
                    }
                }
                out
            })
            .collect()
    }

    fn partial_x(&self) -> Vec<Vec<f64>> {
        if self.shape.degree == 0 {
            return self.partial_spectral(0);
        }
        let s = self.shape;
        let v = self.vdim;
        let ncomp = self.comps.len();
        let h = 1.0 / s.nx as f64;
        let mut out = vec![vec![0.0; s.npts() * v]; ncomp];
        let value = |c, ii, j, l, a| self.glued_value(c, ii, j, l, a);
        for (c, oc) in out.iter_mut().enumerate() {
            for i in 0..s.nx {
                for j in 0..s.ny {
                    for l in 0..s.nt {
                        for a in 0..v {
                            let mut acc = 0.0;
                            for (k, w) in FD6.iter().enumerate() {
                                let o = (k + 1) as i64;
                                acc += w
                                    * (value(c, i as i64 + o, j, l, a) - value(c, i as i64 - o, j, l, a));
                            }
                            oc[s.idx(i, j, l) * v + a] = acc / h;
                        }
                    }
                }
            }
        }
        out
    }

    /// Value of component `c`, slot `a`, at x-index `ii` (any integer,
    /// possibly outside `0..n_x`), obtained through the twisted gluing.
    pub fn glued_value(&self, c: usize, ii: i64, j: usize, l: usize, a: usize) -> f64 {
        let s = self.shape;
        let v = self.vdim;
        let nx = s.nx as i64;
        let wraps = ii.div_euclid(nx);
        let i0 = ii.rem_euclid(nx) as usize;
        if wraps == 0 {
            return self.comps[c][s.idx(i0, j, l) * v + a];
        }
        let ncomp = self.comps.len();
        let d = s.degree as f64 * wraps as f64;
        let m = transition(self.form_degree, d, true);
        // w(x+n, y, θ) = M(n d) w(x, y, θ + n d y)
        let shift = (s.theta_shift(j) as i64 * wraps).rem_euclid(s.nt as i64) as usize;
        let q = s.idx(i0, j, (l + shift) % s.nt) * v + a;
        if ncomp != 3 {
            return self.comps[c][q];
        }
        (0..3).map(|cc| m[c][cc] * self.comps[cc][q]).sum()
    }
}

/// Converts coefficients in the adapted coframe to coordinate components.
///
/// The adapted coframe is `(dx, dy, κ)` for 1-forms and
/// `(dx∧dy, dx∧κ, dy∧κ)` for 2-forms; adapted coefficients of a global form
/// are twisted-periodic scalars. Degrees 0 and 3 are unchanged.
pub fn from_frame(frame: FieldGrid) -> FieldGrid {
    frame_convert(frame, 1.0)
}

/// Inverse of [`from_frame`].
pub fn to_frame(coord: FieldGrid) -> FieldGrid {
    frame_convert(coord, -1.0)
}

fn frame_convert(mut w: FieldGrid, sign: f64) -> FieldGrid {
    let s = w.shape;
    let v = w.vdim;
    let d = s.degree as f64;
    let (dst, src) = match w.form_degree {
        1 => (1, 2),
        2 => (0, 1),
        _ => return w,
    };
    let src_vals = w.comps[src].clone();
    let out = &mut w.comps[dst];
    for i in 0..s.nx {
        let fx = sign * d * i as f64 / s.nx as f64;
        let lo = s.idx(i, 0, 0) * v;
        let hi = s.idx(i + 1, 0, 0).min(s.npts()) * v;
        for q in lo..hi {
            out[q] += fx * src_vals[q];
        }
    }
    w
}

/// Exterior derivative, restricted to the directions with `mask[axis] = true`.
pub fn exterior_d_masked(w: &FieldGrid, mask: [bool; 3]) -> Result<FieldGrid> {
    let p = w.form_degree;
    if p >= 3 {
        return Err(Error::DegreeOverflow(p + 1));
    }
    let parts = w.partials();
    let mut out = FieldGrid::zeros(w.shape, p + 1, w.vdim);
    for (jc, set) in components(p + 1).iter().enumerate() {
        for (pos, &k) in set.iter().enumerate() {
            if !mask[k] {
                continue;
            }
            let rest: Vec<usize> = set.iter().copied().filter(|&e| e != k).collect();
            let ic = component_index(p, &rest);
            let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
            for (o, dv) in out.comps[jc].iter_mut().zip(&parts[k][ic]) {
                *o += sign * dv;
            }
        }
    }
    out.base_only = w.base_only;
    Ok(out)
}

/// Exterior derivative on `M_d`.
pub fn exterior_d(w: &FieldGrid) -> Result<FieldGrid> {
    exterior_d_masked(w, [true, true, true])
}

/// Exterior derivative along the base directions only (forms on Σ with
/// loop values sampled along the fiber).
pub fn exterior_d_sigma(w: &FieldGrid) -> Result<FieldGrid> {
    exterior_d_masked(w, [true, true, false])
}

fn merge_sign(a: &[usize], b: &[usize]) -> Option<(Vec<usize>, f64)> {
    let mut all: Vec<usize> = a.iter().chain(b).copied().collect();
    let mut sign = 1.0;
    for i in 0..all.len() {
        for j in 0..all.len() - 1 - i {
            if all[j] == all[j + 1] {
                return None;
            }
            if all[j] > all[j + 1] {
                all.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    if all.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((all, sign))
}

/// Wedge product with a bilinear value product.
///
/// `prod(a, b, w, out)` must accumulate `w * (a ⋅ b)` into `out`.
pub fn wedge_with(
    a: &FieldGrid,
    b: &FieldGrid,
    out_vdim: usize,
    prod: impl Fn(&[f64], &[f64], f64, &mut [f64]),
) -> Result<FieldGrid> {
    if a.shape != b.shape {
        return Err(Error::GridMismatch("wedge of fields on different grids".into()));
    }
    let p = a.form_degree + b.form_degree;
    if p > 3 {
        return Ok(FieldGrid::zeros(a.shape, 3, out_vdim));
    }
    let mut out = FieldGrid::zeros(a.shape, p, out_vdim);
    let (va, vb) = (a.vdim, b.vdim);
    for (ia, sa) in components(a.form_degree).iter().enumerate() {
        for (ib, sb) in components(b.form_degree).iter().enumerate() {
            let Some((set, sign)) = merge_sign(sa, sb) else {
                continue;
            };
            let jc = component_index(p, &set);
            let (ca, cb) = (&a.comps[ia], &b.comps[ib]);
            let oc = &mut out.comps[jc];
            for q in 0..a.shape.npts() {
                prod(
                    &ca[q * va..(q + 1) * va],
                    &cb[q * vb..(q + 1) * vb],
                    sign,
                    &mut oc[q * out_vdim..(q + 1) * out_vdim],
                );
            }
        }
    }
    out.base_only = a.base_only && b.base_only;
    Ok(out)
}

/// Wedge of a real form with a form of any value dimension.
pub fn wedge_scalar(f: &FieldGrid, w: &FieldGrid) -> Result<FieldGrid> {
    if f.vdim != 1 {
        return Err(Error::Shape("left factor must be real".into()));
    }
    wedge_with(f, w, w.vdim, |a, b, s, o| {
        for (oo, bb) in o.iter_mut().zip(b) {
            *oo += s * a[0] * bb;
        }
    })
}

/// Graded bracket `[α ∧ β]` of Lie-valued forms.
pub fn wedge_bracket(g: &SuN, a: &FieldGrid, b: &FieldGrid) -> Result<FieldGrid> {
    wedge_with(a, b, g.dim(), |x, y, s, o| g.bracket_acc(x, y, s, o))
}

/// Pairing `<α ∧ β>` of Lie-valued forms.
pub fn wedge_pair(a: &FieldGrid, b: &FieldGrid) -> Result<FieldGrid> {
    if a.vdim != b.vdim {
        return Err(Error::Shape("pairing of different value dimensions".into()));
    }
    wedge_with(a, b, 1, |x, y, s, o| {
        o[0] += s * SuN::pair_coords(x, y);
    })
}

/// Contraction with the fiber generator `R = ∂_θ`, using `ι_R dθ = 1`.
pub fn interior_r(w: &FieldGrid) -> Result<FieldGrid> {
    let p = w.form_degree;
    if p == 0 {
        return Err(Error::WrongDegree {
            expected: 1,
            got: 0,
        });
    }
    let mut out = FieldGrid::zeros(w.shape, p - 1, w.vdim);
    match p {
        1 => out.comps[0].clone_from(&w.comps[2]),
        2 => {
            out.comps[0] = w.comps[1].iter().map(|v| -v).collect();
            out.comps[1] = w.comps[2].iter().map(|v| -v).collect();
        }
        _ => out.comps[0].clone_from(&w.comps[0]),
    }
    out.base_only = w.base_only;
    Ok(out)
}

/// The connection form `κ = dθ + d·x·dy`.
#[derive(Debug, Clone, PartialEq)]
pub struct Kappa(FieldGrid);

impl Kappa {
    /// Standard κ on `M_d`.
    pub fn standard(shape: Shape) -> Self {
        let d = shape.degree as f64;
        Self(
            FieldGrid::from_fn(shape, 1, 1, |x, _, _, c| {
                c[1][0] = d * x;
                c[2][0] = 1.0;
            })
            .with_base_only(true),
        )
    }

    /// Wraps a real 1-form after checking `ι_Rκ = 1` and θ-independence.
    pub fn new(form: FieldGrid) -> Result<Self> {
        if form.form_degree != 1 || form.vdim != 1 {
            return Err(Error::Shape("κ must be a real 1-form".into()));
        }
        if form.comps[2].iter().any(|v| (v - 1.0).abs() > 1e-12) {
            return Err(Error::Shape("ι_R κ must equal 1".into()));
        }
        let lr = form.partial_spectral(2);
        if lr.iter().flat_map(|c| c.iter()).any(|v| v.abs() > 1e-12) {
            return Err(Error::Shape("κ must be θ-independent".into()));
        }
        Ok(Self(form.with_base_only(true)))
    }

    /// Underlying 1-form.
    pub fn form(&self) -> &FieldGrid {
        &self.0
    }

    /// Grid shape.
    pub fn shape(&self) -> Shape {
        self.0.shape
    }
}

/// `P̄_κ ω = ω - κ ∧ ι_R ω`.
pub fn project_horizontal(w: &FieldGrid, kappa: &Kappa) -> Result<FieldGrid> {
    let ir = interior_r(w)?;
    let k_ir = wedge_scalar(kappa.form(), &ir)?;
    let mut out = w.axpy(-1.0, &k_ir)?;
    // ι_R of the result vanishes identically; clear rounding in the dθ slots.
    match w.form_degree {
        1 => out.comps[2].iter_mut().for_each(|v| *v = 0.0),
        2 => {
            out.comps[1].iter_mut().for_each(|v| *v = 0.0);
            out.comps[2].iter_mut().for_each(|v| *v = 0.0);
        }
        3 => out.comps[0].iter_mut().for_each(|v| *v = 0.0),
        _ => {}
    }
    Ok(out)
}

/// Fiber average `K`: θ-mean broadcast along each fiber.
pub fn fiber_average_k(w: &FieldGrid) -> FieldGrid {
    let s = w.shape;
    let v = w.vdim;
    let mut out = w.clone();
    for c in out.comps.iter_mut() {
        for b in 0..s.nbase() {
            for a in 0..v {
                let mean: f64 =
                    (0..s.nt).map(|l| c[(b * s.nt + l) * v + a]).sum::<f64>() / s.nt as f64;
                for l in 0..s.nt {
                    c[(b * s.nt + l) * v + a] = mean;
                }
            }
        }
    }
    out.base_only = true;
    out
}

/// `∫_M α = ∫_Σ ι_R K α` for a real top form, by midpoint quadrature.
pub fn fiber_integrate(a: &FieldGrid) -> Result<f64> {
    if a.form_degree != 3 {
        return Err(Error::WrongDegree {
            expected: 3,
            got: a.form_degree,
        });
    }
    if a.vdim != 1 {
        return Err(Error::Shape("fiber integration needs a real form".into()));
    }
    let k = fiber_average_k(&interior_r(a)?);
    let s = a.shape;
    let total: f64 = (0..s.nbase()).map(|b| k.comps[0][b * s.nt]).sum();
    Ok(total / s.nbase() as f64)
}

/// Base integral of the `dx∧dy` coefficient of a real 2-form, averaged over the fiber.
pub fn base_integrate(w: &FieldGrid) -> Result<f64> {
    if w.form_degree != 2 || w.vdim != 1 {
        return Err(Error::WrongDegree {
            expected: 2,
            got: w.form_degree,
        });
    }
    Ok(w.comps[0].iter().sum::<f64>() / w.shape.npts() as f64)
}

/// Pointwise pairing of two Lie-valued 0-forms.
pub fn pointwise_pair(a: &FieldGrid, b: &FieldGrid) -> Result<FieldGrid> {
    wedge_pair(a, b)
}
