//! FFT helpers for periodic sequences on `[0, 1)`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Cached forward and inverse plans for one length.
pub struct Plans {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

/// Returns shared plans for length `n`.
pub fn plans(n: usize) -> Arc<Plans> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Plans>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("plan cache poisoned");
    map.entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Plans {
                n,
                fwd: planner.plan_fft_forward(n),
                inv: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

/// Signed frequency of FFT bin `j` for length `n`.
#[inline]
pub fn freq(j: usize, n: usize) -> i64 {
    if j <= n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

impl Plans {
    /// Sequence length.
    pub fn len(&self) -> usize {
        self.n
    }

    /// Always false; plans exist only for positive lengths.
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// In-place derivative `d/ds` of a period-1 sequence, left unnormalized
    /// (scaled by `n`); the Nyquist bin is dropped.
    pub fn diff(&self, buf: &mut [Complex64]) {
        let n = self.n;
        self.fwd.process(buf);
        for (j, v) in buf.iter_mut().enumerate() {
            let m = freq(j, n);
            if n.is_multiple_of(2) && j == n / 2 {
                *v = Complex64::new(0.0, 0.0);
            } else {
                *v *= Complex64::new(0.0, 2.0 * PI * m as f64);
            }
        }
        self.inv.process(buf);
    }

    /// In-place filter keeping modes with `|m| <= cutoff`.
    pub fn band_limit(&self, buf: &mut [Complex64], cutoff: usize) {
        let n = self.n;
        self.fwd.process(buf);
        for (j, v) in buf.iter_mut().enumerate() {
            if freq(j, n).unsigned_abs() as usize > cutoff || (n.is_multiple_of(2) && j == n / 2) {
                *v = Complex64::new(0.0, 0.0);
            } else {
                *v /= n as f64;
            }
        }
        self.inv.process(buf);
    }

    /// Largest `|coefficient|` over modes with `|m| > cutoff` (normalized).
    pub fn tail(&self, buf: &mut [Complex64], cutoff: usize) -> f64 {
        let n = self.n;
        self.fwd.process(buf);
        buf.iter()
            .enumerate()
            .filter(|(j, _)| freq(*j, n).unsigned_abs() as usize > cutoff)
            .map(|(_, v)| v.norm() / n as f64)
            .fold(0.0, f64::max)
    }

    /// In-place trigonometric interpolation: `u(s) ↦ u(s + shift)`. The
    /// Nyquist bin keeps only its real (cosine) part.
    pub fn shift(&self, buf: &mut [Complex64], shift: f64) {
        let n = self.n;
        self.fwd.process(buf);
        for (j, v) in buf.iter_mut().enumerate() {
            let arg = 2.0 * PI * freq(j, n) as f64 * shift;
            if n.is_multiple_of(2) && j == n / 2 {
                *v *= arg.cos() / n as f64;
            } else {
                *v *= Complex64::from_polar(1.0 / n as f64, arg);
            }
        }
        self.inv.process(buf);
    }

    /// In-place solve of `(1 - c d^2/ds^2) u = f` for each mode.
    pub fn helmholtz_inverse(&self, buf: &mut [Complex64], c: f64) {
        let n = self.n;
        self.fwd.process(buf);
        for (j, v) in buf.iter_mut().enumerate() {
            let w = 2.0 * PI * freq(j, n) as f64;
            *v /= n as f64 * (1.0 + c * w * w);
        }
        self.inv.process(buf);
    }
}

/// Derivative of a real strided line; `out` receives `d/ds` at the same positions.
pub fn diff_real_strided(
    plans: &Plans,
    data: &[f64],
    out: &mut [f64],
    offset: usize,
    stride: usize,
    scratch: &mut Vec<Complex64>,
) {
    let n = plans.len();
    scratch.clear();
    scratch.extend((0..n).map(|j| Complex64::new(data[offset + j * stride], 0.0)));
    plans.diff(scratch);
    for j in 0..n {
        out[offset + j * stride] = scratch[j].re / n as f64;
    }
}

/// Derivative of a real period-1 sequence.
pub fn diff_real(data: &[f64]) -> Vec<f64> {
    let p = plans(data.len());
    let mut out = vec![0.0; data.len()];
    let mut scratch = Vec::with_capacity(data.len());
    diff_real_strided(&p, data, &mut out, 0, 1, &mut scratch);
    out
}

/// Solves `(1 - c Δ) u = f` on a periodic `nx × ny × nt` grid in place.
///
/// `data` uses the node layout `((i·ny + j)·nt + l)·vdim + a`.
pub fn helmholtz_inverse_3d(data: &mut [f64], dims: [usize; 3], vdim: usize, c: f64) {
    let [nx, ny, nt] = dims;
    let npts = nx * ny * nt;
    let strides = [ny * nt, nt, 1];
    let ps = [plans(nx), plans(ny), plans(nt)];
    let mut buf = vec![Complex64::new(0.0, 0.0); npts];
    let mut line = Vec::new();
    let run = |buf: &mut [Complex64], line: &mut Vec<Complex64>, inverse: bool| {
        for ax in 0..3 {
            let n = dims[ax];
            let st = strides[ax];
            for start in 0..npts {
                // first element of each line along `ax`
                if (start / st) % n != 0 {
                    continue;
                }
                line.clear();
                line.extend((0..n).map(|m| buf[start + m * st]));
                if inverse {
                    ps[ax].inv.process(line);
                } else {
                    ps[ax].fwd.process(line);
                }
                for (m, v) in line.iter().enumerate() {
                    buf[start + m * st] = *v;
                }
            }
        }
    };
    for a in 0..vdim {
        for (p, b) in buf.iter_mut().enumerate() {
            *b = Complex64::new(data[p * vdim + a], 0.0);
        }
        run(&mut buf, &mut line, false);
        for i in 0..nx {
            let kx = 2.0 * PI * freq(i, nx) as f64;
            for j in 0..ny {
                let ky = 2.0 * PI * freq(j, ny) as f64;
                for l in 0..nt {
                    let kt = 2.0 * PI * freq(l, nt) as f64;
                    let w = 1.0 + c * (kx * kx + ky * ky + kt * kt);
                    buf[(i * ny + j) * nt + l] /= npts as f64 * w;
                }
            }
        }
        run(&mut buf, &mut line, true);
        for (p, b) in buf.iter().enumerate() {
            data[p * vdim + a] = b.re;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_of_sine() {
        let n = 32;
        let f: Vec<f64> = (0..n)
            .map(|j| (2.0 * PI * 3.0 * j as f64 / n as f64).sin())
            .collect();
        let df = diff_real(&f);
        for (j, v) in df.iter().enumerate() {
            let e = 6.0 * PI * (2.0 * PI * 3.0 * j as f64 / n as f64).cos();
            assert!((v - e).abs() < 1e-12);
        }
    }

    #[test]
    fn band_limit_removes_high_modes() {
        let n = 24;
        let p = plans(n);
        let mut buf: Vec<Complex64> = (0..n)
            .map(|j| {
                let t = j as f64 / n as f64;
                Complex64::new((2.0 * PI * t).cos() + (2.0 * PI * 9.0 * t).sin(), 0.0)
            })
            .collect();
        p.band_limit(&mut buf, 4);
        for (j, v) in buf.iter().enumerate() {
            let t = j as f64 / n as f64;
            assert!((v.re - (2.0 * PI * t).cos()).abs() < 1e-13);
        }
    }
}
