//! JSON and flat binary encodings of [`FieldGrid`].
//!
//! Both carry a header with the bundle degree, grid sizes, form degree and
//! value dimension. Components are stored in the order of
//! [`crate::manifold::components`]: `(dx, dy, dθ)` for 1-forms and
//! `(dx∧dy, dx∧dθ, dy∧dθ)` for 2-forms; within a component nodes run
//! `(x, y, θ)` with θ fastest and the value index innermost.
//!
//! Binary layout, all little-endian:
//! `b"CFLD"`, `u32` version, `i64` degree, three `u32` sizes, `u8` form
//! degree, `u32` value dimension, `u8` base-only flag, then the `f64` data.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold::{components, FieldGrid, Shape};

/// Format version written by the encoders.
pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &[u8; 4] = b"CFLD";
const HEADER_LEN: usize = 4 + 4 + 8 + 3 * 4 + 1 + 4 + 1;
/// Largest value dimension accepted by the decoders.
pub const MAX_VDIM: usize = 1024;

/// Header shared by both encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldHeader {
    /// Format version.
    pub version: u32,
    /// Grid and bundle degree.
    pub shape: Shape,
    /// Form degree `p`.
    pub form_degree: usize,
    /// Values per node and component.
    pub vdim: usize,
    /// θ-independence flag.
    pub base_only: bool,
}

impl FieldHeader {
    fn of(f: &FieldGrid) -> Self {
        Self {
            version: FORMAT_VERSION,
            shape: f.shape(),
            form_degree: f.form_degree(),
            vdim: f.vdim(),
            base_only: f.base_only(),
        }
    }

    fn validate(&self) -> Result<usize> {
        if self.version != FORMAT_VERSION {
            return Err(Error::Decode(format!("unsupported version {}", self.version)));
        }
        self.shape.validate().map_err(|e| Error::Decode(e.to_string()))?;
        if self.form_degree > 3 {
            return Err(Error::Decode(format!("form degree {}", self.form_degree)));
        }
        if self.vdim == 0 || self.vdim > MAX_VDIM {
            return Err(Error::Decode(format!("value dimension {}", self.vdim)));
        }
        Ok(self.shape.npts() * self.vdim)
    }
}

#[derive(Serialize, Deserialize)]
struct FieldDocument {
    header: FieldHeader,
    components: Vec<Vec<f64>>,
}

fn assemble(h: FieldHeader, comps: Vec<Vec<f64>>) -> Result<FieldGrid> {
    let len = h.validate()?;
    if comps.len() != components(h.form_degree).len() {
        return Err(Error::Decode(format!(
            "{} components for a {}-form",
            comps.len(),
            h.form_degree
        )));
    }
    if let Some(c) = comps.iter().find(|c| c.len() != len) {
        return Err(Error::Decode(format!("component of length {}, expected {len}", c.len())));
    }
    if comps.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Decode("non-finite sample".into()));
    }
    Ok(FieldGrid::from_components(h.shape, h.form_degree, h.vdim, comps)?.with_base_only(h.base_only))
}

/// Encodes a field as a JSON document.
pub fn to_json(f: &FieldGrid) -> Result<String> {
    Ok(serde_json::to_string(&FieldDocument {
        header: FieldHeader::of(f),
        components: f.comps().to_vec(),
    })?)
}

/// Decodes a JSON document produced by [`to_json`].
pub fn from_json(s: &str) -> Result<FieldGrid> {
    let doc: FieldDocument = serde_json::from_str(s).map_err(|e| Error::Decode(e.to_string()))?;
    assemble(doc.header, doc.components)
}

/// Encodes a field in the flat binary layout.
pub fn to_bytes(f: &FieldGrid) -> Vec<u8> {
    let s = f.shape();
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * f.comps().iter().map(Vec::len).sum::<usize>());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&s.degree.to_le_bytes());
    for n in [s.nx, s.ny, s.nt] {
        out.extend_from_slice(&(n as u32).to_le_bytes());
    }
    out.push(f.form_degree() as u8);
    out.extend_from_slice(&(f.vdim() as u32).to_le_bytes());
    out.push(f.base_only() as u8);
    for c in f.comps() {
        for v in c {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        let end = self.pos.checked_add(N).filter(|e| *e <= self.buf.len());
        let end = end.ok_or_else(|| Error::Decode("truncated input".into()))?;
        let out = self.buf[self.pos..end].try_into().expect("length checked");
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take()?))
    }
}

/// Decodes the flat binary layout produced by [`to_bytes`].
pub fn from_bytes(buf: &[u8]) -> Result<FieldGrid> {
    let mut r = Reader { buf, pos: 0 };
    if &r.take::<4>()? != MAGIC {
        return Err(Error::Decode("bad magic".into()));
    }
    let version = r.u32()?;
    let degree = i64::from_le_bytes(r.take()?);
    let (nx, ny, nt) = (r.u32()? as usize, r.u32()? as usize, r.u32()? as usize);
    let form_degree = r.take::<1>()?[0] as usize;
    let vdim = r.u32()? as usize;
    let base_only = match r.take::<1>()?[0] {
        0 => false,
        1 => true,
        b => return Err(Error::Decode(format!("base-only flag {b}"))),
    };
    let h = FieldHeader {
        version,
        shape: Shape { degree, nx, ny, nt },
        form_degree,
        vdim,
        base_only,
    };
    let len = h.validate()?;
    let ncomp = components(form_degree.min(3)).len();
    let expected = HEADER_LEN + 8 * len * ncomp;
    if buf.len() != expected {
        return Err(Error::Decode(format!("{} bytes, expected {expected}", buf.len())));
    }
    let comps = (0..ncomp)
        .map(|_| (0..len).map(|_| Ok(f64::from_le_bytes(r.take()?))).collect::<Result<Vec<f64>>>())
        .collect::<Result<Vec<_>>>()?;
    assemble(h, comps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> FieldGrid {
        FieldGrid::from_fn(Shape { degree: 2, nx: 8, ny: 8, nt: 16 }, 1, 3, |x, y, t, c| {
            c[0][0] = x;
            c[1][1] = y * t;
            c[2][2] = -t;
        })
    }

    #[test]
    fn round_trips() {
        let f = sample();
        assert_eq!(from_json(&to_json(&f).unwrap()).unwrap(), f);
        assert_eq!(from_bytes(&to_bytes(&f)).unwrap(), f);
    }

    #[test]
    fn rejects_damage() {
        let b = to_bytes(&sample());
        assert!(from_bytes(&b[..b.len() - 1]).is_err());
        let mut bad = b.clone();
        bad[0] = b'X';
        assert!(from_bytes(&bad).is_err());
        // n_theta = 12 is not a multiple of n_y = 8.
        let mut bad = b.clone();
        bad[24..28].copy_from_slice(&12u32.to_le_bytes());
        assert!(matches!(from_bytes(&bad), Err(Error::Decode(_))));
        assert!(from_json("{\"header\":1}").is_err());
    }
}
