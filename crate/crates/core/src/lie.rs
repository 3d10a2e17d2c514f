//! Matrix Lie algebra su(n) and group SU(n).
//!
//! Elements of the algebra are handled in two forms: as anti-hermitian
//! traceless matrices ([`LieMatrix`]) and as real coordinate vectors in the
//! orthonormal basis `t_a = -(i/2) λ_a`, where `λ_a` are the generalized
//! Gell-Mann matrices. With the pairing `<X,Y> = -2 Re Tr(XY)` the basis is
//! orthonormal, so the pairing is the Euclidean dot product of coordinates.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex square matrix.
pub type CMat = DMatrix<Complex64>;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Tolerance used when validating anti-hermiticity and tracelessness.
pub const LIE_MATRIX_TOL: f64 = 1e-13;
/// Tolerance used when validating unitarity and unit determinant.
pub const GROUP_MATRIX_TOL: f64 = 1e-12;

/// The Lie algebra su(n) with a fixed orthonormal basis.
#[derive(Debug, Clone)]
pub struct SuN {
    n: usize,
    basis: Vec<CMat>,
    /// Nonzero structure constants `f_abc = <[t_a,t_b], t_c>` with `a < b`.
    structure: Vec<(usize, usize, usize, f64)>,
}

impl SuN {
    /// Builds su(n) for `n >= 2`.
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidRank(n));
        }
        let mut gell_mann = Vec::with_capacity(n * n - 1);
        for j in 0..n {
            for k in (j + 1)..n {
                let mut s = CMat::zeros(n, n);
                s[(j, k)] = Complex64::new(1.0, 0.0);
                s[(k, j)] = Complex64::new(1.0, 0.0);
                gell_mann.push(s);
                let mut a = CMat::zeros(n, n);
                a[(j, k)] = -I;
                a[(k, j)] = I;
                gell_mann.push(a);
            }
        }
        for l in 1..n {
            let c = (2.0 / (l * (l + 1)) as f64).sqrt();
            let mut d = CMat::zeros(n, n);
            for m in 0..l {
                d[(m, m)] = Complex64::new(c, 0.0);
            }
            d[(l, l)] = Complex64::new(-c * l as f64, 0.0);
            gell_mann.push(d);
        }
        let basis: Vec<CMat> = gell_mann.into_iter().map(|g| g * (-0.5 * I)).collect();
        let dim = basis.len();
        let mut structure = Vec::new();
        for a in 0..dim {
            for b in (a + 1)..dim {
                let comm = &basis[a] * &basis[b] - &basis[b] * &basis[a];
                for (c, tc) in basis.iter().enumerate() {
                    let f = pair_matrices(&comm, tc);
                    if f.abs() > 1e-14 {
                        structure.push((a, b, c, f));
                    }
                }
            }
        }
        Ok(Self {
            n,
            basis,
            structure,
        })
    }

    /// Matrix size `n`.
    pub fn rank(&self) -> usize {
        self.n
    }

    /// Real dimension `n^2 - 1`.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Basis matrix `t_a`.
    pub fn generator(&self, a: usize) -> &CMat {
        &self.basis[a]
    }

    /// Structure constants as `(a, b, c, f_abc)` with `a < b`.
    pub fn structure_constants(&self) -> &[(usize, usize, usize, f64)] {
        &self.structure
    }

    /// Bracket of coordinate vectors, accumulated into `out` with weight `w`.
    #[inline]
    pub fn bracket_acc(&self, x: &[f64], y: &[f64], w: f64, out: &mut [f64]) {
        for &(a, b, c, f) in &self.structure {
            out[c] += w * f * (x[a] * y[b] - x[b] * y[a]);
        }
    }

    /// Bracket of coordinate vectors.
    pub fn bracket_coords(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.bracket_acc(x, y, 1.0, &mut out);
        out
    }

    /// Pairing of coordinate vectors (Euclidean dot product).
    #[inline]
    pub fn pair_coords(x: &[f64], y: &[f64]) -> f64 {
        x.iter().zip(y).map(|(a, b)| a * b).sum()
    }

    /// Matrix of a coordinate vector.
    pub fn to_matrix(&self, x: &[f64]) -> LieMatrix {
        let mut m = CMat::zeros(self.n, self.n);
        for (xa, t) in x.iter().zip(&self.basis) {
            m += t * Complex64::new(*xa, 0.0);
        }
        LieMatrix(m)
    }

    /// Coordinates of a matrix, `x_a = <X, t_a>`.
    pub fn coords(&self, m: &CMat) -> Vec<f64> {
        self.basis.iter().map(|t| pair_matrices(m, t)).collect()
    }

    /// Coordinates of `g X g^-1`.
    pub fn adjoint_coords(&self, g: &CMat, x: &[f64]) -> Vec<f64> {
        let m = self.to_matrix(x);
        self.coords(&(g * &m.0 * g.adjoint()))
    }

    /// Coordinates of `g^-1 X g`.
    pub fn adjoint_inv_coords(&self, g: &CMat, x: &[f64]) -> Vec<f64> {
        let m = self.to_matrix(x);
        self.coords(&(g.adjoint() * &m.0 * g))
    }

    /// Group element `exp(X)` from coordinates.
    pub fn exp_coords(&self, x: &[f64]) -> GroupMatrix {
        GroupMatrix(self.to_matrix(x).0.exp())
    }
}

/// `-2 Re Tr(XY)`.
pub fn pair_matrices(x: &CMat, y: &CMat) -> f64 {
    let mut tr = Complex64::new(0.0, 0.0);
    for i in 0..x.nrows() {
        for j in 0..x.ncols() {
            tr += x[(i, j)] * y[(j, i)];
        }
    }
    -2.0 * tr.re
}

/// Anti-hermitian traceless matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct LieMatrix(pub CMat);

impl LieMatrix {
    /// Validates anti-hermiticity and tracelessness.
    pub fn new(m: CMat) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Shape("Lie matrix must be square".into()));
        }
        let herm = (&m + m.adjoint()).norm();
        let tr = m.trace().norm();
        if herm > LIE_MATRIX_TOL || tr > LIE_MATRIX_TOL {
            return Err(Error::NotInAlgebra { herm, trace: tr });
        }
        Ok(Self(m))
    }

    /// Zero element of su(n).
    pub fn zero(n: usize) -> Self {
        Self(CMat::zeros(n, n))
    }

    /// Matrix size.
    pub fn rank(&self) -> usize {
        self.0.nrows()
    }

    /// Commutator `XY - YX`.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        check_rank(self.rank(), other.rank())?;
        Ok(Self(&self.0 * &other.0 - &other.0 * &self.0))
    }

    /// `-2 Re Tr(XY)`.
    pub fn pair(&self, other: &Self) -> Result<f64> {
        check_rank(self.rank(), other.rank())?;
        Ok(pair_matrices(&self.0, &other.0))
    }

    /// Matrix exponential.
    pub fn exp(&self) -> GroupMatrix {
        GroupMatrix(self.0.exp())
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0.norm()
    }
}

/// Special unitary matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupMatrix(pub CMat);

impl GroupMatrix {
    /// Validates unitarity and unit determinant.
    pub fn new(m: CMat) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Shape("group matrix must be square".into()));
        }
        let n = m.nrows();
        let unitary = (&m * m.adjoint() - CMat::identity(n, n)).norm();
        let det = (m.determinant() - Complex64::new(1.0, 0.0)).norm();
        if unitary > GROUP_MATRIX_TOL || det > GROUP_MATRIX_TOL {
            return Err(Error::NotInGroup { unitary, det });
        }
        Ok(Self(m))
    }

    /// Identity of SU(n).
    pub fn identity(n: usize) -> Self {
        Self(CMat::identity(n, n))
    }

    /// Inverse (conjugate transpose).
    pub fn inverse(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// Adjoint action `g X g^-1`.
    pub fn adjoint(&self, x: &LieMatrix) -> Result<LieMatrix> {
        check_rank(self.0.nrows(), x.rank())?;
        Ok(LieMatrix(&self.0 * &x.0 * self.0.adjoint()))
    }

    /// Group product.
    pub fn mul(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0)
    }
}

fn check_rank(a: usize, b: usize) -> Result<()> {
    if a != b {
        Err(Error::RankMismatch(a, b))
    } else {
        Ok(())
    }
}

/// `sum_{j <= terms} ad_X^j(Y) / j!`, a truncated series for `Ad_{exp X} Y`.
pub fn ad_series(x: &LieMatrix, y: &LieMatrix, terms: usize) -> LieMatrix {
    let mut term = y.0.clone();
    let mut acc = y.0.clone();
    for j in 1..=terms {
        term = (&x.0 * &term - &term * &x.0) / Complex64::new(j as f64, 0.0);
        acc += &term;
    }
    LieMatrix(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pauli() -> [CMat; 3] {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        [
            CMat::from_row_slice(2, 2, &[o, l, l, o]),
            CMat::from_row_slice(2, 2, &[o, -I, I, o]),
            CMat::from_row_slice(2, 2, &[l, o, o, -l]),
        ]
    }

    #[test]
    fn su2_basis_is_minus_half_i_pauli() {
        let g = SuN::new(2).unwrap();
        for (a, s) in pauli().iter().enumerate() {
            let expected = s * (-0.5 * I);
            assert!((g.generator(a) - expected).norm() < 1e-15);
        }
    }

    #[test]
    fn t1_t2_bracket_is_t3() {
        // Direct 2x2 products of the Pauli matrices.
        let p = pauli();
        let t: Vec<CMat> = p.iter().map(|s| s * (-0.5 * I)).collect();
        let direct = &t[0] * &t[1] - &t[1] * &t[0];
        assert!((direct.clone() - &t[2]).norm() < 1e-15);
        let g = SuN::new(2).unwrap();
        let b = LieMatrix(g.generator(0).clone())
            .bracket(&LieMatrix(g.generator(1).clone()))
            .unwrap();
        assert!((b.0 - &t[2]).norm() < 1e-15);
        assert_eq!(g.bracket_coords(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]), vec![0.0, 0.0, 1.0]);
        assert_eq!(g.bracket_coords(&[0.0, 1.0, 0.0], &[1.0, 0.0, 0.0]), vec![0.0, 0.0, -1.0]);
        assert_eq!(g.bracket_coords(&[1.0, 0.0, 0.0], &[1.0, 0.0, 0.0]), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn pairing_values() {
        // Tr(sigma_1^2) = 2 and Tr(sigma_1 sigma_2) = 0.
        let p = pauli();
        assert!(((&p[0] * &p[0]).trace().re - 2.0).abs() < 1e-15);
        assert!((&p[0] * &p[1]).trace().norm() < 1e-15);
        let g = SuN::new(2).unwrap();
        let t1 = LieMatrix(g.generator(0).clone());
        let t2 = LieMatrix(g.generator(1).clone());
        assert!((t1.pair(&t1).unwrap() - 1.0).abs() < 1e-15);
        assert!(t1.pair(&t2).unwrap().abs() < 1e-15);
        assert_eq!(LieMatrix::zero(2).pair(&t2).unwrap(), 0.0);
    }

    #[test]
    fn orthonormal_for_higher_rank() {
        for n in 2..=4 {
            let g = SuN::new(n).unwrap();
            assert_eq!(g.dim(), n * n - 1);
            for a in 0..g.dim() {
                for b in 0..g.dim() {
                    let p = pair_matrices(g.generator(a), g.generator(b));
                    let e = if a == b { 1.0 } else { 0.0 };
                    assert!((p - e).abs() < 1e-14, "n={n} a={a} b={b} p={p}");
                }
                LieMatrix::new(g.generator(a).clone()).unwrap();
            }
        }
    }

    #[test]
    fn adjoint_by_pi_rotation_flips_t1() {
        // exp(pi t3) rotates the (t1,t2) plane by pi.
        let g = SuN::new(2).unwrap();
        let h = g.exp_coords(&[0.0, 0.0, std::f64::consts::PI]);
        let r = h.adjoint(&LieMatrix(g.generator(0).clone())).unwrap();
        assert!((r.0 + g.generator(0)).norm() < 1e-14);
        assert_eq!(
            GroupMatrix::identity(2).adjoint(&LieMatrix(g.generator(1).clone())).unwrap().0,
            g.generator(1).clone()
        );
        assert!((LieMatrix::zero(2).exp().0 - CMat::identity(2, 2)).norm() < 1e-15);
    }

    #[test]
    fn rank_mismatch_is_an_error() {
        let a = LieMatrix::zero(2);
        let b = LieMatrix::zero(3);
        assert!(matches!(a.bracket(&b), Err(Error::RankMismatch(2, 3))));
        assert!(a.pair(&b).is_err());
        assert!(SuN::new(1).is_err());
    }
}
