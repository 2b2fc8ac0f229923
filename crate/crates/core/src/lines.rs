//! Octonionic lines in `O ⊕ O ≅ R^16`.
//!
//! For `m ∈ O` the line `ℓ_m = {(u, m u)}`; `ℓ_∞ = {(0, u)}`. Every nonzero
//! vector lies on exactly one line, and the line through `(a, b)` with
//! `a ≠ 0` is `ℓ_{b a^{-1}}` (not `{(a u, b u)}`, which fails to be a line
//! because the product is not associative).

use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{random_orthogonal_with, RealMatrix};
use crate::octonion::Octonion;
use crate::rng::gaussian;
use crate::tol::Tolerance;

/// A vector `(u, v)` of `O ⊕ O`, identified with `R^16` as `[u_0..u_7, v_0..v_7]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CayleyVector {
    pub u: Octonion,
    pub v: Octonion,
}

impl CayleyVector {
    pub const ZERO: Self = Self {
        u: Octonion::ZERO,
        v: Octonion::ZERO,
    };

    pub const fn new(u: Octonion, v: Octonion) -> Self {
        Self { u, v }
    }

    pub fn from_slice(x: &[f64]) -> Result<Self> {
        if x.len() != 16 {
            return Err(Error::DimensionMismatch {
                expected: 16,
                actual: x.len(),
            });
        }
        let mut u = [0.0; 8];
        let mut v = [0.0; 8];
        u.copy_from_slice(&x[..8]);
        v.copy_from_slice(&x[8..]);
        Ok(Self::new(Octonion(u), Octonion(v)))
    }

    pub fn to_array(&self) -> [f64; 16] {
        let mut out = [0.0; 16];
        out[..8].copy_from_slice(&self.u.0);
        out[8..].copy_from_slice(&self.v.0);
        out
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.u.dot(&other.u) + self.v.dot(&other.v)
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        crate::sqrt(self.norm_sq())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.u.scale(s), self.v.scale(s))
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::new(random_octonion(rng), random_octonion(rng))
    }
}

impl Add for CayleyVector {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.u + rhs.u, self.v + rhs.v)
    }
}

impl Sub for CayleyVector {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.u - rhs.u, self.v - rhs.v)
    }
}

impl Neg for CayleyVector {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl Mul<f64> for CayleyVector {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.scale(rhs)
    }
}

/// Gaussian octonion (each coefficient standard normal).
pub fn random_octonion<R: Rng + ?Sized>(rng: &mut R) -> Octonion {
    Octonion(core::array::from_fn(|_| gaussian(rng)))
}

/// A point of `O ∪ {∞}`, naming the line `ℓ_m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LineParam {
    Finite(Octonion),
    Infinity,
}

/// Relative tolerance under which two finite line parameters are treated as
/// the same line: `|m_r - m_s| <= 1e-8 (1 + |m_r|)`.
pub const SAME_LINE_REL_TOL: f64 = 1e-8;

impl LineParam {
    pub const ORIGIN: Self = LineParam::Finite(Octonion::ZERO);

    pub fn same_line(&self, other: &LineParam, rel_tol: f64) -> bool {
        match (self, other) {
            (LineParam::Infinity, LineParam::Infinity) => true,
            (LineParam::Finite(a), LineParam::Finite(b)) => {
                (*a - *b).norm() <= rel_tol * (1.0 + a.norm())
            }
            _ => false,
        }
    }

    /// The point `(u, m u)` (or `(0, u)` at infinity).
    pub fn point(&self, u: Octonion) -> CayleyVector {
        match self {
            LineParam::Finite(m) => CayleyVector::new(u, *m * u),
            LineParam::Infinity => CayleyVector::new(Octonion::ZERO, u),
        }
    }
}

/// The line containing `x`: `ℓ_{v u^{-1}}` when `|u| > abs_tol`, else `ℓ_∞`.
pub fn line_through(x: &CayleyVector, tol: Tolerance) -> Result<LineParam> {
    if x.norm() <= tol.abs_tol {
        return Err(Error::ZeroVector);
    }
    if x.u.norm() > tol.abs_tol {
        let inv = x.u.inverse(tol)?;
        Ok(LineParam::Finite(x.v * inv))
    } else {
        Ok(LineParam::Infinity)
    }
}

/// The standard orthonormal basis of a line as the columns of a `16 x 8`
/// matrix: `(I_s, m I_s) / sqrt(1 + |m|^2)`, or `(0, I_s)` at infinity.
pub fn line_basis(m: &LineParam) -> RealMatrix {
    let mut b = RealMatrix::zeros(16, 8);
    match m {
        LineParam::Finite(m) => {
            let c = 1.0 / crate::sqrt(1.0 + m.norm_sq());
            for s in 0..8 {
                let col = CayleyVector::new(Octonion::unit(s), *m * Octonion::unit(s)).scale(c);
                for (i, v) in col.to_array().iter().enumerate() {
                    b[(i, s)] = *v;
                }
            }
        }
        LineParam::Infinity => {
            for s in 0..8 {
                b[(8 + s, s)] = 1.0;
            }
        }
    }
    b
}

/// Standard basis rotated by a Haar-random element of `O(8)`.
pub fn random_line_basis<R: Rng + ?Sized>(m: &LineParam, rng: &mut R) -> RealMatrix {
    line_basis(m)
        .matmul(&random_orthogonal_with(8, rng))
        .expect("16x8 times 8x8")
}

/// Orthogonal projection onto a line, computed through its basis.
pub fn project_onto_line(x: &CayleyVector, m: &LineParam) -> CayleyVector {
    project_with_basis(x, &line_basis(m))
}

pub(crate) fn project_with_basis(x: &CayleyVector, basis: &RealMatrix) -> CayleyVector {
    let xa = x.to_array();
    let mut coords = [0.0; 8];
    for (k, c) in coords.iter_mut().enumerate() {
        *c = (0..16).map(|i| basis[(i, k)] * xa[i]).sum();
    }
    let mut out = [0.0; 16];
    for (i, o) in out.iter_mut().enumerate() {
        *o = (0..8).map(|k| basis[(i, k)] * coords[k]).sum();
    }
    CayleyVector::from_slice(&out).expect("16 entries")
}

/// `B_1^T B_2 = c Q` for orthonormal bases of two lines.
#[derive(Debug, Clone, PartialEq)]
pub struct LineGram {
    pub c: f64,
    pub q: RealMatrix,
    /// `|Q^T Q - I_8|_F` (zero by construction when `c` is negligible).
    pub orthogonality_residual: f64,
}

/// Extracts `c = |G|_F / sqrt(8)` and `Q = G / c` from `G = B_1^T B_2` and
/// checks that `Q` is orthogonal.
///
/// Both bases are validated: each must be `16 x 8`, orthonormal, and lie on
/// its line, all within `tol.bound(1)`. A non-orthogonal `Q` is reported as
/// [`Error::LemmaViolation`]; it cannot happen for genuine octonionic lines.
pub fn line_gram(
    m1: &LineParam,
    m2: &LineParam,
    b1: &RealMatrix,
    b2: &RealMatrix,
    tol: Tolerance,
) -> Result<LineGram> {
    validate_line_basis(m1, b1, tol)?;
    validate_line_basis(m2, b2, tol)?;
    gram_of_bases(b1, b2, tol)
}

/// [`line_gram`] without the basis validation; used on internally built bases.
pub(crate) fn gram_of_bases(b1: &RealMatrix, b2: &RealMatrix, tol: Tolerance) -> Result<LineGram> {
    let g = b1.tr_matmul(b2)?;
    let c = g.frobenius_norm() / crate::sqrt(8.0);
    if c <= tol.abs_tol {
        return Ok(LineGram {
            c,
            q: RealMatrix::identity(8),
            orthogonality_residual: 0.0,
        });
    }
    let q = g.scaled(1.0 / c);
    let orthogonality_residual = q.orthogonality_residual();
    if orthogonality_residual > tol.bound(1.0) / c {
        return Err(Error::LemmaViolation {
            residual: orthogonality_residual,
        });
    }
    Ok(LineGram {
        c,
        q,
        orthogonality_residual,
    })
}

fn validate_line_basis(m: &LineParam, b: &RealMatrix, tol: Tolerance) -> Result<()> {
    if b.shape() != (16, 8) {
        return Err(Error::ShapeMismatch {
            left: (16, 8),
            right: b.shape(),
        });
    }
    let residual = b.orthogonality_residual();
    if residual > tol.bound(1.0) {
        return Err(Error::NotOrthonormalBasis { residual });
    }
    let standard = line_basis(m);
    for column in 0..8 {
        let x = CayleyVector::from_slice(&b.column(column))?;
        let off = (project_with_basis(&x, &standard) - x).norm();
        if off > tol.bound(1.0) {
            return Err(Error::NotOnLine {
                column,
                residual: off,
            });
        }
    }
    Ok(())
}

/// The octonionic Hopf map `S^15 -> S^8 ≅ O ∪ {∞}`.
pub fn hopf(x: &CayleyVector, tol: Tolerance) -> Result<LineParam> {
    let norm = x.norm();
    if (norm - 1.0).abs() > tol.bound(1.0) {
        return Err(Error::NotUnit { norm });
    }
    line_through(x, tol)
}

/// Columns of `x` read as Cayley vectors.
pub fn columns_as_vectors(x: &RealMatrix) -> Result<Vec<CayleyVector>> {
    (0..x.cols())
        .map(|j| CayleyVector::from_slice(&x.column(j)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn assert_vec_close(a: &CayleyVector, b: &CayleyVector, eps: f64) {
        assert!((*a - *b).norm() <= eps, "{a:?} vs {b:?}");
    }

    #[test]
    fn line_through_examples() {
        let x = CayleyVector::new(Octonion::ONE, Octonion::ZERO);
        assert_eq!(line_through(&x, tol()).unwrap(), LineParam::ORIGIN);
        let y = CayleyVector::new(Octonion::ZERO, Octonion::unit(2));
        assert_eq!(line_through(&y, tol()).unwrap(), LineParam::Infinity);
        assert_eq!(
            line_through(&CayleyVector::ZERO, tol()),
            Err(Error::ZeroVector)
        );
    }

    #[test]
    fn line_through_contains_the_vector() {
        let mut rng = seeded(31);
        for _ in 0..1000 {
            let x = CayleyVector::random(&mut rng);
            let m = line_through(&x, tol()).unwrap();
            let p = project_onto_line(&x, &m);
            assert_vec_close(&p, &x, 1e-10 * x.norm());
        }
    }

    #[test]
    fn naive_span_is_not_the_line() {
        // {(a u, b u)} is not ℓ_{b a^{-1}} in general.
        let mut rng = seeded(32);
        let a = random_octonion(&mut rng);
        let b = random_octonion(&mut rng);
        let u = random_octonion(&mut rng);
        let naive = CayleyVector::new(a * u, b * u);
        let m = line_through(&CayleyVector::new(a, b), tol()).unwrap();
        let off = (project_onto_line(&naive, &m) - naive).norm();
        assert!(off > 1e-3 * naive.norm());
    }

    #[test]
    fn basis_examples() {
        let b0 = line_basis(&LineParam::ORIGIN);
        for s in 0..8 {
            let col = b0.column(s);
            for (i, v) in col.iter().enumerate() {
                assert_eq!(*v, if i == s { 1.0 } else { 0.0 });
            }
        }
        let binf = line_basis(&LineParam::Infinity);
        for s in 0..8 {
            assert_eq!(binf[(8 + s, s)], 1.0);
        }
        let b1 = line_basis(&LineParam::Finite(Octonion::unit(1)));
        assert!(b1.orthogonality_residual() <= 1e-12);
    }

    #[test]
    fn basis_orthonormal_for_random_lines() {
        let mut rng = seeded(33);
        for _ in 0..200 {
            let m = LineParam::Finite(random_octonion(&mut rng));
            let b = line_basis(&m);
            assert!(b.orthogonality_residual() <= 1e-12);
            for x in columns_as_vectors(&b).unwrap() {
                assert_eq!(line_through(&x, tol()).unwrap().same_line(&m, 1e-10), true);
            }
        }
    }

    #[test]
    fn projection_examples() {
        let x = CayleyVector::new(Octonion::ONE, Octonion::ZERO);
        assert_eq!(project_onto_line(&x, &LineParam::Infinity), CayleyVector::ZERO);
        let p = project_onto_line(&x, &LineParam::Finite(Octonion::unit(1)));
        assert!((p.norm_sq() - 0.5).abs() < 1e-15);
        assert_eq!(project_onto_line(&x, &LineParam::ORIGIN), x);
    }

    #[test]
    fn projection_closed_form_oracle() {
        // Minimizing |p - u|^2 + |q - m u|^2 over u gives
        // u = (p + m* q) / (1 + |m|^2) by identity <m u, q> = <u, m* q>.
        let mut rng = seeded(34);
        for _ in 0..500 {
            let m = random_octonion(&mut rng);
            let x = CayleyVector::random(&mut rng);
            let u = (x.u + m.conj() * x.v).scale(1.0 / (1.0 + m.norm_sq()));
            let oracle = CayleyVector::new(u, m * u);
            let p = project_onto_line(&x, &LineParam::Finite(m));
            assert_vec_close(&p, &oracle, 1e-12 * (1.0 + x.norm()));
        }
    }

    #[test]
    fn projection_is_idempotent_and_self_adjoint() {
        let mut rng = seeded(35);
        for _ in 0..300 {
            let m = LineParam::Finite(random_octonion(&mut rng));
            let x = CayleyVector::random(&mut rng);
            let y = CayleyVector::random(&mut rng);
            let px = project_onto_line(&x, &m);
            let py = project_onto_line(&y, &m);
            assert_vec_close(&project_onto_line(&px, &m), &px, 1e-12 * x.norm());
            assert!((px.dot(&y) - x.dot(&py)).abs() <= 1e-12 * x.norm() * y.norm());
            assert!(px.norm() <= x.norm() * (1.0 + 1e-15));
        }
    }

    #[test]
    fn line_gram_examples() {
        let b0 = line_basis(&LineParam::ORIGIN);
        let g = line_gram(&LineParam::ORIGIN, &LineParam::ORIGIN, &b0, &b0, tol()).unwrap();
        assert!((g.c - 1.0).abs() < 1e-15);
        assert_eq!(g.q, RealMatrix::identity(8));

        let binf = line_basis(&LineParam::Infinity);
        let g = line_gram(&LineParam::ORIGIN, &LineParam::Infinity, &b0, &binf, tol()).unwrap();
        assert_eq!(g.c, 0.0);
        assert_eq!(g.q, RealMatrix::identity(8));

        let mut rng = seeded(36);
        for _ in 0..100 {
            let m = random_octonion(&mut rng);
            let lm = LineParam::Finite(m);
            let g = line_gram(&LineParam::ORIGIN, &lm, &b0, &line_basis(&lm), tol()).unwrap();
            let expected = 1.0 / crate::sqrt(1.0 + m.norm_sq());
            assert!((g.c - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn line_gram_rejects_bad_bases() {
        let b0 = line_basis(&LineParam::ORIGIN);
        let binf = line_basis(&LineParam::Infinity);
        assert!(matches!(
            line_gram(&LineParam::ORIGIN, &LineParam::ORIGIN, &b0, &binf, tol()),
            Err(Error::NotOnLine { .. })
        ));
        assert!(matches!(
            line_gram(&LineParam::ORIGIN, &LineParam::ORIGIN, &b0.scaled(2.0), &b0, tol()),
            Err(Error::NotOrthonormalBasis { .. })
        ));
        assert!(matches!(
            line_gram(
                &LineParam::ORIGIN,
                &LineParam::ORIGIN,
                &RealMatrix::zeros(16, 7),
                &b0,
                tol()
            ),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn generic_subspaces_violate_the_lemma() {
        // An arbitrary 8-dim subspace is not an octonionic line, and its Gram
        // with ℓ_0 is generally not a multiple of an orthogonal matrix.
        let mut rng = seeded(37);
        let g = RealMatrix::gaussian(16, 8, &mut rng);
        let (q, _) = crate::linalg::qr(&g).unwrap();
        let b0 = line_basis(&LineParam::ORIGIN);
        assert!(matches!(
            gram_of_bases(&b0, &q, tol()),
            Err(Error::LemmaViolation { .. })
        ));
    }

    #[test]
    fn c_is_basis_independent_and_distinct_lines_meet_at_zero() {
        let mut rng = seeded(38);
        for _ in 0..100 {
            let m1 = LineParam::Finite(random_octonion(&mut rng));
            let m2 = LineParam::Finite(random_octonion(&mut rng));
            let g1 = line_gram(&m1, &m2, &line_basis(&m1), &line_basis(&m2), tol()).unwrap();
            let r1 = random_line_basis(&m1, &mut rng);
            let r2 = random_line_basis(&m2, &mut rng);
            let g2 = line_gram(&m1, &m2, &r1, &r2, tol()).unwrap();
            assert!((g1.c - g2.c).abs() <= 1e-10);
            assert!(g2.orthogonality_residual <= 1e-10);
            // operator norm of c Q is c
            let op = crate::linalg::singular_values(&r1.tr_matmul(&r2).unwrap())[0];
            assert!((op - g2.c).abs() < 1e-12);
            assert!(op < 1.0);
        }
    }

    #[test]
    fn hopf_examples_and_fiber() {
        let t = tol();
        let x = CayleyVector::new(Octonion::ONE, Octonion::ZERO);
        assert_eq!(hopf(&x, t).unwrap(), LineParam::ORIGIN);
        let y = CayleyVector::new(Octonion::ZERO, Octonion::ONE);
        assert_eq!(hopf(&y, t).unwrap(), LineParam::Infinity);
        assert!(matches!(hopf(&x.scale(2.0), t), Err(Error::NotUnit { .. })));

        let mut rng = seeded(39);
        for _ in 0..1000 {
            let m = random_octonion(&mut rng);
            let u = random_octonion(&mut rng);
            let line = LineParam::Finite(m);
            let x = line.point(u);
            let x = x.scale(1.0 / x.norm());
            let w = random_octonion(&mut rng);
            let w = w.scale(1.0 / w.norm());
            let moved = line.point(x.u * w);
            let h1 = hopf(&x, t).unwrap();
            let h2 = hopf(&moved, t).unwrap();
            assert!(h1.same_line(&h2, 1e-10));
            assert!(h1.same_line(&line, 1e-10));
        }
    }

    #[test]
    fn same_line_rules() {
        let a = LineParam::Finite(Octonion::unit(1));
        let b = LineParam::Finite(Octonion::unit(1).scale(1.0 + 1e-10));
        assert!(a.same_line(&b, SAME_LINE_REL_TOL));
        assert!(!a.same_line(&LineParam::Infinity, SAME_LINE_REL_TOL));
        assert!(LineParam::Infinity.same_line(&LineParam::Infinity, 0.0));
        assert!(!a.same_line(&LineParam::ORIGIN, SAME_LINE_REL_TOL));
    }
}
