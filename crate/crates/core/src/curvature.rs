//! Curvature of the Cayley plane `OP^2` at a point, with the tangent space
//! identified with `O ⊕ O`, and the second fundamental form of its isotropic
//! embedding obtained from the Gauss equation.

use crate::Square;
use crate::error::{Error, Result};
use crate::lines::CayleyVector;

/// Maximum sectional curvature `λ²` of the ambient projective space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureScale(f64);

impl CurvatureScale {
    pub fn new(lambda_sq: f64) -> Result<Self> {
        if lambda_sq.is_finite() && lambda_sq > 0.0 {
            Ok(Self(lambda_sq))
        } else {
            Err(Error::BadScale(lambda_sq))
        }
    }

    /// `λ² = 4`, so sectional curvatures of `OP^2` lie in `[1, 4]`.
    pub const fn cayley_plane() -> Self {
        Self(4.0)
    }

    /// Holomorphic sectional curvature `2m/(m+2)` of `CP^{m/2}` (real dimension `m`).
    pub fn complex_projective(real_dim: usize) -> Result<Self> {
        let m = real_dim as f64;
        Self::new(2.0 * m / (m + 2.0))
    }

    /// Maximum sectional curvature `2m/(m+4)` of `HP^{m/4}` (real dimension `m`).
    pub fn quaternionic_projective(real_dim: usize) -> Result<Self> {
        let m = real_dim as f64;
        Self::new(2.0 * m / (m + 4.0))
    }

    #[inline]
    pub fn lambda_sq(&self) -> f64 {
        self.0
    }
}

impl Default for CurvatureScale {
    fn default() -> Self {
        Self::cayley_plane()
    }
}

/// `<R(X, Y) Z, W>` for `X = (a, b)`, `Y = (c, d)`, `Z = (e, f)`, `W = (g, h)`:
///
/// ```text
/// λ²/4 ( -4<a,e><c,g> + 4<c,e><a,g> - 4<b,f><d,h> + 4<d,f><b,h>
///        + <e d*, g b*> - <e b*, g d*> + <c f*, a h*> - <a f*, c h*>
///        + <a d* - c b*, g f* - e h*> )
/// ```
pub fn curvature_full(
    x: &CayleyVector,
    y: &CayleyVector,
    z: &CayleyVector,
    w: &CayleyVector,
    scale: CurvatureScale,
) -> f64 {
    let (a, b) = (x.u, x.v);
    let (c, d) = (y.u, y.v);
    let (e, f) = (z.u, z.v);
    let (g, h) = (w.u, w.v);
    let (bs, ds, fs, hs) = (b.conj(), d.conj(), f.conj(), h.conj());

    let real_block = -4.0 * a.dot(&e) * c.dot(&g) + 4.0 * c.dot(&e) * a.dot(&g)
        - 4.0 * b.dot(&f) * d.dot(&h)
        + 4.0 * d.dot(&f) * b.dot(&h);
    let mixed = (e * ds).dot(&(g * bs)) - (e * bs).dot(&(g * ds)) + (c * fs).dot(&(a * hs))
        - (a * fs).dot(&(c * hs));
    let cross = (a * ds - c * bs).dot(&(g * fs - e * hs));

    0.25 * scale.lambda_sq() * (real_block + mixed + cross)
}

/// `<R(X, Y) X, Y>` from the specialized closed form
///
/// ```text
/// λ²/4 ( -4|a|²|c|² + 4<a,c>² - 4|b|²|d|² + 4<b,d>²
///        + 2<a d*, c b*> - 2<a b*, c d*> - |a d* - c b*|² )
/// ```
pub fn curvature_diag(x: &CayleyVector, y: &CayleyVector, scale: CurvatureScale) -> f64 {
    let (a, b) = (x.u, x.v);
    let (c, d) = (y.u, y.v);
    let (bs, ds) = (b.conj(), d.conj());
    let ad = a * ds;
    let cb = c * bs;
    let t = -4.0 * a.norm_sq() * c.norm_sq() + 4.0 * a.dot(&c).sq()
        - 4.0 * b.norm_sq() * d.norm_sq()
        + 4.0 * b.dot(&d).sq()
        + 2.0 * ad.dot(&cb)
        - 2.0 * (a * bs).dot(&(c * ds))
        - (ad - cb).norm_sq();
    0.25 * scale.lambda_sq() * t
}

/// Sectional curvature `K(X, Y) = -<R(X,Y)X,Y> / (|X|²|Y|² - <X,Y>²)`.
///
/// The sign makes planes inside an octonionic line have `K = λ²`. Returns
/// `None` for degenerate (parallel or zero) pairs.
pub fn sectional_curvature(x: &CayleyVector, y: &CayleyVector, scale: CurvatureScale) -> Option<f64> {
    let area_sq = x.norm_sq() * y.norm_sq() - x.dot(y).sq();
    if !(area_sq > 1e-300) {
        return None;
    }
    Some(-curvature_diag(x, y, scale) / area_sq)
}

/// `<B(X,Y), B(Z,W)>` for the isotropic embedding, via the Gauss equation:
///
/// ```text
/// 3<B(X,Y),B(Z,W)> = <R(X,Z)W,Y> + <R(X,W)Z,Y>
///                  + λ²(<X,Y><Z,W> + <X,W><Y,Z> + <X,Z><W,Y>)
/// ```
pub fn gauss_2ff_inner(
    x: &CayleyVector,
    y: &CayleyVector,
    z: &CayleyVector,
    w: &CayleyVector,
    scale: CurvatureScale,
) -> f64 {
    let l2 = scale.lambda_sq();
    let curv = curvature_full(x, z, w, y, scale) + curvature_full(x, w, z, y, scale);
    let metric = x.dot(y) * z.dot(w) + x.dot(w) * y.dot(z) + x.dot(z) * w.dot(y);
    (curv + l2 * metric) / 3.0
}

/// `R(X,Y,Z,W) + R(Y,Z,X,W) + R(Z,X,Y,W)`.
pub fn bianchi_residual(
    x: &CayleyVector,
    y: &CayleyVector,
    z: &CayleyVector,
    w: &CayleyVector,
    scale: CurvatureScale,
) -> f64 {
    curvature_full(x, y, z, w, scale)
        + curvature_full(y, z, x, w, scale)
        + curvature_full(z, x, y, w, scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::octonion::Octonion;
    use crate::rng::seeded;

    fn cv(u: Octonion, v: Octonion) -> CayleyVector {
        CayleyVector::new(u, v)
    }

    fn e0() -> CayleyVector {
        cv(Octonion::ONE, Octonion::ZERO)
    }

    #[test]
    fn scale_constructors() {
        assert!(CurvatureScale::new(0.0).is_err());
        assert!(CurvatureScale::new(f64::NAN).is_err());
        assert_eq!(CurvatureScale::complex_projective(4).unwrap().lambda_sq(), 8.0 / 6.0);
        assert_eq!(CurvatureScale::quaternionic_projective(8).unwrap().lambda_sq(), 16.0 / 12.0);
        assert_eq!(CurvatureScale::default().lambda_sq(), 4.0);
    }

    #[test]
    fn hand_evaluated_values() {
        let s = CurvatureScale::cayley_plane();
        let x = e0();
        let y_line = cv(Octonion::unit(1), Octonion::ZERO);
        let y_cross = cv(Octonion::ZERO, Octonion::ONE);
        assert_eq!(curvature_full(&x, &x, &y_line, &y_cross, s), 0.0);
        assert_eq!(curvature_full(&x, &y_line, &x, &y_line, s), -4.0);
        assert_eq!(curvature_full(&x, &y_cross, &x, &y_cross, s), -1.0);
        assert_eq!(curvature_diag(&x, &y_line, s), -4.0);
        assert_eq!(curvature_diag(&x, &y_cross, s), -1.0);
        assert_eq!(curvature_diag(&x, &x, s), 0.0);
        assert_eq!(sectional_curvature(&x, &y_line, s), Some(4.0));
        assert_eq!(sectional_curvature(&x, &y_cross, s), Some(1.0));
        assert_eq!(sectional_curvature(&x, &x, s), None);
    }

    #[test]
    fn diag_matches_full_specialization() {
        let s = CurvatureScale::cayley_plane();
        let mut rng = seeded(41);
        for _ in 0..2000 {
            let x = CayleyVector::random(&mut rng);
            let y = CayleyVector::random(&mut rng);
            let full = curvature_full(&x, &y, &x, &y, s);
            let diag = curvature_diag(&x, &y, s);
            let bound = 1e-10 * (1.0 + x.norm_sq() * y.norm_sq()).sq();
            assert!((full - diag).abs() <= bound);
        }
    }

    #[test]
    fn tensor_symmetries_and_bianchi() {
        let s = CurvatureScale::new(2.5).unwrap();
        let mut rng = seeded(42);
        for _ in 0..1000 {
            let [x, y, z, w]: [CayleyVector; 4] =
                core::array::from_fn(|_| CayleyVector::random(&mut rng));
            let r = curvature_full(&x, &y, &z, &w, s);
            assert!((r + curvature_full(&y, &x, &z, &w, s)).abs() < 1e-10);
            assert!((r + curvature_full(&x, &y, &w, &z, s)).abs() < 1e-10);
            assert!((r - curvature_full(&z, &w, &x, &y, s)).abs() < 1e-10);
            assert!(bianchi_residual(&x, &y, &z, &w, s).abs() < 1e-10);
        }
    }

    #[test]
    fn isotropy_of_second_fundamental_form() {
        let s = CurvatureScale::cayley_plane();
        let x = e0();
        assert!((gauss_2ff_inner(&x, &x, &x, &x, s) - 4.0).abs() < 1e-15);
        let mut rng = seeded(43);
        for _ in 0..1000 {
            let x = CayleyVector::random(&mut rng);
            let x = x.scale(1.0 / x.norm());
            assert!((gauss_2ff_inner(&x, &x, &x, &x, s) - 4.0).abs() < 1e-10);
        }
    }

    #[test]
    fn cross_line_second_fundamental_form() {
        // |B(X,Y)|^2 for X=(1,0), Y=(0,1): (1/3)(-λ²/4 + λ²) = λ²/4
        let s = CurvatureScale::cayley_plane();
        let x = e0();
        let y = cv(Octonion::ZERO, Octonion::ONE);
        assert!((gauss_2ff_inner(&x, &y, &x, &y, s) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gauss_form_symmetries() {
        let s = CurvatureScale::cayley_plane();
        let mut rng = seeded(44);
        for _ in 0..300 {
            let [x, y, z, w]: [CayleyVector; 4] =
                core::array::from_fn(|_| CayleyVector::random(&mut rng));
            let v = gauss_2ff_inner(&x, &y, &z, &w, s);
            assert!((v - gauss_2ff_inner(&y, &x, &z, &w, s)).abs() < 1e-9);
            assert!((v - gauss_2ff_inner(&x, &y, &w, &z, s)).abs() < 1e-9);
            assert!((v - gauss_2ff_inner(&z, &w, &x, &y, s)).abs() < 1e-9);
        }
    }

    #[test]
    fn quarter_pinched() {
        let s = CurvatureScale::cayley_plane();
        let mut rng = seeded(45);
        for _ in 0..5000 {
            let x = CayleyVector::random(&mut rng);
            let y = CayleyVector::random(&mut rng);
            let k = sectional_curvature(&x, &y, s).unwrap();
            assert!((1.0 - 1e-8..=4.0 + 1e-8).contains(&k), "K = {k}");
        }
    }
}
