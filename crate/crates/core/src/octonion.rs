//! Octonions over `f64`.
//!
//! The product is the Cayley–Dickson doubling
//! `(a, b)(c, d) = (ac - d*b, da + bc*)` applied three times, starting from the
//! reals. Coefficient `s` multiplies the basis unit `I_s`; `I_0 = 1`, units
//! `0..4` span the quaternion half and `4..8` the doubled half.

use core::ops::{Add, AddAssign, Div, Index, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};
use crate::tol::Tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Octonion(pub [f64; 8]);

impl Octonion {
    pub const ZERO: Self = Self([0.0; 8]);
    pub const ONE: Self = Self([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);

    pub const fn new(coeffs: [f64; 8]) -> Self {
        Self(coeffs)
    }

    /// The basis unit `I_s`, `s` in `0..8`.
    pub fn unit(s: usize) -> Self {
        assert!(s < 8, "octonion basis index {s} out of range");
        let mut c = [0.0; 8];
        c[s] = 1.0;
        Self(c)
    }

    pub fn real(r: f64) -> Self {
        let mut c = [0.0; 8];
        c[0] = r;
        Self(c)
    }

    pub fn coeffs(&self) -> &[f64; 8] {
        &self.0
    }

    pub fn conj(&self) -> Self {
        let mut c = self.0;
        for v in &mut c[1..] {
            *v = -*v;
        }
        Self(c)
    }

    /// Coefficient dot product, which is the real part of `(a* b + b* a) / 2`.
    pub fn dot(&self, other: &Self) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        crate::sqrt(self.norm_sq())
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut c = self.0;
        for v in &mut c {
            *v *= s;
        }
        Self(c)
    }

    /// `a* / |a|^2`; fails with [`Error::ZeroDivisor`] when `|a| <= abs_tol`.
    pub fn inverse(&self, tol: Tolerance) -> Result<Self> {
        let n2 = self.norm_sq();
        let norm = crate::sqrt(n2);
        if norm <= tol.abs_tol || n2 == 0.0 {
            return Err(Error::ZeroDivisor { norm });
        }
        Ok(self.conj().scale(1.0 / n2))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

/// Cayley–Dickson product on slices of length 1, 2, 4 or 8.
fn cd_mul(x: &[f64], y: &[f64], out: &mut [f64]) {
    let n = x.len();
    if n == 1 {
        out[0] = x[0] * y[0];
        return;
    }
    let h = n / 2;
    let (a, b) = x.split_at(h);
    let (c, d) = y.split_at(h);

    let mut c_conj = [0.0; 4];
    let mut d_conj = [0.0; 4];
    cd_conj(c, &mut c_conj[..h]);
    cd_conj(d, &mut d_conj[..h]);

    let mut t1 = [0.0; 4];
    let mut t2 = [0.0; 4];
    // first half: ac - d* b
    cd_mul(a, c, &mut t1[..h]);
    cd_mul(&d_conj[..h], b, &mut t2[..h]);
    for i in 0..h {
        out[i] = t1[i] - t2[i];
    }
    // second half: da + b c*
    cd_mul(d, a, &mut t1[..h]);
    cd_mul(b, &c_conj[..h], &mut t2[..h]);
    for i in 0..h {
        out[h + i] = t1[i] + t2[i];
    }
}

fn cd_conj(x: &[f64], out: &mut [f64]) {
    out[0] = x[0];
    for i in 1..x.len() {
        out[i] = -x[i];
    }
}

impl Mul for Octonion {
    type Output = Octonion;
    fn mul(self, rhs: Octonion) -> Octonion {
        let mut out = [0.0; 8];
        cd_mul(&self.0, &rhs.0, &mut out);
        Octonion(out)
    }
}

impl Mul<f64> for Octonion {
    type Output = Octonion;
    fn mul(self, rhs: f64) -> Octonion {
        self.scale(rhs)
    }
}

impl Mul<Octonion> for f64 {
    type Output = Octonion;
    fn mul(self, rhs: Octonion) -> Octonion {
        rhs.scale(self)
    }
}

impl Div<f64> for Octonion {
    type Output = Octonion;
    fn div(self, rhs: f64) -> Octonion {
        self.scale(1.0 / rhs)
    }
}

impl Add for Octonion {
    type Output = Octonion;
    fn add(mut self, rhs: Octonion) -> Octonion {
        self += rhs;
        self
    }
}

impl AddAssign for Octonion {
    fn add_assign(&mut self, rhs: Octonion) {
        for (a, b) in self.0.iter_mut().zip(rhs.0.iter()) {
            *a += b;
        }
    }
}

impl Sub for Octonion {
    type Output = Octonion;
    fn sub(mut self, rhs: Octonion) -> Octonion {
        self -= rhs;
        self
    }
}

impl SubAssign for Octonion {
    fn sub_assign(&mut self, rhs: Octonion) {
        for (a, b) in self.0.iter_mut().zip(rhs.0.iter()) {
            *a -= b;
        }
    }
}

impl Neg for Octonion {
    type Output = Octonion;
    fn neg(self) -> Octonion {
        self.scale(-1.0)
    }
}

impl Index<usize> for Octonion {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl From<[f64; 8]> for Octonion {
    fn from(c: [f64; 8]) -> Self {
        Self(c)
    }
}

/// Absolute residuals of the three inner-product identities
///
/// 1. `<ax, y> = <x, a* y>`
/// 2. `<xa, y> = <x, y a*>`
/// 3. `<ab, cd> + <ad, cb> = 2 <a, c><b, d>`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityResiduals {
    pub left_adjoint: f64,
    pub right_adjoint: f64,
    pub polarized_norm: f64,
    /// Product of operand norms for identities 1 and 2 (`|a||x||y|`).
    pub adjoint_scale: f64,
    /// `|a||b||c||d|`, the natural scale of identity 3.
    pub polarized_scale: f64,
}

impl IdentityResiduals {
    pub fn max_residual(&self) -> f64 {
        self.left_adjoint
            .max(self.right_adjoint)
            .max(self.polarized_norm)
    }
}

pub fn identity_residuals(
    a: Octonion,
    b: Octonion,
    c: Octonion,
    d: Octonion,
    x: Octonion,
    y: Octonion,
) -> IdentityResiduals {
    let left_adjoint = ((a * x).dot(&y) - x.dot(&(a.conj() * y))).abs();
    let right_adjoint = ((x * a).dot(&y) - x.dot(&(y * a.conj()))).abs();
    let polarized_norm =
        ((a * b).dot(&(c * d)) + (a * d).dot(&(c * b)) - 2.0 * a.dot(&c) * b.dot(&d)).abs();
    IdentityResiduals {
        left_adjoint,
        right_adjoint,
        polarized_norm,
        adjoint_scale: a.norm() * x.norm() * y.norm(),
        polarized_scale: a.norm() * b.norm() * c.norm() * d.norm(),
    }
}

/// Evaluates the three identities and fails if any residual exceeds
/// `tol.bound(scale)`. A failure means the multiplication table is broken.
pub fn check_identities(
    a: Octonion,
    b: Octonion,
    c: Octonion,
    d: Octonion,
    x: Octonion,
    y: Octonion,
    tol: Tolerance,
) -> Result<IdentityResiduals> {
    let r = identity_residuals(a, b, c, d, x, y);
    let checks = [
        (1, r.left_adjoint, r.adjoint_scale),
        (2, r.right_adjoint, r.adjoint_scale),
        (3, r.polarized_norm, r.polarized_scale),
    ];
    for (which, residual, scale) in checks {
        let bound = tol.bound(scale);
        if !(residual <= bound) {
            return Err(Error::IdentityViolation {
                which,
                residual,
                bound,
            });
        }
    }
    Ok(r)
}
