#![cfg_attr(not(test), no_std)]

//! Numerical verification core for octonionic geometry.
//!
//! Everything in this crate is a pure function of its inputs (randomness is
//! always driven by an explicit 64-bit seed), so it builds without `std` and
//! only needs `alloc` for dense matrices and vector lists.
//!
//! Layout:
//!
//! * [`octonion`]: octonion arithmetic and the inner-product identities.
//! * [`linalg`]: dense real matrices, Jacobi eigen/SVD, Haar sampling.
//! * [`trace_ineq`]: the orthogonal-conjugation and rank inequalities for Gram sums.
//! * [`lines`]: octonionic lines in `O ⊕ O`, the Hopf map and line Gram matrices.
//! * [`curvature`]: the Cayley plane curvature tensor and the Gauss-equation form.
//! * [`variation`]: summed second-variation integrands on product manifolds.
//! * [`extremizer`]: the octonionic projection defect and its eigenvalue form.

extern crate alloc;

pub mod curvature;
pub mod error;
pub mod extremizer;
pub mod lines;
pub mod linalg;
pub mod octonion;
pub mod rng;
pub mod trace_ineq;
pub mod variation;

mod tol;

pub use curvature::CurvatureScale;
pub use error::{Error, Result};
pub use lines::{CayleyVector, LineParam};
pub use linalg::RealMatrix;
pub use octonion::Octonion;
pub use tol::Tolerance;

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

pub(crate) trait Square {
    fn sq(self) -> f64;
}

impl Square for f64 {
    #[inline]
    fn sq(self) -> f64 {
        self * self
    }
}
