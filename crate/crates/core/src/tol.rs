use crate::error::{Error, Result};

/// Absolute and relative tolerances used by the numerical checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Tolerance {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Result<Self> {
        let ok = |t: f64| t.is_finite() && t >= 0.0;
        if ok(abs_tol) && ok(rel_tol) {
            Ok(Self { abs_tol, rel_tol })
        } else {
            Err(Error::BadTolerance { abs_tol, rel_tol })
        }
    }

    /// Same value for both components.
    pub fn uniform(tol: f64) -> Result<Self> {
        Self::new(tol, tol)
    }

    /// `abs_tol + rel_tol * scale`.
    #[inline]
    pub fn bound(&self, scale: f64) -> f64 {
        self.abs_tol + self.rel_tol * scale
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
        }
    }
}
