//! Gram-sum inequalities for column collections `X = [x_1 .. x_n]`.
//!
//! * For orthogonal `A`: `sum <x_i, A x_j>^2 <= sum <x_i, x_j>^2`, with
//!   equality iff `X X^T` commutes with `A`, in which case the span of the
//!   columns is `A`-invariant.
//! * If the columns span an `m`-dimensional space:
//!   `m sum <x_i, x_j>^2 >= (sum |x_i|^2)^2`.
//!
//! Equality is certified through the commutator `|X X^T A - A X X^T|_F`, not
//! through the defect itself, which is a difference of two large nearly equal
//! numbers.

use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{column_span_basis, numerical_rank, random_orthogonal_with, RealMatrix};
use crate::tol::Tolerance;

/// Eigenvalue cutoff (relative to the largest) used to pick the column span
/// when building its orthogonal projector.
const SPAN_EIGEN_CUTOFF: f64 = 1e-12;
/// `|A P - P A|_F` below which the column span counts as `A`-invariant.
pub const PROJECTOR_COMMUTATOR_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyDefectReport {
    /// `|X^T A X|_F^2 - |X^T X|_F^2`; never positive up to rounding.
    pub defect: f64,
    /// `|X X^T A - A X X^T|_F`.
    pub commutator_norm: f64,
    /// `|A P - P A|_F` for the orthogonal projector `P` onto the column span.
    pub projector_commutator: f64,
    pub span_invariant: bool,
}

pub fn key_defect(a: &RealMatrix, x: &RealMatrix, tol: Tolerance) -> Result<KeyDefectReport> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if a.rows() != x.rows() {
        return Err(Error::ShapeMismatch {
            left: a.shape(),
            right: x.shape(),
        });
    }
    let residual = a.orthogonality_residual();
    if residual > tol.bound(crate::sqrt(a.rows() as f64)) {
        return Err(Error::NotOrthogonal { residual });
    }

    let xtx = x.gram();
    let xtax = x.tr_matmul(&a.matmul(x)?)?;
    let n1 = xtax.frobenius_norm();
    let n0 = xtx.frobenius_norm();
    let defect = n1 * n1 - n0 * n0;

    let xxt = x.outer_gram();
    let commutator_norm = xxt.commutator_norm(a)?;

    let basis = column_span_basis(x, SPAN_EIGEN_CUTOFF)?;
    let projector = basis.matmul(&basis.transpose())?;
    let projector_commutator = projector.commutator_norm(a)?;

    Ok(KeyDefectReport {
        defect,
        commutator_norm,
        projector_commutator,
        span_invariant: projector_commutator <= PROJECTOR_COMMUTATOR_TOL,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumDefect {
    /// `rank * sum <x_i, x_j>^2 - (sum |x_i|^2)^2`; never negative up to rounding.
    pub value: f64,
    /// Numerical rank of `X` (singular values above `tol.abs_tol * sigma_max`).
    pub rank: usize,
}

pub fn sum_defect(x: &RealMatrix, tol: Tolerance) -> SumDefect {
    let rank = numerical_rank(x, tol.abs_tol);
    let g = x.gram().frobenius_norm();
    let total: f64 = x.as_slice().iter().map(|v| v * v).sum();
    SumDefect {
        value: rank as f64 * g * g - total * total,
        rank,
    }
}

/// An orthogonal `A = O diag(R(θ_1), .., R(θ_p), ±1) O^T` on `R^m` and an
/// `X` whose columns are scaled orthonormal bases of some of the invariant
/// blocks, mixed by a random orthogonal matrix. `X X^T` commutes with `A`, so
/// the key defect vanishes.
pub fn invariant_span_example<R: Rng + ?Sized>(m: usize, rng: &mut R) -> (RealMatrix, RealMatrix) {
    let m = m.max(1);
    let mut d = RealMatrix::zeros(m, m);
    let mut blocks: Vec<(usize, usize)> = Vec::new();
    let mut i = 0;
    while i + 1 < m {
        let t: f64 = rng.random_range(0.0..core::f64::consts::TAU);
        let (c, s) = (libm::cos(t), libm::sin(t));
        d[(i, i)] = c;
        d[(i + 1, i + 1)] = c;
        d[(i, i + 1)] = -s;
        d[(i + 1, i)] = s;
        blocks.push((i, 2));
        i += 2;
    }
    if i < m {
        d[(i, i)] = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        blocks.push((i, 1));
    }
    let o = random_orthogonal_with(m, rng);
    let a = o
        .matmul(&d)
        .and_then(|t| t.matmul(&o.transpose()))
        .expect("square factors");
    let used = rng.random_range(1..=blocks.len());
    let mut cols: Vec<Vec<f64>> = Vec::new();
    for &(start, len) in &blocks[..used] {
        let scale = rng.random_range(0.5..2.0);
        for j in start..start + len {
            cols.push(o.column(j).iter().map(|v| v * scale).collect());
        }
    }
    let x = RealMatrix::from_columns(m, &cols).expect("columns of length m");
    let mix = random_orthogonal_with(x.cols(), rng);
    (a, x.matmul(&mix).expect("square mix"))
}
