use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("tolerance must be finite and non-negative (abs {abs_tol}, rel {rel_tol})")]
    BadTolerance { abs_tol: f64, rel_tol: f64 },
    #[error("curvature scale must be positive and finite, got {0}")]
    BadScale(f64),

    #[error("octonion of norm {norm} has no inverse at this tolerance")]
    ZeroDivisor { norm: f64 },
    #[error("octonion identity {which} violated: residual {residual:e} > bound {bound:e}")]
    IdentityViolation {
        which: u8,
        residual: f64,
        bound: f64,
    },

    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric: asymmetry {asymmetry:e}")]
    NotSymmetric { asymmetry: f64 },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal {off_diagonal:e})")]
    NoConvergence { sweeps: usize, off_diagonal: f64 },
    #[error("matrix is not orthogonal: |A^T A - I| = {residual:e}")]
    NotOrthogonal { residual: f64 },

    #[error("zero vector has no octonionic line")]
    ZeroVector,
    #[error("vector is not a unit vector: |x| = {norm}")]
    NotUnit { norm: f64 },
    #[error("basis column {column} is off its line by {residual:e}")]
    NotOnLine { column: usize, residual: f64 },
    #[error("basis is not orthonormal: |B^T B - I| = {residual:e}")]
    NotOrthonormalBasis { residual: f64 },
    #[error("line Gram factor is not orthogonal: |Q^T Q - I| = {residual:e}")]
    LemmaViolation { residual: f64 },

    #[error("structure matrix invalid: {reason} (residual {residual:e})")]
    BadStructure {
        reason: &'static str,
        residual: f64,
    },
    #[error("quaternionic index must be 1, 2 or 3, got {0}")]
    BadIndex(usize),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("frame is not orthonormal: residual {residual:e}")]
    FrameNotOrthonormal { residual: f64 },
    #[error("Gram constraint X1^T X1 + X2^T X2 = I violated: residual {residual:e}")]
    ConstraintViolated { residual: f64 },
    #[error("commutation certificates absent: |[X1 X1^T, J1]| = {first:e}, |[X2 X2^T, J2]| = {second:e}")]
    CertificatesAbsent { first: f64, second: f64 },

    #[error("line group {group} has numerical rank {rank} > 8")]
    DegenerateGroup { group: usize, rank: usize },
    #[error("eigenvalue parameter ({row}, {col}) is negative: {value}")]
    NegativeEigenvalue { row: usize, col: usize, value: f64 },
}
