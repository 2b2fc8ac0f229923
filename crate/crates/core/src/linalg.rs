//! Dense real matrices and the handful of factorizations the checks need:
//! cyclic Jacobi for symmetric eigenproblems, one-sided Jacobi for singular
//! values, Householder QR and Haar-distributed orthogonal sampling.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{gaussian, seeded};
use crate::tol::Tolerance;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                left: (rows, cols),
                right: (data.len(), 1),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix whose columns are the given vectors. All columns must
    /// have length `rows`.
    pub fn from_columns<C: AsRef<[f64]>>(rows: usize, columns: &[C]) -> Result<Self> {
        let cols = columns.len();
        let mut m = Self::zeros(rows, cols);
        for (j, c) in columns.iter().enumerate() {
            let c = c.as_ref();
            if c.len() != rows {
                return Err(Error::ShapeMismatch {
                    left: (rows, 1),
                    right: (c.len(), 1),
                });
            }
            for (i, v) in c.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        Ok(m)
    }

    pub fn gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        Self::from_fn(rows, cols, |_, _| gaussian(rng))
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, rhs: &RealMatrix) -> Result<RealMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::ShapeMismatch {
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, b) in out_row.iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self^T * rhs` without materializing the transpose.
    pub fn tr_matmul(&self, rhs: &RealMatrix) -> Result<RealMatrix> {
        if self.rows != rhs.rows {
            return Err(Error::ShapeMismatch {
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        let mut out = Self::zeros(self.cols, rhs.cols);
        for k in 0..self.rows {
            for i in 0..self.cols {
                let a = self[(k, i)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mat_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.cols {
            return Err(Error::ShapeMismatch {
                left: self.shape(),
                right: (v.len(), 1),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    /// `X^T X`.
    pub fn gram(&self) -> RealMatrix {
        self.tr_matmul(self).expect("shapes agree")
    }

    /// `X X^T`.
    pub fn outer_gram(&self) -> RealMatrix {
        self.matmul(&self.transpose()).expect("shapes agree")
    }

    fn zip_with(&self, rhs: &RealMatrix, f: impl Fn(f64, f64) -> f64) -> Result<RealMatrix> {
        if self.shape() != rhs.shape() {
            return Err(Error::ShapeMismatch {
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        })
    }

    pub fn add(&self, rhs: &RealMatrix) -> Result<RealMatrix> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &RealMatrix) -> Result<RealMatrix> {
        self.zip_with(rhs, |a, b| a - b)
    }

    pub fn scaled(&self, s: f64) -> RealMatrix {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        crate::sqrt(self.data.iter().map(|v| v * v).sum())
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// `|S - S^T|_F` for square matrices.
    pub fn asymmetry(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut s = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let d = self[(i, j)] - self[(j, i)];
                s += d * d;
            }
        }
        Ok(crate::sqrt(s))
    }

    /// `|A^T A - I|_F`.
    pub fn orthogonality_residual(&self) -> f64 {
        self.gram()
            .sub(&Self::identity(self.cols))
            .expect("square gram")
            .frobenius_norm()
    }

    /// `|A B - B A|_F`.
    pub fn commutator_norm(&self, other: &RealMatrix) -> Result<f64> {
        let ab = self.matmul(other)?;
        let ba = other.matmul(self)?;
        Ok(ab.sub(&ba)?.frobenius_norm())
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

impl Index<(usize, usize)> for RealMatrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RealMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Trace inner product `Tr(A^T B) = sum a_ij b_ij`.
pub fn frobenius_inner(a: &RealMatrix, b: &RealMatrix) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch {
            left: a.shape(),
            right: b.shape(),
        });
    }
    Ok(a.data.iter().zip(&b.data).map(|(x, y)| x * y).sum())
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    crate::sqrt(dot(a, a))
}

/// Eigen-decomposition of a symmetric matrix, eigenvalues descending.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricSpectrum {
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the unit eigenvector for `eigenvalues[k]`.
    pub eigenvectors: RealMatrix,
    pub sweeps: usize,
}

impl SymmetricSpectrum {
    /// `V diag(lambda) V^T`.
    pub fn reconstruct(&self) -> RealMatrix {
        let v = &self.eigenvectors;
        let n = v.rows();
        RealMatrix::from_fn(n, n, |i, j| {
            (0..self.eigenvalues.len())
                .map(|k| v[(i, k)] * self.eigenvalues[k] * v[(j, k)])
                .sum()
        })
    }
}

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_REL_OFF_DIAGONAL: f64 = 1e-14;

fn off_diagonal_norm(a: &RealMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    crate::sqrt(s)
}

/// Cyclic Jacobi eigensolver.
///
/// The input must be square and symmetric to within `tol.bound(|S|_F)`; it is
/// symmetrized before iterating. Iteration stops once the off-diagonal
/// Frobenius norm drops to `1e-14 |S|_F`.
pub fn sym_eig(s: &RealMatrix, tol: Tolerance) -> Result<SymmetricSpectrum> {
    let asym = s.asymmetry()?;
    let scale = s.frobenius_norm();
    if asym > tol.bound(scale) {
        return Err(Error::NotSymmetric { asymmetry: asym });
    }
    let n = s.rows();
    let mut a = RealMatrix::from_fn(n, n, |i, j| 0.5 * (s[(i, j)] + s[(j, i)]));
    let mut v = RealMatrix::identity(n);
    let target = JACOBI_REL_OFF_DIAGONAL * scale;

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= target || off == 0.0 {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                off_diagonal: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + crate::sqrt(theta * theta + 1.0))
                } else {
                    -1.0 / (-theta + crate::sqrt(theta * theta + 1.0))
                };
                let c = 1.0 / crate::sqrt(t * t + 1.0);
                let sn = t * c;
                // A <- J^T A J on rows/cols p, q
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - sn * vkq;
                    v[(k, q)] = sn * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let eigenvalues = order.iter().map(|&i| a[(i, i)]).collect();
    let eigenvectors = RealMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(SymmetricSpectrum {
        eigenvalues,
        eigenvectors,
        sweeps,
    })
}

/// Singular values (descending) by one-sided Jacobi. Accurate to roughly
/// `eps * sigma_max` in absolute terms, including the zero ones, which a
/// Gram-matrix route would only resolve to `sqrt(eps) * sigma_max`.
pub fn singular_values(a: &RealMatrix) -> Vec<f64> {
    // Orthogonalize whichever side has fewer vectors.
    let m = if a.cols() <= a.rows() {
        a.clone()
    } else {
        a.transpose()
    };
    let (rows, cols) = m.shape();
    let mut colv: Vec<Vec<f64>> = m.columns();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let alpha = dot(&colv[p], &colv[p]);
                let beta = dot(&colv[q], &colv[q]);
                let gamma = dot(&colv[p], &colv[q]);
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * crate::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + crate::sqrt(1.0 + zeta * zeta))
                } else {
                    -1.0 / (-zeta + crate::sqrt(1.0 + zeta * zeta))
                };
                let c = 1.0 / crate::sqrt(1.0 + t * t);
                let s = c * t;
                for k in 0..rows {
                    let xp = colv[p][k];
                    let xq = colv[q][k];
                    colv[p][k] = c * xp - s * xq;
                    colv[q][k] = s * xp + c * xq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = colv.iter().map(|c| norm(c)).collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

/// Number of singular values above `rel_cutoff * sigma_max`.
pub fn numerical_rank(a: &RealMatrix, rel_cutoff: f64) -> usize {
    rank_of_values(&singular_values(a), rel_cutoff)
}

fn rank_of_values(sv: &[f64], rel_cutoff: f64) -> usize {
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_cutoff * smax).count()
}

/// Householder QR of an `m x n` matrix with `m >= n`. Returns the thin
/// factors `Q` (`m x n`, orthonormal columns) and `R` (`n x n`, upper
/// triangular with a non-negative diagonal).
pub fn qr(a: &RealMatrix) -> Result<(RealMatrix, RealMatrix)> {
    let (m, n) = a.shape();
    if m < n {
        return Err(Error::ShapeMismatch {
            left: (m, n),
            right: (n, m),
        });
    }
    let mut r = a.clone();
    let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(n);
    for k in 0..n {
        let mut v: Vec<f64> = (k..m).map(|i| r[(i, k)]).collect();
        let alpha = norm(&v);
        if alpha == 0.0 {
            reflectors.push(Vec::new());
            continue;
        }
        let sign = if v[0] >= 0.0 { 1.0 } else { -1.0 };
        v[0] += sign * alpha;
        let vn = norm(&v);
        for x in &mut v {
            *x /= vn;
        }
        for j in k..n {
            let proj: f64 = (k..m).map(|i| v[i - k] * r[(i, j)]).sum();
            for i in k..m {
                r[(i, j)] -= 2.0 * v[i - k] * proj;
            }
        }
        reflectors.push(v);
    }
    // Q = H_0 H_1 ... H_{n-1} applied to the first n columns of I.
    let mut q = RealMatrix::from_fn(m, n, |i, j| if i == j { 1.0 } else { 0.0 });
    for k in (0..n).rev() {
        let v = &reflectors[k];
        if v.is_empty() {
            continue;
        }
        for j in 0..n {
            let proj: f64 = (k..m).map(|i| v[i - k] * q[(i, j)]).sum();
            for i in k..m {
                q[(i, j)] -= 2.0 * v[i - k] * proj;
            }
        }
    }
    let mut rr = RealMatrix::from_fn(n, n, |i, j| if j >= i { r[(i, j)] } else { 0.0 });
    for k in 0..n {
        if rr[(k, k)] < 0.0 {
            for j in 0..n {
                rr[(k, j)] = -rr[(k, j)];
            }
            for i in 0..m {
                q[(i, k)] = -q[(i, k)];
            }
        }
    }
    Ok((q, rr))
}

/// Haar-distributed `m x m` orthogonal matrix: QR of a Gaussian matrix with
/// the sign of each column fixed by a positive `R` diagonal.
pub fn random_orthogonal(m: usize, seed: u64) -> RealMatrix {
    random_orthogonal_with(m, &mut seeded(seed))
}

pub fn random_orthogonal_with<R: Rng + ?Sized>(m: usize, rng: &mut R) -> RealMatrix {
    assert!(m >= 1, "random_orthogonal needs m >= 1");
    let g = RealMatrix::gaussian(m, m, rng);
    qr(&g).expect("square input").0
}

/// Determinant by LU with partial pivoting.
pub fn determinant(a: &RealMatrix) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    let mut lu = a.clone();
    let mut det = 1.0;
    for k in 0..n {
        let mut piv = k;
        for i in (k + 1)..n {
            if lu[(i, k)].abs() > lu[(piv, k)].abs() {
                piv = i;
            }
        }
        if lu[(piv, k)] == 0.0 {
            return Ok(0.0);
        }
        if piv != k {
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(piv, j)];
                lu[(piv, j)] = t;
            }
            det = -det;
        }
        let p = lu[(k, k)];
        det *= p;
        for i in (k + 1)..n {
            let f = lu[(i, k)] / p;
            for j in (k + 1)..n {
                lu[(i, j)] -= f * lu[(k, j)];
            }
        }
    }
    Ok(det)
}

/// Nonzero eigenvalues of `X^T X` and `X X^T`, paired up.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumMatch {
    pub matches: bool,
    /// Nonzero eigenvalues of `X^T X`, descending.
    pub column_gram: Vec<f64>,
    /// Nonzero eigenvalues of `X X^T`, descending.
    pub row_gram: Vec<f64>,
    pub max_difference: f64,
}

/// Compares the nonzero spectra of `X^T X` and `X X^T` as multisets.
///
/// An eigenvalue counts as nonzero when it exceeds `tol.bound(lambda_max)`;
/// paired values must agree within `tol.bound(max(|a|, |b|))`. The two spectra
/// always agree, so `matches == false` means the eigensolver misbehaved.
pub fn nonzero_spectrum_match(x: &RealMatrix, tol: Tolerance) -> Result<SpectrumMatch> {
    let solve_tol = Tolerance::default();
    let small = sym_eig(&x.gram(), solve_tol)?;
    let large = sym_eig(&x.outer_gram(), solve_tol)?;
    let lmax = small
        .eigenvalues
        .first()
        .copied()
        .unwrap_or(0.0)
        .max(large.eigenvalues.first().copied().unwrap_or(0.0));
    let cutoff = tol.bound(lmax.max(0.0));
    let keep = |v: &[f64]| -> Vec<f64> { v.iter().copied().filter(|&l| l > cutoff).collect() };
    let column_gram = keep(&small.eigenvalues);
    let row_gram = keep(&large.eigenvalues);

    let mut matches = column_gram.len() == row_gram.len();
    let mut max_difference = 0.0f64;
    for (a, b) in column_gram.iter().zip(&row_gram) {
        let d = (a - b).abs();
        max_difference = max_difference.max(d);
        if d > tol.bound(a.abs().max(b.abs())) {
            matches = false;
        }
    }
    Ok(SpectrumMatch {
        matches,
        column_gram,
        row_gram,
        max_difference,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowSpaceVerdict {
    pub equal: bool,
    pub rank_transpose: usize,
    pub rank_product: usize,
    pub rank_stacked: usize,
    /// Relative singular-value cutoff applied to `X^T` and the stacked
    /// matrix; the product is cut at its cube.
    pub cutoff: f64,
}

/// Smallest relative cutoff `c` whose cube `c³` stays above the rounding
/// floor of a computed `X^T X X^T` with largest dimension `dim`.
pub fn cube_resolution(dim: usize) -> f64 {
    libm::cbrt(1e3 * f64::EPSILON * dim.max(1) as f64)
}

/// Decides whether the row space of `X^T X X^T` equals that of `X^T`.
///
/// The product cubes the singular values of `X`, so ranks are compared on a
/// consistent scale: `X^T` and `[X^T / σ_1(X); P / σ_1(P)]` count singular
/// values above `c σ_max`, the product `P` above `c³ σ_max`, with
/// `c = max(tol.abs_tol, cube_resolution)`. The spaces coincide when all
/// three ranks agree.
pub fn row_space_equal(x: &RealMatrix, tol: Tolerance) -> Result<RowSpaceVerdict> {
    let xt = x.transpose();
    let product = x.gram().matmul(&xt)?;
    let (n, m) = xt.shape();
    let cutoff = tol.abs_tol.max(cube_resolution(n.max(m)));
    let sx = singular_values(&xt);
    let sp = singular_values(&product);
    let (nx, np) = (
        sx.first().copied().unwrap_or(0.0),
        sp.first().copied().unwrap_or(0.0),
    );
    let inv = |v: f64| if v > 0.0 { 1.0 / v } else { 0.0 };
    let (ix, ip) = (inv(nx), inv(np));
    let stacked = RealMatrix::from_fn(2 * n, m, |i, j| {
        if i < n {
            xt[(i, j)] * ix
        } else {
            product[(i - n, j)] * ip
        }
    });
    let rank_transpose = rank_of_values(&sx, cutoff);
    let rank_product = rank_of_values(&sp, cutoff * cutoff * cutoff);
    let rank_stacked = numerical_rank(&stacked, cutoff);
    Ok(RowSpaceVerdict {
        equal: rank_transpose == rank_product && rank_product == rank_stacked,
        rank_transpose,
        rank_product,
        rank_stacked,
        cutoff,
    })
}

/// Orthonormal basis (as columns) of the column span of `x`, using the
/// eigenvectors of `X X^T` with eigenvalues above `rel_cutoff * lambda_max`.
pub fn column_span_basis(x: &RealMatrix, rel_cutoff: f64) -> Result<RealMatrix> {
    let spec = sym_eig(&x.outer_gram(), Tolerance::default())?;
    let lmax = spec.eigenvalues.first().copied().unwrap_or(0.0);
    let rank = if lmax <= 0.0 {
        0
    } else {
        spec.eigenvalues
            .iter()
            .filter(|&&l| l > rel_cutoff * lmax)
            .count()
    };
    Ok(RealMatrix::from_fn(x.rows(), rank, |i, k| {
        spec.eigenvectors[(i, k)]
    }))
}
