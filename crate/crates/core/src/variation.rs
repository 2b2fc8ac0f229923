//! Pointwise second-variation integrands for a submanifold `Σ^n` of a
//! product `M_1 × M_2`, summed over the normal sections induced by an
//! isotropic embedding of the first factor.
//!
//! At a point, all the data is an orthonormal frame `e_1..e_n` (tangent) and
//! `η_1..η_d` (normal) of `R^{m1+m2}`, split into factor components
//! `e_j = (e_j¹, e_j²)`. The integrands are:
//!
//! * `CP^{m1/2}`:  `λ₁² Σ_ij (<J e_j¹, e_i¹>² - <e_j¹, e_i¹>²)`
//! * `HP^{m1/4}`:  `λ² (-Σ_{k≠s} Σ_j Σ_β <J_k η_β¹, e_j¹>² + Σ_ij (<J_s e_i¹, e_j¹>² - <e_i¹, e_j¹>²))`
//! * `OP²`:        `λ² (Σ_ji |e_j¹|² |Proj_{L(e_j¹)} e_i¹|² - 8 Σ_ij <e_i¹, e_j¹>² - 6 Σ_jk <e_j¹, η_k¹>²)`
//!
//! Each is non-positive; stability forces it to vanish, which is where the
//! equality certificates below come from.

use alloc::vec;
use alloc::vec::Vec;

use crate::curvature::{gauss_2ff_inner, CurvatureScale};
use crate::Square;
use crate::error::{Error, Result};
use crate::extremizer::{projection_defect, ProjectionDefect};
use crate::linalg::{dot, qr, sym_eig, RealMatrix};
use crate::lines::{CayleyVector, LineParam};
use crate::rng::{gaussian_vec, seeded};
use crate::tol::Tolerance;
use crate::trace_ineq::key_defect;

/// Orthonormal tangent and normal vectors in `R^{m1+m2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductFrame {
    m1: usize,
    m2: usize,
    tangent: Vec<Vec<f64>>,
    normal: Vec<Vec<f64>>,
}

impl ProductFrame {
    /// Validates lengths and orthonormality (Gram residual within
    /// `tol.bound(1)`).
    pub fn new(
        m1: usize,
        m2: usize,
        tangent: Vec<Vec<f64>>,
        normal: Vec<Vec<f64>>,
        tol: Tolerance,
    ) -> Result<Self> {
        let dim = m1 + m2;
        if tangent.len() + normal.len() > dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: tangent.len() + normal.len(),
            });
        }
        for v in tangent.iter().chain(normal.iter()) {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: v.len(),
                });
            }
        }
        let frame = Self {
            m1,
            m2,
            tangent,
            normal,
        };
        let residual = frame.orthonormality_residual();
        if !(residual <= tol.bound(1.0)) {
            return Err(Error::FrameNotOrthonormal { residual });
        }
        Ok(frame)
    }

    /// Uniformly random frame: QR of an `(m1+m2) x (n+d)` Gaussian matrix,
    /// first `n` columns tangent, the rest normal.
    pub fn random(m1: usize, m2: usize, n: usize, d: usize, seed: u64) -> Result<Self> {
        let dim = m1 + m2;
        if n + d > dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: n + d,
            });
        }
        let mut rng = seeded(seed);
        let g = RealMatrix::gaussian(dim, n + d, &mut rng);
        let (q, _) = qr(&g)?;
        let cols = q.columns();
        let (t, nn) = cols.split_at(n);
        Ok(Self {
            m1,
            m2,
            tangent: t.to_vec(),
            normal: nn.to_vec(),
        })
    }

    /// Random frame with `n` tangent vectors whose normals fill the rest of
    /// `R^{m1+m2}`.
    pub fn random_complete(m1: usize, m2: usize, n: usize, seed: u64) -> Result<Self> {
        let dim = m1 + m2;
        Self::random(m1, m2, n, dim.saturating_sub(n), seed)
    }

    pub fn m1(&self) -> usize {
        self.m1
    }

    pub fn m2(&self) -> usize {
        self.m2
    }

    pub fn n(&self) -> usize {
        self.tangent.len()
    }

    pub fn d(&self) -> usize {
        self.normal.len()
    }

    pub fn is_complete(&self) -> bool {
        self.n() + self.d() == self.m1 + self.m2
    }

    pub fn tangent(&self) -> &[Vec<f64>] {
        &self.tangent
    }

    pub fn normal(&self) -> &[Vec<f64>] {
        &self.normal
    }

    /// `e_j¹` for each tangent vector.
    pub fn tangent_first(&self) -> Vec<&[f64]> {
        self.tangent.iter().map(|v| &v[..self.m1]).collect()
    }

    pub fn tangent_second(&self) -> Vec<&[f64]> {
        self.tangent.iter().map(|v| &v[self.m1..]).collect()
    }

    pub fn normal_first(&self) -> Vec<&[f64]> {
        self.normal.iter().map(|v| &v[..self.m1]).collect()
    }

    pub fn normal_second(&self) -> Vec<&[f64]> {
        self.normal.iter().map(|v| &v[self.m1..]).collect()
    }

    /// `X_1`: the `m1 x n` matrix with columns `e_j¹`.
    pub fn first_factor_matrix(&self) -> RealMatrix {
        RealMatrix::from_fn(self.m1, self.n(), |i, j| self.tangent[j][i])
    }

    /// `X_2`: the `m2 x n` matrix with columns `e_j²`.
    pub fn second_factor_matrix(&self) -> RealMatrix {
        RealMatrix::from_fn(self.m2, self.n(), |i, j| self.tangent[j][self.m1 + i])
    }

    /// Replaces the tangent vectors by `e'_j = Σ_i e_i O_ij`.
    pub fn rotate_tangent(&self, rotation: &RealMatrix) -> Result<Self> {
        let n = self.n();
        if rotation.shape() != (n, n) {
            return Err(Error::ShapeMismatch {
                left: (n, n),
                right: rotation.shape(),
            });
        }
        let dim = self.m1 + self.m2;
        let tangent = (0..n)
            .map(|j| {
                (0..dim)
                    .map(|r| (0..n).map(|i| self.tangent[i][r] * rotation[(i, j)]).sum())
                    .collect()
            })
            .collect();
        Ok(Self {
            tangent,
            ..self.clone()
        })
    }

    fn orthonormality_residual(&self) -> f64 {
        let all: Vec<&Vec<f64>> = self.tangent.iter().chain(self.normal.iter()).collect();
        let mut s = 0.0;
        for (i, a) in all.iter().enumerate() {
            for (j, b) in all.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                let r = dot(a, b) - target;
                s += r * r;
            }
        }
        crate::sqrt(s)
    }
}

/// An orthogonal complex structure `J` (`J^T J = I`, `J² = -I`).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexStructure(RealMatrix);

impl ComplexStructure {
    pub fn new(j: RealMatrix, tol: Tolerance) -> Result<Self> {
        if !j.is_square() {
            return Err(Error::BadStructure {
                reason: "not square",
                residual: f64::INFINITY,
            });
        }
        let bound = tol.bound(crate::sqrt(j.rows() as f64));
        let orth = j.orthogonality_residual();
        if !(orth <= bound) {
            return Err(Error::BadStructure {
                reason: "not orthogonal",
                residual: orth,
            });
        }
        let sq = j
            .matmul(&j)?
            .add(&RealMatrix::identity(j.rows()))?
            .frobenius_norm();
        if !(sq <= bound) {
            return Err(Error::BadStructure {
                reason: "J^2 != -I",
                residual: sq,
            });
        }
        Ok(Self(j))
    }

    /// Block `[[0, -I], [I, 0]]` on `R^{2k}`.
    pub fn standard(dim: usize) -> Result<Self> {
        if dim % 2 != 0 || dim == 0 {
            return Err(Error::BadStructure {
                reason: "complex structure needs an even positive dimension",
                residual: dim as f64,
            });
        }
        let k = dim / 2;
        let mut j = RealMatrix::zeros(dim, dim);
        for i in 0..k {
            j[(i, k + i)] = -1.0;
            j[(k + i, i)] = 1.0;
        }
        Ok(Self(j))
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn negated(&self) -> Self {
        Self(self.0.scaled(-1.0))
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.0.mat_vec(v).expect("dimension checked by caller")
    }
}

/// `{J_1, J_2, J_3}` with `J_1 J_2 = J_3` and cyclic.
#[derive(Debug, Clone, PartialEq)]
pub struct QuaternionicStructure {
    j: [ComplexStructure; 3],
}

impl QuaternionicStructure {
    pub fn new(
        j1: ComplexStructure,
        j2: ComplexStructure,
        j3: ComplexStructure,
        tol: Tolerance,
    ) -> Result<Self> {
        let dim = j1.dim();
        if j2.dim() != dim || j3.dim() != dim {
            return Err(Error::BadStructure {
                reason: "structures act on different dimensions",
                residual: f64::INFINITY,
            });
        }
        let bound = tol.bound(crate::sqrt(dim as f64));
        let js = [&j1, &j2, &j3];
        for (a, b, c) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            let r = js[a]
                .matrix()
                .matmul(js[b].matrix())?
                .sub(js[c].matrix())?
                .frobenius_norm();
            if !(r <= bound) {
                return Err(Error::BadStructure {
                    reason: "quaternion relations fail",
                    residual: r,
                });
            }
        }
        Ok(Self { j: [j1, j2, j3] })
    }

    /// Left multiplication by `i`, `j`, `k` on each block of 4 coordinates
    /// `(1, i, j, k)` of `R^{4k}`.
    pub fn standard(dim: usize) -> Result<Self> {
        if dim % 4 != 0 || dim == 0 {
            return Err(Error::BadStructure {
                reason: "quaternionic structure needs dimension divisible by 4",
                residual: dim as f64,
            });
        }
        // rows: coefficient of (1, i, j, k) in unit * (a + bi + cj + dk)
        const LEFT_I: [[f64; 4]; 4] = [
            [0.0, -1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, -1.0],
            [0.0, 0.0, 1.0, 0.0],
        ];
        const LEFT_J: [[f64; 4]; 4] = [
            [0.0, 0.0, -1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, -1.0, 0.0, 0.0],
        ];
        const LEFT_K: [[f64; 4]; 4] = [
            [0.0, 0.0, 0.0, -1.0],
            [0.0, 0.0, -1.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
        ];
        let block = |b: &[[f64; 4]; 4]| {
            RealMatrix::from_fn(dim, dim, |r, c| {
                if r / 4 == c / 4 {
                    b[r % 4][c % 4]
                } else {
                    0.0
                }
            })
        };
        let tol = Tolerance::default();
        Self::new(
            ComplexStructure::new(block(&LEFT_I), tol)?,
            ComplexStructure::new(block(&LEFT_J), tol)?,
            ComplexStructure::new(block(&LEFT_K), tol)?,
            tol,
        )
    }

    /// `J_k` for `k` in `1..=3`.
    pub fn get(&self, k: usize) -> Result<&ComplexStructure> {
        match k {
            1..=3 => Ok(&self.j[k - 1]),
            _ => Err(Error::BadIndex(k)),
        }
    }

    pub fn dim(&self) -> usize {
        self.j[0].dim()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Component {
    pub name: &'static str,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    pub name: &'static str,
    pub holds: bool,
    pub residual: f64,
}

/// `<J_k η_β¹, e_j¹>` for one `(k, β, j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossTerm {
    pub k: usize,
    pub beta: usize,
    pub j: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariationReport {
    /// The summed second-variation integrand (already multiplied by `λ²`).
    pub value: f64,
    pub components: Vec<Component>,
    pub certificates: Vec<Certificate>,
    pub cross_terms: Vec<CrossTerm>,
}

impl VariationReport {
    pub fn component(&self, name: &str) -> Option<f64> {
        self.components
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.value)
    }

    pub fn certificate(&self, name: &str) -> Option<&Certificate> {
        self.certificates.iter().find(|c| c.name == name)
    }
}

fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}

/// `Σ_ij <A x_j, x_i>²` and `Σ_ij <x_j, x_i>²`.
fn rotated_gram_sums(a: &ComplexStructure, xs: &[&[f64]]) -> (f64, f64) {
    let ax: Vec<Vec<f64>> = xs.iter().map(|x| a.apply(x)).collect();
    let mut rotated = 0.0;
    let mut plain = 0.0;
    for (j, xj) in xs.iter().enumerate() {
        for xi in xs {
            rotated += dot(&ax[j], xi).sq();
            plain += dot(xj, xi).sq();
        }
    }
    (rotated, plain)
}

fn invariance_certificate(
    name: &'static str,
    j: &ComplexStructure,
    x: &RealMatrix,
    tol: Tolerance,
) -> Result<Certificate> {
    let r = key_defect(j.matrix(), x, tol)?;
    let scale = x.frobenius_norm().sq();
    Ok(Certificate {
        name,
        holds: r.commutator_norm <= tol.bound(scale),
        residual: r.commutator_norm,
    })
}

/// `CP^{m1/2} × M_2` integrand.
pub fn complex_integrand(
    frame: &ProductFrame,
    j1: &ComplexStructure,
    scale: CurvatureScale,
    tol: Tolerance,
) -> Result<VariationReport> {
    check_dim(frame.m1(), j1.dim())?;
    let first = frame.tangent_first();
    let (rotated, plain) = rotated_gram_sums(j1, &first);
    let l2 = scale.lambda_sq();
    let cert = invariance_certificate(
        "tangent_span_j_invariant",
        j1,
        &frame.first_factor_matrix(),
        tol,
    )?;
    Ok(VariationReport {
        value: l2 * (rotated - plain),
        components: vec![
            Component {
                name: "rotated_gram",
                value: l2 * rotated,
            },
            Component {
                name: "gram",
                value: l2 * plain,
            },
        ],
        certificates: vec![cert],
        cross_terms: Vec::new(),
    })
}

/// `HP^{m1/4} × M` integrand for the index `s ∈ {1, 2, 3}`.
///
/// Components `cross_term` (`-λ² Σ_{k≠s} Σ <J_k η_β¹, e_j¹>²`) and `key_term`
/// (`λ² Σ_ij (<J_s e_i¹, e_j¹>² - <e_i¹, e_j¹>²)`) are both non-positive, so
/// the value vanishes only when each does.
pub fn quaternionic_integrand(
    frame: &ProductFrame,
    quat: &QuaternionicStructure,
    s: usize,
    scale: CurvatureScale,
    tol: Tolerance,
) -> Result<VariationReport> {
    let js = quat.get(s)?;
    check_dim(frame.m1(), quat.dim())?;
    let e1 = frame.tangent_first();
    let eta1 = frame.normal_first();

    let mut cross_terms = Vec::new();
    let mut cross = 0.0;
    for k in (1..=3).filter(|&k| k != s) {
        let jk = quat.get(k)?;
        for (beta, eta) in eta1.iter().enumerate() {
            let rotated = jk.apply(eta);
            for (j, e) in e1.iter().enumerate() {
                let value = dot(&rotated, e);
                cross += value * value;
                cross_terms.push(CrossTerm { k, beta, j, value });
            }
        }
    }
    let (rotated, plain) = rotated_gram_sums(js, &e1);
    let l2 = scale.lambda_sq();
    let key = rotated - plain;

    let x1 = frame.first_factor_matrix();
    let scale_sq = x1.frobenius_norm().sq();
    let cross_cert = Certificate {
        name: "cross_term_vanishes",
        holds: cross <= tol.bound(scale_sq),
        residual: cross,
    };
    let inv_cert = invariance_certificate("tangent_span_js_invariant", js, &x1, tol)?;
    Ok(VariationReport {
        value: l2 * (key - cross),
        components: vec![
            Component {
                name: "cross_term",
                value: -l2 * cross,
            },
            Component {
                name: "key_term",
                value: l2 * key,
            },
        ],
        certificates: vec![cross_cert, inv_cert],
        cross_terms,
    })
}

fn first_factor_cayley(parts: &[&[f64]]) -> Result<Vec<CayleyVector>> {
    parts.iter().map(|p| CayleyVector::from_slice(p)).collect()
}

fn cross_sum(a: &[&[f64]], b: &[&[f64]]) -> f64 {
    let mut s = 0.0;
    for x in a {
        for y in b {
            s += dot(x, y).sq();
        }
    }
    s
}

fn octonionic_report(
    defect: ProjectionDefect,
    cross: f64,
    scale: CurvatureScale,
    tol: Tolerance,
) -> VariationReport {
    let l2 = scale.lambda_sq();
    VariationReport {
        value: l2 * (defect.projection_sum - 8.0 * defect.gram_sum - 6.0 * cross),
        components: vec![
            Component {
                name: "projection_sum",
                value: l2 * defect.projection_sum,
            },
            Component {
                name: "gram_sum",
                value: -8.0 * l2 * defect.gram_sum,
            },
            Component {
                name: "cross_sum",
                value: -6.0 * l2 * cross,
            },
        ],
        certificates: vec![Certificate {
            name: "factor_components_orthogonal",
            holds: cross <= tol.bound(1.0),
            residual: cross,
        }],
        cross_terms: Vec::new(),
    }
}

/// `OP² × M` integrand written with the tangent components.
///
/// Components `e_j¹` with `|e_j¹| <= tol.abs_tol` use `fallback` as their
/// line; their contribution is zero whichever line is chosen.
pub fn octonionic_integrand_tangent(
    frame: &ProductFrame,
    fallback: LineParam,
    scale: CurvatureScale,
    tol: Tolerance,
) -> Result<VariationReport> {
    check_dim(16, frame.m1())?;
    let e1 = frame.tangent_first();
    let eta1 = frame.normal_first();
    let defect = projection_defect(&first_factor_cayley(&e1)?, fallback, tol);
    Ok(octonionic_report(defect, cross_sum(&e1, &eta1), scale, tol))
}

/// Same integrand written with the normal components; equal to the tangent
/// form whenever the frame is complete.
pub fn octonionic_integrand_normal(
    frame: &ProductFrame,
    fallback: LineParam,
    scale: CurvatureScale,
    tol: Tolerance,
) -> Result<VariationReport> {
    check_dim(16, frame.m1())?;
    let e1 = frame.tangent_first();
    let eta1 = frame.normal_first();
    let defect = projection_defect(&first_factor_cayley(&eta1)?, fallback, tol);
    Ok(octonionic_report(defect, cross_sum(&e1, &eta1), scale, tol))
}

/// `Σ_j Σ_k 2|B(e_j¹, η_k¹)|² - <B(η_k¹, η_k¹), B(e_j¹, e_j¹)>`, evaluated
/// through the Gauss-equation form of `B`.
pub fn raw_2ff_sum(frame: &ProductFrame, scale: CurvatureScale) -> Result<f64> {
    check_dim(16, frame.m1())?;
    let e1 = first_factor_cayley(&frame.tangent_first())?;
    let eta1 = first_factor_cayley(&frame.normal_first())?;
    let mut total = 0.0;
    for e in &e1 {
        for eta in &eta1 {
            total += 2.0 * gauss_2ff_inner(e, eta, e, eta, scale)
                - gauss_2ff_inner(eta, eta, e, e, scale);
        }
    }
    Ok(total)
}

/// Residuals for one `(e_i, η_β)` pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplittingPair {
    pub i: usize,
    pub beta: usize,
    /// `<F e_i, η_β> = <e_i¹, η_β¹> - <e_i², η_β²>` with `F = P - Q`.
    pub reflection: f64,
    /// `<e_i¹, η_β¹>`
    pub first: f64,
    /// `<e_i², η_β²>`
    pub second: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplittingVerdict {
    /// `F(TΣ) ⊆ TΣ`: every `<F e_i, η_β>` vanishes.
    pub reflection_invariant: bool,
    /// Every `<e_i¹, η_β¹>` vanishes.
    pub first_orthogonal: bool,
    /// Every `<e_i², η_β²>` vanishes.
    pub second_orthogonal: bool,
    pub pairs: Vec<SplittingPair>,
}

/// Checks whether the tangent space is invariant under the product
/// reflection `F = P - Q`, alongside the factor-wise orthogonality
/// conditions. For an orthonormal frame `<e_i¹,η¹> = -<e_i²,η²>`, so the
/// three verdicts agree; each is still evaluated independently.
pub fn splitting_check(frame: &ProductFrame, tol: Tolerance) -> SplittingVerdict {
    let e1 = frame.tangent_first();
    let e2 = frame.tangent_second();
    let n1 = frame.normal_first();
    let n2 = frame.normal_second();
    let bound = tol.bound(1.0);
    let mut pairs = Vec::with_capacity(e1.len() * n1.len());
    let (mut refl, mut first_ok, mut second_ok) = (true, true, true);
    for i in 0..e1.len() {
        for beta in 0..n1.len() {
            let first = dot(e1[i], n1[beta]);
            let second = dot(e2[i], n2[beta]);
            let reflection = first - second;
            refl &= reflection.abs() <= bound;
            first_ok &= first.abs() <= bound;
            second_ok &= second.abs() <= bound;
            pairs.push(SplittingPair {
                i,
                beta,
                reflection,
                first,
                second,
            });
        }
    }
    SplittingVerdict {
        reflection_invariant: refl,
        first_orthogonal: first_ok,
        second_orthogonal: second_ok,
        pairs,
    }
}

/// Absolute distance under which eigenvalues are clustered together when
/// counting multiplicities.
pub const MULTIPLICITY_CLUSTER_TOL: f64 = 1e-7;

/// Scale of the allowed `|X_1^T X_1 + X_2^T X_2 - I|_F` residual.
pub const FRAME_CONSTRAINT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenCluster {
    pub value: f64,
    pub multiplicity: usize,
}

/// Clusters a descending spectrum: consecutive values within
/// [`MULTIPLICITY_CLUSTER_TOL`] share a cluster.
pub fn cluster_eigenvalues(eigenvalues: &[f64]) -> Vec<EigenCluster> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    let mut last = f64::NAN;
    for &l in eigenvalues {
        match out.last_mut() {
            Some((sum, count)) if (last - l).abs() <= MULTIPLICITY_CLUSTER_TOL => {
                *sum += l;
                *count += 1;
            }
            _ => out.push((l, 1)),
        }
        last = l;
    }
    out.into_iter()
        .map(|(sum, count)| EigenCluster {
            value: sum / count as f64,
            multiplicity: count,
        })
        .collect()
}

fn multiplicity_at(clusters: &[EigenCluster], target: f64) -> usize {
    clusters
        .iter()
        .filter(|c| (c.value - target).abs() <= MULTIPLICITY_CLUSTER_TOL)
        .map(|c| c.multiplicity)
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiplicityTable {
    /// Clusters of the spectrum of `X_1^T X_1`.
    pub first: Vec<EigenCluster>,
    /// Clusters of the spectrum of `X_2^T X_2`.
    pub second: Vec<EigenCluster>,
    pub ones_in_first: usize,
    pub zeros_in_first: usize,
    pub ones_in_second: usize,
    pub zeros_in_second: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Factor {
    First,
    Second,
}

/// A parity claim of the pairing argument that failed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParityFailure {
    /// A nonzero eigenvalue of `X_k^T X_k` with odd multiplicity.
    OddNonzeroMultiplicity {
        factor: Factor,
        value: f64,
        multiplicity: usize,
    },
    /// Multiplicity of 1 in `X_1^T X_1` differs from that of 0 in `X_2^T X_2`.
    PairingMismatch { ones_in_first: usize, zeros_in_second: usize },
    /// Multiplicity of 0 in `X_1^T X_1` is odd.
    OddKernel { multiplicity: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub enum OddDimensionVerdict {
    /// Both certificates hold, `n` is even and every multiplicity is even.
    Consistent(MultiplicityTable),
    /// The certificates hold but the parity claims cannot all be met; always
    /// the outcome for odd `n`, showing no such frame exists.
    Contradiction {
        n: usize,
        table: MultiplicityTable,
        failures: Vec<ParityFailure>,
    },
}

/// Parity argument for frames whose factor Gram matrices commute with the
/// complex structures.
///
/// Preconditions: `|X_1^T X_1 + X_2^T X_2 - I| <= 1e-9 (1 + sqrt n)`
/// ([`Error::ConstraintViolated`]) and both commutators
/// `|X_k X_k^T J_k - J_k X_k X_k^T|` at most `tol.abs_tol`
/// ([`Error::CertificatesAbsent`]).
pub fn odd_dimension_certificate(
    x1: &RealMatrix,
    x2: &RealMatrix,
    j1: &ComplexStructure,
    j2: &ComplexStructure,
    tol: Tolerance,
) -> Result<OddDimensionVerdict> {
    check_dim(x1.rows(), j1.dim())?;
    check_dim(x2.rows(), j2.dim())?;
    check_dim(x1.cols(), x2.cols())?;
    let n = x1.cols();
    let g1 = x1.gram();
    let g2 = x2.gram();
    let residual = g1.add(&g2)?.sub(&RealMatrix::identity(n))?.frobenius_norm();
    if !(residual <= FRAME_CONSTRAINT_TOL * (1.0 + crate::sqrt(n as f64))) {
        return Err(Error::ConstraintViolated { residual });
    }
    let (c1, c2) = commutators(x1, x2, j1, j2)?;
    if !(c1 <= tol.abs_tol && c2 <= tol.abs_tol) {
        return Err(Error::CertificatesAbsent {
            first: c1,
            second: c2,
        });
    }

    let solve = Tolerance::default();
    let first = cluster_eigenvalues(&sym_eig(&g1, solve)?.eigenvalues);
    let second = cluster_eigenvalues(&sym_eig(&g2, solve)?.eigenvalues);
    let table = MultiplicityTable {
        ones_in_first: multiplicity_at(&first, 1.0),
        zeros_in_first: multiplicity_at(&first, 0.0),
        ones_in_second: multiplicity_at(&second, 1.0),
        zeros_in_second: multiplicity_at(&second, 0.0),
        first,
        second,
    };

    let mut failures = Vec::new();
    for (factor, clusters) in [(Factor::First, &table.first), (Factor::Second, &table.second)] {
        for c in clusters.iter() {
            if c.value.abs() > MULTIPLICITY_CLUSTER_TOL && c.multiplicity % 2 == 1 {
                failures.push(ParityFailure::OddNonzeroMultiplicity {
                    factor,
                    value: c.value,
                    multiplicity: c.multiplicity,
                });
            }
        }
    }
    if table.ones_in_first != table.zeros_in_second {
        failures.push(ParityFailure::PairingMismatch {
            ones_in_first: table.ones_in_first,
            zeros_in_second: table.zeros_in_second,
        });
    }
    if table.zeros_in_first % 2 == 1 {
        failures.push(ParityFailure::OddKernel {
            multiplicity: table.zeros_in_first,
        });
    }

    if failures.is_empty() && n % 2 == 0 {
        Ok(OddDimensionVerdict::Consistent(table))
    } else {
        Ok(OddDimensionVerdict::Contradiction { n, table, failures })
    }
}

/// `(|[X_1 X_1^T, J_1]|_F, |[X_2 X_2^T, J_2]|_F)`.
pub fn commutators(
    x1: &RealMatrix,
    x2: &RealMatrix,
    j1: &ComplexStructure,
    j2: &ComplexStructure,
) -> Result<(f64, f64)> {
    Ok((
        x1.outer_gram().commutator_norm(j1.matrix())?,
        x2.outer_gram().commutator_norm(j2.matrix())?,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OddSearchSummary {
    pub trials: u64,
    /// Frames where both commutators were at most the threshold.
    pub hits: u64,
    /// Smallest `max(c1, c2)` seen.
    pub closest: f64,
}

/// Samples random `n`-frames of `R^{m1+m2}` (standard complex structures on
/// both factors) and counts those satisfying both commutation certificates
/// at `threshold`. Trial `t` uses seed `seed ^ t`.
pub fn odd_dimension_search(
    m1: usize,
    m2: usize,
    n: usize,
    trials: u64,
    seed: u64,
    threshold: f64,
) -> Result<OddSearchSummary> {
    let j1 = ComplexStructure::standard(m1)?;
    let j2 = ComplexStructure::standard(m2)?;
    let mut summary = OddSearchSummary {
        trials,
        hits: 0,
        closest: f64::INFINITY,
    };
    for t in 0..trials {
        let c = odd_dimension_trial(m1, m2, n, crate::rng::trial_seed(seed, t), &j1, &j2)?;
        if c <= threshold {
            summary.hits += 1;
        }
        summary.closest = summary.closest.min(c);
    }
    Ok(summary)
}

/// One search trial: `max` of the two commutator norms for a random frame.
pub fn odd_dimension_trial(
    m1: usize,
    m2: usize,
    n: usize,
    seed: u64,
    j1: &ComplexStructure,
    j2: &ComplexStructure,
) -> Result<f64> {
    let frame = ProductFrame::random(m1, m2, n, 0, seed)?;
    let (c1, c2) = commutators(
        &frame.first_factor_matrix(),
        &frame.second_factor_matrix(),
        j1,
        j2,
    )?;
    Ok(c1.max(c2))
}

/// Orthonormal `v_1, J v_1, v_2, J v_2, ...` spanning `pairs` mutually
/// orthogonal `J`-invariant planes.
fn invariant_planes(
    j: &ComplexStructure,
    pairs: usize,
    rng: &mut crate::rng::SeededRng,
) -> Vec<(Vec<f64>, Vec<f64>)> {
    let dim = j.dim();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut out = Vec::new();
    while out.len() < pairs {
        let mut v = gaussian_vec(rng, dim);
        for _ in 0..2 {
            for b in &basis {
                let p = dot(&v, b);
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= p * y;
                }
            }
        }
        let nv = crate::linalg::norm(&v);
        if nv < 1e-6 {
            continue;
        }
        for x in &mut v {
            *x /= nv;
        }
        let jv = j.apply(&v);
        basis.push(v.clone());
        basis.push(jv.clone());
        out.push((v, jv));
    }
    out
}

/// A tangent frame of dimension `2 * angles.len()` whose factor projections
/// are invariant under both complex structures:
/// `e = (cos θ v, sin θ w)`, `e' = (cos θ J_1 v, sin θ J_2 w)` per angle.
pub fn j_invariant_frame(
    j1: &ComplexStructure,
    j2: &ComplexStructure,
    angles: &[f64],
    seed: u64,
) -> Result<ProductFrame> {
    let (m1, m2) = (j1.dim(), j2.dim());
    let pairs = angles.len();
    if 2 * pairs > m1.min(m2) {
        return Err(Error::DimensionMismatch {
            expected: m1.min(m2) / 2,
            actual: pairs,
        });
    }
    let mut rng = seeded(seed);
    let p1 = invariant_planes(j1, pairs, &mut rng);
    let p2 = invariant_planes(j2, pairs, &mut rng);
    let mut tangent = Vec::with_capacity(2 * pairs);
    for (k, &theta) in angles.iter().enumerate() {
        let (c, s) = (libm::cos(theta), libm::sin(theta));
        let join = |a: &[f64], b: &[f64]| -> Vec<f64> {
            a.iter()
                .map(|x| c * x)
                .chain(b.iter().map(|y| s * y))
                .collect()
        };
        tangent.push(join(&p1[k].0, &p2[k].0));
        tangent.push(join(&p1[k].1, &p2[k].1));
    }
    ProductFrame::new(m1, m2, tangent, Vec::new(), Tolerance::default())
}

/// Extends orthonormal `columns` of `R^dim` to a full orthonormal basis and
/// returns the added vectors.
fn complete_basis(columns: &[Vec<f64>], dim: usize, rng: &mut crate::rng::SeededRng) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = columns.to_vec();
    let mut added = Vec::new();
    while basis.len() < dim {
        let mut v = gaussian_vec(rng, dim);
        for _ in 0..2 {
            for b in &basis {
                let p = dot(&v, b);
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= p * y;
                }
            }
        }
        let nv = crate::linalg::norm(&v);
        if nv < 1e-6 {
            continue;
        }
        for x in &mut v {
            *x /= nv;
        }
        basis.push(v.clone());
        added.push(v);
    }
    added
}

fn pad_first(v: &[f64], m2: usize) -> Vec<f64> {
    v.iter().copied().chain(core::iter::repeat(0.0).take(m2)).collect()
}

fn second_factor_units(m1: usize, m2: usize) -> Vec<Vec<f64>> {
    (0..m2)
        .map(|i| {
            let mut e = vec![0.0; m1 + m2];
            e[m1 + i] = 1.0;
            e
        })
        .collect()
}

/// Complete frame whose tangent space is the quaternionic line
/// `span(v, J_1 v, J_2 v, J_3 v)` of a random unit `v` in the first factor.
pub fn quaternionic_line_frame(
    quat: &QuaternionicStructure,
    m2: usize,
    seed: u64,
) -> Result<ProductFrame> {
    let m1 = quat.dim();
    let mut rng = seeded(seed);
    let mut v = gaussian_vec(&mut rng, m1);
    let nv = crate::linalg::norm(&v);
    for x in &mut v {
        *x /= nv;
    }
    let mut line = vec![v.clone()];
    for k in 1..=3 {
        line.push(quat.get(k)?.apply(&v));
    }
    let complement = complete_basis(&line, m1, &mut rng);
    let tangent = line.iter().map(|c| pad_first(c, m2)).collect();
    let mut normal: Vec<Vec<f64>> = complement.iter().map(|c| pad_first(c, m2)).collect();
    normal.extend(second_factor_units(m1, m2));
    ProductFrame::new(m1, m2, tangent, normal, Tolerance::default())
}

/// Complete frame (`m1 = 16`) whose tangent space is the octonionic line
/// `ℓ_m`, with a Haar-random basis of the line.
pub fn octonionic_line_frame(m: &LineParam, m2: usize, seed: u64) -> Result<ProductFrame> {
    let mut rng = seeded(seed);
    let basis = crate::lines::random_line_basis(m, &mut rng).columns();
    let complement = complete_basis(&basis, 16, &mut rng);
    let tangent = basis.iter().map(|c| pad_first(c, m2)).collect();
    let mut normal: Vec<Vec<f64>> = complement.iter().map(|c| pad_first(c, m2)).collect();
    normal.extend(second_factor_units(16, m2));
    ProductFrame::new(16, m2, tangent, normal, Tolerance::new(1e-10, 1e-10)?)
}
