//! The octonionic projection inequality
//!
//! ```text
//! Σ_ji |x_j|² |Proj_{L(x_j)} x_i|² <= 8 Σ_ij <x_i, x_j>²
//! ```
//!
//! for Cayley vectors `x_1..x_n`, together with its reduction to a quadratic
//! function of the Gram eigenvalues of the vectors grouped by line.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::RangeInclusive;

use rand::Rng;

use crate::Square;
use crate::error::{Error, Result};
use crate::linalg::{numerical_rank, sym_eig, RealMatrix};
use crate::lines::{
    gram_of_bases, line_basis, line_through, random_octonion, CayleyVector, LineParam,
    SAME_LINE_REL_TOL,
};
use crate::rng::{gaussian, seeded, trial_seed};
use crate::tol::Tolerance;

/// `|Proj_{ℓ_m} x|²` in closed form: `|p + m* q|² / (1 + |m|²)` for
/// `x = (p, q)`, `|q|²` at infinity.
fn projected_norm_sq(x: &CayleyVector, m: &LineParam) -> f64 {
    match m {
        LineParam::Finite(m) => (x.u + m.conj() * x.v).norm_sq() / (1.0 + m.norm_sq()),
        LineParam::Infinity => x.v.norm_sq(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionDefect {
    /// `Σ_ji |x_j|² |Proj_{L(x_j)} x_i|²`
    pub projection_sum: f64,
    /// `Σ_ij <x_i, x_j>²`
    pub gram_sum: f64,
    /// `projection_sum - 8 gram_sum`
    pub value: f64,
}

/// Both sides of the inequality. Vectors with `|x| <= tol.abs_tol` use
/// `fallback` as their line.
pub fn projection_defect(xs: &[CayleyVector], fallback: LineParam, tol: Tolerance) -> ProjectionDefect {
    let mut projection_sum = 0.0;
    for xj in xs {
        let line = line_through(xj, tol).unwrap_or(fallback);
        let inner: f64 = xs.iter().map(|xi| projected_norm_sq(xi, &line)).sum();
        projection_sum += xj.norm_sq() * inner;
    }
    let mut gram_sum = 0.0;
    for xi in xs {
        for xj in xs {
            gram_sum += xi.dot(xj).sq();
        }
    }
    ProjectionDefect {
        projection_sum,
        gram_sum,
        value: projection_sum - 8.0 * gram_sum,
    }
}

/// `Σ_ji |x_j|² |Proj_{L(x_j)} x_i|² - 8 Σ_ij <x_i, x_j>²`; never positive up
/// to rounding.
pub fn octo_defect(xs: &[CayleyVector], fallback: LineParam, tol: Tolerance) -> f64 {
    projection_defect(xs, fallback, tol).value
}

/// `(Σ|x|²)² - 8 Σ <x_i, x_j>²`, an upper bound for [`octo_defect`] that is
/// itself non-positive when the vectors span at most 8 dimensions. Returns
/// `None` when the numerical rank (relative cutoff `rel_cutoff`) exceeds 8.
pub fn low_rank_bound(xs: &[CayleyVector], rel_cutoff: f64) -> Option<f64> {
    let cols: Vec<[f64; 16]> = xs.iter().map(CayleyVector::to_array).collect();
    let x = RealMatrix::from_columns(16, &cols).ok()?;
    if numerical_rank(&x, rel_cutoff) > 8 {
        return None;
    }
    let total: f64 = xs.iter().map(CayleyVector::norm_sq).sum();
    let d = projection_defect(xs, LineParam::ORIGIN, Tolerance::default());
    Some(total * total - 8.0 * d.gram_sum)
}

/// `c_{r,s}` and `A_{r,s}` between two groups.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    pub c: f64,
    pub a: RealMatrix,
}

/// Vectors grouped by line, with the Gram spectrum of each group expressed
/// in coordinates of its line.
///
/// For group `r` with line basis `B_r` and coordinates `Y_r = B_r^T X_r`,
/// `Y_r Y_r^T = U_r diag(λ_r) U_r^T`. Couplings are
/// `A_{r,s} = U_r^T Q_{r,s} U_s` where `B_r^T B_s = c_{r,s} Q_{r,s}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LineDecomposition {
    pub lines: Vec<LineParam>,
    /// Input indices per line.
    pub groups: Vec<Vec<usize>>,
    /// `λ_{r,i}`, descending within each row.
    pub eigen: Vec<[f64; 8]>,
    /// `U_r`.
    pub rotations: Vec<RealMatrix>,
    /// `Y_r` (8 x group size).
    pub coordinates: Vec<RealMatrix>,
    /// `couplings[r][s]`.
    pub couplings: Vec<Vec<Coupling>>,
}

impl LineDecomposition {
    pub fn k(&self) -> usize {
        self.lines.len()
    }
}

/// Groups nonzero vectors by line (same-line test at [`SAME_LINE_REL_TOL`])
/// and builds the spectral data of each group.
pub fn decompose(xs: &[CayleyVector], tol: Tolerance) -> Result<LineDecomposition> {
    let mut lines: Vec<LineParam> = Vec::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, x) in xs.iter().enumerate() {
        let m = line_through(x, tol)?;
        match lines.iter().position(|l| l.same_line(&m, SAME_LINE_REL_TOL)) {
            Some(r) => groups[r].push(i),
            None => {
                lines.push(m);
                groups.push(vec![i]);
            }
        }
    }

    let bases: Vec<RealMatrix> = lines.iter().map(line_basis).collect();
    let mut eigen = Vec::with_capacity(lines.len());
    let mut rotations = Vec::with_capacity(lines.len());
    let mut coordinates = Vec::with_capacity(lines.len());
    for (r, group) in groups.iter().enumerate() {
        let cols: Vec<[f64; 16]> = group.iter().map(|&i| xs[i].to_array()).collect();
        let x = RealMatrix::from_columns(16, &cols)?;
        let rank = numerical_rank(&x, 1e-6);
        if rank > 8 {
            return Err(Error::DegenerateGroup { group: r, rank });
        }
        let y = bases[r].tr_matmul(&x)?;
        let spectrum = sym_eig(&y.outer_gram(), Tolerance::default())?;
        let mut row = [0.0; 8];
        for (slot, l) in row.iter_mut().zip(&spectrum.eigenvalues) {
            *slot = l.max(0.0);
        }
        eigen.push(row);
        rotations.push(spectrum.eigenvectors);
        coordinates.push(y);
    }

    let k = lines.len();
    let mut couplings: Vec<Vec<Coupling>> = Vec::with_capacity(k);
    for r in 0..k {
        let mut row = Vec::with_capacity(k);
        for s in 0..k {
            if r == s {
                row.push(Coupling {
                    c: 1.0,
                    a: RealMatrix::identity(8),
                });
            } else if s < r {
                let mirror: &Coupling = &couplings[s][r];
                row.push(Coupling {
                    c: mirror.c,
                    a: mirror.a.transpose(),
                });
            } else {
                let g = gram_of_bases(&bases[r], &bases[s], tol)?;
                let a = rotations[r].tr_matmul(&g.q.matmul(&rotations[s])?)?;
                row.push(Coupling { c: g.c, a });
            }
        }
        couplings.push(row);
    }

    Ok(LineDecomposition {
        lines,
        groups,
        eigen,
        rotations,
        coordinates,
        couplings,
    })
}

fn check_lambdas(dec: &LineDecomposition, lambdas: &[[f64; 8]]) -> Result<()> {
    if lambdas.len() != dec.k() {
        return Err(Error::DimensionMismatch {
            expected: dec.k(),
            actual: lambdas.len(),
        });
    }
    for (row, vals) in lambdas.iter().enumerate() {
        for (col, &value) in vals.iter().enumerate() {
            if !(value >= 0.0) {
                return Err(Error::NegativeEigenvalue { row, col, value });
            }
        }
    }
    Ok(())
}

/// `f(λ) = Σ_{r,s} c²_{r,s} (Σ_i λ_{r,i})(Σ_j λ_{s,j}) - 8 Σ c²_{r,s} λ_{r,i} λ_{s,j} (A_{r,s})²_ij`.
pub fn eigen_f(dec: &LineDecomposition, lambdas: &[[f64; 8]]) -> Result<f64> {
    check_lambdas(dec, lambdas)?;
    Ok(eval_f(dec, lambdas))
}

fn eval_f(dec: &LineDecomposition, lambdas: &[[f64; 8]]) -> f64 {
    let sums: Vec<f64> = lambdas.iter().map(|r| r.iter().sum()).collect();
    let mut total = 0.0;
    for (r, lr) in lambdas.iter().enumerate() {
        for (s, ls) in lambdas.iter().enumerate() {
            let cp = &dec.couplings[r][s];
            let c2 = cp.c * cp.c;
            let mut weighted = 0.0;
            for i in 0..8 {
                for j in 0..8 {
                    weighted += lr[i] * ls[j] * cp.a[(i, j)].sq();
                }
            }
            total += c2 * (sums[r] * sums[s] - 8.0 * weighted);
        }
    }
    total
}

/// `∂f/∂λ_{r,i} = 2 Σ_s c²_{r,s} Σ_j λ_{s,j} - 16 Σ_s c²_{r,s} Σ_j λ_{s,j} (A_{r,s})²_ij`.
pub fn eigen_f_gradient(dec: &LineDecomposition, lambdas: &[[f64; 8]]) -> Result<Vec<[f64; 8]>> {
    check_lambdas(dec, lambdas)?;
    Ok(eval_gradient(dec, lambdas))
}

fn eval_gradient(dec: &LineDecomposition, lambdas: &[[f64; 8]]) -> Vec<[f64; 8]> {
    let sums: Vec<f64> = lambdas.iter().map(|r| r.iter().sum()).collect();
    let k = lambdas.len();
    let mut grad = vec![[0.0; 8]; k];
    for (r, g) in grad.iter_mut().enumerate() {
        for (s, ls) in lambdas.iter().enumerate() {
            let cp = &dec.couplings[r][s];
            let c2 = cp.c * cp.c;
            for (i, gi) in g.iter_mut().enumerate() {
                let mut weighted = 0.0;
                for (j, l) in ls.iter().enumerate() {
                    weighted += l * cp.a[(i, j)].sq();
                }
                *gi += c2 * (2.0 * sums[s] - 16.0 * weighted);
            }
        }
    }
    grad
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaximizeReport {
    pub value: f64,
    pub argmax: Vec<[f64; 8]>,
    /// `|(∇f - αλ)_free| + |max(∇f_active, 0)|` at the argmax.
    pub kkt_residual: f64,
    pub starts: usize,
    /// `value <= tol.bound(C²)`.
    pub bound_holds: bool,
}

pub const MAXIMIZE_STARTS: usize = 32;
const INITIAL_STEP: f64 = 0.1;
const MIN_STEP: f64 = 1e-14;

/// Clamps to the orthant and rescales onto `Σλ² = c`.
fn project(lambdas: &mut [[f64; 8]], c: f64) {
    let mut sq = 0.0;
    for v in lambdas.iter_mut().flat_map(|r| r.iter_mut()) {
        *v = v.max(0.0);
        sq += *v * *v;
    }
    let total = lambdas.len() * 8;
    if sq <= 0.0 {
        let u = crate::sqrt(c / total as f64);
        for v in lambdas.iter_mut().flat_map(|r| r.iter_mut()) {
            *v = u;
        }
        return;
    }
    let s = crate::sqrt(c / sq);
    for v in lambdas.iter_mut().flat_map(|r| r.iter_mut()) {
        *v *= s;
    }
}

fn kkt_residual(dec: &LineDecomposition, lambdas: &[[f64; 8]], c: f64) -> f64 {
    let grad = eval_gradient(dec, lambdas);
    let mut inner = 0.0;
    for (g, l) in grad.iter().zip(lambdas) {
        for i in 0..8 {
            inner += g[i] * l[i];
        }
    }
    let alpha = inner / c;
    let mut res = 0.0;
    for (g, l) in grad.iter().zip(lambdas) {
        for i in 0..8 {
            let r = if l[i] > 0.0 {
                g[i] - alpha * l[i]
            } else {
                g[i].max(0.0)
            };
            res += r * r;
        }
    }
    crate::sqrt(res)
}

/// Multi-start projected gradient ascent of `f` over
/// `{λ >= 0, Σλ² = c}`. Start `t` draws from seed `seed ^ t`; each run takes
/// at most `iters` accepted steps with backtracking from `0.1`.
pub fn maximize_f(
    dec: &LineDecomposition,
    c: f64,
    seed: u64,
    iters: usize,
    tol: Tolerance,
) -> Result<MaximizeReport> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::BadScale(c));
    }
    let k = dec.k();
    let mut best: Option<(f64, Vec<[f64; 8]>)> = None;
    for start in 0..MAXIMIZE_STARTS {
        let mut rng = seeded(trial_seed(seed, start as u64));
        let mut lam: Vec<[f64; 8]> = (0..k)
            .map(|_| core::array::from_fn(|_| gaussian(&mut rng).abs()))
            .collect();
        project(&mut lam, c);
        let (value, lam) = ascend(dec, lam, c, iters);
        if best.as_ref().map_or(true, |(b, _)| value > *b) {
            best = Some((value, lam));
        }
    }
    let (value, argmax) = best.unwrap_or((0.0, Vec::new()));
    let kkt = if k == 0 { 0.0 } else { kkt_residual(dec, &argmax, c) };
    Ok(MaximizeReport {
        value,
        argmax,
        kkt_residual: kkt,
        starts: MAXIMIZE_STARTS,
        bound_holds: value <= tol.bound(c * c),
    })
}

fn ascend(dec: &LineDecomposition, mut lam: Vec<[f64; 8]>, c: f64, iters: usize) -> (f64, Vec<[f64; 8]>) {
    let mut value = eval_f(dec, &lam);
    let mut step = INITIAL_STEP;
    let mut trial = lam.clone();
    for _ in 0..iters {
        let grad = eval_gradient(dec, &lam);
        let mut accepted = false;
        while step >= MIN_STEP {
            for ((t, l), g) in trial.iter_mut().zip(&lam).zip(&grad) {
                for i in 0..8 {
                    t[i] = l[i] + step * g[i];
                }
            }
            project(&mut trial, c);
            let v = eval_f(dec, &trial);
            if v > value {
                value = v;
                core::mem::swap(&mut lam, &mut trial);
                accepted = true;
                step = (step * 2.0).min(1e3);
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (value, lam)
}

/// Number of histogram bins over `defect / (Σ|x|²)² ∈ [-8, 0]`; one extra bin
/// collects ratios above [`FALSIFY_RATIO_TOL`].
pub const HISTOGRAM_BINS: usize = 16;

/// Largest admissible `defect / (Σ|x|²)²`; anything above is a violation.
pub const FALSIFY_RATIO_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct FalsifyReport {
    pub trials: u64,
    /// Largest `defect / (Σ|x|²)²`; `None` when no trial ran.
    pub worst_ratio: Option<f64>,
    /// Raw defect of the worst trial.
    pub worst_defect: Option<f64>,
    pub witness: Option<Vec<CayleyVector>>,
    pub witness_trial: Option<u64>,
    /// Counts of `ratio` in `HISTOGRAM_BINS` equal bins on `[-8, 0]`
    /// (rounding-level positives land in the top bin), followed by one bin
    /// for violations.
    pub histogram: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FalsifyTrial {
    pub defect: f64,
    /// `(Σ|x|²)²`
    pub scale: f64,
    pub xs: Vec<CayleyVector>,
}

impl FalsifyTrial {
    pub fn ratio(&self) -> f64 {
        if self.scale > 0.0 {
            self.defect / self.scale
        } else {
            0.0
        }
    }
}

/// A random line parameter, occasionally the point at infinity.
fn random_line<R: Rng + ?Sized>(rng: &mut R) -> LineParam {
    if rng.random_range(0..8) == 0 {
        LineParam::Infinity
    } else {
        LineParam::Finite(random_octonion(rng).scale(rng.random_range(0.1..2.0)))
    }
}

/// Draws `n` vectors for one trial. Sampling rotates through generic
/// Gaussian vectors, vectors on a few random lines, the same with small
/// perturbations, and perturbed copies of a scaled orthonormal basis of one
/// line, where the inequality is an equality.
pub fn falsify_sample(n: usize, seed: u64) -> Vec<CayleyVector> {
    let mut rng = seeded(seed);
    let mode = rng.random_range(0..4u8);
    if mode == 0 || n == 0 {
        return (0..n).map(|_| CayleyVector::random(&mut rng)).collect();
    }
    if mode == 3 {
        let m = random_line(&mut rng);
        let basis = crate::lines::random_line_basis(&m, &mut rng);
        let scale = rng.random_range(0.1..10.0);
        let eps = libm::pow(10.0, -(rng.random_range(3..=9) as f64)) * scale;
        return (0..n)
            .map(|j| {
                let c = CayleyVector::from_slice(&basis.column(j % 8)).expect("16 rows");
                c.scale(scale) + CayleyVector::random(&mut rng).scale(eps)
            })
            .collect();
    }
    let k = rng.random_range(1..=4usize);
    let lines: Vec<LineParam> = (0..k).map(|_| random_line(&mut rng)).collect();
    let eps = if mode == 2 { 1e-3 } else { 0.0 };
    (0..n)
        .map(|_| {
            let m = lines[rng.random_range(0..k)];
            let mut x = m.point(random_octonion(&mut rng));
            if eps > 0.0 {
                x = x + CayleyVector::random(&mut rng).scale(eps);
            }
            x
        })
        .collect()
}

/// One falsification trial with per-trial seed `seed`.
pub fn falsify_trial(n: usize, seed: u64) -> FalsifyTrial {
    let xs = falsify_sample(n, seed);
    let defect = octo_defect(&xs, LineParam::ORIGIN, Tolerance::default());
    let total: f64 = xs.iter().map(CayleyVector::norm_sq).sum();
    FalsifyTrial {
        defect,
        scale: total * total,
        xs,
    }
}

/// Histogram bin of a ratio (see [`FalsifyReport::histogram`]).
pub fn histogram_bin(ratio: f64) -> usize {
    if ratio > FALSIFY_RATIO_TOL {
        return HISTOGRAM_BINS;
    }
    let t = (ratio + 8.0) / 8.0 * HISTOGRAM_BINS as f64;
    if t <= 0.0 {
        0
    } else {
        (t as usize).min(HISTOGRAM_BINS - 1)
    }
}

/// Runs `trials` trials; trial `t` uses `n = sizes.start() + t mod |sizes|`
/// vectors and seed `seed ^ t`. Ties keep the earliest trial.
pub fn falsify_search(sizes: RangeInclusive<usize>, seed: u64, trials: u64) -> FalsifyReport {
    let mut report = FalsifyReport {
        trials,
        worst_ratio: None,
        worst_defect: None,
        witness: None,
        witness_trial: None,
        histogram: vec![0; HISTOGRAM_BINS + 1],
    };
    for t in 0..trials {
        let n = size_for_trial(&sizes, t);
        let trial = falsify_trial(n, trial_seed(seed, t));
        let ratio = trial.ratio();
        report.histogram[histogram_bin(ratio)] += 1;
        if report.worst_ratio.map_or(true, |w| ratio > w) {
            report.worst_ratio = Some(ratio);
            report.worst_defect = Some(trial.defect);
            report.witness = Some(trial.xs);
            report.witness_trial = Some(t);
        }
    }
    report
}

/// Number of vectors used by trial `t`.
pub fn size_for_trial(sizes: &RangeInclusive<usize>, t: u64) -> usize {
    let (lo, hi) = (*sizes.start(), *sizes.end());
    if hi < lo {
        return lo;
    }
    lo + (t % (hi - lo + 1) as u64) as usize
}

/// Points on `ℓ_m` from the standard basis vectors `I_s`.
pub fn standard_line_points(m: &LineParam) -> Vec<CayleyVector> {
    line_basis(m)
        .columns()
        .iter()
        .map(|c| CayleyVector::from_slice(c).expect("16 rows"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::octonion::Octonion;
    use crate::linalg::random_orthogonal;
    use crate::lines::project_onto_line;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn e0() -> CayleyVector {
        CayleyVector::new(Octonion::ONE, Octonion::ZERO)
    }

    fn e_inf() -> CayleyVector {
        CayleyVector::new(Octonion::ZERO, Octonion::ONE)
    }

    fn brute_defect(xs: &[CayleyVector]) -> f64 {
        let mut s = 0.0;
        for xj in xs {
            let m = line_through(xj, tol()).unwrap();
            for xi in xs {
                s += xj.norm_sq() * project_onto_line(xi, &m).norm_sq();
                s -= 8.0 * xi.dot(xj).sq();
            }
        }
        s
    }

    #[test]
    fn defect_examples() {
        assert_eq!(octo_defect(&[], LineParam::ORIGIN, tol()), 0.0);
        let line = standard_line_points(&LineParam::Finite(Octonion::unit(2)));
        assert!(octo_defect(&line, LineParam::ORIGIN, tol()).abs() < 1e-12);
        let pair = [e0(), e_inf()];
        assert_eq!(octo_defect(&pair, LineParam::ORIGIN, tol()), -14.0);
        let mut rng = seeded(3);
        for _ in 0..50 {
            let x = CayleyVector::random(&mut rng);
            let x = x.scale(1.0 / x.norm());
            assert!((octo_defect(&[x], LineParam::ORIGIN, tol()) + 7.0).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_form_projection_matches_basis() {
        let mut rng = seeded(4);
        for _ in 0..200 {
            let x = CayleyVector::random(&mut rng);
            let m = random_line(&mut rng);
            let a = projected_norm_sq(&x, &m);
            let b = project_onto_line(&x, &m).norm_sq();
            assert!((a - b).abs() < 1e-12 * (1.0 + b));
        }
    }

    #[test]
    fn defect_matches_brute_force_and_sign() {
        let mut rng = seeded(5);
        for t in 0..200u64 {
            let n = 1 + (t as usize % 12);
            let xs = falsify_sample(n, rng.random());
            let d = octo_defect(&xs, LineParam::ORIGIN, tol());
            let total: f64 = xs.iter().map(CayleyVector::norm_sq).sum();
            let scale = (1.0 + total).sq();
            assert!((d - brute_defect(&xs)).abs() < 1e-10 * scale);
            assert!(d <= 1e-9 * scale);
        }
    }

    #[test]
    fn degree_four_homogeneity() {
        let xs = falsify_sample(7, 9);
        let d = octo_defect(&xs, LineParam::ORIGIN, tol());
        let scaled: Vec<_> = xs.iter().map(|x| x.scale(2.0)).collect();
        assert_eq!(octo_defect(&scaled, LineParam::ORIGIN, tol()), 16.0 * d);
    }

    #[test]
    fn decomposition_examples() {
        let line = standard_line_points(&LineParam::ORIGIN);
        let dec = decompose(&line, tol()).unwrap();
        assert_eq!(dec.k(), 1);
        for l in dec.eigen[0] {
            assert!((l - 1.0).abs() < 1e-12);
        }

        let dec = decompose(&[e0(), e_inf()], tol()).unwrap();
        assert_eq!(dec.k(), 2);
        assert!(dec.couplings[0][1].c.abs() < 1e-15);

        let mut xs = standard_line_points(&LineParam::ORIGIN);
        xs.extend(standard_line_points(&LineParam::Finite(Octonion::unit(1))));
        let dec = decompose(&xs, tol()).unwrap();
        assert_eq!(dec.k(), 2);
        assert!((dec.couplings[0][1].c - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert_eq!(dec.groups, vec![(0..8).collect::<Vec<_>>(), (8..16).collect()]);

        assert!(matches!(
            decompose(&[CayleyVector::ZERO], tol()),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn decomposition_invariants() {
        for seed in 0..40 {
            let xs = falsify_sample(10, seed);
            let dec = decompose(&xs, tol()).unwrap();
            let k = dec.k();
            for r in 0..k {
                assert_eq!(dec.couplings[r][r].c, 1.0);
                for s in 0..k {
                    let (a, b) = (&dec.couplings[r][s], &dec.couplings[s][r]);
                    assert_eq!(a.c, b.c);
                    assert!(a.a.sub(&b.a.transpose()).unwrap().frobenius_norm() < 1e-12);
                    if a.c > 1e-9 {
                        assert!(a.a.orthogonality_residual() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn eigen_f_reproduces_defect() {
        let dec = decompose(&[e0(), e_inf()], tol()).unwrap();
        assert!((eigen_f(&dec, &dec.eigen).unwrap() + 14.0).abs() < 1e-12);
        let zero = vec![[0.0; 8]; dec.k()];
        assert_eq!(eigen_f(&dec, &zero).unwrap(), 0.0);
        for seed in 0..100 {
            let xs = falsify_sample(1 + seed as usize % 20, seed);
            let dec = decompose(&xs, tol()).unwrap();
            let f = eigen_f(&dec, &dec.eigen).unwrap();
            let d = octo_defect(&xs, LineParam::ORIGIN, tol());
            let total: f64 = xs.iter().map(CayleyVector::norm_sq).sum();
            assert!((f - d).abs() <= 1e-9 * total * total, "{f} vs {d}");
        }
    }

    #[test]
    fn eigen_f_single_line() {
        let dec = decompose(&standard_line_points(&LineParam::ORIGIN), tol()).unwrap();
        assert!(eigen_f(&dec, &[[1.0; 8]]).unwrap().abs() < 1e-12);
        let lam = [[3.0, 1.0, 0.0, 2.0, 0.5, 0.0, 1.0, 4.0]];
        let s: f64 = lam[0].iter().sum();
        let q: f64 = lam[0].iter().map(|l| l * l).sum();
        assert!((eigen_f(&dec, &lam).unwrap() - (s * s - 8.0 * q)).abs() < 1e-12);
        assert!(matches!(
            eigen_f(&dec, &[[-1.0; 8]]),
            Err(Error::NegativeEigenvalue { .. })
        ));
        assert!(eigen_f(&dec, &[]).is_err());
    }

    #[test]
    fn ordering_within_group_is_irrelevant() {
        // conjugating A by a permutation of one group's eigenbasis leaves f fixed
        let xs = falsify_sample(12, 77);
        let mut dec = decompose(&xs, tol()).unwrap();
        let f0 = eigen_f(&dec, &dec.eigen).unwrap();
        let k = dec.k();
        let mut perm = RealMatrix::zeros(8, 8);
        for i in 0..8 {
            perm[(i, 7 - i)] = 1.0;
        }
        let mut lam = dec.eigen.clone();
        lam[0].reverse();
        for s in 0..k {
            if s != 0 {
                let a = perm.tr_matmul(&dec.couplings[0][s].a).unwrap();
                dec.couplings[s][0].a = a.transpose();
                dec.couplings[0][s].a = a;
            }
        }
        let f1 = eigen_f(&dec, &lam).unwrap();
        assert!((f0 - f1).abs() < 1e-10 * (1.0 + f0.abs()));
    }

    #[test]
    fn gradient_identities() {
        for seed in 0..50 {
            let xs = falsify_sample(1 + seed as usize % 16, seed + 500);
            let dec = decompose(&xs, tol()).unwrap();
            let mut rng = seeded(seed);
            let lam: Vec<[f64; 8]> = (0..dec.k())
                .map(|_| core::array::from_fn(|_| rng.random_range(0.0..2.0)))
                .collect();
            let g = eigen_f_gradient(&dec, &lam).unwrap();
            for row in &g {
                let s: f64 = row.iter().sum();
                assert!(s.abs() < 1e-10 * (1.0 + row.iter().map(|v| v.abs()).sum::<f64>()));
            }
            let h = 1e-5;
            for r in 0..dec.k() {
                for i in 0..8 {
                    let mut p = lam.clone();
                    let mut m = lam.clone();
                    p[r][i] += h;
                    m[r][i] -= h;
                    let fd = (eigen_f(&dec, &p).unwrap() - eigen_f(&dec, &m).unwrap()) / (2.0 * h);
                    assert!((fd - g[r][i]).abs() <= 1e-5 * (1.0 + g[r][i].abs()));
                }
            }
        }
        let dec = decompose(&[e0()], tol()).unwrap();
        assert_eq!(eigen_f_gradient(&dec, &[[0.0; 8]]).unwrap(), vec![[0.0; 8]]);
    }

    #[test]
    fn maximize_single_line() {
        let dec = decompose(&standard_line_points(&LineParam::ORIGIN), tol()).unwrap();
        let r = maximize_f(&dec, 1.0, 1, 2000, Tolerance::uniform(1e-7).unwrap()).unwrap();
        assert!(r.value <= 1e-12);
        assert!(r.value > -1e-6);
        assert!(r.bound_holds);
        let mean = r.argmax[0].iter().sum::<f64>() / 8.0;
        for l in r.argmax[0] {
            assert!((l - mean).abs() < 1e-3);
        }
        assert!(maximize_f(&dec, 0.0, 1, 10, tol()).is_err());
    }

    #[test]
    fn maximize_orthogonal_lines() {
        let dec = decompose(&[e0(), e_inf()], tol()).unwrap();
        let r = maximize_f(&dec, 2.0, 2, 2000, Tolerance::uniform(1e-7).unwrap()).unwrap();
        assert!(r.value <= 1e-7 * 4.0);
        assert!(r.value > -1e-5);
    }

    #[test]
    fn maximize_random() {
        for seed in 0..5 {
            let xs = falsify_sample(6, seed + 900);
            let dec = decompose(&xs, tol()).unwrap();
            let r = maximize_f(&dec, 1.0, seed, 500, Tolerance::uniform(1e-7).unwrap()).unwrap();
            assert!(r.bound_holds, "value {}", r.value);
        }
    }

    #[test]
    fn falsify_examples() {
        let r = falsify_search(8..=8, 1, 0);
        assert_eq!(r.worst_ratio, None);
        assert!(r.witness.is_none());
        let r = falsify_search(1..=32, 3, 300);
        assert!(r.worst_ratio.unwrap() <= 1e-8);
        assert_eq!(r.histogram.iter().sum::<u64>(), 300);
        assert_eq!(r.histogram[HISTOGRAM_BINS], 0);
        assert_eq!(size_for_trial(&(1..=32), 31), 32);
        assert_eq!(size_for_trial(&(1..=32), 32), 1);
    }

    #[test]
    fn low_rank_bound_agrees_in_sign() {
        for seed in 0..100 {
            let xs = falsify_sample(1 + seed as usize % 8, seed + 1234);
            let b = low_rank_bound(&xs, 1e-10).unwrap();
            let d = octo_defect(&xs, LineParam::ORIGIN, tol());
            let total: f64 = xs.iter().map(CayleyVector::norm_sq).sum();
            assert!(b <= 1e-9 * total * total);
            assert!(d <= b + 1e-9 * total * total);
        }
        let generic: Vec<_> = (0..12).map(|s| falsify_trial(12, s).xs).find(|xs| {
            low_rank_bound(xs, 1e-10).is_none()
        }).unwrap();
        assert_eq!(generic.len(), 12);
    }

    #[test]
    fn rotation_of_group_coordinates() {
        // rotating the vectors of one group inside their line leaves f unchanged
        let xs = standard_line_points(&LineParam::Finite(Octonion::unit(5)));
        let o = random_orthogonal(8, 3);
        let rotated: Vec<CayleyVector> = (0..8)
            .map(|j| {
                let mut v = CayleyVector::ZERO;
                for i in 0..8 {
                    v = v + xs[i].scale(o[(i, j)]);
                }
                v
            })
            .collect();
        let a = octo_defect(&xs, LineParam::ORIGIN, tol());
        let b = octo_defect(&rotated, LineParam::ORIGIN, tol());
        assert!((a - b).abs() < 1e-10);
    }
}
