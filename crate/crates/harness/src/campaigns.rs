//! One seeded campaign per command. Every trial draws from its own seed and
//! reports scale-free metrics; see [`crate::runner`] for aggregation.

use std::f64::consts::FRAC_PI_2;
use std::time::Instant;

use rand::Rng;
use serde_json::{json, Value};

use cayley_core::curvature::{
    bianchi_residual, curvature_diag, curvature_full, gauss_2ff_inner, sectional_curvature,
};
use cayley_core::extremizer::{
    decompose, eigen_f, eigen_f_gradient, falsify_trial, histogram_bin, maximize_f, HISTOGRAM_BINS,
};
use cayley_core::linalg::{qr, random_orthogonal_with, RealMatrix};
use cayley_core::lines::{
    line_basis, line_gram, line_through, project_onto_line, random_line_basis, random_octonion,
};
use cayley_core::octonion::identity_residuals;
use cayley_core::rng::{gaussian, seeded, SeededRng};
use cayley_core::trace_ineq::{invariant_span_example, key_defect, sum_defect};
use cayley_core::variation::{
    complex_integrand, j_invariant_frame, octonionic_integrand_normal,
    octonionic_integrand_tangent, octonionic_line_frame, odd_dimension_certificate,
    odd_dimension_trial, quaternionic_integrand, quaternionic_line_frame, raw_2ff_sum,
    ComplexStructure, OddDimensionVerdict, ProductFrame, QuaternionicStructure,
};
use cayley_core::{CayleyVector, LineParam, Octonion, Tolerance};

use crate::config::{CampaignConfig, Command};
use crate::error::HarnessError;
use crate::report::{CampaignReport, PropertyResult};
use crate::runner::{finish, run_trials, PropertySpec, TrialOutcome};

type CoreResult<T> = cayley_core::Result<T>;

/// Commutators at or below this count as vanishing in the key-inequality
/// equality check.
pub const COMMUTATOR_ZERO: f64 = 1e-10;
/// Relative error allowed between the analytic gradient of the eigenvalue
/// function and central differences with step `FD_STEP`.
pub const FD_TOL: f64 = 1e-5;
pub const FD_STEP: f64 = 1e-5;
/// `extremize` checks finite differences on the first `FD_TRIALS` trials.
pub const FD_TRIALS: u64 = 200;
/// `extremize` runs the multi-start maximizer on the first `MAXIMIZE_TRIALS`
/// trials.
pub const MAXIMIZE_TRIALS: u64 = 16;
pub const MAXIMIZE_ITERS: usize = 2000;
/// Tolerance of the parity certificate on constructed even-dimensional frames.
pub const CONSTRUCTED_CERT_TOL: f64 = 1e-9;

pub const ODD_VERDICT_CONSISTENT: &str = "consistent with the odd-dimension obstruction";
pub const ODD_VERDICT_VIOLATED: &str = "certified frame found: odd-dimension obstruction violated";

/// Runs the configured campaign and times it.
pub fn execute(cfg: &CampaignConfig) -> Result<CampaignReport, HarnessError> {
    let start = Instant::now();
    let properties = run_campaign(cfg)?;
    Ok(CampaignReport {
        config: cfg.clone(),
        properties,
        runtime_s: start.elapsed().as_secs_f64(),
    })
}

pub fn run_campaign(cfg: &CampaignConfig) -> Result<Vec<PropertyResult>, HarnessError> {
    match cfg.command {
        Command::Identities => Ok(identities(cfg)),
        Command::IneqKey => ineq_key(cfg),
        Command::IneqSum => ineq_sum(cfg),
        Command::Lines => Ok(lines(cfg)),
        Command::Curvature => curvature(cfg),
        Command::VariationComplex => variation_complex(cfg),
        Command::VariationQuat => variation_quat(cfg),
        Command::VariationOcto => variation_octo(cfg),
        Command::Extremize => extremize(cfg),
        Command::CertifyOdd => certify_odd(cfg),
        Command::ReportAll => {
            let mut out = Vec::new();
            for sub in &cfg.campaigns {
                for mut p in run_campaign(sub)? {
                    p.name = format!("{}/{}", sub.command.name(), p.name);
                    out.push(p);
                }
            }
            Ok(out)
        }
    }
}

fn outcome(len: usize, r: CoreResult<Vec<Option<f64>>>) -> TrialOutcome {
    match r {
        Ok(m) => TrialOutcome::new(m),
        Err(_) => TrialOutcome::failed(len),
    }
}

fn dim(v: Option<usize>) -> Result<usize, HarnessError> {
    v.ok_or_else(|| HarnessError::config("missing dimension"))
}

fn unit_cayley(rng: &mut SeededRng) -> CayleyVector {
    let x = CayleyVector::random(rng);
    x.scale(1.0 / x.norm())
}

fn random_line(rng: &mut SeededRng) -> LineParam {
    if rng.random_range(0..8) == 0 {
        LineParam::Infinity
    } else {
        LineParam::Finite(random_octonion(rng).scale(rng.random_range(0.1..3.0)))
    }
}

/// A point of the line orthogonal to `m` through the origin.
fn complement_point(m: &LineParam, w: Octonion) -> CayleyVector {
    match m {
        LineParam::Finite(m) => CayleyVector::new(-(m.conj() * w), w),
        LineParam::Infinity => CayleyVector::new(w, Octonion::ZERO),
    }
}

fn operands(seed: u64) -> [Octonion; 6] {
    let mut rng = seeded(seed);
    std::array::from_fn(|_| random_octonion(&mut rng))
}

fn identities(cfg: &CampaignConfig) -> Vec<PropertyResult> {
    let t = cfg.tol;
    let specs = vec![
        PropertySpec::at_most("left_adjoint", t),
        PropertySpec::at_most("right_adjoint", t),
        PropertySpec::at_most("polarized_norm", t),
        PropertySpec::at_most("norm_multiplicative", t),
        PropertySpec::at_most("alternative", t),
    ];
    let agg = run_trials(&specs, 0, cfg.seed, cfg.trials, |_, s| {
        let [a, b, c, d, x, y] = operands(s);
        let r = identity_residuals(a, b, c, d, x, y);
        let mult = ((a * b).norm() - a.norm() * b.norm()).abs() / (1.0 + a.norm() * b.norm());
        let left = ((a * a) * b - a * (a * b)).norm();
        let right = ((b * a) * a - b * (a * a)).norm();
        let alt = left.max(right) / (1.0 + a.norm_sq() * b.norm());
        TrialOutcome::new(vec![
            Some(r.left_adjoint / (1.0 + r.adjoint_scale)),
            Some(r.right_adjoint / (1.0 + r.adjoint_scale)),
            Some(r.polarized_norm / (1.0 + r.polarized_scale)),
            Some(mult),
            Some(alt),
        ])
    });
    finish(&specs, &agg, cfg.seed, |_, s| {
        let [a, b, c, d, x, y] = operands(s).map(|o| o.0.to_vec());
        Some(json!({ "a": a, "b": b, "c": c, "d": d, "x": x, "y": y }))
    })
}

fn ineq_key(cfg: &CampaignConfig) -> Result<Vec<PropertyResult>, HarnessError> {
    let (m, n) = (dim(cfg.m1)?, dim(cfg.n)?);
    let tol = Tolerance::default();
    let specs = vec![
        PropertySpec::at_most("key_defect_nonpositive", cfg.tol),
        PropertySpec::at_most("invariant_span_defect_vanishes", cfg.tol),
        PropertySpec::count("vanishing_commutator_implies_invariant_span"),
    ];
    let agg = run_trials(&specs, 0, cfg.seed, cfg.trials, |_, s| {
        outcome(3, (|| {
            let mut rng = seeded(s);
            let a = random_orthogonal_with(m, &mut rng);
            let x = RealMatrix::gaussian(m, n, &mut rng);
            let r = key_defect(&a, &x, tol)?;
            let (a2, x2) = invariant_span_example(m, &mut rng);
            let r2 = key_defect(&a2, &x2, tol)?;
            let broken = |c: f64, inv: bool| c <= COMMUTATOR_ZERO && !inv;
            let hit = broken(r.commutator_norm, r.span_invariant) || broken(r2.commutator_norm, r2.span_invariant);
            Ok(vec![
                Some(r.defect / (1.0 + x.frobenius_norm().powi(4))),
                Some(r2.defect.abs().max(r2.commutator_norm)),
                Some(f64::from(u8::from(hit))),
            ])
        })())
    });
    Ok(finish(&specs, &agg, cfg.seed, |_, _| None))
}

fn ineq_sum(cfg: &CampaignConfig) -> Result<Vec<PropertyResult>, HarnessError> {
    let (m, n) = (dim(cfg.m1)?, dim(cfg.n)?);
    let tol = Tolerance::default();
    let specs = vec![
        PropertySpec::at_least("sum_defect_nonnegative", -cfg.tol),
        PropertySpec::at_most("orthonormal_columns_equality", cfg.tol),
    ];
    let agg = run_trials(&specs, 0, cfg.seed, cfg.trials, |_, s| {
        outcome(2, (|| {
            let mut rng = seeded(s);
            let x = if rng.random_bool(0.5) {
                RealMatrix::gaussian(m, n, &mut rng)
            } else {
                let r = rng.random_range(1..=m.min(n));
                RealMatrix::gaussian(m, r, &mut rng).matmul(&RealMatrix::gaussian(r, n, &mut rng))?
            };
            let lower = sum_defect(&x, tol).value / (1.0 + x.frobenius_norm().powi(4));
            let (q, _) = qr(&RealMatrix::gaussian(m, m.min(n), &mut rng))?;
            let eq = sum_defect(&q.scaled(rng.random_range(0.5..2.0)), tol).value.abs();
            Ok(vec![Some(lower), Some(eq)])
        })())
    });
    Ok(finish(&specs, &agg, cfg.seed, |_, _| None))
}

fn lines(cfg: &CampaignConfig) -> Vec<PropertyResult> {
    let tol = Tolerance::default();
    let specs = vec![
        PropertySpec::at_most("line_gram_orthogonal", cfg.tol),
        PropertySpec::at_most("line_gram_factor", cfg.tol),
        PropertySpec::at_most("line_gram_basis_independent", cfg.tol),
        PropertySpec::at_most("point_on_own_line", cfg.tol),
        PropertySpec::at_most("complement_orthogonal", cfg.tol),
    ];
    let agg = run_trials(&specs, 0, cfg.seed, cfg.trials, |_, s| {
        outcome(5, (|| {
            let mut rng = seeded(s);
            let m = random_octonion(&mut rng).scale(rng.random_range(0.01..3.0));
            let (l1, l2) = (LineParam::ORIGIN, LineParam::Finite(m));
            let g = line_gram(&l1, &l2, &random_line_basis(&l1, &mut rng), &random_line_basis(&l2, &mut rng), tol)?;
            let c_err = (g.c - 1.0 / (1.0 + m.norm_sq()).sqrt()).abs();

            let (p1, p2) = (random_line(&mut rng), random_line(&mut rng));
            let std = line_gram(&p1, &p2, &line_basis(&p1), &line_basis(&p2), tol)?;
            let rnd = line_gram(
                &p1,
                &p2,
                &random_line_basis(&p1, &mut rng),
                &random_line_basis(&p2, &mut rng),
                tol,
            )?;
            let orth = g
                .orthogonality_residual
                .max(std.orthogonality_residual)
                .max(rnd.orthogonality_residual);

            let x = CayleyVector::random(&mut rng);
            let on_line = (project_onto_line(&x, &line_through(&x, tol)?) - x).norm() / x.norm();

            let y = complement_point(&p1, random_octonion(&mut rng));
            let off = project_onto_line(&y, &p1).norm() / y.norm();
            Ok(vec![Some(orth), Some(c_err), Some((std.c - rnd.c).abs()), Some(on_line), Some(off)])
        })())
    });
    finish(&specs, &agg, cfg.seed, |_, _| None)
}

fn curvature(cfg: &CampaignConfig) -> Result<Vec<PropertyResult>, HarnessError> {
    let scale = cfg.curvature_scale()?;
    let l2 = scale.lambda_sq();
    let t = cfg.tol;
    let specs = vec![
        PropertySpec::at_most("diagonal_matches_full", t),
        PropertySpec::at_most("curvature_symmetries", t),
        PropertySpec::at_most("isotropic_second_fundamental_form", t),
        PropertySpec::at_least("sectional_curvature_min", l2 / 4.0 - t * l2),
        PropertySpec::at_most("sectional_curvature_max", l2 + t * l2),
        PropertySpec::at_most("line_plane_curvature", t),
        PropertySpec::at_most("cross_plane_curvature", t),
    ];
    let agg = run_trials(&specs, 0, cfg.seed, cfg.trials, |_, s| {
        let mut rng = seeded(s);
        let [x, y, z, w] = std::array::from_fn(|_| unit_cayley(&mut rng));
        let diag = (curvature_full(&x, &y, &x, &y, scale) - curvature_diag(&x, &y, scale)).abs();
        let r = curvature_full(&x, &y, &z, &w, scale);
        let sym = (r + curvature_full(&y, &x, &z, &w, scale))
            .abs()
            .max((r + curvature_full(&x, &y, &w, &z, scale)).abs())
            .max((r - curvature_full(&z, &w, &x, &y, scale)).abs())
            .max(bianchi_residual(&x, &y, &z, &w, scale).abs());
        let iso = (gauss_2ff_inner(&x, &x, &x, &x, scale) - l2).abs();

        let (a, b) = (CayleyVector::random(&mut rng), CayleyVector::random(&mut rng));
        let k = sectional_curvature(&a, &b, scale);

        let m = random_line(&mut rng);
        let u = random_octonion(&mut rng);
        let v = random_octonion(&mut rng);
        let v = v - u.scale(v.dot(&u) / u.norm_sq());
        let p = m.point(u);
        let line = sectional_curvature(&p, &m.point(v), scale).map(|k| (k - l2).abs() / l2);
        let cross = sectional_curvature(&p, &complement_point(&m, random_octonion(&mut rng)), scale)
            .map(|k| (k - l2 / 4.0).abs() / l2);
        TrialOutcome::new(vec![
            Some(diag / l2),
            Some(sym / l2),
            Some(iso / l2),
            k,
            k,
            Some(line.unwrap_or(f64::NAN)),
            Some(cross.unwrap_or(f64::NAN)),
        ])
    });
    Ok(finish(&specs, &agg, cfg.seed, |_, _| None))
}

struct FrameDims {
    m1: usize,
    m2: usize,
    n: usize,
    d: usize,
}

fn frame_dims(cfg: &CampaignConfig) -> Result<FrameDims, HarnessError> {
    Ok(FrameDims {
        m1: dim(cfg.m1)?,
        m2: dim(cfg.m2)?,
        n: dim(cfg.n)?,
        d: dim(cfg.d)?,
    })
}

fn variation_complex(cfg: &CampaignConfig) -> Result<Vec<PropertyResult>, HarnessError> {
    let FrameDims { m1, m2, n, d } = frame_dims(cfg)?;
    let scale = cfg.curvature_scale()?;
    let l2 = scale.lambda_sq();
    let tol = Tolerance::default();
    let j1 = ComplexStructure::standard(m1)?;
    let j1_neg = j1.negated();
    let m2_eq = (m2 - m2 % 2).max(2);
    let j2 = ComplexStructure::standard(m2_eq)?;
    let specs = vec![
        PropertySpec::at_most("integrand_nonpositive", cfg.tol),
        PropertySpec::at_most("rotation_invariant", cfg.tol),
        PropertySpec::at_most("conjugate_structure_invariant", cfg.tol),
        PropertySpec::at_most("invariant_frame_equality", cfg.tol),
    ];
    let agg = run_trials(&specs, 0, cfg.seed, cfg.trials, |_, s| {
        outcome(4, (|| {
            let mut rng = seeded(s);
            let f = ProductFrame::random(m1, m2, n, d, s)?;
            let v = complex_integrand(&f, &j1, scale, tol)?.value;
            let rotated = f.rotate_tangent(&random_orthogonal_with(n, &mut rng))?;
            let vr = complex_integrand(&rotated, &j1, scale, tol)?.value;
            let vn = complex_integrand(&f, &j1_neg, scale, tol)?.value;
            let pairs = rng.random_range(1..=m1.min(m2_eq) / 2);
            let angles: Vec<f64> = (0..pairs).map(|_| rng.random_range(0.0..FRAC_PI_2)).collect();
            let eq = j_invariant_frame(&j1, &j2, &angles, s)?;
            let ve = complex_integrand(&eq, &j1, scale, tol)?.value;
            Ok(vec![
                Some(v / l2),
                Some((v - vr).abs() / l2),
                Some((v - vn).abs() / l2),
                Some(ve.abs() / l2),
            ])
        })())
    });
    Ok(finish(&specs, &agg, cfg.seed, |_, _| None))
}

fn variation_quat(cfg: &CampaignConfig) -> Result<Vec<PropertyResult>, HarnessError> {
    let FrameDims { m1, m2, n, d } = frame_dims(cfg)?;
    let scale = cfg.curvature_scale()?;
    let l2 = scale.lambda_sq();
    let tol = Tolerance::default();
    let q = QuaternionicStructure::standard(m1)?;
    let specs = vec![
        PropertySpec::at_most("integrand_nonpositive", cfg.tol),
        PropertySpec::at_most("cross_term_nonpositive", cfg.tol),
        PropertySpec::at_most("key_term_nonpositive", cfg.tol),
        PropertySpec::at_most("rotation_invariant", cfg.tol),
        PropertySpec::at_most("quaternionic_line_equality", cfg.tol),
    ];
    let agg = run_trials(&specs, 0, cfg.seed, cfg.trials, |_, s| {
        outcome(5, (|| {
            let mut rng = seeded(s);
            let f = ProductFrame::random(m1, m2, n, d, s)?;
            let rotated = f.rotate_tangent(&random_orthogonal_with(n, &mut rng))?;
            let line = quaternionic_line_frame(&q, m2, s)?;
            let (mut value, mut cross, mut key, mut rot, mut eq) =
                (f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY, 0.0f64, 0.0f64);
            for idx in 1..=3 {
                let r = quaternionic_integrand(&f, &q, idx, scale, tol)?;
                value = value.max(r.value);
                cross = cross.max(r.component("cross_term").unwrap_or(f64::NAN));
                key = key.max(r.component("key_term").unwrap_or(f64::NAN));
                rot = rot.max((r.value - quaternionic_integrand(&rotated, &q, idx, scale, tol)?.value).abs());
                eq = eq.max(quaternionic_integrand(&line, &q, idx, scale, tol)?.value.abs());
            }
            Ok([value, cross, key, rot, eq].map(|v| Some(v / l2)).to_vec())
        })())
    });
    Ok(finish(&specs, &agg, cfg.seed, |_, _| None))
}

fn variation_octo(cfg: &CampaignConfig) -> Result<Vec<PropertyResult>, HarnessError> {
    let FrameDims { m1, m2, n, d } = frame_dims(cfg)?;
    let scale = cfg.curvature_scale()?;
    let l2 = scale.lambda_sq();
    let tol = Tolerance::default();
    let complete = n + d == m1 + m2;
    let mut specs = vec![
        PropertySpec::at_most("integrand_nonpositive", cfg.tol),
        PropertySpec::at_most("rotation_invariant", cfg.tol),
        PropertySpec::at_most("octonionic_line_equality", cfg.tol),
    ];
    if complete {
        specs.push(PropertySpec::at_most("gauss_equation_sum_matches", cfg.tol));
        specs.push(PropertySpec::at_most("normal_form_matches", cfg.tol));
    }
    let len = specs.len();
    let fb = LineParam::ORIGIN;
    let agg = run_trials(&specs, 0, cfg.seed, cfg.trials, |_, s| {
        outcome(len, (|| {
            let mut rng = seeded(s);
            let f = ProductFrame::random(m1, m2, n, d, s)?;
            let v = octonionic_integrand_tangent(&f, fb, scale, tol)?.value;
            let rotated = f.rotate_tangent(&random_orthogonal_with(n, &mut rng))?;
            let vr = octonionic_integrand_tangent(&rotated, fb, scale, tol)?.value;
            let line = octonionic_line_frame(&random_line(&mut rng), m2, s)?;
            let ve = octonionic_integrand_tangent(&line, fb, scale, tol)?.value;
            let mut out = vec![Some(v / l2), Some((v - vr).abs() / l2), Some(ve.abs() / l2)];
            if complete {
                let raw = raw_2ff_sum(&f, scale)?;
                let normal = octonionic_integrand_normal(&f, fb, scale, tol)?.value;
                out.push(Some((v - raw).abs() / l2));
                out.push(Some((v - normal).abs() / l2));
            }
            Ok(out)
        })())
    });
    Ok(finish(&specs, &agg, cfg.seed, |_, _| None))
}

/// Largest relative gap between the analytic gradient and central
/// differences, at random non-negative parameters.
fn gradient_checks(dec: &cayley_core::extremizer::LineDecomposition, rng: &mut SeededRng, fd: bool) -> CoreResult<(f64, Option<f64>)> {
    let lam: Vec<[f64; 8]> = (0..dec.k())
        .map(|_| std::array::from_fn(|_| gaussian(rng).abs()))
        .collect();
    let g = eigen_f_gradient(dec, &lam)?;
    let mut row_sum = 0.0f64;
    for row in &g {
        let scale = 1.0 + row.iter().map(|v| v.abs()).sum::<f64>();
        row_sum = row_sum.max(row.iter().sum::<f64>().abs() / scale);
    }
    if !fd {
        return Ok((row_sum, None));
    }
    let mut fd_err = 0.0f64;
    for r in 0..dec.k() {
        for i in 0..8 {
            let (mut p, mut m) = (lam.clone(), lam.clone());
            p[r][i] += FD_STEP;
            m[r][i] = (m[r][i] - FD_STEP).max(0.0);
            let step = p[r][i] - m[r][i];
            let diff = (eigen_f(dec, &p)? - eigen_f(dec, &m)?) / step;
            fd_err = fd_err.max((diff - g[r][i]).abs() / (1.0 + g[r][i].abs()));
        }
    }
    Ok((row_sum, Some(fd_err)))
}

fn extremize(cfg: &CampaignConfig) -> Result<Vec<PropertyResult>, HarnessError> {
    let n = dim(cfg.n)?;
    let tol = Tolerance::default();
    let bound_tol = Tolerance::new(cfg.tol, 0.0)?;
    let specs = vec![
        PropertySpec::at_most("octo_defect_bound", cfg.tol),
        PropertySpec::at_most("eigen_form_matches_defect", cfg.tol),
        PropertySpec::at_most("gradient_row_sums_vanish", cfg.tol),
        PropertySpec::at_most("gradient_matches_finite_differences", FD_TOL),
        PropertySpec::at_most("maximum_within_bound", cfg.tol),
    ];
    let agg = run_trials(&specs, HISTOGRAM_BINS + 1, cfg.seed, cfg.trials, |t, s| {
        let trial = falsify_trial(n, s);
        let ratio = trial.ratio();
        let rest: CoreResult<Vec<Option<f64>>> = (|| {
            let dec = decompose(&trial.xs, tol)?;
            let f = eigen_f(&dec, &dec.eigen)?;
            let form = if trial.scale > 0.0 { (f - trial.defect).abs() / trial.scale } else { f.abs() };
            let mut rng = seeded(s);
            let (row_sum, fd) = gradient_checks(&dec, &mut rng, t < FD_TRIALS)?;
            let max = if t < MAXIMIZE_TRIALS {
                Some(maximize_f(&dec, 1.0, s, MAXIMIZE_ITERS, bound_tol)?.value)
            } else {
                None
            };
            Ok(vec![Some(form), Some(row_sum), fd, max])
        })();
        let mut metrics = vec![Some(ratio)];
        metrics.extend(rest.unwrap_or_else(|_| vec![Some(f64::NAN); 4]));
        TrialOutcome {
            metrics,
            bin: Some(histogram_bin(ratio)),
        }
    });
    Ok(finish(&specs, &agg, cfg.seed, |i, s| {
        (i == 0).then(|| {
            let trial = falsify_trial(n, s);
            let vectors: Vec<Vec<f64>> = trial.xs.iter().map(|x| x.to_array().to_vec()).collect();
            json!({
                "ratio": trial.ratio(),
                "defect": trial.defect,
                "vectors": vectors,
                "histogram": agg.histogram,
            })
        })
    }))
}

fn certify_odd(cfg: &CampaignConfig) -> Result<Vec<PropertyResult>, HarnessError> {
    let (m1, m2, n) = (dim(cfg.m1)?, dim(cfg.m2)?, dim(cfg.n)?);
    let j1 = ComplexStructure::standard(m1)?;
    let j2 = ComplexStructure::standard(m2)?;
    if n % 2 == 1 {
        let specs = vec![
            PropertySpec::count("certified_odd_frames"),
            PropertySpec::at_least("closest_certificate", cfg.tol),
        ];
        let agg = run_trials(&specs, 0, cfg.seed, cfg.trials, |_, s| {
            outcome(2, odd_dimension_trial(m1, m2, n, s, &j1, &j2).map(|c| {
                vec![Some(f64::from(u8::from(c <= cfg.tol))), Some(c)]
            }))
        });
        let verdict = if agg.hits(0) == 0 { ODD_VERDICT_CONSISTENT } else { ODD_VERDICT_VIOLATED };
        return Ok(finish(&specs, &agg, cfg.seed, |i, s| {
            (i == 1).then(|| {
                let c = odd_dimension_trial(m1, m2, n, s, &j1, &j2).unwrap_or(f64::NAN);
                json!({ "verdict": verdict, "max_commutator": if c.is_finite() { json!(c) } else { Value::Null } })
            })
        }));
    }
    let cert_tol = Tolerance::new(CONSTRUCTED_CERT_TOL, CONSTRUCTED_CERT_TOL)?;
    let specs = vec![
        PropertySpec::count("constructed_frames_inconsistent"),
        PropertySpec::at_most("constructed_frame_certificates", cfg.tol),
    ];
    let agg = run_trials(&specs, 0, cfg.seed, cfg.trials, |_, s| {
        outcome(2, (|| {
            let mut rng = seeded(s);
            let angles: Vec<f64> = (0..n / 2)
                .map(|_| match rng.random_range(0..4) {
                    0 => 0.0,
                    1 => FRAC_PI_2,
                    _ => rng.random_range(0.0..FRAC_PI_2),
                })
                .collect();
            let f = j_invariant_frame(&j1, &j2, &angles, s)?;
            let (x1, x2) = (f.first_factor_matrix(), f.second_factor_matrix());
            let (c1, c2) = cayley_core::variation::commutators(&x1, &x2, &j1, &j2)?;
            let consistent = match odd_dimension_certificate(&x1, &x2, &j1, &j2, cert_tol) {
                Ok(OddDimensionVerdict::Consistent(table)) => table
                    .first
                    .iter()
                    .chain(&table.second)
                    .all(|c| c.multiplicity % 2 == 0),
                _ => false,
            };
            Ok(vec![Some(f64::from(u8::from(!consistent))), Some(c1.max(c2))])
        })())
    });
    Ok(finish(&specs, &agg, cfg.seed, |_, _| None))
}
