//! Seeded sweeps over the single-instance checks in [`crate::verifiers`],
//! aggregated into serializable reports.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::domains::{dual_witness, mix, rng_from_seed, MatrixClass};
use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;
use crate::map::MatrixMap;
use crate::verifiers::{
    check_additivity, check_jacobi, check_minkowski, verify_det_identity, verify_trace_identity, DetMode, SampleConfig,
    TraceKind, VerificationReport,
};

fn validate(n: usize, samples: usize) -> Result<()> {
    if n == 0 || samples == 0 {
        return Err(Error::InvalidInput("n and samples must be positive".into()));
    }
    Ok(())
}

/// Slack allowed on the Minkowski direction `lhs ≥ rhs`.
pub const MINKOWSKI_DIRECTION_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinkowskiSweep {
    pub oracle: &'static str,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    /// Pairs with `lhs < rhs − 1e-10`.
    pub direction_violations: usize,
    /// Smallest `(lhs − rhs) / lhs` over random pairs.
    pub min_relative_gap: f64,
    /// Random pairs flagged as equality without being proportional.
    pub false_equalities: usize,
    pub proportional_pairs: usize,
    pub proportional_equalities: usize,
    pub pass: bool,
}

/// Random positive definite pairs plus one constructed pair `B = cA` for
/// every ten random ones.
pub fn minkowski_sweep(n: usize, samples: usize, seed: u64) -> Result<MinkowskiSweep> {
    validate(n, samples)?;
    let pd = MatrixClass::PositiveDefinite;
    let random: Vec<(f64, bool, bool)> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let s = mix(seed, k as u64);
            let c = check_minkowski(&pd.sample(n, mix(s, 1)), &pd.sample(n, mix(s, 2)))?;
            let violation = c.lhs < c.rhs - MINKOWSKI_DIRECTION_SLACK;
            Ok(((c.lhs - c.rhs) / c.lhs, violation, c.equality && !c.proportional))
        })
        .collect::<Result<_>>()?;
    let proportional_pairs = samples.div_ceil(10);
    let hits: Vec<bool> = (0..proportional_pairs)
        .into_par_iter()
        .map(|k| {
            let s = mix(seed ^ 0x9e37_79b9, k as u64);
            let a = pd.sample(n, mix(s, 1));
            let c: f64 = rng_from_seed(mix(s, 2)).random_range(0.1..10.0);
            let check = check_minkowski(&a, &a.scale_real(c))?;
            Ok(check.equality && check.proportional)
        })
        .collect::<Result<_>>()?;
    let direction_violations = random.iter().filter(|r| r.1).count();
    let false_equalities = random.iter().filter(|r| r.2).count();
    let proportional_equalities = hits.iter().filter(|&&h| h).count();
    Ok(MinkowskiSweep {
        oracle: "minkowski",
        n,
        samples,
        seed,
        direction_violations,
        min_relative_gap: random.iter().map(|r| r.0).fold(f64::INFINITY, f64::min),
        false_equalities,
        proportional_pairs,
        proportional_equalities,
        pass: direction_violations == 0 && false_equalities == 0 && proportional_equalities == proportional_pairs,
    })
}

/// Finite-difference step of the Jacobi sweep.
pub const JACOBI_STEP: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JacobiSweep {
    pub oracle: &'static str,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub h: f64,
    pub tol: f64,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub pass: bool,
}

/// Random straight paths `A₀ + tD` in `M_n` with `t₀ ∈ [−1, 1]`.
pub fn jacobi_sweep(n: usize, samples: usize, seed: u64, tol: f64) -> Result<JacobiSweep> {
    validate(n, samples)?;
    let residuals: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let s = mix(seed, k as u64);
            let a0 = MatrixClass::Full.sample(n, mix(s, 1));
            let dir = MatrixClass::Full.sample(n, mix(s, 2));
            let t0: f64 = rng_from_seed(mix(s, 3)).random_range(-1.0..1.0);
            Ok(check_jacobi(&a0, &dir, t0, JACOBI_STEP)?.residual)
        })
        .collect::<Result<_>>()?;
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    Ok(JacobiSweep {
        oracle: "jacobi",
        n,
        samples,
        seed,
        h: JACOBI_STEP,
        tol,
        max_residual,
        mean_residual: residuals.iter().sum::<f64>() / samples as f64,
        pass: max_residual <= tol,
    })
}

/// Acceptance floor for `|tr(AB)| / ‖A‖_F`.
pub const WITNESS_RATIO_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessSweep {
    pub oracle: &'static str,
    pub class: MatrixClass,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub found: usize,
    /// Smallest `|tr(AB)| / ‖A‖_F` among accepted witnesses.
    pub min_ratio: f64,
    pub pass: bool,
}

/// Class sample, or on odd indices its restriction to one symmetric pair
/// of positions `{(p, q), (q, p)}`, which exercises sparse and traceless
/// inputs.
fn witness_input(class: MatrixClass, n: usize, seed: u64, k: usize) -> SquareMatrix {
    let a = class.sample(n, mix(seed, 2 * k as u64));
    if k.is_multiple_of(2) {
        return a;
    }
    let mut rng = rng_from_seed(mix(seed, 2 * k as u64 + 1));
    let p = rng.random_range(0..n);
    let q = if class == MatrixClass::Diagonal {
        p
    } else {
        rng.random_range(0..n)
    };
    SquareMatrix::from_fn(n, |i, j| {
        if (i, j) == (p, q) || (i, j) == (q, p) {
            a[(i, j)]
        } else {
            crate::linalg::ZERO
        }
    })
}

fn accept_witness(a: &SquareMatrix, b: &SquareMatrix, class: MatrixClass) -> Option<f64> {
    let ratio = (a * b).trace().norm() / a.frobenius_norm();
    let s = b.singular_values();
    let invertible = s.last().copied().unwrap_or(0.0) > 1e-12 * s[0];
    (ratio >= WITNESS_RATIO_FLOOR && invertible && class.contains(b, 1e-12)).then_some(ratio)
}

pub fn dual_witness_sweep(class: MatrixClass, n: usize, samples: usize, seed: u64) -> Result<WitnessSweep> {
    validate(n, samples)?;
    let ratios: Vec<Option<f64>> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let a = witness_input(class, n, seed, k);
            match dual_witness(&a, class) {
                Ok(b) => Ok(accept_witness(&a, &b, class)),
                Err(Error::WitnessNotFound) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    let found = ratios.iter().flatten().count();
    Ok(WitnessSweep {
        oracle: "dual-witness",
        class,
        n,
        samples,
        seed,
        found,
        min_ratio: ratios.iter().flatten().copied().fold(f64::INFINITY, f64::min),
        pass: found == samples,
    })
}

/// Tolerance of the trace-square check in the counterexample battery.
pub const COUNTEREXAMPLE_TRACE_TOL: f64 = 1e-9;
/// Margin by which additivity and det-sum must fail.
pub const COUNTEREXAMPLE_FAILURE_MARGIN: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Signature {
    #[serde(rename = "trace-square")]
    pub trace_square: &'static str,
    pub additivity: &'static str,
    #[serde(rename = "det-sum")]
    pub det_sum: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub signature: Signature,
    /// `true` iff the signature is `{pass, fail, fail}` with the failures
    /// exceeding [`COUNTEREXAMPLE_FAILURE_MARGIN`].
    pub expected_signature: bool,
    pub reports: Vec<VerificationReport>,
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

/// Runs trace-square, additivity and det-sum on Hermitian samples. A map of
/// the norm-dependent unitary kind passes the first and fails the others.
pub fn counterexample_battery<M: MatrixMap + ?Sized>(
    map: &M,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<CounterexampleReport> {
    let cfg = |tol| SampleConfig::new(MatrixClass::Hermitian, n, samples, seed, tol);
    let square = verify_trace_identity(map, &cfg(COUNTEREXAMPLE_TRACE_TOL), TraceKind::Square)?;
    let additivity = check_additivity(map, &cfg(1e-8))?;
    let det_sum = verify_det_identity(map, &cfg(1e-8), &DetMode::Sum)?;
    let expected_signature = square.pass
        && additivity.max_residual >= COUNTEREXAMPLE_FAILURE_MARGIN
        && det_sum.max_residual >= COUNTEREXAMPLE_FAILURE_MARGIN;
    Ok(CounterexampleReport {
        n,
        samples,
        seed,
        signature: Signature {
            trace_square: verdict(square.pass),
            additivity: verdict(additivity.pass),
            det_sum: verdict(det_sum.pass),
        },
        expected_signature,
        reports: vec![square, additivity, det_sum],
    })
}
