//! Seeded sampling checks of the determinant and trace identities, the
//! Minkowski, Jacobi and Kadison/Choi oracles, and linearity.
//!
//! Every check pre-derives one seed per sample from the base seed, evaluates
//! samples in parallel, and aggregates in sample order, so reports are
//! identical under any thread schedule.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::domains::{mix, rng_from_seed, MatrixClass};
use crate::error::{Error, Result};
use crate::linalg::{matrix_residual, principal_root, scalar_residual, SquareMatrix, I, ONE};
use crate::map::MatrixMap;

/// At most this many failing samples are listed in a report.
pub const MAX_LISTED_FAILURES: usize = 10;

/// Sampling parameters shared by the identity checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleConfig {
    pub class: MatrixClass,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
}

impl SampleConfig {
    pub fn new(class: MatrixClass, n: usize, samples: usize, seed: u64, tol: f64) -> Self {
        Self {
            class,
            n,
            samples,
            seed,
            tol,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 || self.samples == 0 || !(self.tol > 0.0) {
            return Err(Error::InvalidInput("n and samples must be positive and tol > 0".into()));
        }
        Ok(())
    }

    /// Seed of sample `k`.
    pub fn sample_seed(&self, k: usize) -> u64 {
        mix(self.seed, k as u64)
    }

    fn draw(&self, sample_seed: u64, slot: u64) -> SquareMatrix {
        self.class.sample(self.n, mix(sample_seed, slot))
    }

    fn draw_invertible(&self, sample_seed: u64, slot: u64) -> Result<SquareMatrix> {
        for attempt in 0..100u64 {
            let b = self.draw(sample_seed, slot + 1000 * attempt);
            if b.determinant().norm() > 1e-6 {
                return Ok(b);
            }
        }
        Err(Error::SingularSample)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub seed: u64,
    pub residual: f64,
}

/// Aggregated residuals of one identity over a batch of samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub identity: String,
    #[serde(serialize_with = "class_name")]
    pub class: MatrixClass,
    pub n: usize,
    pub samples: usize,
    pub tol: f64,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub pass: bool,
    pub failures: Vec<Failure>,
}

fn class_name<S: serde::Serializer>(c: &MatrixClass, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(c.name())
}

impl VerificationReport {
    /// `residuals` holds `(sample seed, residual)` in sample order.
    pub fn from_residuals(identity: impl Into<String>, cfg: &SampleConfig, residuals: &[(u64, f64)]) -> Self {
        let mut max_residual: f64 = 0.0;
        let mut sum = 0.0;
        for &(_, r) in residuals {
            max_residual = if r.is_nan() || max_residual.is_nan() {
                f64::NAN
            } else {
                max_residual.max(r)
            };
            sum += r;
        }
        let failures: Vec<Failure> = residuals
            .iter()
            .filter(|(_, r)| !(*r <= cfg.tol))
            .take(MAX_LISTED_FAILURES)
            .map(|&(seed, residual)| Failure { seed, residual })
            .collect();
        Self {
            identity: identity.into(),
            class: cfg.class,
            n: cfg.n,
            samples: residuals.len(),
            tol: cfg.tol,
            max_residual,
            mean_residual: sum / residuals.len().max(1) as f64,
            pass: max_residual <= cfg.tol,
            failures,
        }
    }
}

fn run_samples<F>(cfg: &SampleConfig, f: F) -> Result<Vec<(u64, f64)>>
where
    F: Fn(u64) -> Result<f64> + Sync,
{
    cfg.validate()?;
    (0..cfg.samples)
        .into_par_iter()
        .map(|k| {
            let s = cfg.sample_seed(k);
            f(s).map(|r| (s, r))
        })
        .collect()
}

fn eval_checked<M: MatrixMap + ?Sized>(map: &M, a: &SquareMatrix) -> Result<SquareMatrix> {
    let out = map.eval(a)?;
    if out.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: out.dim(),
        });
    }
    Ok(out)
}

/// Weight pairs `(s, t)` for `det(s φ(A) + t φ(B)) = αⁿ det(sA + tB)`.
#[derive(Debug, Clone, PartialEq)]
pub enum DetMode {
    /// `(1, 1)`.
    Sum,
    /// `(t, 1 − t)` for each `t`.
    Convex(Vec<f64>),
    /// `(1, λ)` for each `λ`.
    Pencil(Vec<Complex64>),
}

/// `t ∈ {0, 0.25, 0.5, 0.75, 1}`.
pub fn default_convex_weights() -> Vec<f64> {
    vec![0.0, 0.25, 0.5, 0.75, 1.0]
}

/// Pencil grid `{1, −1, i, 2+i, 3, 4, …}` of size `max(4, n + 1)`; both sides
/// are degree-`n` polynomials in `λ`, so `n + 1` distinct nodes determine them.
pub fn pencil_grid(n: usize) -> Vec<Complex64> {
    let mut grid = vec![ONE, -ONE, I, Complex64::new(2.0, 1.0)];
    let mut next = 3.0;
    while grid.len() < (n + 1).max(4) {
        grid.push(Complex64::new(next, 0.0));
        next += 1.0;
    }
    grid
}

impl DetMode {
    pub fn tag(&self) -> &'static str {
        match self {
            DetMode::Sum => "det-sum",
            DetMode::Convex(_) => "det-convex",
            DetMode::Pencil(_) => "det-pencil",
        }
    }

    pub fn weights(&self) -> Vec<(Complex64, Complex64)> {
        match self {
            DetMode::Sum => vec![(ONE, ONE)],
            DetMode::Convex(ts) => ts
                .iter()
                .map(|&t| (Complex64::new(t, 0.0), Complex64::new(1.0 - t, 0.0)))
                .collect(),
            DetMode::Pencil(ls) => ls.iter().map(|&l| (ONE, l)).collect(),
        }
    }
}

/// Triangular classes compare diagonal data only.
fn diagonal_only(class: MatrixClass) -> bool {
    matches!(class, MatrixClass::UpperTriangular | MatrixClass::Diagonal)
}

fn class_det(class: MatrixClass, a: &SquareMatrix) -> Complex64 {
    if diagonal_only(class) {
        a.diagonal().into_iter().product()
    } else {
        a.determinant()
    }
}

/// Checks `det(s φ(A) + t φ(B)) = αⁿ det(sA + tB)` with `αⁿ = det φ(I)`.
pub fn verify_det_identity<M: MatrixMap + ?Sized>(
    map: &M,
    cfg: &SampleConfig,
    mode: &DetMode,
) -> Result<VerificationReport> {
    cfg.validate()?;
    let weights = mode.weights();
    if weights.is_empty() {
        return Err(Error::InvalidInput("weights must be nonempty".into()));
    }
    let alpha_n = class_det(cfg.class, &eval_checked(map, &SquareMatrix::identity(cfg.n))?);
    if alpha_n.norm() <= 1e-12 {
        return Err(Error::DegenerateUnit);
    }
    let residuals = run_samples(cfg, |s| {
        let a = cfg.draw(s, 1);
        let b = cfg.draw(s, 2);
        let fa = eval_checked(map, &a)?;
        let fb = eval_checked(map, &b)?;
        let mut worst: f64 = 0.0;
        for &(ws, wt) in &weights {
            let lhs = class_det(cfg.class, &(&fa.scale(ws) + &fb.scale(wt)));
            let rhs = alpha_n * class_det(cfg.class, &(&a.scale(ws) + &b.scale(wt)));
            worst = nan_max(worst, scalar_residual(lhs, rhs));
        }
        Ok(worst)
    })?;
    Ok(VerificationReport::from_residuals(mode.tag(), cfg, &residuals))
}

fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceKind {
    /// `tr(φ(A) φ(B)⁻¹) = tr(A B⁻¹)`.
    Inverse,
    /// `tr(φ(A) φ(B)) = tr(AB)`.
    Product,
    /// `tr(φ(A) φ(B)ᵏ) = tr(ABᵏ)`.
    Power(u32),
    /// `tr(φ(A)²) = tr(A²)`.
    Square,
}

impl TraceKind {
    pub fn tag(&self) -> String {
        match self {
            TraceKind::Inverse => "trace-inverse".into(),
            TraceKind::Product => "trace-product".into(),
            TraceKind::Power(k) => format!("trace-power-{k}"),
            TraceKind::Square => "trace-square".into(),
        }
    }
}

pub fn verify_trace_identity<M: MatrixMap + ?Sized>(
    map: &M,
    cfg: &SampleConfig,
    kind: TraceKind,
) -> Result<VerificationReport> {
    let residuals = run_samples(cfg, |s| {
        let a = cfg.draw(s, 1);
        let fa = eval_checked(map, &a)?;
        let (lhs, rhs) = match kind {
            TraceKind::Square => ((&fa * &fa).trace(), (&a * &a).trace()),
            TraceKind::Product => {
                let b = cfg.draw(s, 2);
                let fb = eval_checked(map, &b)?;
                ((&fa * &fb).trace(), (&a * &b).trace())
            }
            TraceKind::Power(k) => {
                let b = cfg.draw(s, 2);
                let fb = eval_checked(map, &b)?;
                ((&fa * &fb.powi(k)).trace(), (&a * &b.powi(k)).trace())
            }
            TraceKind::Inverse => {
                let b = cfg.draw_invertible(s, 2)?;
                let fb_inv = eval_checked(map, &b)?.inverse()?;
                let b_inv = b.inverse()?;
                ((&fa * &fb_inv).trace(), (&a * &b_inv).trace())
            }
        };
        Ok(scalar_residual(lhs, rhs))
    })?;
    Ok(VerificationReport::from_residuals(kind.tag(), cfg, &residuals))
}

/// Scales used by the homogeneity check.
pub const HOMOGENEITY_SCALES: [f64; 3] = [0.5, 2.0, 7.25];

fn homogeneity_residual<M: MatrixMap + ?Sized>(map: &M, a: &SquareMatrix) -> Result<f64> {
    let fa = eval_checked(map, a)?;
    let mut worst: f64 = 0.0;
    for &l in &HOMOGENEITY_SCALES {
        let lhs = eval_checked(map, &a.scale_real(l))?;
        worst = nan_max(worst, matrix_residual(&lhs, &fa.scale_real(l)));
    }
    Ok(worst)
}

fn additivity_residual<M: MatrixMap + ?Sized>(map: &M, a: &SquareMatrix, b: &SquareMatrix) -> Result<f64> {
    let lhs = eval_checked(map, &(a + b))?;
    let rhs = &eval_checked(map, a)? + &eval_checked(map, b)?;
    Ok(matrix_residual(&lhs, &rhs))
}

/// `‖φ(λA) − λφ(A)‖` over [`HOMOGENEITY_SCALES`].
pub fn check_homogeneity<M: MatrixMap + ?Sized>(map: &M, cfg: &SampleConfig) -> Result<VerificationReport> {
    let residuals = run_samples(cfg, |s| homogeneity_residual(map, &cfg.draw(s, 1)))?;
    Ok(VerificationReport::from_residuals("homogeneity", cfg, &residuals))
}

/// `‖φ(A + B) − φ(A) − φ(B)‖`.
pub fn check_additivity<M: MatrixMap + ?Sized>(map: &M, cfg: &SampleConfig) -> Result<VerificationReport> {
    let residuals = run_samples(cfg, |s| additivity_residual(map, &cfg.draw(s, 1), &cfg.draw(s, 2)))?;
    Ok(VerificationReport::from_residuals("additivity", cfg, &residuals))
}

/// Both residuals above; a sample's residual is the larger of the two.
pub fn check_homogeneity_additivity<M: MatrixMap + ?Sized>(map: &M, cfg: &SampleConfig) -> Result<VerificationReport> {
    let residuals = run_samples(cfg, |s| {
        let a = cfg.draw(s, 1);
        let b = cfg.draw(s, 2);
        Ok(nan_max(
            homogeneity_residual(map, &a)?,
            additivity_residual(map, &a, &b)?,
        ))
    })?;
    Ok(VerificationReport::from_residuals(
        "homogeneity-additivity",
        cfg,
        &residuals,
    ))
}

/// Minkowski determinant inequality at one pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinkowskiCheck {
    /// `det(A + B)^{1/n}`.
    pub lhs: f64,
    /// `det(A)^{1/n} + det(B)^{1/n}`.
    pub rhs: f64,
    pub proportional: bool,
    pub equality: bool,
}

pub const MINKOWSKI_EQUALITY_TOL: f64 = 1e-8;

fn pd_det(a: &SquareMatrix) -> Result<f64> {
    let eig = a.hermitian_eig()?;
    let min = eig.min_eigenvalue();
    if !(min > 0.0) {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: min });
    }
    Ok(eig.eigenvalues.iter().product())
}

pub fn check_minkowski(a: &SquareMatrix, b: &SquareMatrix) -> Result<MinkowskiCheck> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let root = 1.0 / a.dim() as f64;
    let da = pd_det(a)?;
    let db = pd_det(b)?;
    let dab = pd_det(&(a + b).hermitian_part())?;
    let lhs = dab.powf(root);
    let rhs = da.powf(root) + db.powf(root);
    let lambda = (&a.adjoint() * b).trace() / (&a.adjoint() * a).trace();
    let proportional = (b - &a.scale(lambda)).frobenius_norm() <= MINKOWSKI_EQUALITY_TOL * b.frobenius_norm();
    Ok(MinkowskiCheck {
        lhs,
        rhs,
        proportional,
        equality: lhs - rhs <= MINKOWSKI_EQUALITY_TOL * lhs,
    })
}

/// Jacobi's formula against a central difference along `A(t) = A₀ + t·A'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiCheck {
    /// `tr(Adj(A(t₀)) · A')`.
    pub formula: Complex64,
    pub finite_diff: Complex64,
    pub residual: f64,
}

pub fn check_jacobi(a0: &SquareMatrix, direction: &SquareMatrix, t0: f64, h: f64) -> Result<JacobiCheck> {
    if !(h > 0.0 && h <= 0.1) {
        return Err(Error::InvalidInput(format!("step h must lie in (0, 0.1], got {h}")));
    }
    if a0.dim() != direction.dim() {
        return Err(Error::DimensionMismatch {
            expected: a0.dim(),
            found: direction.dim(),
        });
    }
    let at = |t: f64| a0 + &direction.scale_real(t);
    let formula = (&at(t0).adjugate() * direction).trace();
    let finite_diff = (at(t0 + h).determinant() - at(t0 - h).determinant()) / (2.0 * h);
    Ok(JacobiCheck {
        formula,
        finite_diff,
        residual: scalar_residual(formula, finite_diff),
    })
}

/// Minimum eigenvalues of the Kadison gap `φ(A²) − φ(A)²` and the Choi gap
/// `φ(A⁻¹) − φ(A)⁻¹` over positive definite samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KadisonChoiReport {
    pub n: usize,
    pub samples: usize,
    pub tol: f64,
    pub min_eig_kadison: f64,
    pub min_eig_choi: f64,
    pub pass: bool,
}

pub const UNITAL_TOL: f64 = 1e-9;
pub const LINEARITY_SPOT_TOL: f64 = 1e-8;

pub fn check_kadison_choi<M: MatrixMap + ?Sized>(
    map: &M,
    n: usize,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<KadisonChoiReport> {
    let cfg = SampleConfig::new(MatrixClass::PositiveDefinite, n, samples, seed, tol);
    cfg.validate()?;
    let unit = eval_checked(map, &SquareMatrix::identity(n))?;
    let residual = (&unit - &SquareMatrix::identity(n)).frobenius_norm();
    if !(residual <= UNITAL_TOL) {
        return Err(Error::NotUnital { residual });
    }
    let mut rng = rng_from_seed(mix(seed, 0x11_4ea2));
    for k in 0..5u64 {
        let x = MatrixClass::Hermitian.sample(n, mix(seed, 0x11_0000 + 2 * k));
        let y = MatrixClass::Hermitian.sample(n, mix(seed, 0x11_0001 + 2 * k));
        let a: f64 = rng.random_range(-2.0..2.0);
        let b: f64 = rng.random_range(-2.0..2.0);
        let lhs = eval_checked(map, &(&x.scale_real(a) + &y.scale_real(b)))?;
        let rhs = &eval_checked(map, &x)?.scale_real(a) + &eval_checked(map, &y)?.scale_real(b);
        let residual = matrix_residual(&lhs, &rhs);
        if !(residual <= LINEARITY_SPOT_TOL) {
            return Err(Error::NotLinear { residual });
        }
    }
    let gaps: Vec<(f64, f64)> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let a = cfg.draw(cfg.sample_seed(k), 1);
            let fa = eval_checked(map, &a)?;
            let kadison = &eval_checked(map, &(&a * &a))? - &(&fa * &fa);
            let choi = &eval_checked(map, &a.inverse()?)? - &fa.inverse()?;
            let min_eig =
                |m: &SquareMatrix| -> Result<f64> { Ok(m.hermitian_part().hermitian_eig()?.min_eigenvalue()) };
            Ok((min_eig(&kadison)?, min_eig(&choi)?))
        })
        .collect::<Result<_>>()?;
    let min_eig_kadison = gaps.iter().map(|g| g.0).fold(f64::INFINITY, f64::min);
    let min_eig_choi = gaps.iter().map(|g| g.1).fold(f64::INFINITY, f64::min);
    Ok(KadisonChoiReport {
        n,
        samples,
        tol,
        min_eig_kadison,
        min_eig_choi,
        pass: min_eig_kadison >= -tol && min_eig_choi >= -tol,
    })
}

/// `αⁿ = det φ(I)` and its principal root `α`.
pub fn unit_scale<M: MatrixMap + ?Sized>(map: &M, n: usize) -> Result<Complex64> {
    let d = eval_checked(map, &SquareMatrix::identity(n))?.determinant();
    if d.norm() <= 1e-12 {
        return Err(Error::DegenerateUnit);
    }
    Ok(principal_root(d, n as u32))
}
