//! Canonical determinant/trace preserving maps and the auxiliary maps used to
//! exercise the inequality checks.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::domains::{gaussian, gaussian_matrix, mix, rng_from_seed};
use crate::error::{Error, Result};
use crate::linalg::{principal_root, HermitianEig, SquareMatrix, ONE};
use crate::map::MatrixMap;

/// Tolerance on the determinant gauge of every canonical form.
pub const GAUGE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PreserverForm {
    /// `A ↦ α M* A M` (or `Aᵗ`) on positive definite matrices.
    PnCongruence,
    /// `A ↦ α P A Pᵗ` on complex symmetric matrices.
    SnCongruence,
    /// `A ↦ α M A N` (or `Aᵗ`) on all matrices.
    MnTwoSided,
    /// Diagonal rule `[φ(A)]_ii = α λ_i A_{σ(i)σ(i)}` on upper triangular matrices.
    TnDiagonal,
}

impl PreserverForm {
    pub const ALL: [PreserverForm; 4] = [
        PreserverForm::PnCongruence,
        PreserverForm::SnCongruence,
        PreserverForm::MnTwoSided,
        PreserverForm::TnDiagonal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PreserverForm::PnCongruence => "pn-congruence",
            PreserverForm::SnCongruence => "sn-congruence",
            PreserverForm::MnTwoSided => "mn-two-sided",
            PreserverForm::TnDiagonal => "tn-diagonal",
        }
    }

    /// Whether the form has a distinct transpose branch.
    pub fn has_transpose_branch(self) -> bool {
        matches!(self, PreserverForm::PnCongruence | PreserverForm::MnTwoSided)
    }
}

impl fmt::Display for PreserverForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PreserverForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PreserverForm::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown preserver form '{s}'")))
    }
}

/// A canonical preserver with its parameters.
///
/// Every variant carries the determinant normalization that makes `α` the
/// `n`-th root of `det φ(I)`; the constructors enforce it within [`GAUGE_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub enum CanonicalPreserver {
    PnCongruence {
        alpha: f64,
        m: SquareMatrix,
        transpose: bool,
    },
    SnCongruence {
        alpha: Complex64,
        p: SquareMatrix,
    },
    MnTwoSided {
        alpha: Complex64,
        m: SquareMatrix,
        n: SquareMatrix,
        transpose: bool,
    },
    TnDiagonal {
        alpha: Complex64,
        /// Zero-based: `sigma[i]` is the source index of output diagonal `i`.
        sigma: Vec<usize>,
        lambdas: Vec<Complex64>,
        /// Seed of the strict-upper filler (see [`offdiag_coefficients`]).
        offdiag_seed: u64,
    },
}

fn check_gauge(residual: f64) -> Result<()> {
    if residual <= GAUGE_TOL {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "determinant normalization violated (residual {residual:.3e})"
        )))
    }
}

impl CanonicalPreserver {
    pub fn pn_congruence(alpha: f64, m: SquareMatrix, transpose: bool) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidInput(format!("alpha must be positive, got {alpha}")));
        }
        let p = Self::PnCongruence { alpha, m, transpose };
        check_gauge(p.gauge_residual())?;
        Ok(p)
    }

    pub fn sn_congruence(alpha: Complex64, p: SquareMatrix) -> Result<Self> {
        let out = Self::SnCongruence { alpha, p };
        check_gauge(out.gauge_residual())?;
        Ok(out)
    }

    pub fn mn_two_sided(alpha: Complex64, m: SquareMatrix, n: SquareMatrix, transpose: bool) -> Result<Self> {
        if m.dim() != n.dim() {
            return Err(Error::DimensionMismatch {
                expected: m.dim(),
                found: n.dim(),
            });
        }
        let out = Self::MnTwoSided { alpha, m, n, transpose };
        check_gauge(out.gauge_residual())?;
        Ok(out)
    }

    pub fn tn_diagonal(
        alpha: Complex64,
        sigma: Vec<usize>,
        lambdas: Vec<Complex64>,
        offdiag_seed: u64,
    ) -> Result<Self> {
        if sigma.len() != lambdas.len() {
            return Err(Error::DimensionMismatch {
                expected: lambdas.len(),
                found: sigma.len(),
            });
        }
        let mut seen = vec![false; sigma.len()];
        for &s in &sigma {
            if s >= sigma.len() || std::mem::replace(&mut seen[s], true) {
                return Err(Error::InvalidInput(format!("sigma {sigma:?} is not a permutation")));
            }
        }
        let out = Self::TnDiagonal {
            alpha,
            sigma,
            lambdas,
            offdiag_seed,
        };
        check_gauge(out.gauge_residual())?;
        Ok(out)
    }

    /// `A ↦ U* A U`, a unital congruence when `U` is unitary.
    pub fn unitary_congruence(u: SquareMatrix) -> Result<Self> {
        Self::pn_congruence(1.0, u, false)
    }

    pub fn identity(n: usize) -> Self {
        Self::PnCongruence {
            alpha: 1.0,
            m: SquareMatrix::identity(n),
            transpose: false,
        }
    }

    pub fn form(&self) -> PreserverForm {
        match self {
            Self::PnCongruence { .. } => PreserverForm::PnCongruence,
            Self::SnCongruence { .. } => PreserverForm::SnCongruence,
            Self::MnTwoSided { .. } => PreserverForm::MnTwoSided,
            Self::TnDiagonal { .. } => PreserverForm::TnDiagonal,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::PnCongruence { m, .. } | Self::MnTwoSided { m, .. } => m.dim(),
            Self::SnCongruence { p, .. } => p.dim(),
            Self::TnDiagonal { lambdas, .. } => lambdas.len(),
        }
    }

    pub fn transpose(&self) -> bool {
        match self {
            Self::PnCongruence { transpose, .. } | Self::MnTwoSided { transpose, .. } => *transpose,
            _ => false,
        }
    }

    pub fn alpha(&self) -> Complex64 {
        match self {
            Self::PnCongruence { alpha, .. } => Complex64::new(*alpha, 0.0),
            Self::SnCongruence { alpha, .. } | Self::MnTwoSided { alpha, .. } | Self::TnDiagonal { alpha, .. } => {
                *alpha
            }
        }
    }

    /// Deviation from the form's determinant normalization:
    /// `det(M*M)`, `(det P)²`, `det(MN)` or `∏λ_i` against 1.
    pub fn gauge_residual(&self) -> f64 {
        let value = match self {
            Self::PnCongruence { m, .. } => (&m.adjoint() * m).determinant(),
            Self::SnCongruence { p, .. } => p.determinant().powu(2),
            Self::MnTwoSided { m, n, .. } => (m * n).determinant(),
            Self::TnDiagonal { lambdas, .. } => lambdas.iter().product(),
        };
        (value - ONE).norm()
    }

    pub fn apply(&self, a: &SquareMatrix) -> Result<SquareMatrix> {
        let dim = self.dim();
        if a.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: a.dim(),
            });
        }
        let oriented = |t: bool| if t { a.transpose() } else { a.clone() };
        Ok(match self {
            Self::PnCongruence { alpha, m, transpose } => {
                (&(&m.adjoint() * &oriented(*transpose)) * m).scale_real(*alpha)
            }
            Self::SnCongruence { alpha, p } => (&(p * a) * &p.transpose()).scale(*alpha),
            Self::MnTwoSided { alpha, m, n, transpose } => (&(m * &oriented(*transpose)) * n).scale(*alpha),
            Self::TnDiagonal {
                alpha,
                sigma,
                lambdas,
                offdiag_seed,
            } => {
                let coeffs = offdiag_coefficients(dim, *offdiag_seed);
                let mut out = SquareMatrix::zeros(dim);
                for i in 0..dim {
                    out[(i, i)] = alpha * lambdas[i] * a[(sigma[i], sigma[i])];
                }
                let mut k = 0;
                for i in 0..dim {
                    for j in (i + 1)..dim {
                        out[(i, j)] = coeffs[k] * a[(i, j)];
                        k += 1;
                    }
                }
                out
            }
        })
    }
}

impl MatrixMap for CanonicalPreserver {
    fn eval(&self, a: &SquareMatrix) -> Result<SquareMatrix> {
        self.apply(a)
    }
}

/// Per-entry multipliers for the strict upper part of a `TnDiagonal` output,
/// in row-major order over `i < j`.
pub fn offdiag_coefficients(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = rng_from_seed(mix(seed, 0x0ff_d1a6));
    (0..n * n.saturating_sub(1) / 2).map(|_| gaussian(&mut rng)).collect()
}

fn random_alpha<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let r = rng.random_range(0.5..=2.0);
    let theta = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
    Complex64::from_polar(r, theta)
}

/// Seeded canonical preserver honoring the form's determinant normalization.
///
/// `transpose` is ignored by the symmetric and triangular forms.
pub fn random_canonical(form: PreserverForm, n: usize, seed: u64, transpose: bool) -> CanonicalPreserver {
    let mut rng = rng_from_seed(mix(seed, 0xCA_0000 + form as u64));
    let nn = n as u32;
    match form {
        PreserverForm::PnCongruence => {
            let m = gaussian_matrix(&mut rng, n);
            let d = (&m.adjoint() * &m).determinant().re;
            let m = m.scale_real(d.powf(-1.0 / (2.0 * n as f64)));
            let alpha = rng.random_range(0.5..=2.0);
            CanonicalPreserver::PnCongruence { alpha, m, transpose }
        }
        PreserverForm::SnCongruence => {
            let m = gaussian_matrix(&mut rng, n);
            let s = principal_root(m.determinant().powu(2).inv(), 2 * nn);
            CanonicalPreserver::SnCongruence {
                alpha: random_alpha(&mut rng),
                p: m.scale(s),
            }
        }
        PreserverForm::MnTwoSided => {
            let m = gaussian_matrix(&mut rng, n);
            let nf = gaussian_matrix(&mut rng, n);
            let s = principal_root((&m * &nf).determinant().inv(), 2 * nn);
            CanonicalPreserver::MnTwoSided {
                alpha: random_alpha(&mut rng),
                m: m.scale(s),
                n: nf.scale(s),
                transpose,
            }
        }
        PreserverForm::TnDiagonal => {
            let mut lambdas: Vec<Complex64> = (0..n.saturating_sub(1))
                .map(|_| Complex64::new(rng.random_range(0.5..=2.0), 0.0))
                .collect();
            let prod: Complex64 = lambdas.iter().product();
            lambdas.push(prod.inv());
            let mut sigma: Vec<usize> = (0..n).collect();
            sigma.shuffle(&mut rng);
            CanonicalPreserver::TnDiagonal {
                alpha: random_alpha(&mut rng),
                sigma,
                lambdas,
                offdiag_seed: rng.random(),
            }
        }
    }
}

/// The norm-dependent unitary similarity `A ↦ U(s) A U(s)*` with
/// `s = ‖A‖_F` and `U(s) = exp(i s H₀)`.
///
/// It preserves every spectrum and `tr(A²)` but is not additive.
#[derive(Debug, Clone)]
pub struct NormTwistMap {
    generator: SquareMatrix,
    spectrum: HermitianEig,
}

impl NormTwistMap {
    /// Default generator `H₀ = E₁₂ + E₂₁` padded with zeros (zero when `n = 1`).
    pub fn new(n: usize) -> Self {
        let generator = if n >= 2 {
            SquareMatrix::sym_unit(n, 0, 1)
        } else {
            SquareMatrix::zeros(n)
        };
        Self::with_generator(generator).expect("default generator is Hermitian")
    }

    pub fn with_generator(generator: SquareMatrix) -> Result<Self> {
        let spectrum = generator.hermitian_eig()?;
        Ok(Self { generator, spectrum })
    }

    pub fn generator(&self) -> &SquareMatrix {
        &self.generator
    }

    pub fn dim(&self) -> usize {
        self.generator.dim()
    }

    pub fn unitary(&self, s: f64) -> SquareMatrix {
        self.spectrum.map_spectrum(|l| Complex64::from_polar(1.0, s * l))
    }

    pub fn apply(&self, a: &SquareMatrix) -> Result<SquareMatrix> {
        if a.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: a.dim(),
            });
        }
        let u = self.unitary(a.frobenius_norm());
        Ok(&(&u * a) * &u.adjoint())
    }
}

impl MatrixMap for NormTwistMap {
    fn eval(&self, a: &SquareMatrix) -> Result<SquareMatrix> {
        self.apply(a)
    }
}

/// `A ↦ Diag(A)`: unital, positive and linear, but not a congruence.
#[derive(Debug, Clone, Copy, Default)]
pub struct Pinching;

impl Pinching {
    pub fn apply(&self, a: &SquareMatrix) -> SquareMatrix {
        a.diagonal_part()
    }
}

impl MatrixMap for Pinching {
    fn eval(&self, a: &SquareMatrix) -> Result<SquareMatrix> {
        Ok(self.apply(a))
    }
}
