//! Matrix classes, seeded samplers, canonical bases and dual witnesses.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{unitary_factor, SquareMatrix, I, ONE};

/// The matrix domains a preserver can act on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixClass {
    /// `M_n`.
    Full,
    /// `H_n`, `A = A*`.
    Hermitian,
    #[serde(rename = "psd")]
    PositiveSemidefinite,
    #[serde(rename = "pd")]
    PositiveDefinite,
    /// Complex symmetric `S_n`, `A = Aᵗ`.
    Symmetric,
    UpperTriangular,
    Diagonal,
}

impl MatrixClass {
    pub const ALL: [MatrixClass; 7] = [
        MatrixClass::Full,
        MatrixClass::Hermitian,
        MatrixClass::PositiveSemidefinite,
        MatrixClass::PositiveDefinite,
        MatrixClass::Symmetric,
        MatrixClass::UpperTriangular,
        MatrixClass::Diagonal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MatrixClass::Full => "full",
            MatrixClass::Hermitian => "hermitian",
            MatrixClass::PositiveSemidefinite => "psd",
            MatrixClass::PositiveDefinite => "pd",
            MatrixClass::Symmetric => "symmetric",
            MatrixClass::UpperTriangular => "upper-triangular",
            MatrixClass::Diagonal => "diagonal",
        }
    }

    fn tag(self) -> u64 {
        self as u64 + 1
    }

    /// Structural membership test within `tol`.
    pub fn contains(self, a: &SquareMatrix, tol: f64) -> bool {
        if !a.is_finite() {
            return false;
        }
        let n = a.dim();
        let scale = tol * (1.0 + a.frobenius_norm());
        let hermitian = || a.hermitian_deviation() <= scale;
        let min_eig = || {
            a.hermitian_part()
                .hermitian_eig()
                .map(|e| e.min_eigenvalue())
                .unwrap_or(f64::NAN)
        };
        match self {
            MatrixClass::Full => true,
            MatrixClass::Hermitian => hermitian(),
            MatrixClass::PositiveSemidefinite => hermitian() && min_eig() >= -tol,
            MatrixClass::PositiveDefinite => hermitian() && min_eig() > tol,
            MatrixClass::Symmetric => a.symmetric_deviation() <= scale,
            MatrixClass::UpperTriangular => (0..n).all(|i| (0..i).all(|j| a[(i, j)].norm() <= scale)),
            MatrixClass::Diagonal => (0..n).all(|i| (0..n).all(|j| i == j || a[(i, j)].norm() <= scale)),
        }
    }

    /// Deterministic sample from the class; invertible for every class but PSD.
    pub fn sample(self, n: usize, seed: u64) -> SquareMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, self.tag() << 32 | n as u64));
        match self {
            MatrixClass::Full => loop {
                let g = gaussian_matrix(&mut rng, n);
                if g.determinant().norm() > 1e-6 {
                    break g;
                }
            },
            MatrixClass::Hermitian => gaussian_matrix(&mut rng, n).hermitian_part(),
            MatrixClass::PositiveDefinite => {
                let lambdas: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..=10.0)).collect();
                spectral(&mut rng, &lambdas)
            }
            MatrixClass::PositiveSemidefinite => {
                let mut lambdas: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..=10.0)).collect();
                if n > 1 {
                    lambdas[0] = 0.0;
                }
                spectral(&mut rng, &lambdas)
            }
            MatrixClass::Symmetric => {
                let g = gaussian_matrix(&mut rng, n);
                SquareMatrix::from_fn(n, |i, j| (g[(i, j)] + g[(j, i)]) * 0.5)
            }
            MatrixClass::UpperTriangular => {
                let mut a = SquareMatrix::zeros(n);
                for i in 0..n {
                    a[(i, i)] = random_unit_modulus_scaled(&mut rng);
                    for j in (i + 1)..n {
                        a[(i, j)] = gaussian(&mut rng);
                    }
                }
                a
            }
            MatrixClass::Diagonal => {
                let d: Vec<Complex64> = (0..n).map(|_| random_unit_modulus_scaled(&mut rng)).collect();
                SquareMatrix::diag(&d)
            }
        }
    }

    /// Standard basis of the class (see [`basis`]).
    pub fn basis(self, n: usize) -> Vec<SquareMatrix> {
        basis(self, n)
    }
}

impl fmt::Display for MatrixClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MatrixClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MatrixClass::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown matrix class '{s}'")))
    }
}

/// SplitMix64 finalizer over `seed ^ stream`; derives independent sub-seeds.
pub fn mix(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complex Gaussian with `E|z|² = 1`.
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> SquareMatrix {
    SquareMatrix::from_fn(n, |_, _| gaussian(rng))
}

fn random_unit_modulus_scaled<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let r = rng.random_range(0.1..=10.0);
    let theta = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
    Complex64::from_polar(r, theta)
}

/// Haar-distributed unitary from the QR of a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> SquareMatrix {
    unitary_factor(&gaussian_matrix(rng, n))
}

/// Seeded Haar unitary.
pub fn sample_unitary(n: usize, seed: u64) -> SquareMatrix {
    random_unitary(&mut rng_from_seed(mix(seed, 0x5500)), n)
}

fn spectral<R: Rng + ?Sized>(rng: &mut R, lambdas: &[f64]) -> SquareMatrix {
    let v = random_unitary(rng, lambdas.len());
    let d = SquareMatrix::real_diag(lambdas);
    (&(&v * &d) * &v.adjoint()).hermitian_part()
}

/// Real basis of `H_n`: `{E_ii} ∪ {E_ij + E_ji} ∪ {i(E_ij − E_ji)}`, `i < j`.
pub fn hermitian_basis(n: usize) -> Vec<SquareMatrix> {
    let mut out: Vec<SquareMatrix> = (0..n).map(|i| SquareMatrix::unit(n, i, i)).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            out.push(SquareMatrix::sym_unit(n, i, j));
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let mut s = SquareMatrix::zeros(n);
            s[(i, j)] = I;
            s[(j, i)] = -I;
            out.push(s);
        }
    }
    out
}

/// Real coordinates of a Hermitian matrix in [`hermitian_basis`] order.
pub fn hermitian_coords(a: &SquareMatrix) -> Vec<f64> {
    let n = a.dim();
    let mut out: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            out.push(a[(i, j)].re);
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            out.push(a[(i, j)].im);
        }
    }
    out
}

/// Shift that makes every Hermitian basis element positive definite.
pub const PD_BASIS_SHIFT: f64 = 2.0;

/// Standard basis of a class.
///
/// `Full` and `Symmetric` bases span over ℂ; the Hermitian and positive
/// definite bases span `H_n` over ℝ. The positive definite basis is
/// `{H_k + 2I}` for the Hermitian basis `{H_k}`, whose elements all have
/// spectrum in `[1, 3]`. `PositiveSemidefinite` shares it.
pub fn basis(class: MatrixClass, n: usize) -> Vec<SquareMatrix> {
    match class {
        MatrixClass::Full => (0..n)
            .flat_map(|i| (0..n).map(move |j| SquareMatrix::unit(n, i, j)))
            .collect(),
        MatrixClass::Hermitian => hermitian_basis(n),
        MatrixClass::PositiveDefinite | MatrixClass::PositiveSemidefinite => {
            let shift = SquareMatrix::scalar(n, Complex64::new(PD_BASIS_SHIFT, 0.0));
            hermitian_basis(n).iter().map(|h| h + &shift).collect()
        }
        MatrixClass::Symmetric => {
            let mut out: Vec<SquareMatrix> = (0..n).map(|i| SquareMatrix::unit(n, i, i)).collect();
            for i in 0..n {
                for j in (i + 1)..n {
                    out.push(SquareMatrix::sym_unit(n, i, j));
                }
            }
            out
        }
        MatrixClass::UpperTriangular => (0..n)
            .flat_map(|i| (i..n).map(move |j| SquareMatrix::unit(n, i, j)))
            .collect(),
        MatrixClass::Diagonal => (0..n).map(|i| SquareMatrix::unit(n, i, i)).collect(),
    }
}

/// Scalars tried for `λ` in witness constructions; none lies in the
/// excluded sets `{0, −1}`, `{0, ±1, −2}`, `{0, 1}`.
pub const WITNESS_LAMBDAS: [f64; 3] = [2.0, 3.0, 5.0];

/// Relative separation a witness must achieve: `|tr(AB)| ≥ 1e-6 ‖A‖_F`.
pub const WITNESS_THRESHOLD: f64 = 1e-6;

/// Finds an invertible `B` in `class` with `tr(AB)` bounded away from zero.
///
/// Candidates are `λI + E_kj` (full), `λI + E_jk + E_kj` (symmetric),
/// `λI + E_jj` (diagonal), and `λI + E_jk + E_kj` or `λI + i(E_jk − E_kj)`
/// (Hermitian), anchored at the entries of `A` in decreasing modulus.
pub fn dual_witness(a: &SquareMatrix, class: MatrixClass) -> Result<SquareMatrix> {
    let n = a.dim();
    let norm = a.frobenius_norm();
    if norm <= 1e-12 {
        return Err(Error::ZeroInput);
    }
    let threshold = WITNESS_THRESHOLD * norm;

    let mut anchors: Vec<(usize, usize)> = match class {
        MatrixClass::Full => (0..n).flat_map(|j| (0..n).map(move |k| (j, k))).collect(),
        MatrixClass::Symmetric | MatrixClass::Hermitian => (0..n).flat_map(|j| (j..n).map(move |k| (j, k))).collect(),
        MatrixClass::Diagonal => (0..n).map(|j| (j, j)).collect(),
        other => {
            return Err(Error::InvalidInput(format!(
                "dual witness is not defined for class '{other}'"
            )))
        }
    };
    anchors.sort_by(|&(j1, k1), &(j2, k2)| a[(j2, k2)].norm().total_cmp(&a[(j1, k1)].norm()));

    for &(j, k) in &anchors {
        for &lambda in &WITNESS_LAMBDAS {
            let base = SquareMatrix::scalar(n, Complex64::new(lambda, 0.0));
            let mut candidates = Vec::with_capacity(2);
            match class {
                MatrixClass::Full => {
                    let mut b = base;
                    b[(k, j)] += ONE;
                    candidates.push(b);
                }
                MatrixClass::Symmetric => {
                    candidates.push(&base + &SquareMatrix::sym_unit(n, j, k));
                }
                MatrixClass::Diagonal => {
                    let mut b = base;
                    b[(j, j)] += ONE;
                    candidates.push(b);
                }
                MatrixClass::Hermitian => {
                    candidates.push(&base + &SquareMatrix::sym_unit(n, j, k));
                    if j != k {
                        let mut b = base;
                        b[(j, k)] += I;
                        b[(k, j)] -= I;
                        candidates.push(b);
                    }
                }
                _ => unreachable!(),
            }
            for b in candidates {
                if (a * &b).trace().norm() >= threshold && b.determinant().norm() > 1e-8 {
                    return Ok(b);
                }
            }
        }
    }
    Err(Error::WitnessNotFound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{matrix_residual, ZERO};
    use proptest::prelude::*;

    fn real_inner(x: &SquareMatrix, y: &SquareMatrix) -> f64 {
        (&x.adjoint() * y).trace().re
    }

    fn gram(elems: &[SquareMatrix]) -> SquareMatrix {
        let m = elems.len();
        SquareMatrix::from_fn(m, |k, l| Complex64::new(real_inner(&elems[k], &elems[l]), 0.0))
    }

    #[test]
    fn contains_examples() {
        assert!(MatrixClass::PositiveDefinite.contains(&SquareMatrix::identity(3), 1e-10));
        let s = &SquareMatrix::unit(2, 0, 1) - &SquareMatrix::unit(2, 1, 0);
        assert!(!MatrixClass::Symmetric.contains(&s, 1e-10));
        let mut lower = MatrixClass::Full.sample(4, 3);
        for i in 0..4 {
            for j in (i + 1)..4 {
                lower[(i, j)] = ZERO;
            }
        }
        assert!(!MatrixClass::UpperTriangular.contains(&lower, 1e-10));
        assert!(MatrixClass::UpperTriangular.contains(&lower.transpose(), 1e-10));
        assert!(!MatrixClass::PositiveDefinite.contains(&SquareMatrix::real_diag(&[1.0, 0.0]), 1e-10));
        assert!(MatrixClass::PositiveSemidefinite.contains(&SquareMatrix::real_diag(&[1.0, 0.0]), 1e-10));
    }

    #[test]
    fn class_names_round_trip() {
        for c in MatrixClass::ALL {
            assert_eq!(c.name().parse::<MatrixClass>().unwrap(), c);
            let json = serde_json::to_string(&c).unwrap();
            assert_eq!(json, format!("\"{}\"", c.name()));
        }
        assert!("banana".parse::<MatrixClass>().is_err());
    }

    #[test]
    fn samples_are_deterministic_and_members() {
        for class in MatrixClass::ALL {
            for n in [1, 2, 3, 5] {
                for seed in 0..20 {
                    let a = class.sample(n, seed);
                    assert_eq!(a, class.sample(n, seed));
                    assert!(class.contains(&a, 1e-9), "{class} n={n} seed={seed}");
                }
            }
        }
    }

    #[test]
    fn symmetric_samples_are_exactly_symmetric() {
        let a = MatrixClass::Symmetric.sample(4, 11);
        assert_eq!(a.symmetric_deviation(), 0.0);
    }

    #[test]
    fn pd_samples_have_condition_number_at_most_100() {
        for seed in 0..1000 {
            let eig = MatrixClass::PositiveDefinite.sample(4, seed).hermitian_eig().unwrap();
            let cond = eig.max_eigenvalue() / eig.min_eigenvalue();
            assert!(cond <= 100.0 + 1e-9, "seed {seed}: cond {cond}");
        }
    }

    #[test]
    fn diagonal_basis() {
        let b = basis(MatrixClass::Diagonal, 2);
        assert_eq!(b, vec![SquareMatrix::unit(2, 0, 0), SquareMatrix::unit(2, 1, 1)]);
    }

    #[test]
    fn basis_sizes() {
        let n = 4;
        assert_eq!(basis(MatrixClass::Full, n).len(), 16);
        assert_eq!(basis(MatrixClass::Hermitian, n).len(), 16);
        assert_eq!(basis(MatrixClass::PositiveDefinite, n).len(), 16);
        assert_eq!(basis(MatrixClass::Symmetric, n).len(), 10);
        assert_eq!(basis(MatrixClass::UpperTriangular, n).len(), 10);
        assert_eq!(basis(MatrixClass::Diagonal, n).len(), 4);
    }

    #[test]
    fn pd_basis_is_positive_and_independent() {
        for n in 1..=4 {
            let b = basis(MatrixClass::PositiveDefinite, n);
            for s in &b {
                let eig = s.hermitian_eig().unwrap();
                assert!(eig.min_eigenvalue() >= 1.0 - 1e-12);
            }
            assert!(gram(&b).determinant().norm() > 1e-8, "n={n}");
        }
    }

    #[test]
    fn pd_basis_spans_hermitian_matrices() {
        let n = 3;
        let b = basis(MatrixClass::PositiveDefinite, n);
        let g_inv = gram(&b).inverse().unwrap();
        for seed in 0..100 {
            let x = MatrixClass::Hermitian.sample(n, seed);
            let rhs: Vec<Complex64> = b.iter().map(|s| Complex64::new(real_inner(s, &x), 0.0)).collect();
            let c = g_inv.matvec(&rhs);
            let mut proj = SquareMatrix::zeros(n);
            for (ck, s) in c.iter().zip(&b) {
                proj += &s.scale_real(ck.re);
            }
            assert!(matrix_residual(&proj, &x) <= 1e-9);
        }
    }

    #[test]
    fn hermitian_coords_reconstruct() {
        let x = MatrixClass::Hermitian.sample(4, 9);
        let mut rec = SquareMatrix::zeros(4);
        for (c, h) in hermitian_coords(&x).iter().zip(hermitian_basis(4)) {
            rec += &h.scale_real(*c);
        }
        assert!(matrix_residual(&rec, &x) < 1e-15);
    }

    #[test]
    fn witness_examples() {
        let e12 = SquareMatrix::unit(2, 0, 1);
        let b = dual_witness(&e12, MatrixClass::Full).unwrap();
        let mut expected = SquareMatrix::scalar(2, Complex64::new(2.0, 0.0));
        expected[(1, 0)] = ONE;
        assert_eq!(b, expected);
        assert_eq!((&e12 * &b).trace(), ONE);

        let e11 = SquareMatrix::unit(2, 0, 0);
        let b = dual_witness(&e11, MatrixClass::Diagonal).unwrap();
        assert_eq!(b, SquareMatrix::real_diag(&[3.0, 2.0]));
        assert_eq!((&e11 * &b).trace(), Complex64::new(3.0, 0.0));

        for class in [
            MatrixClass::Full,
            MatrixClass::Symmetric,
            MatrixClass::Diagonal,
            MatrixClass::Hermitian,
        ] {
            let id = SquareMatrix::identity(3);
            let b = dual_witness(&id, class).unwrap();
            assert!((&id * &b).trace().norm() >= 6.0 - 1e-12);
        }
    }

    #[test]
    fn witness_errors() {
        assert!(matches!(
            dual_witness(&SquareMatrix::zeros(2), MatrixClass::Full),
            Err(Error::ZeroInput)
        ));
        assert!(dual_witness(&SquareMatrix::identity(2), MatrixClass::UpperTriangular).is_err());
        // off-diagonal content is invisible to diagonal witnesses
        assert!(matches!(
            dual_witness(&SquareMatrix::unit(2, 0, 1), MatrixClass::Diagonal),
            Err(Error::WitnessNotFound)
        ));
    }

    #[test]
    fn hermitian_witness_sees_imaginary_parts() {
        let mut a = SquareMatrix::zeros(2);
        a[(0, 1)] = I;
        a[(1, 0)] = -I;
        let b = dual_witness(&a, MatrixClass::Hermitian).unwrap();
        assert!(MatrixClass::Hermitian.contains(&b, 1e-12));
        assert!((&a * &b).trace().norm() >= 1.0);
    }

    #[test]
    fn witnesses_for_matrix_units() {
        let n = 3;
        for class in [MatrixClass::Full, MatrixClass::Symmetric, MatrixClass::Hermitian] {
            for x in basis(class, n) {
                let b = dual_witness(&x, class).unwrap();
                assert!(class.contains(&b, 1e-12));
                assert!((&x * &b).trace().norm() >= WITNESS_THRESHOLD * x.frobenius_norm());
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn witness_separates_random_members(seed in any::<u64>(), n in 1usize..6, k in 0usize..4) {
            let class = [MatrixClass::Full, MatrixClass::Symmetric, MatrixClass::Diagonal, MatrixClass::Hermitian][k];
            let a = class.sample(n, seed);
            let b = dual_witness(&a, class).unwrap();
            prop_assert!(class.contains(&b, 1e-12));
            prop_assert!(b.determinant().norm() > 1e-8);
            prop_assert!((&a * &b).trace().norm() >= WITNESS_THRESHOLD * a.frobenius_norm());
        }
    }
}
