//! Recovery of canonical parameters from a black-box map.
//!
//! A map is first sampled on a basis of its domain into an explicit
//! [`LinearRep`]; the representation is then matched against the canonical
//! forms: a rank-one Choi matrix for two-sided and congruence maps, rank-one
//! images of diagonal matrix units for the symmetric congruence, and a
//! permutation of diagonal entries for triangular and diagonal domains.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domains::{basis, hermitian_basis, hermitian_coords, mix, MatrixClass};
use crate::error::{Error, Result};
use crate::linalg::{matrix_residual, principal_root, vec_norm, SquareMatrix, I, ONE, ZERO};
use crate::map::MatrixMap;
use crate::preservers::CanonicalPreserver;

/// Default rank-one threshold on `σ₂/σ₁`.
pub const RANK_ONE_RATIO: f64 = 1e-7;
/// Fresh samples used for the consistency residual of a [`LinearRep`].
pub const CONSISTENCY_SAMPLES: usize = 20;
/// Fresh samples used for the final round-trip residual of [`recover`].
pub const RECOVERY_SAMPLES: usize = 50;

const CONSISTENCY_SEED: u64 = 0x00c0_515e;
const RECOVERY_SEED: u64 = 0x00e3_c0de;

/// Explicit matrix of a linear map on `n x n` matrices.
///
/// `rep` is `n² x n²` with `rep[(a·n + b), (i·n + j)] = [L(E_ij)]_ab`, so that
/// `rep · vec(X) = vec(L(X))` for the row-major vectorization `vec`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearRep {
    pub n: usize,
    pub rep: SquareMatrix,
    pub consistency_residual: f64,
    pub source_class: MatrixClass,
}

impl LinearRep {
    /// Wraps an externally supplied operator matrix.
    pub fn from_operator(rep: SquareMatrix) -> Result<Self> {
        let big = rep.dim();
        let n = (big as f64).sqrt().round() as usize;
        if n * n != big {
            return Err(Error::InvalidInput(format!(
                "linear representation must be n^2 x n^2, got {big} x {big}"
            )));
        }
        Ok(Self {
            n,
            rep,
            consistency_residual: 0.0,
            source_class: MatrixClass::Full,
        })
    }

    fn from_unit_images(n: usize, images: &[SquareMatrix], source_class: MatrixClass) -> Self {
        let rep = SquareMatrix::from_fn(n * n, |r, c| images[c][(r / n, r % n)]);
        Self {
            n,
            rep,
            consistency_residual: 0.0,
            source_class,
        }
    }

    /// `L(E_ij)`.
    pub fn unit_image(&self, i: usize, j: usize) -> SquareMatrix {
        let n = self.n;
        let col = i * n + j;
        SquareMatrix::from_fn(n, |a, b| self.rep[(a * n + b, col)])
    }

    pub fn apply(&self, x: &SquareMatrix) -> Result<SquareMatrix> {
        if x.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.dim(),
            });
        }
        Ok(SquareMatrix::from_vec(self.n, self.rep.matvec(x.as_slice())))
    }

    /// Representation of `X ↦ L(Xᵗ)`.
    pub fn transposed(&self) -> Self {
        let n = self.n;
        let rep = SquareMatrix::from_fn(n * n, |r, c| self.rep[(r, (c % n) * n + c / n)]);
        Self { rep, ..self.clone() }
    }
}

impl MatrixMap for LinearRep {
    fn eval(&self, a: &SquareMatrix) -> Result<SquareMatrix> {
        self.apply(a)
    }
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

/// Extends a map known on Hermitian matrices through a real basis to all of
/// `M_n` by `X = H₁ + iH₂`.
fn unit_images_from_real_basis<M: MatrixMap + ?Sized>(
    map: &M,
    n: usize,
    real_basis: &[SquareMatrix],
) -> Result<Vec<SquareMatrix>> {
    let images: Vec<SquareMatrix> = real_basis.iter().map(|s| eval_checked(map, s)).collect::<Result<_>>()?;
    // columns: coordinates of each basis element in the standard Hermitian basis
    let coords: Vec<Vec<f64>> = real_basis.iter().map(hermitian_coords).collect();
    let m = real_basis.len();
    let to_basis = SquareMatrix::from_fn(m, |r, c| Complex64::new(coords[c][r], 0.0)).inverse()?;
    let extend = |h: &SquareMatrix| -> SquareMatrix {
        let rhs: Vec<Complex64> = hermitian_coords(h)
            .into_iter()
            .map(|x| Complex64::new(x, 0.0))
            .collect();
        let c = to_basis.matvec(&rhs);
        let mut out = SquareMatrix::zeros(n);
        for (ck, img) in c.iter().zip(&images) {
            out += &img.scale_real(ck.re);
        }
        out
    };
    let mut units = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let e = SquareMatrix::unit(n, i, j);
            let et = e.adjoint();
            let h1 = (&e + &et).scale_real(0.5);
            let h2 = (&e - &et).scale(Complex64::new(0.0, -0.5));
            units.push(&extend(&h1) + &extend(&h2).scale(I));
        }
    }
    Ok(units)
}

/// Samples `map` on a basis of `class` and assembles its linear representation.
///
/// Off the class, the representation is extended by zero (triangular and
/// diagonal classes), by symmetrization (symmetric), or by the complex
/// splitting `X = H₁ + iH₂` (Hermitian and positive classes).
pub fn build_linear_rep<M: MatrixMap + ?Sized>(map: &M, class: MatrixClass, n: usize, tol: f64) -> Result<LinearRep> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be positive".into()));
    }
    let images: Vec<SquareMatrix> = match class {
        MatrixClass::Full => basis(class, n)
            .iter()
            .map(|e| eval_checked(map, e))
            .collect::<Result<_>>()?,
        MatrixClass::PositiveDefinite | MatrixClass::PositiveSemidefinite => {
            unit_images_from_real_basis(map, n, &basis(class, n))?
        }
        MatrixClass::Hermitian => unit_images_from_real_basis(map, n, &hermitian_basis(n))?,
        MatrixClass::Symmetric => {
            let mut out = vec![SquareMatrix::zeros(n); n * n];
            for i in 0..n {
                out[i * n + i] = eval_checked(map, &SquareMatrix::unit(n, i, i))?;
                for j in (i + 1)..n {
                    let half = eval_checked(map, &SquareMatrix::sym_unit(n, i, j))?.scale_real(0.5);
                    out[i * n + j] = half.clone();
                    out[j * n + i] = half;
                }
            }
            out
        }
        MatrixClass::UpperTriangular | MatrixClass::Diagonal => {
            let mut out = vec![SquareMatrix::zeros(n); n * n];
            for i in 0..n {
                for j in i..n {
                    if class == MatrixClass::UpperTriangular || i == j {
                        out[i * n + j] = eval_checked(map, &SquareMatrix::unit(n, i, j))?;
                    }
                }
            }
            out
        }
    };
    let mut rep = LinearRep::from_unit_images(n, &images, class);
    let mut worst: f64 = 0.0;
    for k in 0..CONSISTENCY_SAMPLES {
        let a = class.sample(n, mix(CONSISTENCY_SEED, k as u64));
        let r = matrix_residual(&rep.apply(&a)?, &eval_checked(map, &a)?);
        worst = if r.is_nan() { f64::NAN } else { worst.max(r) };
    }
    rep.consistency_residual = worst;
    if !(worst <= tol) {
        return Err(Error::NotLinear { residual: worst });
    }
    Ok(rep)
}

/// Choi matrix `J[(i·n + a), (j·n + b)] = [L(E_ij)]_ab`.
///
/// `J` has rank one exactly when `L(X) = M X N`, in which case
/// `J[(i,a),(j,b)] = M_ai N_jb`.
pub fn choi_matrix(l: &LinearRep) -> SquareMatrix {
    let n = l.n;
    SquareMatrix::from_fn(n * n, |r, c| {
        let (i, a) = (r / n, r % n);
        let (j, b) = (c / n, c % n);
        l.rep[(a * n + b, i * n + j)]
    })
}

/// Multiplies `v` by the unimodular scalar that makes its largest-modulus
/// entry real and positive.
fn canonical_phase(v: &[Complex64]) -> Complex64 {
    let mut best = ZERO;
    for &z in v {
        if z.norm() > best.norm() {
            best = z;
        }
    }
    if best == ZERO {
        ONE
    } else {
        (best / best.norm()).conj()
    }
}

/// Splits a numerically rank-one `J` as `u wᵀ` with `‖u‖ = ‖w‖`, from the
/// leading singular triple. The common phase is fixed so that the
/// largest-modulus entry of `u` is real and positive.
pub fn rank_one_split(j: &SquareMatrix, ratio_tol: f64) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let svd = j.svd();
    let s = &svd.singular_values;
    let s1 = s.first().copied().unwrap_or(0.0);
    if !(s1 > 0.0) {
        return Err(Error::NotRankOne { ratio: f64::NAN });
    }
    let ratio = s.get(1).map_or(0.0, |&s2| s2 / s1);
    if !(ratio <= ratio_tol) {
        return Err(Error::NotRankOne { ratio });
    }
    let root = s1.sqrt();
    let u: Vec<Complex64> = svd.u.column(0).iter().map(|z| z * root).collect();
    let w: Vec<Complex64> = svd.v.column(0).iter().map(|z| z.conj() * root).collect();
    let phase = canonical_phase(&u);
    let u: Vec<Complex64> = u.iter().map(|z| z * phase).collect();
    let w: Vec<Complex64> = w.iter().map(|z| z / phase).collect();
    let residual = (j - &SquareMatrix::outer(&u, &w)).frobenius_norm();
    if !(residual <= ratio_tol * j.frobenius_norm()) {
        return Err(Error::NotRankOne {
            ratio: residual / j.frobenius_norm(),
        });
    }
    Ok((u, w))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plain,
    Transpose,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::Plain => "plain",
            Branch::Transpose => "transpose",
        }
    }
}

/// Outcome of [`recover`].
#[derive(Debug, Clone, PartialEq)]
pub struct Recovery {
    pub preserver: CanonicalPreserver,
    pub branch: Branch,
    /// Max scale-normalized deviation from the black box on fresh samples.
    pub residual: f64,
}

/// Recovers the canonical form of `map` on `class`.
///
/// Supported classes: `Full` (two-sided), `PositiveDefinite` (congruence),
/// `Symmetric` (symmetric congruence), `UpperTriangular` and `Diagonal`
/// (diagonal rule).
pub fn recover<M: MatrixMap + ?Sized>(map: &M, class: MatrixClass, n: usize, tol: f64) -> Result<Recovery> {
    let (preserver, branch) = match class {
        MatrixClass::Full | MatrixClass::PositiveDefinite => recover_two_sided(map, class, n, tol)?,
        MatrixClass::Symmetric => (recover_symmetric(map, n, tol)?, Branch::Plain),
        MatrixClass::UpperTriangular | MatrixClass::Diagonal => {
            (recover_triangular(map, class, n, tol)?, Branch::Plain)
        }
        other => {
            return Err(Error::InvalidInput(format!(
                "recovery is not defined for class '{other}'"
            )))
        }
    };
    let residual = roundtrip_residual(map, &preserver, class, n, RECOVERY_SAMPLES, RECOVERY_SEED)?;
    if !(residual <= tol) {
        return Err(Error::RecoveryResidual { residual });
    }
    Ok(Recovery {
        preserver,
        branch,
        residual,
    })
}

fn unit_determinant<M: MatrixMap + ?Sized>(map: &M, n: usize) -> Result<(SquareMatrix, Complex64)> {
    let unit = eval_checked(map, &SquareMatrix::identity(n))?;
    let det = unit.determinant();
    if !(det.norm() > 1e-12) {
        return Err(Error::SingularUnit);
    }
    Ok((unit, det))
}

fn recover_two_sided<M: MatrixMap + ?Sized>(
    map: &M,
    class: MatrixClass,
    n: usize,
    tol: f64,
) -> Result<(CanonicalPreserver, Branch)> {
    let rep = build_linear_rep(map, class, n, tol)?;
    let plain = choi_matrix(&rep);
    let (branch, choi) = if plain.numeric_rank(RANK_ONE_RATIO) == 1 {
        (Branch::Plain, plain)
    } else {
        let swapped = choi_matrix(&rep.transposed());
        if swapped.numeric_rank(RANK_ONE_RATIO) != 1 {
            return Err(Error::NotCanonical(
                "neither the Choi matrix nor its transposed variant has rank one".into(),
            ));
        }
        (Branch::Transpose, swapped)
    };
    let (u, w) = rank_one_split(&choi, RANK_ONE_RATIO)?;
    let m0 = SquareMatrix::from_fn(n, |a, i| u[i * n + a]);
    let n0 = SquareMatrix::from_fn(n, |j, b| w[j * n + b]);
    let (_, det) = unit_determinant(map, n)?;
    let transpose = branch == Branch::Transpose;

    if class == MatrixClass::Full {
        let alpha = principal_root(det, n as u32);
        let s = principal_root(alpha, 2).inv();
        let p = CanonicalPreserver::mn_two_sided(alpha, m0.scale(s), n0.scale(s), transpose)?;
        return Ok((p, branch));
    }

    // positive definite: α > 0 and the right factor pairs with the left one's adjoint
    if !(det.re > 0.0 && det.im.abs() <= tol * det.norm()) {
        return Err(Error::NotStarForm {
            deviation: det.arg().abs(),
        });
    }
    let alpha = det.re.powf(1.0 / n as f64);
    let s = alpha.sqrt().recip();
    let left = m0.scale_real(s);
    let right = n0.scale_real(s);
    let target = left.adjoint();
    let c = (&target.adjoint() * &right).trace() / target.frobenius_norm().powi(2);
    let deviation = (&right - &target.scale(c)).frobenius_norm() / target.frobenius_norm();
    if !(deviation <= tol && (c - ONE).norm() <= tol) {
        return Err(Error::NotStarForm {
            deviation: deviation.max((c - ONE).norm()),
        });
    }
    let m = right.scale(canonical_phase(right.as_slice()));
    let p = CanonicalPreserver::pn_congruence(alpha, m, transpose)?;
    Ok((p, branch))
}

fn recover_symmetric<M: MatrixMap + ?Sized>(map: &M, n: usize, tol: f64) -> Result<CanonicalPreserver> {
    let rep = build_linear_rep(map, MatrixClass::Symmetric, n, tol)?;
    for i in 0..n {
        let rank = rep.unit_image(i, i).numeric_rank(RANK_ONE_RATIO);
        if rank != 1 {
            return Err(Error::NotCanonical(format!(
                "image of E_{i}{i} has numeric rank {rank}, expected 1"
            )));
        }
    }
    let c1 = rep.unit_image(0, 0);
    let q1 = symmetric_rank_one_factor(&c1)?;
    let (k, beta) = q1
        .iter()
        .copied()
        .enumerate()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
        .expect("n >= 1");
    if beta.norm() < 1e-10 * vec_norm(&q1) {
        return Err(Error::NotCanonical("isotropic anchor column".into()));
    }
    let mut cols = vec![q1.clone()];
    for j in 1..n {
        // L(D_1j) = q₁ q_jᵀ + q_j q₁ᵀ
        let c1j = rep.unit_image(0, j).scale_real(2.0);
        let y = c1j.column(k);
        let gamma = y[k] / (2.0 * beta);
        cols.push(y.iter().zip(&q1).map(|(yi, qi)| (yi - gamma * qi) / beta).collect());
    }
    let q = SquareMatrix::from_fn(n, |i, j| cols[j][i]);
    let (_, det) = unit_determinant(map, n)?;
    let alpha = principal_root(det, n as u32);
    let p = q.scale(principal_root(alpha, 2).inv());
    let p = p.scale_real(canonical_sign(p.as_slice()));
    CanonicalPreserver::sn_congruence(alpha, p)
}

/// `q` with `q qᵀ = C` for a complex symmetric rank-one `C`.
fn symmetric_rank_one_factor(c: &SquareMatrix) -> Result<Vec<Complex64>> {
    let n = c.dim();
    let norms: Vec<f64> = (0..n).map(|j| vec_norm(&c.column(j))).collect();
    let k = (0..n).max_by(|&a, &b| norms[a].total_cmp(&norms[b])).expect("n >= 1");
    let anchor = c[(k, k)];
    if anchor.norm() >= 1e-8 * c.frobenius_norm() {
        let root = anchor.sqrt();
        return Ok(c.column(k).iter().map(|z| z / root).collect());
    }
    Ok(symmetric_factor_svd(c))
}

/// SVD route for [`symmetric_rank_one_factor`]: `C = σ u v*`, and symmetry
/// forces `uᵀ ∝ v*`.
fn symmetric_factor_svd(c: &SquareMatrix) -> Vec<Complex64> {
    let n = c.dim();
    let svd = c.svd();
    let sigma = svd.singular_values[0];
    let u = svd.u.column(0);
    let v = svd.v.column(0);
    let m = (0..n)
        .max_by(|&a, &b| u[a].norm().total_cmp(&u[b].norm()))
        .expect("n >= 1");
    let phase2 = v[m].conj() / u[m];
    let phase = (phase2 / phase2.norm()).sqrt();
    u.iter().map(|z| z * phase * sigma.sqrt()).collect()
}

/// `±1` making the largest-modulus entry have positive real part
/// (positive imaginary part on a tie).
fn canonical_sign(v: &[Complex64]) -> f64 {
    let mut best = ZERO;
    for &z in v {
        if z.norm() > best.norm() {
            best = z;
        }
    }
    if best.re > 0.0 || (best.re == 0.0 && best.im >= 0.0) {
        1.0
    } else {
        -1.0
    }
}

fn recover_triangular<M: MatrixMap + ?Sized>(
    map: &M,
    class: MatrixClass,
    n: usize,
    tol: f64,
) -> Result<CanonicalPreserver> {
    let rep = build_linear_rep(map, class, n, tol)?;
    let (unit, _) = unit_determinant(&rep, n)?;
    let unit_inv = unit.inverse().map_err(|_| Error::SingularUnit)?;
    let mut sigma = vec![usize::MAX; n];
    for k in 0..n {
        let psi = &unit_inv * &rep.unit_image(k, k);
        let d = psi.diagonal();
        let m = (0..n)
            .max_by(|&a, &b| d[a].norm().total_cmp(&d[b].norm()))
            .expect("n >= 1");
        let off = d
            .iter()
            .enumerate()
            .map(|(i, z)| if i == m { (z - ONE).norm() } else { z.norm() })
            .fold(0.0, f64::max);
        if !(off <= tol) {
            return Err(Error::NotCanonical(format!(
                "diagonal of psi(E_{k}{k}) is not a standard basis vector (deviation {off:.3e})"
            )));
        }
        if sigma[m] != usize::MAX {
            return Err(Error::NotCanonical("diagonal images do not form a permutation".into()));
        }
        sigma[m] = k;
    }
    let diag = unit.diagonal();
    let prod: Complex64 = diag.iter().product();
    let alpha = principal_root(prod, n as u32);
    let lambdas = diag.iter().map(|d| d / alpha).collect();
    CanonicalPreserver::tn_diagonal(alpha, sigma, lambdas, 0)
}

/// Max scale-normalized deviation between `map` and `p` on fresh samples of
/// `class`; only diagonals are compared for the triangular form.
pub fn roundtrip_residual<M: MatrixMap + ?Sized>(
    map: &M,
    p: &CanonicalPreserver,
    class: MatrixClass,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let diagonal_only = matches!(p, CanonicalPreserver::TnDiagonal { .. });
    let mut worst: f64 = 0.0;
    for k in 0..samples {
        let a = class.sample(n, mix(seed, k as u64));
        let (mut x, mut y) = (eval_checked(map, &a)?, p.apply(&a)?);
        if diagonal_only {
            x = x.diagonal_part();
            y = y.diagonal_part();
        }
        let r = matrix_residual(&x, &y);
        worst = if r.is_nan() { f64::NAN } else { worst.max(r) };
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preservers::{random_canonical, Pinching, PreserverForm};

    fn close(x: &SquareMatrix, y: &SquareMatrix, tol: f64) -> bool {
        (x - y).frobenius_norm() <= tol * (1.0 + x.frobenius_norm())
    }

    #[test]
    fn identity_and_transpose_representations() {
        for n in 1..=3 {
            let id = build_linear_rep(&|a: &SquareMatrix| a.clone(), MatrixClass::Full, n, 1e-10).unwrap();
            assert!(close(&id.rep, &SquareMatrix::identity(n * n), 1e-15));
            let tr = build_linear_rep(&|a: &SquareMatrix| a.transpose(), MatrixClass::Full, n, 1e-10).unwrap();
            let swap = SquareMatrix::from_fn(n * n, |r, c| if r == (c % n) * n + c / n { ONE } else { ZERO });
            assert!(close(&tr.rep, &swap, 1e-15));
            assert!(close(&id.transposed().rep, &swap, 1e-15));
            // Choi of the identity map is vec(I) vec(I)ᵗ
            let j = choi_matrix(&id);
            let v: Vec<Complex64> = SquareMatrix::identity(n).as_slice().to_vec();
            assert!(close(&j, &SquareMatrix::outer(&v, &v), 1e-15));
        }
    }

    #[test]
    fn choi_of_two_sided_map_is_outer_product_of_entries() {
        let n = 3;
        let m = MatrixClass::Full.sample(n, 11);
        let nn = MatrixClass::Full.sample(n, 12);
        let (mc, nc) = (m.clone(), nn.clone());
        let map = move |a: &SquareMatrix| &(&mc * a) * &nc;
        let rep = build_linear_rep(&map, MatrixClass::Full, n, 1e-9).unwrap();
        let j = choi_matrix(&rep);
        for i in 0..n {
            for a in 0..n {
                for jj in 0..n {
                    for b in 0..n {
                        let want = m[(a, i)] * nn[(jj, b)];
                        assert!((j[(i * n + a, jj * n + b)] - want).norm() < 1e-12 * (1.0 + want.norm()));
                    }
                }
            }
        }
        assert_eq!(j.numeric_rank(RANK_ONE_RATIO), 1);
        let (u, w) = rank_one_split(&j, RANK_ONE_RATIO).unwrap();
        assert!(close(&SquareMatrix::outer(&u, &w), &j, 1e-12));
        assert!((vec_norm(&u) - vec_norm(&w)).abs() < 1e-10 * vec_norm(&u));
    }

    #[test]
    fn rank_one_split_rejects_rank_two() {
        let j = SquareMatrix::identity(4);
        assert!(matches!(
            rank_one_split(&j, RANK_ONE_RATIO),
            Err(Error::NotRankOne { .. })
        ));
    }

    #[test]
    fn representation_matches_map_on_each_class() {
        let cases = [
            (PreserverForm::MnTwoSided, MatrixClass::Full),
            (PreserverForm::PnCongruence, MatrixClass::PositiveDefinite),
            (PreserverForm::SnCongruence, MatrixClass::Symmetric),
            (PreserverForm::TnDiagonal, MatrixClass::UpperTriangular),
        ];
        for (form, class) in cases {
            for n in 1..=4 {
                let p = random_canonical(form, n, 7 + n as u64, false);
                let rep = build_linear_rep(&p, class, n, 1e-8).unwrap();
                assert!(rep.consistency_residual < 1e-10, "{form} n={n}");
                for k in 0..5 {
                    let a = class.sample(n, 900 + k);
                    assert!(close(&rep.apply(&a).unwrap(), &p.apply(&a).unwrap(), 1e-10));
                }
            }
        }
    }

    #[test]
    fn positive_class_representation_commutes_with_adjoint() {
        let n = 3;
        let p = random_canonical(PreserverForm::PnCongruence, n, 5, true);
        let rep = build_linear_rep(&p, MatrixClass::PositiveDefinite, n, 1e-8).unwrap();
        for k in 0..10 {
            let x = MatrixClass::Full.sample(n, 40 + k);
            let lhs = rep.apply(&x.adjoint()).unwrap();
            let rhs = rep.apply(&x).unwrap().adjoint();
            assert!(close(&lhs, &rhs, 1e-10));
        }
    }

    #[test]
    fn recovers_every_form_and_branch() {
        let cases = [
            (PreserverForm::MnTwoSided, MatrixClass::Full),
            (PreserverForm::PnCongruence, MatrixClass::PositiveDefinite),
            (PreserverForm::SnCongruence, MatrixClass::Symmetric),
            (PreserverForm::TnDiagonal, MatrixClass::UpperTriangular),
            (PreserverForm::TnDiagonal, MatrixClass::Diagonal),
        ];
        for (form, class) in cases {
            for n in 1..=4 {
                for transpose in [false, true] {
                    if transpose && !form.has_transpose_branch() {
                        continue;
                    }
                    for seed in 0..3 {
                        let p = random_canonical(form, n, seed, transpose);
                        let r = recover(&p, class, n, 1e-8)
                            .unwrap_or_else(|e| panic!("{form} {class} n={n} t={transpose}: {e}"));
                        assert_eq!(r.preserver.form(), form);
                        assert!(r.residual <= 1e-8);
                        assert!(r.preserver.gauge_residual() <= 1e-8);
                        if n >= 2 {
                            assert_eq!(r.preserver.transpose(), transpose);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn recovered_parameters_match_up_to_gauge() {
        let p = random_canonical(PreserverForm::TnDiagonal, 4, 3, false);
        let r = recover(&p, MatrixClass::UpperTriangular, 4, 1e-8).unwrap();
        match (&p, &r.preserver) {
            (
                CanonicalPreserver::TnDiagonal {
                    sigma, alpha, lambdas, ..
                },
                CanonicalPreserver::TnDiagonal {
                    sigma: s2,
                    alpha: a2,
                    lambdas: l2,
                    ..
                },
            ) => {
                assert_eq!(sigma, s2);
                // α is determined up to an n-th root of unity absorbed by λ
                for (x, y) in lambdas.iter().zip(l2) {
                    assert!((x * alpha - y * a2).norm() < 1e-10);
                }
            }
            _ => unreachable!(),
        }
        let p = random_canonical(PreserverForm::SnCongruence, 3, 8, false);
        let r = recover(&p, MatrixClass::Symmetric, 3, 1e-8).unwrap();
        if let CanonicalPreserver::SnCongruence { p: q, .. } = &r.preserver {
            let s = canonical_sign(q.as_slice());
            assert_eq!(s, 1.0);
        }
    }

    #[test]
    fn structural_failures() {
        let n = 3;
        let bump = |a: &SquareMatrix| {
            a + &SquareMatrix::scalar(a.dim(), Complex64::new(a.frobenius_norm().powi(2) * 1e-3, 0.0))
        };
        assert!(matches!(
            recover(&bump, MatrixClass::PositiveDefinite, n, 1e-8),
            Err(Error::NotLinear { .. })
        ));
        assert!(matches!(
            recover(&Pinching, MatrixClass::Full, n, 1e-8),
            Err(Error::NotCanonical(_))
        ));
        let plus_trace = |a: &SquareMatrix| a + &SquareMatrix::scalar(a.dim(), a.trace());
        assert!(matches!(
            recover(&plus_trace, MatrixClass::Full, n, 1e-8),
            Err(Error::NotCanonical(_))
        ));
        let corner = |a: &SquareMatrix| {
            let e = SquareMatrix::unit(a.dim(), 0, 0);
            &(&e * a) * &e
        };
        assert!(matches!(
            recover(&corner, MatrixClass::Full, n, 1e-8),
            Err(Error::SingularUnit)
        ));
        let m = MatrixClass::Full.sample(n, 3);
        let mm = m.clone();
        let lopsided = move |a: &SquareMatrix| &(&mm * a) * &mm;
        assert!(matches!(
            recover(&lopsided, MatrixClass::PositiveDefinite, n, 1e-8),
            Err(Error::NotStarForm { .. })
        ));
        assert!(matches!(
            recover(&Pinching, MatrixClass::Hermitian, n, 1e-8),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn exactly_one_branch_has_rank_one_choi() {
        for n in 2..=4 {
            for transpose in [false, true] {
                let p = random_canonical(PreserverForm::MnTwoSided, n, 21, transpose);
                let rep = build_linear_rep(&p, MatrixClass::Full, n, 1e-8).unwrap();
                let plain = choi_matrix(&rep).numeric_rank(RANK_ONE_RATIO) == 1;
                let swapped = choi_matrix(&rep.transposed()).numeric_rank(RANK_ONE_RATIO) == 1;
                assert!(plain ^ swapped);
                assert_eq!(swapped, transpose);
            }
        }
    }

    #[test]
    fn symmetric_factors_reproduce_rank_one_matrix() {
        for q in [
            [ONE, I],
            [Complex64::new(1e-12, 0.0), ONE],
            [Complex64::new(0.3, -2.0), Complex64::new(-1.0, 0.5)],
        ] {
            let c = SquareMatrix::outer(&q, &q);
            let f = symmetric_rank_one_factor(&c).unwrap();
            assert!(close(&SquareMatrix::outer(&f, &f), &c, 1e-12));
            let g = symmetric_factor_svd(&c);
            assert!(close(&SquareMatrix::outer(&g, &g), &c, 1e-12));
        }
    }
}
