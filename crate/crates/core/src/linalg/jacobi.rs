//! Cyclic Jacobi rotations for Hermitian eigenproblems and one-sided Jacobi
//! (Hestenes) SVD. Both share the same 2x2 unitary rotation.

use num_complex::Complex64;

use super::{SquareMatrix, ONE, ZERO};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Hermitian tolerance used by [`hermitian_eig`]: `‖A − A*‖_F ≤ 1e-10 (1 + ‖A‖_F)`.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Eigendecomposition `A = V diag(λ) V*` with eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: SquareMatrix,
}

impl HermitianEig {
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(f64::NAN)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(f64::NAN)
    }

    /// `V f(Λ) V*` for a real spectral function.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> Complex64) -> SquareMatrix {
        let n = self.eigenvectors.dim();
        let v = &self.eigenvectors;
        let fl: Vec<Complex64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        SquareMatrix::from_fn(n, |i, j| (0..n).map(|k| v[(i, k)] * fl[k] * v[(j, k)].conj()).sum())
    }
}

/// Singular value decomposition `A = U diag(σ) V*`, σ descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: SquareMatrix,
    pub singular_values: Vec<f64>,
    pub v: SquareMatrix,
}

/// Rotation `G = [[c, s], [−s·e, c·e]]` with `e = e^{−iφ}` that annihilates
/// the off-diagonal entry of the Hermitian 2x2 block `[[app, apq], [conj(apq), aqq]]`
/// under `G* A G`.
#[derive(Clone, Copy)]
struct Rotation {
    c: f64,
    s: f64,
    phase: Complex64,
}

impl Rotation {
    fn new(app: f64, aqq: f64, apq: Complex64) -> Self {
        let r = apq.norm();
        let phase = (apq / r).conj();
        let theta = (aqq - app) / (2.0 * r);
        let t = if theta.abs() > 1e150 {
            0.5 / theta
        } else {
            theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
        };
        let c = 1.0 / (t * t + 1.0).sqrt();
        Self { c, s: t * c, phase }
    }

    fn g(&self) -> [[Complex64; 2]; 2] {
        let c = Complex64::new(self.c, 0.0);
        let s = Complex64::new(self.s, 0.0);
        [[c, s], [-s * self.phase, c * self.phase]]
    }

    /// Right-multiply columns `p, q` of `m` by `G`.
    fn apply_columns(&self, m: &mut SquareMatrix, p: usize, q: usize) {
        let g = self.g();
        for i in 0..m.dim() {
            let xp = m[(i, p)];
            let xq = m[(i, q)];
            m[(i, p)] = xp * g[0][0] + xq * g[1][0];
            m[(i, q)] = xp * g[0][1] + xq * g[1][1];
        }
    }

    /// Left-multiply rows `p, q` of `m` by `G*`.
    fn apply_rows_adjoint(&self, m: &mut SquareMatrix, p: usize, q: usize) {
        let g = self.g();
        for j in 0..m.dim() {
            let xp = m[(p, j)];
            let xq = m[(q, j)];
            m[(p, j)] = g[0][0].conj() * xp + g[1][0].conj() * xq;
            m[(q, j)] = g[0][1].conj() * xp + g[1][1].conj() * xq;
        }
    }
}

fn off_diagonal_norm(a: &SquareMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

pub(super) fn hermitian_eig(a: &SquareMatrix) -> Result<HermitianEig> {
    let n = a.dim();
    let norm = a.frobenius_norm();
    let residual = a.hermitian_deviation();
    if residual > HERMITIAN_TOL * (1.0 + norm) {
        return Err(Error::NotHermitian { residual });
    }
    let mut m = a.hermitian_part();
    let mut v = SquareMatrix::identity(n);
    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(&m);
        if off <= 1e-16 * norm || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq.norm() <= 1e-300 {
                    continue;
                }
                let rot = Rotation::new(m[(p, p)].re, m[(q, q)].re, apq);
                rot.apply_columns(&mut m, p, q);
                rot.apply_rows_adjoint(&mut m, p, q);
                m[(p, q)] = ZERO;
                m[(q, p)] = ZERO;
                m[(p, p)].im = 0.0;
                m[(q, q)].im = 0.0;
                rot.apply_columns(&mut v, p, q);
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| m[(i, i)].re).collect();
    let eigenvectors = SquareMatrix::from_fn(n, |i, k| v[(i, order[k])]);
    Ok(HermitianEig {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigenvalue floor for [`pd_sqrt`].
pub const PD_FLOOR: f64 = 1e-10;

pub(super) fn pd_sqrt(a: &SquareMatrix) -> Result<SquareMatrix> {
    let eig = hermitian_eig(a)?;
    let min = eig.min_eigenvalue();
    if !(min > PD_FLOOR) {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: min });
    }
    Ok(eig.map_spectrum(|l| Complex64::new(l.sqrt(), 0.0)).hermitian_part())
}

pub(super) fn svd(a: &SquareMatrix) -> Svd {
    let n = a.dim();
    let mut u = a.clone();
    let mut v = SquareMatrix::identity(n);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = ZERO;
                for i in 0..n {
                    let up = u[(i, p)];
                    let uq = u[(i, q)];
                    alpha += up.norm_sqr();
                    beta += uq.norm_sqr();
                    gamma += up.conj() * uq;
                }
                if gamma.norm() <= 1e-15 * (alpha * beta).sqrt() || gamma.norm() <= 1e-300 {
                    continue;
                }
                rotated = true;
                let rot = Rotation::new(alpha, beta, gamma);
                rot.apply_columns(&mut u, p, q);
                rot.apply_columns(&mut v, p, q);
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..n)
        .map(|j| (0..n).map(|i| u[(i, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let singular_values: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let u_sorted = SquareMatrix::from_fn(n, |i, k| {
        let s = norms[order[k]];
        if s > 0.0 {
            u[(i, order[k])] / s
        } else if i == k {
            ONE
        } else {
            ZERO
        }
    });
    let v_sorted = SquareMatrix::from_fn(n, |i, k| v[(i, order[k])]);
    Svd {
        u: u_sorted,
        singular_values,
        v: v_sorted,
    }
}
