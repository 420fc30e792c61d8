//! Dense complex square matrices.
//!
//! Everything here is sized for desk-scale problems (n up to a few dozen):
//! determinants go through partial-pivot LU, Hermitian spectra and singular
//! values through cyclic Jacobi rotations.

mod jacobi;
mod lu;

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use jacobi::{HermitianEig, Svd};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Dense `n x n` complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, ONE)
    }

    pub fn scalar(n: usize, c: Complex64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = c;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    /// Builds a matrix from rows, rejecting ragged or non-finite input.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidInput("matrix must have at least one row".into()));
        }
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidInput(format!(
                    "row {i} has length {}, expected {n}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        let m = Self { n, data };
        if !m.is_finite() {
            return Err(Error::InvalidInput("matrix has non-finite entries".into()));
        }
        Ok(m)
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn diag(values: &[Complex64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn real_diag(values: &[f64]) -> Self {
        let v: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::diag(&v)
    }

    /// Matrix unit `E_ij`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n);
        m[(i, j)] = ONE;
        m
    }

    /// `E_ij + E_ji`.
    pub fn sym_unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n);
        m[(i, j)] += ONE;
        m[(j, i)] += ONE;
        m
    }

    /// Outer product `u wᵀ` (no conjugation).
    pub fn outer(u: &[Complex64], w: &[Complex64]) -> Self {
        assert_eq!(u.len(), w.len(), "outer product of unequal lengths");
        Self::from_fn(u.len(), |i, j| u[i] * w[j])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    /// Row-major vectorization, entry `(i, j)` at `i * n + j`.
    pub fn vec(&self) -> Vec<Complex64> {
        self.data.clone()
    }

    pub fn from_vec(n: usize, v: Vec<Complex64>) -> Self {
        assert_eq!(v.len(), n * n, "vector length must be n^2");
        Self { n, data: v }
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.n).map(|i| self[(i, i)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    /// `(A + A*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.n, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn powi(&self, k: u32) -> Self {
        let mut result = Self::identity(self.n);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        result
    }

    /// Diagonal part as a diagonal matrix.
    pub fn diagonal_part(&self) -> Self {
        Self::diag(&self.diagonal())
    }

    /// Maximum of `‖A − A*‖_F`-style Hermitian deviation.
    pub fn hermitian_deviation(&self) -> f64 {
        (self - &self.adjoint()).frobenius_norm()
    }

    pub fn symmetric_deviation(&self) -> f64 {
        (self - &self.transpose()).frobenius_norm()
    }

    pub fn determinant(&self) -> Complex64 {
        lu::determinant(self)
    }

    pub fn inverse(&self) -> Result<Self> {
        lu::inverse(self)
    }

    pub fn adjugate(&self) -> Self {
        lu::adjugate(self)
    }

    pub fn hermitian_eig(&self) -> Result<HermitianEig> {
        jacobi::hermitian_eig(self)
    }

    pub fn pd_sqrt(&self) -> Result<Self> {
        jacobi::pd_sqrt(self)
    }

    pub fn svd(&self) -> Svd {
        jacobi::svd(self)
    }

    pub fn singular_values(&self) -> Vec<f64> {
        self.svd().singular_values
    }

    /// Number of singular values above `ratio_tol · σ₁`.
    pub fn numeric_rank(&self, ratio_tol: f64) -> usize {
        let s = self.singular_values();
        match s.first() {
            Some(&s1) if s1 > 0.0 => s.iter().filter(|&&x| x > ratio_tol * s1).count(),
            _ => 0,
        }
    }
}

/// Scale-aware scalar residual `|x − y| / (1 + |x| + |y|)`.
pub fn scalar_residual(x: Complex64, y: Complex64) -> f64 {
    (x - y).norm() / (1.0 + x.norm() + y.norm())
}

/// Scale-aware matrix residual `‖X − Y‖_F / (1 + ‖X‖_F + ‖Y‖_F)`.
pub fn matrix_residual(x: &SquareMatrix, y: &SquareMatrix) -> f64 {
    (x - y).frobenius_norm() / (1.0 + x.frobenius_norm() + y.frobenius_norm())
}

/// Principal complex `k`-th root.
pub fn principal_root(z: Complex64, k: u32) -> Complex64 {
    if z == ZERO {
        return ZERO;
    }
    let (r, theta) = z.to_polar();
    Complex64::from_polar(r.powf(1.0 / k as f64), theta / k as f64)
}

pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Gram–Schmidt QR returning the unitary factor, with `R` having a positive
/// real diagonal. Columns of `a` are assumed linearly independent.
pub fn unitary_factor(a: &SquareMatrix) -> SquareMatrix {
    let n = a.dim();
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| a.column(j)).collect();
    for j in 0..n {
        for k in 0..j {
            let (done, rest) = cols.split_at_mut(j);
            let q = &done[k];
            let v = &mut rest[0];
            let proj: Complex64 = q.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= proj * qi;
            }
        }
        let norm = vec_norm(&cols[j]);
        for x in cols[j].iter_mut() {
            *x /= norm;
        }
    }
    SquareMatrix::from_fn(n, |i, j| cols[j][i])
}

impl Index<(usize, usize)> for SquareMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for SquareMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

impl fmt::Debug for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SquareMatrix({}x{}) [", self.n, self.n)?;
        for i in 0..self.n {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:>10.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

fn check_same_dim(a: &SquareMatrix, b: &SquareMatrix) {
    assert_eq!(a.n, b.n, "matrix dimension mismatch");
}

impl Add for &SquareMatrix {
    type Output = SquareMatrix;

    fn add(self, rhs: &SquareMatrix) -> SquareMatrix {
        check_same_dim(self, rhs);
        SquareMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Add for SquareMatrix {
    type Output = SquareMatrix;

    fn add(self, rhs: SquareMatrix) -> SquareMatrix {
        &self + &rhs
    }
}

impl AddAssign<&SquareMatrix> for SquareMatrix {
    fn add_assign(&mut self, rhs: &SquareMatrix) {
        check_same_dim(self, rhs);
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl Sub for &SquareMatrix {
    type Output = SquareMatrix;

    fn sub(self, rhs: &SquareMatrix) -> SquareMatrix {
        check_same_dim(self, rhs);
        SquareMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Sub for SquareMatrix {
    type Output = SquareMatrix;

    fn sub(self, rhs: SquareMatrix) -> SquareMatrix {
        &self - &rhs
    }
}

impl Neg for &SquareMatrix {
    type Output = SquareMatrix;

    fn neg(self) -> SquareMatrix {
        self.scale_real(-1.0)
    }
}

impl Mul for &SquareMatrix {
    type Output = SquareMatrix;

    fn mul(self, rhs: &SquareMatrix) -> SquareMatrix {
        check_same_dim(self, rhs);
        let n = self.n;
        let mut out = SquareMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }
}

impl Mul for SquareMatrix {
    type Output = SquareMatrix;

    fn mul(self, rhs: SquareMatrix) -> SquareMatrix {
        &self * &rhs
    }
}

impl Mul<Complex64> for &SquareMatrix {
    type Output = SquareMatrix;

    fn mul(self, c: Complex64) -> SquareMatrix {
        self.scale(c)
    }
}
