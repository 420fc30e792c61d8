use num_complex::Complex64;

use super::{SquareMatrix, ONE, ZERO};
use crate::error::{Error, Result};

/// Packed LU factors with partial pivoting.
struct Lu {
    lu: SquareMatrix,
    perm: Vec<usize>,
    sign: f64,
    singular: bool,
}

fn factor(a: &SquareMatrix) -> Lu {
    let n = a.dim();
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign = 1.0;
    let mut singular = false;
    for k in 0..n {
        let (p, pmax) = (k..n)
            .map(|i| (i, lu[(i, k)].norm()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pmax == 0.0 {
            singular = true;
            continue;
        }
        if p != k {
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(p, j)];
                lu[(p, j)] = tmp;
            }
            perm.swap(k, p);
            sign = -sign;
        }
        let pivot = lu[(k, k)];
        for i in (k + 1)..n {
            let factor = lu[(i, k)] / pivot;
            lu[(i, k)] = factor;
            if factor == ZERO {
                continue;
            }
            for j in (k + 1)..n {
                let u = lu[(k, j)];
                lu[(i, j)] -= factor * u;
            }
        }
    }
    Lu {
        lu,
        perm,
        sign,
        singular,
    }
}

pub(super) fn determinant(a: &SquareMatrix) -> Complex64 {
    if a.dim() == 1 {
        return a[(0, 0)];
    }
    let f = factor(a);
    if f.singular {
        return ZERO;
    }
    let prod: Complex64 = (0..a.dim()).map(|i| f.lu[(i, i)]).product();
    prod * f.sign
}

pub(super) fn inverse(a: &SquareMatrix) -> Result<SquareMatrix> {
    let n = a.dim();
    let f = factor(a);
    if f.singular {
        return Err(Error::Singular);
    }
    let mut inv = SquareMatrix::zeros(n);
    for col in 0..n {
        // solve L U x = P e_col
        let mut x: Vec<Complex64> = f.perm.iter().map(|&p| if p == col { ONE } else { ZERO }).collect();
        for i in 0..n {
            for k in 0..i {
                let l = f.lu[(i, k)];
                x[i] = x[i] - l * x[k];
            }
        }
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                let u = f.lu[(i, k)];
                x[i] = x[i] - u * x[k];
            }
            x[i] /= f.lu[(i, i)];
        }
        for i in 0..n {
            inv[(i, col)] = x[i];
        }
    }
    if !inv.is_finite() {
        return Err(Error::Singular);
    }
    Ok(inv)
}

fn minor(a: &SquareMatrix, row: usize, col: usize) -> SquareMatrix {
    let n = a.dim();
    SquareMatrix::from_fn(n - 1, |i, j| {
        let si = if i < row { i } else { i + 1 };
        let sj = if j < col { j } else { j + 1 };
        a[(si, sj)]
    })
}

fn cofactor_adjugate(a: &SquareMatrix) -> SquareMatrix {
    let n = a.dim();
    if n == 1 {
        return SquareMatrix::identity(1);
    }
    // Adj(A)_{ji} = (-1)^{i+j} det(minor_ij)
    SquareMatrix::from_fn(n, |j, i| {
        let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
        determinant(&minor(a, i, j)) * sign
    })
}

pub(super) fn adjugate(a: &SquareMatrix) -> SquareMatrix {
    let n = a.dim();
    if n <= 4 {
        return cofactor_adjugate(a);
    }
    let det = determinant(a);
    let threshold = 1e-12 * a.frobenius_norm().powi(n as i32);
    if det.norm() < threshold {
        return cofactor_adjugate(a);
    }
    match inverse(a) {
        Ok(inv) => inv.scale(det),
        Err(_) => cofactor_adjugate(a),
    }
}
