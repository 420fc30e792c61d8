//! `tr(φ(A)φ(B)ᵏ) = tr(ABᵏ)` for symmetric congruences, and the matrix-unit
//! computation `tr((D₁₂ + D₁₃ + D₂₃)³) = 6` with its sign-flipped image.

use num_complex::Complex64;
use preserver_lab::verifiers::{verify_trace_identity, SampleConfig, TraceKind};
use preserver_lab::{CanonicalPreserver, MatrixClass, SquareMatrix};

pub fn main() {
    let d = |i, j| SquareMatrix::sym_unit(3, i, j);
    let s = &(&d(0, 1) + &d(0, 2)) + &d(1, 2);
    println!("tr((D12 + D13 + D23)^3) = {}", s.powi(3).trace());
    // the map sending D_uv to -D_uv and fixing the others
    let flipped = &(&d(0, 1) + &d(0, 2)) - &d(1, 2);
    println!("after flipping D23:        {}", flipped.powi(3).trace());
    assert_eq!(s.powi(3).trace(), Complex64::new(6.0, 0.0));

    // the identity needs α^(k+1) = 1 and a complex orthogonal P
    let q = orthogonalize(&MatrixClass::Full.sample(4, 5));
    let orthogonal = CanonicalPreserver::sn_congruence(Complex64::new(1.0, 0.0), q).expect("(det Q)^2 = 1");
    for k in 1..=3 {
        let cfg = SampleConfig::new(MatrixClass::Symmetric, 4, 50, 9, 1e-7);
        let r = verify_trace_identity(&orthogonal, &cfg, TraceKind::Power(k)).expect("check runs");
        println!(
            "complex orthogonal congruence, k={k}: max residual {:.2e}",
            r.max_residual
        );
    }
}

/// Complex orthogonal `Q` (`QᵗQ = I`) built from `P` by symmetric
/// Gram–Schmidt on the bilinear form `xᵗy`.
fn orthogonalize(p: &SquareMatrix) -> SquareMatrix {
    let n = p.dim();
    let mut cols: Vec<Vec<Complex64>> = Vec::new();
    for j in 0..n {
        let mut v = p.column(j);
        for q in &cols {
            let proj: Complex64 = q.iter().zip(&v).map(|(a, b)| a * b).sum();
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= proj * qi;
            }
        }
        let norm: Complex64 = v.iter().map(|x| x * x).sum::<Complex64>().sqrt();
        cols.push(v.iter().map(|x| x / norm).collect());
    }
    SquareMatrix::from_fn(n, |i, j| cols[j][i])
}
