//! Recovers the diagonal rule `[φ(A)]_ii = αλ_i A_σ(i)σ(i)` on upper
//! triangular matrices. Off-diagonal output is ignored.

use num_complex::Complex64;
use preserver_lab::recovery::recover;
use preserver_lab::{CanonicalPreserver, MatrixClass};

pub fn main() {
    let c = |x: f64| Complex64::new(x, 0.0);
    // σ = (2, 3, 1) in 1-based notation
    let hidden = CanonicalPreserver::tn_diagonal(c(1.0), vec![1, 2, 0], vec![c(2.0), c(0.5), c(1.0)], 99)
        .expect("valid parameters");
    let found = recover(&hidden, MatrixClass::UpperTriangular, 3, 1e-8).expect("diagonal rule");
    if let CanonicalPreserver::TnDiagonal {
        alpha, sigma, lambdas, ..
    } = &found.preserver
    {
        let one_based: Vec<usize> = sigma.iter().map(|s| s + 1).collect();
        println!("sigma = {one_based:?}");
        println!("alpha = {alpha:.6}");
        for (i, l) in lambdas.iter().enumerate() {
            println!("lambda_{} = {:.12}", i + 1, l);
        }
        assert_eq!(one_based, vec![2, 3, 1]);
    }
    println!("diagonal round-trip residual: {:.2e}", found.residual);
}
