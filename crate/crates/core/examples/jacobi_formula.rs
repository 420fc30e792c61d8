//! Jacobi's formula `d/dt det A(t) = tr(adj A(t) A'(t))` against a central
//! difference.

use preserver_lab::oracles::jacobi_sweep;
use preserver_lab::verifiers::check_jacobi;
use preserver_lab::SquareMatrix;

pub fn main() {
    let c = check_jacobi(
        &SquareMatrix::identity(2),
        &SquareMatrix::real_diag(&[1.0, 2.0]),
        0.0,
        1e-4,
    )
    .expect("valid step");
    println!(
        "A(t) = I + t diag(1,2) at 0: formula {:.6}, difference {:.6}",
        c.formula, c.finite_diff
    );
    for n in 1..=6 {
        let r = jacobi_sweep(n, 100, n as u64, 1e-6).expect("sweep runs");
        println!("n={n}: max residual {:.2e} over {} paths", r.max_residual, r.samples);
    }
}
