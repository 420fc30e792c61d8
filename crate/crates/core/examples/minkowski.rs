//! Minkowski's determinant inequality and its equality case.

use preserver_lab::oracles::minkowski_sweep;
use preserver_lab::verifiers::check_minkowski;
use preserver_lab::SquareMatrix;

pub fn main() {
    let a = SquareMatrix::real_diag(&[1.0, 2.0]);
    let b = SquareMatrix::real_diag(&[2.0, 1.0]);
    let c = check_minkowski(&a, &b).expect("positive definite");
    println!(
        "diag(1,2), diag(2,1): lhs {:.6} rhs {:.6} equality {}",
        c.lhs, c.rhs, c.equality
    );
    let c = check_minkowski(&a, &a.scale_real(3.0)).expect("positive definite");
    println!("A, 3A: lhs {:.6} rhs {:.6} equality {}", c.lhs, c.rhs, c.equality);

    for n in 2..=6 {
        let r = minkowski_sweep(n, 1000, 17).expect("sweep runs");
        println!(
            "n={n}: {} violations, {} false equalities, {}/{} proportional pairs at equality, min gap {:.2e}",
            r.direction_violations,
            r.false_equalities,
            r.proportional_equalities,
            r.proportional_pairs,
            r.min_relative_gap
        );
    }
}
