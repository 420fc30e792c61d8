//! A nonzero `A` is detected by some invertible `B = λI + E` in the same
//! class through `tr(AB) ≠ 0`.

use preserver_lab::domains::dual_witness;
use preserver_lab::oracles::dual_witness_sweep;
use preserver_lab::{MatrixClass, SquareMatrix};

pub fn main() {
    let a = SquareMatrix::unit(2, 0, 1);
    let b = dual_witness(&a, MatrixClass::Full).expect("nonzero input");
    println!("A = E_12: B = {b:?}, tr(AB) = {}", (&a * &b).trace());
    for class in [
        MatrixClass::Full,
        MatrixClass::Symmetric,
        MatrixClass::Diagonal,
        MatrixClass::Hermitian,
    ] {
        for n in [2, 3, 5] {
            let r = dual_witness_sweep(class, n, 1000, 8).expect("sweep runs");
            println!(
                "{class:<10} n={n}: {}/{} witnesses, min |tr(AB)|/|A| {:.2e}",
                r.found, r.samples, r.min_ratio
            );
        }
    }
}
