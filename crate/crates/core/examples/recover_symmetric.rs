//! Recovers `A ↦ αPAPᵗ` on complex symmetric matrices from the rank-one
//! images of the diagonal matrix units.

use preserver_lab::preservers::random_canonical;
use preserver_lab::recovery::{build_linear_rep, recover};
use preserver_lab::{CanonicalPreserver, MatrixClass, PreserverForm, SquareMatrix};

pub fn main() {
    let n = 4;
    let hidden = random_canonical(PreserverForm::SnCongruence, n, 3, false);
    let rep = build_linear_rep(&hidden, MatrixClass::Symmetric, n, 1e-8).expect("linear");
    for i in 0..n {
        let d = if i + 1 < n {
            SquareMatrix::sym_unit(n, i, i + 1)
        } else {
            SquareMatrix::sym_unit(n, 0, i)
        };
        println!(
            "rank L(E_{i}{i}) = {}, rank L(D) = {}",
            rep.unit_image(i, i).numeric_rank(1e-7),
            rep.apply(&d).expect("size").numeric_rank(1e-7)
        );
    }
    let found = recover(&hidden, MatrixClass::Symmetric, n, 1e-8).expect("symmetric congruence");
    if let CanonicalPreserver::SnCongruence { p, .. } = &found.preserver {
        println!("(det P)^2 = {:.12}", p.determinant().powu(2));
    }
    println!("round-trip residual: {:.2e}", found.residual);
}
