//! Recovers a congruence `A ↦ αM*AM` from its action on positive definite
//! matrices only, and rejects a two-sided map that is not a *-pair.

use preserver_lab::preservers::random_canonical;
use preserver_lab::recovery::{build_linear_rep, recover};
use preserver_lab::{Error, MatrixClass, PreserverForm, SquareMatrix};

pub fn main() {
    let n = 3;
    let hidden = random_canonical(PreserverForm::PnCongruence, n, 11, false);
    let rep = build_linear_rep(&hidden, MatrixClass::PositiveDefinite, n, 1e-8).expect("linear");
    println!(
        "linear extension from P_{n}: consistency residual {:.2e}",
        rep.consistency_residual
    );

    let found = recover(&hidden, MatrixClass::PositiveDefinite, n, 1e-8).expect("congruence");
    println!("alpha = {:.6} (real, positive)", found.preserver.alpha().re);
    println!("det(M*M) - 1: {:.2e}", found.preserver.gauge_residual());
    println!("round-trip residual: {:.2e}", found.residual);

    let m = MatrixClass::Full.sample(n, 5);
    let lopsided = move |a: &SquareMatrix| &(&m * a) * &m;
    match recover(&lopsided, MatrixClass::PositiveDefinite, n, 1e-8) {
        Err(e @ Error::NotStarForm { .. }) => println!("A ↦ MAM: {e}"),
        other => panic!("unexpected: {other:?}"),
    }
}
