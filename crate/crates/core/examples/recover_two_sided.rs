//! Recovers `X ↦ αMXᵗN` on the full matrix space from pointwise evaluation.

use preserver_lab::preservers::random_canonical;
use preserver_lab::recovery::recover;
use preserver_lab::{CanonicalPreserver, MatrixClass, PreserverForm};

pub fn main() {
    let n = 4;
    let hidden = random_canonical(PreserverForm::MnTwoSided, n, 7, true);
    // the recovery only sees a closure
    let black_box = |a: &preserver_lab::SquareMatrix| hidden.apply(a).expect("size matches");
    let found = recover(&black_box, MatrixClass::Full, n, 1e-8).expect("canonical map");
    println!("branch: {}", found.branch.name());
    println!("alpha: {:.6}", found.preserver.alpha());
    println!("det(MN) - 1: {:.2e}", found.preserver.gauge_residual());
    println!("round-trip residual: {:.2e}", found.residual);
    if let CanonicalPreserver::MnTwoSided { m, .. } = &found.preserver {
        println!("M = {m:?}");
    }
    assert!(found.preserver.transpose());
}
