//! `A ↦ U(‖A‖) A U(‖A‖)*` keeps every spectrum, hence `tr(φ(A)²)`, but is
//! neither additive nor determinant-sum preserving.

use preserver_lab::oracles::counterexample_battery;
use preserver_lab::preservers::NormTwistMap;

pub fn main() {
    for n in [2, 3] {
        let r = counterexample_battery(&NormTwistMap::new(n), n, 100, 0).expect("battery runs");
        println!(
            "n={n}: trace-square {} ({:.1e}), additivity {} ({:.1e}), det-sum {} ({:.1e})",
            r.signature.trace_square,
            r.reports[0].max_residual,
            r.signature.additivity,
            r.reports[1].max_residual,
            r.signature.det_sum,
            r.reports[2].max_residual,
        );
        assert!(r.expected_signature);
    }
}
