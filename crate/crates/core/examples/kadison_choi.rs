//! Kadison and Choi inequalities for unital positive maps: the gaps
//! `φ(A²) − φ(A)²` and `φ(A⁻¹) − φ(A)⁻¹` are positive semidefinite.

use preserver_lab::domains::sample_unitary;
use preserver_lab::preservers::Pinching;
use preserver_lab::verifiers::check_kadison_choi;
use preserver_lab::CanonicalPreserver;

pub fn main() {
    for n in 2..=4 {
        let congruence = CanonicalPreserver::unitary_congruence(sample_unitary(n, n as u64)).expect("unitary");
        let r = check_kadison_choi(&congruence, n, 100, 1, 1e-8).expect("unital linear");
        println!(
            "n={n} unitary congruence: kadison {:+.2e} choi {:+.2e}",
            r.min_eig_kadison, r.min_eig_choi
        );
        let r = check_kadison_choi(&Pinching, n, 100, 1, 1e-8).expect("unital linear");
        println!(
            "n={n} pinching:           kadison {:+.2e} choi {:+.2e}",
            r.min_eig_kadison, r.min_eig_choi
        );
    }
}
