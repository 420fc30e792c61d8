//! Determinant and trace-inverse identities for each canonical form on its
//! own matrix class.

use preserver_lab::preservers::random_canonical;
use preserver_lab::verifiers::{
    default_convex_weights, verify_det_identity, verify_trace_identity, DetMode, SampleConfig, TraceKind,
};
use preserver_lab::{MatrixClass, PreserverForm};

pub fn main() {
    let cases = [
        (PreserverForm::PnCongruence, MatrixClass::PositiveDefinite),
        (PreserverForm::SnCongruence, MatrixClass::Symmetric),
        (PreserverForm::MnTwoSided, MatrixClass::Full),
        (PreserverForm::TnDiagonal, MatrixClass::UpperTriangular),
    ];
    let convex = DetMode::Convex(default_convex_weights());
    for (form, class) in cases {
        let map = random_canonical(form, 4, 2024, form.has_transpose_branch());
        let cfg = SampleConfig::new(class, 4, 200, 1, 1e-8);
        let det = verify_det_identity(&map, &cfg, &convex).expect("det check runs");
        let inv = verify_trace_identity(&map, &cfg, TraceKind::Inverse).expect("trace check runs");
        println!(
            "{form:<14} on {class:<16} det-convex max {:.2e} ({})  trace-inverse max {:.2e} ({})",
            det.max_residual,
            if det.pass { "pass" } else { "FAIL" },
            inv.max_residual,
            if inv.pass { "pass" } else { "FAIL" },
        );
        assert!(det.pass && inv.pass);
    }

    // A ↦ A + I matches det-sum at A = B = I but not in general.
    let shifted = |a: &preserver_lab::SquareMatrix| a + &preserver_lab::SquareMatrix::identity(a.dim());
    let cfg = SampleConfig::new(MatrixClass::PositiveDefinite, 3, 50, 1, 1e-8);
    let r = verify_det_identity(&shifted, &cfg, &DetMode::Sum).expect("det check runs");
    println!(
        "A + I          on pd               det-sum max {:.2e} ({})",
        r.max_residual,
        if r.pass { "pass" } else { "fail" }
    );
    assert!(!r.pass);
}
