mod common;

use common::{perturbed_rep, FORM_CLASSES};
use num_complex::Complex64;
use preserver_lab::domains::MatrixClass;
use preserver_lab::preservers::{random_canonical, NormTwistMap};
use preserver_lab::verifiers::{
    check_additivity, check_homogeneity, check_homogeneity_additivity, default_convex_weights, pencil_grid,
    verify_det_identity, verify_trace_identity, DetMode, SampleConfig, TraceKind, MAX_LISTED_FAILURES,
};
use preserver_lab::{Error, PreserverForm, SquareMatrix};

#[test]
fn canonical_maps_pass_their_identity_battery() {
    let convex = DetMode::Convex(default_convex_weights());
    for (form, class) in FORM_CLASSES {
        for n in [2, 3, 5] {
            for seed in 0..4 {
                let transpose = seed % 2 == 1 && form.has_transpose_branch();
                let p = random_canonical(form, n, seed, transpose);
                let cfg = SampleConfig::new(class, n, 200, seed, 1e-8);
                let det = verify_det_identity(&p, &cfg, &convex).unwrap();
                let inv = verify_trace_identity(&p, &cfg, TraceKind::Inverse).unwrap();
                assert!(det.pass, "{form} n={n} seed={seed}: {}", det.max_residual);
                assert!(inv.pass, "{form} n={n} seed={seed}: {}", inv.max_residual);
            }
        }
    }
}

#[test]
fn congruences_on_pd_pass_sum_and_product_identities() {
    for n in [2, 3, 5] {
        let p = random_canonical(PreserverForm::PnCongruence, n, 3, false);
        let cfg = SampleConfig::new(MatrixClass::PositiveDefinite, n, 200, 1, 1e-8);
        assert!(verify_det_identity(&p, &cfg, &DetMode::Sum).unwrap().pass);
        // trace-product needs a unital congruence; α = 1 and unitary M
        let u = preserver_lab::domains::sample_unitary(n, 9);
        let q = preserver_lab::CanonicalPreserver::unitary_congruence(u).unwrap();
        assert!(verify_trace_identity(&q, &cfg, TraceKind::Product).unwrap().pass);
    }
}

#[test]
fn pencil_identity_holds_for_unimodular_maps() {
    // det(φ(A) + λφ(B)) = det(A + λB) needs αⁿ = 1
    let p = random_canonical(PreserverForm::MnTwoSided, 3, 1, false);
    let alpha_n = p.alpha().powu(3);
    let normalized = move |a: &SquareMatrix| p.apply(a).unwrap().scale(alpha_n.powf(-1.0 / 3.0));
    let cfg = SampleConfig::new(MatrixClass::Full, 3, 100, 2, 1e-8);
    let r = verify_det_identity(&normalized, &cfg, &DetMode::Pencil(pencil_grid(3))).unwrap();
    assert!(r.pass, "{}", r.max_residual);
}

#[test]
fn shifted_identity_fails_det_sum() {
    let shift = |a: &SquareMatrix| a + &SquareMatrix::identity(a.dim());
    let cfg = SampleConfig::new(MatrixClass::PositiveDefinite, 3, 50, 0, 1e-8);
    let r = verify_det_identity(&shift, &cfg, &DetMode::Sum).unwrap();
    assert!(!r.pass);
    assert!(!r.failures.is_empty() && r.failures.len() <= MAX_LISTED_FAILURES);
    // α = 2 from det(2I) = 2ⁿ, and A = B = 2I gives 6ⁿ against 8ⁿ
    let lhs = SquareMatrix::identity(3).scale_real(6.0).determinant();
    let rhs = Complex64::new(8.0f64.powi(3), 0.0);
    assert!((lhs - rhs).norm() > 1.0);
    assert!(check_homogeneity(&shift, &cfg).unwrap().max_residual > 1e-3);
}

#[test]
fn scalar_maps_on_one_by_one_pass_trace_inverse() {
    for alpha in [0.3, 1.0, 17.0] {
        let map = move |a: &SquareMatrix| a.scale_real(alpha);
        let cfg = SampleConfig::new(MatrixClass::PositiveDefinite, 1, 50, 4, 1e-12);
        assert!(verify_trace_identity(&map, &cfg, TraceKind::Inverse).unwrap().pass);
    }
}

#[test]
fn single_entry_perturbations_are_detected() {
    for (form, class) in FORM_CLASSES {
        for n in [2, 3] {
            for seed in 0..50 {
                let p = random_canonical(form, n, seed, seed % 2 == 1 && form.has_transpose_branch());
                let rep = perturbed_rep(&p, class, seed, 1e-3);
                let cfg = SampleConfig::new(class, n, 100, seed, 1e-8);
                let r = verify_det_identity(&rep, &cfg, &DetMode::Sum).unwrap();
                assert!(
                    !r.pass && r.max_residual >= 1e-5,
                    "{form} n={n} seed={seed}: {}",
                    r.max_residual
                );
            }
        }
    }
}

#[test]
fn twist_map_battery() {
    for n in [2, 3] {
        let map = NormTwistMap::new(n);
        let cfg = |tol| SampleConfig::new(MatrixClass::Hermitian, n, 100, 11, tol);
        assert!(verify_trace_identity(&map, &cfg(1e-9), TraceKind::Square).unwrap().pass);
        assert!(
            verify_trace_identity(&map, &cfg(1e-8), TraceKind::Product)
                .unwrap()
                .max_residual
                > 1e-3
        );
        assert!(check_additivity(&map, &cfg(1e-8)).unwrap().max_residual > 1e-3);
        // ‖λA‖ = λ‖A‖ changes the unitary, so homogeneity fails too
        assert!(!check_homogeneity_additivity(&map, &cfg(1e-8)).unwrap().pass);
    }
}

#[test]
fn canonical_maps_are_linear() {
    for (form, class) in FORM_CLASSES {
        let p = random_canonical(form, 3, 6, false);
        let cfg = SampleConfig::new(class, 3, 50, 6, 1e-9);
        assert!(check_homogeneity_additivity(&p, &cfg).unwrap().pass, "{form}");
    }
}

#[test]
fn failure_listing_is_capped() {
    let square = |a: &SquareMatrix| a * a;
    let cfg = SampleConfig::new(MatrixClass::Full, 3, 40, 2, 1e-8);
    let r = check_additivity(&square, &cfg).unwrap();
    assert_eq!(r.failures.len(), MAX_LISTED_FAILURES);
    assert!(r.failures.iter().all(|f| f.residual > r.tol));
    assert!(r.mean_residual <= r.max_residual);
}

#[test]
fn degenerate_unit_is_reported() {
    let zero = |a: &SquareMatrix| SquareMatrix::zeros(a.dim());
    let cfg = SampleConfig::new(MatrixClass::Full, 2, 5, 0, 1e-8);
    assert!(matches!(
        verify_det_identity(&zero, &cfg, &DetMode::Sum),
        Err(Error::DegenerateUnit)
    ));
}
