#![allow(dead_code)]

use num_complex::Complex64;
use preserver_lab::domains::{mix, rng_from_seed};
use preserver_lab::recovery::{build_linear_rep, LinearRep};
use preserver_lab::{CanonicalPreserver, MatrixClass, PreserverForm};
use rand::Rng;

/// Forms paired with the class they preserve.
pub const FORM_CLASSES: [(PreserverForm, MatrixClass); 4] = [
    (PreserverForm::PnCongruence, MatrixClass::PositiveDefinite),
    (PreserverForm::SnCongruence, MatrixClass::Symmetric),
    (PreserverForm::MnTwoSided, MatrixClass::Full),
    (PreserverForm::TnDiagonal, MatrixClass::UpperTriangular),
];

/// The linear representation of `p` with one entry shifted by
/// `rel · ‖rep‖_F`.
///
/// The entry reads an input position the class can populate. For the
/// diagonal rule the output position is diagonal and the input is not the
/// one the rule already reads there, otherwise the shift would only rescale
/// some `λ_i` and leave a canonical map.
pub fn perturbed_rep(p: &CanonicalPreserver, class: MatrixClass, seed: u64, rel: f64) -> LinearRep {
    let n = p.dim();
    let mut rep = build_linear_rep(p, class, n, 1e-8).expect("canonical maps are linear");
    let mut rng = rng_from_seed(mix(seed, 0xd15c));
    let (out, input) = loop {
        let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
        let (i, j) = (rng.random_range(0..n), rng.random_range(0..n));
        let ok = match p {
            CanonicalPreserver::TnDiagonal { sigma, .. } => {
                let readable = if class == MatrixClass::Diagonal { i == j } else { i <= j };
                a == b && readable && !(i == j && i == sigma[a])
            }
            _ => true,
        };
        if ok {
            break ((a, b), (i, j));
        }
    };
    let delta = rel * rep.rep.frobenius_norm();
    rep.rep[(out.0 * n + out.1, input.0 * n + input.1)] += Complex64::new(delta, 0.0);
    rep
}
