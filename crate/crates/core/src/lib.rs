//! Determinant and trace preserving maps on matrix classes.
//!
//! The crate works with dense complex `n x n` matrices ([`SquareMatrix`]) and
//! provides
//!
//! - samplers and membership tests for the classes `M_n`, `H_n`, `P_n`,
//!   PSD, complex symmetric `S_n`, upper triangular `T_n` and diagonal `D_n`
//!   ([`domains`]);
//! - the canonical preserver forms `αM*AM`, `αPAPᵗ`, `αMAN` and the
//!   diagonal rule on `T_n`, plus two non-canonical reference maps
//!   ([`preservers`]);
//! - seeded numerical checks of the determinant and trace identities that
//!   characterize those forms, and of the supporting matrix inequalities
//!   ([`verifiers`], [`oracles`]);
//! - recovery of canonical parameters from a map known only pointwise
//!   ([`recovery`]).
//!
//! Maps are black boxes behind the [`MatrixMap`] trait; any
//! `Fn(&SquareMatrix) -> SquareMatrix + Sync` qualifies.
//!
//! ```
//! use preserver_lab::domains::MatrixClass;
//! use preserver_lab::preservers::{random_canonical, PreserverForm};
//! use preserver_lab::recovery::recover;
//!
//! let hidden = random_canonical(PreserverForm::MnTwoSided, 3, 42, true);
//! let found = recover(&hidden, MatrixClass::Full, 3, 1e-8).unwrap();
//! assert!(found.preserver.transpose());
//! assert!(found.residual <= 1e-8);
//! ```

// `!(x <= tol)` is used on purpose so that NaN residuals fail checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod domains;
pub mod error;
pub mod json;
pub mod linalg;
pub mod map;
pub mod oracles;
pub mod preservers;
pub mod recovery;
pub mod verifiers;

pub use domains::MatrixClass;
pub use error::{Error, Result};
pub use linalg::SquareMatrix;
pub use map::MatrixMap;
pub use preservers::{CanonicalPreserver, PreserverForm};
