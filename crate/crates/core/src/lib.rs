//! Verification engine and model library for metric connections with
//! parallel skew torsion on reductive homogeneous models.
//!
//! The crate builds invariant model data from Lie-algebra structure
//! constants and certifies, by residual checks, the canonical connection
//! of 3-(α,δ)-Sasaki structures, the canonical submersion onto nearly
//! Kähler quotients, and the second submersion onto quaternionic Kähler
//! bases. All computations run either in `f64` or exactly over the
//! rationals, selected by the scalar type parameter.

// Dense index arithmetic reads better with explicit tensor layouts.
#![allow(clippy::identity_op, clippy::needless_range_loop)]

pub mod catalog;
pub mod error;
pub mod homogeneous;
pub mod linalg;
pub mod model_file;
pub mod nk;
pub mod qk;
pub mod report;
pub mod run_document;
pub mod sasaki;
pub mod scalar;
pub mod submersion;
pub mod suites;
pub mod tensor;

pub use error::GeometryError;
pub use homogeneous::{
    bianchi_check, check_invariant_splitting, curvature, d_invariant, holonomy_algebra,
    levi_civita, lie_derivative, nabla_invariant, nabla_residual, torsion_of, validate_model,
    with_torsion, CurvatureOperator, HolonomyAlgebra, HolonomyConfig, LieModel, NomizuConnection,
};
pub use linalg::Mat;
pub use report::{Check, ResidualMax, Status, VerificationReport};
pub use scalar::{Rational, Scalar};
pub use tensor::{
    cyclic_sum, endo_action, endo_from_two_form, interior_product, two_form_from_endo, wedge,
    Fiber, Tensor, TensorKind,
};
