//! Multi-view sparse-representation classification with jointly
//! estimated spike-and-slab prior parameters.
//!
//! A test target seen from one or more views is expanded over a shared
//! dictionary of vectorized training images. Per-coefficient activation
//! probabilities, their induced penalties, and the sparse coefficients
//! themselves are estimated together by an iterative reweighted-l1
//! procedure; the class is then decided by summed per-class
//! reconstruction residuals across views.
//!
//! Crate layout:
//! - [`dictionary`]: block-structured, column-normalized training matrix
//! - [`solver`]: weighted-lasso inner solver plus an enumeration oracle
//! - [`jpcem`]: the joint prior/coefficient estimation outer loop
//! - [`classify`]: residual-based decisions and the plain SRC baselines
//! - [`data`]: graymap ingestion, synthetic subspace data, seeded splits
//! - [`experiment`]: the four reporting experiments and batch evaluation
//!
//! Batch and per-view work runs on rayon when the `parallel` feature
//! (default) is enabled; disabling it yields a fully sequential build
//! with identical outputs.

pub mod classify;
pub mod data;
pub mod dictionary;
pub mod error;
pub mod experiment;
pub mod jpcem;
mod linalg;
pub mod observation;
mod parallel;
pub mod report;
pub mod solver;

pub use classify::{
    classify_multiview, multiview_src_baseline, src_single_baseline, ClassificationResult,
};
pub use dictionary::Dictionary;
pub use error::{Error, Result};
pub use jpcem::{jpcem_solve, jpcem_solve_with_state, CoefficientMatrix, JpcemConfig, PriorState};
pub use observation::MultiViewObservation;
pub use solver::{
    augment, brute_force_lasso, eval_objective, solve_weighted_lasso, AugmentedSystem,
    LassoSolution, WeightedLassoProblem,
};
