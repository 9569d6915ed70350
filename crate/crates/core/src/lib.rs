//! # prunelab
//!
//! A numerical laboratory for linear classifiers trained on selectively
//! sampled ("pruned") Gaussian data.
//!
//! The crate has three layers:
//!
//! - [`selection`] and [`spectral`] evaluate the high-dimensional prediction
//!   for the test error of the weighted ridge estimator
//!   `ŵ = (XᵀDX/n + λI)⁻¹ XᵀDY/n`, where `D` keeps an example according to a
//!   selection rule `q(xᵀw_s)`.
//! - [`simulate`] runs the exact finite-dimensional experiment and is the
//!   ground truth the predictions are checked against.
//! - [`practice`] runs the patience-driven loop that grows the training pool
//!   with hard examples chosen relative to the current estimator, and
//!   [`harness`] wires everything into sweeps, CSV/SVG output and the CLI.
//!
//! Runnable walkthroughs of each capability live in `examples/`:
//!
//! ```bash
//! cargo run --release --example strategy_scalars
//! cargo run --release --example theory_vs_simulation
//! ```

pub mod error;
pub mod harness;
pub mod parallel;
pub mod practice;
pub mod quadrature;
pub mod rng;
pub mod selection;
pub mod simulate;
pub mod special;
pub mod spectral;

pub use error::{Error, Result};
pub use practice::{compare_adaptive_static, run_dp, DPConfig, DPHistory, PairedReport};
pub use selection::{
    mean_vector_coeffs, scalars_closed_form, scalars_quadrature, MeanCoefficients,
    SelectionStrategy, StrategyScalars,
};
pub use simulate::{run_cell, run_trial, CellSummary, ExperimentConfig, FitResult};
pub use spectral::{
    fixed_point_t, predict, ridgeless_test_error, spectral_state, stieltjes_m, theory_test_error,
    RegimeParams, SpectralState, TheoryPrediction,
};
