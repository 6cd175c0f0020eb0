//! Contradirectional coupler with a χ(2) second-harmonic waveguide: the
//! perturbative operator solution, nonclassicality witnesses built on it,
//! and the numerical checks that keep both honest.

pub mod coupler;
pub mod dd;
pub mod error;
pub mod evaluator;
pub mod ops;
pub mod sweep;
pub mod validation;
pub mod witnesses;

pub use coupler::{compute_coefficients, short_length_coefficients, Coefficients, CouplerParams};
pub use error::{Error, Result};
pub use evaluator::MonomialEvaluator;
pub use sweep::{figure, run_sweep, Axis, Grid, Row, SweepConfig, WitnessSelector};
pub use validation::{validate, ValidationReport};
pub use witnesses::{CoherentInput, Mode, ReportOrders, WitnessReport};
