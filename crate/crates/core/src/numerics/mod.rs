//! Grids, quadrature, residual norms, finite-difference operators and the
//! eigensolver used to certify closed-form results.

pub mod banded;
pub mod convergence;
pub mod discretize;
pub mod eigen;
pub mod grid;
pub mod quadrature;
pub mod residual;
pub mod sampled;

pub use convergence::{convergence_order, ConvergenceOrder};
pub use discretize::{discretize_1d, DiscreteOperator, Scheme};
pub use eigen::{eigen_in_gap, participation_ratio, EigenOptions, EigenReport, EigenState};
pub use grid::{Axis, Grid, Grid1D};
pub use quadrature::{quadrature, quadrature_real};
pub use residual::{partial, residual_spacetime, residual_stationary, KineticConvention};
pub use sampled::{Jet, Sampled, SampledBispinor, SampledSpinor, SpinorField};
