//! Reduction of 4x4 matrix Dirac Hamiltonians to pairs of 2x2 problems.
//!
//! A reducible potential is `T blockdiag(V1, V2) T†` for a constant unitary
//! `T = R (U ⊗ I)`. [`reduction`] builds and inverts that map and lifts
//! reduced solutions; [`models`] holds the exactly solvable catalogs and
//! [`numerics`] the machinery that checks them.

pub mod algebra;
pub mod error;
pub mod models;
pub mod numerics;
pub mod reduction;

pub use algebra::{
    mixer_matrix, swap_matrix, total_transform, Epsilon, Mat2, Mat4, Point, Potential2x2, Potential4x4,
    ReductionParams, ScalarField, C64,
};
pub use error::{Error, Result, Violation};
pub use reduction::{
    assemble, assemble_point, detect, detect_samples, disorder_identify, expectation, lift, perturbation_lift,
    reduced_pair_from_fixed_form, DisorderComponents, DisorderScheme, FixedFormComponents, PerturbationBlock,
    ReducedPair,
};
