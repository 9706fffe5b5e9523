//! Exactly solvable reduced models and the special functions they need.

pub mod crossed_comb;
pub mod jacobi;
pub mod poschl_teller;
pub mod soliton;
pub mod spin_orbit;

pub use crossed_comb::{
    comb_denominator, crossed_comb_mode, crossed_comb_potential, crossed_comb_reducible, CrossedCombMode,
    CrossedCombParams, CrossedCombReducible,
};
pub use jacobi::{jacobi, jacobi_derivative};
pub use poschl_teller::{
    continuum_edge, pt_admissible, pt_band_structure, pt_disorder_potential, pt_energy, pt_energy_formula,
    pt_exponents, pt_mode, pt_potential, Admissibility, Branch, PoschlTellerParams, PtDisorder, PtMode,
};
pub use soliton::{
    soliton_bispinors, soliton_d2, soliton_fields, soliton_mu_lambda, soliton_pair, soliton_potential, SolitonFields,
    SolitonMode, SolitonParams, SolitonState,
};
pub use spin_orbit::{
    mass_frame_rotation, scenario2_model, spin_orbit_assemble, spin_orbit_fields, spin_orbit_pair, RotatedPtMode,
    Scenario2Model, SpinOrbitFields,
};
