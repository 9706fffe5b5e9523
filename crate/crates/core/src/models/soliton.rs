//! Mass profile inhomogeneous in both `x` and `t`:
//! `a1 = m(−1 + 4κ² cosh²(ωt)/D)`, `d1 = −a1`,
//! `D = m² + κ² cosh(2ωt) + ω² cosh(2κx)`.

use std::f64::consts::FRAC_PI_4;

use crate::algebra::{Epsilon, Point, Potential2x2, Potential4x4, ReductionParams, ScalarField, C64};
use crate::error::{Error, Result};
use crate::models::spin_orbit::{spin_orbit_assemble, spin_orbit_fields, SpinOrbitFields};
use crate::numerics::grid::{Axis, Grid, Grid1D};
use crate::numerics::sampled::{Jet, Sampled, SampledBispinor, SpinorField};
use crate::reduction::{lift, ReducedPair};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolitonParams {
    pub m: f64,
    pub omega: f64,
}

impl SolitonParams {
    pub fn new(m: f64, omega: f64) -> Result<Self> {
        if !(m.is_finite() && omega.is_finite()) || (m == 0.0 && omega == 0.0) {
            return Err(Error::InvalidParameter(format!(
                "soliton needs finite (m, ω) ≠ (0, 0), got ({m}, {omega})"
            )));
        }
        Ok(Self { m, omega })
    }

    pub fn kappa(&self) -> f64 {
        self.m.hypot(self.omega)
    }

    fn denominator(&self, t: f64, x: f64) -> f64 {
        let k = self.kappa();
        self.m * self.m + k * k * (2.0 * self.omega * t).cosh() + self.omega * self.omega * (2.0 * k * x).cosh()
    }

    /// `4mκ² cosh²(ωt) / D`.
    fn bump(&self, t: f64, x: f64) -> f64 {
        let k = self.kappa();
        4.0 * self.m * k * k * (self.omega * t).cosh().powi(2) / self.denominator(t, x)
    }
}

#[derive(Clone, Debug)]
pub struct SolitonFields {
    pub a1: ScalarField,
    pub d1: ScalarField,
    pub denominator: ScalarField,
}

pub fn soliton_fields(p: &SolitonParams) -> SolitonFields {
    let p = *p;
    let a1 = ScalarField::real(move |q| -p.m + p.bump(q.t, q.x));
    SolitonFields {
        d1: -&a1,
        a1,
        denominator: ScalarField::real(move |q| p.denominator(q.t, q.x)),
    }
}

/// `d2 = −(4Δ + 3m − 12mκ² cosh²(ωt)/D)`, the choice that makes `Δ`
/// constant.
pub fn soliton_d2(p: &SolitonParams, delta: f64) -> ScalarField {
    let p = *p;
    ScalarField::real(move |q| -(4.0 * delta + 3.0 * p.m - 3.0 * p.bump(q.t, q.x)))
}

pub fn soliton_mu_lambda(p: &SolitonParams, delta: f64) -> SpinOrbitFields {
    let f = soliton_fields(p);
    spin_orbit_fields(&f.a1, &f.d1, &soliton_d2(p, delta))
}

/// Reduced pair under `τ = π/4`, `ε = 1`: `diag(a1, −a1)` and `diag(a1, d2)`.
pub fn soliton_pair(p: &SolitonParams, delta: f64, phi: f64) -> Result<ReducedPair> {
    let f = soliton_fields(p);
    Ok(ReducedPair {
        first: Potential2x2::diagonal(f.a1.clone(), f.d1)?,
        second: Potential2x2::diagonal(f.a1, soliton_d2(p, delta))?,
        params: ReductionParams::new(FRAC_PI_4, phi, Epsilon::Plus),
    })
}

/// The 4×4 potential in spin-orbit form.
pub fn soliton_potential(p: &SolitonParams, delta: f64, phi: f64) -> Potential4x4 {
    let f = soliton_fields(p);
    spin_orbit_assemble(&f.a1, &f.d1, &soliton_d2(p, delta), phi)
}

/// Which of the two localized solutions of the first reduced equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolitonState {
    First,
    Second,
}

/// Unnormalized solution of `(−i∂t − iσ1∂x + diag(a1, −a1)) ψ = 0`.
#[derive(Debug, Clone, Copy)]
pub struct SolitonMode {
    pub params: SolitonParams,
    pub state: SolitonState,
}

impl SpinorField<2> for SolitonMode {
    fn jet(&self, q: Point) -> Jet<2> {
        let SolitonParams { m, omega: w } = self.params;
        let k = self.params.kappa();
        let (sht, cht) = ((w * q.t).sinh(), (w * q.t).cosh());
        let (shx, chx) = ((k * q.x).sinh(), (k * q.x).cosh());
        let i = C64::new(0.0, 1.0);
        let (n, nx, nt) = match self.state {
            SolitonState::First => (
                [shx * (m * cht - i * w * sht), -i * k * cht * chx],
                [k * chx * (m * cht - i * w * sht), -i * k * k * cht * shx],
                [shx * (m * w * sht - i * w * w * cht), -i * k * w * sht * chx],
            ),
            SolitonState::Second => (
                [C64::from(k * cht * chx), (-i * m * cht + w * sht) * shx],
                [C64::from(k * k * cht * shx), (-i * m * cht + w * sht) * k * chx],
                [C64::from(k * w * sht * chx), (-i * m * w * sht + w * w * cht) * shx],
            ),
        };
        let d = self.params.denominator(q.t, q.x);
        let dx = 2.0 * k * w * w * (2.0 * k * q.x).sinh();
        let dt = 2.0 * w * k * k * (2.0 * w * q.t).sinh();
        let mut j = Jet::zero();
        for c in 0..2 {
            j.value[c] = n[c] / d;
            j.dx[c] = nx[c] / d - n[c] * dx / (d * d);
            j.dt[c] = nt[c] / d - n[c] * dt / (d * d);
        }
        j
    }
}

/// `∫ |ψ|² dx`, which the dynamics conserves, from a wide fine quadrature
/// at `t = 0`.
fn conserved_norm(mode: &SolitonMode) -> f64 {
    let half = 60.0 / mode.params.kappa();
    let g = Grid::line(Axis::X, Grid1D::symmetric(half, 24_001).expect("valid grid"));
    Sampled::from_field(mode, &g).norm()
}

/// The two lifted states on a `(t, x)` grid, scaled so the conserved
/// `∫ |Ψ|² dx` is one on the whole line.
pub fn soliton_bispinors(p: &SolitonParams, phi: f64, grid: &Grid) -> Result<(SampledBispinor, SampledBispinor)> {
    if grid.axis_grid(Axis::X).is_none() {
        return Err(Error::InvalidParameter("soliton states need an x axis".into()));
    }
    let params = ReductionParams::new(FRAC_PI_4, phi, Epsilon::Plus);
    let build = |state| {
        let mode = SolitonMode { params: *p, state };
        let norm = conserved_norm(&mode);
        let psi = Sampled::from_field(&mode, grid).scaled(C64::from(1.0 / norm));
        lift(Some(&psi), None, &params).0.expect("upper channel requested")
    };
    Ok((build(SolitonState::First), build(SolitonState::Second)))
}
