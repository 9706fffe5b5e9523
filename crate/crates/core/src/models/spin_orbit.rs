//! Spin-orbit and bilayer potentials: the reducible form with `a2 = a1`,
//! `b1 = b2 = 0`, `τ = π/4`, `ε = 1`.
//!
//! `φ = π/2` gives the intrinsic spin-orbit pattern, `φ = 0` the bilayer
//! pattern with interlayer coupling `λ`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use crate::algebra::{Epsilon, Mat2, Mat4, Point, Potential2x2, Potential4x4, ReductionParams, ScalarField, C64};
use crate::error::{Error, Result};
use crate::models::poschl_teller::{pt_admissible, Admissibility, Branch, PoschlTellerParams, PtMode};
use crate::numerics::grid::Grid1D;
use crate::numerics::grid::{Axis, Grid};
use crate::numerics::sampled::{Jet, SampledSpinor, SpinorField};
use crate::reduction::ReducedPair;

/// `Δ = a1/2 − (d1+d2)/4`, `μ = a1/2 + (d1+d2)/4`, `λ = (d1−d2)/2`.
#[derive(Clone, Debug)]
pub struct SpinOrbitFields {
    pub delta: ScalarField,
    pub mu: ScalarField,
    pub lambda: ScalarField,
}

pub fn spin_orbit_fields(a1: &ScalarField, d1: &ScalarField, d2: &ScalarField) -> SpinOrbitFields {
    let half_sum = &(d1 + d2) * 0.25;
    let half_a = a1 * 0.5;
    SpinOrbitFields {
        delta: (&half_a - &half_sum).into_hermitian_entry(),
        mu: (&half_a + &half_sum).into_hermitian_entry(),
        lambda: (&(d1 - d2) * 0.5).into_hermitian_entry(),
    }
}

/// Diagonal `(μ+Δ, μ−Δ, μ−Δ, μ+Δ)` with `e^{−iφ}λ` at (2,3).
pub fn spin_orbit_assemble(a1: &ScalarField, d1: &ScalarField, d2: &ScalarField, phi: f64) -> Potential4x4 {
    let f = spin_orbit_fields(a1, d1, d2);
    let e = C64::from_polar(1.0, -phi);
    Potential4x4::from_matrix_fn(move |p| {
        let (dl, mu, la) = (f.delta.at(p).re, f.mu.at(p).re, f.lambda.at(p).re);
        let mut m = Mat4::zeros();
        m[(0, 0)] = C64::from(mu + dl);
        m[(1, 1)] = C64::from(mu - dl);
        m[(2, 2)] = C64::from(mu - dl);
        m[(3, 3)] = C64::from(mu + dl);
        m[(1, 2)] = e * la;
        m[(2, 1)] = e.conj() * la;
        m
    })
}

/// The reduced pair `diag(a1, d1)`, `diag(a1, d2)` with the fixing above.
pub fn spin_orbit_pair(a1: &ScalarField, d1: &ScalarField, d2: &ScalarField, phi: f64) -> Result<ReducedPair> {
    Ok(ReducedPair {
        first: Potential2x2::diagonal(a1.clone(), d1.clone())?,
        second: Potential2x2::diagonal(a1.clone(), d2.clone())?,
        params: ReductionParams::new(FRAC_PI_4, phi, Epsilon::Plus),
    })
}

/// Pöschl-Teller profile rotated by a constant matrix, with an extra
/// `e^{−i shift t}`.
#[derive(Debug, Clone, Copy)]
pub struct RotatedPtMode {
    pub inner: PtMode,
    pub rotation: Mat2,
    pub shift: f64,
}

impl SpinorField<2> for RotatedPtMode {
    fn jet(&self, p: Point) -> Jet<2> {
        let j = self.inner.jet(p);
        let ph = C64::from_polar(1.0, -self.shift * p.t);
        let r = |v: [C64; 2]| {
            let w = self.rotation * nalgebra::Vector2::new(v[0], v[1]);
            [w[0] * ph, w[1] * ph]
        };
        let value = r(j.value);
        let dt = r(j.dt);
        let ish = C64::new(0.0, -self.shift);
        Jet {
            value,
            dx: r(j.dx),
            dy: r(j.dy),
            dt: [dt[0] + ish * value[0], dt[1] + ish * value[1]],
        }
    }

    fn energy(&self) -> Option<f64> {
        Some(self.inner.energy + self.shift)
    }
}

/// `U⁻¹ = e^{−iπ/4 σ1}`, taking the chiral Pöschl-Teller frame to the mass
/// frame.
pub fn mass_frame_rotation() -> Mat2 {
    let (a, b) = (C64::from(FRAC_1_SQRT_2), C64::new(0.0, -FRAC_1_SQRT_2));
    Mat2::new(a, b, b, a)
}

/// One-dimensional spin-orbit model with mass kink
/// `M(x) = 2δ tanh(x/2δ) + k_y` and constant shift `V2` of the second
/// channel.
#[derive(Clone, Debug)]
pub struct Scenario2Model {
    pub pair: ReducedPair,
    pub fields: SpinOrbitFields,
    pub psi: RotatedPtMode,
    pub xi: RotatedPtMode,
    pub energy_psi: f64,
    pub energy_xi: f64,
}

impl Scenario2Model {
    pub fn potential(&self) -> Potential4x4 {
        crate::reduction::assemble(&self.pair)
    }

    /// Both channel states on `grid`, each normalized.
    pub fn sample(&self, grid: &Grid1D) -> (SampledSpinor, SampledSpinor) {
        let g = Grid::line(Axis::X, *grid);
        (
            SampledSpinor::from_field(&self.psi, &g).normalized(),
            SampledSpinor::from_field(&self.xi, &g).normalized(),
        )
    }
}

pub fn scenario2_model(delta: f64, k_y: f64, v2: f64, n: usize, branch: Branch, phi: f64) -> Result<Scenario2Model> {
    if !v2.is_finite() {
        return Err(Error::InvalidParameter(format!("V2 = {v2} must be finite")));
    }
    let channel = |name: &str, k: f64| -> Result<PtMode> {
        let p = PoschlTellerParams::new(delta, k, n);
        match pt_admissible(&p) {
            Admissibility::Admissible => {}
            other => {
                return Err(Error::NotAdmissible(format!(
                    "{name} channel (k_y = {k}): {}",
                    other.reason().unwrap_or_default()
                )))
            }
        }
        Ok(PtMode::new(&p, branch)?.without_transverse_phase())
    };
    let psi_inner = channel("ψ", k_y)?;
    let xi_inner = channel("ξ", k_y - v2)?;
    let u = mass_frame_rotation();
    let psi = RotatedPtMode {
        inner: psi_inner,
        rotation: u,
        shift: 0.0,
    };
    let xi = RotatedPtMode {
        inner: xi_inner,
        rotation: u,
        shift: v2,
    };
    let mass = ScalarField::real(move |p| 2.0 * delta * (p.x / (2.0 * delta)).tanh() + k_y);
    let a1 = mass.clone();
    let d1 = -&mass;
    let d2 = (&d1 + &ScalarField::real_constant(2.0 * v2)).into_hermitian_entry();
    Ok(Scenario2Model {
        fields: spin_orbit_fields(&a1, &d1, &d2),
        pair: spin_orbit_pair(&a1, &d1, &d2, phi)?,
        energy_psi: psi.energy().expect("stationary"),
        energy_xi: xi.energy().expect("stationary"),
        psi,
        xi,
    })
}
