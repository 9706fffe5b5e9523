//! Crossed-comb barriers `−4mω² sin²(κx)/D(x, y)` and their localized
//! states at `E = m`.
//!
//! The comb along `y` is the comb along `x` evaluated at `(x, y) → (−y, x)`.

use std::f64::consts::{FRAC_PI_4, SQRT_2};

use crate::algebra::{Epsilon, Point, Potential2x2, Potential4x4, ReductionParams, ScalarField, C64};
use crate::error::{Error, Result};
use crate::numerics::grid::{Axis, Grid};
use crate::numerics::sampled::{Jet, SampledSpinor, SpinorField};
use crate::reduction::{assemble, ReducedPair};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossedCombParams {
    pub m: f64,
    pub omega: f64,
}

impl CrossedCombParams {
    pub fn new(m: f64, omega: f64) -> Result<Self> {
        if !(m.is_finite() && omega.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite comb parameters m = {m}, ω = {omega}"
            )));
        }
        if m == 0.0 && omega == 0.0 {
            return Err(Error::InvalidParameter("m and ω cannot both vanish".into()));
        }
        Ok(Self { m, omega })
    }

    pub fn kappa(&self) -> f64 {
        self.m.hypot(self.omega)
    }
}

/// `(x, y)` in the frame where the comb varies along the first coordinate.
fn comb_frame(axis: Axis, p: Point) -> Result<(f64, f64)> {
    match axis {
        Axis::X => Ok((p.x, p.y)),
        Axis::Y => Ok((-p.y, p.x)),
        Axis::T => Err(Error::InvalidParameter("combs vary along x or y".into())),
    }
}

/// `D = m² + ω² cos(2κX) + κ² cosh(2ωY)` in the comb frame.
pub fn comb_denominator(p: &CrossedCombParams, axis: Axis) -> Result<ScalarField> {
    comb_frame(axis, Point::default())?;
    let p = *p;
    Ok(ScalarField::real(move |q| {
        let (x, y) = comb_frame(axis, q).expect("axis checked");
        denominator(&p, x, y)
    }))
}

fn denominator(p: &CrossedCombParams, x: f64, y: f64) -> f64 {
    let k = p.kappa();
    p.m * p.m + p.omega * p.omega * (2.0 * k * x).cos() + k * k * (2.0 * p.omega * y).cosh()
}

/// `4mω² sin²(κX) / D`, the depth of the barrier.
fn well(p: &CrossedCombParams, x: f64, y: f64) -> f64 {
    4.0 * p.m * p.omega * p.omega * (p.kappa() * x).sin().powi(2) / denominator(p, x, y)
}

/// Scalar potential `−4mω² sin²(κs)/D` on both diagonal entries.
pub fn crossed_comb_potential(p: &CrossedCombParams, axis: Axis) -> Result<Potential2x2> {
    comb_frame(axis, Point::default())?;
    let p = *p;
    let v = ScalarField::real(move |q| {
        let (x, y) = comb_frame(axis, q).expect("axis checked");
        -well(&p, x, y)
    });
    Potential2x2::diagonal(v.clone(), v)
}

/// Localized state at `E = m`, time factor `e^{−imt}`.
///
/// Along `Y` this is `e^{iπ/4 σ3}` times the `X` state at `(−y, x)`.
#[derive(Debug, Clone, Copy)]
pub struct CrossedCombMode {
    pub params: CrossedCombParams,
    pub axis: Axis,
}

impl CrossedCombMode {
    pub fn new(params: CrossedCombParams, axis: Axis) -> Result<Self> {
        comb_frame(axis, Point::default())?;
        Ok(Self { params, axis })
    }

    /// Value and comb-frame partials at `(x, y)` of the `X` state.
    fn frame_jet(&self, x: f64, y: f64) -> ([C64; 2], [C64; 2], [C64; 2]) {
        let CrossedCombParams { m, omega: w } = self.params;
        let k = self.params.kappa();
        let (s, cx) = (k * x).sin_cos();
        let (sh, ch) = ((w * y).sinh(), (w * y).cosh());
        let i = C64::new(0.0, 1.0);
        let n = [
            w * s * sh - i * ch * (m * s + k * cx),
            ch * (m * s - k * cx) + i * w * s * sh,
        ];
        let nx = [
            w * k * cx * sh - i * ch * (m * k * cx - k * k * s),
            ch * (m * k * cx + k * k * s) + i * w * k * cx * sh,
        ];
        let ny = [
            w * w * s * ch - i * w * sh * (m * s + k * cx),
            w * sh * (m * s - k * cx) + i * w * w * s * ch,
        ];
        let d = denominator(&self.params, x, y);
        let dx = -2.0 * k * w * w * (2.0 * k * x).sin();
        let dy = 2.0 * w * k * k * (2.0 * w * y).sinh();
        let pre = SQRT_2 * k * k;
        let val = n.map(|z| z * (pre / d));
        let mut vx = [C64::default(); 2];
        let mut vy = [C64::default(); 2];
        for c in 0..2 {
            vx[c] = (nx[c] / d - n[c] * dx / (d * d)) * pre;
            vy[c] = (ny[c] / d - n[c] * dy / (d * d)) * pre;
        }
        (val, vx, vy)
    }
}

impl SpinorField<2> for CrossedCombMode {
    fn jet(&self, p: Point) -> Jet<2> {
        let (x, y) = comb_frame(self.axis, p).expect("axis checked");
        let (v, fx, fy) = self.frame_jet(x, y);
        // ∂x = ∂Y and ∂y = −∂X in the rotated frame.
        let (value, dx, dy) = match self.axis {
            Axis::X => (v, fx, fy),
            _ => {
                let ph = [C64::from_polar(1.0, FRAC_PI_4), C64::from_polar(1.0, -FRAC_PI_4)];
                (
                    [ph[0] * v[0], ph[1] * v[1]],
                    [ph[0] * fy[0], ph[1] * fy[1]],
                    [-ph[0] * fx[0], -ph[1] * fx[1]],
                )
            }
        };
        let time = C64::from_polar(1.0, -self.params.m * p.t);
        let m = self.params.m;
        Jet {
            value: value.map(|z| z * time),
            dx: dx.map(|z| z * time),
            dy: dy.map(|z| z * time),
            dt: value.map(|z| z * time * C64::new(0.0, -m)),
        }
    }

    fn energy(&self) -> Option<f64> {
        Some(self.params.m)
    }
}

/// The localized state on `grid`, normalized to unit quadrature norm.
pub fn crossed_comb_mode(p: &CrossedCombParams, axis: Axis, grid: &Grid) -> Result<SampledSpinor> {
    let mode = CrossedCombMode::new(*p, axis)?;
    Ok(SampledSpinor::from_field(&mode, grid).normalized())
}

/// Reducible potential of two crossed combs under the second disorder
/// scheme (`τ = π/4`, `ε = −1`).
#[derive(Clone, Debug)]
pub struct CrossedCombReducible {
    pub first: CrossedCombParams,
    pub second: CrossedCombParams,
    pub pair: ReducedPair,
    /// `assemble()` of the pair; the authoritative potential.
    pub potential: Potential4x4,
    /// Entry (1,1) of `potential`.
    pub v_a: ScalarField,
    /// Entry (1,4) of `potential`.
    pub w_plus: ScalarField,
    /// The published closed forms of `V_A` and `W+`, kept to report how far
    /// they are from the assembled entries.
    pub printed_v_a: ScalarField,
    pub printed_w_plus: ScalarField,
}

impl CrossedCombReducible {
    /// Largest deviation of the printed `V_A` and `W+` from the assembled
    /// entries over `points`.
    pub fn printed_discrepancy(&self, points: &[Point]) -> (f64, f64) {
        let dev =
            |a: &ScalarField, b: &ScalarField| points.iter().map(|&p| (a.at(p) - b.at(p)).norm()).fold(0.0, f64::max);
        (
            dev(&self.v_a, &self.printed_v_a),
            dev(&self.w_plus, &self.printed_w_plus),
        )
    }
}

pub fn crossed_comb_reducible(
    p1: &CrossedCombParams,
    p2: &CrossedCombParams,
    phi: f64,
) -> Result<CrossedCombReducible> {
    let params = ReductionParams::new(FRAC_PI_4, phi, Epsilon::Minus);
    let pair = ReducedPair {
        first: crossed_comb_potential(p1, Axis::X)?,
        second: crossed_comb_potential(p2, Axis::Y)?,
        params,
    };
    let potential = assemble(&pair);
    let (a, b) = (*p1, *p2);
    // Half-depths in the printed normalization: ω instead of ω², and the
    // second comb read along x.
    let printed = move |q: Point| {
        let t1 = 2.0 * a.m * a.omega * (a.kappa() * q.x).sin().powi(2) / denominator(&a, q.x, q.y);
        let t2 = 2.0 * b.m * b.omega * (b.kappa() * q.x).sin().powi(2) / denominator(&b, -q.y, q.x);
        (t1, t2)
    };
    let printed_v_a = ScalarField::real(move |q| {
        let (t1, t2) = printed(q);
        -t1 - t2
    });
    let printed_w_plus = ScalarField::new(move |q| {
        let (t1, t2) = printed(q);
        C64::from_polar(-2.0, -phi) * (t1 - t2)
    });
    Ok(CrossedCombReducible {
        first: *p1,
        second: *p2,
        v_a: potential.entry(0, 0).clone(),
        w_plus: potential.entry(0, 3).clone(),
        potential,
        pair,
        printed_v_a,
        printed_w_plus,
    })
}
