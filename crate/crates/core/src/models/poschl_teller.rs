//! Dirac operator with the Pöschl-Teller coupling `b = −2iδ tanh(x/2δ)`.
//!
//! With `e^{i(k_y y − E t)}` factored out, the reduced operator is
//! `[[0, −i(∂x + g)], [−i(∂x − g), 0]]`, `g = k_y + 2δ tanh(x/2δ)`.

use std::fmt;

use rayon::prelude::*;

use crate::algebra::{Epsilon, Point, Potential2x2, Potential4x4, ReductionParams, ScalarField, C64};
use crate::error::{Error, Result};
use crate::models::jacobi::{jacobi, jacobi_derivative};
use crate::numerics::grid::{Axis, Grid, Grid1D};
use crate::numerics::sampled::{Jet, SampledSpinor, SpinorField};
use crate::reduction::{assemble, DisorderComponents, ReducedPair};

/// Slack on `n` against `4δ²`, which is rarely an exact float.
pub const BAND_EDGE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoschlTellerParams {
    pub delta: f64,
    pub k_y: f64,
    pub n: usize,
}

impl PoschlTellerParams {
    pub fn new(delta: f64, k_y: f64, n: usize) -> Self {
        Self { delta, k_y, n }
    }

    /// `4δ² − n`.
    fn gap(&self) -> f64 {
        4.0 * self.delta * self.delta - self.n as f64
    }
}

/// Sign of the energy branch: `+E_n` or its partner `−E_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Positive,
    Negative,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Positive => 1.0,
            Branch::Negative => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Admissibility {
    Admissible,
    /// `n = 4δ²` at `k_y = 0`: inside the closed index range, but the level
    /// sits on the continuum edge and the mode is not square integrable.
    Boundary {
        reason: String,
    },
    NotAdmissible {
        reason: String,
    },
}

impl Admissibility {
    pub fn is_admissible(&self) -> bool {
        matches!(self, Admissibility::Admissible)
    }

    pub fn reason(&self) -> Option<&str> {
        match self {
            Admissibility::Admissible => None,
            Admissibility::Boundary { reason } | Admissibility::NotAdmissible { reason } => Some(reason),
        }
    }
}

impl fmt::Display for Admissibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Admissibility::Admissible => f.write_str("admissible"),
            Admissibility::Boundary { reason } => write!(f, "boundary: {reason}"),
            Admissibility::NotAdmissible { reason } => write!(f, "not admissible: {reason}"),
        }
    }
}

/// `E_n²` from the closed form, `None` where the denominator `4δ² − n`
/// vanishes at nonzero `k_y`.
fn energy_squared(p: &PoschlTellerParams) -> Option<f64> {
    let n = p.n as f64;
    let d2 = p.delta * p.delta;
    let first = 2.0 * (n - n * n / (8.0 * d2));
    let gap = p.gap();
    let ratio = if gap.abs() <= BAND_EDGE_TOL {
        if p.k_y == 0.0 {
            0.0
        } else {
            return None;
        }
    } else {
        2.0 * p.delta * p.k_y / gap
    };
    Some(first * (1.0 - ratio * ratio))
}

/// The closed-form level without admissibility checks; `NaN` where the
/// formula has no real value.
pub fn pt_energy_formula(p: &PoschlTellerParams) -> f64 {
    energy_squared(p).map_or(f64::NAN, f64::sqrt)
}

/// Exponents `(σ, ρ)` of `((1+z)/2)^σ ((1−z)/2)^ρ` consistent with the
/// eigenvalue equation. Unlike the square-root forms these carry a sign,
/// and a negative one marks a level that is not normalizable.
pub fn pt_exponents(p: &PoschlTellerParams) -> (f64, f64) {
    let gap = p.gap();
    let shift = 8.0 * p.delta.powi(3) * p.k_y / gap;
    (0.5 * (gap - shift), 0.5 * (gap + shift))
}

/// Checks the index range, the momentum range, the reality of the level
/// and the decay exponents, in that order.
pub fn pt_admissible(p: &PoschlTellerParams) -> Admissibility {
    let bad = |reason: String| Admissibility::NotAdmissible { reason };
    if !(p.delta > 0.0 && p.delta.is_finite()) {
        return bad(format!("δ = {} must be positive", p.delta));
    }
    if !p.k_y.is_finite() {
        return bad(format!("k_y = {} must be finite", p.k_y));
    }
    let edge = 4.0 * p.delta * p.delta;
    if p.n as f64 > edge + BAND_EDGE_TOL {
        return bad(format!("n > 4δ² (n = {}, 4δ² = {edge})", p.n));
    }
    if p.k_y.abs() >= 2.0 * p.delta {
        return bad(format!("|k_y| ≥ 2δ (|k_y| = {}, 2δ = {})", p.k_y.abs(), 2.0 * p.delta));
    }
    if p.gap().abs() <= BAND_EDGE_TOL {
        return if p.k_y == 0.0 {
            Admissibility::Boundary {
                reason: format!("n = 4δ² = {edge}: level E = 2δ on the continuum edge"),
            }
        } else {
            bad("n = 4δ² with k_y ≠ 0: the level formula is singular".into())
        };
    }
    let e2 = energy_squared(p).expect("gap is nonzero");
    if e2 < 0.0 {
        return bad(format!("E_n² = {e2} < 0"));
    }
    let e = e2.sqrt();
    let (lo, hi) = ((p.k_y - 2.0 * p.delta).abs(), (p.k_y + 2.0 * p.delta).abs());
    if lo <= e {
        return bad(format!("|k_y − 2δ| ≤ |E_n| ({lo} ≤ {e})"));
    }
    if hi <= e {
        return bad(format!("|k_y + 2δ| ≤ |E_n| ({hi} ≤ {e})"));
    }
    let (sigma, rho) = pt_exponents(p);
    if sigma <= 0.0 || rho <= 0.0 {
        return bad(format!(
            "spurious level: decay exponents σ = {sigma}, ρ = {rho} are not both positive, the mode is not square integrable"
        ));
    }
    Admissibility::Admissible
}

/// `±E_n` for an admissible or boundary parameter set.
pub fn pt_energy(p: &PoschlTellerParams, branch: Branch) -> Result<f64> {
    match pt_admissible(p) {
        Admissibility::NotAdmissible { reason } => Err(Error::NotAdmissible(reason)),
        _ => Ok(branch.sign() * pt_energy_formula(p)),
    }
}

/// Unnormalized closed-form mode with analytic derivatives.
#[derive(Debug, Clone, Copy)]
pub struct PtMode {
    pub params: PoschlTellerParams,
    pub energy: f64,
    sigma: f64,
    rho: f64,
    /// Whether the value carries the `e^{i k_y y}` factor.
    transverse: bool,
}

impl PtMode {
    pub fn new(p: &PoschlTellerParams, branch: Branch) -> Result<Self> {
        match pt_admissible(p) {
            Admissibility::Admissible => {}
            other => {
                return Err(Error::NotAdmissible(other.reason().unwrap_or_default().to_string()));
            }
        }
        if p.n == 0 {
            return Err(Error::ZeroEnergyMode);
        }
        let energy = branch.sign() * pt_energy_formula(p);
        let (sigma, rho) = pt_exponents(p);
        Ok(Self {
            params: *p,
            energy,
            sigma,
            rho,
            transverse: true,
        })
    }

    /// Drop the `e^{i k_y y}` factor, for models where `k_y` is a coupling.
    pub fn without_transverse_phase(mut self) -> Self {
        self.transverse = false;
        self
    }

    /// `[ψ1, ψ2]` and `[∂xψ1, ∂xψ2]` without the plane-wave factor.
    pub fn profile(&self, x: f64) -> ([C64; 2], [C64; 2]) {
        let PoschlTellerParams { delta, k_y, n } = self.params;
        let (sigma, rho) = (self.sigma, self.rho);
        let s = x / delta;
        // ln A = −ln(1 + e^{−s}), ln B = −ln(1 + e^{s}).
        let (ln_a, ln_b) = (-softplus(-s), -softplus(s));
        let (a, b) = (ln_a.exp(), ln_b.exp());
        let z = (0.5 * s).tanh();
        let w = (sigma * ln_a + rho * ln_b).exp();
        let (al, be) = (2.0 * rho, 2.0 * sigma);
        let pn = jacobi(n, al, be, z);
        let pz = jacobi_derivative(1, n, al, be, z);
        let pzz = jacobi_derivative(2, n, al, be, z);
        let l1 = (sigma * b - rho * a) / delta;
        let l2 = -(sigma + rho) * a * b / (delta * delta);
        let zx = 2.0 * a * b / delta;
        let zxx = -z * 4.0 * a * b / (2.0 * delta * delta);
        let g = k_y + 2.0 * delta * z;
        let gx = 4.0 * a * b;
        let f = w * pn;
        let fx = w * (l1 * pn + pz * zx);
        let fxx = w * ((l1 * l1 + l2) * pn + 2.0 * l1 * pz * zx + pzz * zx * zx + pz * zxx);
        let c = C64::new(0.0, -1.0 / self.energy);
        let upper = c * (fx + g * f);
        let upper_x = c * (fxx + gx * f + g * fx);
        ([upper, C64::new(f, 0.0)], [upper_x, C64::new(fx, 0.0)])
    }
}

fn softplus(u: f64) -> f64 {
    u.max(0.0) + (-u.abs()).exp().ln_1p()
}

impl SpinorField<2> for PtMode {
    fn jet(&self, p: Point) -> Jet<2> {
        let (v, vx) = self.profile(p.x);
        let ky = if self.transverse { self.params.k_y } else { 0.0 };
        let phase = C64::from_polar(1.0, ky * p.y - self.energy * p.t);
        let mut j = Jet::zero();
        for c in 0..2 {
            j.value[c] = phase * v[c];
            j.dx[c] = phase * vx[c];
            j.dy[c] = C64::new(0.0, ky) * j.value[c];
            j.dt[c] = C64::new(0.0, -self.energy) * j.value[c];
        }
        j
    }

    fn k_y(&self) -> Option<f64> {
        self.transverse.then_some(self.params.k_y)
    }

    fn energy(&self) -> Option<f64> {
        Some(self.energy)
    }
}

/// The mode sampled on `grid`, normalized to unit quadrature norm.
pub fn pt_mode(p: &PoschlTellerParams, branch: Branch, grid: &Grid1D) -> Result<SampledSpinor> {
    let mode = PtMode::new(p, branch)?;
    Ok(SampledSpinor::from_field(&mode, &Grid::line(Axis::X, *grid)).normalized())
}

/// Reduced potential with the coupling along `axis`: `−2iδ tanh(x/2δ)` for
/// `X`, the real `−2δ tanh(y/2δ)` for `Y`.
pub fn pt_potential(delta: f64, axis: Axis) -> Result<Potential2x2> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!("δ = {delta} must be positive")));
    }
    let b = match axis {
        Axis::X => ScalarField::new(move |p| C64::new(0.0, -2.0 * delta * (p.x / (2.0 * delta)).tanh())),
        Axis::Y => ScalarField::real(move |p| -2.0 * delta * (p.y / (2.0 * delta)).tanh()),
        Axis::T => {
            return Err(Error::InvalidParameter("the coupling varies in x or y".into()));
        }
    };
    Potential2x2::new(ScalarField::zero(), b, ScalarField::zero())
}

/// Levels `(n, k_y, E_n)` at every admissible point, ordered by `k_y` then `n`.
pub fn pt_band_structure(delta: f64, ns: &[usize], k_ys: &[f64]) -> Vec<(usize, f64, f64)> {
    k_ys.par_iter()
        .map(|&k_y| {
            ns.iter()
                .filter_map(|&n| {
                    let p = PoschlTellerParams::new(delta, k_y, n);
                    pt_admissible(&p)
                        .is_admissible()
                        .then(|| (n, k_y, pt_energy_formula(&p)))
                })
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Disorder potential of the pair (coupling along x with `δ1`, along y with
/// `δ2`) with its printed components.
#[derive(Clone, Debug)]
pub struct PtDisorder {
    pub pair: ReducedPair,
    /// `assemble()` of the pair.
    pub potential: Potential4x4,
    /// `V, V', W_A, W_B` from their closed forms; the rest vanish.
    pub components: DisorderComponents,
}

pub fn pt_disorder_potential(delta1: f64, delta2: f64, params: &ReductionParams) -> Result<PtDisorder> {
    if params.epsilon != Epsilon::Minus {
        return Err(Error::SchemeMismatch("disorder schemes require ε = −1".into()));
    }
    let pair = ReducedPair {
        first: pt_potential(delta1, Axis::X)?,
        second: pt_potential(delta2, Axis::Y)?,
        params: *params,
    };
    let (s, c) = params.tau.sin_cos();
    let (c2, s2, s2t) = (c * c, s * s, (2.0 * params.tau).sin());
    let phi = params.phi;
    let tx = move |p: Point| (p.x / (2.0 * delta1)).tanh();
    let ty = move |p: Point| (p.y / (2.0 * delta2)).tanh();
    let w_a =
        move |p: Point| C64::new(0.0, 1.0) * C64::from_polar(s2t, -phi) * C64::new(delta1 * tx(p), delta2 * ty(p));
    let components = DisorderComponents {
        v_a: ScalarField::zero(),
        v_b: ScalarField::zero(),
        v: ScalarField::new(move |p| C64::new(-2.0 * delta2 * s2 * ty(p), -2.0 * delta1 * c2 * tx(p))),
        v_prime: ScalarField::new(move |p| C64::new(2.0 * delta2 * c2 * ty(p), -2.0 * delta1 * s2 * tx(p))),
        w_a: ScalarField::new(w_a),
        w_b: ScalarField::new(move |p| -C64::from_polar(1.0, -2.0 * phi) * w_a(p).conj()),
        w_plus: ScalarField::zero(),
        w_minus: ScalarField::zero(),
    };
    Ok(PtDisorder {
        potential: assemble(&pair),
        pair,
        components,
    })
}

/// Continuum edge `min(|k_y − 2δ|, |k_y + 2δ|)`.
pub fn continuum_edge(delta: f64, k_y: f64) -> f64 {
    (k_y - 2.0 * delta).abs().min((k_y + 2.0 * delta).abs())
}
