//! Builds the selected model, its grid and reduction from a config.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};
use std::str::FromStr;

use dirac_reduce::algebra::{Point, Potential2x2, ScalarField};
use dirac_reduce::models::{
    crossed_comb_mode, crossed_comb_potential, crossed_comb_reducible, pt_admissible, pt_disorder_potential, pt_mode,
    pt_potential, scenario2_model, soliton_bispinors, soliton_pair, soliton_potential, Admissibility, Branch,
    CrossedCombParams, CrossedCombReducible, PoschlTellerParams, PtDisorder, Scenario2Model, SolitonParams,
};
use dirac_reduce::numerics::{Axis, Grid, Grid1D, KineticConvention, SampledBispinor, SampledSpinor, Scheme};
use dirac_reduce::{assemble, lift, Epsilon, Potential4x4, ReducedPair, ReductionParams, C64};

use crate::config::{
    AxisSpec, ComplexProfileSpec, CustomSpec, LoadedConfig, ModelKind, PoschlTellerSpec, ProfileSpec, ReducedSpec,
    Scenario2Spec, TermSpec,
};
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub residual: f64,
    pub spectrum: f64,
    pub identity: f64,
    pub expectation: f64,
}

pub enum Detail {
    PoschlTeller {
        spec: PoschlTellerSpec,
        disorder: PtDisorder,
        scheme: Scheme,
    },
    CrossedCombs {
        reducible: CrossedCombReducible,
    },
    Soliton {
        params: SolitonParams,
        delta: f64,
    },
    Scenario2 {
        model: Box<Scenario2Model>,
    },
    Custom,
}

pub struct Setup {
    pub kind: ModelKind,
    pub pair: ReducedPair,
    /// The catalog's own construction of the 4×4 potential.
    pub potential: Potential4x4,
    pub kinetic: KineticConvention,
    pub grid: Grid,
    pub tol: Tolerances,
    pub detail: Detail,
}

/// A reduced solution with the equation it solves, and its lift.
pub struct ModelState {
    pub name: String,
    pub reduced: Option<ReducedState>,
    pub lifted: SampledBispinor,
}

pub struct ReducedState {
    pub spinor: SampledSpinor,
    pub potential: Potential2x2,
    pub energy: f64,
}

fn config_err(cfg: &LoadedConfig, message: impl Into<String>) -> CliError {
    CliError::Config {
        path: cfg.path.clone(),
        message: message.into(),
    }
}

fn axis_grid(name: &str, spec: Option<AxisSpec>, default: Grid1D) -> CliResult<Grid1D> {
    match spec {
        None => Ok(default),
        Some(a) => Grid1D::new(a.min, a.max, a.n).map_err(|e| CliError::Params(format!("grid axis {name}: {e}"))),
    }
}

/// Grid over `axes`, rejecting axes the model does not use.
fn build_grid(cfg: &LoadedConfig, axes: &[(Axis, Grid1D)]) -> CliResult<Grid> {
    let spec = cfg.config.grid.clone().unwrap_or_default();
    for (name, given) in [
        ("x", spec.x.is_some()),
        ("y", spec.y.is_some()),
        ("t", spec.t.is_some()),
    ] {
        if given && !axes.iter().any(|(a, _)| a.name() == name) {
            return Err(config_err(
                cfg,
                format!("model '{}' has no grid axis '{name}'", cfg.config.model.name()),
            ));
        }
    }
    let pick = |a: Axis| match a {
        Axis::X => spec.x,
        Axis::Y => spec.y,
        Axis::T => spec.t,
    };
    let resolved: Vec<(Axis, Grid1D)> = axes
        .iter()
        .map(|&(a, d)| Ok((a, axis_grid(a.name(), pick(a), d)?)))
        .collect::<CliResult<_>>()?;
    match resolved.as_slice() {
        [one] => Ok(Grid::line(one.0, one.1)),
        [a, b] => Grid::plane(*a, *b).map_err(CliError::from),
        _ => unreachable!("models use one or two axes"),
    }
}

fn custom_axes(cfg: &LoadedConfig) -> Vec<(Axis, Grid1D)> {
    let spec = cfg.config.grid.clone().unwrap_or_default();
    let default = Grid1D::symmetric(10.0, 201).expect("valid default");
    let mut axes = Vec::new();
    for (a, s) in [(Axis::T, spec.t), (Axis::X, spec.x), (Axis::Y, spec.y)] {
        if s.is_some() {
            axes.push((a, default));
        }
    }
    if axes.is_empty() {
        axes.push((Axis::X, default));
    }
    axes
}

/// Resolve `(τ, φ, ε)`, enforcing values a model fixes.
fn reduction(
    cfg: &LoadedConfig,
    fixed_tau: Option<f64>,
    fixed_eps: Option<Epsilon>,
    default_tau: Option<f64>,
    default_phi: f64,
) -> CliResult<ReductionParams> {
    let r = &cfg.config.reduction;
    let model = cfg.config.model.name();
    let eps = match (r.epsilon, fixed_eps) {
        (Some(e), fixed) => {
            let e = Epsilon::try_from(e).map_err(CliError::from)?;
            if let Some(f) = fixed {
                if e != f {
                    return Err(CliError::Params(format!(
                        "model '{model}' fixes ε = {f}, config gives {e}"
                    )));
                }
            }
            e
        }
        (None, Some(f)) => f,
        (None, None) => return Err(config_err(cfg, "[reduction] epsilon is required for this model")),
    };
    let tau = match (r.tau, fixed_tau) {
        (Some(t), Some(f)) if (t - f).abs() > 1e-15 => {
            return Err(CliError::Params(format!(
                "model '{model}' fixes τ = {f}, config gives {t}"
            )));
        }
        (Some(t), _) => t,
        (None, Some(f)) => f,
        (None, None) => default_tau.ok_or_else(|| config_err(cfg, "[reduction] tau is required for this model"))?,
    };
    let phi = r.phi.unwrap_or(default_phi);
    if !(tau.is_finite() && phi.is_finite()) {
        return Err(CliError::Params(format!("τ = {tau} and φ = {phi} must be finite")));
    }
    Ok(ReductionParams::new(tau, phi, eps))
}

fn term_field(cfg: &LoadedConfig, t: &TermSpec) -> CliResult<ScalarField> {
    let axis = t.axis.clone().unwrap_or_else(|| "x".into());
    let coord: fn(Point) -> f64 = match axis.as_str() {
        "x" => |p| p.x,
        "y" => |p| p.y,
        "t" => |p| p.t,
        other => return Err(config_err(cfg, format!("unknown axis '{other}' in profile term"))),
    };
    let shape: fn(f64) -> f64 = match t.shape.as_str() {
        "const" => |_| 1.0,
        "tanh" => f64::tanh,
        "sech2" => |u| 1.0 / u.cosh().powi(2),
        "gauss" => |u| (-u * u).exp(),
        "sin" => f64::sin,
        "cos" => f64::cos,
        other => {
            return Err(config_err(
                cfg,
                format!("unknown shape '{other}' (expected const, tanh, sech2, gauss, sin, cos)"),
            ))
        }
    };
    let (amp, scale, shift) = (t.amplitude, t.scale.unwrap_or(1.0), t.shift.unwrap_or(0.0));
    if scale == 0.0 || !(amp.is_finite() && scale.is_finite() && shift.is_finite()) {
        return Err(CliError::Params(format!(
            "profile term needs finite amplitude, shift and nonzero scale, got ({amp}, {scale}, {shift})"
        )));
    }
    Ok(ScalarField::real(move |p| amp * shape((coord(p) - shift) / scale)))
}

pub fn profile_field(cfg: &LoadedConfig, spec: &ProfileSpec) -> CliResult<ScalarField> {
    match spec {
        ProfileSpec::Constant(c) if *c == 0.0 => Ok(ScalarField::zero()),
        ProfileSpec::Constant(c) => Ok(ScalarField::real_constant(*c)),
        ProfileSpec::Terms(terms) => {
            let mut acc = ScalarField::zero();
            for t in terms {
                acc = (&acc + &term_field(cfg, t)?).into_hermitian_entry();
            }
            Ok(acc)
        }
    }
}

pub fn complex_field(cfg: &LoadedConfig, spec: &ComplexProfileSpec) -> CliResult<ScalarField> {
    let (re, im) = (profile_field(cfg, &spec.re)?, profile_field(cfg, &spec.im)?);
    if im.is_zero() {
        return Ok(re);
    }
    Ok(&re + &im.scale(C64::new(0.0, 1.0)))
}

fn reduced_potential(cfg: &LoadedConfig, spec: &ReducedSpec) -> CliResult<Potential2x2> {
    Potential2x2::new(
        profile_field(cfg, &spec.a)?,
        complex_field(cfg, &spec.b)?,
        profile_field(cfg, &spec.d)?,
    )
    .map_err(CliError::from)
}

pub fn branch(cfg: &LoadedConfig, s: &Option<String>) -> CliResult<Branch> {
    match s.as_deref() {
        None | Some("positive") => Ok(Branch::Positive),
        Some("negative") => Ok(Branch::Negative),
        Some(other) => Err(config_err(
            cfg,
            format!("branch must be 'positive' or 'negative', got '{other}'"),
        )),
    }
}

pub fn build(cfg: &LoadedConfig) -> CliResult<Setup> {
    let c = &cfg.config;
    let t = &c.tolerance;
    let mut tol = Tolerances {
        residual: t.residual.unwrap_or(1e-8),
        spectrum: t.spectrum.unwrap_or(1e-3),
        identity: t.identity.unwrap_or(1e-12),
        expectation: t.expectation.unwrap_or(1e-10),
    };
    let sym = |w: f64, n: usize| Grid1D::symmetric(w, n).map_err(CliError::from);
    match c.model {
        ModelKind::PoschlTeller => {
            let spec = cfg.section(&c.poschl_teller)?.clone();
            let params = reduction(cfg, None, Some(Epsilon::Minus), Some(FRAC_PI_4), FRAC_PI_4)?;
            let delta2 = spec.delta2.unwrap_or(FRAC_1_SQRT_2);
            let disorder = pt_disorder_potential(spec.delta, delta2, &params)?;
            let scheme = match &spec.scheme {
                None => Scheme::Staggered,
                Some(s) => Scheme::from_str(s).map_err(|e| config_err(cfg, e.to_string()))?,
            };
            let half = 40.0 * spec.delta;
            let grid = build_grid(cfg, &[(Axis::X, sym(half, 2001)?)])?;
            Ok(Setup {
                kind: c.model,
                pair: disorder.pair.clone(),
                potential: disorder.potential.clone(),
                kinetic: KineticConvention::Standard,
                grid,
                tol,
                detail: Detail::PoschlTeller { spec, disorder, scheme },
            })
        }
        ModelKind::CrossedCombs => {
            let s = *cfg.section(&c.crossed_combs)?;
            let params = reduction(cfg, Some(FRAC_PI_4), Some(Epsilon::Minus), None, 0.0)?;
            let p1 = CrossedCombParams::new(s.m1, s.omega1)?;
            let p2 = CrossedCombParams::new(s.m2, s.omega2)?;
            let reducible = crossed_comb_reducible(&p1, &p2, params.phi)?;
            let grid = build_grid(cfg, &[(Axis::X, sym(8.0, 161)?), (Axis::Y, sym(8.0, 161)?)])?;
            Ok(Setup {
                kind: c.model,
                pair: reducible.pair.clone(),
                potential: reducible.potential.clone(),
                kinetic: KineticConvention::Standard,
                grid,
                tol,
                detail: Detail::CrossedCombs { reducible },
            })
        }
        ModelKind::Soliton => {
            let s = *cfg.section(&c.soliton)?;
            let params = reduction(cfg, Some(FRAC_PI_4), Some(Epsilon::Plus), None, 0.0)?;
            let p = SolitonParams::new(s.m, s.omega)?;
            if !s.delta.is_finite() {
                return Err(CliError::Params(format!("Δ = {} must be finite", s.delta)));
            }
            let grid = build_grid(cfg, &[(Axis::T, sym(3.0, 61)?), (Axis::X, sym(30.0, 1201)?)])?;
            Ok(Setup {
                kind: c.model,
                pair: soliton_pair(&p, s.delta, params.phi)?,
                potential: soliton_potential(&p, s.delta, params.phi),
                kinetic: KineticConvention::Longitudinal,
                grid,
                tol,
                detail: Detail::Soliton {
                    params: p,
                    delta: s.delta,
                },
            })
        }
        ModelKind::Scenario2 => {
            let s: &Scenario2Spec = cfg.section(&c.scenario2)?;
            let params = reduction(cfg, Some(FRAC_PI_4), Some(Epsilon::Plus), None, 0.0)?;
            let model = scenario2_model(s.delta, s.k_y, s.v2, s.n, branch(cfg, &s.branch)?, params.phi)?;
            if t.residual.is_none() {
                tol.residual = 1e-6;
            }
            let grid = build_grid(cfg, &[(Axis::X, sym(40.0 * s.delta, 2001)?)])?;
            Ok(Setup {
                kind: c.model,
                pair: model.pair.clone(),
                potential: model.potential(),
                kinetic: KineticConvention::Longitudinal,
                grid,
                tol,
                detail: Detail::Scenario2 { model: Box::new(model) },
            })
        }
        ModelKind::Custom => {
            let s: &CustomSpec = cfg.section(&c.custom)?;
            let params = reduction(cfg, None, None, None, 0.0)?;
            let pair = ReducedPair {
                first: reduced_potential(cfg, &s.first)?,
                second: reduced_potential(cfg, &s.second)?,
                params,
            };
            let kinetic = match &s.kinetic {
                None => KineticConvention::Standard,
                Some(k) => KineticConvention::from_str(k).map_err(|e| config_err(cfg, e.to_string()))?,
            };
            let grid = build_grid(cfg, &custom_axes(cfg))?;
            Ok(Setup {
                kind: c.model,
                potential: assemble(&pair),
                pair,
                kinetic,
                grid,
                tol,
                detail: Detail::Custom,
            })
        }
    }
}

/// Admissibility of every configured `(k_y, n)`, failing on the first
/// violation.
pub fn pt_points(spec: &PoschlTellerSpec) -> CliResult<Vec<PoschlTellerParams>> {
    let mut out = Vec::new();
    for &k_y in &spec.k_y {
        for &n in &spec.n {
            let p = PoschlTellerParams::new(spec.delta, k_y, n);
            match pt_admissible(&p) {
                Admissibility::NotAdmissible { reason } => {
                    return Err(CliError::Params(format!(
                        "δ = {}, k_y = {k_y}, n = {n}: {reason}",
                        spec.delta
                    )));
                }
                _ => out.push(p),
            }
        }
    }
    Ok(out)
}

/// Closed-form states of the model, lifted into the 4×4 problem.
pub fn states(setup: &Setup) -> CliResult<Vec<ModelState>> {
    let params = setup.pair.params;
    let upper = |s: &SampledSpinor| lift(Some(s), None, &params).0.expect("upper channel");
    let lower = |s: &SampledSpinor| lift(None, Some(s), &params).1.expect("lower channel");
    match &setup.detail {
        Detail::PoschlTeller { spec, .. } => {
            let (_, g) = setup.grid.axis_grid(Axis::X).expect("x axis");
            let mut out = Vec::new();
            for (ik, p) in pt_points(spec)?.into_iter().enumerate() {
                if p.n == 0 || !pt_admissible(&p).is_admissible() {
                    continue;
                }
                let psi = pt_mode(&p, Branch::Positive, &g)?;
                let energy = psi.energy.expect("stationary");
                out.push(ModelState {
                    name: format!("psi_n{}_ky{}", p.n, ik / spec.n.len().max(1)),
                    lifted: upper(&psi),
                    reduced: Some(ReducedState {
                        spinor: psi,
                        potential: pt_potential(spec.delta, Axis::X)?,
                        energy,
                    }),
                });
            }
            Ok(out)
        }
        Detail::CrossedCombs { reducible } => {
            let psi = crossed_comb_mode(&reducible.first, Axis::X, &setup.grid)?;
            let xi = crossed_comb_mode(&reducible.second, Axis::Y, &setup.grid)?;
            Ok(vec![
                ModelState {
                    name: "Psi".into(),
                    lifted: upper(&psi),
                    reduced: Some(ReducedState {
                        potential: crossed_comb_potential(&reducible.first, Axis::X)?,
                        energy: reducible.first.m,
                        spinor: psi,
                    }),
                },
                ModelState {
                    name: "Xi".into(),
                    lifted: lower(&xi),
                    reduced: Some(ReducedState {
                        potential: crossed_comb_potential(&reducible.second, Axis::Y)?,
                        energy: reducible.second.m,
                        spinor: xi,
                    }),
                },
            ])
        }
        Detail::Soliton { params: p, .. } => {
            let (a, b) = soliton_bispinors(p, params.phi, &setup.grid)?;
            Ok(vec![
                ModelState {
                    name: "Psi1".into(),
                    reduced: None,
                    lifted: a,
                },
                ModelState {
                    name: "Psi2".into(),
                    reduced: None,
                    lifted: b,
                },
            ])
        }
        Detail::Scenario2 { model } => {
            let (_, g) = setup.grid.axis_grid(Axis::X).expect("x axis");
            let (psi, xi) = model.sample(&g);
            Ok(vec![
                ModelState {
                    name: "Psi".into(),
                    lifted: upper(&psi),
                    reduced: Some(ReducedState {
                        potential: model.pair.first.clone(),
                        energy: model.energy_psi,
                        spinor: psi,
                    }),
                },
                ModelState {
                    name: "Xi".into(),
                    lifted: lower(&xi),
                    reduced: Some(ReducedState {
                        potential: model.pair.second.clone(),
                        energy: model.energy_xi,
                        spinor: xi,
                    }),
                },
            ])
        }
        Detail::Custom => Ok(Vec::new()),
    }
}
