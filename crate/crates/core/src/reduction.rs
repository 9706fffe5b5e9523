//! Assembly of reducible 4x4 potentials from pairs of 2x2 problems, the
//! inverse map, and the lifting of reduced solutions.
//!
//! With `T = R (U ⊗ I)` the assembled potential is `T blockdiag(V1, V2) T†`.
//! [`assemble_point`] writes out its ten independent entries explicitly; the
//! conjugation is kept as the test oracle.

use std::f64::consts::FRAC_PI_4;

use rayon::prelude::*;

use crate::algebra::{
    total_transform, Epsilon, Mat2, Mat4, Point, Potential2x2, Potential4x4, ReductionParams, ScalarField, C64,
    HERMITIAN_TOL, ZERO,
};
use crate::error::{Error, Result, Violation};
use crate::numerics::quadrature::quadrature;
use crate::numerics::sampled::{SampledBispinor, SampledSpinor};

/// Relative constraint tolerance of [`detect`].
pub const TOL_DETECT: f64 = 1e-8;
/// `|sin 2τ|` below this marks the unidentifiable angle branch.
pub const TOL_DEGENERATE: f64 = 1e-6;
/// Sampled tolerance for the constraints of a disorder scheme.
pub const TOL_SCHEME: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct ReducedPair {
    pub first: Potential2x2,
    pub second: Potential2x2,
    pub params: ReductionParams,
}

/// Entries `v1..v4` of the off-diagonal block `B` of `δV = [[0, B], [B†, 0]]`.
#[derive(Clone, Debug)]
pub struct PerturbationBlock {
    pub v1: ScalarField,
    pub v2: ScalarField,
    pub v3: ScalarField,
    pub v4: ScalarField,
}

/// The six free entries of a reducible potential after the phase `e^{iφ}`
/// has been stripped from the cross block. `v11, v22, v14, v23` are real.
#[derive(Clone, Debug)]
pub struct FixedFormComponents {
    pub v11: ScalarField,
    pub v12: ScalarField,
    pub v13: ScalarField,
    pub v14: ScalarField,
    pub v22: ScalarField,
    pub v23: ScalarField,
}

fn entries_at(v: &Mat2) -> (f64, C64, f64) {
    (v[(0, 0)].re, v[(0, 1)], v[(1, 1)].re)
}

/// Assembled potential at one point, entry by entry.
pub fn assemble_point(v1: &Mat2, v2: &Mat2, params: &ReductionParams) -> Mat4 {
    let tr = params.trig();
    let (a1, b1, d1) = entries_at(v1);
    let (a2, b2, d2) = entries_at(v2);
    let (c2, s2, eps) = (tr.cos2, tr.sin2, tr.eps);
    let half = 0.5 * tr.sin_2tau * tr.phase.conj();

    let m11 = C64::from(c2 * a1 + s2 * a2);
    let m12 = b1 * c2 + b2 * s2;
    let m13 = half * eps * (b1 - b2);
    let m14 = half * (a1 - a2);
    let m22 = C64::from(c2 * d1 + s2 * d2);
    let m23 = half * eps * (d1 - d2);
    let m24 = half * (b1 - b2).conj();
    let m33 = C64::from(s2 * d1 + c2 * d2);
    let m34 = (b2 * c2 + b1 * s2).conj() * eps;
    let m44 = C64::from(s2 * a1 + c2 * a2);

    Mat4::new(
        m11,
        m12,
        m13,
        m14,
        m12.conj(),
        m22,
        m23,
        m24,
        m13.conj(),
        m23.conj(),
        m33,
        m34,
        m14.conj(),
        m24.conj(),
        m34.conj(),
        m44,
    )
}

/// The reducible 4x4 potential built from a pair of 2x2 potentials.
pub fn assemble(pair: &ReducedPair) -> Potential4x4 {
    let pair = pair.clone();
    Potential4x4::from_matrix_fn(move |p| assemble_point(&pair.first.at(p), &pair.second.at(p), &pair.params))
}

/// `T blockdiag(v1, v2) T†` computed by matrix products; the oracle for
/// [`assemble_point`].
pub fn conjugation_oracle(v1: &Mat2, v2: &Mat2, params: &ReductionParams) -> Mat4 {
    let t = total_transform(params);
    crate::algebra::conjugate(&t, &crate::algebra::block_diag(v1, v2))
}

fn phase_strip(m: &Mat4, params: &ReductionParams) -> [C64; 6] {
    let e = C64::from_polar(1.0, params.phi);
    [
        m[(0, 0)],
        m[(0, 1)],
        e * m[(0, 2)],
        e * m[(0, 3)],
        m[(1, 1)],
        e * m[(1, 2)],
    ]
}

/// Fixed-form components of a pointwise matrix at known `(τ, φ)`.
fn fixed_form_point(m: &Mat4, params: &ReductionParams) -> [C64; 6] {
    let [v11, v12, v13, v14, v22, v23] = phase_strip(m, params);
    [v11.re.into(), v12, v13, v14.re.into(), v22.re.into(), v23.re.into()]
}

/// Read the fixed-form components off an assembled potential.
pub fn fixed_form_of(v: &Potential4x4, params: &ReductionParams) -> FixedFormComponents {
    let comp = |k: usize, real: bool| {
        let (v, params) = (v.clone(), *params);
        let f = ScalarField::new(move |p| fixed_form_point(&v.at(p), &params)[k]);
        if real {
            f.into_hermitian_entry()
        } else {
            f
        }
    };
    FixedFormComponents {
        v11: comp(0, true),
        v12: comp(1, false),
        v13: comp(2, false),
        v14: comp(3, true),
        v22: comp(4, true),
        v23: comp(5, true),
    }
}

/// Potential with the fixed-form entry pattern: free entries from `c`,
/// the four dependent entries filled in from `(τ, φ, ε)`.
pub fn fixed_form_potential(c: &FixedFormComponents, params: &ReductionParams) -> Result<Potential4x4> {
    let s2t = (2.0 * params.tau).sin();
    if s2t.abs() < TOL_DEGENERATE {
        return Err(Error::DegenerateAngle(format!(
            "|sin 2τ| = {:.3e} leaves cot 2τ undefined",
            s2t.abs()
        )));
    }
    let c = c.clone();
    let params = *params;
    Ok(Potential4x4::from_matrix_fn(move |p| {
        let vals = [
            c.v11.at(p),
            c.v12.at(p),
            c.v13.at(p),
            c.v14.at(p),
            c.v22.at(p),
            c.v23.at(p),
        ];
        fixed_form_matrix(vals, &params)
    }))
}

fn fixed_form_matrix(v: [C64; 6], params: &ReductionParams) -> Mat4 {
    let [v11, v12, v13, v14, v22, v23] = v;
    let eps = params.epsilon.value();
    let cot = 1.0 / (2.0 * params.tau).tan();
    let em = C64::from_polar(1.0, -params.phi);
    let m13 = em * v13;
    let m14 = em * v14;
    let m23 = em * v23;
    let m24 = em * v13.conj() * eps;
    let m33 = v22 - v23 * (2.0 * eps * cot);
    let m44 = v11 - v14 * (2.0 * cot);
    let m43 = v12 * eps - v13 * (2.0 * cot);
    let mut m = Mat4::new(
        v11,
        v12,
        m13,
        m14,
        v12.conj(),
        v22,
        m23,
        m24,
        m13.conj(),
        m23.conj(),
        m33,
        m43.conj(),
        m14.conj(),
        m24.conj(),
        m43,
        m44,
    );
    for i in 0..4 {
        m[(i, i)].im = 0.0;
    }
    m
}

fn correction_vanishes(c: &FixedFormComponents) -> bool {
    c.v13.is_zero() && c.v14.is_zero() && c.v23.is_zero()
}

/// The pair of reduced potentials encoded by a fixed-form potential:
/// `base + ε tan τ · corr` and `base − ε cot τ · corr`, with
/// `base = [[V11, V12], [V12*, V22]]` and `corr = [[ε V14, V13], [V13*, V23]]`.
pub fn reduced_pair_from_fixed_form(c: &FixedFormComponents, params: &ReductionParams) -> Result<ReducedPair> {
    let base = Potential2x2::new(c.v11.clone(), c.v12.clone(), c.v22.clone())?;
    if correction_vanishes(c) {
        return Ok(ReducedPair {
            first: base.clone(),
            second: base,
            params: *params,
        });
    }
    let (s, co) = params.tau.sin_cos();
    if (2.0 * s * co).abs() < TOL_DEGENERATE {
        return Err(Error::DegenerateAngle(format!(
            "τ = {} puts tan τ or cot τ out of range with a nonzero correction",
            params.tau
        )));
    }
    let eps = params.epsilon.value();
    let member = |k: f64| -> Result<Potential2x2> {
        // base + k·corr, with corr diagonal (ε V14, V23).
        Potential2x2::new(
            &c.v11 + &(&c.v14 * (k * eps)),
            &c.v12 + &(&c.v13 * k),
            &c.v22 + &(&c.v23 * k),
        )
    };
    Ok(ReducedPair {
        first: member(eps * s / co)?,
        second: member(-eps * co / s)?,
        params: *params,
    })
}

fn reduced_pair_point(m: &Mat4, params: &ReductionParams) -> (Mat2, Mat2) {
    let [v11, v12, v13, v14, v22, v23] = fixed_form_point(m, params);
    let eps = params.epsilon.value();
    let (s, c) = params.tau.sin_cos();
    let member = |k: f64| {
        let a = v11 + v14 * (k * eps);
        let b = v12 + v13 * k;
        let d = v22 + v23 * k;
        Mat2::new(a, b, b.conj(), d)
    };
    (member(eps * s / c), member(-eps * c / s))
}

/// Outcome of a successful reducibility test.
#[derive(Clone, Debug)]
pub struct Detection {
    pub params: ReductionParams,
    pub pair: ReducedPair,
    /// Largest deviation of a per-point phase estimate from the mean, modulo π.
    pub phi_spread: f64,
    /// Largest relative constraint violation over the samples.
    pub max_violation: f64,
}

/// Pointwise outcome of [`detect_samples`].
#[derive(Clone, Debug)]
pub struct SampleDetection {
    pub params: ReductionParams,
    pub first: Vec<Mat2>,
    pub second: Vec<Mat2>,
    pub phi_spread: f64,
    pub max_violation: f64,
}

fn entry_scale(m: &Mat4) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn check_samples_hermitian(samples: &[Mat4]) -> Result<()> {
    for (k, m) in samples.iter().enumerate() {
        for i in 0..4 {
            for j in i..4 {
                let dev = (m[(i, j)] - m[(j, i)].conj()).norm();
                if dev >= HERMITIAN_TOL {
                    return Err(Error::NotHermitian {
                        point: k,
                        row: i,
                        col: j,
                        deviation: dev,
                    });
                }
            }
        }
    }
    Ok(())
}

fn wrap_pi(a: f64) -> f64 {
    a.rem_euclid(std::f64::consts::PI)
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Recover `(τ, φ)` and the reduced pair from sampled 4x4 matrices.
///
/// `φ` is returned in `[0, π)`; `(τ, φ + π, V1, V2)` describes the same
/// potential as `(π/2 − τ, φ, V2, V1)`. `τ` lies in `(0, π/2)`.
pub fn detect_samples(samples: &[Mat4], epsilon: Epsilon) -> Result<SampleDetection> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("detect needs at least one sample".into()));
    }
    check_samples_hermitian(samples)?;
    let eps = epsilon.value();
    let scales: Vec<f64> = samples.iter().map(|m| entry_scale(m).max(f64::MIN_POSITIVE)).collect();

    // z = e^{-2iφ} (V14² + V23² + |V13|²) at every point.
    let mut zsum = ZERO;
    let mut phases = Vec::new();
    for (m, s) in samples.iter().zip(&scales) {
        let z = m[(0, 3)] * m[(0, 3)] + m[(1, 2)] * m[(1, 2)] + m[(0, 2)] * m[(1, 3)] * eps;
        let zr = z / (s * s);
        if zr.norm() > 1e-16 {
            phases.push(wrap_pi(-zr.arg() / 2.0));
        }
        zsum += zr;
    }
    if zsum.norm() <= 1e-16 * samples.len() as f64 {
        return Err(Error::UnderdeterminedAngle);
    }
    let phi = wrap_pi(-zsum.arg() / 2.0);
    let phi_spread = phases
        .iter()
        .map(|p| {
            let d = wrap_pi(p - phi);
            d.min(std::f64::consts::PI - d)
        })
        .fold(0.0, f64::max);

    // cot 2τ from the three dependent-entry relations, median over points.
    let probe = ReductionParams::new(FRAC_PI_4, phi, epsilon);
    let mut cots = Vec::new();
    for (m, s) in samples.iter().zip(&scales) {
        let [v11, v12, v13, v14, v22, v23] = phase_strip(m, &probe);
        let lhs = [v23 * (2.0 * eps), v14 * 2.0, v13 * 2.0];
        let rhs = [v22 - m[(2, 2)], v11 - m[(3, 3)], v12 * eps - m[(3, 2)]];
        let den: f64 = lhs.iter().map(|a| a.norm_sqr()).sum();
        if den / (s * s) > 1e-16 {
            let num: f64 = lhs.iter().zip(&rhs).map(|(a, b)| (a.conj() * b).re).sum();
            cots.push(num / den);
        }
    }
    if cots.is_empty() {
        return Err(Error::UnderdeterminedAngle);
    }
    let cot = median(cots);
    let tau = 0.5 * f64::atan2(1.0, cot);
    if (2.0 * tau).sin() < TOL_DEGENERATE {
        return Err(Error::UnderdeterminedAngle);
    }
    let params = ReductionParams::new(tau, phi, epsilon);

    let per_point: Vec<(Mat2, Mat2, Violation)> = samples
        .par_iter()
        .zip(&scales)
        .enumerate()
        .map(|(k, (m, &s))| {
            let (v1, v2) = reduced_pair_point(m, &params);
            let rebuilt = assemble_point(&v1, &v2, &params);
            let mut worst = Violation {
                point: k,
                row: 0,
                col: 0,
                magnitude: 0.0,
                relative: 0.0,
            };
            for i in 0..4 {
                for j in 0..4 {
                    let d = (rebuilt[(i, j)] - m[(i, j)]).norm();
                    if d > worst.magnitude {
                        worst.row = i;
                        worst.col = j;
                        worst.magnitude = d;
                        worst.relative = d / s;
                    }
                }
            }
            (v1, v2, worst)
        })
        .collect();

    let worst = per_point
        .iter()
        .map(|(_, _, v)| v)
        .fold(None::<&Violation>, |acc, v| match acc {
            Some(a) if a.relative >= v.relative => Some(a),
            _ => Some(v),
        })
        .cloned()
        .expect("samples are nonempty");
    if worst.relative > TOL_DETECT {
        return Err(Error::NotReducible {
            violation: worst,
            phi_spread,
        });
    }
    let (first, second) = per_point.into_iter().map(|(a, b, _)| (a, b)).unzip();
    Ok(SampleDetection {
        params,
        first,
        second,
        phi_spread,
        max_violation: worst.relative,
    })
}

/// Test `v` for reducibility at the given sample points.
pub fn detect(v: &Potential4x4, epsilon: Epsilon, points: &[Point]) -> Result<Detection> {
    let samples: Vec<Mat4> = points.par_iter().map(|&p| v.at(p)).collect();
    let found = detect_samples(&samples, epsilon)?;
    let fixed = fixed_form_of(v, &found.params);
    let pair = reduced_pair_from_fixed_form(&fixed, &found.params)?;
    Ok(Detection {
        params: found.params,
        pair,
        phi_spread: found.phi_spread,
        max_violation: found.max_violation,
    })
}

/// Embed reduced solutions: `Ψ = T (ψ, 0)` and `Ξ = e^{iφ} T (0, ξ)`.
///
/// Components: `Ψ = (c ψ1, c ψ2, ε e^{iφ} s ψ2, e^{iφ} s ψ1)` and
/// `Ξ = (−s ξ1, −s ξ2, ε e^{iφ} c ξ2, e^{iφ} c ξ1)`. Analytic partials are
/// carried through.
pub fn lift(
    psi: Option<&SampledSpinor>,
    xi: Option<&SampledSpinor>,
    params: &ReductionParams,
) -> (Option<SampledBispinor>, Option<SampledBispinor>) {
    let tr = params.trig();
    let (c, s, eps, e) = (tr.cos, tr.sin, tr.eps, tr.phase);
    let upper = psi.map(|p| p.map_linear(|v| lift_psi_point(v, c, s, eps, e)));
    let lower = xi.map(|x| x.map_linear(|v| lift_xi_point(v, c, s, eps, e)));
    (upper, lower)
}

fn lift_psi_point(v: &[C64; 2], c: f64, s: f64, eps: f64, e: C64) -> [C64; 4] {
    [v[0] * c, v[1] * c, e * v[1] * (eps * s), e * v[0] * s]
}

fn lift_xi_point(v: &[C64; 2], c: f64, s: f64, eps: f64, e: C64) -> [C64; 4] {
    [v[0] * (-s), v[1] * (-s), e * v[1] * (eps * c), e * v[0] * c]
}

/// `T δV T†` at a point, with `δV = [[0, B], [B†, 0]]`, `B = [[v1, v2], [v3, v4]]`.
pub fn perturbation_lift_point(v: [C64; 4], params: &ReductionParams) -> Mat4 {
    let b = Mat2::new(v[0], v[1], v[2], v[3]);
    let mut dv = Mat4::zeros();
    dv.fixed_view_mut::<2, 2>(0, 2).copy_from(&b);
    dv.fixed_view_mut::<2, 2>(2, 0).copy_from(&b.adjoint());
    crate::algebra::conjugate(&total_transform(params), &dv)
}

/// The perturbation class with vanishing first-order energy shift on every
/// lifted state, brought into the reducible frame.
pub fn perturbation_lift(block: &PerturbationBlock, params: &ReductionParams) -> Potential4x4 {
    let (block, params) = (block.clone(), *params);
    Potential4x4::from_matrix_fn(move |p| {
        perturbation_lift_point(
            [block.v1.at(p), block.v2.at(p), block.v3.at(p), block.v4.at(p)],
            &params,
        )
    })
}

/// Quadrature of `Ψ† M Ψ` over the bispinor's grid.
pub fn expectation(psi: &SampledBispinor, m: &Potential4x4) -> Result<C64> {
    let points = psi.grid.points();
    if points.len() != psi.values.len() {
        return Err(Error::DimensionMismatch {
            expected: points.len(),
            found: psi.values.len(),
        });
    }
    let pointwise: Vec<C64> = points
        .par_iter()
        .zip(&psi.values)
        .map(|(&p, v)| {
            let mat = m.at(p);
            let mut acc = ZERO;
            for i in 0..4 {
                for j in 0..4 {
                    acc += v[i].conj() * mat[(i, j)] * v[j];
                }
            }
            acc
        })
        .collect();
    quadrature(&pointwise, &psi.grid)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DisorderScheme {
    /// `a1 = d2`, `a2 = d1`, general τ.
    Way1,
    /// `a1 = d1 + d2 − a2`, `τ = π/4`.
    Way2,
}

/// Named entries of the disorder Hamiltonian layout
/// `[[V_A, V, W_A, W+], [V*, V_B, W-, W_B], [W_A*, W-*, V_A, V'], [W+*, W_B*, V'*, V_B]]`.
///
/// `w_minus` equals `w_plus` under `Way1` only.
#[derive(Clone, Debug)]
pub struct DisorderComponents {
    pub v_a: ScalarField,
    pub v_b: ScalarField,
    pub v: ScalarField,
    pub v_prime: ScalarField,
    pub w_a: ScalarField,
    pub w_b: ScalarField,
    pub w_plus: ScalarField,
    pub w_minus: ScalarField,
}

fn check_constraint(name: &str, lhs: &ScalarField, rhs: &ScalarField, points: &[Point]) -> Result<()> {
    for &p in points {
        let (l, r) = (lhs.at(p), rhs.at(p));
        if (l - r).norm() > TOL_SCHEME * (1.0 + l.norm().max(r.norm())) {
            return Err(Error::SchemeMismatch(format!(
                "{name} violated at (x={}, y={}, t={}): {l} vs {r}",
                p.x, p.y, p.t
            )));
        }
    }
    Ok(())
}

/// Components of the disorder Hamiltonian from the printed closed forms of
/// each scheme. Scheme constraints are checked on `points`.
pub fn disorder_identify(pair: &ReducedPair, scheme: DisorderScheme, points: &[Point]) -> Result<DisorderComponents> {
    let params = pair.params;
    if params.epsilon != Epsilon::Minus {
        return Err(Error::SchemeMismatch("disorder schemes require ε = −1".into()));
    }
    let (a1, b1, d1) = (&pair.first.a, &pair.first.b, &pair.first.d);
    let (a2, b2, d2) = (&pair.second.a, &pair.second.b, &pair.second.d);
    let em = C64::from_polar(1.0, -params.phi);
    match scheme {
        DisorderScheme::Way1 => {
            check_constraint("a1 = d2", a1, d2, points)?;
            check_constraint("a2 = d1", a2, d1, points)?;
            let (s, c) = params.tau.sin_cos();
            let (c2, s2, s2t) = (c * c, s * s, (2.0 * params.tau).sin());
            let w_a = (b1 - b2).scale(em * (-0.5 * s2t));
            let w_plus = (d2 - d1).scale(em * (0.5 * s2t));
            Ok(DisorderComponents {
                v_a: &(d2 * c2) + &(d1 * s2),
                v_b: &(d1 * c2) + &(d2 * s2),
                v: &(b1 * c2) + &(b2 * s2),
                v_prime: -&(&(b2 * c2) + &(b1 * s2)).conj(),
                w_b: w_a.conj().scale(-em * em),
                w_a,
                w_minus: w_plus.clone(),
                w_plus,
            })
        }
        DisorderScheme::Way2 => {
            if (params.tau - FRAC_PI_4).abs() > TOL_SCHEME {
                return Err(Error::SchemeMismatch(format!(
                    "second scheme fixes τ = π/4, got {}",
                    params.tau
                )));
            }
            let d_sum = d1 + d2;
            check_constraint("a1 = d1 + d2 − a2", a1, &(&d_sum - a2), points)?;
            let b_sum = b1 + b2;
            let v_ab = &d_sum * 0.5;
            Ok(DisorderComponents {
                v_a: v_ab.clone(),
                v_b: v_ab,
                v: &b_sum * 0.5,
                v_prime: -&(&b_sum.conj() * 0.5),
                w_a: (b2 - b1).scale(em * 0.5),
                w_b: (b1 - b2).conj().scale(em * 0.5),
                w_plus: (&d_sum - &(a2 * 2.0)).scale(em * 0.5),
                w_minus: (d1 - d2).scale(em * -0.5),
            })
        }
    }
}

/// Place named components into the disorder Hamiltonian layout.
pub fn disorder_layout(c: &DisorderComponents) -> Potential4x4 {
    let c = c.clone();
    Potential4x4::from_matrix_fn(move |p| {
        let (va, vb, v, vp) = (c.v_a.at(p), c.v_b.at(p), c.v.at(p), c.v_prime.at(p));
        let (wa, wb, wp, wm) = (c.w_a.at(p), c.w_b.at(p), c.w_plus.at(p), c.w_minus.at(p));
        Mat4::new(
            va,
            v,
            wa,
            wp,
            v.conj(),
            vb,
            wm,
            wb,
            wa.conj(),
            wm.conj(),
            va,
            vp,
            wp.conj(),
            wb.conj(),
            vp.conj(),
            vb,
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{max_abs, random_hermitian2};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn params(tau: f64, phi: f64, eps: i32) -> ReductionParams {
        ReductionParams::new(tau, phi, Epsilon::try_from(eps).unwrap())
    }

    #[test]
    fn explicit_entries_match_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let p = params(
                rng.random_range(-4.0..4.0),
                rng.random_range(-4.0..4.0),
                if rng.random() { 1 } else { -1 },
            );
            let (v1, v2) = (random_hermitian2(&mut rng), random_hermitian2(&mut rng));
            let d = assemble_point(&v1, &v2, &p) - conjugation_oracle(&v1, &v2, &p);
            assert!(max_abs(&d) < 1e-13, "{d}");
        }
    }

    #[test]
    fn equal_members_have_no_cross_block() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let v = random_hermitian2(&mut rng);
        let m = assemble_point(&v, &v, &params(0.9, 2.0, -1));
        for (i, j) in [(0, 2), (0, 3), (1, 2), (1, 3)] {
            assert!(m[(i, j)].norm() < 1e-15);
        }
    }

    #[test]
    fn fixed_form_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p = params(0.6, 1.3, -1);
        let (v1, v2) = (random_hermitian2(&mut rng), random_hermitian2(&mut rng));
        let m = assemble_point(&v1, &v2, &p);
        let rebuilt = fixed_form_matrix(fixed_form_point(&m, &p), &p);
        assert!(max_abs(&(rebuilt - m)) < 1e-13);
        let (r1, r2) = reduced_pair_point(&m, &p);
        assert!(max_abs(&(r1 - v1)) < 1e-13);
        assert!(max_abs(&(r2 - v2)) < 1e-13);
    }

    #[test]
    fn quarter_angle_members_are_base_plus_minus_correction() {
        let c = FixedFormComponents {
            v11: ScalarField::real_constant(1.0),
            v12: ScalarField::constant(C64::new(0.5, 0.5)),
            v13: ScalarField::constant(C64::new(0.25, -1.0)),
            v14: ScalarField::real_constant(0.3),
            v22: ScalarField::real_constant(-2.0),
            v23: ScalarField::real_constant(0.7),
        };
        let pair = reduced_pair_from_fixed_form(&c, &params(FRAC_PI_4, 0.0, 1)).unwrap();
        let o = Point::default();
        let f = pair.first.at(o);
        let s = pair.second.at(o);
        assert!((f[(0, 0)].re - 1.3).abs() < 1e-15);
        assert!((s[(0, 0)].re - 0.7).abs() < 1e-15);
        assert!((f[(1, 1)].re + 1.3).abs() < 1e-15);
        assert!((s[(0, 1)] - C64::new(0.25, 1.5)).norm() < 1e-15);
    }

    #[test]
    fn degenerate_angle_with_correction_fails() {
        let c = FixedFormComponents {
            v11: ScalarField::zero(),
            v12: ScalarField::zero(),
            v13: ScalarField::zero(),
            v14: ScalarField::real_constant(1.0),
            v22: ScalarField::zero(),
            v23: ScalarField::zero(),
        };
        for tau in [0.0, FRAC_PI_2, PI] {
            assert!(matches!(
                reduced_pair_from_fixed_form(&c, &params(tau, 0.0, 1)),
                Err(Error::DegenerateAngle(_))
            ));
        }
        let none = FixedFormComponents {
            v14: ScalarField::zero(),
            ..c
        };
        assert!(reduced_pair_from_fixed_form(&none, &params(0.0, 0.0, 1)).is_ok());
    }

    #[test]
    fn detect_recovers_branch() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let samples_for = |p: &ReductionParams, rng: &mut ChaCha8Rng| {
            let pairs: Vec<(Mat2, Mat2)> = (0..12)
                .map(|_| (random_hermitian2(rng), random_hermitian2(rng)))
                .collect();
            let ms: Vec<Mat4> = pairs.iter().map(|(a, b)| assemble_point(a, b, p)).collect();
            (pairs, ms)
        };
        let p = params(0.4, 2.5, -1);
        let (pairs, ms) = samples_for(&p, &mut rng);
        let d = detect_samples(&ms, Epsilon::Minus).unwrap();
        assert!((d.params.tau - 0.4).abs() < 1e-10);
        assert!((d.params.phi - 2.5).abs() < 1e-10);
        assert!(max_abs(&(d.first[3] - pairs[3].0)) < 1e-10);

        // φ beyond π comes back as the mirrored branch.
        let p = params(0.4, 2.5 + PI, 1);
        let (pairs, ms) = samples_for(&p, &mut rng);
        let d = detect_samples(&ms, Epsilon::Plus).unwrap();
        assert!((d.params.tau - (FRAC_PI_2 - 0.4)).abs() < 1e-10);
        assert!((d.params.phi - 2.5).abs() < 1e-10);
        assert!(max_abs(&(d.first[5] - pairs[5].1)) < 1e-10);
        assert!(max_abs(&(d.second[5] - pairs[5].0)) < 1e-10);
    }

    #[test]
    fn block_diagonal_input_is_underdetermined() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let ms: Vec<Mat4> = (0..5)
            .map(|_| {
                let v = random_hermitian2(&mut rng);
                assemble_point(&v, &v, &params(0.3, 0.2, 1))
            })
            .collect();
        assert!(matches!(
            detect_samples(&ms, Epsilon::Plus),
            Err(Error::UnderdeterminedAngle)
        ));
    }

    #[test]
    fn lift_at_zero_and_right_angle() {
        use crate::numerics::grid::{Axis, Grid, Grid1D};
        let g = Grid::line(Axis::X, Grid1D::new(0.0, 1.0, 8).unwrap());
        let vals = (0..8)
            .map(|k| [C64::new(k as f64, 1.0), C64::new(-1.0, k as f64)])
            .collect();
        let psi = SampledSpinor::new(g, vals).unwrap();
        let (up, _) = lift(Some(&psi), None, &params(0.0, 1.0, -1));
        let up = up.unwrap();
        assert_eq!(up.values[3], [psi.values[3][0], psi.values[3][1], ZERO, ZERO]);
        let (up, _) = lift(Some(&psi), None, &params(FRAC_PI_2, 0.0, 1));
        let v = up.unwrap().values[3];
        // cos(π/2) is 6e-17, not zero.
        assert!(v[0].norm() < 1e-15 && v[1].norm() < 1e-15);
        assert!((v[2] - psi.values[3][1]).norm() < 1e-15);
        assert!((v[3] - psi.values[3][0]).norm() < 1e-15);
    }

    #[test]
    fn lifted_channels_are_orthogonal_pointwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let tr = params(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), 1).trig();
            let psi = [
                C64::new(rng.random(), rng.random()),
                C64::new(rng.random(), rng.random()),
            ];
            let xi = [
                C64::new(rng.random(), rng.random()),
                C64::new(rng.random(), rng.random()),
            ];
            let a = lift_psi_point(&psi, tr.cos, tr.sin, tr.eps, tr.phase);
            let b = lift_xi_point(&xi, tr.cos, tr.sin, tr.eps, tr.phase);
            let ip: C64 = a.iter().zip(&b).map(|(u, v)| u.conj() * v).sum();
            assert!(ip.norm() < 1e-14);
        }
    }

    #[test]
    fn zero_block_lifts_to_zero() {
        let m = perturbation_lift_point([ZERO; 4], &params(0.7, 0.1, -1));
        assert_eq!(max_abs(&m), 0.0);
    }
}
