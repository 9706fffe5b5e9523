//! Residual norms of reduced and full Dirac equations.
//!
//! Every equation has the form `(−i∂t + K + V) Ψ = 0`. For the reduced
//! problems `K = [[0, p], [p†, 0]]`; the 4x4 kinetic term is
//! `blockdiag(K(p), ε K(p†))`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::algebra::{Epsilon, Potential2x2, Potential4x4, C64};
use crate::error::{Error, Result};
use crate::numerics::grid::Axis;
use crate::numerics::quadrature::quadrature_real;
use crate::numerics::sampled::Sampled;

/// Placement of `∂y` in the off-diagonal kinetic entry `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KineticConvention {
    /// `p = −i∂x − ∂y`.
    Standard,
    /// `p = −i∂x + ∂y`.
    Swapped,
    /// `p = −i∂x`; one-dimensional problems.
    Longitudinal,
}

impl KineticConvention {
    /// `s` in `p = −i∂x − s ∂y`.
    pub fn y_sign(self) -> f64 {
        match self {
            KineticConvention::Standard => 1.0,
            KineticConvention::Swapped => -1.0,
            KineticConvention::Longitudinal => 0.0,
        }
    }

    /// Convention of `p†`.
    pub fn adjoint(self) -> Self {
        match self {
            KineticConvention::Standard => KineticConvention::Swapped,
            KineticConvention::Swapped => KineticConvention::Standard,
            KineticConvention::Longitudinal => KineticConvention::Longitudinal,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            KineticConvention::Standard => "standard",
            KineticConvention::Swapped => "swapped",
            KineticConvention::Longitudinal => "longitudinal",
        }
    }
}

impl fmt::Display for KineticConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KineticConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(KineticConvention::Standard),
            "swapped" => Ok(KineticConvention::Swapped),
            "longitudinal" => Ok(KineticConvention::Longitudinal),
            other => Err(Error::InvalidParameter(format!(
                "unknown kinetic convention tag '{other}'"
            ))),
        }
    }
}

/// Second-order central differences along one grid axis, one-sided at the
/// ends.
fn finite_difference<const C: usize>(s: &Sampled<C>, axis: Axis) -> Option<Vec<[C64; C]>> {
    let (pos, g) = s.grid.axis_grid(axis)?;
    let stride = s.grid.stride(pos);
    let inv = 1.0 / (2.0 * g.h());
    let n = g.n;
    let out = (0..s.len())
        .map(|k| {
            let i = s.grid.index(k)[pos];
            let at = |j: usize| s.values[k - i * stride + j * stride];
            let mut d = [C64::new(0.0, 0.0); C];
            for c in 0..C {
                d[c] = if i == 0 {
                    (at(0)[c] * -3.0 + at(1)[c] * 4.0 - at(2)[c]) * inv
                } else if i + 1 == n {
                    (at(n - 1)[c] * 3.0 - at(n - 2)[c] * 4.0 + at(n - 3)[c]) * inv
                } else {
                    (at(i + 1)[c] - at(i - 1)[c]) * inv
                };
            }
            d
        })
        .collect();
    Some(out)
}

fn phase_derivative<const C: usize>(s: &Sampled<C>, factor: C64) -> Vec<[C64; C]> {
    s.values.iter().map(|v| v.map(|z| z * factor)).collect()
}

/// Partial derivative along `axis`: analytic if carried, else finite
/// differences on a grid axis, else from the recorded phase factor.
pub fn partial<const C: usize>(s: &Sampled<C>, axis: Axis) -> Result<Vec<[C64; C]>> {
    if let Some(p) = &s.partials {
        return Ok(match axis {
            Axis::X => p.dx.clone(),
            Axis::Y => p.dy.clone(),
            Axis::T => p.dt.clone(),
        });
    }
    if let Some(d) = finite_difference(s, axis) {
        return Ok(d);
    }
    match axis {
        Axis::Y => s.k_y.map(|k| phase_derivative(s, C64::new(0.0, k))),
        Axis::T => s.energy.map(|e| phase_derivative(s, C64::new(0.0, -e))),
        Axis::X => None,
    }
    .ok_or_else(|| {
        Error::InvalidParameter(format!(
            "no way to differentiate along {}: not a grid axis and no phase recorded",
            axis.name()
        ))
    })
}

/// `p f = −i f_x − s f_y`, and `p† f = −i f_x + s f_y`.
#[inline]
fn apply_p(fx: C64, fy: C64, s: f64) -> C64 {
    C64::new(fx.im, -fx.re) - fy * s
}

fn relative_norm<const C: usize>(r: &[[C64; C]], s: &Sampled<C>) -> Result<f64> {
    let num: Vec<f64> = r.iter().map(|v| v.iter().map(|z| z.norm_sqr()).sum()).collect();
    let num = quadrature_real(&num, &s.grid)?;
    let den = quadrature_real(&s.density(), &s.grid)?;
    if den <= 0.0 {
        return Err(Error::InvalidParameter("residual of a zero state".into()));
    }
    Ok((num / den).sqrt())
}

fn needs_y(conv: KineticConvention) -> bool {
    conv != KineticConvention::Longitudinal
}

fn y_partial<const C: usize>(s: &Sampled<C>, conv: KineticConvention) -> Result<Vec<[C64; C]>> {
    if needs_y(conv) {
        partial(s, Axis::Y)
    } else {
        Ok(vec![[C64::new(0.0, 0.0); C]; s.len()])
    }
}

/// Pointwise `(K + V − E) ψ` of a stationary reduced equation.
pub fn stationary_defect(
    v: &Potential2x2,
    psi: &Sampled<2>,
    energy: f64,
    conv: KineticConvention,
) -> Result<Vec<[C64; 2]>> {
    let dx = partial(psi, Axis::X)?;
    let dy = y_partial(psi, conv)?;
    let s = conv.y_sign();
    let points = psi.grid.points();
    Ok((0..psi.len())
        .into_par_iter()
        .map(|k| {
            let m = v.at(points[k]);
            let f = psi.values[k];
            let kin = [apply_p(dx[k][1], dy[k][1], s), apply_p(dx[k][0], dy[k][0], -s)];
            [
                kin[0] + m[(0, 0)] * f[0] + m[(0, 1)] * f[1] - f[0] * energy,
                kin[1] + m[(1, 0)] * f[0] + m[(1, 1)] * f[1] - f[1] * energy,
            ]
        })
        .collect())
}

/// `‖(K + V − E) ψ‖ / ‖ψ‖` in the quadrature norm.
pub fn residual_stationary(v: &Potential2x2, psi: &Sampled<2>, energy: f64, conv: KineticConvention) -> Result<f64> {
    let r = stationary_defect(v, psi, energy, conv)?;
    relative_norm(&r, psi)
}

/// Pointwise `(−i∂t + K4 + V) Ψ`.
pub fn spacetime_defect(
    v: &Potential4x4,
    epsilon: Epsilon,
    psi: &Sampled<4>,
    conv: KineticConvention,
) -> Result<Vec<[C64; 4]>> {
    let dx = partial(psi, Axis::X)?;
    let dy = y_partial(psi, conv)?;
    let dt = partial(psi, Axis::T)?;
    let (s, eps) = (conv.y_sign(), epsilon.value());
    let points = psi.grid.points();
    Ok((0..psi.len())
        .into_par_iter()
        .map(|k| {
            let m = v.at(points[k]);
            let f = psi.values[k];
            let (fx, fy) = (dx[k], dy[k]);
            // blockdiag(K(p), ε K(p†)).
            let kin = [
                apply_p(fx[1], fy[1], s),
                apply_p(fx[0], fy[0], -s),
                apply_p(fx[3], fy[3], -s) * eps,
                apply_p(fx[2], fy[2], s) * eps,
            ];
            let mut r = [C64::new(0.0, 0.0); 4];
            for i in 0..4 {
                let mut acc = kin[i] + C64::new(dt[k][i].im, -dt[k][i].re);
                for j in 0..4 {
                    acc += m[(i, j)] * f[j];
                }
                r[i] = acc;
            }
            r
        })
        .collect())
}

/// `‖(−i∂t + K4 + V) Ψ‖ / ‖Ψ‖` in the quadrature norm.
pub fn residual_spacetime(
    v: &Potential4x4,
    epsilon: Epsilon,
    psi: &Sampled<4>,
    conv: KineticConvention,
) -> Result<f64> {
    let r = spacetime_defect(v, epsilon, psi, conv)?;
    relative_norm(&r, psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Point, ScalarField};
    use crate::numerics::grid::{Grid, Grid1D};
    use crate::numerics::sampled::{Jet, SpinorField};

    /// Massive plane wave `e^{i(kx − Et)}` of `K + diag(m, −m)`.
    struct PlaneWave {
        m: f64,
        k: f64,
    }

    impl PlaneWave {
        fn energy(&self) -> f64 {
            (self.m * self.m + self.k * self.k).sqrt()
        }
    }

    impl SpinorField<2> for PlaneWave {
        fn jet(&self, p: Point) -> Jet<2> {
            let e = self.energy();
            // (m − E) u + k v = 0.
            let u = C64::new(self.k, 0.0);
            let v = C64::new(e - self.m, 0.0);
            let ph = C64::from_polar(1.0, self.k * p.x);
            let ik = C64::new(0.0, self.k);
            let mut j = Jet::zero();
            j.value = [u * ph, v * ph];
            j.dx = [ik * u * ph, ik * v * ph];
            j
        }
    }

    fn mass(m: f64) -> Potential2x2 {
        Potential2x2::diagonal(ScalarField::real_constant(m), ScalarField::real_constant(-m)).unwrap()
    }

    #[test]
    fn plane_wave_is_exact() {
        let w = PlaneWave { m: 0.7, k: 1.3 };
        let g = Grid::line(Axis::X, Grid1D::new(0.0, 10.0, 201).unwrap());
        let s = Sampled::from_field(&w, &g);
        let r = residual_stationary(&mass(0.7), &s, w.energy(), KineticConvention::Longitudinal).unwrap();
        assert!(r < 1e-14, "{r}");
    }

    #[test]
    fn finite_difference_error_is_second_order() {
        let w = PlaneWave { m: 0.7, k: 1.3 };
        let mut errs = Vec::new();
        for n in [101, 201, 401] {
            let g = Grid::line(Axis::X, Grid1D::new(0.0, 10.0, n).unwrap());
            let s = Sampled::from_field(&w, &g).without_partials();
            errs.push(residual_stationary(&mass(0.7), &s, w.energy(), KineticConvention::Longitudinal).unwrap());
        }
        let ratio = errs[1] / errs[2];
        assert!((ratio.log2() - 2.0).abs() < 0.3, "{errs:?}");
    }

    #[test]
    fn missing_transverse_derivative_is_reported() {
        let w = PlaneWave { m: 0.7, k: 1.3 };
        let g = Grid::line(Axis::X, Grid1D::new(0.0, 10.0, 51).unwrap());
        let s = Sampled::from_field(&w, &g).without_partials();
        assert!(residual_stationary(&mass(0.7), &s, 1.0, KineticConvention::Standard).is_err());
    }

    #[test]
    fn convention_tags_parse() {
        assert_eq!(
            "swapped".parse::<KineticConvention>().unwrap().adjoint(),
            KineticConvention::Standard
        );
        assert!("sideways".parse::<KineticConvention>().is_err());
    }
}
