//! Finite-difference matrices of one-dimensional reduced Dirac operators
//! `H = [[a, p + b], [p† + b*, d]]` with `∂y → i k_y`.
//!
//! Unknowns are interleaved: index `2i` is the upper component at cell `i`,
//! `2i + 1` the lower one.

use std::fmt;
use std::str::FromStr;

use crate::algebra::{Point, Potential2x2, C64};
use crate::error::{Error, Result};
use crate::numerics::banded::BandMatrix;
use crate::numerics::grid::{Grid1D, MIN_POINTS};
use crate::numerics::residual::KineticConvention;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scheme {
    /// Upper component on integer sites, lower on half-integer sites.
    Staggered,
    /// Both components on integer sites, symmetric differences.
    Central,
    /// Central plus a Wilson term `r h/2 σ3 (−∂²)` that lifts doublers.
    Wilson { r: f64 },
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Staggered => "staggered",
            Scheme::Central => "central",
            Scheme::Wilson { .. } => "wilson",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Wilson { r } => write!(f, "wilson(r={r})"),
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "staggered" => Ok(Scheme::Staggered),
            "central" => Ok(Scheme::Central),
            "wilson" => Ok(Scheme::Wilson { r: 1.0 }),
            other => Err(Error::InvalidParameter(format!("unknown scheme '{other}'"))),
        }
    }
}

/// Banded Hermitian matrix of a discretized reduced operator.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    pub matrix: BandMatrix,
    pub scheme: Scheme,
    pub grid: Grid1D,
    /// Coordinate of every unknown.
    pub positions: Vec<f64>,
}

impl DiscreteOperator {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Number of grid cells; each carries two unknowns.
    pub fn cells(&self) -> usize {
        self.grid.n
    }
}

/// Discretize on `grid` with Dirichlet truncation. The potential is
/// evaluated at `y = t = 0`; transverse dependence enters only via `k_y`.
pub fn discretize_1d(
    v: &Potential2x2,
    k_y: f64,
    conv: KineticConvention,
    grid: &Grid1D,
    scheme: Scheme,
) -> Result<DiscreteOperator> {
    if grid.n < MIN_POINTS {
        return Err(Error::InvalidParameter(format!(
            "grid needs at least {MIN_POINTS} points, got {}",
            grid.n
        )));
    }
    let n = grid.n;
    let h = grid.h();
    let s = conv.y_sign();
    let at = |x: f64| Point::new(x, 0.0, 0.0);
    // Off-diagonal multiplicative part: p + b = −i∂x + c with c = b − i s k_y.
    let c = |x: f64| v.b.at(at(x)) - C64::new(0.0, s * k_y);
    let ih = C64::new(0.0, 1.0 / h);

    let (matrix, positions) = match scheme {
        Scheme::Staggered => {
            let mut m = BandMatrix::zeros(2 * n, 1);
            let mut pos = Vec::with_capacity(2 * n);
            for i in 0..n {
                let x = grid.coord(i);
                let xv = x + 0.5 * h;
                pos.push(x);
                pos.push(xv);
                m.add_hermitian(2 * i, 2 * i, v.a.at(at(x)));
                m.add_hermitian(2 * i + 1, 2 * i + 1, v.d.at(at(xv)));
                // Links carry c at their midpoints so the matrix is Hermitian
                // and second-order accurate.
                m.add_hermitian(2 * i, 2 * i + 1, -ih + c(x + 0.25 * h) * 0.5);
                if i + 1 < n {
                    let xn = grid.coord(i + 1);
                    m.add_hermitian(2 * i + 1, 2 * i + 2, -ih + c(xn - 0.25 * h).conj() * 0.5);
                }
            }
            (m, pos)
        }
        Scheme::Central | Scheme::Wilson { .. } => {
            let r = match scheme {
                Scheme::Wilson { r } => r,
                _ => 0.0,
            };
            let mut m = BandMatrix::zeros(2 * n, 3);
            let mut pos = Vec::with_capacity(2 * n);
            let half = ih * 0.5;
            let w = r / (2.0 * h);
            for i in 0..n {
                let x = grid.coord(i);
                pos.push(x);
                pos.push(x);
                let (u, l) = (2 * i, 2 * i + 1);
                m.add_hermitian(u, u, v.a.at(at(x)) + 2.0 * w);
                m.add_hermitian(l, l, v.d.at(at(x)) - 2.0 * w);
                m.add_hermitian(u, l, c(x));
                if i + 1 < n {
                    let (un, ln) = (u + 2, l + 2);
                    // −i ∂x on both off-diagonal blocks.
                    m.add_hermitian(u, ln, -half);
                    m.add_hermitian(l, un, -half);
                    m.add_hermitian(u, un, C64::new(-w, 0.0));
                    m.add_hermitian(l, ln, C64::new(w, 0.0));
                }
            }
            (m, pos)
        }
    };
    Ok(DiscreteOperator {
        matrix,
        scheme,
        grid: *grid,
        positions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ScalarField;

    fn mass(m: f64) -> Potential2x2 {
        Potential2x2::diagonal(ScalarField::real_constant(m), ScalarField::real_constant(-m)).unwrap()
    }

    #[test]
    fn operators_are_hermitian() {
        let v = Potential2x2::new(
            ScalarField::real(|p| p.x.sin()),
            ScalarField::new(|p| C64::new(p.x.tanh(), 0.3 * p.x)),
            ScalarField::real(|p| -p.x.cos()),
        )
        .unwrap();
        let g = Grid1D::symmetric(5.0, 64).unwrap();
        for scheme in [Scheme::Staggered, Scheme::Central, Scheme::Wilson { r: 1.0 }] {
            let op = discretize_1d(&v, 0.4, KineticConvention::Standard, &g, scheme).unwrap();
            assert!(op.matrix.hermiticity_defect() < 1e-15, "{scheme}");
        }
    }

    #[test]
    fn free_spectrum_is_symmetric() {
        let g = Grid1D::symmetric(5.0, 40).unwrap();
        let op = discretize_1d(&mass(0.0), 0.0, KineticConvention::Longitudinal, &g, Scheme::Staggered).unwrap();
        let mut e: Vec<f64> = op.matrix.to_dense().symmetric_eigenvalues().iter().copied().collect();
        e.sort_by(f64::total_cmp);
        for k in 0..e.len() {
            assert!((e[k] + e[e.len() - 1 - k]).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_too_few_points() {
        let g = Grid1D {
            min: 0.0,
            max: 1.0,
            n: 5,
        };
        assert!(discretize_1d(&mass(1.0), 0.0, KineticConvention::Longitudinal, &g, Scheme::Staggered).is_err());
    }
}
