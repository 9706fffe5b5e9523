use rayon::prelude::*;

use crate::algebra::{Point, C64, ZERO};
use crate::error::{Error, Result};
use crate::numerics::grid::Grid;
use crate::numerics::quadrature::{quadrature, quadrature_real};

/// Value and first partials of a `C`-component field at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet<const C: usize> {
    pub value: [C64; C],
    pub dx: [C64; C],
    pub dy: [C64; C],
    pub dt: [C64; C],
}

impl<const C: usize> Jet<C> {
    pub fn zero() -> Self {
        Self {
            value: [ZERO; C],
            dx: [ZERO; C],
            dy: [ZERO; C],
            dt: [ZERO; C],
        }
    }
}

/// A closed-form spinor with analytic first derivatives.
pub trait SpinorField<const C: usize>: Sync {
    fn jet(&self, p: Point) -> Jet<C>;

    /// Transverse momentum of an `e^{i k_y y}` factor, if the field has one.
    fn k_y(&self) -> Option<f64> {
        None
    }

    /// Energy of an `e^{-iEt}` factor, if the field is stationary.
    fn energy(&self) -> Option<f64> {
        None
    }
}

/// Analytic partial derivatives carried alongside sampled values.
#[derive(Debug, Clone, PartialEq)]
pub struct Partials<const C: usize> {
    pub dx: Vec<[C64; C]>,
    pub dy: Vec<[C64; C]>,
    pub dt: Vec<[C64; C]>,
}

/// A `C`-component complex field sampled on a grid.
///
/// `k_y` and `energy` record the plane-wave and stationary phase factors
/// `e^{i(k_y y - E t)}`; they let derivatives along directions without a
/// grid axis be recovered when analytic partials are absent.
#[derive(Debug, Clone, PartialEq)]
pub struct Sampled<const C: usize> {
    pub grid: Grid,
    pub values: Vec<[C64; C]>,
    pub partials: Option<Partials<C>>,
    pub k_y: Option<f64>,
    pub energy: Option<f64>,
}

pub type SampledSpinor = Sampled<2>;
pub type SampledBispinor = Sampled<4>;

impl<const C: usize> Sampled<C> {
    pub fn new(grid: Grid, values: Vec<[C64; C]>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        Ok(Self {
            grid,
            values,
            partials: None,
            k_y: None,
            energy: None,
        })
    }

    /// Evaluate a closed-form field with its analytic partials.
    pub fn from_field<F: SpinorField<C>>(field: &F, grid: &Grid) -> Self {
        let jets: Vec<Jet<C>> = grid.points().into_par_iter().map(|p| field.jet(p)).collect();
        let values = jets.iter().map(|j| j.value).collect();
        let partials = Partials {
            dx: jets.iter().map(|j| j.dx).collect(),
            dy: jets.iter().map(|j| j.dy).collect(),
            dt: jets.iter().map(|j| j.dt).collect(),
        };
        Self {
            grid: grid.clone(),
            values,
            partials: Some(partials),
            k_y: field.k_y(),
            energy: field.energy(),
        }
    }

    /// Drop analytic partials, forcing finite differences downstream.
    pub fn without_partials(mut self) -> Self {
        self.partials = None;
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.values
            .iter()
            .all(|v| v.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
    }

    pub fn density(&self) -> Vec<f64> {
        self.values
            .iter()
            .map(|v| v.iter().map(|z| z.norm_sqr()).sum())
            .collect()
    }

    pub fn component(&self, c: usize) -> Vec<C64> {
        self.values.iter().map(|v| v[c]).collect()
    }

    /// Quadrature norm `sqrt(∫ |ψ|²)`.
    pub fn norm(&self) -> f64 {
        quadrature_real(&self.density(), &self.grid)
            .expect("values match grid by construction")
            .sqrt()
    }

    /// `∫ ⟨self, other⟩` with the first argument conjugated.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.grid != other.grid {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        let pointwise: Vec<C64> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.iter().zip(b).map(|(u, v)| u.conj() * v).sum())
            .collect();
        quadrature(&pointwise, &self.grid)
    }

    /// Multiply values and partials by a constant.
    pub fn scaled(mut self, c: C64) -> Self {
        let scale = |v: &mut Vec<[C64; C]>| v.iter_mut().flatten().for_each(|z| *z *= c);
        scale(&mut self.values);
        if let Some(p) = self.partials.as_mut() {
            scale(&mut p.dx);
            scale(&mut p.dy);
            scale(&mut p.dt);
        }
        self
    }

    /// Multiply by `e^{iαt}`, updating partials by the product rule.
    pub fn with_time_phase(mut self, alpha: f64) -> Self {
        let points = self.grid.points();
        let phases: Vec<C64> = points.iter().map(|p| C64::from_polar(1.0, alpha * p.t)).collect();
        if let Some(pd) = self.partials.as_mut() {
            for k in 0..self.values.len() {
                for c in 0..C {
                    let v = self.values[k][c];
                    pd.dt[k][c] = phases[k] * (pd.dt[k][c] + C64::new(0.0, alpha) * v);
                    pd.dx[k][c] *= phases[k];
                    pd.dy[k][c] *= phases[k];
                }
            }
        }
        for (v, ph) in self.values.iter_mut().zip(&phases) {
            v.iter_mut().for_each(|z| *z *= ph);
        }
        self.energy = self.energy.map(|e| e - alpha);
        self
    }

    /// Rescale to unit quadrature norm.
    pub fn normalized(self) -> Self {
        let n = self.norm();
        if n > 0.0 {
            self.scaled(C64::new(1.0 / n, 0.0))
        } else {
            self
        }
    }

    /// Apply a constant linear map to every component array.
    pub fn map_linear<const D: usize>(&self, m: impl Fn(&[C64; C]) -> [C64; D]) -> Sampled<D> {
        let apply = |v: &Vec<[C64; C]>| v.iter().map(&m).collect::<Vec<_>>();
        Sampled {
            grid: self.grid.clone(),
            values: apply(&self.values),
            partials: self.partials.as_ref().map(|p| Partials {
                dx: apply(&p.dx),
                dy: apply(&p.dy),
                dt: apply(&p.dt),
            }),
            k_y: self.k_y,
            energy: self.energy,
        }
    }
}
