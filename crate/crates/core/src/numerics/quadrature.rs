use crate::algebra::C64;
use crate::error::{Error, Result};
use crate::numerics::grid::Grid;

/// Trapezoid rule over the grid. Summation runs in flat index order, so the
/// result is bit-reproducible for a given grid.
pub fn quadrature(values: &[C64], grid: &Grid) -> Result<C64> {
    if values.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            found: values.len(),
        });
    }
    let w = grid.weights();
    Ok(values
        .iter()
        .zip(&w)
        .fold(C64::new(0.0, 0.0), |acc, (v, w)| acc + v * w))
}

/// Real-valued variant of [`quadrature`].
pub fn quadrature_real(values: &[f64], grid: &Grid) -> Result<f64> {
    if values.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            found: values.len(),
        });
    }
    let w = grid.weights();
    Ok(values.iter().zip(&w).fold(0.0, |acc, (v, w)| acc + v * w))
}
