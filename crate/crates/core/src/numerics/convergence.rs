use crate::error::{Error, Result};

/// Errors at or below this are treated as rounding noise.
pub const ROUNDING_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConvergenceOrder {
    /// Least-squares slope of `log(error)` against `log(h)`.
    Observed(f64),
    /// Every error sits at the rounding floor; no order is defined.
    Floor,
}

impl ConvergenceOrder {
    pub fn value(self) -> Option<f64> {
        match self {
            ConvergenceOrder::Observed(p) => Some(p),
            ConvergenceOrder::Floor => None,
        }
    }
}

/// Observed order of a refinement chain of `(h, error)` samples.
pub fn convergence_order(hs: &[f64], errors: &[f64]) -> Result<ConvergenceOrder> {
    if hs.len() != errors.len() {
        return Err(Error::DimensionMismatch {
            expected: hs.len(),
            found: errors.len(),
        });
    }
    if hs.len() < 3 {
        return Err(Error::TooFewGrids(hs.len()));
    }
    if errors.iter().all(|&e| e.abs() <= ROUNDING_FLOOR) {
        return Ok(ConvergenceOrder::Floor);
    }
    let xs: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.abs().max(f64::MIN_POSITIVE).ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(ConvergenceOrder::Observed(sxy / sxx))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let hs = [0.1, 0.05, 0.025, 0.0125];
        let errs: Vec<f64> = hs.iter().map(|h| 3.0 * h * h).collect();
        let p = convergence_order(&hs, &errs).unwrap().value().unwrap();
        assert!((p - 2.0).abs() < 1e-12);
    }

    #[test]
    fn floor_and_too_few() {
        assert_eq!(
            convergence_order(&[0.1, 0.05, 0.025], &[1e-15, 2e-16, 5e-16]).unwrap(),
            ConvergenceOrder::Floor
        );
        assert!(matches!(
            convergence_order(&[0.1, 0.05], &[1.0, 0.2]),
            Err(Error::TooFewGrids(2))
        ));
    }
}
