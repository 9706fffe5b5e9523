use rayon::prelude::*;

use crate::algebra::C64;
use crate::error::{Error, Result};
use crate::numerics::banded::{bisect_window, inverse_iteration};
use crate::numerics::discretize::DiscreteOperator;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// States with participation ratio below `pr_fraction · cells` are kept.
    pub pr_fraction: f64,
    /// Largest dimension routed to the dense solver.
    pub dense_limit: usize,
    /// Relative bisection tolerance.
    pub tol: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            pr_fraction: 0.5,
            dense_limit: 1024,
            tol: 1e-14,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EigenState {
    pub energy: f64,
    /// Unit-norm vector in the operator's interleaved ordering.
    pub vector: Vec<C64>,
    /// `1 / Σ ρ_i²` over cells, with `ρ_i` the cell density.
    pub participation: f64,
}

#[derive(Debug, Clone)]
pub struct EigenReport {
    pub states: Vec<EigenState>,
    /// States in the window rejected as extended.
    pub filtered: usize,
}

/// Participation ratio over cells of a unit vector in interleaved order.
pub fn participation_ratio(v: &[C64]) -> f64 {
    let total: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    let sum_sq: f64 = v
        .chunks(2)
        .map(|c| {
            let rho = c.iter().map(|z| z.norm_sqr()).sum::<f64>() / total;
            rho * rho
        })
        .sum();
    1.0 / sum_sq
}

fn raw_pairs(op: &DiscreteOperator, lo: f64, hi: f64, opts: &EigenOptions) -> Result<Vec<(f64, Vec<C64>)>> {
    let a = &op.matrix;
    if op.dim() <= opts.dense_limit {
        let eig = a.to_dense().symmetric_eigen();
        let mut pairs: Vec<(f64, Vec<C64>)> = eig
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, &e)| e >= lo && e < hi)
            .map(|(k, &e)| (e, eig.eigenvectors.column(k).iter().copied().collect()))
            .collect();
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        return Ok(pairs);
    }
    let energies = bisect_window(a, lo, hi, opts.tol);
    // Vectors of near-degenerate levels are orthogonalized in order.
    let gap = 1e3 * opts.tol * a.norm_inf().max(1.0);
    let mut clusters: Vec<Vec<f64>> = Vec::new();
    for e in energies {
        match clusters.last_mut() {
            Some(c) if e - c[c.len() - 1] < gap => c.push(e),
            _ => clusters.push(vec![e]),
        }
    }
    let solved: Vec<Result<Vec<(f64, Vec<C64>)>>> = clusters
        .par_iter()
        .map(|cluster| {
            let mut out: Vec<(f64, Vec<C64>)> = Vec::new();
            for &e in cluster {
                let prev: Vec<&[C64]> = out.iter().map(|(_, v)| v.as_slice()).collect();
                let v = inverse_iteration(a, e, &prev)?;
                out.push((e, v));
            }
            Ok(out)
        })
        .collect();
    let mut pairs = Vec::new();
    for s in solved {
        pairs.extend(s?);
    }
    Ok(pairs)
}

/// All eigenpairs with energy in `[lo, hi)`, sorted, keeping only states
/// localized by the participation-ratio criterion.
pub fn eigen_in_gap(op: &DiscreteOperator, window: (f64, f64), opts: &EigenOptions) -> Result<EigenReport> {
    let (lo, hi) = window;
    if !(lo < hi) {
        return Err(Error::InvalidParameter(format!("empty window [{lo}, {hi})")));
    }
    if !op.matrix.is_finite() {
        return Err(Error::Eigensolver("operator has non-finite entries".into()));
    }
    let defect = op.matrix.hermiticity_defect();
    if defect > 1e-12 {
        return Err(Error::Eigensolver(format!(
            "operator is not Hermitian: defect {defect:.3e}"
        )));
    }
    let pairs = raw_pairs(op, lo, hi, opts)?;
    let threshold = opts.pr_fraction * op.cells() as f64;
    let mut states = Vec::new();
    let mut filtered = 0;
    for (energy, vector) in pairs {
        let participation = participation_ratio(&vector);
        if participation < threshold {
            states.push(EigenState {
                energy,
                vector,
                participation,
            });
        } else {
            filtered += 1;
        }
    }
    Ok(EigenReport { states, filtered })
}
