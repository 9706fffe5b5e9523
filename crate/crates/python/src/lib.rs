//! Python bindings for the reduction map, the Poschl-Teller catalog and the
//! Jacobi polynomials. Matrices cross the boundary as nested lists of
//! complex numbers, row-major.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use dirac_reduce::algebra::{Mat2, Mat4};
use dirac_reduce::models::{self, Admissibility, Branch, PoschlTellerParams};
use dirac_reduce::reduction::perturbation_lift_point;
use dirac_reduce::{Epsilon, ReductionParams, C64};

type Rows = Vec<Vec<C64>>;

fn err(e: dirac_reduce::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn params(tau: f64, phi: f64, epsilon: i32) -> PyResult<ReductionParams> {
    Ok(ReductionParams::new(tau, phi, Epsilon::try_from(epsilon).map_err(err)?))
}

fn mat2(rows: &Rows) -> PyResult<Mat2> {
    if rows.len() != 2 || rows.iter().any(|r| r.len() != 2) {
        return Err(PyValueError::new_err("expected a 2x2 matrix"));
    }
    Ok(Mat2::new(rows[0][0], rows[0][1], rows[1][0], rows[1][1]))
}

fn mat4(rows: &Rows) -> PyResult<Mat4> {
    if rows.len() != 4 || rows.iter().any(|r| r.len() != 4) {
        return Err(PyValueError::new_err("expected a 4x4 matrix"));
    }
    Ok(Mat4::from_fn(|i, j| rows[i][j]))
}

fn rows2(m: &Mat2) -> Rows {
    (0..2).map(|i| (0..2).map(|j| m[(i, j)]).collect()).collect()
}

fn rows4(m: &Mat4) -> Rows {
    (0..4).map(|i| (0..4).map(|j| m[(i, j)]).collect()).collect()
}

fn branch(name: &str) -> PyResult<Branch> {
    match name {
        "positive" => Ok(Branch::Positive),
        "negative" => Ok(Branch::Negative),
        other => Err(PyValueError::new_err(format!(
            "branch must be 'positive' or 'negative', got '{other}'"
        ))),
    }
}

/// `T blockdiag(v1, v2) T†` for Hermitian 2x2 blocks.
#[pyfunction]
fn assemble_point(v1: Rows, v2: Rows, tau: f64, phi: f64, epsilon: i32) -> PyResult<Rows> {
    let p = params(tau, phi, epsilon)?;
    Ok(rows4(&dirac_reduce::assemble_point(&mat2(&v1)?, &mat2(&v2)?, &p)))
}

/// The unitary `T = R (U ⊗ I)`.
#[pyfunction]
fn total_transform(tau: f64, phi: f64, epsilon: i32) -> PyResult<Rows> {
    Ok(rows4(&dirac_reduce::total_transform(&params(tau, phi, epsilon)?)))
}

/// Recover `(tau, phi)` and the reduced blocks from sampled 4x4 matrices.
/// Returns `(tau, phi, first, second)`; raises ValueError when the samples
/// are not reducible or the angle is undetermined.
#[pyfunction]
fn detect(samples: Vec<Rows>, epsilon: i32) -> PyResult<(f64, f64, Vec<Rows>, Vec<Rows>)> {
    let eps = Epsilon::try_from(epsilon).map_err(err)?;
    let mats = samples.iter().map(mat4).collect::<PyResult<Vec<_>>>()?;
    let d = dirac_reduce::detect_samples(&mats, eps).map_err(err)?;
    Ok((
        d.params.tau,
        d.params.phi,
        d.first.iter().map(rows2).collect(),
        d.second.iter().map(rows2).collect(),
    ))
}

/// `T δV T†` for the off-diagonal block `[[v1, v2], [v3, v4]]`.
#[pyfunction]
fn perturbation_lift(v: [C64; 4], tau: f64, phi: f64, epsilon: i32) -> PyResult<Rows> {
    Ok(rows4(&perturbation_lift_point(v, &params(tau, phi, epsilon)?)))
}

/// Bound-state energy of the reduced Poschl-Teller problem.
#[pyfunction]
#[pyo3(signature = (delta, k_y, n, branch_name = "positive"))]
fn pt_energy(delta: f64, k_y: f64, n: usize, branch_name: &str) -> PyResult<f64> {
    models::pt_energy(&PoschlTellerParams::new(delta, k_y, n), branch(branch_name)?).map_err(err)
}

/// `("admissible" | "boundary" | "not_admissible", reason)`.
#[pyfunction]
fn pt_admissible(delta: f64, k_y: f64, n: usize) -> (&'static str, String) {
    match models::pt_admissible(&PoschlTellerParams::new(delta, k_y, n)) {
        Admissibility::Admissible => ("admissible", String::new()),
        Admissibility::Boundary { reason } => ("boundary", reason),
        Admissibility::NotAdmissible { reason } => ("not_admissible", reason),
    }
}

/// `(n, k_y, E)` at every admissible point, ordered by `k_y`.
#[pyfunction]
fn pt_band_structure(delta: f64, ns: Vec<usize>, k_ys: Vec<f64>) -> Vec<(usize, f64, f64)> {
    models::pt_band_structure(delta, &ns, &k_ys)
}

#[pyfunction]
fn jacobi(n: usize, alpha: f64, beta: f64, z: f64) -> f64 {
    models::jacobi(n, alpha, beta, z)
}

#[pymodule]
fn dirac_reduce_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(assemble_point, m)?)?;
    m.add_function(wrap_pyfunction!(total_transform, m)?)?;
    m.add_function(wrap_pyfunction!(detect, m)?)?;
    m.add_function(wrap_pyfunction!(perturbation_lift, m)?)?;
    m.add_function(wrap_pyfunction!(pt_energy, m)?)?;
    m.add_function(wrap_pyfunction!(pt_admissible, m)?)?;
    m.add_function(wrap_pyfunction!(pt_band_structure, m)?)?;
    m.add_function(wrap_pyfunction!(jacobi, m)?)?;
    Ok(())
}
