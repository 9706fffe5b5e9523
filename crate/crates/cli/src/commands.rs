use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use dirac_reduce::algebra::{random_smooth_field, Mat2, Mat4, Point};
use dirac_reduce::models::{
    continuum_edge, pt_band_structure, pt_energy, pt_potential, soliton_d2, soliton_fields, soliton_mu_lambda, Branch,
    PoschlTellerParams,
};
use dirac_reduce::numerics::{
    discretize_1d, eigen_in_gap, quadrature_real, residual_spacetime, residual_stationary, Axis, EigenOptions, Grid,
    Grid1D, KineticConvention, SampledBispinor, SampledSpinor, Scheme,
};
use dirac_reduce::reduction::{conjugation_oracle, disorder_layout, expectation, perturbation_lift};
use dirac_reduce::{
    detect_samples, lift, Epsilon, Error, PerturbationBlock, Potential2x2, Potential4x4, ReductionParams, C64,
};

use crate::config::{LoadedConfig, ModelKind};
use crate::error::{CliError, CliResult};
use crate::io::{ensure_dir, headers, num, read_matrix_field, write_matrix_field, write_state, Table};
use crate::model::{branch, build, complex_field, pt_points, states, Detail, Setup};
use crate::report::Report;

/// Flags that select fixed reductions for `perturb`.
#[derive(Debug, Clone, Copy, Default)]
pub struct PerturbFlags {
    pub spin_orbit: bool,
    pub bilayer: bool,
}

fn max_over<F: Fn(Point) -> f64 + Sync>(points: &[Point], f: F) -> f64 {
    points.par_iter().map(|&p| f(p)).reduce(|| 0.0, f64::max)
}

fn scale_of(m: &Mat4) -> f64 {
    1.0 + m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Relative pointwise distance of `v` from `T blockdiag(V1, V2) T†`.
fn conjugation_defect(setup: &Setup, points: &[Point]) -> f64 {
    let (pair, params) = (&setup.pair, setup.pair.params);
    max_over(points, |p| {
        let m = setup.potential.at(p);
        let o = conjugation_oracle(&pair.first.at(p), &pair.second.at(p), &params);
        (m - o).norm() / scale_of(&o)
    })
}

fn hermiticity_defect(v: &Potential4x4, points: &[Point]) -> f64 {
    max_over(points, |p| {
        let m = v.at(p);
        (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max) / scale_of(&m)
    })
}

fn describe(params: &ReductionParams) -> String {
    format!(
        "reduction: tau = {}, phi = {}, epsilon = {}",
        num(params.tau),
        num(params.phi),
        params.epsilon.as_i32()
    )
}

fn kinetic_note(conv: KineticConvention) -> String {
    let p = match conv {
        KineticConvention::Standard => "p = -i d/dx - d/dy",
        KineticConvention::Swapped => "p = -i d/dx + d/dy",
        KineticConvention::Longitudinal => "p = -i d/dx",
    };
    format!("kinetic convention: {conv} ({p}); lower block carries epsilon and the adjoint")
}

// ---------------------------------------------------------------- spectrum

struct Level {
    n: usize,
    k_y: f64,
    analytic: f64,
    numeric: Option<f64>,
}

/// Localized eigenvalues of a reduced operator inside `window`.
fn numeric_levels(
    v: &Potential2x2,
    k_y: f64,
    conv: KineticConvention,
    grid: &Grid1D,
    scheme: Scheme,
    window: (f64, f64),
) -> CliResult<(Vec<f64>, usize)> {
    let op = discretize_1d(v, k_y, conv, grid, scheme)?;
    let r = eigen_in_gap(&op, window, &EigenOptions::default())?;
    Ok((r.states.iter().map(|s| s.energy).collect(), r.filtered))
}

fn nearest(levels: &[f64], e: f64) -> Option<f64> {
    levels
        .iter()
        .copied()
        .min_by(|a, b| (a - e).abs().total_cmp(&(b - e).abs()))
}

pub fn spectrum(cfg: &LoadedConfig, out: &Path, tol: Option<f64>) -> CliResult<Report> {
    let setup = build(cfg)?;
    let mut report = Report::new("spectrum", setup.kind.name(), &cfg.text);
    let tol = tol.unwrap_or(setup.tol.spectrum);
    let (_, grid) = setup
        .grid
        .axis_grid(Axis::X)
        .ok_or_else(|| CliError::Params("spectrum needs an x grid".into()))?;
    let mut rows: Vec<Level> = Vec::new();
    match &setup.detail {
        Detail::PoschlTeller { spec, scheme, .. } => {
            let points = pt_points(spec)?;
            let v = pt_potential(spec.delta, Axis::X)?;
            report.note(kinetic_note(setup.kinetic));
            report.result(format!(
                "scheme: {scheme}, grid: {} points on [{}, {}]",
                grid.n,
                num(grid.min),
                num(grid.max)
            ));
            for &k_y in &spec.k_y {
                let edge = continuum_edge(spec.delta, k_y);
                let window = spec.window.map_or((-0.999 * edge, 0.999 * edge), |w| (w[0], w[1]));
                let (levels, filtered) = numeric_levels(&v, k_y, setup.kinetic, &grid, *scheme, window)?;
                report.result(format!(
                    "k_y = {}: {} localized states in [{}, {}) ({} extended filtered): {}",
                    num(k_y),
                    levels.len(),
                    num(window.0),
                    num(window.1),
                    filtered,
                    levels.iter().map(|e| num(*e)).collect::<Vec<_>>().join(" ")
                ));
                for p in points.iter().filter(|p| p.k_y == k_y) {
                    let analytic = pt_energy(p, Branch::Positive)?;
                    rows.push(Level {
                        n: p.n,
                        k_y,
                        analytic,
                        numeric: nearest(&levels, analytic),
                    });
                }
            }
            if let Some(sw) = spec.sweep {
                let path = write_bands(out, spec.delta, sw.min, sw.max, sw.count)?;
                report.file(&path, out);
            }
        }
        Detail::Scenario2 { model } => {
            let s = cfg.section(&cfg.config.scenario2)?;
            report.note(kinetic_note(setup.kinetic));
            report.note("rows: first the psi channel at k_y, then the xi channel at k_y - V2, shifted by V2");
            for (pot, k_eff, energy, shift) in [
                (&model.pair.first, s.k_y, model.energy_psi, 0.0),
                (&model.pair.second, s.k_y - s.v2, model.energy_xi, s.v2),
            ] {
                let edge = continuum_edge(s.delta, k_eff);
                let window = (shift - 0.999 * edge, shift + 0.999 * edge);
                let (levels, filtered) = numeric_levels(pot, 0.0, setup.kinetic, &grid, Scheme::Staggered, window)?;
                report.result(format!(
                    "k_y = {}: {} localized states ({} extended filtered)",
                    num(k_eff),
                    levels.len(),
                    filtered
                ));
                rows.push(Level {
                    n: s.n,
                    k_y: k_eff,
                    analytic: energy,
                    numeric: nearest(&levels, energy),
                });
            }
        }
        _ => {
            return Err(CliError::Params(format!(
                "model '{}' has no band structure; spectrum supports poschl_teller and scenario2",
                setup.kind.name()
            )))
        }
    }
    let path = out.join("spectrum.csv");
    let mut t = Table::csv(&path, &headers(&["n", "k_y", "E_analytic", "E_numeric", "abs_err"]))?;
    for r in &rows {
        let (numeric, err) = match r.numeric {
            Some(e) => (num(e), (e - r.analytic).abs()),
            None => ("nan".into(), f64::NAN),
        };
        t.row(&[r.n.to_string(), num(r.k_y), num(r.analytic), numeric, num(err)])?;
        report.check(format!("level n={} k_y={}", r.n, num(r.k_y)), err, tol);
    }
    t.finish()?;
    report.file(&path, out);
    Ok(report)
}

fn linspace(min: f64, max: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![min],
        _ => (0..count)
            .map(|i| min + (max - min) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

fn write_bands(out: &Path, delta: f64, min: f64, max: f64, count: usize) -> CliResult<std::path::PathBuf> {
    let top = (4.0 * delta * delta + 1e-9).floor() as usize;
    let ns: Vec<usize> = (0..=top).collect();
    let table = pt_band_structure(delta, &ns, &linspace(min, max, count));
    let path = out.join("bands.csv");
    let mut t = Table::csv(&path, &headers(&["n", "k_y", "E", "continuum_edge"]))?;
    for (n, k_y, e) in table {
        t.row(&[n.to_string(), num(k_y), num(e), num(continuum_edge(delta, k_y))])?;
    }
    t.finish()?;
    Ok(path)
}

// ------------------------------------------------------------------- modes

/// `∫ |Ψ|² dx` on every time slice of a `(t, x)` grid.
fn slice_probabilities(s: &SampledBispinor) -> Option<Vec<(f64, f64)>> {
    let (tpos, tg) = s.grid.axis_grid(Axis::T)?;
    let (_, xg) = s.grid.axis_grid(Axis::X)?;
    let xgrid = Grid::line(Axis::X, xg);
    let dens = s.density();
    let (stride_t, stride_x) = (s.grid.stride(tpos), s.grid.stride(1 - tpos));
    Some(
        (0..tg.n)
            .map(|i| {
                let slice: Vec<f64> = (0..xg.n).map(|j| dens[i * stride_t + j * stride_x]).collect();
                (
                    tg.coord(i),
                    quadrature_real(&slice, &xgrid).expect("slice matches grid"),
                )
            })
            .collect(),
    )
}

pub fn modes(cfg: &LoadedConfig, out: &Path, tol: Option<f64>) -> CliResult<Report> {
    let setup = build(cfg)?;
    let mut report = Report::new("modes", setup.kind.name(), &cfg.text);
    let tol = tol.unwrap_or(1e-8);
    report.result(describe(&setup.pair.params));
    let all = states(&setup)?;
    if all.is_empty() {
        return Err(CliError::Params(format!(
            "model '{}' has no closed-form states",
            setup.kind.name()
        )));
    }
    for st in &all {
        for path in write_state(out, &st.name, &st.lifted)? {
            report.file(&path, out);
        }
        if let Some(r) = &st.reduced {
            for path in write_state(out, &format!("{}_reduced", st.name), &r.spinor)? {
                report.file(&path, out);
            }
        }
        match slice_probabilities(&st.lifted) {
            Some(slices) => {
                let path = out.join(format!("{}_probability.dat", st.name));
                let mut t = Table::field(&path, &headers(&["t", "probability"]))?;
                let mut worst: f64 = 0.0;
                for (time, prob) in &slices {
                    t.row(&[num(*time), num(*prob)])?;
                    worst = worst.max((prob - 1.0).abs());
                }
                t.finish()?;
                report.file(&path, out);
                report.check(format!("total probability {} (every time slice)", st.name), worst, tol);
            }
            None => {
                let total = st.lifted.norm().powi(2);
                report.result(format!("{}: total probability {}", st.name, num(total)));
                report.check(format!("total probability {}", st.name), (total - 1.0).abs(), tol);
            }
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------- assemble

fn sample(v: &Potential4x4, points: &[Point]) -> Vec<(Point, Mat4)> {
    points.par_iter().map(|&p| (p, v.at(p))).collect()
}

pub fn assemble(cfg: &LoadedConfig, out: &Path, tol: Option<f64>) -> CliResult<Report> {
    let setup = build(cfg)?;
    let mut report = Report::new("assemble", setup.kind.name(), &cfg.text);
    let tol = tol.unwrap_or(setup.tol.identity);
    let points = setup.grid.points();
    report.result(describe(&setup.pair.params));
    report.result(format!("samples: {}", points.len()));
    let path = out.join("potential.dat");
    write_matrix_field(&path, &sample(&setup.potential, &points))?;
    report.file(&path, out);
    report.check("conjugation identity", conjugation_defect(&setup, &points), tol);
    report.check("hermiticity", hermiticity_defect(&setup.potential, &points), tol);
    if let Detail::CrossedCombs { reducible } = &setup.detail {
        let (dv, dw) = reducible.printed_discrepancy(&points);
        report.note(format!(
            "published V_A differs from the assembled entry by up to {}; W+ by up to {}; assembled entries are written",
            num(dv),
            num(dw)
        ));
    }
    Ok(report)
}

// ------------------------------------------------------------------ detect

fn detect_epsilon(cfg: &LoadedConfig) -> CliResult<Epsilon> {
    if let Some(e) = cfg.config.reduction.epsilon {
        return Epsilon::try_from(e).map_err(CliError::from);
    }
    match cfg.config.model {
        ModelKind::PoschlTeller | ModelKind::CrossedCombs => Ok(Epsilon::Minus),
        ModelKind::Soliton | ModelKind::Scenario2 => Ok(Epsilon::Plus),
        ModelKind::Custom => Err(CliError::Config {
            path: cfg.path.clone(),
            message: "detect needs [reduction] epsilon".into(),
        }),
    }
}

fn write_reduced(path: &Path, points: &[Point], ms: &[Mat2]) -> CliResult<()> {
    let h = headers(&["x", "y", "t", "a_re", "a_im", "b_re", "b_im", "d_re", "d_im"]);
    let mut t = Table::field(path, &h)?;
    for (p, m) in points.iter().zip(ms) {
        let (a, b, d) = (m[(0, 0)], m[(0, 1)], m[(1, 1)]);
        t.row(&[
            num(p.x),
            num(p.y),
            num(p.t),
            num(a.re),
            num(a.im),
            num(b.re),
            num(b.im),
            num(d.re),
            num(d.im),
        ])?;
    }
    t.finish()
}

pub fn detect(cfg: &LoadedConfig, out: &Path, tol: Option<f64>) -> CliResult<Report> {
    let spec = cfg.section(&cfg.config.detect).map_err(|_| CliError::Config {
        path: cfg.path.clone(),
        message: "detect needs a [detect] table with an input file".into(),
    })?;
    let input = cfg.resolve(&spec.input);
    let eps = detect_epsilon(cfg)?;
    let samples = read_matrix_field(&input)?;
    let mut report = Report::new("detect", cfg.config.model.name(), &cfg.text);
    report.result(format!(
        "input: {} ({} samples), epsilon = {}",
        spec.input.display(),
        samples.len(),
        eps.as_i32()
    ));
    let (points, mats): (Vec<Point>, Vec<Mat4>) = samples.into_iter().unzip();
    match detect_samples(&mats, eps) {
        Ok(found) => {
            report.result(format!("tau = {}", num(found.params.tau)));
            report.result(format!("phi = {}", num(found.params.phi)));
            report.result(format!("phase spread = {}", num(found.phi_spread)));
            report.note("(tau, phi + pi, V1, V2) and (pi/2 - tau, phi, V2, V1) describe the same potential");
            for (name, ms) in [
                ("reduced_first.dat", &found.first),
                ("reduced_second.dat", &found.second),
            ] {
                let path = out.join(name);
                write_reduced(&path, &points, ms)?;
                report.file(&path, out);
            }
            report.check(
                "reconstruction",
                found.max_violation,
                tol.unwrap_or(dirac_reduce::reduction::TOL_DETECT),
            );
        }
        Err(Error::NotReducible { violation, phi_spread }) => {
            report.result("NotReducible");
            report.result(format!("violation: {violation}"));
            report.result(format!(
                "violation at x = {}, y = {}, t = {}",
                num(points[violation.point].x),
                num(points[violation.point].y),
                num(points[violation.point].t)
            ));
            report.result(format!("phase spread = {}", num(phi_spread)));
            report.check("reducibility", violation.relative, dirac_reduce::reduction::TOL_DETECT);
        }
        Err(e @ (Error::UnderdeterminedAngle | Error::DegenerateAngle(_))) => {
            report.result(format!("{e}"));
            report.check("angle determined", f64::INFINITY, 0.0);
        }
        Err(e) => return Err(e.into()),
    }
    Ok(report)
}

// ------------------------------------------------------------------ verify

fn random_blocks(n: usize, seed: u64) -> Vec<PerturbationBlock> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| PerturbationBlock {
            v1: random_smooth_field(&mut rng, false),
            v2: random_smooth_field(&mut rng, false),
            v3: random_smooth_field(&mut rng, false),
            v4: random_smooth_field(&mut rng, false),
        })
        .collect()
}

/// A deterministic pseudo-random state in the first channel, for models
/// without closed-form solutions.
fn probe_state(grid: &Grid, params: &ReductionParams, seed: u64) -> CliResult<SampledBispinor> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (f, g) = (
        random_smooth_field(&mut rng, false),
        random_smooth_field(&mut rng, false),
    );
    let values = grid.points().iter().map(|&p| [f.at(p), g.at(p)]).collect();
    let psi = SampledSpinor::new(grid.clone(), values)?.normalized();
    Ok(lift(Some(&psi), None, params).0.expect("upper channel"))
}

pub fn verify(cfg: &LoadedConfig, _out: &Path, tol: Option<f64>) -> CliResult<Report> {
    let setup = build(cfg)?;
    let mut report = Report::new("verify", setup.kind.name(), &cfg.text);
    let residual_tol = tol.unwrap_or(setup.tol.residual);
    let (id_tol, exp_tol) = (setup.tol.identity, setup.tol.expectation);
    let params = setup.pair.params;
    let points = setup.grid.points();
    report.result(describe(&params));
    report.note(kinetic_note(setup.kinetic));

    report.check("hermiticity", hermiticity_defect(&setup.potential, &points), id_tol);
    report.check("conjugation identity", conjugation_defect(&setup, &points), id_tol);
    if let Some(stored) = &cfg.config.verify.stored_potential {
        let path = cfg.resolve(stored);
        let samples = read_matrix_field(&path)?;
        let dev = samples
            .par_iter()
            .map(|(p, m)| {
                let o = conjugation_oracle(&setup.pair.first.at(*p), &setup.pair.second.at(*p), &params);
                (m - o).norm() / scale_of(&o)
            })
            .reduce(|| 0.0, f64::max);
        report.check("conjugation identity (stored potential)", dev, id_tol);
    }

    let all = states(&setup)?;
    for st in &all {
        if let Some(r) = &st.reduced {
            let res = residual_stationary(&r.potential, &r.spinor, r.energy, setup.kinetic)?;
            report.check(
                format!("residual {} (reduced, E = {})", st.name, num(r.energy)),
                res,
                residual_tol,
            );
        }
        let res = residual_spacetime(&setup.potential, params.epsilon, &st.lifted, setup.kinetic)?;
        report.check(format!("residual {} (4x4)", st.name), res, residual_tol);
    }

    let blocks = random_blocks(
        cfg.config.verify.blocks.unwrap_or(10),
        cfg.config.verify.seed.unwrap_or(2024),
    );
    let probes: Vec<SampledBispinor> = if all.is_empty() {
        vec![probe_state(&setup.grid, &params, 7)?]
    } else {
        all.iter().take(3).map(|s| s.lifted.clone()).collect()
    };
    let mut worst: f64 = 0.0;
    for b in &blocks {
        let dv = perturbation_lift(b, &params);
        for s in &probes {
            let e = expectation(s, &dv)?;
            worst = worst.max(e.norm() / s.norm().powi(2));
        }
    }
    report.result(format!(
        "perturbation blocks: {} x {} states",
        blocks.len(),
        probes.len()
    ));
    report.check("perturbation expectation", worst, exp_tol);

    match &setup.detail {
        Detail::PoschlTeller { spec, disorder, .. } => {
            let top = (4.0 * spec.delta * spec.delta + 1e-9).floor() as usize;
            let ns: Vec<usize> = (0..=top).collect();
            let ks = linspace(-2.0 * spec.delta, 2.0 * spec.delta, 101);
            let table = pt_band_structure(spec.delta, &ns, &ks);
            let excess = table
                .iter()
                .map(|&(_, k, e)| e.abs() - continuum_edge(spec.delta, k))
                .fold(f64::NEG_INFINITY, f64::max);
            report.result(format!("band table: {} admissible points", table.len()));
            report.check(
                "band containment (max |E| - edge, must be negative)",
                excess,
                -f64::MIN_POSITIVE,
            );
            let layout = disorder_layout(&disorder.components);
            let dev = max_over(&points, |p| (layout.at(p) - setup.potential.at(p)).norm());
            report.check("published disorder components", dev, id_tol);
        }
        Detail::CrossedCombs { reducible } => {
            let zeros = max_over(&points, |p| {
                let m = setup.potential.at(p);
                [(0, 1), (0, 2), (1, 3), (2, 3)]
                    .iter()
                    .map(|&(i, j)| m[(i, j)].norm())
                    .fold(0.0, f64::max)
            });
            report.check("zero entries (1,2) (1,3) (2,4) (3,4)", zeros, id_tol);
            let (dv, dw) = reducible.printed_discrepancy(&points);
            report.note(format!(
                "published V_A differs from the assembled entry by up to {}; W+ by up to {}; the assembled entries are authoritative",
                num(dv),
                num(dw)
            ));
            report.note("localized states carry the time factor exp(-i m t), i.e. E = +m");
        }
        Detail::Soliton { params: p, delta } => {
            let f = soliton_mu_lambda(p, *delta);
            let fields = soliton_fields(p);
            let d2 = soliton_d2(p, *delta);
            let spread = max_over(&points, |q| (f.delta.at(q).re - delta).abs());
            report.check("Delta constant", spread, id_tol);
            let rel = max_over(&points, |q| (f.lambda.at(q) + f.mu.at(q) * 2.0).norm());
            report.check("lambda = -2 mu", rel, id_tol);
            let alt = max_over(&points, |q| {
                let a = (fields.a1.at(q).re * 3.0 - d2.at(q).re) / 4.0;
                (a - f.delta.at(q).re).abs()
            });
            report.check("Delta = (3 a1 - d2)/4", alt, id_tol);
            if all.len() == 2 {
                let ip = slice_inner(&all[0].lifted, &all[1].lifted);
                report.check("orthogonality on every time slice", ip, exp_tol);
            }
            let far = Point::new(0.0, 0.0, 60.0 / p.omega.abs().max(1e-3));
            report.result(format!(
                "t -> infinity: mu = {}, lambda = {} (m - Delta = {}, 2(Delta - m) = {})",
                num(f.mu.at(far).re),
                num(f.lambda.at(far).re),
                num(p.m - delta),
                num(2.0 * (delta - p.m))
            ));
        }
        Detail::Scenario2 { model } => {
            let s = cfg.section(&cfg.config.scenario2)?;
            let pt = pt_energy(&PoschlTellerParams::new(s.delta, s.k_y, s.n), branch(cfg, &s.branch)?)?;
            report.check(
                "psi energy equals the Poschl-Teller level",
                (model.energy_psi - pt).abs(),
                id_tol,
            );
            let mu = max_over(&points, |q| (model.fields.mu.at(q).re - s.v2 / 2.0).abs());
            report.check("mu = V2/2", mu, id_tol);
            let la = max_over(&points, |q| (model.fields.lambda.at(q).re + s.v2).abs());
            report.check("lambda = -V2", la, id_tol);
            let mut worst: f64 = 0.0;
            for st in &all {
                if let Some(r) = &st.reduced {
                    worst = worst.max((st.lifted.norm() - r.spinor.norm()).abs());
                }
            }
            report.check("lift preserves norm", worst, 1e-10);
        }
        Detail::Custom => {}
    }
    Ok(report)
}

/// Largest `|⟨a, b⟩|` over the time slices of a `(t, x)` grid.
fn slice_inner(a: &SampledBispinor, b: &SampledBispinor) -> f64 {
    let Some((tpos, tg)) = a.grid.axis_grid(Axis::T) else {
        return a.inner(b).map_or(f64::NAN, |z| z.norm());
    };
    let (_, xg) = a.grid.axis_grid(Axis::X).expect("x axis");
    let xgrid = Grid::line(Axis::X, xg);
    let (st, sx) = (a.grid.stride(tpos), a.grid.stride(1 - tpos));
    (0..tg.n)
        .map(|i| {
            let vals: Vec<C64> = (0..xg.n)
                .map(|j| {
                    let k = i * st + j * sx;
                    a.values[k].iter().zip(&b.values[k]).map(|(u, v)| u.conj() * v).sum()
                })
                .collect();
            dirac_reduce::numerics::quadrature(&vals, &xgrid).map_or(f64::NAN, |z| z.norm())
        })
        .fold(0.0, f64::max)
}

// ----------------------------------------------------------------- perturb

pub fn perturb(cfg: &LoadedConfig, out: &Path, tol: Option<f64>, flags: PerturbFlags) -> CliResult<Report> {
    let spec = cfg.config.perturb.clone().unwrap_or_default();
    let r = &cfg.config.reduction;
    let eps = match r.epsilon {
        Some(e) => Epsilon::try_from(e)?,
        None => Epsilon::Plus,
    };
    let params = if flags.spin_orbit {
        ReductionParams::new(FRAC_PI_4, FRAC_PI_2, Epsilon::Plus)
    } else if flags.bilayer {
        ReductionParams::new(r.tau.unwrap_or(FRAC_PI_4), 0.0, eps)
    } else {
        ReductionParams::new(r.tau.unwrap_or(FRAC_PI_4), r.phi.unwrap_or(0.0), eps)
    };
    let block = PerturbationBlock {
        v1: complex_field(cfg, &spec.v1)?,
        v2: complex_field(cfg, &spec.v2)?,
        v3: complex_field(cfg, &spec.v3)?,
        v4: complex_field(cfg, &spec.v4)?,
    };
    let dv = perturbation_lift(&block, &params);
    let grid = perturb_grid(cfg)?;
    let points = grid.points();
    let mut report = Report::new("perturb", cfg.config.model.name(), &cfg.text);
    if flags.spin_orbit {
        report.note("--spin-orbit: tau = pi/4, phi = pi/2, epsilon = 1");
    } else if flags.bilayer {
        report.note("--bilayer: phi = 0");
    }
    report.result(describe(&params));
    let origin = grid.point(0);
    let m = dv.at(origin);
    report.result(format!(
        "matrix at x = {}, y = {}, t = {}:",
        num(origin.x),
        num(origin.y),
        num(origin.t)
    ));
    for i in 0..4 {
        report.result(
            (0..4)
                .map(|j| format!("({}, {})", num(m[(i, j)].re), num(m[(i, j)].im)))
                .collect::<Vec<_>>()
                .join("  "),
        );
    }
    let path = out.join("perturbation.dat");
    write_matrix_field(&path, &sample(&dv, &points))?;
    report.file(&path, out);
    report.check("hermiticity", hermiticity_defect(&dv, &points), tol.unwrap_or(1e-12));
    Ok(report)
}

fn perturb_grid(cfg: &LoadedConfig) -> CliResult<Grid> {
    let spec = cfg.config.grid.clone().unwrap_or_default();
    let mut axes = Vec::new();
    for (a, s) in [(Axis::T, spec.t), (Axis::X, spec.x), (Axis::Y, spec.y)] {
        if let Some(s) = s {
            axes.push((a, Grid1D::new(s.min, s.max, s.n)?));
        }
    }
    match axes.as_slice() {
        [] => Ok(Grid::line(Axis::X, Grid1D::symmetric(1.0, 9)?)),
        [one] => Ok(Grid::line(one.0, one.1)),
        [a, b] => Ok(Grid::plane(*a, *b)?),
        _ => Err(CliError::Config {
            path: cfg.path.clone(),
            message: "at most two grid axes are supported".into(),
        }),
    }
}

/// Exit status of a finished report.
pub fn status(report: &Report) -> i32 {
    if report.passed() {
        crate::error::EXIT_PASS
    } else {
        crate::error::EXIT_VERIFY
    }
}

/// Run one command, writing outputs into `out`.
pub fn run(command: &str, cfg: &LoadedConfig, out: &Path, tol: Option<f64>, flags: PerturbFlags) -> CliResult<Report> {
    ensure_dir(out)?;
    match command {
        "spectrum" => spectrum(cfg, out, tol),
        "modes" => modes(cfg, out, tol),
        "assemble" => assemble(cfg, out, tol),
        "detect" => detect(cfg, out, tol),
        "verify" => verify(cfg, out, tol),
        "perturb" => perturb(cfg, out, tol, flags),
        other => unreachable!("clap restricts commands, got {other}"),
    }
}
