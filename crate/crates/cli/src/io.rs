//! Text formats. Numbers are written with 17 significant digits so files
//! round-trip exactly; tables have one header line and space-separated
//! columns.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use dirac_reduce::algebra::{Mat4, Point, HERMITIAN_TOL};
use dirac_reduce::numerics::{Axis, Grid, Sampled};
use dirac_reduce::C64;

use crate::error::{CliError, CliResult};

/// Full-precision scientific notation.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub struct Table {
    path: PathBuf,
    out: BufWriter<File>,
    sep: &'static str,
}

impl Table {
    fn create(path: &Path, header: &[String], sep: &'static str) -> CliResult<Self> {
        let file = File::create(path).map_err(|source| CliError::Write {
            path: path.to_path_buf(),
            source,
        })?;
        let mut t = Self {
            path: path.to_path_buf(),
            out: BufWriter::new(file),
            sep,
        };
        t.line(&header.join(sep))?;
        Ok(t)
    }

    /// Whitespace-separated field file.
    pub fn field(path: &Path, header: &[String]) -> CliResult<Self> {
        Self::create(path, header, " ")
    }

    pub fn csv(path: &Path, header: &[String]) -> CliResult<Self> {
        Self::create(path, header, ",")
    }

    fn line(&mut self, s: &str) -> CliResult<()> {
        writeln!(self.out, "{s}").map_err(|source| CliError::Write {
            path: self.path.clone(),
            source,
        })
    }

    pub fn row(&mut self, cells: &[String]) -> CliResult<()> {
        let s = cells.join(self.sep);
        self.line(&s)
    }

    pub fn finish(mut self) -> CliResult<()> {
        self.out.flush().map_err(|source| CliError::Write {
            path: self.path.clone(),
            source,
        })
    }
}

pub fn headers(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// Coordinate column names of a grid, in axis order.
pub fn coord_names(grid: &Grid) -> Vec<String> {
    grid.axes().iter().map(|(a, _)| a.name().to_string()).collect()
}

fn coords(grid: &Grid, p: Point) -> Vec<String> {
    grid.axes()
        .iter()
        .map(|(a, _)| match a {
            Axis::X => num(p.x),
            Axis::Y => num(p.y),
            Axis::T => num(p.t),
        })
        .collect()
}

/// One file per component (`<stem>_c<k>.dat`: coordinates, Re, Im) and a
/// density file (`<stem>_density.dat`). Returns the written paths.
pub fn write_state<const C: usize>(dir: &Path, stem: &str, s: &Sampled<C>) -> CliResult<Vec<PathBuf>> {
    let points = s.grid.points();
    let mut written = Vec::new();
    for c in 0..C {
        let path = dir.join(format!("{stem}_c{}.dat", c + 1));
        let mut h = coord_names(&s.grid);
        h.extend(headers(&["re", "im"]));
        let mut t = Table::field(&path, &h)?;
        for (k, p) in points.iter().enumerate() {
            let mut row = coords(&s.grid, *p);
            row.push(num(s.values[k][c].re));
            row.push(num(s.values[k][c].im));
            t.row(&row)?;
        }
        t.finish()?;
        written.push(path);
    }
    let path = dir.join(format!("{stem}_density.dat"));
    let mut h = coord_names(&s.grid);
    h.push("density".into());
    let mut t = Table::field(&path, &h)?;
    for (p, d) in points.iter().zip(s.density()) {
        let mut row = coords(&s.grid, *p);
        row.push(num(d));
        t.row(&row)?;
    }
    t.finish()?;
    written.push(path);
    Ok(written)
}

fn matrix_header() -> Vec<String> {
    let mut h = headers(&["x", "y", "t"]);
    for i in 1..=4 {
        for j in 1..=4 {
            h.push(format!("V{i}{j}_re"));
            h.push(format!("V{i}{j}_im"));
        }
    }
    h
}

/// All sixteen entries at every point, row-major within each line.
pub fn write_matrix_field(path: &Path, samples: &[(Point, Mat4)]) -> CliResult<()> {
    let mut t = Table::field(path, &matrix_header())?;
    for (p, m) in samples {
        let mut row = vec![num(p.x), num(p.y), num(p.t)];
        for i in 0..4 {
            for j in 0..4 {
                row.push(num(m[(i, j)].re));
                row.push(num(m[(i, j)].im));
            }
        }
        t.row(&row)?;
    }
    t.finish()
}

/// Read a file written by [`write_matrix_field`] and require every sample
/// to be Hermitian.
pub fn read_matrix_field(path: &Path) -> CliResult<Vec<(Point, Mat4)>> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let parse_err = |line: usize, message: String| CliError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    let expected = matrix_header();
    match lines.next() {
        Some((_, h)) if h.split_whitespace().eq(expected.iter().map(String::as_str)) => {}
        Some(_) => return Err(parse_err(1, format!("header must be '{}'", expected.join(" ")))),
        None => return Err(parse_err(1, "empty file".into())),
    }
    let mut out = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != expected.len() {
            return Err(parse_err(
                lineno,
                format!("expected {} fields, found {}", expected.len(), fields.len()),
            ));
        }
        let mut vals = Vec::with_capacity(fields.len());
        for (col, f) in fields.iter().enumerate() {
            let v: f64 = f.parse().map_err(|_| {
                parse_err(
                    lineno,
                    format!("field {} ('{}'): '{f}' is not a number", col + 1, expected[col]),
                )
            })?;
            if !v.is_finite() {
                return Err(parse_err(
                    lineno,
                    format!("field {} ('{}') is not finite", col + 1, expected[col]),
                ));
            }
            vals.push(v);
        }
        let p = Point::new(vals[0], vals[1], vals[2]);
        let m = Mat4::from_fn(|i, j| C64::new(vals[3 + 2 * (4 * i + j)], vals[4 + 2 * (4 * i + j)]));
        out.push((p, m));
    }
    if out.is_empty() {
        return Err(parse_err(2, "no samples".into()));
    }
    for (k, (_, m)) in out.iter().enumerate() {
        let scale = 1.0 + m.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for i in 0..4 {
            for j in i..4 {
                let dev = (m[(i, j)] - m[(j, i)].conj()).norm();
                if dev > HERMITIAN_TOL * scale {
                    let err = dirac_reduce::Error::NotHermitian {
                        point: k,
                        row: i,
                        col: j,
                        deviation: dev,
                    };
                    return Err(CliError::BadInput {
                        path: path.to_path_buf(),
                        message: format!("{err} (data line {})", k + 2),
                    });
                }
            }
        }
    }
    Ok(out)
}

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Write {
        path: dir.to_path_buf(),
        source,
    })
}
