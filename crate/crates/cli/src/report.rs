//! Plain-text run report. Everything except the final timing line is a
//! deterministic function of the config.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{CliError, CliResult};

/// Name of the line excluded from byte-identity comparisons.
pub const TIMING_PREFIX: &str = "timing:";

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub model: String,
    pub config_text: String,
    pub results: Vec<String>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub files: Vec<String>,
}

impl Report {
    pub fn new(command: &str, model: &str, config_text: &str) -> Self {
        Self {
            command: command.into(),
            model: model.into(),
            config_text: config_text.into(),
            results: Vec::new(),
            checks: Vec::new(),
            notes: Vec::new(),
            files: Vec::new(),
        }
    }

    pub fn result(&mut self, line: impl Into<String>) {
        self.results.push(line.into());
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.notes.push(line.into());
    }

    /// Record `value ≤ threshold`; NaN fails.
    pub fn check(&mut self, name: impl Into<String>, value: f64, threshold: f64) -> bool {
        let pass = value <= threshold;
        self.checks.push(Check {
            name: name.into(),
            value,
            threshold,
            pass,
        });
        pass
    }

    pub fn file(&mut self, path: &Path, out_dir: &Path) {
        let shown = path.strip_prefix(out_dir).unwrap_or(path);
        self.files.push(shown.display().to_string());
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Report text without the timing line.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "dirac-reduce {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(s, "command: {}", self.command);
        let _ = writeln!(s, "model: {}", self.model);
        s.push_str("inputs:\n");
        for l in self.config_text.lines() {
            let _ = writeln!(s, "  | {l}");
        }
        let mut section = |title: &str, lines: &[String]| {
            if !lines.is_empty() {
                let _ = writeln!(s, "{title}:");
                for l in lines {
                    let _ = writeln!(s, "  {l}");
                }
            }
        };
        section("results", &self.results);
        let checks: Vec<String> = self
            .checks
            .iter()
            .map(|c| {
                format!(
                    "{}  {}  value={:.6e}  threshold={:.3e}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.value,
                    c.threshold
                )
            })
            .collect();
        section("checks", &checks);
        section("notes", &self.notes);
        section("files", &self.files);
        let _ = writeln!(s, "status: {}", if self.passed() { "PASS" } else { "FAIL" });
        s
    }

    /// Print to stdout and write `report.txt` in `out_dir`.
    pub fn emit(&self, out_dir: &Path, seconds: f64) -> CliResult<()> {
        let text = format!("{}{TIMING_PREFIX} {seconds:.3} s\n", self.render());
        print!("{text}");
        let path = out_dir.join("report.txt");
        std::fs::write(&path, text).map_err(|source| CliError::Write { path, source })
    }
}
