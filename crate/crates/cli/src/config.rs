//! Run configuration. Every table rejects unknown keys.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    PoschlTeller,
    CrossedCombs,
    Soliton,
    Scenario2,
    Custom,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::PoschlTeller => "poschl_teller",
            ModelKind::CrossedCombs => "crossed_combs",
            ModelKind::Soliton => "soliton",
            ModelKind::Scenario2 => "scenario2",
            ModelKind::Custom => "custom",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelKind,
    #[serde(default)]
    pub reduction: ReductionSpec,
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub tolerance: ToleranceSpec,
    pub poschl_teller: Option<PoschlTellerSpec>,
    pub crossed_combs: Option<CrossedCombSpec>,
    pub soliton: Option<SolitonSpec>,
    pub scenario2: Option<Scenario2Spec>,
    pub custom: Option<CustomSpec>,
    pub detect: Option<DetectSpec>,
    #[serde(default)]
    pub verify: VerifySpec,
    pub perturb: Option<PerturbSpec>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReductionSpec {
    pub tau: Option<f64>,
    pub phi: Option<f64>,
    pub epsilon: Option<i32>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x: Option<AxisSpec>,
    pub y: Option<AxisSpec>,
    pub t: Option<AxisSpec>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    /// Relative residual of closed-form states.
    pub residual: Option<f64>,
    /// Absolute error between closed-form and eigensolver levels.
    pub spectrum: Option<f64>,
    /// Pointwise identities between potentials.
    pub identity: Option<f64>,
    /// Relative first-order energy shifts.
    pub expectation: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoschlTellerSpec {
    pub delta: f64,
    /// Coupling of the second channel, varying along y.
    pub delta2: Option<f64>,
    #[serde(default = "default_k_y")]
    pub k_y: Vec<f64>,
    #[serde(default = "default_bands")]
    pub n: Vec<usize>,
    pub scheme: Option<String>,
    /// Eigensolver energy window; defaults to the gap.
    pub window: Option<[f64; 2]>,
    pub sweep: Option<SweepSpec>,
}

fn default_k_y() -> Vec<f64> {
    vec![0.0]
}

fn default_bands() -> Vec<usize> {
    vec![1, 2]
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossedCombSpec {
    pub m1: f64,
    pub omega1: f64,
    pub m2: f64,
    pub omega2: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolitonSpec {
    pub m: f64,
    pub omega: f64,
    /// The constant intrinsic coupling Δ.
    pub delta: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario2Spec {
    pub delta: f64,
    pub k_y: f64,
    pub v2: f64,
    pub n: usize,
    pub branch: Option<String>,
}

/// One term `amplitude · shape((coord − shift) / scale)`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub shape: String,
    pub axis: Option<String>,
    pub amplitude: f64,
    pub scale: Option<f64>,
    pub shift: Option<f64>,
}

/// A real profile: a constant or a sum of terms.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ProfileSpec {
    Constant(f64),
    Terms(Vec<TermSpec>),
}

impl Default for ProfileSpec {
    fn default() -> Self {
        ProfileSpec::Constant(0.0)
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexProfileSpec {
    #[serde(default)]
    pub re: ProfileSpec,
    #[serde(default)]
    pub im: ProfileSpec,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReducedSpec {
    #[serde(default)]
    pub a: ProfileSpec,
    #[serde(default)]
    pub b: ComplexProfileSpec,
    #[serde(default)]
    pub d: ProfileSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomSpec {
    #[serde(default)]
    pub first: ReducedSpec,
    #[serde(default)]
    pub second: ReducedSpec,
    pub kinetic: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectSpec {
    /// Potential file as written by `assemble`.
    pub input: PathBuf,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySpec {
    /// Potential file to check against the configured reduction.
    pub stored_potential: Option<PathBuf>,
    /// Random perturbation blocks per lifted state.
    pub blocks: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbSpec {
    #[serde(default)]
    pub v1: ComplexProfileSpec,
    #[serde(default)]
    pub v2: ComplexProfileSpec,
    #[serde(default)]
    pub v3: ComplexProfileSpec,
    #[serde(default)]
    pub v4: ComplexProfileSpec,
}

/// A parsed config with the text it came from, echoed into reports.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub path: PathBuf,
    pub text: String,
    pub config: RunConfig,
}

impl LoadedConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let config = parse(&text).map_err(|message| CliError::Config {
            path: path.to_path_buf(),
            message,
        })?;
        Ok(Self {
            path: path.to_path_buf(),
            text,
            config,
        })
    }

    /// Resolve a path given in the config relative to the config's directory.
    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.path.parent().unwrap_or(Path::new(".")).join(p)
        }
    }

    /// The model section, which must be present for the selected model.
    pub fn section<'a, T>(&self, section: &'a Option<T>) -> CliResult<&'a T> {
        section.as_ref().ok_or_else(|| CliError::Config {
            path: self.path.clone(),
            message: format!(
                "model '{}' needs a [{}] table",
                self.config.model.name(),
                self.config.model.name()
            ),
        })
    }
}

pub fn parse(text: &str) -> Result<RunConfig, String> {
    toml::from_str(text).map_err(|e| e.to_string())
}
