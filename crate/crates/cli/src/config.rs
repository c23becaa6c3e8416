//! Experiment configuration files.
//!
//! The format is TOML with dotted sections, e.g.
//!
//! ```toml
//! seed = 7
//! n_paths = 20000
//! grid = [0.5, 1.0, 2.0]
//!
//! [spec]
//! kind = "stable_line"
//! alpha = 1.5
//!
//! [[tests]]
//! kind = "idt"
//! n = 2
//! ```

use std::path::{Path, PathBuf};

use idtlab::statlab::{EcfDesign, IdtMode, TestKind, ThetaGrid};
use idtlab::{LevyFamily, ProcessSpec, TimeGrid};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const MIN_PATHS: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub n_paths: usize,
    pub grid: Vec<f64>,
    pub spec: ProcessSpec,
    #[serde(default)]
    pub tests: Vec<TestDescriptor>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// A path to a calibration table, or the word `calibrate`.
    #[serde(default = "default_threshold_table")]
    pub threshold_table: String,
    #[serde(default)]
    pub calibration: CalibrationSettings,
    /// Ensemble files to write: `csv`, `binary`.
    #[serde(default)]
    pub export: Vec<ExportFormat>,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("idtlab-out")
}

fn default_threshold_table() -> String {
    "calibrate".to_string()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExportFormat {
    Csv,
    Binary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationSettings {
    #[serde(default = "default_reps")]
    pub reps: usize,
    /// Quantile used to pick thresholds in `run`.
    #[serde(default = "default_quantile")]
    pub quantile: f64,
    /// Quantiles written by `calibrate`; defaults to `[quantile]`.
    #[serde(default)]
    pub quantiles: Vec<f64>,
    /// Base seed of the null repetitions; derived from `seed` when absent.
    #[serde(default)]
    pub seed: Option<u64>,
}

fn default_reps() -> usize {
    200
}

fn default_quantile() -> f64 {
    0.99
}

impl Default for CalibrationSettings {
    fn default() -> Self {
        Self { reps: default_reps(), quantile: default_quantile(), quantiles: Vec::new(), seed: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKindName {
    Idt,
    Selfsimilarity,
    Stability,
    TemporalSd,
    Stationarity,
    Association,
}

/// One `[[tests]]` entry. Which fields are required depends on `kind`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestDescriptor {
    pub kind: TestKindName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<IdtMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<LevyFamily>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<f64>,
    /// Grid indices probed by the θ design; all by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<usize>>,
    /// Explicit threshold; bypasses the calibration table.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
}

/// A test descriptor with every parameter resolved.
#[derive(Clone, Debug, PartialEq)]
pub enum ResolvedTest {
    Distance { kind: TestKind, design: EcfDesign },
    Association { family: LevyFamily, alpha: f64, level: f64 },
}

impl TestDescriptor {
    pub fn label(&self, index: usize) -> String {
        self.name.clone().unwrap_or_else(|| format!("{:02}_{}", index, self.kind_str()))
    }

    pub fn kind_str(&self) -> &'static str {
        match self.kind {
            TestKindName::Idt => "idt",
            TestKindName::Selfsimilarity => "selfsimilarity",
            TestKindName::Stability => "stability",
            TestKindName::TemporalSd => "temporal_sd",
            TestKindName::Stationarity => "stationarity",
            TestKindName::Association => "association",
        }
    }

    /// Fills in defaults and checks required fields. `field` names the
    /// config location in error messages, e.g. `tests[2]`.
    pub fn resolve(&self, field: &str, cfg: &ExperimentConfig, grid: &TimeGrid) -> CliResult<ResolvedTest> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| CliError::Config(format!("{field}.{name} is required for kind = \"{}\"", self.kind_str())))
        };
        let exponent = cfg.spec.idt_exponent();
        let kind = match self.kind {
            TestKindName::Idt => TestKind::Idt {
                alpha: self.alpha.unwrap_or(exponent),
                n: self.n.ok_or_else(|| CliError::Config(format!("{field}.n is required for kind = \"idt\"")))?,
                mode: self.mode.unwrap_or_default(),
            },
            TestKindName::Selfsimilarity => TestKind::SelfSimilarity { h: need(self.h, "h")?, a: need(self.a, "a")? },
            TestKindName::Stability => TestKind::Stability {
                beta: need(self.beta, "beta")?,
                n: self.n.ok_or_else(|| CliError::Config(format!("{field}.n is required for kind = \"stability\"")))?,
            },
            TestKindName::TemporalSd => TestKind::TemporalSd { alpha: self.alpha.unwrap_or(exponent), b: need(self.b, "b")? },
            TestKindName::Stationarity => TestKind::Stationarity {
                alpha: self.alpha.unwrap_or(exponent),
                y_grid: self
                    .y_grid
                    .clone()
                    .ok_or_else(|| CliError::Config(format!("{field}.y_grid is required for kind = \"stationarity\"")))?,
                window: self.window.unwrap_or(2),
                shift: self.shift.unwrap_or(1),
            },
            TestKindName::Association => {
                let family = self
                    .family
                    .clone()
                    .ok_or_else(|| CliError::Config(format!("{field}.family is required for kind = \"association\"")))?;
                family.validate().map_err(|e| CliError::Config(format!("{field}.family: {e}")))?;
                return Ok(ResolvedTest::Association {
                    family,
                    alpha: self.alpha.unwrap_or(exponent),
                    level: self.level.unwrap_or(0.01),
                });
            }
        };
        let times: Vec<usize> = self.times.clone().unwrap_or_else(|| (0..grid.len()).collect());
        let probes = ThetaGrid::standard(&times).map_err(|e| CliError::Config(format!("{field}.times: {e}")))?;
        let design = EcfDesign::new(grid.clone(), probes, cfg.n_paths).map_err(|e| CliError::Config(format!("{field}.times: {e}")))?;
        Ok(ResolvedTest::Distance { kind, design })
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Checks everything that can be checked without running a test and
    /// returns the time grid.
    pub fn validate(&self) -> CliResult<TimeGrid> {
        if self.n_paths < MIN_PATHS {
            return Err(CliError::Config(format!("n_paths must be at least {MIN_PATHS}, got {}", self.n_paths)));
        }
        let grid = TimeGrid::new(self.grid.clone()).map_err(|e| CliError::Config(format!("grid: {e}")))?;
        self.spec.validate().map_err(|e| CliError::Config(format!("spec: {e}")))?;
        if !(self.calibration.quantile > 0.0 && self.calibration.quantile <= 1.0) {
            return Err(CliError::Config("calibration.quantile must lie in (0, 1]".into()));
        }
        for (i, t) in self.tests.iter().enumerate() {
            t.resolve(&format!("tests[{i}]"), self, &grid)?;
        }
        Ok(grid)
    }

    pub fn calibration_seed(&self) -> u64 {
        self.calibration.seed.unwrap_or_else(|| idtlab::randkit::derive_seed(self.seed, 0xca11_b8a7e))
    }

    pub fn calibration_quantiles(&self) -> Vec<f64> {
        if self.calibration.quantiles.is_empty() {
            vec![self.calibration.quantile]
        } else {
            self.calibration.quantiles.clone()
        }
    }

    pub fn uses_calibration(&self) -> bool {
        self.threshold_table == "calibrate"
    }
}
