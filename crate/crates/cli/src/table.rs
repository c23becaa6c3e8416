//! Versioned calibration tables.
//!
//! An entry is keyed by the test kind with its structural parameters, the
//! null spec, the grid, the ensemble size, the θ design and the quantile.
//! Hypothesis parameters (the exponent under test, `h`, `β`) are not part
//! of the key: a negative control looks up the threshold calibrated under
//! the true null.

use std::path::Path;

use idtlab::statlab::{EcfDesign, TestKind};
use idtlab::ProcessSpec;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::fsio::write_atomic;

pub const TABLE_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableKey {
    pub test: String,
    pub params: String,
    pub spec: ProcessSpec,
    pub grid: Vec<f64>,
    pub n_paths: usize,
    pub theta_grid: String,
    pub probe_times: Vec<usize>,
    pub quantile: f64,
}

impl TableKey {
    pub fn new(spec: &ProcessSpec, kind: &TestKind, design: &EcfDesign, quantile: f64) -> Self {
        let params = match kind {
            TestKind::Idt { n, mode, .. } => format!("n={n},mode={}", serde_json::to_value(mode).unwrap().as_str().unwrap_or("")),
            TestKind::SelfSimilarity { a, .. } => format!("a={a}"),
            TestKind::Stability { n, .. } => format!("n={n}"),
            TestKind::TemporalSd { b, .. } => format!("b={b}"),
            TestKind::Stationarity { y_grid, window, shift, .. } => format!("y_grid={y_grid:?},window={window},shift={shift}"),
        };
        let mut probe_times: Vec<usize> = design.probes.probes.iter().flat_map(|p| p.times.iter().copied()).collect();
        probe_times.sort_unstable();
        probe_times.dedup();
        Self {
            test: kind.name().to_string(),
            params,
            spec: spec.clone(),
            grid: design.grid.points().to_vec(),
            n_paths: design.n_paths,
            theta_grid: design.probes.id.clone(),
            probe_times,
            quantile,
        }
    }

    fn sort_key(&self) -> String {
        format!(
            "{}|{}|{}|{:?}|{}|{}|{:?}|{:.6}",
            self.test,
            self.params,
            self.spec.canonical(),
            self.grid,
            self.n_paths,
            self.theta_grid,
            self.probe_times,
            self.quantile
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableEntry {
    #[serde(flatten)]
    pub key: TableKey,
    /// The test parameters the null statistics were computed with.
    pub null_kind: TestKind,
    pub n_reps: usize,
    pub seed: u64,
    pub threshold: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdTable {
    pub version: u32,
    pub entries: Vec<TableEntry>,
}

impl Default for ThresholdTable {
    fn default() -> Self {
        Self { version: TABLE_VERSION, entries: Vec::new() }
    }
}

impl ThresholdTable {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let table: ThresholdTable =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("threshold_table {}: {e}", path.display())))?;
        if table.version != TABLE_VERSION {
            return Err(CliError::Config(format!(
                "threshold_table {}: unsupported version {} (expected {TABLE_VERSION})",
                path.display(),
                table.version
            )));
        }
        Ok(table)
    }

    /// Loads `path` if it exists, otherwise starts an empty table.
    pub fn load_or_default(path: &Path) -> CliResult<Self> {
        if path.exists() {
            Self::load(path)
        } else {
            Ok(Self::default())
        }
    }

    pub fn lookup(&self, key: &TableKey) -> Option<&TableEntry> {
        self.entries.iter().find(|e| &e.key == key)
    }

    /// Inserts or replaces the entry with the same key; entries stay sorted.
    pub fn upsert(&mut self, entry: TableEntry) {
        self.entries.retain(|e| e.key != entry.key);
        self.entries.push(entry);
        self.entries.sort_by_key(|e| e.key.sort_key());
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("table serializes");
        s.push('\n');
        s
    }

    pub fn save(&self, path: &Path) -> CliResult<()> {
        write_atomic(path, self.to_json().as_bytes())
    }
}
