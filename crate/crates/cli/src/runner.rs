//! The subcommands.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use idtlab::processes::{generate, io};
use idtlab::statlab::{association_test, calibrate, empirical_quantile, EcfDesign, TestKind};
use idtlab::{RngState, TestReport, TimeGrid};
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, ExportFormat, ResolvedTest};
use crate::error::{CliError, CliResult};
use crate::fsio::write_atomic;
use crate::table::{TableEntry, TableKey, ThresholdTable};

/// Command-line overrides of config fields.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub n_paths: Option<usize>,
    pub output_dir: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(n) = self.n_paths {
            cfg.n_paths = n;
        }
        if let Some(d) = &self.output_dir {
            cfg.output_dir = d.clone();
        }
    }
}

/// Loads a config, applies overrides, and resolves relative paths in it
/// against the config file's directory.
pub fn load_config(path: &Path, overrides: &Overrides) -> CliResult<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(path)?;
    let base = path.parent().unwrap_or(Path::new(""));
    if cfg.threshold_table != "calibrate" && Path::new(&cfg.threshold_table).is_relative() {
        cfg.threshold_table = base.join(&cfg.threshold_table).to_string_lossy().into_owned();
    }
    if cfg.output_dir.is_relative() && overrides.output_dir.is_none() {
        cfg.output_dir = base.join(&cfg.output_dir);
    }
    overrides.apply(&mut cfg);
    Ok(cfg)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryLine {
    pub name: String,
    pub file: String,
    pub pass: bool,
    pub statistic: f64,
    pub threshold: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub all_pass: bool,
    pub n_tests: usize,
    pub n_pass: usize,
    pub seed: u64,
    pub tests: Vec<SummaryLine>,
}

impl Summary {
    pub fn exit_code(&self) -> u8 {
        if self.all_pass {
            0
        } else {
            1
        }
    }
}

/// Replaces the hypothesis parameter with the null value implied by the
/// spec, where the spec determines one.
pub fn null_kind(cfg: &ExperimentConfig, kind: &TestKind) -> TestKind {
    let exponent = cfg.spec.idt_exponent();
    match kind.clone() {
        TestKind::Idt { n, mode, .. } => TestKind::Idt { alpha: exponent, n, mode },
        TestKind::TemporalSd { b, .. } => TestKind::TemporalSd { alpha: exponent, b },
        TestKind::Stationarity { y_grid, window, shift, .. } => TestKind::Stationarity { alpha: exponent, y_grid, window, shift },
        other => other,
    }
}

fn embedded_config(cfg: &ExperimentConfig) -> serde_json::Value {
    // The output location never influences a number, and leaving it out
    // keeps reports comparable across output directories.
    let mut v = serde_json::to_value(cfg).expect("config serializes");
    if let Some(obj) = v.as_object_mut() {
        obj.remove("output_dir");
    }
    v
}

struct ThresholdChoice {
    value: f64,
    source: serde_json::Value,
}

fn choose_threshold(
    cfg: &ExperimentConfig,
    field: &str,
    explicit: Option<f64>,
    kind: &TestKind,
    design: &EcfDesign,
    table: Option<&ThresholdTable>,
) -> CliResult<ThresholdChoice> {
    if let Some(t) = explicit {
        return Ok(ThresholdChoice { value: t, source: serde_json::json!({"kind": "explicit"}) });
    }
    let q = cfg.calibration.quantile;
    let null = null_kind(cfg, kind);
    match table {
        Some(table) => {
            let key = TableKey::new(&cfg.spec, &null, design, q);
            let entry = table.lookup(&key).ok_or_else(|| {
                CliError::Config(format!(
                    "{field}: threshold_table {} has no entry for test {} ({}) with this spec, grid, n_paths = {} and quantile {q}; \
                     run `idtlab calibrate` first",
                    cfg.threshold_table, key.test, key.params, cfg.n_paths
                ))
            })?;
            Ok(ThresholdChoice {
                value: entry.threshold,
                source: serde_json::json!({
                    "kind": "table",
                    "quantile": q,
                    "n_reps": entry.n_reps,
                    "seed": entry.seed,
                    "null_kind": entry.null_kind,
                }),
            })
        }
        None => {
            let seed = cfg.calibration_seed();
            let c = calibrate(&cfg.spec, &null, design, cfg.calibration.reps, q, seed)?;
            Ok(ThresholdChoice {
                value: c.threshold,
                source: serde_json::json!({
                    "kind": "calibrated",
                    "quantile": q,
                    "n_reps": c.n_reps,
                    "seed": seed,
                    "null_kind": null,
                }),
            })
        }
    }
}

/// Runs every test of `cfg`, writes the reports and returns the summary.
pub fn run(cfg: &ExperimentConfig) -> CliResult<Summary> {
    let grid = cfg.validate()?;
    let table = if cfg.uses_calibration() { None } else { Some(ThresholdTable::load(Path::new(&cfg.threshold_table))?) };
    let embedded = embedded_config(cfg);
    let out = &cfg.output_dir;
    let mut lines = Vec::with_capacity(cfg.tests.len());
    let mut tap = format!("1..{}\n", cfg.tests.len());

    for (i, desc) in cfg.tests.iter().enumerate() {
        let field = format!("tests[{i}]");
        let rng = RngState::new(cfg.seed, i as u64);
        let report = match desc.resolve(&field, cfg, &grid)? {
            ResolvedTest::Distance { kind, design } => {
                let thr = choose_threshold(cfg, &field, desc.threshold, &kind, &design, table.as_ref())?;
                kind.run(&cfg.spec, &design, &rng, thr.value)?.with_detail("threshold_source", thr.source)
            }
            ResolvedTest::Association { family, alpha, level } => {
                association_test(&cfg.spec, &family, alpha, grid.points(), cfg.n_paths, &rng, level)?
            }
        };
        let label = desc.label(i);
        let report = report.with_detail("label", &label).with_detail("config", &embedded);
        let file = format!("reports/{label}.json");
        write_atomic(&out.join(&file), report.to_json().as_bytes())?;
        tap.push_str(&report.to_tap(i + 1));
        tap.push('\n');
        lines.push(SummaryLine { name: label, file, pass: report.pass, statistic: report.statistic, threshold: report.threshold });
    }

    if !cfg.export.is_empty() {
        export_with_grid(cfg, &grid)?;
    }

    let n_pass = lines.iter().filter(|l| l.pass).count();
    let summary = Summary { all_pass: n_pass == lines.len(), n_tests: lines.len(), n_pass, seed: cfg.seed, tests: lines };
    let mut json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    json.push('\n');
    write_atomic(&out.join("summary.json"), json.as_bytes())?;
    write_atomic(&out.join("summary.tap"), tap.as_bytes())?;
    Ok(summary)
}

/// Calibrates every distance test of `cfg` under its null and merges the
/// thresholds into the table. Returns the table path.
pub fn calibrate_cmd(cfg: &ExperimentConfig) -> CliResult<PathBuf> {
    let grid = cfg.validate()?;
    let path = if cfg.uses_calibration() { cfg.output_dir.join("thresholds.json") } else { PathBuf::from(&cfg.threshold_table) };
    let mut table = ThresholdTable::load_or_default(&path)?;
    let quantiles = cfg.calibration_quantiles();
    for q in &quantiles {
        if !(*q > 0.0 && *q <= 1.0) {
            return Err(CliError::Config(format!("calibration.quantiles: {q} is outside (0, 1]")));
        }
    }
    let seed = cfg.calibration_seed();
    let mut done = BTreeSet::new();
    for (i, desc) in cfg.tests.iter().enumerate() {
        let ResolvedTest::Distance { kind, design } = desc.resolve(&format!("tests[{i}]"), cfg, &grid)? else {
            continue;
        };
        let null = null_kind(cfg, &kind);
        let tag = serde_json::to_string(&(TableKey::new(&cfg.spec, &null, &design, 0.0), &null)).expect("key serializes");
        if !done.insert(tag) {
            continue;
        }
        let max_q = quantiles.iter().copied().fold(0.0, f64::max);
        let c = calibrate(&cfg.spec, &null, &design, cfg.calibration.reps, max_q, seed)?;
        for &q in &quantiles {
            let threshold = empirical_quantile(&c.statistics, q)?;
            table.upsert(TableEntry {
                key: TableKey::new(&cfg.spec, &null, &design, q),
                null_kind: null.clone(),
                n_reps: c.n_reps,
                seed,
                threshold,
            });
        }
    }
    table.save(&path)?;
    Ok(path)
}

fn export_with_grid(cfg: &ExperimentConfig, grid: &TimeGrid) -> CliResult<Vec<PathBuf>> {
    let e = generate(&cfg.spec, grid, cfg.n_paths, &RngState::from_seed(cfg.seed))?;
    let formats = if cfg.export.is_empty() { vec![ExportFormat::Csv, ExportFormat::Binary] } else { cfg.export.clone() };
    let mut written = Vec::new();
    for f in formats {
        let (name, bytes) = match f {
            ExportFormat::Csv => {
                let mut buf = Vec::new();
                io::write_csv(&e, &mut buf)?;
                ("paths.csv", buf)
            }
            ExportFormat::Binary => {
                let mut buf = Vec::new();
                io::write_binary(&e, &mut buf)?;
                ("paths.idt", buf)
            }
        };
        let path = cfg.output_dir.join(name);
        write_atomic(&path, &bytes)?;
        written.push(path);
    }
    Ok(written)
}

/// Writes the ensemble of `cfg` (seeded by `cfg.seed`) in the configured
/// formats, or both when none are configured.
pub fn export_paths(cfg: &ExperimentConfig) -> CliResult<Vec<PathBuf>> {
    let grid = cfg.validate()?;
    export_with_grid(cfg, &grid)
}

/// Renders the summary in `dir` as TAP plus a short table.
pub fn report(dir: &Path) -> CliResult<(String, Summary)> {
    let path = dir.join("summary.json");
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let summary: Summary = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let mut out = format!("1..{}\n", summary.n_tests);
    for (i, line) in summary.tests.iter().enumerate() {
        let rp = dir.join(&line.file);
        let text = std::fs::read_to_string(&rp).map_err(|e| CliError::io(&rp, e))?;
        let rep = TestReport::from_json(&text).map_err(|e| CliError::Config(format!("{}: {e}", rp.display())))?;
        out.push_str(&rep.to_tap(i + 1));
        out.push('\n');
    }
    let width = summary.tests.iter().map(|l| l.name.len()).max().unwrap_or(4).max(4);
    out.push_str(&format!("\n{:<width$}  {:>6}  {:>12}  {:>12}\n", "test", "result", "statistic", "threshold"));
    for line in &summary.tests {
        out.push_str(&format!(
            "{:<width$}  {:>6}  {:>12.6}  {:>12.6}\n",
            line.name,
            if line.pass { "pass" } else { "FAIL" },
            line.statistic,
            line.threshold
        ));
    }
    out.push_str(&format!("{} of {} tests passed\n", summary.n_pass, summary.n_tests));
    Ok((out, summary))
}
