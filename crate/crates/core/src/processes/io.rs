//! Ensemble file formats.
//!
//! CSV: a header row `t=<time>` per column, then one row per path.
//!
//! Binary: the magic bytes `IDT1`, a little-endian `u64` header length, a
//! JSON header (grid, shape, spec, seed, metadata), then the values as
//! little-endian `f64` in row-major order.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{IdtError, Result};
use crate::grid::TimeGrid;
use crate::processes::ensemble::PathEnsemble;
use crate::processes::spec::ProcessSpec;

pub const MAGIC: &[u8; 4] = b"IDT1";

/// Grid and values read back from a CSV export (CSV carries no metadata).
#[derive(Clone, Debug, PartialEq)]
pub struct CsvPaths {
    pub grid: TimeGrid,
    pub n_paths: usize,
    pub values: Vec<f64>,
}

fn fmt_err(e: impl std::fmt::Display) -> IdtError {
    IdtError::Format(e.to_string())
}

pub fn write_csv<W: Write>(e: &PathEnsemble, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(e.grid().points().iter().map(|t| format!("t={t}")))
        .map_err(fmt_err)?;
    for row in e.rows() {
        w.write_record(row.iter().map(|v| format!("{v:?}"))).map_err(fmt_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<CsvPaths> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(fmt_err)?.clone();
    let times = header
        .iter()
        .map(|h| {
            h.strip_prefix("t=")
                .ok_or_else(|| IdtError::Format(format!("bad CSV header field {h:?}")))?
                .parse::<f64>()
                .map_err(fmt_err)
        })
        .collect::<Result<Vec<_>>>()?;
    let grid = TimeGrid::new(times)?;
    let mut values = Vec::new();
    let mut n_paths = 0;
    for rec in r.records() {
        let rec = rec.map_err(fmt_err)?;
        for f in rec.iter() {
            values.push(f.parse::<f64>().map_err(fmt_err)?);
        }
        n_paths += 1;
    }
    Ok(CsvPaths { grid, n_paths, values })
}

#[derive(Serialize, Deserialize)]
struct BinaryHeader {
    format_version: u32,
    n_paths: usize,
    n_times: usize,
    grid: TimeGrid,
    spec: ProcessSpec,
    seed: u64,
    meta: BTreeMap<String, String>,
}

pub fn write_binary<W: Write>(e: &PathEnsemble, mut out: W) -> Result<()> {
    let header = BinaryHeader {
        format_version: 1,
        n_paths: e.n_paths(),
        n_times: e.n_times(),
        grid: e.grid().clone(),
        spec: e.spec().clone(),
        seed: e.seed(),
        meta: e.meta().clone(),
    };
    let json = serde_json::to_vec(&header).map_err(fmt_err)?;
    out.write_all(MAGIC)?;
    out.write_all(&(json.len() as u64).to_le_bytes())?;
    out.write_all(&json)?;
    let mut buf = Vec::with_capacity(8 * e.values().len());
    for v in e.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    out.write_all(&buf)?;
    out.flush()?;
    Ok(())
}

pub fn read_binary<R: Read>(mut input: R) -> Result<PathEnsemble> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(IdtError::Format(format!("bad magic {magic:?}, expected IDT1")));
    }
    let mut len = [0u8; 8];
    input.read_exact(&mut len)?;
    let len = u64::from_le_bytes(len) as usize;
    let mut json = vec![0u8; len];
    input.read_exact(&mut json)?;
    let h: BinaryHeader = serde_json::from_slice(&json).map_err(fmt_err)?;
    if h.n_times != h.grid.len() {
        return Err(IdtError::Format("header n_times disagrees with grid".into()));
    }
    let mut raw = vec![0u8; 8 * h.n_paths * h.n_times];
    input.read_exact(&mut raw)?;
    let values = raw
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    PathEnsemble::from_parts(h.grid, h.n_paths, values, h.spec, h.seed, h.meta)
}
