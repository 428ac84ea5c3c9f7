//! Diagnostics persistence: CSV with a fixed column order and JSON-lines.
//! Floats are written with 17 significant digits so text round trips are
//! lossless.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::diagnostics::DiagnosticsRecord;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum DiagFormat {
    #[default]
    Csv,
    JsonLines,
}

/// Documented CSV column order.
pub const CSV_COLUMNS: [&str; 12] = [
    "t",
    "energy",
    "enstrophy",
    "mean_energy",
    "eddy_energy",
    "mean_enstrophy",
    "eddy_enstrophy",
    "l2_mu",
    "l2_gamma",
    "hs_mu",
    "hs_gamma",
    "zero_mode_residual_max",
];

fn check_records(records: &[DiagnosticsRecord]) -> Result<()> {
    if records.is_empty() {
        return Err(Error::EmptyRecords);
    }
    for (i, w) in records.windows(2).enumerate() {
        if w[1].t < w[0].t {
            return Err(Error::NonMonotoneTime { index: i + 1 });
        }
    }
    Ok(())
}

fn csv_row(r: &DiagnosticsRecord) -> String {
    let cols = [
        r.t,
        r.energy,
        r.enstrophy,
        r.mean_energy,
        r.eddy_energy,
        r.mean_enstrophy,
        r.eddy_enstrophy,
        r.l2_mu,
        r.l2_gamma,
        r.hs_mu,
        r.hs_gamma,
        r.zero_mode_residual_max(),
    ];
    let mut line = String::new();
    for (i, v) in cols.iter().enumerate() {
        if i > 0 {
            line.push(',');
        }
        write!(line, "{v:.16e}").unwrap();
    }
    line
}

fn jsonl_row(r: &DiagnosticsRecord) -> String {
    format!(
        concat!(
            "{{\"t\":{:.16e},\"energy\":{:.16e},\"enstrophy\":{:.16e},",
            "\"mean_energy\":{:.16e},\"eddy_energy\":{:.16e},",
            "\"mean_enstrophy\":{:.16e},\"eddy_enstrophy\":{:.16e},",
            "\"l2_mu\":{:.16e},\"l2_gamma\":{:.16e},",
            "\"hs_mu\":{:.16e},\"hs_gamma\":{:.16e},",
            "\"zero_mode_residual_mu\":{:.16e},\"zero_mode_residual_gamma\":{:.16e},",
            "\"dissipation_energy\":{:.16e},\"dissipation_enstrophy\":{:.16e},",
            "\"dissipation_enstrophy_eddy\":{:.16e}}}"
        ),
        r.t,
        r.energy,
        r.enstrophy,
        r.mean_energy,
        r.eddy_energy,
        r.mean_enstrophy,
        r.eddy_enstrophy,
        r.l2_mu,
        r.l2_gamma,
        r.hs_mu,
        r.hs_gamma,
        r.zero_mode_residual_mu,
        r.zero_mode_residual_gamma,
        r.dissipation_energy,
        r.dissipation_enstrophy,
        r.dissipation_enstrophy_eddy,
    )
}

/// Write nonempty, time-ordered records; atomic (temp file + rename).
pub fn write_diagnostics(
    records: &[DiagnosticsRecord],
    path: &Path,
    format: DiagFormat,
) -> Result<()> {
    check_records(records)?;
    let mut out = String::new();
    match format {
        DiagFormat::Csv => {
            out.push_str(&CSV_COLUMNS.join(","));
            out.push('\n');
            for r in records {
                out.push_str(&csv_row(r));
                out.push('\n');
            }
        }
        DiagFormat::JsonLines => {
            for r in records {
                out.push_str(&jsonl_row(r));
                out.push('\n');
            }
        }
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, out.as_bytes())?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_diagnostics_jsonl(path: &Path) -> Result<Vec<DiagnosticsRecord>> {
    let reader = BufReader::new(fs::File::open(path)?);
    let mut out = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line)?);
    }
    Ok(out)
}
