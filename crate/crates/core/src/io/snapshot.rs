//! Binary state snapshots: one UTF-8 JSON header line followed by the raw
//! little-endian coefficient payload.
//!
//! Payload layout: `gamma` as (re, im) f64 pairs in row-major bin order
//! (`n1` outer, `n2` inner), then `mu` as pairs in `n2` bin order.
//! Round-trips are bit-exact.

use std::fs;
use std::path::Path;

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{SolverParams, State};
use crate::error::{Error, Result};
use crate::spectral::{GridSpec, SpectralField2D, ZonalSpectral1D};

pub const SNAPSHOT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotHeader {
    pub format_version: u32,
    pub endianness: String,
    pub time: f64,
    pub grid: GridSpec,
    pub params: SolverParams,
    pub gamma_shape: [usize; 2],
    pub mu_len: usize,
}

fn payload_len(h: &SnapshotHeader) -> usize {
    (h.gamma_shape[0] * h.gamma_shape[1] + h.mu_len) * 16
}

/// Atomically write `state` (temp file + rename).
pub fn write_snapshot(path: &Path, state: &State, params: &SolverParams) -> Result<()> {
    let grid = &state.gamma.grid;
    let header = SnapshotHeader {
        format_version: SNAPSHOT_VERSION,
        endianness: "little".into(),
        time: state.t,
        grid: grid.clone(),
        params: params.clone(),
        gamma_shape: [grid.n, grid.n],
        mu_len: grid.n,
    };
    let mut bytes = serde_json::to_string(&header)?.into_bytes();
    bytes.push(b'\n');
    bytes.reserve(payload_len(&header));
    for c in state.gamma.coeffs.iter() {
        bytes.extend_from_slice(&c.re.to_le_bytes());
        bytes.extend_from_slice(&c.im.to_le_bytes());
    }
    for c in state.mu.coeffs.iter() {
        bytes.extend_from_slice(&c.re.to_le_bytes());
        bytes.extend_from_slice(&c.im.to_le_bytes());
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, &bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn split_header(bytes: &[u8]) -> Result<(SnapshotHeader, &[u8])> {
    let nl = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::MalformedHeader("no newline terminator".into()))?;
    let header_str = std::str::from_utf8(&bytes[..nl])
        .map_err(|e| Error::MalformedHeader(format!("header not UTF-8: {e}")))?;
    let header: SnapshotHeader = serde_json::from_str(header_str)
        .map_err(|e| Error::MalformedHeader(format!("header not valid JSON: {e}")))?;
    if header.format_version != SNAPSHOT_VERSION {
        return Err(Error::VersionMismatch {
            expected: SNAPSHOT_VERSION,
            got: header.format_version,
        });
    }
    if header.endianness != "little" {
        return Err(Error::MalformedHeader(format!(
            "unsupported endianness tag {:?}",
            header.endianness
        )));
    }
    Ok((header, &bytes[nl + 1..]))
}

/// Read only the metadata line; the payload is left untouched.
pub fn read_snapshot_header(path: &Path) -> Result<SnapshotHeader> {
    use std::io::{BufRead, BufReader};
    let mut reader = BufReader::new(fs::File::open(path)?);
    let mut line = String::new();
    reader.read_line(&mut line)?;
    let line = line.trim_end_matches('\n');
    let header: SnapshotHeader = serde_json::from_str(line)
        .map_err(|e| Error::MalformedHeader(format!("header not valid JSON: {e}")))?;
    if header.format_version != SNAPSHOT_VERSION {
        return Err(Error::VersionMismatch {
            expected: SNAPSHOT_VERSION,
            got: header.format_version,
        });
    }
    Ok(header)
}

pub fn read_snapshot(path: &Path) -> Result<(SnapshotHeader, State)> {
    let bytes = fs::read(path)?;
    let (header, payload) = split_header(&bytes)?;
    let expected = payload_len(&header);
    if payload.len() != expected {
        return Err(Error::PayloadLength { expected, got: payload.len() });
    }
    let n = header.grid.n;
    if header.gamma_shape != [n, n] || header.mu_len != n {
        return Err(Error::MalformedHeader(format!(
            "field shapes {:?}/{} disagree with grid n = {}",
            header.gamma_shape, header.mu_len, n
        )));
    }
    let mut vals = payload
        .chunks_exact(16)
        .map(|chunk| {
            let re = f64::from_le_bytes(chunk[0..8].try_into().unwrap());
            let im = f64::from_le_bytes(chunk[8..16].try_into().unwrap());
            Complex64::new(re, im)
        });
    let gamma_coeffs =
        Array2::from_shape_fn((n, n), |_| vals.next().expect("length checked above"));
    let mu_coeffs = Array1::from_shape_fn(n, |_| vals.next().expect("length checked above"));
    let gamma = SpectralField2D::from_coeffs(&header.grid, gamma_coeffs)?;
    let mu = ZonalSpectral1D::from_coeffs(&header.grid, mu_coeffs)?;
    let state = State::new(header.time, mu, gamma)?;
    Ok((header, state))
}
