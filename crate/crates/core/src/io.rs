//! Artifact files: binary grid signals, CSV tables, and atomic writes.
//!
//! Grid format: one JSON header line `{"d":…,"m":…}` terminated by `\n`,
//! followed by the `m^d` sample values as little-endian f64 in row-major
//! order. All writers go through a temp-file + rename so interrupted runs
//! leave no partial files at declared paths.

use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::grids::GridSignal;
use crate::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
struct GridHeader {
    d: usize,
    m: usize,
}

/// Writes `bytes` to `path` atomically (temp file in the same directory,
/// then rename).
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Serializes a grid signal to the binary grid format.
pub fn grid_to_bytes(g: &GridSignal) -> Result<Vec<u8>> {
    let header = GridHeader { d: g.dim(), m: g.samples_per_axis() };
    let mut out = serde_json::to_vec(&header)?;
    out.push(b'\n');
    out.reserve(g.values().len() * 8);
    for v in g.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

/// Writes a grid signal atomically.
pub fn write_grid(path: &Path, g: &GridSignal) -> Result<()> {
    write_atomic(path, &grid_to_bytes(g)?)
}

/// Reads a grid signal written by [`write_grid`].
pub fn read_grid(path: &Path) -> Result<GridSignal> {
    let mut reader = BufReader::new(File::open(path)?);
    let mut header_bytes = Vec::new();
    let mut byte = [0u8; 1];
    loop {
        if reader.read(&mut byte)? == 0 {
            return Err(Error::Config {
                field: "grid-file".into(),
                message: format!("{}: missing header line", path.display()),
            });
        }
        if byte[0] == b'\n' {
            break;
        }
        header_bytes.push(byte[0]);
    }
    let header: GridHeader = serde_json::from_slice(&header_bytes)?;
    let count = header
        .m
        .checked_pow(header.d as u32)
        .ok_or_else(|| Error::Config { field: "grid-file".into(), message: "grid too large".into() })?;
    let mut payload = vec![0u8; count * 8];
    reader.read_exact(&mut payload)?;
    let values = payload.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    GridSignal::new(header.d, header.m, values)
}

/// Renders a CSV table; values use the shortest round-trip f64 formatting,
/// so identical numbers always produce identical bytes.
pub fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> Vec<u8> {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out.into_bytes()
}

/// Writes a CSV table atomically.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    write_atomic(path, &csv_bytes(header, rows))
}

/// Writes pretty-printed JSON atomically (with a trailing newline).
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}
