// SPDX-License-Identifier: Apache-2.0

//! Result tables and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use gltau::{Error, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

/// A comma-separated table with a fixed header.
#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&'static str]) -> Self {
        Self {
            name: name.into(),
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).map_err(io_err)?;
        for row in &self.rows {
            w.write_record(row).map_err(io_err)?;
        }
        w.into_inner().map_err(|e| Error::Io(e.to_string()))
    }
}

fn io_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Shortest round-trip form, in exponent notation for very small or large values.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

#[derive(Debug, Clone, Serialize)]
pub struct FileRecord {
    pub name: String,
    pub sha256: String,
    pub bytes: usize,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Picks `<base>/<kind>-<timestamp>`, suffixed if it already exists.
pub fn run_directory(base: &Path, kind: &str, stamp: &str) -> Result<PathBuf> {
    fs::create_dir_all(base).map_err(|e| Error::Io(format!("{}: {e}", base.display())))?;
    let mut dir = base.join(format!("{kind}-{stamp}"));
    let mut k = 2;
    while dir.exists() {
        dir = base.join(format!("{kind}-{stamp}-{k}"));
        k += 1;
    }
    fs::create_dir(&dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    Ok(dir)
}

/// Writes every table into `dir` and returns their digests.
pub fn write_tables(dir: &Path, tables: &[Table]) -> Result<Vec<FileRecord>> {
    tables
        .iter()
        .map(|t| {
            let bytes = t.to_bytes()?;
            let name = format!("{}.csv", t.name);
            fs::write(dir.join(&name), &bytes).map_err(|e| Error::Io(format!("{name}: {e}")))?;
            Ok(FileRecord {
                name,
                sha256: sha256_hex(&bytes),
                bytes: bytes.len(),
            })
        })
        .collect()
}
