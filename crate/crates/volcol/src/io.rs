//! Matrix files: headerless CSV and a little-endian binary format.
//!
//! CSV writes each entry with Rust's shortest round-trip float formatting,
//! so read(write(x)) reproduces x bit for bit. The binary format is
//! `VCOL1` + u64 rows + u64 cols + row-major f64 payload, everything
//! little-endian.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

const BIN_MAGIC: &[u8; 5] = b"VCOL1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    Csv,
    Bin,
}

impl fmt::Display for MatrixFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Csv => "csv",
            Self::Bin => "bin",
        })
    }
}

impl FromStr for MatrixFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "bin" => Ok(Self::Bin),
            other => Err(Error::InvalidArgument(format!(
                "unknown matrix format \"{other}\" (expected csv or bin)"
            ))),
        }
    }
}

pub fn read_matrix(path: &Path, format: MatrixFormat) -> Result<DenseMatrix> {
    match format {
        MatrixFormat::Csv => parse_csv(&fs::read_to_string(path)?),
        MatrixFormat::Bin => parse_bin(&fs::read(path)?),
    }
}

pub fn write_matrix(path: &Path, x: &DenseMatrix, format: MatrixFormat) -> Result<()> {
    match format {
        MatrixFormat::Csv => fs::write(path, render_csv(x))?,
        MatrixFormat::Bin => fs::write(path, render_bin(x))?,
    }
    Ok(())
}

fn render_csv(x: &DenseMatrix) -> String {
    let mut out = String::new();
    for i in 0..x.rows() {
        for j in 0..x.cols() {
            if j > 0 {
                out.push(',');
            }
            // Display for f64 is the shortest string that parses back exactly
            out.push_str(&x.get(i, j).to_string());
        }
        out.push('\n');
    }
    out
}

fn parse_csv(text: &str) -> Result<DenseMatrix> {
    let mut data: Vec<f64> = Vec::new();
    let mut cols = 0usize;
    let mut rows = 0usize;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut count = 0usize;
        for field in line.split(',') {
            let v: f64 = field.trim().parse().map_err(|_| Error::Parse {
                line: lineno + 1,
                message: format!("cannot parse \"{}\" as a number", field.trim()),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: "entries must be finite".into(),
                });
            }
            data.push(v);
            count += 1;
        }
        if rows == 0 {
            cols = count;
        } else if count != cols {
            return Err(Error::Parse {
                line: lineno + 1,
                message: format!("expected {cols} fields, found {count}"),
            });
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(Error::BadFormat("no rows".into()));
    }
    DenseMatrix::new(rows, cols, data)
}

fn render_bin(x: &DenseMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(BIN_MAGIC.len() + 16 + 8 * x.data().len());
    out.extend_from_slice(BIN_MAGIC);
    out.extend_from_slice(&(x.rows() as u64).to_le_bytes());
    out.extend_from_slice(&(x.cols() as u64).to_le_bytes());
    for v in x.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

fn parse_bin(bytes: &[u8]) -> Result<DenseMatrix> {
    if bytes.len() < BIN_MAGIC.len() + 16 {
        return Err(Error::BadFormat("file too short for header".into()));
    }
    if &bytes[..BIN_MAGIC.len()] != BIN_MAGIC {
        return Err(Error::BadFormat("bad magic (expected VCOL1)".into()));
    }
    let rows = u64::from_le_bytes(bytes[5..13].try_into().expect("sized slice")) as usize;
    let cols = u64::from_le_bytes(bytes[13..21].try_into().expect("sized slice")) as usize;
    let count = rows
        .checked_mul(cols)
        .ok_or_else(|| Error::BadFormat("dimension overflow".into()))?;
    let payload = &bytes[21..];
    if payload.len() != count * 8 {
        return Err(Error::BadFormat(format!(
            "payload holds {} bytes, header promises {}",
            payload.len(),
            count * 8
        )));
    }
    let data: Vec<f64> = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("sized chunk")))
        .collect();
    DenseMatrix::new(rows, cols, data)
}
