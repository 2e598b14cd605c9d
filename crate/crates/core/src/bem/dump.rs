//! Binary operator snapshots for regression baselines.
//!
//! Layout: an 8-byte little-endian header length `n`, `n` bytes of JSON
//! header, then `N·N` little-endian `f64` values in row-major order.

use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::BoundaryOperator;
use crate::curve::CurveParam;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorHeader {
    #[serde(rename = "N")]
    pub n: usize,
    pub curve_hash: String,
    pub operator: String,
}

pub fn write_operator(path: &Path, op: &BoundaryOperator, curve: &CurveParam) -> Result<()> {
    let header = OperatorHeader {
        n: op.len(),
        curve_hash: curve.hash(),
        operator: op.name.clone(),
    };
    let json = serde_json::to_vec(&header)?;
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    out.write_all(&(json.len() as u64).to_le_bytes())?;
    out.write_all(&json)?;
    for i in 0..op.len() {
        for j in 0..op.len() {
            out.write_all(&op.matrix[(i, j)].to_le_bytes())?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn read_operator(path: &Path) -> Result<(OperatorHeader, DMatrix<f64>)> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    let bad = |what: &str| Error::Config(format!("{}: {what}", path.display()));
    if bytes.len() < 8 {
        return Err(bad("truncated header"));
    }
    let hlen = u64::from_le_bytes(bytes[..8].try_into().unwrap()) as usize;
    let body = bytes.get(8..8 + hlen).ok_or_else(|| bad("truncated header"))?;
    let header: OperatorHeader = serde_json::from_slice(body)?;
    let data = &bytes[8 + hlen..];
    if data.len() != header.n * header.n * 8 {
        return Err(bad("payload size does not match N"));
    }
    let vals: Vec<f64> = data
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok((
        header.clone(),
        DMatrix::from_row_slice(header.n, header.n, &vals),
    ))
}
