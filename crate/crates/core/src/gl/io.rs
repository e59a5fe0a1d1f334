//! Field files: a JSON header next to a raw little-endian `f64` array.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::manifold::{EmbeddedManifold, ManifoldSpec, Potential, PotentialField, PotentialSpec};

use super::{BcDescriptor, Domain, GlError, GridField};

pub const LAYOUT: &str = "row-major, axis 0 slowest, components innermost";
pub const DTYPE: &str = "f64-le";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldHeader {
    pub dim: usize,
    pub counts: Vec<usize>,
    pub lower: Vec<f64>,
    pub extent: Vec<f64>,
    pub h: f64,
    pub m: usize,
    pub eps: f64,
    pub manifold: ManifoldSpec,
    pub potential: PotentialSpec,
    pub bc: Option<BcDescriptor>,
    pub layout: String,
    pub dtype: String,
    /// Name of the data file, relative to the header.
    pub data: String,
    pub bytes: u64,
    pub sha256: String,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn encode(values: &[f64]) -> Vec<u8> {
    values.iter().flat_map(|v| v.to_le_bytes()).collect()
}

/// Writes `<stem>.json` and `<stem>.bin` into `dir`; returns the header path.
pub fn write_field(field: &GridField, dir: &Path, stem: &str) -> Result<PathBuf, GlError> {
    fs::create_dir_all(dir)?;
    let bytes = encode(&field.values);
    let data = format!("{stem}.bin");
    let header = FieldHeader {
        dim: field.domain.dim,
        counts: field.domain.counts.clone(),
        lower: field.domain.lower.clone(),
        extent: field.domain.extent.clone(),
        h: field.domain.h,
        m: field.m,
        eps: field.eps,
        manifold: field.potential.manifold().spec(),
        potential: field.potential.spec(),
        bc: field.bc.clone(),
        layout: LAYOUT.into(),
        dtype: DTYPE.into(),
        data: data.clone(),
        bytes: bytes.len() as u64,
        sha256: hex(&Sha256::digest(&bytes)),
    };
    fs::write(dir.join(&data), &bytes)?;
    let path = dir.join(format!("{stem}.json"));
    fs::write(&path, serde_json::to_string_pretty(&header)?)?;
    Ok(path)
}

/// Reads a field, verifying size and checksum of the data file.
pub fn read_field(header_path: &Path) -> Result<GridField, GlError> {
    let text = fs::read_to_string(header_path).map_err(|e| GlError::Missing(format!("{}: {e}", header_path.display())))?;
    let header: FieldHeader = serde_json::from_str(&text)?;
    if header.layout != LAYOUT || header.dtype != DTYPE {
        return Err(GlError::Corrupt(format!("unsupported layout `{}` / dtype `{}`", header.layout, header.dtype)));
    }
    let data_path = header_path.parent().unwrap_or(Path::new(".")).join(&header.data);
    let bytes = fs::read(&data_path).map_err(|e| GlError::Missing(format!("{}: {e}", data_path.display())))?;
    if bytes.len() as u64 != header.bytes {
        return Err(GlError::Corrupt(format!(
            "{}: size {} does not match the header's {}",
            data_path.display(),
            bytes.len(),
            header.bytes
        )));
    }
    let digest = hex(&Sha256::digest(&bytes));
    if digest != header.sha256 {
        return Err(GlError::Corrupt(format!("{}: checksum mismatch", data_path.display())));
    }
    let domain = Domain::new(header.lower, header.extent, header.counts)?;
    let manifold = EmbeddedManifold::from_spec(&header.manifold).map_err(|e| GlError::Config(e.to_string()))?;
    let potential = Potential::from_spec(&header.potential, manifold).map_err(|e| GlError::Config(e.to_string()))?;
    if potential.manifold().ambient_dim() != header.m {
        return Err(GlError::Corrupt("component count does not match the manifold".into()));
    }
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    let mut field = GridField::new(domain, header.eps, potential, values)?;
    field.bc = header.bc;
    Ok(field)
}
