//! Binary snippet-feature file:
//!
//! ```text
//! "EGFT" | version u32 LE | dim u32 LE | rows u64 LE | rows * dim f32 LE
//! ```
//!
//! The provenance tag is not stored; readers supply it.

use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{FeatureKind, FeatureMatrix};

pub const MAGIC: &[u8; 4] = b"EGFT";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 20;

pub fn encode_features(m: &FeatureMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 4 * m.as_flat().len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(m.dim() as u32).to_le_bytes());
    out.extend_from_slice(&(m.num_rows() as u64).to_le_bytes());
    for v in m.as_flat() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_features(bytes: &[u8], kind: FeatureKind) -> Result<FeatureMatrix> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::FeatureFormat(format!(
            "truncated header: expected {HEADER_LEN} bytes, found {}",
            bytes.len()
        )));
    }
    if &bytes[..4] != MAGIC {
        return Err(Error::FeatureFormat(format!("bad magic {:?}", &bytes[..4])));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().expect("4 bytes"));
    let version = u32_at(4);
    if version != VERSION {
        return Err(Error::FeatureFormat(format!("version {version} not supported (expected {VERSION})")));
    }
    let dim = u32_at(8) as usize;
    let rows = u64::from_le_bytes(bytes[12..20].try_into().expect("8 bytes"));
    let expected = (rows as u128) * (dim as u128) * 4 + HEADER_LEN as u128;
    if expected != bytes.len() as u128 {
        return Err(Error::FeatureFormat(format!(
            "expected {expected} bytes for {rows} rows of dim {dim}, found {}",
            bytes.len()
        )));
    }
    let data =
        bytes[HEADER_LEN..].chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes"))).collect();
    FeatureMatrix::from_flat(dim, data, kind)
}

pub fn write_features(path: &Path, m: &FeatureMatrix) -> Result<()> {
    std::fs::write(path, encode_features(m)).map_err(|source| Error::Io { path: path.to_owned(), source })
}

pub fn read_features(path: &Path, kind: FeatureKind) -> Result<FeatureMatrix> {
    let bytes = std::fs::read(path).map_err(|source| Error::Io { path: path.to_owned(), source })?;
    decode_features(&bytes, kind)
}
