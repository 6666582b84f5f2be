//! Binary checkpoint files.
//!
//! Layout (all integers and floats little-endian):
//!
//! ```text
//! magic   [u8; 4] = "NLSP"
//! version u32     = 1
//! dim     u32
//! m       u32     points per axis
//! nu      f64
//! p       f64
//! t       f64
//! coeffs  M^dim interleaved (re, im) f64 pairs, row-major frequency order
//! ```
//!
//! Loading validates the magic, the version and the exact byte length, so a
//! truncated file never yields a partial field.

use std::fs;
use std::io::Write;
use std::path::Path;

use ndarray::{ArrayD, IxDyn};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralField};

pub const MAGIC: &[u8; 4] = b"NLSP";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckpointMeta {
    pub nu: f64,
    pub p: f64,
    pub t: f64,
}

pub fn save_checkpoint(u: &SpectralField, meta: CheckpointMeta, path: &Path) -> Result<()> {
    let grid = u.grid();
    let mut bytes = Vec::with_capacity(40 + 16 * grid.total_points());
    bytes.extend_from_slice(MAGIC);
    bytes.extend_from_slice(&VERSION.to_le_bytes());
    bytes.extend_from_slice(&(grid.dim() as u32).to_le_bytes());
    bytes.extend_from_slice(&(grid.points_per_axis() as u32).to_le_bytes());
    bytes.extend_from_slice(&meta.nu.to_le_bytes());
    bytes.extend_from_slice(&meta.p.to_le_bytes());
    bytes.extend_from_slice(&meta.t.to_le_bytes());
    for c in u.coeffs().iter() {
        bytes.extend_from_slice(&c.re.to_le_bytes());
        bytes.extend_from_slice(&c.im.to_le_bytes());
    }
    let mut file = fs::File::create(path)?;
    file.write_all(&bytes)?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<(SpectralField, CheckpointMeta)> {
    let bytes = fs::read(path)?;
    if bytes.len() < 40 {
        return Err(Error::Checkpoint(format!(
            "file too short: {} bytes",
            bytes.len()
        )));
    }
    if &bytes[0..4] != MAGIC {
        return Err(Error::Checkpoint(format!(
            "bad magic {:?}",
            &bytes[0..4]
        )));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let dim = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let m = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
    let nu = f64::from_le_bytes(bytes[16..24].try_into().unwrap());
    let p = f64::from_le_bytes(bytes[24..32].try_into().unwrap());
    let t = f64::from_le_bytes(bytes[32..40].try_into().unwrap());

    let grid = Grid::new(dim, m)
        .map_err(|e| Error::Checkpoint(format!("invalid grid in header: {e}")))?;
    let n = grid.total_points();
    let expected = 40 + 16 * n;
    if bytes.len() != expected {
        return Err(Error::Checkpoint(format!(
            "length {} does not match header (expected {expected})",
            bytes.len()
        )));
    }
    let mut coeffs = ArrayD::<Complex64>::zeros(IxDyn(&grid.shape()));
    for (i, c) in coeffs.iter_mut().enumerate() {
        let off = 40 + 16 * i;
        let re = f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap());
        let im = f64::from_le_bytes(bytes[off + 8..off + 16].try_into().unwrap());
        *c = Complex64::new(re, im);
    }
    let field = SpectralField::from_coeffs(grid, coeffs)?;
    Ok((field, CheckpointMeta { nu, p, t }))
}
