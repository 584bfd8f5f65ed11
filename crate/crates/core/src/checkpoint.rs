//! On-disk MPS checkpoints: a `manifest.toml` plus one little-endian f64
//! blob per site tensor, row-major in `(left, physical, right)` order.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mps::Mps;
use crate::point::PointSpec;
use crate::tensor::Tensor3;

pub const FORMAT_VERSION: u32 = 1;
pub const MANIFEST: &str = "manifest.toml";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorEntry {
    pub file: String,
    /// `[left, physical, right]`.
    pub shape: [usize; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub spec: PointSpec,
    pub d_p: usize,
    pub spin_site: usize,
    pub local_dims: Vec<usize>,
    pub bond_dims: Vec<usize>,
    pub bond_cap: usize,
    pub energy: Option<f64>,
    pub tensors: Vec<TensorEntry>,
}

fn blob_name(i: usize) -> String {
    format!("site_{i:04}.bin")
}

/// Writes `psi` to `dir`, creating it if needed.
pub fn save(dir: &Path, psi: &Mps, spec: &PointSpec, d_p: usize, energy: Option<f64>) -> Result<Manifest> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut tensors = Vec::with_capacity(psi.len());
    for (i, t) in psi.sites.iter().enumerate() {
        let file = blob_name(i);
        let bytes: Vec<u8> = t.data.iter().flat_map(|x| x.to_le_bytes()).collect();
        let path = dir.join(&file);
        fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        tensors.push(TensorEntry { file, shape: t.shape() });
    }
    let manifest = Manifest {
        format_version: FORMAT_VERSION,
        spec: *spec,
        d_p,
        spin_site: spec.layout(d_p).spin_site(),
        local_dims: psi.local_dims(),
        bond_dims: psi.bond_dims(),
        bond_cap: psi.bond_cap,
        energy,
        tensors,
    };
    let text = toml::to_string(&manifest).map_err(|e| Error::Format {
        path: dir.join(MANIFEST),
        message: e.to_string(),
    })?;
    let path = dir.join(MANIFEST);
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}

fn malformed(path: PathBuf, message: impl Into<String>) -> Error {
    Error::Format {
        path,
        message: message.into(),
    }
}

pub fn load(dir: &Path) -> Result<(Mps, Manifest)> {
    let mpath = dir.join(MANIFEST);
    let text = fs::read_to_string(&mpath).map_err(|e| Error::io(&mpath, e))?;
    let manifest: Manifest = toml::from_str(&text).map_err(|e| malformed(mpath.clone(), e.to_string()))?;
    if manifest.format_version != FORMAT_VERSION {
        return Err(malformed(mpath, format!("unsupported format version {}", manifest.format_version)));
    }
    if manifest.tensors.len() != manifest.local_dims.len() {
        return Err(malformed(mpath, "tensor count does not match local_dims"));
    }
    let mut sites = Vec::with_capacity(manifest.tensors.len());
    let mut prev_right = 1usize;
    for (i, entry) in manifest.tensors.iter().enumerate() {
        let [dl, d, dr] = entry.shape;
        if dl != prev_right || d != manifest.local_dims[i] {
            return Err(malformed(mpath, format!("tensor {i} has inconsistent shape {:?}", entry.shape)));
        }
        prev_right = dr;
        let path = dir.join(&entry.file);
        let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
        if bytes.len() != dl * d * dr * 8 {
            return Err(malformed(path, format!("expected {} bytes, found {}", dl * d * dr * 8, bytes.len())));
        }
        let data = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect();
        sites.push(Tensor3::from_vec(dl, d, dr, data));
    }
    if prev_right != 1 {
        return Err(malformed(mpath, "last tensor must close with a trivial bond"));
    }
    let psi = Mps {
        sites,
        bond_cap: manifest.bond_cap,
        center: None,
    };
    Ok((psi, manifest))
}
