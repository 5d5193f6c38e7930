//! Sidecar cache of extreme bounds keyed by the case contents.

use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::{extreme_bounds, ExtremeBounds, ExtremeOptions};
use crate::error::{Error, Result};
use crate::grid::GridCase;

/// `WAKESIZE_CACHE` when set, otherwise `fallback`.
pub fn cache_dir(fallback: &Path) -> PathBuf {
    match std::env::var_os("WAKESIZE_CACHE") {
        Some(v) if !v.is_empty() => PathBuf::from(v),
        _ => fallback.to_path_buf(),
    }
}

/// Hex digest of the case and options.
pub fn case_key(case: &GridCase, opts: &ExtremeOptions) -> Result<String> {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(case).map_err(|e| Error::Output(e.to_string()))?);
    h.update(serde_json::to_vec(opts).map_err(|e| Error::Output(e.to_string()))?);
    Ok(hex::encode(h.finalize()))
}

/// Reads cached bounds for `case` from `dir`, computing and storing them on a
/// miss. An unreadable cache entry is recomputed.
pub fn load_or_compute(case: &GridCase, opts: &ExtremeOptions, dir: &Path) -> Result<ExtremeBounds> {
    let path = dir.join(format!("bounds-{}.json", case_key(case, opts)?));
    if let Ok(text) = std::fs::read_to_string(&path) {
        match serde_json::from_str(&text) {
            Ok(b) => {
                log::info!("using cached bounds {}", path.display());
                return Ok(b);
            }
            Err(e) => log::warn!("ignoring cache entry {}: {e}", path.display()),
        }
    }
    let bounds = extreme_bounds(case, opts)?;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let text = serde_json::to_string_pretty(&bounds).map_err(|e| Error::Output(e.to_string()))?;
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(bounds)
}
