//! On-disk cache of minimal polynomials, one JSON file per key.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::spectra::RatPoly;

/// Bumped whenever cached results could change.
pub const CACHE_VERSION: &str = concat!("garland-", env!("CARGO_PKG_VERSION"), "-1");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub version: String,
    pub key: String,
    pub dim: usize,
    /// Exact low-to-high coefficient string.
    pub minpoly: String,
    pub minpoly_ms: u64,
}

impl CacheEntry {
    pub fn poly(&self) -> Result<RatPoly, HarnessError> {
        self.minpoly
            .parse()
            .map_err(|e| HarnessError::Cache(format!("entry {}: {e}", self.key)))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("cache entries serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let e: CacheEntry =
            serde_json::from_str(text).map_err(|e| HarnessError::Cache(e.to_string()))?;
        e.poly()?;
        Ok(e)
    }
}

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

/// Cache key for the Laplacian on C^i of a building.
pub fn building_key(ell: usize, q: u64, i: usize) -> String {
    format!("B{ell}-{q}-i{i}")
}

/// Cache key for the Laplacian on C^i of an ingested complex.
pub fn complex_key(hash: &str, i: usize) -> String {
    format!("C{hash}-i{i}")
}

impl Cache {
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, HarnessError> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir)?;
        Ok(Cache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    /// A usable entry for `key`; unreadable or stale files count as misses.
    pub fn get(&self, key: &str) -> Option<CacheEntry> {
        let text = fs::read_to_string(self.path(key)).ok()?;
        CacheEntry::from_json(&text)
            .ok()
            .filter(|e| e.version == CACHE_VERSION && e.key == key)
    }

    /// Writes through a temporary file and renames it into place.
    pub fn put(&self, entry: &CacheEntry) -> Result<(), HarnessError> {
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(entry.to_json().as_bytes())?;
        tmp.flush()?;
        tmp.persist(self.path(&entry.key))
            .map_err(|e| HarnessError::Io(e.error))?;
        Ok(())
    }
}
