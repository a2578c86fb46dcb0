//! On-disk cache of calibration results.

use super::calibrate::{CalibrationResult, CalibrationTarget};
use crate::detector::{DetectorConstants, Provenance};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

pub const CACHE_FILE: &str = "calibration-cache.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheKey {
    pub n: usize,
    pub d: usize,
    pub delta: f64,
    pub alpha: f64,
    pub h: f64,
    #[serde(rename = "N")]
    pub mc_size: usize,
    pub seed: u64,
}

impl CacheKey {
    pub fn new(target: &CalibrationTarget, seed: u64) -> Self {
        Self {
            n: target.n,
            d: target.d,
            delta: target.delta,
            alpha: target.alpha,
            h: target.h,
            mc_size: target.mc_size,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheValue {
    pub a: f64,
    pub b: f64,
    pub estimated_level: f64,
    pub mean_projections: f64,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

impl CacheValue {
    pub fn from_result(result: &CalibrationResult) -> Self {
        let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        Self {
            a: result.constants.a,
            b: result.constants.b,
            estimated_level: result.estimated_level,
            mean_projections: result.estimated_mean_projections,
            timestamp,
        }
    }

    pub fn constants(&self, key: &CacheKey) -> Result<DetectorConstants> {
        let provenance = Provenance {
            source: "cache".into(),
            mc_size: Some(key.mc_size),
            seed: Some(key.seed),
            estimated_level: Some(self.estimated_level),
            estimated_mean_projections: Some(self.mean_projections),
        };
        Ok(DetectorConstants::new(self.a, self.b, key.n, key.d, key.alpha, key.delta, key.h)?.with_provenance(provenance))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: CacheKey,
    pub value: CacheValue,
}

#[derive(Debug, Clone)]
pub struct CalibrationCache {
    path: PathBuf,
    entries: Vec<CacheEntry>,
}

impl CalibrationCache {
    /// Load the cache file inside `dir`; a missing file is an empty cache.
    pub fn open_dir(dir: impl AsRef<Path>) -> Result<Self> {
        Self::open(dir.as_ref().join(CACHE_FILE))
    }

    pub fn open(path: impl Into<PathBuf>) -> Result<Self> {
        let path = path.into();
        let entries = match fs::read_to_string(&path) {
            Ok(text) if text.trim().is_empty() => Vec::new(),
            Ok(text) => serde_json::from_str(&text)
                .map_err(|e| Error::Cache(format!("{}: {e}", path.display())))?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
            Err(e) => return Err(Error::Cache(format!("{}: {e}", path.display()))),
        };
        Ok(Self { path, entries })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn entries(&self) -> &[CacheEntry] {
        &self.entries
    }

    pub fn get(&self, key: &CacheKey) -> Option<&CacheValue> {
        self.entries.iter().find(|e| &e.key == key).map(|e| &e.value)
    }

    /// Insert or replace the entry for `key`.
    pub fn insert(&mut self, key: CacheKey, value: CacheValue) {
        match self.entries.iter_mut().find(|e| e.key == key) {
            Some(e) => e.value = value,
            None => self.entries.push(CacheEntry { key, value }),
        }
    }

    /// Write the whole cache via a temporary file and rename.
    pub fn save(&self) -> Result<()> {
        let err = |e: std::io::Error| Error::Cache(format!("{}: {e}", self.path.display()));
        if let Some(dir) = self.path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(err)?;
        }
        let text = serde_json::to_string_pretty(&self.entries).map_err(|e| Error::Cache(e.to_string()))?;
        let tmp = self.path.with_extension(format!("json.tmp{}", std::process::id()));
        fs::write(&tmp, text + "\n").map_err(err)?;
        fs::rename(&tmp, &self.path).map_err(err)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(seed: u64) -> CacheKey {
        CacheKey { n: 50, d: 50, delta: 0.05, alpha: 0.05, h: 50.0, mc_size: 100_000, seed }
    }

    fn value(b: f64) -> CacheValue {
        CacheValue { a: 0.03, b, estimated_level: 0.05, mean_projections: 50.0, timestamp: 1 }
    }

    #[test]
    fn round_trip_and_replace() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = CalibrationCache::open_dir(dir.path()).unwrap();
        assert!(c.get(&key(1)).is_none());
        c.insert(key(1), value(4.9));
        c.insert(key(2), value(5.0));
        c.insert(key(1), value(4.95));
        c.save().unwrap();
        let c = CalibrationCache::open_dir(dir.path()).unwrap();
        assert_eq!(c.entries().len(), 2);
        assert_eq!(c.get(&key(1)).unwrap().b, 4.95);
        let text = fs::read_to_string(c.path()).unwrap();
        assert!(text.contains("\"N\": 100000"));
    }

    #[test]
    fn corrupt_file_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join(CACHE_FILE), "{not json").unwrap();
        assert!(matches!(CalibrationCache::open_dir(dir.path()), Err(Error::Cache(_))));
    }
}
