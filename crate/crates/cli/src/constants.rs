//! Finding decision constants for a design: file, flags, cache, then the built-in table.

use crate::args::{ConstantSource, Design};
use crate::error::{CliError, CliResult};
use rpod::calibration::CalibrationCache;
use rpod::detector::Provenance;
use rpod::simulation::{reference_constants, ReferenceSet};
use rpod::{CalibrationResult, DetectorConstants};
use std::path::Path;

/// Accepts either a bare constants object or a full calibration result.
pub fn read_constants_file(path: &Path) -> CliResult<DetectorConstants> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    let parsed = serde_json::from_str::<DetectorConstants>(&text)
        .or_else(|_| serde_json::from_str::<CalibrationResult>(&text).map(|r| r.constants))
        .or_else(|_| serde_json::from_str::<crate::calibrate::CalibrationSummary>(&text).map(|s| s.constants))
        .map_err(|e| CliError::usage(format!("{}: not a constants file: {e}", path.display())))?;
    parsed.validate()?;
    Ok(parsed)
}

/// Most recent cache entry matching the design, whatever its seed and Monte Carlo size.
pub fn from_cache(dir: &Path, n: usize, d: usize, design: &Design) -> CliResult<Option<DetectorConstants>> {
    let cache = CalibrationCache::open_dir(dir)
        .map_err(|e| CliError::failure(format!("could not read the calibration cache: {e}")))?;
    let best = cache
        .entries()
        .iter()
        .filter(|e| e.key.n == n && e.key.d == d && e.key.alpha == design.alpha && e.key.delta == design.delta && e.key.h == design.h)
        .max_by_key(|e| e.value.timestamp);
    best.map(|e| e.value.constants(&e.key)).transpose().map_err(CliError::from)
}

pub fn resolve(source: &ConstantSource, design: &Design, n: usize, d: usize, cache_dir: &Path) -> CliResult<DetectorConstants> {
    if let Some(path) = &source.constants_file {
        let c = read_constants_file(path)?;
        c.check_shape(n, d).map_err(|e| CliError::usage(format!("constants in {} do not fit the data: {e}", path.display())))?;
        return Ok(c);
    }
    if let (Some(a), Some(b)) = (source.a, source.b) {
        let c = DetectorConstants::new(a, b, n, d, design.alpha, design.delta, design.h)?;
        return Ok(c.with_provenance(Provenance { source: "command-line".into(), ..Default::default() }));
    }
    if let Some(c) = from_cache(cache_dir, n, d, design)? {
        return Ok(c);
    }
    let h = design.h as u32;
    if design.alpha == 0.05 && design.delta == 0.05 && h as f64 == design.h {
        if let Ok(c) = reference_constants(ReferenceSet::Large, n, d, h) {
            return Ok(c);
        }
    }
    Err(CliError::usage(format!(
        "no decision constants for n={n}, d={d}, alpha={}, delta={}, h={}; run `rpod calibrate` or pass --a/--b",
        design.alpha, design.delta, design.h
    )))
}
