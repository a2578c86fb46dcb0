use crate::args::CalibrateArgs;
use crate::error::{CliError, CliResult};
use crate::{execution, write_json};
use rpod::calibration::{CacheKey, CacheValue, CalibrationCache};
use rpod::simulation::report::TextTable;
use rpod::{calibrate_with, CalibrationTarget, DetectorConstants};
use serde::{Deserialize, Serialize};
use std::time::Instant;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSummary {
    pub key: CacheKey,
    pub constants: DetectorConstants,
    pub estimated_level: f64,
    pub mean_projections: f64,
    pub from_cache: bool,
    pub cache_file: String,
}

pub fn run(args: &CalibrateArgs) -> CliResult<CalibrationSummary> {
    let mut target = CalibrationTarget::new(args.n, args.d, args.design.alpha, args.design.delta, args.design.h);
    target.mc_size = args.mc_size;
    target.level_reps = args.level_reps;
    target.validate()?;
    let seed = args.common.seed;
    let key = CacheKey::new(&target, seed);
    let mut cache = CalibrationCache::open_dir(&args.common.cache_dir)
        .map_err(|e| CliError::failure(format!("could not read the calibration cache: {e}")))?;
    let cache_file = cache.path().display().to_string();

    let hit = if args.force { None } else { cache.get(&key).cloned() };
    let (value, from_cache) = match hit {
        Some(v) => (v, true),
        None => {
            let started = Instant::now();
            let result = calibrate_with(&target, execution(&args.common), seed)?;
            eprintln!("calibrated in {:.1} s", started.elapsed().as_secs_f64());
            let v = CacheValue::from_result(&result);
            cache.insert(key.clone(), v.clone());
            cache.save().map_err(|e| CliError::failure(format!("could not write the calibration cache: {e}")))?;
            (v, false)
        }
    };
    let summary = CalibrationSummary {
        constants: value.constants(&key)?,
        estimated_level: value.estimated_level,
        mean_projections: value.mean_projections,
        key,
        from_cache,
        cache_file,
    };
    print!("{}", render(&summary));
    if let Some(path) = &args.output {
        write_json(path, &summary)?;
    }
    Ok(summary)
}

pub fn render(s: &CalibrationSummary) -> String {
    let mut t = TextTable::new(["n", "d", "alpha", "delta", "h", "N", "seed", "a", "b", "level", "l_hat", "source"]);
    t.push([
        s.key.n.to_string(),
        s.key.d.to_string(),
        s.key.alpha.to_string(),
        s.key.delta.to_string(),
        s.key.h.to_string(),
        s.key.mc_size.to_string(),
        s.key.seed.to_string(),
        format!("{:.4}", s.constants.a),
        format!("{:.4}", s.constants.b),
        format!("{:.4}", s.estimated_level),
        format!("{:.1}", s.mean_projections),
        if s.from_cache { "cache".into() } else { "computed".into() },
    ]);
    t.render()
}
