use crate::args::DetectArgs;
use crate::constants::resolve;
use crate::data::load_csv;
use crate::error::CliResult;
use crate::{execution, write_json};
use rpod::detector::{declare, VoteMode};
use rpod::rng;
use rpod::simulation::report::TextTable;
use rpod::{vote_analyse, DetectorConstants};
use serde::{Deserialize, Serialize};
use std::time::Instant;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub path: String,
    pub n: usize,
    pub d: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub seconds: f64,
}

/// Result of `rpod detect`. Rows are numbered from 1, header excluded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub dataset: Dataset,
    pub constants: DetectorConstants,
    pub seed: u64,
    pub runs: usize,
    pub mode: VoteMode,
    /// A row is declared when its flag count is strictly above this.
    pub threshold: u32,
    pub flags: Vec<u32>,
    pub proportions: Vec<f64>,
    pub declared_rows: Vec<usize>,
    pub timing: Timing,
}

impl DetectionReport {
    /// Declarations recomputed from the flag counts.
    pub fn recompute_declared(&self) -> Vec<usize> {
        declare(&self.flags, self.threshold).into_iter().map(|i| i + 1).collect()
    }
}

pub fn run(args: &DetectArgs) -> CliResult<DetectionReport> {
    let loaded = load_csv(&args.input)?;
    let (n, d) = (loaded.data.rows(), loaded.data.cols());
    let constants = resolve(&args.constants, &args.design, n, d, &args.common.cache_dir)?;
    let mode: VoteMode = args.vote_mode.into();
    let started = Instant::now();
    let vote = vote_analyse(
        &loaded.data,
        &constants,
        args.runs as usize,
        mode,
        execution(&args.common),
        &mut rng::from_seed(args.common.seed),
    )?;
    let seconds = started.elapsed().as_secs_f64();
    let report = DetectionReport {
        dataset: Dataset { path: args.input.display().to_string(), n, d, sha256: loaded.sha256 },
        proportions: vote.flags.iter().map(|&f| f as f64 / vote.runs as f64).collect(),
        declared_rows: vote.declared.iter().map(|i| i + 1).collect(),
        constants,
        seed: args.common.seed,
        runs: vote.runs,
        mode,
        threshold: vote.threshold,
        flags: vote.flags,
        timing: Timing { seconds },
    };
    print!("{}", render(&report));
    eprintln!("{} scans of {n} x {d} in {seconds:.2} s (a single scan at n=100, d=500 typically takes about 2 s)", report.runs);
    if let Some(path) = &args.output {
        write_json(path, &report)?;
    }
    Ok(report)
}

/// Flagged rows and a summary line; rows never flagged are omitted.
pub fn render(r: &DetectionReport) -> String {
    let mut t = TextTable::new(["row", "flags", "proportion", "declared"]);
    for (i, (&f, &p)) in r.flags.iter().zip(&r.proportions).enumerate() {
        if f > 0 {
            let declared = if f > r.threshold { "yes" } else { "" };
            t.push([(i + 1).to_string(), f.to_string(), format!("{p:.2}"), declared.to_string()]);
        }
    }
    let c = &r.constants;
    format!(
        "{}\nn={} d={} a={:.4} b={:.4} ({}) runs={} mode={:?} threshold={} declared={:?}\n",
        t.render().trim_end(),
        r.dataset.n,
        r.dataset.d,
        c.a,
        c.b,
        if c.provenance.source.is_empty() { "unknown" } else { &c.provenance.source },
        r.runs,
        r.mode,
        r.threshold,
        r.declared_rows
    )
}
