//! Experiment grids and single experiment cells.

use crate::args::{ExperimentArg, PaperTable, Scale, SimulateArgs};
use crate::constants::resolve;
use crate::error::{CliError, CliResult};
use crate::{execution, write_json};
use rpod::calibration::RadiusRule;
use rpod::rng::{derive_seed, from_seed};
use rpod::simulation::report::render_reports;
use rpod::simulation::tuning::TUNING_DRAWS;
use rpod::simulation::*;
use rpod::{calibrate_with, CalibrationTarget, DetectorConstants, Execution};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Alpha and target projections of the constants tuned for clean-sample runs.
pub const TUNED_ALPHA: f64 = 0.1;
pub const TUNED_H: f64 = 50.0;

#[derive(Debug, Clone, PartialEq)]
enum ConstantsPlan {
    Reference(u32),
    Tuned,
    Given(DetectorConstants),
}

#[derive(Debug, Clone, PartialEq)]
struct CellPlan {
    kind: ExperimentKind,
    n: usize,
    d: usize,
    covariance: CovarianceSpec,
    constants: ConstantsPlan,
    reps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellOutcome {
    pub index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<ExperimentReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationOutput {
    pub seed: u64,
    pub cells: Vec<CellOutcome>,
    pub table: String,
}

impl SimulationOutput {
    pub fn failed(&self) -> usize {
        self.cells.iter().filter(|c| c.error.is_some()).count()
    }
}

const SIGMAS: [CovarianceKind; 5] = [
    CovarianceKind::Identity,
    CovarianceKind::Sigma1,
    CovarianceKind::Sigma2,
    CovarianceKind::Sigma3,
    CovarianceKind::Sigma4,
];

fn level_grid(multipliers: &[f64], scale: Scale, reps: Option<usize>) -> Vec<CellPlan> {
    let (ns, ds, default_reps): (&[usize], &[usize], usize) = match scale {
        Scale::Desk => (&[50], &[50, 100, 500], 1000),
        Scale::Full => (&[50, 100, 500], &[50, 100, 500, 1000], 5000),
    };
    let mut cells = Vec::new();
    for &n in ns {
        for &d in ds {
            for &r in multipliers {
                for h in [50, 100] {
                    for kind in SIGMAS {
                        cells.push(CellPlan {
                            kind: ExperimentKind::Level { multiplier: r },
                            n,
                            d,
                            covariance: CovarianceSpec::new(kind, d),
                            constants: ConstantsPlan::Reference(h),
                            reps: reps.unwrap_or(default_reps),
                        });
                    }
                }
            }
        }
    }
    cells
}

fn clean_grid(scale: Scale, reps: Option<usize>, seed: u64) -> Vec<CellPlan> {
    let (ns, ds): (&[usize], &[usize]) = match scale {
        Scale::Desk => (&[50], &[50]),
        Scale::Full => (&[50, 100], &[50, 500, 1000]),
    };
    let mut cells = Vec::new();
    for &n in ns {
        for &d in ds {
            let mut specs = vec![
                CovarianceSpec::identity(d),
                CovarianceSpec::new(CovarianceKind::ExpDecay, d),
                CovarianceSpec::new(CovarianceKind::RandomGram, d),
            ];
            if scale == Scale::Full {
                specs.extend(SIGMAS[1..].iter().map(|&k| CovarianceSpec::new(k, d).rotated(derive_seed(seed, d as u64))));
            }
            for covariance in specs {
                cells.push(CellPlan {
                    kind: ExperimentKind::CleanSample,
                    n,
                    d,
                    covariance,
                    constants: ConstantsPlan::Tuned,
                    reps: reps.unwrap_or(500),
                });
            }
        }
    }
    cells
}

fn masking_grid(scale: Scale, reps: Option<usize>) -> Vec<CellPlan> {
    let (ns, ds, default_reps): (&[usize], &[usize], usize) = match scale {
        Scale::Desk => (&[50], &[50], 500),
        Scale::Full => (&[50, 100], &[50, 500, 1000], 1000),
    };
    let mut cells = Vec::new();
    for &n in ns {
        for &d in ds {
            for kind in SIGMAS {
                cells.push(CellPlan {
                    kind: ExperimentKind::Contamination { radii: DEFAULT_CONTAMINATION_RADII.to_vec() },
                    n,
                    d,
                    covariance: CovarianceSpec::new(kind, d),
                    constants: ConstantsPlan::Reference(50),
                    reps: reps.unwrap_or(default_reps),
                });
            }
        }
    }
    cells
}

fn single_cell(args: &SimulateArgs) -> CliResult<CellPlan> {
    let kind: CovarianceKind = args.covariance.parse().map_err(CliError::Usage)?;
    let covariance = CovarianceSpec::new(kind, args.d);
    let kind = match args.experiment {
        ExperimentArg::Level => ExperimentKind::Level { multiplier: args.radius },
        ExperimentArg::Contamination => ExperimentKind::Contamination {
            radii: args.radii.clone().unwrap_or_else(|| DEFAULT_CONTAMINATION_RADII.to_vec()),
        },
        ExperimentArg::Clean => ExperimentKind::CleanSample,
    };
    let constants = resolve(&args.constants, &args.design, args.n, args.d, &args.common.cache_dir)?;
    let default_reps = match args.scale {
        Scale::Desk => 1000,
        Scale::Full => 5000,
    };
    Ok(CellPlan {
        kind,
        n: args.n,
        d: args.d,
        covariance,
        constants: ConstantsPlan::Given(constants),
        reps: args.reps.unwrap_or(default_reps),
    })
}

/// Constants for clean-sample runs: level `TUNED_ALPHA` at the 0.75 quantile radius.
pub fn tuned_constants(n: usize, d: usize, exec: Execution, seed: u64) -> rpod::Result<DetectorConstants> {
    let q = tuning_radius(n, d, TUNING_DRAWS, &mut from_seed(derive_seed(seed, 0)))?;
    let mut target = CalibrationTarget::new(n, d, TUNED_ALPHA, 0.05, TUNED_H);
    target.radius = RadiusRule::Fixed(q);
    let mut c = calibrate_with(&target, exec, derive_seed(seed, 1))?.constants;
    c.provenance.source = format!("tuned at radius {q:.4}");
    Ok(c)
}

fn plan(args: &SimulateArgs) -> CliResult<Vec<CellPlan>> {
    let seed = args.common.seed;
    Ok(match args.paper_table {
        Some(PaperTable::Level) => level_grid(&[1.0], args.scale, args.reps),
        Some(PaperTable::Power) => level_grid(&[1.2, 2.0], args.scale, args.reps),
        Some(PaperTable::Clean) => clean_grid(args.scale, args.reps, seed),
        Some(PaperTable::Masking) => masking_grid(args.scale, args.reps),
        None => vec![single_cell(args)?],
    })
}

pub fn run(args: &SimulateArgs) -> CliResult<SimulationOutput> {
    let cells = plan(args)?;
    let exec = execution(&args.common);
    let seed = args.common.seed;
    let mut tuned: BTreeMap<(usize, usize), rpod::Result<DetectorConstants>> = BTreeMap::new();
    let mut outcomes = Vec::with_capacity(cells.len());
    for (index, cell) in cells.into_iter().enumerate() {
        let constants = match cell.constants {
            ConstantsPlan::Reference(h) => reference_constants(ReferenceSet::Large, cell.n, cell.d, h),
            ConstantsPlan::Given(c) => Ok(c),
            ConstantsPlan::Tuned => tuned
                .entry((cell.n, cell.d))
                .or_insert_with(|| {
                    eprintln!("tuning constants for n={}, d={}", cell.n, cell.d);
                    tuned_constants(cell.n, cell.d, exec, derive_seed(seed, u64::MAX - cell.d as u64 - 1000 * cell.n as u64))
                })
                .clone(),
        };
        let result = constants.and_then(|constants| {
            let config = ExperimentConfig {
                kind: cell.kind,
                n: cell.n,
                d: cell.d,
                covariance: cell.covariance,
                constants,
                reps: cell.reps,
                seed: derive_seed(seed, index as u64),
                cap: None,
            };
            run_experiment(&config, exec)
        });
        let outcome = match result {
            Ok(report) => CellOutcome { index, report: Some(report), error: None },
            Err(e) => {
                eprintln!("cell {index} failed: {e}");
                CellOutcome { index, report: None, error: Some(e.to_string()) }
            }
        };
        if let Some(dir) = &args.output {
            write_json(&dir.join(format!("cell-{index:03}.json")), &outcome)?;
        }
        outcomes.push(outcome);
    }
    let reports: Vec<ExperimentReport> = outcomes.iter().filter_map(|c| c.report.clone()).collect();
    let table = render_reports(&reports);
    print!("{table}");
    if let Some(dir) = &args.output {
        std::fs::write(dir.join("table.txt"), &table)
            .map_err(|e| CliError::failure(format!("{}: {e}", dir.display())))?;
    }
    Ok(SimulationOutput { seed, cells: outcomes, table })
}
