//! Radius used to tune constants towards a fixed share of flagged clean points.

use crate::calibration::quantile::empirical_quantile;
use crate::error::{invalid, Result};
use rand::Rng;
use rand_distr::{ChiSquared, Distribution};

/// Default total number of chi-square draws behind [`tuning_radius`].
pub const TUNING_DRAWS: usize = 100_000;

/// Monte Carlo mean of the 0.75 sample quantile of `n` draws of `sqrt(χ²_d)`.
///
/// Uses `ceil(draws / n)` samples of size `n`.
pub fn tuning_radius<R: Rng + ?Sized>(n: usize, d: usize, draws: usize, rng: &mut R) -> Result<f64> {
    if n == 0 || d == 0 || draws == 0 {
        return Err(invalid("tuning radius needs positive n, d and draws"));
    }
    let chi = ChiSquared::new(d as f64).map_err(|e| invalid(e.to_string()))?;
    let samples = draws.div_ceil(n);
    let mut buf = vec![0.0; n];
    let mut acc = 0.0;
    for _ in 0..samples {
        buf.iter_mut().for_each(|x| *x = chi.sample(rng).sqrt());
        buf.sort_by(f64::total_cmp);
        acc += empirical_quantile(&buf, 0.75)?;
    }
    Ok(acc / samples as f64)
}
