use super::special::chi2_quantile_upper;
use crate::error::{invalid, Result};
use serde::{Deserialize, Serialize};

/// Radius beyond which a point is an outlier at level `delta` for a sample of size `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub c_nd: f64,
    pub n: usize,
    pub d: usize,
    pub delta: f64,
}

/// Square root of the `(1 - delta)^(1/n)` quantile of chi-squared with `d`
/// degrees of freedom: the `1 - delta` quantile of the largest Mahalanobis
/// norm among `n` Gaussian observations.
pub fn threshold_cnd(n: usize, d: usize, delta: f64) -> Result<Threshold> {
    if n == 0 || d == 0 {
        return Err(invalid(format!("threshold needs n, d >= 1 (n={n}, d={d})")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid(format!("delta must be in (0, 1), got {delta}")));
    }
    // upper tail 1 - (1-delta)^(1/n), formed without cancellation
    let upper = -((1.0 - delta).ln() / n as f64).exp_m1();
    let d32 = u32::try_from(d).map_err(|_| invalid("dimension too large"))?;
    let q = chi2_quantile_upper(upper, d32)?;
    Ok(Threshold { c_nd: q.sqrt(), n, d, delta })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_observation_one_dimension() {
        let t = threshold_cnd(1, 1, 0.05).unwrap();
        assert!((t.c_nd - 1.959_963_984_540_054).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_delta() {
        assert!(threshold_cnd(10, 10, 0.0).is_err());
        assert!(threshold_cnd(10, 10, 1.0).is_err());
        assert!(threshold_cnd(0, 10, 0.05).is_err());
    }
}
