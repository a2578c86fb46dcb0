use crate::error::{invalid, Error, Result};
use serde::{Deserialize, Serialize};

/// Where a pair of decision constants came from.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Provenance {
    /// Free-form origin tag, e.g. `"calibrated"` or `"reference"`.
    pub source: String,
    /// Monte Carlo size used for the initial quantiles.
    pub mc_size: Option<usize>,
    pub seed: Option<u64>,
    pub estimated_level: Option<f64>,
    pub estimated_mean_projections: Option<f64>,
}

/// Decision band `(a, b)` of the sequential test together with the design it was built for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorConstants {
    pub a: f64,
    pub b: f64,
    pub n: usize,
    pub d: usize,
    pub alpha: f64,
    pub delta: f64,
    /// Target mean number of projections at the threshold radius.
    pub h: f64,
    #[serde(default)]
    pub provenance: Provenance,
}

impl DetectorConstants {
    pub fn new(a: f64, b: f64, n: usize, d: usize, alpha: f64, delta: f64, h: f64) -> Result<Self> {
        let c = Self { a, b, n, d, alpha, delta, h, provenance: Provenance::default() };
        c.validate()?;
        Ok(c)
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a <= self.b) || self.a.is_nan() || self.b.is_nan() {
            return Err(invalid(format!("constants need 0 < a <= b, got a={}, b={}", self.a, self.b)));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(invalid(format!("alpha must be in (0, 1], got {}", self.alpha)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(invalid(format!("delta must be in (0, 1), got {}", self.delta)));
        }
        if !(self.h >= 1.0) {
            return Err(invalid(format!("target projections must be >= 1, got {}", self.h)));
        }
        Ok(())
    }

    /// Fails unless the constants were built for an `n × d` sample.
    pub fn check_shape(&self, n: usize, d: usize) -> Result<()> {
        if self.d != d {
            return Err(Error::DimensionMismatch { expected: self.d, found: d });
        }
        if self.n != n {
            return Err(Error::DimensionMismatch { expected: self.n, found: n });
        }
        Ok(())
    }

    /// Default projection cap, `ceil(100 h)`.
    pub fn default_cap(&self) -> usize {
        default_cap(self.h)
    }
}

pub fn default_cap(h: f64) -> usize {
    (100.0 * h).ceil().max(1.0) as usize
}
