//! Gaussian samples and points at a fixed Mahalanobis radius.

use super::covariance::Covariance;
use crate::error::{invalid, Result};
use crate::stats::DataMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

/// `n × d` matrix of independent standard normals.
pub fn standard_normal_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize, d: usize) -> DataMatrix {
    let values = (0..n * d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    DataMatrix::new(n, d, values).expect("finite standard normal draws")
}

/// `n` centred Gaussian rows with covariance `cov`.
pub fn sample_gaussian<R: Rng + ?Sized>(n: usize, cov: &Covariance, rng: &mut R) -> Result<DataMatrix> {
    if n == 0 {
        return Err(invalid("sample size must be positive"));
    }
    let d = cov.dim();
    let mut values = vec![0.0; n * d];
    let mut z = vec![0.0; d];
    for row in values.chunks_exact_mut(d) {
        Covariance::fill_standard(rng, &mut z);
        cov.transform(&z, row);
    }
    DataMatrix::new(n, d, values)
}

/// A point uniformly distributed on `{x : ‖x‖_Σ = t}`.
pub fn sample_on_mahalanobis_sphere<R: Rng + ?Sized>(cov: &Covariance, t: f64, rng: &mut R) -> Result<Vec<f64>> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid(format!("radius must be positive, got {t}")));
    }
    let d = cov.dim();
    let mut z = vec![0.0; d];
    crate::stats::direction::fill_unit_direction(rng, &mut z);
    z.iter_mut().for_each(|v| *v *= t);
    let mut x = vec![0.0; d];
    cov.transform(&z, &mut x);
    Ok(x)
}
