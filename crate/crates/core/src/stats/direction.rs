use crate::error::{invalid, Result};
use rand::Rng;
use rand_distr::StandardNormal;

/// A unit vector in `R^d`, uniformly distributed on the sphere when drawn
/// by [`sample_unit_direction`].
#[derive(Debug, Clone, PartialEq)]
pub struct Direction(Vec<f64>);

impl Direction {
    /// Normalizes `v`; fails on a zero or non-finite vector.
    pub fn from_vec(mut v: Vec<f64>) -> Result<Self> {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(invalid("direction must be a finite non-zero vector"));
        }
        v.iter_mut().for_each(|x| *x /= norm);
        Ok(Self(v))
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// Normalized vector of `d` independent standard normals.
pub fn sample_unit_direction<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Result<Direction> {
    if d == 0 {
        return Err(invalid("direction dimension must be positive"));
    }
    let mut buf = vec![0.0; d];
    fill_unit_direction(rng, &mut buf);
    Ok(Direction(buf))
}

/// In-place variant used on hot paths.
pub fn fill_unit_direction<R: Rng + ?Sized>(rng: &mut R, buf: &mut [f64]) {
    loop {
        let mut norm2 = 0.0;
        for x in buf.iter_mut() {
            *x = rng.sample(StandardNormal);
            norm2 += *x * *x;
        }
        if norm2 > 0.0 {
            let inv = 1.0 / norm2.sqrt();
            buf.iter_mut().for_each(|x| *x *= inv);
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn unit_norm() {
        let mut r = rng::from_seed(3);
        for d in [1, 2, 7, 300] {
            let v = sample_unit_direction(&mut r, d).unwrap();
            let n: f64 = v.components().iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((n - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn one_dimensional_is_sign() {
        let mut r = rng::from_seed(4);
        for _ in 0..20 {
            let v = sample_unit_direction(&mut r, 1).unwrap();
            assert!((v.components()[0].abs() - 1.0).abs() < 1e-15);
        }
        assert!(sample_unit_direction(&mut r, 0).is_err());
    }
}
