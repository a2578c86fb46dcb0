//! Simulated standardized scores of a point on a sphere around a standard normal sample.
//!
//! The sample and all directions are isotropic, so only the coordinates along
//! the directions actually drawn are ever needed. [`LazyIsotropic`] keeps an
//! orthonormal basis that starts at the point's direction and grows by one
//! vector per projection until it spans the space. The projected sample along
//! each basis vector is an independent standard normal column, so a
//! projection costs `O(n m)` with `m` the current basis size instead of
//! `O(n d)`, and the joint law of all scores matches the full simulation.

use crate::error::{invalid, Error, Result};
use crate::stats::data::dot;
use crate::stats::direction::fill_unit_direction;
use crate::stats::robust::location_scale_with;
use crate::simulation::sampling::standard_normal_matrix;
use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};

fn check(n: usize, d: usize, t: f64) -> Result<()> {
    if n < 2 || d == 0 {
        return Err(invalid(format!("need n >= 2 and d >= 1, got n={n}, d={d}")));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid(format!("radius must be non-negative, got {t}")));
    }
    Ok(())
}

fn chi<R: Rng + ?Sized>(k: usize, rng: &mut R) -> f64 {
    if k == 0 {
        0.0
    } else {
        ChiSquared::new(k as f64).expect("positive degrees of freedom").sample(rng)
    }
}

/// Reusable buffers for [`simulate_score`].
#[derive(Debug, Default)]
pub struct ScoreBuffers {
    projected: Vec<f64>,
    scratch: Vec<f64>,
}

/// `|ỹ|` for one fresh sample, point at radius `t` and direction.
pub fn simulate_score<R: Rng + ?Sized>(n: usize, d: usize, t: f64, rng: &mut R) -> Result<f64> {
    simulate_score_buffered(n, d, t, rng, &mut ScoreBuffers::default())
}

pub fn simulate_score_buffered<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    t: f64,
    rng: &mut R,
    buf: &mut ScoreBuffers,
) -> Result<f64> {
    check(n, d, t)?;
    loop {
        buf.projected.clear();
        buf.projected.extend((0..n).map(|_| rng.sample::<f64, _>(StandardNormal)));
        let ls = location_scale_with(&buf.projected, &mut buf.scratch);
        // first coordinate of a uniform unit vector
        let z1: f64 = rng.sample(StandardNormal);
        let rest = chi(d - 1, rng);
        if ls.madn > 0.0 {
            let x = t * z1 / (z1 * z1 + rest).sqrt();
            return Ok(((x - ls.median) / ls.madn).abs());
        }
    }
}

/// Same law as [`simulate_score`], drawing the full `n × d` sample.
pub fn simulate_score_full<R: Rng + ?Sized>(n: usize, d: usize, t: f64, rng: &mut R) -> Result<f64> {
    check(n, d, t)?;
    let sample = standard_normal_matrix(rng, n, d);
    let mut point = vec![0.0; d];
    fill_unit_direction(rng, &mut point);
    point.iter_mut().for_each(|x| *x *= t);
    let mut v = vec![0.0; d];
    let (mut projected, mut scratch) = (Vec::new(), Vec::new());
    loop {
        fill_unit_direction(rng, &mut v);
        sample.project_into(&v, &mut projected);
        let ls = location_scale_with(&projected, &mut scratch);
        if ls.madn > 0.0 {
            return Ok(((dot(&point, &v) - ls.median) / ls.madn).abs());
        }
    }
}

/// Sequence of scores for one replicate (fixed sample and point, fresh directions).
#[derive(Debug, Clone)]
pub struct LazyIsotropic {
    n: usize,
    d: usize,
    t: f64,
    columns: Vec<f64>,
    m: usize,
    projected: Vec<f64>,
    coeffs: Vec<f64>,
    scratch: Vec<f64>,
}

impl LazyIsotropic {
    pub fn new(n: usize, d: usize, t: f64) -> Result<Self> {
        check(n, d, t)?;
        Ok(Self { n, d, t, columns: Vec::new(), m: 0, projected: vec![0.0; n], coeffs: Vec::new(), scratch: Vec::new() })
    }

    /// Start a new replicate: fresh sample and fresh point.
    pub fn reset<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        self.columns.clear();
        self.columns.extend((0..self.n).map(|_| rng.sample::<f64, _>(StandardNormal)));
        self.m = 1;
    }

    /// Current basis size.
    pub fn basis_len(&self) -> usize {
        self.m
    }

    /// Signed score along a fresh direction; `DegenerateProjection` when MADN is zero.
    pub fn next_score<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<f64> {
        debug_assert!(self.m > 0, "reset before scoring");
        let n = self.n;
        self.coeffs.clear();
        self.coeffs.extend((0..self.m).map(|_| rng.sample::<f64, _>(StandardNormal)));
        let point = self.t * self.coeffs[0];
        combine_columns(&self.columns[..self.m * n], &self.coeffs, &mut self.projected);
        if self.m < self.d {
            let r = chi(self.d - self.m, rng).sqrt();
            let start = self.columns.len();
            self.columns.extend((0..n).map(|_| rng.sample::<f64, _>(StandardNormal)));
            for (p, x) in self.projected.iter_mut().zip(&self.columns[start..]) {
                *p += r * x;
            }
            self.m += 1;
        }
        // the scores are invariant to the common positive scale of the direction
        let ls = location_scale_with(&self.projected, &mut self.scratch);
        if ls.madn > 0.0 {
            Ok((point - ls.median) / ls.madn)
        } else {
            Err(Error::DegenerateProjection)
        }
    }
}

/// `out = Σ_j coeffs[j] · column_j` over column-major `columns`, four columns per pass.
fn combine_columns(columns: &[f64], coeffs: &[f64], out: &mut [f64]) {
    let n = out.len();
    out.iter_mut().for_each(|p| *p = 0.0);
    let mut blocks = columns.chunks_exact(4 * n);
    let mut cs = coeffs.chunks_exact(4);
    for (block, c) in blocks.by_ref().zip(cs.by_ref()) {
        let (x0, rest) = block.split_at(n);
        let (x1, rest) = rest.split_at(n);
        let (x2, x3) = rest.split_at(n);
        for ((((p, a), b), e), f) in out.iter_mut().zip(x0).zip(x1).zip(x2).zip(x3) {
            *p += c[0] * a + c[1] * b + c[2] * e + c[3] * f;
        }
    }
    for (col, &c) in blocks.remainder().chunks_exact(n).zip(cs.remainder()) {
        for (p, x) in out.iter_mut().zip(col) {
            *p += c * x;
        }
    }
}
