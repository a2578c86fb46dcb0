//! Covariance families used in the simulation studies.

use super::linalg::{random_orthogonal, symmetric_eigen, SquareMatrix};
use crate::error::{invalid, Result};
use crate::rng;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CovarianceKind {
    Identity,
    /// Half the eigenvalues 1, the rest `d²`.
    Sigma1,
    /// Equally spaced eigenvalues from 1 to `d²`.
    Sigma2,
    /// `d - 1` unit eigenvalues and one equal to `d²`.
    Sigma3,
    /// Ratio of two equispaced sequences, `d²→2` over `d²→1`; values in `[1, 2]`.
    Sigma4,
    /// Dense `exp(-|i-j|/d)`.
    ExpDecay,
    /// `A'A` with a standard-normal `A`, redrawn per replicate.
    RandomGram,
    CustomEigen,
}

impl CovarianceKind {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Identity => "I",
            Self::Sigma1 => "Sigma1",
            Self::Sigma2 => "Sigma2",
            Self::Sigma3 => "Sigma3",
            Self::Sigma4 => "Sigma4",
            Self::ExpDecay => "S2",
            Self::RandomGram => "S3",
            Self::CustomEigen => "custom",
        }
    }
}

impl fmt::Display for CovarianceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for CovarianceKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "identity" | "i" => Self::Identity,
            "sigma1" => Self::Sigma1,
            "sigma2" => Self::Sigma2,
            "sigma3" => Self::Sigma3,
            "sigma4" => Self::Sigma4,
            "exp-decay" | "s2" => Self::ExpDecay,
            "random-gram" | "s3" => Self::RandomGram,
            "custom" | "custom-eigen" => Self::CustomEigen,
            other => return Err(format!("unknown covariance kind `{other}`")),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "type")]
pub enum Rotation {
    #[default]
    None,
    Random { seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceSpec {
    pub kind: CovarianceKind,
    pub d: usize,
    #[serde(default)]
    pub rotation: Rotation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub custom_eigenvalues: Option<Vec<f64>>,
}

impl CovarianceSpec {
    pub fn new(kind: CovarianceKind, d: usize) -> Self {
        Self { kind, d, rotation: Rotation::None, custom_eigenvalues: None }
    }

    pub fn identity(d: usize) -> Self {
        Self::new(CovarianceKind::Identity, d)
    }

    pub fn custom(eigenvalues: Vec<f64>) -> Self {
        Self {
            kind: CovarianceKind::CustomEigen,
            d: eigenvalues.len(),
            rotation: Rotation::None,
            custom_eigenvalues: Some(eigenvalues),
        }
    }

    pub fn rotated(mut self, seed: u64) -> Self {
        self.rotation = Rotation::Random { seed };
        self
    }

    /// Whether each replicate must draw its own realization.
    pub fn varies_per_replicate(&self) -> bool {
        self.kind == CovarianceKind::RandomGram
    }
}

/// Eigenvalues of the diagonal families, in the order the basis vectors use.
pub fn family_eigenvalues(kind: CovarianceKind, d: usize) -> Option<Vec<f64>> {
    let dd = (d * d) as f64;
    let lin = |from: f64, to: f64, i: usize| {
        if d == 1 {
            from
        } else {
            from + (to - from) * i as f64 / (d - 1) as f64
        }
    };
    Some(match kind {
        CovarianceKind::Identity => vec![1.0; d],
        CovarianceKind::Sigma1 => (0..d).map(|i| if i < d / 2 { 1.0 } else { dd }).collect(),
        CovarianceKind::Sigma2 => (0..d).map(|i| lin(1.0, dd, i)).collect(),
        CovarianceKind::Sigma3 => (0..d).map(|i| if i + 1 < d { 1.0 } else { dd }).collect(),
        CovarianceKind::Sigma4 => (0..d).map(|i| lin(dd, 2.0, i) / lin(dd, 1.0, i)).collect(),
        _ => return None,
    })
}

#[derive(Debug, Clone, PartialEq)]
enum Factor {
    /// `Σ = B Λ B'`; `basis == None` means `B = I`.
    Spectral { eigenvalues: Vec<f64>, sqrt_eigen: Vec<f64>, basis: Option<SquareMatrix> },
    /// `Σ = F F'` for a general square factor.
    Dense { factor: SquareMatrix },
}

/// A realized covariance matrix, stored as a square-root factor.
#[derive(Debug, Clone, PartialEq)]
pub struct Covariance {
    d: usize,
    factor: Factor,
}

/// Realize `spec`. `rng` is only consulted for [`CovarianceKind::RandomGram`].
pub fn build_covariance<R: Rng + ?Sized>(spec: &CovarianceSpec, rng: &mut R) -> Result<Covariance> {
    let d = spec.d;
    if d == 0 {
        return Err(invalid("covariance dimension must be positive"));
    }
    let rotation = match spec.rotation {
        Rotation::None => None,
        Rotation::Random { seed } => Some(random_orthogonal(&mut rng::from_seed(seed), d)),
    };
    let factor = match spec.kind {
        CovarianceKind::CustomEigen => {
            let eig = spec
                .custom_eigenvalues
                .clone()
                .ok_or_else(|| invalid("custom covariance needs eigenvalues"))?;
            if eig.len() != d {
                return Err(invalid(format!("expected {d} custom eigenvalues, got {}", eig.len())));
            }
            if eig.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
                return Err(invalid("custom eigenvalues must be positive and finite"));
            }
            spectral(eig, rotation)
        }
        CovarianceKind::ExpDecay => {
            let s = SquareMatrix::from_fn(d, |i, j| (-(i.abs_diff(j) as f64) / d as f64).exp());
            let (eig, vecs) = symmetric_eigen(&s, 1e-10)?;
            let basis = match rotation {
                Some(q) => q.matmul(&vecs),
                None => vecs,
            };
            spectral(eig.into_iter().map(|l| l.max(0.0)).collect(), Some(basis))
        }
        CovarianceKind::RandomGram => {
            // x = A' z has covariance A'A
            let a = SquareMatrix::random_normal(rng, d);
            let f = a.transpose();
            Factor::Dense { factor: rotation.map_or(f.clone(), |q| q.matmul(&f)) }
        }
        kind => spectral(family_eigenvalues(kind, d).expect("diagonal family"), rotation),
    };
    Ok(Covariance { d, factor })
}

fn spectral(eigenvalues: Vec<f64>, basis: Option<SquareMatrix>) -> Factor {
    let sqrt_eigen = eigenvalues.iter().map(|l| l.sqrt()).collect();
    Factor::Spectral { eigenvalues, sqrt_eigen, basis }
}

impl Covariance {
    pub fn dim(&self) -> usize {
        self.d
    }

    /// Eigenvalues when the realization is stored spectrally.
    pub fn eigenvalues(&self) -> Option<&[f64]> {
        match &self.factor {
            Factor::Spectral { eigenvalues, .. } => Some(eigenvalues),
            Factor::Dense { .. } => None,
        }
    }

    pub fn basis(&self) -> Option<&SquareMatrix> {
        match &self.factor {
            Factor::Spectral { basis, .. } => basis.as_ref(),
            Factor::Dense { .. } => None,
        }
    }

    /// Writes `Σ^{1/2}`-factor times `w` into `out`.
    pub fn transform(&self, w: &[f64], out: &mut [f64]) {
        match &self.factor {
            Factor::Spectral { sqrt_eigen, basis: None, .. } => {
                for ((o, s), x) in out.iter_mut().zip(sqrt_eigen).zip(w) {
                    *o = s * x;
                }
            }
            Factor::Spectral { sqrt_eigen, basis: Some(b), .. } => {
                let scaled: Vec<f64> = sqrt_eigen.iter().zip(w).map(|(s, x)| s * x).collect();
                b.apply(&scaled, out);
            }
            Factor::Dense { factor } => factor.apply(w, out),
        }
    }

    /// `‖x‖_Σ`, the norm of the whitened vector.
    pub fn mahalanobis_norm(&self, x: &[f64]) -> Result<f64> {
        let w = match &self.factor {
            Factor::Spectral { sqrt_eigen, basis, .. } => {
                let rotated = match basis {
                    Some(b) => {
                        let mut r = vec![0.0; self.d];
                        b.transpose().apply(x, &mut r);
                        r
                    }
                    None => x.to_vec(),
                };
                rotated.iter().zip(sqrt_eigen).map(|(v, s)| v / s).collect::<Vec<_>>()
            }
            Factor::Dense { factor } => factor.solve(x)?,
        };
        Ok(w.iter().map(|v| v * v).sum::<f64>().sqrt())
    }

    /// The full matrix `Σ` (for checks; `O(d³)`).
    pub fn matrix(&self) -> SquareMatrix {
        let d = self.d;
        let f = match &self.factor {
            Factor::Dense { factor } => factor.clone(),
            Factor::Spectral { sqrt_eigen, basis, .. } => {
                let diag = SquareMatrix::from_fn(d, |i, j| if i == j { sqrt_eigen[i] } else { 0.0 });
                match basis {
                    Some(b) => b.matmul(&diag),
                    None => diag,
                }
            }
        };
        f.matmul(&f.transpose())
    }

    pub(crate) fn fill_standard<R: Rng + ?Sized>(rng: &mut R, buf: &mut [f64]) {
        buf.iter_mut().for_each(|x| *x = rng.sample(StandardNormal));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eig(kind: CovarianceKind, d: usize) -> Vec<f64> {
        build_covariance(&CovarianceSpec::new(kind, d), &mut rng::from_seed(0))
            .unwrap()
            .eigenvalues()
            .unwrap()
            .to_vec()
    }

    #[test]
    fn family_examples() {
        assert_eq!(eig(CovarianceKind::Identity, 7), vec![1.0; 7]);
        assert_eq!(eig(CovarianceKind::Sigma3, 4), vec![1.0, 1.0, 1.0, 16.0]);
        assert_eq!(eig(CovarianceKind::Sigma1, 4), vec![1.0, 1.0, 16.0, 16.0]);
        let s2 = eig(CovarianceKind::Sigma2, 4);
        assert_eq!(s2, vec![1.0, 6.0, 11.0, 16.0]);
        let s4 = eig(CovarianceKind::Sigma4, 5);
        assert_eq!(s4[0], 1.0);
        assert_eq!(s4[4], 2.0);
        assert!(s4.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn min_eigenvalue_is_one() {
        for kind in [CovarianceKind::Sigma1, CovarianceKind::Sigma2, CovarianceKind::Sigma3, CovarianceKind::Sigma4] {
            for d in [2, 3, 10, 51, 200] {
                let e = eig(kind, d);
                let min = e.iter().copied().fold(f64::INFINITY, f64::min);
                assert_eq!(min, 1.0, "{kind:?} d={d}");
                assert!(e.iter().all(|&l| l > 0.0));
            }
        }
    }

    #[test]
    fn custom_validation() {
        let mut r = rng::from_seed(0);
        assert!(build_covariance(&CovarianceSpec::custom(vec![1.0, -2.0]), &mut r).is_err());
        assert!(build_covariance(&CovarianceSpec::custom(vec![1.0, 2.0]), &mut r).is_ok());
    }

    #[test]
    fn exp_decay_matrix_recovered() {
        let c = build_covariance(&CovarianceSpec::new(CovarianceKind::ExpDecay, 8), &mut rng::from_seed(0)).unwrap();
        let m = c.matrix();
        for i in 0..8usize {
            for j in 0..8 {
                let want = (-(i.abs_diff(j) as f64) / 8.0).exp();
                assert!((m[(i, j)] - want).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn rotation_preserves_spectrum() {
        let spec = CovarianceSpec::new(CovarianceKind::Sigma3, 5).rotated(11);
        let c = build_covariance(&spec, &mut rng::from_seed(0)).unwrap();
        let m = c.matrix();
        let (mut e, _) = symmetric_eigen(&m, 1e-12).unwrap();
        e.sort_by(f64::total_cmp);
        for (got, want) in e.iter().zip([1.0, 1.0, 1.0, 1.0, 25.0]) {
            assert!((got - want).abs() < 1e-8);
        }
    }

    #[test]
    fn parses_kinds() {
        assert_eq!("sigma3".parse::<CovarianceKind>().unwrap(), CovarianceKind::Sigma3);
        assert_eq!("S2".parse::<CovarianceKind>().unwrap(), CovarianceKind::ExpDecay);
        assert!("nope".parse::<CovarianceKind>().is_err());
    }
}
