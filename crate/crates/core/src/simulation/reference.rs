//! Published decision constants for `α = δ = 0.05`.

use crate::detector::{DetectorConstants, Provenance};
use crate::error::{invalid, Result};

/// Which Monte Carlo size the constants were computed with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceSet {
    /// `N = 10⁶`.
    Large,
    /// `N = 10⁵`.
    Small,
}

pub const REFERENCE_N: [usize; 3] = [50, 100, 500];
pub const REFERENCE_D: [usize; 4] = [50, 100, 500, 1000];
pub const REFERENCE_H: [u32; 2] = [50, 100];

// [n][d][h] -> (a, b)
const LARGE: [[[(f64, f64); 2]; 4]; 3] = [
    [
        [(0.0325, 4.9714), (0.0163, 5.3212)],
        [(0.0303, 4.7184), (0.0150, 5.0936)],
        [(0.0268, 4.3039), (0.0133, 4.6239)],
        [(0.0263, 4.1916), (0.0130, 4.5217)],
    ],
    [
        [(0.0326, 4.6374), (0.0163, 4.9143)],
        [(0.0303, 4.3539), (0.0151, 4.6495)],
        [(0.0267, 3.9230), (0.0133, 4.2078)],
        [(0.0261, 3.8253), (0.0128, 4.0909)],
    ],
    [
        [(0.0336, 4.4525), (0.0167, 4.6989)],
        [(0.0304, 4.1478), (0.0156, 4.3910)],
        [(0.0266, 3.7278), (0.0132, 3.9520)],
        [(0.0259, 3.6096), (0.0130, 3.8197)],
    ],
];

const SMALL: [[[(f64, f64); 2]; 4]; 3] = [
    [
        [(0.0333, 4.9870), (0.0168, 5.3563)],
        [(0.0297, 4.7470), (0.0149, 5.1214)],
        [(0.0262, 4.3144), (0.0131, 4.6484)],
        [(0.0256, 4.1863), (0.0122, 4.5825)],
    ],
    [
        [(0.0326, 4.6579), (0.0165, 4.9365)],
        [(0.0300, 4.3772), (0.0150, 4.6435)],
        [(0.0269, 3.9731), (0.0140, 4.2024)],
        [(0.0262, 3.8331), (0.0134, 4.0953)],
    ],
    [
        [(0.0340, 4.4449), (0.0170, 4.6927)],
        [(0.0312, 4.1760), (0.0154, 4.3896)],
        [(0.0275, 3.7194), (0.0136, 3.9522)],
        [(0.0257, 3.6629), (0.0123, 3.8329)],
    ],
];

/// Tabulated `(a, b)` for a grid cell, if present.
pub fn reference_ab(set: ReferenceSet, n: usize, d: usize, h: u32) -> Option<(f64, f64)> {
    let i = REFERENCE_N.iter().position(|&x| x == n)?;
    let j = REFERENCE_D.iter().position(|&x| x == d)?;
    let k = REFERENCE_H.iter().position(|&x| x == h)?;
    Some(match set {
        ReferenceSet::Large => LARGE[i][j][k],
        ReferenceSet::Small => SMALL[i][j][k],
    })
}

/// Reference constants as a [`DetectorConstants`] value.
pub fn reference_constants(set: ReferenceSet, n: usize, d: usize, h: u32) -> Result<DetectorConstants> {
    let (a, b) = reference_ab(set, n, d, h)
        .ok_or_else(|| invalid(format!("no reference constants for n={n}, d={d}, h={h}")))?;
    let mc_size = match set {
        ReferenceSet::Large => 1_000_000,
        ReferenceSet::Small => 100_000,
    };
    let provenance = Provenance { source: "reference".into(), mc_size: Some(mc_size), ..Provenance::default() };
    Ok(DetectorConstants::new(a, b, n, d, 0.05, 0.05, h as f64)?.with_provenance(provenance))
}
