use crate::error::{invalid, Error, Result};

/// An `n × d` sample stored row-major; rows are observations.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    n: usize,
    d: usize,
    values: Vec<f64>,
}

impl DataMatrix {
    pub fn new(n: usize, d: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(invalid(format!("data matrix must be non-empty, got {n}x{d}")));
        }
        if values.len() != n * d {
            return Err(Error::DimensionMismatch { expected: n * d, found: values.len() });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!(
                "non-finite entry at row {}, column {}",
                pos / d,
                pos % d
            )));
        }
        Ok(Self { n, d, values })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        let mut values = Vec::with_capacity(n * d);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(invalid(format!("row {i} has {} columns, expected {d}", row.len())));
            }
            values.extend_from_slice(row);
        }
        Self::new(n, d, values)
    }

    pub fn rows(&self) -> usize {
        self.n
    }

    pub fn cols(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.d)
    }

    /// Writes `row_i · direction` into `out[i]`.
    pub fn project_into(&self, direction: &[f64], out: &mut Vec<f64>) {
        debug_assert_eq!(direction.len(), self.d);
        out.clear();
        out.extend(self.row_iter().map(|r| dot(r, direction)));
    }

    /// `c · x + shift` applied to every row.
    pub fn affine(&self, scale: f64, shift: &[f64]) -> Result<Self> {
        if shift.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, found: shift.len() });
        }
        let values = self
            .row_iter()
            .flat_map(|r| r.iter().zip(shift).map(|(x, m)| scale * x + m))
            .collect();
        Self::new(self.n, self.d, values)
    }

    /// Column-wise medians.
    pub fn column_medians(&self) -> Vec<f64> {
        let mut col = vec![0.0; self.n];
        (0..self.d)
            .map(|j| {
                for (i, c) in col.iter_mut().enumerate() {
                    *c = self.values[i * self.d + j];
                }
                super::robust::median_in_place(&mut col)
            })
            .collect()
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    // four accumulators let the compiler vectorize without reassociation
    let mut acc = [0.0f64; 4];
    let chunks_a = a.chunks_exact(4);
    let chunks_b = b.chunks_exact(4);
    let tail: f64 = chunks_a
        .remainder()
        .iter()
        .zip(chunks_b.remainder())
        .map(|(x, y)| x * y)
        .sum();
    for (ca, cb) in chunks_a.zip(chunks_b) {
        for k in 0..4 {
            acc[k] += ca[k] * cb[k];
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}
