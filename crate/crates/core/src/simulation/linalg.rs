//! Small dense linear algebra needed by the covariance families.

use crate::error::{Error, Result};
use crate::stats::data::dot;
use rand::Rng;
use rand_distr::StandardNormal;

/// Square row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    d: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(d: usize) -> Self {
        Self { d, data: vec![0.0; d * d] }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = Self::zeros(d);
        for i in 0..d {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(d: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn random_normal<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Self {
        Self { d, data: (0..d * d).map(|_| rng.sample(StandardNormal)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.d, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let d = self.d;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let aik = self[(i, k)];
                if aik == 0.0 {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * d..(i + 1) * d];
                for (o, &b) in dst.iter_mut().zip(orow) {
                    *o += aik * b;
                }
            }
        }
        out
    }

    /// `self · x`
    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot(self.row(i), x);
        }
    }

    /// Solve `self · x = rhs` by Gaussian elimination with partial pivoting.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let d = self.d;
        let mut a = self.data.clone();
        let mut x = rhs.to_vec();
        for col in 0..d {
            let piv = (col..d)
                .max_by(|&i, &j| a[i * d + col].abs().total_cmp(&a[j * d + col].abs()))
                .expect("non-empty range");
            if a[piv * d + col].abs() < 1e-300 {
                return Err(Error::Numerical("singular matrix".into()));
            }
            if piv != col {
                for k in 0..d {
                    a.swap(piv * d + k, col * d + k);
                }
                x.swap(piv, col);
            }
            let p = a[col * d + col];
            for i in col + 1..d {
                let f = a[i * d + col] / p;
                if f != 0.0 {
                    for k in col..d {
                        a[i * d + k] -= f * a[col * d + k];
                    }
                    x[i] -= f * x[col];
                }
            }
        }
        for i in (0..d).rev() {
            let s: f64 = (i + 1..d).map(|k| a[i * d + k] * x[k]).sum();
            x[i] = (x[i] - s) / a[i * d + i];
        }
        Ok(x)
    }

    fn off_diagonal_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.d {
            for j in 0..self.d {
                if i != j {
                    s += self[(i, j)] * self[(i, j)];
                }
            }
        }
        s.sqrt()
    }

    fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

impl std::ops::Index<(usize, usize)> for SquareMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.d + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for SquareMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.d + j]
    }
}

/// Eigen-decomposition `A = V diag(λ) V'` of a symmetric matrix by cyclic Jacobi
/// rotations. Columns of `V` are the eigenvectors. Stops when the off-diagonal
/// Frobenius norm is below `tol · max(1, ‖A‖_F)`.
pub fn symmetric_eigen(a: &SquareMatrix, tol: f64) -> Result<(Vec<f64>, SquareMatrix)> {
    let d = a.dim();
    let mut m = a.clone();
    let mut v = SquareMatrix::identity(d);
    let stop = tol * a.frobenius().max(1.0);
    for _sweep in 0..100 {
        if m.off_diagonal_norm() <= stop {
            let eig = (0..d).map(|i| m[(i, i)]).collect();
            return Ok((eig, v));
        }
        for p in 0..d {
            for q in p + 1..d {
                let apq = m[(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // rows/columns p and q of m
                for k in 0..d {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..d {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..d {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    Err(Error::Numerical("Jacobi eigensolver did not converge".into()))
}

/// Haar-distributed orthogonal matrix via Gram-Schmidt on a Gaussian matrix.
pub fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R, d: usize) -> SquareMatrix {
    let g = SquareMatrix::random_normal(rng, d);
    // orthonormalize the columns of g (stored as rows of q, transposed at the end)
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(d);
    for j in 0..d {
        let mut col: Vec<f64> = (0..d).map(|i| g[(i, j)]).collect();
        for _ in 0..2 {
            for prev in &q {
                let proj = dot(prev, &col);
                col.iter_mut().zip(prev).for_each(|(c, p)| *c -= proj * p);
            }
        }
        let norm = dot(&col, &col).sqrt();
        col.iter_mut().for_each(|c| *c /= norm);
        q.push(col);
    }
    SquareMatrix::from_fn(d, |i, j| q[j][i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn jacobi_reconstructs() {
        let mut r = rng::from_seed(2);
        let g = SquareMatrix::random_normal(&mut r, 12);
        let a = g.transpose().matmul(&g);
        let (eig, v) = symmetric_eigen(&a, 1e-12).unwrap();
        let lam = SquareMatrix::from_fn(12, |i, j| if i == j { eig[i] } else { 0.0 });
        let back = v.matmul(&lam).matmul(&v.transpose());
        for i in 0..12 {
            for j in 0..12 {
                assert!((back[(i, j)] - a[(i, j)]).abs() < 1e-9);
            }
        }
        assert!(eig.iter().all(|&l| l > 0.0));
    }

    #[test]
    fn orthogonal_is_orthogonal() {
        let mut r = rng::from_seed(3);
        let q = random_orthogonal(&mut r, 9);
        let qtq = q.transpose().matmul(&q);
        for i in 0..9 {
            for j in 0..9 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((qtq[(i, j)] - e).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn solve_recovers() {
        let mut r = rng::from_seed(4);
        let a = SquareMatrix::random_normal(&mut r, 7);
        let x: Vec<f64> = (0..7).map(|i| i as f64 - 3.0).collect();
        let mut b = vec![0.0; 7];
        a.apply(&x, &mut b);
        let back = a.solve(&b).unwrap();
        for (u, v) in back.iter().zip(&x) {
            assert!((u - v).abs() < 1e-9);
        }
    }
}
