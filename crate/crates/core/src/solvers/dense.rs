//! Dense matrices for cross-checking the banded solvers on small grids.

use crate::error::{Error, Result};
use crate::stencil::{Neighbor, StencilOperator};

/// Largest grid side the dense oracle accepts.
pub const MAX_ORACLE_SIDE: usize = 64;

/// Square row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Explicit matrix of a stencil operator (row `p` = equation of pixel `p`).
    pub fn from_stencil(op: &StencilOperator) -> Result<Self> {
        let (w, h) = op.dims();
        if w > MAX_ORACLE_SIDE || h > MAX_ORACLE_SIDE {
            return Err(Error::OracleTooLarge {
                width: w,
                height: h,
                max: MAX_ORACLE_SIDE,
            });
        }
        let n = w * h;
        let mut m = Self::zeros(n);
        for p in 0..n {
            m.data[p * n + p] = op.center()[p];
            for dir in Neighbor::ALL {
                if let Some(q) = op.neighbor_index(p, dir) {
                    m.data[p * n + q] += op.weight(dir, p);
                }
            }
        }
        Ok(m)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.n + j] = value;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn column_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.n];
        for i in 0..self.n {
            for (s, v) in sums.iter_mut().zip(&self.data[i * self.n..(i + 1) * self.n]) {
                *s += v;
            }
        }
        sums
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &DenseMatrix, b: f64) -> DenseMatrix {
        assert_eq!(self.n, other.n);
        let data = self.data.iter().zip(&other.data).map(|(x, y)| a * x + b * y).collect();
        DenseMatrix { n: self.n, data }
    }

    /// `I - s * self`.
    pub fn shifted(&self, s: f64) -> DenseMatrix {
        DenseMatrix::identity(self.n).combine(1.0, self, -s)
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = DenseMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        self.data
            .chunks(self.n)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Solves `self * x = rhs` by Gaussian elimination with partial pivoting.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        if rhs.len() != n {
            return Err(Error::ShapeMismatch {
                expected: format!("{n} values"),
                found: format!("{}", rhs.len()),
            });
        }
        let mut a = self.data.clone();
        let mut x = rhs.to_vec();
        for k in 0..n {
            let (piv, max) =
                (k..n)
                    .map(|i| (i, a[i * n + k].abs()))
                    .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if max == 0.0 || !max.is_finite() {
                return Err(Error::ZeroPivot { line: 0, row: k });
            }
            if piv != k {
                for j in 0..n {
                    a.swap(k * n + j, piv * n + j);
                }
                x.swap(k, piv);
            }
            let pivot = a[k * n + k];
            for i in k + 1..n {
                let l = a[i * n + k] / pivot;
                if l == 0.0 {
                    continue;
                }
                for j in k..n {
                    a[i * n + j] -= l * a[k * n + j];
                }
                x[i] -= l * x[k];
            }
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..n {
                acc -= a[i * n + j] * x[j];
            }
            x[i] = acc / a[i * n + i];
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<DenseMatrix> {
        let n = self.n;
        let mut inv = DenseMatrix::zeros(n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            let col = self.solve(&e)?;
            for (i, x) in col.into_iter().enumerate() {
                inv.data[i * n + j] = x;
            }
        }
        Ok(inv)
    }
}

/// Solves `(I - scaled_tau * a) x = rhs` densely.
pub fn dense_solve_oracle(a: &DenseMatrix, scaled_tau: f64, rhs: &[f64]) -> Result<Vec<f64>> {
    if a.size() > MAX_ORACLE_SIDE * MAX_ORACLE_SIDE {
        return Err(Error::OracleTooLarge {
            width: a.size(),
            height: 1,
            max: MAX_ORACLE_SIDE,
        });
    }
    a.shifted(scaled_tau).solve(rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::assemble_full;
    use crate::drift::DriftField;

    #[test]
    fn single_pixel_zero_operator() {
        let a = DenseMatrix::from_stencil(&assemble_full(&DriftField::zeros(1, 1))).unwrap();
        assert_eq!(dense_solve_oracle(&a, 7.0, &[3.25]).unwrap(), vec![3.25]);
    }

    #[test]
    fn guard_rail() {
        let op = assemble_full(&DriftField::zeros(65, 2));
        assert!(matches!(
            DenseMatrix::from_stencil(&op),
            Err(Error::OracleTooLarge { .. })
        ));
    }

    #[test]
    fn solve_and_inverse() {
        let mut m = DenseMatrix::zeros(3);
        for (k, v) in [0.0, 2.0, 1.0, 1.0, 1.0, 0.0, 3.0, 0.0, 1.0].into_iter().enumerate() {
            m.set(k / 3, k % 3, v);
        }
        let x = m.solve(&[3.0, 2.0, 4.0]).unwrap();
        let back = m.matvec(&x);
        for (a, b) in back.iter().zip([3.0, 2.0, 4.0]) {
            assert!((a - b).abs() < 1e-14);
        }
        let id = m.matmul(&m.inverse().unwrap());
        for i in 0..3 {
            for j in 0..3 {
                assert!((id.get(i, j) - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }
}
