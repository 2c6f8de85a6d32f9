use rayon::prelude::*;

use super::transpose;
use crate::error::{Error, Result};
use crate::stencil::{Neighbor, StencilKind, StencilOperator};

/// Memory ordering in which a split operator is tridiagonal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Lines are grid rows; used for the horizontal operator.
    RowWise,
    /// Lines are grid columns; the field is transposed before solving so each
    /// column is contiguous.
    ColumnWise,
}

/// LU factors of `I - s A_n` for a horizontal or vertical operator `A_n`,
/// stored line by line in line-contiguous order.
///
/// Only valid for the `(operator, s)` pair it was built from.
#[derive(Debug, Clone)]
pub struct TridiagonalFactor {
    orientation: Orientation,
    width: usize,
    height: usize,
    scaled_tau: f64,
    line_len: usize,
    // sub-diagonal of the original system
    lower: Vec<f64>,
    inv_pivot: Vec<f64>,
    // super-diagonal divided by the pivot of its row
    upper: Vec<f64>,
}

impl TridiagonalFactor {
    /// Factors `I - scaled_tau * op` with the Thomas algorithm (no pivoting).
    pub fn factor(op: &StencilOperator, scaled_tau: f64) -> Result<Self> {
        if !(scaled_tau.is_finite() && scaled_tau > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "scaled step must be positive, got {scaled_tau}"
            )));
        }
        let (width, height) = op.dims();
        let (orientation, line_len, lines, prev, next) = match op.kind() {
            StencilKind::Horizontal => (Orientation::RowWise, width, height, Neighbor::West, Neighbor::East),
            StencilKind::Vertical => (Orientation::ColumnWise, height, width, Neighbor::North, Neighbor::South),
            StencilKind::Full => return Err(Error::NotSplit(StencilKind::Full.name())),
        };
        let n = width * height;
        let pixel = |line: usize, k: usize| match orientation {
            Orientation::RowWise => line * width + k,
            Orientation::ColumnWise => k * width + line,
        };

        let mut lower = vec![0.0; n];
        let mut inv_pivot = vec![0.0; n];
        let mut upper = vec![0.0; n];
        for line in 0..lines {
            let base = line * line_len;
            for k in 0..line_len {
                let p = pixel(line, k);
                lower[base + k] = -scaled_tau * op.weight(prev, p);
                upper[base + k] = -scaled_tau * op.weight(next, p);
            }
            let a = &lower[base..base + line_len];
            let c = &mut upper[base..base + line_len];
            let m = &mut inv_pivot[base..base + line_len];
            if a.iter().chain(c.iter()).all(|x| *x <= 0.0) {
                factor_line_conservative(a, c, m);
            } else {
                let center = |k: usize| 1.0 - scaled_tau * op.center()[pixel(line, k)];
                factor_line_plain(a, c, m, center).map_err(|row| Error::ZeroPivot { line, row })?;
            }
        }
        Ok(Self {
            orientation,
            width,
            height,
            scaled_tau,
            line_len,
            lower,
            inv_pivot,
            upper,
        })
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn scaled_tau(&self) -> f64 {
        self.scaled_tau
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    /// Number of independent line systems.
    pub fn lines(&self) -> usize {
        (self.width * self.height) / self.line_len
    }

    /// Solves `(I - s A_n) x = rhs`.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; rhs.len()];
        let mut scratch = Vec::new();
        self.solve_into(rhs, &mut out, &mut scratch)?;
        Ok(out)
    }

    /// Solves into `out`. Column-wise factors use `scratch` for the transposed
    /// copy; it is resized as needed.
    pub fn solve_into(&self, rhs: &[f64], out: &mut [f64], scratch: &mut Vec<f64>) -> Result<()> {
        let n = self.width * self.height;
        if rhs.len() != n || out.len() != n {
            return Err(Error::ShapeMismatch {
                expected: format!("{}x{} field", self.width, self.height),
                found: format!("{} in, {} out", rhs.len(), out.len()),
            });
        }
        match self.orientation {
            Orientation::RowWise => {
                out.copy_from_slice(rhs);
                self.solve_lines(out);
            }
            Orientation::ColumnWise => {
                scratch.resize(n, 0.0);
                transpose(rhs, self.width, self.height, scratch);
                self.solve_lines(scratch);
                transpose(scratch, self.height, self.width, out);
            }
        }
        Ok(())
    }

    /// Solves every line of `buf` in place; `buf` is in line-contiguous
    /// order.
    pub fn solve_lines(&self, buf: &mut [f64]) {
        let len = self.line_len;
        buf.par_chunks_mut(len)
            .zip(self.lower.par_chunks(len))
            .zip(self.inv_pivot.par_chunks(len).zip(self.upper.par_chunks(len)))
            .for_each(|((x, a), (inv_m, c))| solve_line(x, a, inv_m, c));
    }
}

/// Pivots from tracked column sums instead of `b - a c / m`.
///
/// Every column of `I - s A_n` sums to one. Eliminating a row keeps the
/// remaining columns' sums at `1 + |c| gamma / m`, and the next pivot is that
/// sum plus the magnitude of the entry below it. With non-positive
/// off-diagonals nothing is subtracted, so pivots carry full relative accuracy
/// however large `s` is.
fn factor_line_conservative(lower: &[f64], upper: &mut [f64], inv_pivot: &mut [f64]) {
    let n = lower.len();
    let mut gamma = 1.0;
    for k in 0..n {
        if k > 0 {
            // upper[k - 1] already holds c / m
            gamma = 1.0 - upper[k - 1] * gamma;
        }
        let below = if k + 1 < n { lower[k + 1] } else { 0.0 };
        let m = gamma - below;
        inv_pivot[k] = 1.0 / m;
        upper[k] /= m;
    }
}

fn factor_line_plain(
    lower: &[f64],
    upper: &mut [f64],
    inv_pivot: &mut [f64],
    center: impl Fn(usize) -> f64,
) -> std::result::Result<(), usize> {
    let mut prev_upper = 0.0;
    for k in 0..lower.len() {
        let a = lower[k];
        let b = center(k);
        let m = b - a * prev_upper;
        if !m.is_finite() || m.abs() <= 1e-14 * (b.abs() + (a * prev_upper).abs()) {
            return Err(k);
        }
        inv_pivot[k] = 1.0 / m;
        prev_upper = upper[k] / m;
        upper[k] = prev_upper;
    }
    Ok(())
}

#[inline]
fn solve_line(x: &mut [f64], lower: &[f64], inv_pivot: &[f64], upper: &[f64]) {
    let n = x.len();
    x[0] *= inv_pivot[0];
    for k in 1..n {
        x[k] = (x[k] - lower[k] * x[k - 1]) * inv_pivot[k];
    }
    for k in (0..n - 1).rev() {
        x[k] -= upper[k] * x[k + 1];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::{assemble_split, drift_from_reference};
    use crate::drift::DriftField;
    use crate::image::PositiveImage;

    #[test]
    fn zero_operator_is_identity() {
        let (a1, a2) = assemble_split(&DriftField::zeros(1, 1));
        let f = TridiagonalFactor::factor(&a1, 3.0).unwrap();
        assert_eq!(f.solve(&[4.5]).unwrap(), vec![4.5]);
        let f = TridiagonalFactor::factor(&a2, 3.0).unwrap();
        assert_eq!(f.solve(&[4.5]).unwrap(), vec![4.5]);
    }

    #[test]
    fn two_pixel_steady_state() {
        // I - A1 = [[2.5, -0.5], [-1.5, 1.5]], and A1 v = 0.
        let v = PositiveImage::new(2, 1, vec![1.0, 3.0]).unwrap();
        let (a1, _) = assemble_split(&drift_from_reference(&v));
        let f = TridiagonalFactor::factor(&a1, 1.0).unwrap();
        let x = f.solve(&[1.0, 3.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 3.0).abs() < 1e-15);
        // Independent check against the 2x2 inverse.
        let x = f.solve(&[1.0, 0.0]).unwrap();
        let det = 2.5 * 1.5 - 0.5 * 1.5;
        assert!((x[0] - 1.5 / det).abs() < 1e-15);
        assert!((x[1] - 1.5 / det).abs() < 1e-15);
    }

    #[test]
    fn homogeneous_rhs() {
        let v = PositiveImage::from_fn(5, 7, |i, j| 1.0 + (i * j) as f64).unwrap();
        let (a1, a2) = assemble_split(&drift_from_reference(&v));
        for op in [a1, a2] {
            let f = TridiagonalFactor::factor(&op, 10.0).unwrap();
            assert!(f.solve(&[0.0; 35]).unwrap().iter().all(|x| *x == 0.0));
        }
    }

    #[test]
    fn rejects_full_operator_and_bad_step() {
        let d = DriftField::zeros(3, 3);
        let full = crate::discretize::assemble_full(&d);
        assert!(matches!(TridiagonalFactor::factor(&full, 1.0), Err(Error::NotSplit(_))));
        let (a1, _) = assemble_split(&d);
        assert!(TridiagonalFactor::factor(&a1, 0.0).is_err());
        assert!(TridiagonalFactor::factor(&a1, f64::NAN).is_err());
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let (a1, _) = assemble_split(&DriftField::zeros(3, 3));
        let f = TridiagonalFactor::factor(&a1, 1.0).unwrap();
        assert!(matches!(f.solve(&[1.0; 4]), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn zero_pivot_is_reported_with_line() {
        // Row 1 carries d = -4 (far outside |d| h <= 2). With s = 1 the first
        // pivot is 1 + s (1 + d / 2) = 0.
        let d = DriftField::new(2, 2, vec![0.0, -4.0], vec![0.0, 0.0]).unwrap();
        let (a1, _) = assemble_split(&d);
        match TridiagonalFactor::factor(&a1, 1.0) {
            Err(Error::ZeroPivot { line: 1, row: 0 }) => {}
            other => panic!("expected zero pivot, got {other:?}"),
        }
    }
}
