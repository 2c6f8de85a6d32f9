//! Linear solvers for the implicit parts of the time integrators.
//!
//! - [`TridiagonalFactor`]: Thomas factorization of `I - s A_n` for one split
//!   operator, one independent system per grid line.
//! - [`BandedLu`]: banded LU of the full penta-diagonal `I - s A`, used by the
//!   non-split implicit scheme.
//! - [`dense`]: small dense matrices, used as test oracles.

mod banded;
pub mod dense;
mod tridiag;

pub use banded::BandedLu;
pub use dense::{dense_solve_oracle, DenseMatrix};
pub use tridiag::{Orientation, TridiagonalFactor};

/// Transposes a `height x width` row-major array into `width x height`.
pub(crate) fn transpose(src: &[f64], width: usize, height: usize, dst: &mut [f64]) {
    const BLOCK: usize = 32;
    debug_assert_eq!(src.len(), width * height);
    debug_assert_eq!(dst.len(), width * height);
    for j0 in (0..height).step_by(BLOCK) {
        let j1 = (j0 + BLOCK).min(height);
        for i0 in (0..width).step_by(BLOCK) {
            let i1 = (i0 + BLOCK).min(width);
            for j in j0..j1 {
                let row = &src[j * width..(j + 1) * width];
                for i in i0..i1 {
                    dst[i * height + j] = row[i];
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::transpose;

    #[test]
    fn transpose_round_trip() {
        let (w, h) = (37, 70);
        let src: Vec<f64> = (0..w * h).map(|v| v as f64).collect();
        let mut t = vec![0.0; w * h];
        transpose(&src, w, h, &mut t);
        assert_eq!(t[5 * h + 3], src[3 * w + 5]);
        let mut back = vec![0.0; w * h];
        transpose(&t, h, w, &mut back);
        assert_eq!(back, src);
    }
}
