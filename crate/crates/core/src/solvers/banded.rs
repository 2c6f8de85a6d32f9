use super::transpose;
use crate::error::{Error, Result};
use crate::stencil::{Neighbor, StencilOperator};

/// Refuse factorizations whose band storage would exceed this.
const MAX_BAND_BYTES: usize = 4 << 30;

/// LU factors of the penta-diagonal `I - s A` in banded storage.
///
/// The grid is ordered along its longer axis so the half-bandwidth equals the
/// shorter side. No pivoting: `I - s A` has unit column sums and, in the
/// positivity regime, non-positive off-diagonals, so it is column diagonally
/// dominant. In that regime pivots are taken from tracked column sums rather
/// than from the cancelling diagonal update.
#[derive(Debug, Clone)]
pub struct BandedLu {
    width: usize,
    height: usize,
    column_major: bool,
    bandwidth: usize,
    scaled_tau: f64,
    // row r holds columns r - bandwidth ..= r + bandwidth
    band: Vec<f64>,
}

impl BandedLu {
    /// Bytes of band storage a `width x height` factorization needs.
    pub fn storage_bytes(width: usize, height: usize) -> usize {
        let bw = width.min(height);
        width * height * (2 * bw + 1) * std::mem::size_of::<f64>()
    }

    pub fn factor(op: &StencilOperator, scaled_tau: f64) -> Result<Self> {
        if !(scaled_tau.is_finite() && scaled_tau > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "scaled step must be positive, got {scaled_tau}"
            )));
        }
        let (width, height) = op.dims();
        let bytes = Self::storage_bytes(width, height);
        if bytes > MAX_BAND_BYTES {
            return Err(Error::InvalidConfig(format!(
                "banded factorization of a {width}x{height} grid needs {:.1} GiB",
                bytes as f64 / (1u64 << 30) as f64
            )));
        }
        let column_major = height < width;
        let bandwidth = width.min(height);
        let n = width * height;
        let stride = 2 * bandwidth + 1;
        let order = |p: usize| {
            if column_major {
                (p % width) * height + p / width
            } else {
                p
            }
        };

        let mut band = vec![0.0; n * stride];
        for p in 0..n {
            let r = order(p);
            band[r * stride + bandwidth] = 1.0 - scaled_tau * op.center()[p];
            for dir in Neighbor::ALL {
                if let Some(q) = op.neighbor_index(p, dir) {
                    let c = order(q);
                    band[r * stride + c + bandwidth - r] = -scaled_tau * op.weight(dir, p);
                }
            }
        }

        let conservative = band
            .chunks(stride)
            .all(|row| row[..bandwidth].iter().chain(&row[bandwidth + 1..]).all(|x| *x <= 0.0));
        let mut colsum = if conservative { vec![1.0; n] } else { Vec::new() };
        for k in 0..n {
            let last = (k + bandwidth).min(n - 1);
            if conservative {
                let below: f64 = (k + 1..=last).map(|i| band[i * stride + k + bandwidth - i]).sum();
                band[k * stride + bandwidth] = colsum[k] - below;
            }
            let pivot = band[k * stride + bandwidth];
            if !pivot.is_finite() || pivot == 0.0 {
                return Err(Error::ZeroPivot { line: 0, row: k });
            }
            let span = last - k;
            if conservative {
                let gamma = colsum[k] / pivot;
                for (j, m) in (k + 1..=last).zip(&band[k * stride + bandwidth + 1..]) {
                    colsum[j] -= m * gamma;
                }
            }
            let (head, tail) = band.split_at_mut((k + 1) * stride);
            let pivot_row = &head[k * stride + bandwidth + 1..k * stride + bandwidth + 1 + span];
            for i in k + 1..=last {
                let row = &mut tail[(i - k - 1) * stride..(i - k) * stride];
                let lk = k + bandwidth - i;
                let l = row[lk];
                if l == 0.0 {
                    continue;
                }
                let l = l / pivot;
                row[lk] = l;
                for (a, b) in row[lk + 1..lk + 1 + span].iter_mut().zip(pivot_row) {
                    *a -= l * b;
                }
            }
        }
        Ok(Self {
            width,
            height,
            column_major,
            bandwidth,
            scaled_tau,
            band,
        })
    }

    pub fn scaled_tau(&self) -> f64 {
        self.scaled_tau
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; rhs.len()];
        self.solve_into(rhs, &mut out)?;
        Ok(out)
    }

    pub fn solve_into(&self, rhs: &[f64], out: &mut [f64]) -> Result<()> {
        let n = self.width * self.height;
        if rhs.len() != n || out.len() != n {
            return Err(Error::ShapeMismatch {
                expected: format!("{}x{} field", self.width, self.height),
                found: format!("{} in, {} out", rhs.len(), out.len()),
            });
        }
        let mut y = if self.column_major {
            let mut t = vec![0.0; n];
            transpose(rhs, self.width, self.height, &mut t);
            t
        } else {
            rhs.to_vec()
        };
        let bw = self.bandwidth;
        let stride = 2 * bw + 1;
        for i in 0..n {
            let first = i.saturating_sub(bw);
            let row = &self.band[i * stride..];
            let mut acc = y[i];
            for c in first..i {
                acc -= row[c + bw - i] * y[c];
            }
            y[i] = acc;
        }
        for i in (0..n).rev() {
            let last = (i + bw).min(n - 1);
            let row = &self.band[i * stride..];
            let mut acc = y[i];
            for c in i + 1..=last {
                acc -= row[c + bw - i] * y[c];
            }
            y[i] = acc / row[bw];
        }
        if self.column_major {
            transpose(&y, self.height, self.width, out);
        } else {
            out.copy_from_slice(&y);
        }
        Ok(())
    }
}
