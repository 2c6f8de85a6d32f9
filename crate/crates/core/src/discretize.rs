//! Drift construction and assembly of the discrete osmosis operator.
//!
//! Across an interior edge from pixel `p` to its successor `q` (east or
//! south) with drift `d`, the discrete flux is
//!
//! ```text
//! F = (u_q - u_p) / h  -  d (u_p + u_q) / 2
//! ```
//!
//! and `(A u)_p += F / h`, `(A u)_q -= F / h`. Every edge therefore adds a
//! zero-sum pair to each column of `A`, which is what makes the average grey
//! value an exact invariant of every scheme built on it.

use crate::drift::{DriftField, EdgeMask};
use crate::error::{Error, Result};
use crate::image::{PositiveImage, Raster};
use crate::stencil::{Neighbor, StencilKind, StencilOperator};

/// Drift making `v` an exact discrete steady state:
/// `d = 2 (v_q - v_p) / (h (v_q + v_p))` on every interior edge, which
/// zeroes the flux of `v` across each edge individually.
pub fn drift_from_reference(v: &PositiveImage) -> DriftField {
    let (w, hgt) = v.dims();
    let h = v.spacing();
    let data = v.data();
    let mut drift = DriftField::zeros(w, hgt)
        .with_spacing(h)
        .expect("image spacing is positive");
    let sample = |a: f64, b: f64| 2.0 * (b - a) / (h * (a + b));
    let (d1, d2) = drift.parts_mut();
    for j in 0..hgt {
        for i in 0..w.saturating_sub(1) {
            let p = j * w + i;
            d1[j * (w - 1) + i] = sample(data[p], data[p + 1]);
        }
    }
    for j in 0..hgt.saturating_sub(1) {
        for i in 0..w {
            let p = j * w + i;
            d2[j * w + i] = sample(data[p], data[p + w]);
        }
    }
    drift
}

/// Copy of `drift` with every masked edge set to zero.
pub fn zero_drift_on_mask(drift: &DriftField, mask: &EdgeMask) -> Result<DriftField> {
    if drift.dims() != mask.dims() {
        return Err(Error::shape(drift.dims(), mask.dims()));
    }
    let mut out = drift.clone();
    let (d1, d2) = out.parts_mut();
    for (d, m) in d1.iter_mut().zip(mask.horizontal_edges()) {
        if *m {
            *d = 0.0;
        }
    }
    for (d, m) in d2.iter_mut().zip(mask.vertical_edges()) {
        if *m {
            *d = 0.0;
        }
    }
    Ok(out)
}

/// Splits the osmosis operator into its horizontal part `A1` and vertical
/// part `A2`. Each diagonal holds only the terms of its own direction, so
/// `A1 + A2 = A`.
pub fn assemble_split(drift: &DriftField) -> (StencilOperator, StencilOperator) {
    let (w, hgt) = drift.dims();
    let h = drift.spacing();
    let inv_h2 = 1.0 / (h * h);
    let half_inv_h = 0.5 / h;

    let mut a1 = StencilOperator::zeros(w, hgt, h, StencilKind::Horizontal);
    for j in 0..hgt {
        for i in 0..w.saturating_sub(1) {
            let p = j * w + i;
            let dh = drift.horizontal(i, j) * half_inv_h;
            a1.neighbor_mut(Neighbor::East)[p] = inv_h2 - dh;
            a1.neighbor_mut(Neighbor::West)[p + 1] = inv_h2 + dh;
            a1.center_mut()[p] += -inv_h2 - dh;
            a1.center_mut()[p + 1] += -inv_h2 + dh;
        }
    }

    let mut a2 = StencilOperator::zeros(w, hgt, h, StencilKind::Vertical);
    for j in 0..hgt.saturating_sub(1) {
        for i in 0..w {
            let p = j * w + i;
            let dh = drift.vertical(i, j) * half_inv_h;
            a2.neighbor_mut(Neighbor::South)[p] = inv_h2 - dh;
            a2.neighbor_mut(Neighbor::North)[p + w] = inv_h2 + dh;
            a2.center_mut()[p] += -inv_h2 - dh;
            a2.center_mut()[p + w] += -inv_h2 + dh;
        }
    }
    (a1, a2)
}

/// Full five-point operator `A`, assembled as the entrywise sum of the split
/// parts.
pub fn assemble_full(drift: &DriftField) -> StencilOperator {
    let (a1, a2) = assemble_split(drift);
    a1.sum(&a2).expect("split parts share a grid")
}

/// Largest step for which Peaceman-Rachford keeps the osmosis properties:
/// `2 / max(max |a1_ii|, max |a2_ii|)`. Infinite when both diagonals vanish.
pub fn pr_stability_bound(a1: &StencilOperator, a2: &StencilOperator) -> f64 {
    let m = a1.max_abs_diagonal().max(a2.max_abs_diagonal());
    if m == 0.0 {
        f64::INFINITY
    } else {
        2.0 / m
    }
}

/// The full operator together with its dimension split.
#[derive(Debug, Clone)]
pub struct OsmosisOperators {
    pub full: StencilOperator,
    pub horizontal: StencilOperator,
    pub vertical: StencilOperator,
}

impl OsmosisOperators {
    pub fn from_drift(drift: &DriftField) -> Self {
        let (horizontal, vertical) = assemble_split(drift);
        let full = horizontal.sum(&vertical).expect("split parts share a grid");
        Self {
            full,
            horizontal,
            vertical,
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        self.full.dims()
    }

    pub fn pr_stability_bound(&self) -> f64 {
        pr_stability_bound(&self.horizontal, &self.vertical)
    }
}
