//! Fields living on the interior half-edges of the pixel grid.
//!
//! Horizontal edges `(i + 1/2, j)` connect pixel `(i, j)` to `(i + 1, j)` and
//! are stored row-major in a `(width - 1) x height` array. Vertical edges
//! `(i, j + 1/2)` connect `(i, j)` to `(i, j + 1)` and are stored in a
//! `width x (height - 1)` array. Boundary half-edges are never stored; they
//! act as zero drift and zero diffusive flux.

use crate::error::{Error, Result};

/// Sampled drift vector field `d = (d1, d2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftField {
    width: usize,
    height: usize,
    spacing: f64,
    d1: Vec<f64>,
    d2: Vec<f64>,
}

impl DriftField {
    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            spacing: 1.0,
            d1: vec![0.0; horizontal_len(width, height)],
            d2: vec![0.0; vertical_len(width, height)],
        }
    }

    pub fn new(width: usize, height: usize, d1: Vec<f64>, d2: Vec<f64>) -> Result<Self> {
        if d1.len() != horizontal_len(width, height) || d2.len() != vertical_len(width, height) {
            return Err(Error::InvalidImage(format!(
                "drift arrays of length {}/{} do not fit a {width}x{height} grid",
                d1.len(),
                d2.len()
            )));
        }
        if d1.iter().chain(&d2).any(|v| !v.is_finite()) {
            return Err(Error::InvalidImage("drift field has non-finite entries".into()));
        }
        Ok(Self {
            width,
            height,
            spacing: 1.0,
            d1,
            d2,
        })
    }

    /// Sets the grid spacing `h` the drift samples refer to (default 1).
    pub fn with_spacing(mut self, spacing: f64) -> Result<Self> {
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::InvalidImage(format!(
                "grid spacing must be positive, got {spacing}"
            )));
        }
        self.spacing = spacing;
        Ok(self)
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    /// Drift across the edge between `(i, j)` and `(i + 1, j)`.
    pub fn horizontal(&self, i: usize, j: usize) -> f64 {
        self.d1[j * (self.width - 1) + i]
    }

    /// Drift across the edge between `(i, j)` and `(i, j + 1)`.
    pub fn vertical(&self, i: usize, j: usize) -> f64 {
        self.d2[j * self.width + i]
    }

    pub fn d1(&self) -> &[f64] {
        &self.d1
    }

    pub fn d2(&self) -> &[f64] {
        &self.d2
    }

    /// Largest absolute drift sample.
    pub fn max_abs(&self) -> f64 {
        self.d1.iter().chain(&self.d2).fold(0.0, |m, v| m.max(v.abs()))
    }

    pub(crate) fn parts_mut(&mut self) -> (&mut [f64], &mut [f64]) {
        (&mut self.d1, &mut self.d2)
    }

    pub(crate) fn check_dims(&self, width: usize, height: usize) -> Result<()> {
        if self.dims() != (width, height) {
            return Err(Error::shape((width, height), self.dims()));
        }
        Ok(())
    }
}

/// Marks half-edges across which the drift is forced to zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeMask {
    width: usize,
    height: usize,
    horizontal: Vec<bool>,
    vertical: Vec<bool>,
}

impl EdgeMask {
    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            horizontal: vec![false; horizontal_len(width, height)],
            vertical: vec![false; vertical_len(width, height)],
        }
    }

    pub fn full(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            horizontal: vec![true; horizontal_len(width, height)],
            vertical: vec![true; vertical_len(width, height)],
        }
    }

    /// Masks every edge whose two pixels `label` assigns to different
    /// classes.
    pub fn from_labels<T: PartialEq>(width: usize, height: usize, label: &[T]) -> Result<Self> {
        if label.len() != width * height {
            return Err(Error::InvalidImage(format!(
                "label map of length {} does not fit {width}x{height}",
                label.len()
            )));
        }
        let mut mask = Self::empty(width, height);
        for j in 0..height {
            for i in 0..width.saturating_sub(1) {
                let p = j * width + i;
                mask.horizontal[j * (width - 1) + i] = label[p] != label[p + 1];
            }
        }
        for j in 0..height.saturating_sub(1) {
            for i in 0..width {
                let p = j * width + i;
                mask.vertical[j * width + i] = label[p] != label[p + width];
            }
        }
        Ok(mask)
    }

    /// Perimeter edges of a pixel region: edges with exactly one endpoint
    /// inside the region.
    pub fn perimeter(width: usize, height: usize, region: &[bool]) -> Result<Self> {
        Self::from_labels(width, height, region)
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn set_horizontal(&mut self, i: usize, j: usize, masked: bool) {
        self.horizontal[j * (self.width - 1) + i] = masked;
    }

    pub fn set_vertical(&mut self, i: usize, j: usize, masked: bool) {
        self.vertical[j * self.width + i] = masked;
    }

    pub fn horizontal(&self, i: usize, j: usize) -> bool {
        self.horizontal[j * (self.width - 1) + i]
    }

    pub fn vertical(&self, i: usize, j: usize) -> bool {
        self.vertical[j * self.width + i]
    }

    pub fn horizontal_edges(&self) -> &[bool] {
        &self.horizontal
    }

    pub fn vertical_edges(&self) -> &[bool] {
        &self.vertical
    }

    pub fn count(&self) -> usize {
        self.horizontal.iter().chain(&self.vertical).filter(|m| **m).count()
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }
}

fn horizontal_len(width: usize, height: usize) -> usize {
    width.saturating_sub(1) * height
}

fn vertical_len(width: usize, height: usize) -> usize {
    width * height.saturating_sub(1)
}
