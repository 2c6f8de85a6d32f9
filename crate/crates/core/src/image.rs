//! Scalar fields on a regular pixel grid.
//!
//! Data is stored row-major: pixel `(i, j)` (column `i`, row `j`) lives at
//! index `j * width + i`.

use crate::error::{Error, Result};

/// Read access shared by every raster type in the crate.
pub trait Raster {
    fn width(&self) -> usize;
    fn height(&self) -> usize;
    fn data(&self) -> &[f64];

    fn dims(&self) -> (usize, usize) {
        (self.width(), self.height())
    }

    fn len(&self) -> usize {
        self.width() * self.height()
    }

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn mean(&self) -> f64 {
        mean(self.data())
    }
}

/// An unconstrained real field, e.g. a solver right-hand side or a
/// reflectance map.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Field {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        check_dims(width, height, data.len())?;
        Ok(Self { width, height, data })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![0.0; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for j in 0..height {
            for i in 0..width {
                data.push(f(i, j));
            }
        }
        Self { width, height, data }
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.width + i]
    }

    /// Converts to a [`PositiveImage`], failing if any entry is not strictly
    /// positive.
    pub fn into_positive(self) -> Result<PositiveImage> {
        PositiveImage::new(self.width, self.height, self.data)
    }
}

impl Raster for Field {
    fn width(&self) -> usize {
        self.width
    }
    fn height(&self) -> usize {
        self.height
    }
    fn data(&self) -> &[f64] {
        &self.data
    }
}

/// A strictly positive scalar image: the state, input and reference of the
/// osmosis evolution.
///
/// Every element is finite and at least `floor`, where `floor > 0` is the
/// lift value the image was built with.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveImage {
    width: usize,
    height: usize,
    spacing: f64,
    floor: f64,
    data: Vec<f64>,
}

impl PositiveImage {
    /// Wraps `data`, rejecting any non-finite or non-positive entry.
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        Self::with_floor(width, height, data, f64::MIN_POSITIVE)
    }

    /// Wraps `data`, rejecting entries below `floor`.
    pub fn with_floor(width: usize, height: usize, data: Vec<f64>, floor: f64) -> Result<Self> {
        check_dims(width, height, data.len())?;
        if !(floor.is_finite() && floor > 0.0) {
            return Err(Error::InvalidImage(format!("floor must be positive, got {floor}")));
        }
        if let Some((index, &value)) = data.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= floor)) {
            return Err(Error::NonPositive { index, value, floor });
        }
        Ok(Self {
            width,
            height,
            spacing: 1.0,
            floor,
            data,
        })
    }

    /// Applies the positivity lift `value' = max(value, eps)`.
    ///
    /// Non-finite raw values are still rejected.
    pub fn lift(width: usize, height: usize, mut data: Vec<f64>, eps: f64) -> Result<Self> {
        for v in data.iter_mut() {
            if v.is_finite() {
                *v = v.max(eps);
            }
        }
        Self::with_floor(width, height, data, eps)
    }

    pub fn constant(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        Field::from_fn(width, height, f).into_positive()
    }

    /// Sets the grid spacing `h` (default 1).
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

    pub fn floor(&self) -> f64 {
        self.floor
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.width + i]
    }

    pub fn to_field(&self) -> Field {
        Field {
            width: self.width,
            height: self.height,
            data: self.data.clone(),
        }
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }
}

impl Raster for PositiveImage {
    fn width(&self) -> usize {
        self.width
    }
    fn height(&self) -> usize {
        self.height
    }
    fn data(&self) -> &[f64] {
        &self.data
    }
}

fn check_dims(width: usize, height: usize, len: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidImage(format!("empty grid {width}x{height}")));
    }
    if width.checked_mul(height) != Some(len) {
        return Err(Error::InvalidImage(format!(
            "data length {len} does not match {width}x{height}"
        )));
    }
    Ok(())
}

pub(crate) fn mean(data: &[f64]) -> f64 {
    if data.is_empty() {
        return 0.0;
    }
    data.iter().sum::<f64>() / data.len() as f64
}

pub(crate) fn norm2(data: &[f64]) -> f64 {
    data.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `‖a − b‖₂ / ‖b‖₂`.
pub fn relative_l2(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    diff / norm2(b)
}
