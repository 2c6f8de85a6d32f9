//! End-to-end workflows: reflectance calibration, shadow removal and mosaic
//! light balancing.

use log::warn;

use crate::discretize::{drift_from_reference, zero_drift_on_mask};
use crate::drift::EdgeMask;
use crate::error::{Error, Result};
use crate::evolve::{evolve, DiagnosticsTrace, SchemeConfig};
use crate::image::{Field, PositiveImage, Raster};
use crate::layout::FrameLayout;

/// Reflectance map and the number of pixels whose reflectance exceeds one.
#[derive(Debug, Clone, PartialEq)]
pub struct Reflectance {
    pub field: Field,
    pub above_one: usize,
}

/// Pointwise reflectance `r = u * r_ref / u_ref` against an in-scene
/// calibration target with mean response `u_ref` and certified reflectance
/// `r_ref`.
///
/// Values above one are kept (and counted), not clamped.
pub fn calibrate_reflectance(u_raw: &Field, u_ref: f64, r_ref: f64) -> Result<Reflectance> {
    if !(u_ref.is_finite() && u_ref > 0.0) {
        return Err(Error::Calibration(format!("u_ref = {u_ref}")));
    }
    if !(r_ref.is_finite() && r_ref > 0.0 && r_ref <= 1.0) {
        return Err(Error::Calibration(format!("r_ref = {r_ref} (expected 0 < r_ref <= 1)")));
    }
    if let Some((index, &value)) = u_raw
        .data()
        .iter()
        .enumerate()
        .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
    {
        return Err(Error::NonPositive {
            index,
            value,
            floor: 0.0,
        });
    }
    let data: Vec<f64> = u_raw.data().iter().map(|u| (u / u_ref) * r_ref).collect();
    let above_one = data.iter().filter(|r| **r > 1.0).count();
    if above_one > 0 {
        warn!("{above_one} pixels have reflectance above 1");
    }
    Ok(Reflectance {
        field: Field::new(u_raw.width(), u_raw.height(), data)?,
        above_one,
    })
}

/// Edges whose two pixels belong to different frames.
pub fn seam_mask_from_layout(layout: &FrameLayout, width: usize, height: usize) -> Result<EdgeMask> {
    let labels = layout.label_map(width, height)?;
    EdgeMask::from_labels(width, height, &labels)
}

/// Balances the brightness of a mosaic: drift compatible with `f` everywhere
/// except across frame seams, where it is zero.
pub fn balance_mosaic(
    f: &PositiveImage,
    layout: &FrameLayout,
    cfg: &SchemeConfig,
) -> Result<(Field, DiagnosticsTrace)> {
    let mask = seam_mask_from_layout(layout, f.width(), f.height())?;
    remove_shadow(f, &mask, cfg)
}

/// Removes a multiplicative shadow whose boundary edges are `boundary`.
pub fn remove_shadow(f: &PositiveImage, boundary: &EdgeMask, cfg: &SchemeConfig) -> Result<(Field, DiagnosticsTrace)> {
    let drift = zero_drift_on_mask(&drift_from_reference(f), boundary)?;
    evolve(f, &drift, cfg)
}

/// Converts a region mask image (0 = keep, anything at or above half of
/// `max_value` = region) into the region's perimeter edges.
pub fn region_perimeter(region: &Field, max_value: f64) -> Result<EdgeMask> {
    let inside: Vec<bool> = region.data().iter().map(|v| *v >= 0.5 * max_value).collect();
    EdgeMask::perimeter(region.width(), region.height(), &inside)
}
