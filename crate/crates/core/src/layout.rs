//! Rectangular frame layouts of a mosaic canvas.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One axis-aligned frame in mosaic pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frame {
    pub id: u32,
    pub x0: usize,
    pub y0: usize,
    pub width: usize,
    pub height: usize,
}

/// Frames partitioning a mosaic. Serialized as a bare JSON array of frames.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FrameLayout {
    pub frames: Vec<Frame>,
}

impl FrameLayout {
    pub fn new(frames: Vec<Frame>) -> Self {
        Self { frames }
    }

    pub fn single(width: usize, height: usize) -> Self {
        Self::new(vec![Frame {
            id: 0,
            x0: 0,
            y0: 0,
            width,
            height,
        }])
    }

    /// Regular `cols x rows` grid of frames covering `width x height`.
    /// The last column and row absorb the remainder.
    pub fn grid(width: usize, height: usize, cols: usize, rows: usize) -> Self {
        let mut frames = Vec::with_capacity(cols * rows);
        let (fw, fh) = (width / cols, height / rows);
        for r in 0..rows {
            for c in 0..cols {
                let x0 = c * fw;
                let y0 = r * fh;
                let w = if c + 1 == cols { width - x0 } else { fw };
                let h = if r + 1 == rows { height - y0 } else { fh };
                frames.push(Frame {
                    id: (r * cols + c) as u32,
                    x0,
                    y0,
                    width: w,
                    height: h,
                });
            }
        }
        Self::new(frames)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Per-pixel frame ids, row-major. Fails unless the frames partition the
    /// canvas.
    pub fn label_map(&self, width: usize, height: usize) -> Result<Vec<u32>> {
        let mut owner: Vec<Option<u32>> = vec![None; width * height];
        let mut seen = std::collections::HashSet::new();
        for frame in &self.frames {
            if !seen.insert(frame.id) {
                return Err(Error::LayoutDuplicateId(frame.id));
            }
            let fits = frame.width > 0
                && frame.height > 0
                && frame.x0.checked_add(frame.width).is_some_and(|x1| x1 <= width)
                && frame.y0.checked_add(frame.height).is_some_and(|y1| y1 <= height);
            if !fits {
                return Err(Error::LayoutBounds {
                    id: frame.id,
                    width,
                    height,
                });
            }
            for y in frame.y0..frame.y0 + frame.height {
                for x in frame.x0..frame.x0 + frame.width {
                    let slot = &mut owner[y * width + x];
                    if let Some(first) = *slot {
                        return Err(Error::LayoutOverlap {
                            first,
                            second: frame.id,
                            x,
                            y,
                        });
                    }
                    *slot = Some(frame.id);
                }
            }
        }
        owner
            .into_iter()
            .enumerate()
            .map(|(p, o)| {
                o.ok_or(Error::LayoutCoverage {
                    x: p % width,
                    y: p / width,
                })
            })
            .collect()
    }
}

/// Checks that the layout's rectangles partition the `width x height` canvas.
pub fn validate_layout(layout: &FrameLayout, width: usize, height: usize) -> Result<()> {
    layout.label_map(width, height).map(|_| ())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame(id: u32, x0: usize, y0: usize, width: usize, height: usize) -> Frame {
        Frame {
            id,
            x0,
            y0,
            width,
            height,
        }
    }

    #[test]
    fn single_rectangle_is_valid() {
        validate_layout(&FrameLayout::single(7, 5), 7, 5).unwrap();
    }

    #[test]
    fn side_by_side_halves_are_valid() {
        let layout = FrameLayout::new(vec![frame(0, 0, 0, 2, 4), frame(1, 2, 0, 2, 4)]);
        validate_layout(&layout, 4, 4).unwrap();
    }

    #[test]
    fn overlap_names_both_frames() {
        let layout = FrameLayout::new(vec![frame(3, 0, 0, 3, 4), frame(8, 2, 0, 2, 4)]);
        match validate_layout(&layout, 4, 4) {
            Err(Error::LayoutOverlap {
                first: 3,
                second: 8,
                x: 2,
                ..
            }) => {}
            other => panic!("expected overlap, got {other:?}"),
        }
    }

    #[test]
    fn gap_is_a_coverage_error() {
        let layout = FrameLayout::new(vec![frame(0, 0, 0, 2, 4), frame(1, 3, 0, 1, 4)]);
        assert!(matches!(
            validate_layout(&layout, 4, 4),
            Err(Error::LayoutCoverage { x: 2, y: 0 })
        ));
    }

    #[test]
    fn out_of_bounds_and_duplicates() {
        let layout = FrameLayout::new(vec![frame(0, 0, 0, 5, 4)]);
        assert!(matches!(
            validate_layout(&layout, 4, 4),
            Err(Error::LayoutBounds { .. })
        ));
        let layout = FrameLayout::new(vec![frame(0, 0, 0, 2, 4), frame(0, 2, 0, 2, 4)]);
        assert!(matches!(
            validate_layout(&layout, 4, 4),
            Err(Error::LayoutDuplicateId(0))
        ));
    }

    #[test]
    fn grid_layout_partitions() {
        validate_layout(&FrameLayout::grid(101, 37, 4, 3), 101, 37).unwrap();
    }

    #[test]
    fn json_schema() {
        let text = r#"[{"id": 1, "x0": 0, "y0": 0, "width": 2, "height": 4},
                       {"id": 2, "x0": 2, "y0": 0, "width": 2, "height": 4}]"#;
        let layout = FrameLayout::from_json(text).unwrap();
        assert_eq!(layout.frames.len(), 2);
        assert_eq!(layout.frames[1], frame(2, 2, 0, 2, 4));
        let back = FrameLayout::from_json(&layout.to_json().unwrap()).unwrap();
        assert_eq!(back, layout);
    }
}
