//! Five-point stencil operators stored as per-pixel weights.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Which edges an operator carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StencilKind {
    Full,
    Horizontal,
    Vertical,
}

impl StencilKind {
    pub fn name(self) -> &'static str {
        match self {
            StencilKind::Full => "full",
            StencilKind::Horizontal => "horizontal",
            StencilKind::Vertical => "vertical",
        }
    }

    fn has_horizontal(self) -> bool {
        matches!(self, StencilKind::Full | StencilKind::Horizontal)
    }

    fn has_vertical(self) -> bool {
        matches!(self, StencilKind::Full | StencilKind::Vertical)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Neighbor {
    /// `(i - 1, j)`
    West,
    /// `(i + 1, j)`
    East,
    /// `(i, j - 1)`
    North,
    /// `(i, j + 1)`
    South,
}

impl Neighbor {
    pub const ALL: [Neighbor; 4] = [Neighbor::West, Neighbor::East, Neighbor::North, Neighbor::South];

    fn slot(self) -> usize {
        self as usize
    }
}

/// Matrix `A` of a linear drift-diffusion operator on a `width x height`
/// grid, row `p` holding the weight of each neighbour of pixel `p`.
///
/// Weights toward neighbours outside the grid are exactly zero. Directions
/// the kind does not carry have no storage and read as zero.
#[derive(Debug, Clone, PartialEq)]
pub struct StencilOperator {
    width: usize,
    height: usize,
    spacing: f64,
    kind: StencilKind,
    center: Vec<f64>,
    neighbors: [Vec<f64>; 4],
}

impl StencilOperator {
    pub(crate) fn zeros(width: usize, height: usize, spacing: f64, kind: StencilKind) -> Self {
        let n = width * height;
        let alloc = |on: bool| if on { vec![0.0; n] } else { Vec::new() };
        let (h, v) = (kind.has_horizontal(), kind.has_vertical());
        Self {
            width,
            height,
            spacing,
            kind,
            center: vec![0.0; n],
            neighbors: [alloc(h), alloc(h), alloc(v), alloc(v)],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn kind(&self) -> StencilKind {
        self.kind
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub(crate) fn center_mut(&mut self) -> &mut [f64] {
        &mut self.center
    }

    /// Weight of neighbour `dir` in row `p`.
    pub fn weight(&self, dir: Neighbor, p: usize) -> f64 {
        self.neighbors[dir.slot()].get(p).copied().unwrap_or(0.0)
    }

    pub(crate) fn neighbor_mut(&mut self, dir: Neighbor) -> &mut [f64] {
        &mut self.neighbors[dir.slot()]
    }

    pub(crate) fn neighbor(&self, dir: Neighbor) -> &[f64] {
        &self.neighbors[dir.slot()]
    }

    /// Index of the neighbour of `p` in direction `dir`, if it exists.
    pub fn neighbor_index(&self, p: usize, dir: Neighbor) -> Option<usize> {
        let (i, j) = (p % self.width, p / self.width);
        match dir {
            Neighbor::West => (i > 0).then(|| p - 1),
            Neighbor::East => (i + 1 < self.width).then(|| p + 1),
            Neighbor::North => (j > 0).then(|| p - self.width),
            Neighbor::South => (j + 1 < self.height).then(|| p + self.width),
        }
    }

    /// Entrywise sum of two operators on the same grid.
    pub fn sum(&self, other: &StencilOperator) -> Result<StencilOperator> {
        if self.dims() != other.dims() {
            return Err(Error::shape(self.dims(), other.dims()));
        }
        let kind = match (self.kind, other.kind) {
            (a, b) if a == b => a,
            _ => StencilKind::Full,
        };
        let mut out = StencilOperator::zeros(self.width, self.height, self.spacing, kind);
        for (c, (a, b)) in out.center.iter_mut().zip(self.center.iter().zip(&other.center)) {
            *c = a + b;
        }
        for dir in Neighbor::ALL {
            let slot = &mut out.neighbors[dir.slot()];
            for (p, w) in slot.iter_mut().enumerate() {
                *w = self.weight(dir, p) + other.weight(dir, p);
            }
        }
        Ok(out)
    }

    pub fn max_abs_diagonal(&self) -> f64 {
        self.center.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Smallest off-diagonal weight over all rows (0 for an empty stencil).
    pub fn min_off_diagonal(&self) -> f64 {
        self.neighbors.iter().flatten().fold(0.0, |m, w| m.min(*w))
    }

    /// `out = A u`.
    pub fn apply(&self, u: &[f64], out: &mut [f64]) -> Result<()> {
        self.apply_impl(u, out, None)
    }

    /// `out = u + scale * A u`.
    pub fn apply_shifted(&self, u: &[f64], scale: f64, out: &mut [f64]) -> Result<()> {
        self.apply_impl(u, out, Some(scale))
    }

    fn apply_impl(&self, u: &[f64], out: &mut [f64], shift: Option<f64>) -> Result<()> {
        let n = self.len();
        if u.len() != n || out.len() != n {
            return Err(Error::ShapeMismatch {
                expected: format!("{n} values"),
                found: format!("{} in, {} out", u.len(), out.len()),
            });
        }
        let w = self.width;
        let (west, east) = (self.neighbor(Neighbor::West), self.neighbor(Neighbor::East));
        let (north, south) = (self.neighbor(Neighbor::North), self.neighbor(Neighbor::South));
        let has_h = self.kind.has_horizontal();
        let has_v = self.kind.has_vertical();
        let height = self.height;
        out.par_chunks_mut(w).enumerate().for_each(|(j, row)| {
            let base = j * w;
            for (i, o) in row.iter_mut().enumerate() {
                let p = base + i;
                let mut acc = self.center[p] * u[p];
                if has_h {
                    if i > 0 {
                        acc += west[p] * u[p - 1];
                    }
                    if i + 1 < w {
                        acc += east[p] * u[p + 1];
                    }
                }
                if has_v {
                    if j > 0 {
                        acc += north[p] * u[p - w];
                    }
                    if j + 1 < height {
                        acc += south[p] * u[p + w];
                    }
                }
                *o = match shift {
                    Some(s) => u[p] + s * acc,
                    None => acc,
                };
            }
        });
        Ok(())
    }

    /// Column sums of the matrix, computed from the stencil layout.
    pub fn column_sums(&self) -> Vec<f64> {
        let mut sums = self.center.clone();
        for p in 0..self.len() {
            for dir in Neighbor::ALL {
                if let Some(q) = self.neighbor_index(p, dir) {
                    sums[q] += self.weight(dir, p);
                }
            }
        }
        sums
    }
}
