#![allow(dead_code)]

use osmofilt::solvers::DenseMatrix;
use osmofilt::{DriftField, PositiveImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_image(rng: &mut impl Rng, w: usize, h: usize, lo: f64, hi: f64) -> PositiveImage {
    PositiveImage::new(w, h, (0..w * h).map(|_| rng.gen_range(lo..hi)).collect()).unwrap()
}

/// Uniform drift in `[-max, max]` on every interior edge.
pub fn random_drift(rng: &mut impl Rng, w: usize, h: usize, max: f64) -> DriftField {
    let d1 = (0..w.saturating_sub(1) * h)
        .map(|_| rng.gen_range(-max..=max))
        .collect();
    let d2 = (0..w * h.saturating_sub(1))
        .map(|_| rng.gen_range(-max..=max))
        .collect();
    DriftField::new(w, h, d1, d2).unwrap()
}

/// Dense operator assembled edge by edge from the fluxes, independently of
/// the stencil code. Returns (full, horizontal, vertical).
pub fn dense_from_fluxes(d: &DriftField) -> (DenseMatrix, DenseMatrix, DenseMatrix) {
    let (w, h) = d.dims();
    let s = d.spacing();
    let n = w * h;
    let mut a1 = DenseMatrix::zeros(n);
    let mut a2 = DenseMatrix::zeros(n);
    let add_edge = |m: &mut DenseMatrix, p: usize, q: usize, dv: f64| {
        let diff = 1.0 / (s * s);
        let adv = dv / (2.0 * s);
        m.set(p, q, m.get(p, q) + diff - adv);
        m.set(p, p, m.get(p, p) - diff - adv);
        m.set(q, p, m.get(q, p) + diff + adv);
        m.set(q, q, m.get(q, q) - diff + adv);
    };
    for j in 0..h {
        for i in 0..w.saturating_sub(1) {
            add_edge(&mut a1, j * w + i, j * w + i + 1, d.horizontal(i, j));
        }
    }
    for j in 0..h.saturating_sub(1) {
        for i in 0..w {
            add_edge(&mut a2, j * w + i, (j + 1) * w + i, d.vertical(i, j));
        }
    }
    let full = a1.combine(1.0, &a2, 1.0);
    (full, a1, a2)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

pub fn max_rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    max_abs_diff(a, b) / scale
}

pub fn sum(a: &[f64]) -> f64 {
    a.iter().sum()
}

/// Smooth positive image whose x-profile is mirror-symmetric about the
/// vertical line between columns `w/2 - 1` and `w/2`, so its two pixels
/// across that seam are equal.
pub fn seam_symmetric_truth(w: usize, h: usize) -> PositiveImage {
    use std::f64::consts::PI;
    PositiveImage::from_fn(w, h, |i, j| {
        let x = (i as f64 + 0.5) / w as f64;
        let y = (j as f64 + 0.5) / h as f64;
        1.0 + 0.3 * (2.0 * PI * x).cos() + 0.2 * (4.0 * PI * x).cos() * (2.0 * PI * y).sin() + 0.25 * (PI * y).cos()
    })
    .unwrap()
}

/// Two-frame mosaic: ground truth `g` with the right half scaled by `factor`.
pub fn two_frame_mosaic(w: usize, h: usize, factor: f64) -> (PositiveImage, PositiveImage, osmofilt::FrameLayout) {
    let g = seam_symmetric_truth(w, h);
    let f = PositiveImage::from_fn(w, h, |i, j| g.get(i, j) * if i >= w / 2 { factor } else { 1.0 }).unwrap();
    let layout = osmofilt::FrameLayout::new(vec![
        osmofilt::Frame {
            id: 0,
            x0: 0,
            y0: 0,
            width: w / 2,
            height: h,
        },
        osmofilt::Frame {
            id: 1,
            x0: w / 2,
            y0: 0,
            width: w - w / 2,
            height: h,
        },
    ]);
    (f, g, layout)
}

/// Pixels farther than `band` pixels (Chebyshev distance) from every pixel
/// touching a masked edge.
pub fn outside_band(mask: &osmofilt::EdgeMask, band: usize) -> Vec<bool> {
    let (w, h) = mask.dims();
    let mut touched = vec![false; w * h];
    for j in 0..h {
        for i in 0..w.saturating_sub(1) {
            if mask.horizontal(i, j) {
                touched[j * w + i] = true;
                touched[j * w + i + 1] = true;
            }
        }
    }
    for j in 0..h.saturating_sub(1) {
        for i in 0..w {
            if mask.vertical(i, j) {
                touched[j * w + i] = true;
                touched[(j + 1) * w + i] = true;
            }
        }
    }
    let mut keep = vec![true; w * h];
    for j in 0..h {
        for i in 0..w {
            if !touched[j * w + i] {
                continue;
            }
            for jj in j.saturating_sub(band)..=(j + band).min(h - 1) {
                for ii in i.saturating_sub(band)..=(i + band).min(w - 1) {
                    keep[jj * w + ii] = false;
                }
            }
        }
    }
    keep
}

/// Relative L2 error of `u` against `truth` restricted to `keep`.
pub fn masked_relative_l2(u: &[f64], truth: &[f64], keep: &[bool]) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for ((a, b), k) in u.iter().zip(truth).zip(keep) {
        if *k {
            num += (a - b) * (a - b);
            den += b * b;
        }
    }
    (num / den).sqrt()
}

pub struct Dense {
    pub a: DenseMatrix,
    pub a1: DenseMatrix,
    pub a2: DenseMatrix,
}

impl Dense {
    pub fn new(d: &DriftField) -> Self {
        let (a, a1, a2) = dense_from_fluxes(d);
        Self { a, a1, a2 }
    }
}

pub fn inv_shift(m: &DenseMatrix, s: f64) -> DenseMatrix {
    m.shifted(s).inverse().unwrap()
}

pub fn plus_shift(m: &DenseMatrix, s: f64) -> DenseMatrix {
    m.shifted(-s)
}

/// One step of `scheme` written as a dense matrix product.
pub fn dense_step(scheme: &str, m: &Dense, u: &[f64], tau: f64) -> Vec<f64> {
    let op = match scheme {
        "explicit" => plus_shift(&m.a, tau),
        "implicit" => inv_shift(&m.a, tau),
        "pr" => inv_shift(&m.a1, tau / 2.0)
            .matmul(&plus_shift(&m.a2, tau / 2.0))
            .matmul(&inv_shift(&m.a2, tau / 2.0))
            .matmul(&plus_shift(&m.a1, tau / 2.0)),
        "aos" => inv_shift(&m.a1, 2.0 * tau).combine(0.5, &inv_shift(&m.a2, 2.0 * tau), 0.5),
        "mos" => inv_shift(&m.a1, tau).matmul(&inv_shift(&m.a2, tau)),
        "amos" => {
            let p1 = inv_shift(&m.a1, tau);
            let p2 = inv_shift(&m.a2, tau);
            p2.matmul(&p1).combine(0.5, &p1.matmul(&p2), 0.5)
        }
        _ => unreachable!(),
    };
    op.matvec(u)
}
