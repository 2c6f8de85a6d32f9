//! Efficiency/accuracy sweep over schemes and step sizes.
//!
//! For an image `f` and a reference `v`, every `(scheme, tau)` pair is run
//! with drift compatible with `v` up to a final time `T`. The energy error is
//! `‖u − w‖₂ / ‖w‖₂` against the analytic steady state
//! `w = (mean(f) / mean(v)) v`.

use std::io::Write;
use std::time::Instant;

use crate::discretize::{drift_from_reference, OsmosisOperators};
use crate::error::{Error, Result};
use crate::evolve::{analytic_steady_state, evolve_operators, SchemeConfig};
use crate::image::{PositiveImage, Raster};
use crate::schemes::{registry, SolveCounters};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub scheme: String,
    pub tau: f64,
    pub steps: usize,
    /// Total wall time, factorization included.
    pub wall_ms: f64,
    pub setup_ms: f64,
    pub energy_error: f64,
    pub counters: SolveCounters,
    /// `ok`, or the failure that stopped the run.
    pub status: String,
}

pub fn run_bench(
    f: &PositiveImage,
    reference: &PositiveImage,
    schemes: &[String],
    taus: &[f64],
    final_time: f64,
) -> Result<Vec<BenchRow>> {
    if reference.dims() != f.dims() {
        return Err(Error::shape(f.dims(), reference.dims()));
    }
    let steady = analytic_steady_state(f, reference);
    let drift = drift_from_reference(reference);
    let ops = OsmosisOperators::from_drift(&drift);
    let mut rows = Vec::new();
    for scheme in schemes {
        let name = registry().get(scheme)?.name();
        for &tau in taus {
            let cfg = SchemeConfig::new(name, tau, final_time).reference(steady.clone());
            let start = Instant::now();
            let row = match evolve_operators(registry(), f, &ops, &cfg, start) {
                Ok((_, trace)) => BenchRow {
                    scheme: name.to_string(),
                    tau,
                    steps: trace.iterations(),
                    wall_ms: start.elapsed().as_secs_f64() * 1e3,
                    setup_ms: trace.setup_ms,
                    energy_error: trace
                        .last()
                        .and_then(|r| r.err)
                        .unwrap_or_else(|| crate::image::relative_l2(f.data(), &steady)),
                    counters: trace.counters,
                    status: "ok".into(),
                },
                Err(e @ (Error::NonFinite { .. } | Error::ZeroPivot { .. } | Error::InvalidConfig(_))) => BenchRow {
                    scheme: name.to_string(),
                    tau,
                    steps: 0,
                    wall_ms: start.elapsed().as_secs_f64() * 1e3,
                    setup_ms: 0.0,
                    energy_error: f64::NAN,
                    counters: SolveCounters::default(),
                    status: e.to_string(),
                },
                Err(e) => return Err(e),
            };
            log::info!(
                "{:>8} tau={:<8} steps={:<6} {:>10.1} ms  err={:.3e}",
                row.scheme,
                row.tau,
                row.steps,
                row.wall_ms,
                row.energy_error
            );
            rows.push(row);
        }
    }
    Ok(rows)
}

pub const BENCH_HEADER: [&str; 10] = [
    "scheme",
    "tau",
    "steps",
    "wall_ms",
    "setup_ms",
    "energy_error",
    "passes",
    "line_solves",
    "banded_solves",
    "status",
];

/// CSV with `#` comment lines documenting the definitions, then the header.
pub fn write_bench_csv(rows: &[BenchRow], final_time: f64, mut out: impl Write) -> Result<()> {
    writeln!(
        out,
        "# energy_error = ||u(T) - w||_2 / ||w||_2, w = (mean(f)/mean(v)) v, drift compatible with v"
    )?;
    writeln!(
        out,
        "# T = {final_time}; wall_ms includes factorization; passes = full-field tridiagonal solves"
    )?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(BENCH_HEADER)?;
    for r in rows {
        w.write_record([
            r.scheme.clone(),
            r.tau.to_string(),
            r.steps.to_string(),
            format!("{:.3}", r.wall_ms),
            format!("{:.3}", r.setup_ms),
            r.energy_error.to_string(),
            r.counters.passes.to_string(),
            r.counters.line_solves.to_string(),
            r.counters.banded_solves.to_string(),
            r.status.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Separable Gaussian blur with mirrored borders.
pub fn gaussian_smooth(img: &PositiveImage, sigma: f64) -> Result<PositiveImage> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidConfig(format!("sigma must be positive, got {sigma}")));
    }
    let radius = (3.0 * sigma).ceil() as isize;
    let kernel: Vec<f64> = (-radius..=radius)
        .map(|k| (-(k * k) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let norm: f64 = kernel.iter().sum();
    let kernel: Vec<f64> = kernel.iter().map(|k| k / norm).collect();
    let (w, h) = img.dims();
    let reflect = |k: isize, n: usize| -> usize {
        let n = n as isize;
        let mut k = k;
        loop {
            if k < 0 {
                k = -k - 1;
            } else if k >= n {
                k = 2 * n - k - 1;
            } else {
                return k as usize;
            }
        }
    };
    let src = img.data();
    let mut tmp = vec![0.0; w * h];
    for j in 0..h {
        for i in 0..w {
            tmp[j * w + i] = kernel
                .iter()
                .enumerate()
                .map(|(k, c)| c * src[j * w + reflect(i as isize + k as isize - radius, w)])
                .sum();
        }
    }
    let mut out = vec![0.0; w * h];
    for j in 0..h {
        for i in 0..w {
            out[j * w + i] = kernel
                .iter()
                .enumerate()
                .map(|(k, c)| c * tmp[reflect(j as isize + k as isize - radius, h) * w + i])
                .sum();
        }
    }
    PositiveImage::new(w, h, out)?.with_spacing(img.spacing())
}

/// Strongly smoothed copy used as the default bench reference:
/// `sigma = max(2, min(width, height) / 16)`.
pub fn default_reference(img: &PositiveImage) -> Result<PositiveImage> {
    let (w, h) = img.dims();
    gaussian_smooth(img, (w.min(h) as f64 / 16.0).max(2.0))
}
