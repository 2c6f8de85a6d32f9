//! The time-stepping driver and its diagnostics.

use std::time::Instant;

use log::debug;

use crate::discretize::OsmosisOperators;
use crate::drift::DriftField;
use crate::error::{Error, Result};
use crate::image::{mean, norm2, relative_l2, Field, PositiveImage, Raster};
use crate::schemes::{registry, SchemeRegistry, SolveCounters};

/// Default relative-change tolerance for unattended runs.
pub const DEFAULT_STOP_TOL: f64 = 1e-8;

/// When to stop iterating.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopRule {
    /// Run until the simulated time reaches `T`.
    FinalTime(f64),
    /// Run a fixed number of steps.
    MaxIters(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeConfig {
    /// Registry name of the scheme (`explicit`, `implicit`, `pr`, `aos`,
    /// `mos`, `amos`).
    pub scheme: String,
    pub tau: f64,
    pub stop: StopRule,
    /// Stop early once `‖u^{k+1} − u^k‖ / ‖u^k‖` drops below this.
    pub stop_tol: Option<f64>,
    /// Known steady state; enables the `err` column of the trace.
    pub reference_steady_state: Option<Vec<f64>>,
}

impl SchemeConfig {
    pub fn new(scheme: impl Into<String>, tau: f64, final_time: f64) -> Self {
        Self {
            scheme: scheme.into(),
            tau,
            stop: StopRule::FinalTime(final_time),
            stop_tol: None,
            reference_steady_state: None,
        }
    }

    pub fn with_max_iters(scheme: impl Into<String>, tau: f64, iters: usize) -> Self {
        Self {
            stop: StopRule::MaxIters(iters),
            ..Self::new(scheme, tau, 0.0)
        }
    }

    pub fn stop_tol(mut self, tol: f64) -> Self {
        self.stop_tol = Some(tol);
        self
    }

    pub fn reference(mut self, steady_state: Vec<f64>) -> Self {
        self.reference_steady_state = Some(steady_state);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(Error::InvalidConfig(format!("tau must be positive, got {}", self.tau)));
        }
        if let StopRule::FinalTime(t) = self.stop {
            if !(t.is_finite() && t >= 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "final time must be non-negative, got {t}"
                )));
            }
        }
        if let Some(tol) = self.stop_tol {
            if !(tol.is_finite() && tol > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "stop tolerance must be positive, got {tol}"
                )));
            }
        }
        Ok(())
    }

    /// Number of steps the stop rule allows (before any tolerance stop).
    pub fn steps(&self) -> usize {
        match self.stop {
            StopRule::MaxIters(n) => n,
            StopRule::FinalTime(t) => steps_to_reach(t, self.tau),
        }
    }
}

/// Smallest `k` with `k tau >= t`, ignoring rounding in `t / tau`.
pub fn steps_to_reach(t: f64, tau: f64) -> usize {
    let ratio = t / tau;
    let nearest = ratio.round();
    if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest as usize
    } else {
        ratio.ceil() as usize
    }
}

/// State statistics after one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iter: usize,
    pub t: f64,
    /// Milliseconds since the evolution started, factorization included.
    pub wall_ms: f64,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub rel_change: f64,
    pub err: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DiagnosticsTrace {
    pub rows: Vec<TraceRow>,
    /// Milliseconds spent preparing the scheme (factorizations).
    pub setup_ms: f64,
    pub counters: SolveCounters,
}

impl DiagnosticsTrace {
    pub fn last(&self) -> Option<&TraceRow> {
        self.rows.last()
    }

    pub fn iterations(&self) -> usize {
        self.rows.len()
    }
}

/// Evolves `f` under the osmosis operator of `drift` with the built-in
/// schemes.
pub fn evolve(f: &PositiveImage, drift: &DriftField, cfg: &SchemeConfig) -> Result<(Field, DiagnosticsTrace)> {
    evolve_with(registry(), f, drift, cfg)
}

pub fn evolve_with(
    schemes: &SchemeRegistry,
    f: &PositiveImage,
    drift: &DriftField,
    cfg: &SchemeConfig,
) -> Result<(Field, DiagnosticsTrace)> {
    drift.check_dims(f.width(), f.height())?;
    if drift.spacing() != f.spacing() {
        return Err(Error::InvalidConfig(format!(
            "drift spacing {} differs from image spacing {}",
            drift.spacing(),
            f.spacing()
        )));
    }
    let start = Instant::now();
    let ops = OsmosisOperators::from_drift(drift);
    evolve_operators(schemes, f, &ops, cfg, start)
}

/// Evolves with pre-assembled operators; `start` marks time zero of the
/// wall-clock column.
pub fn evolve_operators(
    schemes: &SchemeRegistry,
    f: &PositiveImage,
    ops: &OsmosisOperators,
    cfg: &SchemeConfig,
    start: Instant,
) -> Result<(Field, DiagnosticsTrace)> {
    cfg.validate()?;
    if ops.dims() != f.dims() {
        return Err(Error::shape(f.dims(), ops.dims()));
    }
    if let Some(reference) = &cfg.reference_steady_state {
        if reference.len() != f.len() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} reference values", f.len()),
                found: reference.len().to_string(),
            });
        }
    }
    let mut stepper = schemes.get(&cfg.scheme)?.prepare(ops, cfg.tau)?;
    let mut trace = DiagnosticsTrace {
        setup_ms: ms_since(start),
        ..Default::default()
    };

    let mut u = f.data().to_vec();
    let mut next = vec![0.0; u.len()];
    let steps = cfg.steps();
    for k in 1..=steps {
        stepper.step(&u, &mut next)?;
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { iter: k });
        }
        let change = next.iter().zip(&u).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let rel_change = change / norm2(&u);
        std::mem::swap(&mut u, &mut next);

        let (min, max) = u.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(*v), hi.max(*v))
        });
        let err = cfg.reference_steady_state.as_deref().map(|w| relative_l2(&u, w));
        trace.rows.push(TraceRow {
            iter: k,
            t: k as f64 * cfg.tau,
            wall_ms: ms_since(start),
            mean: mean(&u),
            min,
            max,
            rel_change,
            err,
        });
        if cfg.stop_tol.is_some_and(|tol| rel_change < tol) {
            debug!(
                "{}: relative change {rel_change:.3e} below tolerance after {k} steps",
                cfg.scheme
            );
            break;
        }
    }
    trace.counters = stepper.counters();
    Ok((Field::new(f.width(), f.height(), u)?, trace))
}

/// The analytic steady state `(mean(f) / mean(v)) v` for drift compatible
/// with `v`.
pub fn analytic_steady_state(f: &PositiveImage, v: &PositiveImage) -> Vec<f64> {
    let scale = f.mean() / v.mean();
    v.data().iter().map(|x| scale * x).collect()
}

fn ms_since(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_counts() {
        assert_eq!(steps_to_reach(1e5, 1e3), 100);
        assert_eq!(steps_to_reach(5000.0, 200.0), 25);
        assert_eq!(steps_to_reach(1.0, 0.3), 4);
        assert_eq!(steps_to_reach(0.3, 0.1), 3);
        assert_eq!(steps_to_reach(0.0, 1.0), 0);
        assert_eq!(SchemeConfig::with_max_iters("aos", 1.0, 7).steps(), 7);
    }

    #[test]
    fn config_validation() {
        assert!(SchemeConfig::new("aos", 0.0, 1.0).validate().is_err());
        assert!(SchemeConfig::new("aos", 1.0, f64::NAN).validate().is_err());
        assert!(SchemeConfig::new("aos", 1.0, 1.0).stop_tol(-1.0).validate().is_err());
        assert!(SchemeConfig::new("aos", 1.0, 1.0).validate().is_ok());
    }

    #[test]
    fn constant_input_without_drift_is_stationary() {
        let f = PositiveImage::constant(6, 5, 2.5).unwrap();
        let d = DriftField::zeros(6, 5);
        for scheme in registry().names() {
            for tau in [0.1, 10.0, 1e4] {
                if scheme == "explicit" && tau > 0.2 {
                    continue;
                }
                let (u, trace) = evolve(&f, &d, &SchemeConfig::with_max_iters(scheme, tau, 3)).unwrap();
                let dev = u.data().iter().fold(0.0f64, |m, v| m.max((v - 2.5).abs()));
                assert!(dev < 1e-13, "{scheme} tau={tau}: {dev:e}");
                assert_eq!(trace.iterations(), 3);
            }
        }
    }

    #[test]
    fn explicit_divergence_is_caught() {
        let f = PositiveImage::from_fn(16, 16, |i, j| 1.0 + ((i + j) % 2) as f64).unwrap();
        let d = DriftField::zeros(16, 16);
        let err = evolve(&f, &d, &SchemeConfig::with_max_iters("explicit", 100.0, 1000)).unwrap_err();
        match err {
            Error::NonFinite { iter } => assert!(iter > 1 && iter < 1000),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn stop_tolerance_ends_early() {
        let v = PositiveImage::from_fn(8, 8, |i, j| 1.0 + 0.1 * (i + 2 * j) as f64).unwrap();
        let f = PositiveImage::constant(8, 8, 1.0).unwrap();
        let d = crate::discretize::drift_from_reference(&v);
        let cfg = SchemeConfig::new("aos", 100.0, 1e6).stop_tol(DEFAULT_STOP_TOL);
        let (_, trace) = evolve(&f, &d, &cfg).unwrap();
        assert!(trace.iterations() < cfg.steps());
        assert!(trace.last().unwrap().rel_change < DEFAULT_STOP_TOL);
    }

    #[test]
    fn trace_is_monotone_and_tracks_error() {
        let v = PositiveImage::from_fn(8, 6, |i, j| 1.0 + 0.2 * i as f64 + 0.1 * j as f64).unwrap();
        let f = PositiveImage::from_fn(8, 6, |i, j| 2.0 + ((i * j) % 3) as f64).unwrap();
        let d = crate::discretize::drift_from_reference(&v);
        let cfg = SchemeConfig::new("mos", 5.0, 50.0).reference(analytic_steady_state(&f, &v));
        let (_, trace) = evolve(&f, &d, &cfg).unwrap();
        assert_eq!(trace.iterations(), 10);
        for pair in trace.rows.windows(2) {
            assert!(pair[1].iter > pair[0].iter && pair[1].t > pair[0].t);
            assert!(pair[1].wall_ms >= pair[0].wall_ms);
        }
        let errs: Vec<f64> = trace.rows.iter().map(|r| r.err.unwrap()).collect();
        assert!(errs.last().unwrap() < &errs[0]);
        assert_eq!(trace.counters.passes, 20);
    }

    #[test]
    fn shape_checks() {
        let f = PositiveImage::constant(4, 4, 1.0).unwrap();
        assert!(evolve(&f, &DriftField::zeros(4, 5), &SchemeConfig::new("aos", 1.0, 1.0)).is_err());
        let cfg = SchemeConfig::new("aos", 1.0, 1.0).reference(vec![1.0; 3]);
        assert!(evolve(&f, &DriftField::zeros(4, 4), &cfg).is_err());
        let cfg = SchemeConfig::new("nope", 1.0, 1.0);
        assert!(matches!(
            evolve(&f, &DriftField::zeros(4, 4), &cfg),
            Err(Error::UnknownScheme { .. })
        ));
    }
}
