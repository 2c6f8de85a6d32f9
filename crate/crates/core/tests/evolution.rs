mod common;

use common::*;
use osmofilt::*;

const SPLIT: [&str; 5] = ["implicit", "pr", "aos", "mos", "amos"];

#[test]
fn constant_image_without_drift_is_stationary() {
    let f = PositiveImage::constant(12, 9, 2.5).unwrap();
    let d = DriftField::zeros(12, 9);
    for scheme in ["explicit", "implicit", "pr", "aos", "mos", "amos"] {
        for tau in [0.1, 0.9, 1e3, 1e5] {
            // Above their stability bound (1 here) the explicit half-steps
            // amplify solve roundoff by about tau per step.
            if scheme == "pr" && tau > 1.0 {
                continue;
            }
            let (u, _) = evolve(&f, &d, &SchemeConfig::with_max_iters(scheme, tau, 3)).unwrap();
            let dev = max_rel_diff(u.data(), f.data());
            assert!(dev <= 1e-12, "{scheme} tau={tau}: {dev:e}");
        }
    }
}

#[test]
fn aos_reaches_rescaled_reference() {
    let mut rng = rng(41);
    let v = random_image(&mut rng, 32, 32, 0.5, 2.0);
    let f = random_image(&mut rng, 32, 32, 0.1, 10.0);
    let w = analytic_steady_state(&f, &v);
    let cfg = SchemeConfig::new("aos", 1e3, 1e5).reference(w.clone());
    let (u, trace) = evolve(&f, &drift_from_reference(&v), &cfg).unwrap();
    assert!(relative_l2(u.data(), &w) < 1e-6);
    assert_eq!(trace.iterations(), 100);
    assert!(trace.last().unwrap().err.unwrap() < 1e-6);
}

#[test]
fn mean_is_conserved_over_runs() {
    let mut rng = rng(42);
    let f = random_image(&mut rng, 40, 24, 0.1, 10.0);
    let d = random_drift(&mut rng, 40, 24, 1.9);
    let bound = OsmosisOperators::from_drift(&d).pr_stability_bound();
    for scheme in SPLIT {
        let taus: Vec<f64> = if scheme == "pr" {
            vec![0.5 * bound]
        } else {
            vec![1.0, 1e3, 1e5]
        };
        for tau in taus {
            let (_, trace) = evolve(&f, &d, &SchemeConfig::with_max_iters(scheme, tau, 20)).unwrap();
            for row in &trace.rows {
                assert!(
                    (row.mean - f.mean()).abs() <= 1e-10 * f.mean(),
                    "{scheme} tau={tau} iter {}",
                    row.iter
                );
            }
        }
    }
}

#[test]
fn trace_is_monotone_in_iteration_and_time() {
    let mut rng = rng(43);
    let f = random_image(&mut rng, 10, 10, 0.5, 2.0);
    let d = random_drift(&mut rng, 10, 10, 1.0);
    let (_, trace) = evolve(&f, &d, &SchemeConfig::new("mos", 0.7, 7.0)).unwrap();
    assert_eq!(trace.iterations(), 10);
    for (k, row) in trace.rows.iter().enumerate() {
        assert_eq!(row.iter, k + 1);
        assert!((row.t - (k + 1) as f64 * 0.7).abs() < 1e-12);
        assert!(row.err.is_none());
        assert!(row.min <= row.mean && row.mean <= row.max);
    }
    assert!(trace.rows.windows(2).all(|w| w[1].wall_ms >= w[0].wall_ms));
    assert_eq!(trace.counters.passes, 20);
}

#[test]
fn explicit_divergence_is_reported_with_iteration() {
    let mut rng = rng(44);
    let f = random_image(&mut rng, 16, 16, 0.5, 2.0);
    let d = random_drift(&mut rng, 16, 16, 1.0);
    match evolve(&f, &d, &SchemeConfig::with_max_iters("explicit", 50.0, 10_000)) {
        Err(Error::NonFinite { iter }) => assert!(iter > 1 && iter < 10_000),
        other => panic!("expected divergence, got {:?}", other.map(|(_, t)| t.iterations())),
    }
}

#[test]
fn relative_change_tolerance_stops_early() {
    let mut rng = rng(45);
    let v = random_image(&mut rng, 16, 16, 0.5, 2.0);
    let f = random_image(&mut rng, 16, 16, 0.5, 2.0);
    let cfg = SchemeConfig::new("aos", 100.0, 1e7).stop_tol(1e-8);
    let (_, trace) = evolve(&f, &drift_from_reference(&v), &cfg).unwrap();
    assert!(trace.iterations() < 100_000);
    assert!(trace.last().unwrap().rel_change < 1e-8);
}

#[test]
fn invalid_configurations_are_rejected() {
    let f = PositiveImage::constant(4, 4, 1.0).unwrap();
    let d = DriftField::zeros(4, 4);
    assert!(matches!(
        evolve(&f, &d, &SchemeConfig::new("aos", 0.0, 1.0)),
        Err(Error::InvalidConfig(_))
    ));
    assert!(matches!(
        evolve(&f, &d, &SchemeConfig::new("nope", 1.0, 1.0)),
        Err(Error::UnknownScheme { .. })
    ));
    assert!(evolve(&f, &DriftField::zeros(4, 5), &SchemeConfig::new("aos", 1.0, 1.0)).is_err());
    let cfg = SchemeConfig::new("aos", 1.0, 1.0).reference(vec![1.0; 3]);
    assert!(evolve(&f, &d, &cfg).is_err());
}
