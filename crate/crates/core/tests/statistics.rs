use convex_lines::calibration::{exact_calibrate, CalibrationTarget};
use convex_lines::experiments::{gibbs_shape_distances, sample_rng};
use convex_lines::gibbs::{log_partition, moments_on, GibbsParams, ObservableSampler, SiteSet};
use convex_lines::special::residue_log_z;
use std::f64::consts::PI;

const TRUNCATION: f64 = 40.0;

#[test]
fn residue_law_converges_monotonically() {
    let lambda = 0.7;
    let gaps: Vec<f64> = [0.1f64, 0.05, 0.02]
        .iter()
        .map(|&b| {
            let lz = log_partition(&GibbsParams::linear(b, b, lambda)).unwrap();
            (lz / residue_log_z(b, b, lambda).unwrap() - 1.0).abs()
        })
        .collect();
    assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
    assert!(gaps[2] < 0.05);
}

#[test]
fn calibrated_moments_match_targets() {
    for (n1, n2, k) in [(300, 300, 5), (300, 300, 34), (500, 200, 20), (200, 500, 20)] {
        let target = CalibrationTarget::new(n1, n2, k).unwrap();
        let cal = exact_calibrate::<f64>(&target, TRUNCATION).unwrap();
        assert!(!cal.degraded);
        let params = cal.params();
        let m = moments_on(&params, &SiteSet::for_params(&params).unwrap()).unwrap();
        let rel = [
            m.ex1 / n1 as f64 - 1.0,
            m.ex2 / n2 as f64 - 1.0,
            m.ek / k as f64 - 1.0,
        ];
        assert!(rel.iter().all(|r| r.abs() <= 1e-6), "({n1},{n2},{k}): {rel:?}");
        // Every accepted Newton step lowers f and keeps the covariance definite.
        for w in cal.free_energy_trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-12 * w[0].abs(), "{:?}", cal.free_energy_trace);
        }
        assert!(cal.eigenvalue_trace.iter().all(|&e| e > 0.0));
    }
}

#[test]
fn mirrored_targets_swap_betas() {
    let a = exact_calibrate::<f64>(&CalibrationTarget::new(500, 200, 20).unwrap(), TRUNCATION).unwrap();
    let b = exact_calibrate::<f64>(&CalibrationTarget::new(200, 500, 20).unwrap(), TRUNCATION).unwrap();
    assert_eq!((a.beta1, a.beta2, a.lambda), (b.beta2, b.beta1, b.lambda));
}

#[test]
fn fugacity_increases_with_vertex_target() {
    let lambdas: Vec<f64> = [5, 10, 20, 34, 50]
        .iter()
        .map(|&k| {
            exact_calibrate::<f64>(&CalibrationTarget::new(300, 300, k).unwrap(), TRUNCATION)
                .unwrap()
                .lambda
        })
        .collect();
    assert!(lambdas.windows(2).all(|w| w[0] < w[1]), "{lambdas:?}");
}

// Rare-event frequency of hitting (n, n) with exactly k edges.
#[test]
fn local_limit_frequency() {
    let (n, k) = (300u64, 34u64);
    let cal = exact_calibrate::<f64>(&CalibrationTarget::new(n, n, k).unwrap(), TRUNCATION).unwrap();
    let params = cal.params();
    let sampler = ObservableSampler::new(&params, &SiteSet::for_params(&params).unwrap()).unwrap();
    let draws = 10_000_000u64;
    let chunks = 8u64;
    let hits: u64 = std::thread::scope(|s| {
        let handles: Vec<_> = (0..chunks)
            .map(|c| {
                let sampler = &sampler;
                s.spawn(move || {
                    let mut rng = sample_rng(17, c);
                    (0..draws / chunks)
                        .filter(|_| {
                            let o = sampler.sample(&mut rng);
                            o.x1 == n && o.x2 == n && o.k == k
                        })
                        .count() as u64
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).sum()
    });
    let freq = hits as f64 / draws as f64;
    let predicted = (2.0 * PI).powf(-1.5) * (k as f64).sqrt() / (n * n) as f64;
    let ratio = freq / predicted;
    eprintln!("local limit: {hits} hits in {draws}, ratio {ratio:.3}");
    assert!((0.5..=2.0).contains(&ratio), "hits {hits}, ratio {ratio}");
}

#[test]
fn deviation_probability_falls_with_size() {
    let eta = 0.03;
    let tail = |n: u64| {
        let d = gibbs_shape_distances(n, 100, 3, 1000).unwrap();
        d.iter().filter(|&&x| x > eta).count() as f64 / d.len() as f64
    };
    let (small, large) = (tail(1_000), tail(10_000));
    assert!(large < small, "{small} -> {large}");
}
