use lma_core::floor::{fit_floor, fit_line, line_loss, pinball, PointCloud};
use lma_core::reference::quantile_line_by_pairs;
use lma_core::Vec3;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TAU: f64 = 0.05;

/// Floor points on `y = slope·z + b` with noise, plus an optional body
/// column standing above it.
fn scene(rng: &mut ChaCha8Rng, n: usize, slope: f64, noise: f64, body: bool) -> Vec<Vec3> {
    let b = rng.random_range(-0.5..0.5);
    (0..n)
        .map(|i| {
            let z = rng.random_range(0.5..6.0);
            let x = rng.random_range(-2.0..2.0);
            if body && i % 3 == 0 {
                [
                    x * 0.1,
                    b + slope * 3.0 + rng.random_range(0.0..1.8),
                    3.0 + rng.random_range(-0.2..0.2),
                ]
            } else {
                [x, b + slope * z + rng.random_range(-noise..=noise), z]
            }
        })
        .collect()
}

#[test]
fn loss_matches_pair_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for case in 0..50 {
        let n = rng.random_range(10..=200);
        let slope = rng.random_range(-0.3..0.3);
        let pts = scene(&mut rng, n, slope, 0.02, case % 2 == 0);
        let cloud = PointCloud::new(pts.clone()).unwrap();
        let plane = fit_floor(&cloud, TAU, 1, 2).unwrap();
        let samples: Vec<(f64, f64)> = pts.iter().map(|p| (p[2], p[1])).collect();
        let (_, _, best) = quantile_line_by_pairs(&samples, TAU).unwrap();
        assert!(
            (plane.pinball_loss - best).abs() <= 1e-6,
            "case {case} (n={n}): {} vs {best}",
            plane.pinball_loss
        );
        let recomputed = line_loss(&samples, plane.slope, plane.intercept, TAU);
        assert!((recomputed - plane.pinball_loss).abs() <= 1e-9);
    }
}

#[test]
fn noiseless_tilted_floor_slope() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for slope in [-0.2, -0.05, 0.0, 0.03, 0.15] {
        for body in [false, true] {
            let pts = scene(&mut rng, 150, slope, 0.0, body);
            let plane = fit_floor(&PointCloud::new(pts).unwrap(), TAU, 1, 2).unwrap();
            assert!(
                (plane.slope - slope).abs() <= 1e-3,
                "slope {slope}: got {}",
                plane.slope
            );
        }
    }
}

#[test]
fn median_line_of_symmetric_cloud() {
    // three collinear groups; the median line is y = x
    let mut samples = Vec::new();
    for x in 0..30 {
        let x = x as f64;
        samples.push((x, x));
        samples.push((x, x + 1.0));
        samples.push((x, x - 1.0));
    }
    let (m, b, _) = fit_line(&samples, 0.5).unwrap();
    assert!((m - 1.0).abs() < 1e-12 && b.abs() < 1e-9, "{m} {b}");
}

#[test]
fn pinball_is_asymmetric() {
    assert_eq!(pinball(2.0, 0.25), 0.5);
    assert_eq!(pinball(-2.0, 0.25), 1.5);
    assert_eq!(pinball(0.0, 0.25), 0.0);
}

proptest! {
    #[test]
    fn no_line_through_two_samples_does_better(
        raw in prop::collection::vec((-3.0f64..3.0, -1.0f64..1.0), 10..40),
        tau in 0.02f64..0.98,
    ) {
        let samples: Vec<(f64, f64)> = raw.iter().map(|&(x, y)| ((x * 100.0).round() / 100.0, y)).collect();
        prop_assume!(samples.iter().any(|s| s.0 != samples[0].0));
        let (_, _, loss) = fit_line(&samples, tau).unwrap();
        let (_, _, best) = quantile_line_by_pairs(&samples, tau).unwrap();
        prop_assert!((loss - best).abs() <= 1e-9 * (1.0 + best), "{} vs {}", loss, best);
    }
}
