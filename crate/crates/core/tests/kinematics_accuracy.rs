use std::f64::consts::PI;

use lma_core::kinematics::{derivative, windows, WindowConfig};
use lma_core::Vec3;
use proptest::prelude::*;

const DT: f64 = 1.0 / 60.0;

fn track(n: usize, f: impl Fn(f64) -> Vec3) -> Vec<Vec3> {
    (0..n).map(|t| f(t as f64 * DT)).collect()
}

#[test]
fn linear_velocity_is_exact() {
    for n in [2, 3, 4, 5, 6, 120] {
        let x = track(n, |t| [0.1 * t, -0.3 * t + 2.0, 5.0]);
        for v in derivative(&x, 1, DT).unwrap().values {
            assert!(
                (v[0] - 0.1).abs() <= 1e-9 && (v[1] + 0.3).abs() <= 1e-9 && v[2].abs() <= 1e-9,
                "n={n}: {v:?}"
            );
        }
    }
}

#[test]
fn quadratic_acceleration() {
    let x = track(200, |t| [0.5 * 2.0 * t * t, 0.0, -1.5 * t * t + t]);
    let a = derivative(&x, 2, DT).unwrap();
    for v in &a.values {
        assert!(
            (v[0] - 2.0).abs() <= 1e-6 && (v[2] + 3.0).abs() <= 1e-6,
            "{v:?}"
        );
    }
}

#[test]
fn sinusoid_velocity_relative_error() {
    for omega in [0.5, PI, 2.0 * PI, 4.0 * PI] {
        let x = track(600, |t| [(omega * t).sin(), 0.0, 0.0]);
        let v = derivative(&x, 1, DT).unwrap();
        let worst = v
            .values
            .iter()
            .enumerate()
            .map(|(t, p)| (p[0] - omega * (omega * t as f64 * DT).cos()).abs() / omega)
            .fold(0.0, f64::max);
        assert!(worst <= 5e-3, "omega {omega}: relative error {worst}");
    }
}

#[test]
fn sinusoid_acceleration_interior() {
    let omega = 4.0 * PI;
    let x = track(600, |t| [(omega * t).sin(), 0.0, 0.0]);
    let a = derivative(&x, 2, DT).unwrap();
    for t in 4..596 {
        let want = -omega * omega * (omega * t as f64 * DT).sin();
        assert!((a.values[t][0] - want).abs() / (omega * omega) <= 5e-3);
    }
}

#[test]
fn too_short_tracks_are_rejected() {
    let x = vec![[0.0; 3]; 3];
    assert!(derivative(&x, 3, DT).is_err());
    assert!(derivative(&x[..1], 1, DT).is_err());
    assert!(derivative(&x, 0, DT).is_err());
}

#[test]
fn window_count_arithmetic() {
    assert_eq!(
        windows(120, WindowConfig::new(55, 1).unwrap())
            .unwrap()
            .len(),
        66
    );
    assert_eq!(
        windows(1200, WindowConfig::new(55, 5).unwrap())
            .unwrap()
            .len(),
        230
    );
    assert!(windows(10, WindowConfig::new(55, 1).unwrap()).is_err());
}

fn coords(n: usize) -> impl Strategy<Value = Vec<Vec3>> {
    prop::collection::vec([-2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0], n)
}

proptest! {
    #[test]
    fn derivative_is_linear(x in coords(12), y in coords(12), a in -3.0f64..3.0, b in -3.0f64..3.0, order in 1u8..=3) {
        let mixed: Vec<Vec3> = x.iter().zip(&y).map(|(p, q)| [0, 1, 2].map(|k| a * p[k] + b * q[k])).collect();
        let dx = derivative(&x, order, DT).unwrap().values;
        let dy = derivative(&y, order, DT).unwrap().values;
        let dm = derivative(&mixed, order, DT).unwrap().values;
        for t in 0..12 {
            for k in 0..3 {
                let want = a * dx[t][k] + b * dy[t][k];
                prop_assert!((dm[t][k] - want).abs() <= 1e-9 * (1.0 + want.abs()));
            }
        }
    }

    #[test]
    fn windows_tile_in_bounds(frames in 2usize..400, w in 2usize..80, stride in 1usize..20) {
        prop_assume!(w <= frames);
        let ws = windows(frames, WindowConfig::new(w, stride).unwrap()).unwrap();
        prop_assert_eq!(ws.len(), (frames - w) / stride + 1);
        for (i, r) in ws.iter().enumerate() {
            prop_assert_eq!(r.start, i * stride);
            prop_assert_eq!(r.len(), w);
            prop_assert!(r.end <= frames);
        }
    }
}
