//! Finite-difference derivatives and sliding-window iteration.
//!
//! Derivatives keep the track length T. With T ≥ 5 every frame uses a
//! five-point stencil: centered in the interior, skewed at the two frames
//! nearest each boundary. All stencils are fourth-order accurate, so they are
//! exact on polynomials up to degree four. Shorter tracks fall back to
//! three-point (T = 3, 4) and two-point (T = 2) stencils.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::norm;
use crate::motion::Vec3;

#[derive(Clone, Debug, PartialEq)]
pub struct DerivativeTrack {
    /// 1 = velocity (m/s), 2 = acceleration (m/s²), 3 = jerk (m/s³).
    pub order: u8,
    pub values: Vec<Vec3>,
    pub dt: f64,
}

impl DerivativeTrack {
    /// Euclidean norm of each value.
    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|v| norm(*v)).collect()
    }
}

const CENTER5: [f64; 4] = [1.0, -8.0, 8.0, -1.0]; // x[t-2], x[t-1], x[t+1], x[t+2]
const EDGE5: [f64; 5] = [-25.0, 48.0, -36.0, 16.0, -3.0];
const NEAR_EDGE5: [f64; 5] = [-3.0, -10.0, 18.0, -6.0, 1.0];
const EDGE3: [f64; 3] = [-3.0, 4.0, -1.0];

/// Stencil coefficients sum to zero, so values are taken relative to the
/// first sample; constant tracks then differentiate to exactly zero.
fn combine(x: &[Vec3], idx: impl Iterator<Item = usize>, coef: &[f64], scale: f64) -> Vec3 {
    let mut out = [0.0; 3];
    let mut origin = None;
    for (i, c) in idx.zip(coef) {
        let o0 = *origin.get_or_insert(x[i]);
        for ((o, xv), r) in out.iter_mut().zip(x[i]).zip(o0) {
            *o += c * (xv - r);
        }
    }
    out.map(|v| v * scale)
}

/// One application of the first-derivative operator.
fn differentiate(x: &[Vec3], dt: f64) -> Vec<Vec3> {
    let n = x.len();
    let mut out = vec![[0.0; 3]; n];
    match n {
        0 | 1 => {}
        2 => {
            let d = combine(x, [0, 1].into_iter(), &[-1.0, 1.0], 1.0 / dt);
            out[0] = d;
            out[1] = d;
        }
        3 | 4 => {
            let s = 1.0 / (2.0 * dt);
            out[0] = combine(x, 0..3, &EDGE3, s);
            out[n - 1] = combine(x, (n - 3..n).rev(), &EDGE3, -s);
            for (t, o) in out.iter_mut().enumerate().take(n - 1).skip(1) {
                *o = combine(x, [t - 1, t + 1].into_iter(), &[-1.0, 1.0], s);
            }
        }
        _ => {
            let s = 1.0 / (12.0 * dt);
            out[0] = combine(x, 0..5, &EDGE5, s);
            out[1] = combine(x, 0..5, &NEAR_EDGE5, s);
            out[n - 1] = combine(x, (n - 5..n).rev(), &EDGE5, -s);
            out[n - 2] = combine(x, (n - 5..n).rev(), &NEAR_EDGE5, -s);
            for (t, o) in out.iter_mut().enumerate().take(n - 2).skip(2) {
                *o = combine(x, [t - 2, t - 1, t + 1, t + 2].into_iter(), &CENTER5, s);
            }
        }
    }
    out
}

/// Derivative of `order` 1..=3 of a position track sampled every `dt` seconds.
pub fn derivative(track: &[Vec3], order: u8, dt: f64) -> Result<DerivativeTrack> {
    if !(1..=3).contains(&order) {
        return Err(Error::invalid(format!(
            "derivative order must be 1..=3, got {order}"
        )));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::invalid(format!("dt must be > 0, got {dt}")));
    }
    let required = order as usize + 1;
    if track.len() < required {
        return Err(Error::TooShort {
            found: track.len(),
            required,
        });
    }
    let mut values = differentiate(track, dt);
    for _ in 1..order {
        values = differentiate(&values, dt);
    }
    Ok(DerivativeTrack { order, values, dt })
}

/// Sliding-window geometry in frames.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowConfig {
    pub w: usize,
    pub stride: usize,
}

impl Default for WindowConfig {
    fn default() -> Self {
        Self { w: 55, stride: 1 }
    }
}

impl WindowConfig {
    pub fn new(w: usize, stride: usize) -> Result<Self> {
        let cfg = Self { w, stride };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.w < 2 {
            return Err(Error::invalid(format!(
                "window length must be >= 2, got {}",
                self.w
            )));
        }
        if self.stride < 1 {
            return Err(Error::invalid("window stride must be >= 1"));
        }
        Ok(())
    }

    pub fn count(&self, frames: usize) -> usize {
        if frames < self.w {
            0
        } else {
            (frames - self.w) / self.stride + 1
        }
    }
}

/// Half-open frame ranges `[s, s + w)` for `s = 0, stride, ...` with `s + w <= frames`.
pub fn windows(frames: usize, cfg: WindowConfig) -> Result<Vec<Range<usize>>> {
    cfg.validate()?;
    if frames < cfg.w {
        return Err(Error::TooShort {
            found: frames,
            required: cfg.w,
        });
    }
    Ok((0..cfg.count(frames))
        .map(|i| {
            let s = i * cfg.stride;
            s..s + cfg.w
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    const DT: f64 = 1.0 / 60.0;

    fn track(n: usize, f: impl Fn(f64) -> f64) -> Vec<Vec3> {
        (0..n).map(|t| [f(t as f64 * DT), 0.0, 0.0]).collect()
    }

    #[test]
    fn linear_motion_has_constant_velocity() {
        let x = track(40, |t| 0.1 * t);
        let v = derivative(&x, 1, DT).unwrap();
        assert_eq!(v.values.len(), 40);
        for p in &v.values {
            assert!((p[0] - 0.1).abs() < 1e-9, "{p:?}");
            assert_eq!(p[1], 0.0);
        }
    }

    #[test]
    fn quadratic_has_constant_acceleration() {
        let x = track(40, |t| 0.5 * 2.0 * t * t);
        let a = derivative(&x, 2, DT).unwrap();
        for p in &a.values {
            assert!((p[0] - 2.0).abs() < 1e-6, "{p:?}");
        }
        let j = derivative(&x, 3, DT).unwrap();
        for p in &j.values {
            assert!(p[0].abs() < 1e-3, "{p:?}");
        }
    }

    #[test]
    fn stationary_is_zero_for_every_order() {
        let x = vec![[0.3, -1.2, 4.0]; 9];
        for order in 1..=3 {
            assert!(derivative(&x, order, DT)
                .unwrap()
                .values
                .iter()
                .all(|v| *v == [0.0; 3]));
        }
    }

    #[test]
    fn short_tracks() {
        let x = track(2, |t| 3.0 * t);
        assert!((derivative(&x, 1, DT).unwrap().values[0][0] - 3.0).abs() < 1e-12);
        assert!(matches!(
            derivative(&x, 2, DT).unwrap_err(),
            Error::TooShort {
                found: 2,
                required: 3
            }
        ));
        let x = track(4, |t| t * t);
        let a = derivative(&x, 2, DT).unwrap();
        for p in &a.values {
            assert!((p[0] - 2.0).abs() < 1e-6);
        }
        assert!(derivative(&x, 0, DT).is_err());
        assert!(derivative(&x, 4, DT).is_err());
    }

    #[test]
    fn window_tiling() {
        let cfg = WindowConfig::new(5, 5).unwrap();
        assert_eq!(windows(10, cfg).unwrap(), vec![0..5, 5..10]);
        let cfg = WindowConfig::new(5, 1).unwrap();
        assert_eq!(windows(10, cfg).unwrap().len(), 6);
        assert!(matches!(
            windows(4, cfg).unwrap_err(),
            Error::TooShort {
                found: 4,
                required: 5
            }
        ));
        assert!(WindowConfig::new(1, 1).is_err());
        assert!(WindowConfig::new(2, 0).is_err());
    }
}
