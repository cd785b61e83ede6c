use crate::error::{Error, Result};

use super::sequence::{JointSequence, Vec3};

/// Longest run of missing frames that is filled by interpolation (0.1 s at 60 fps).
pub const DEFAULT_MAX_GAP: usize = 6;

fn is_valid(p: &Vec3) -> bool {
    p.iter().all(|c| c.is_finite())
}

/// Fills short runs of missing joint positions by linear interpolation.
///
/// A joint position is missing when any of its coordinates is non-finite.
/// Runs touching the first or last frame cannot be bracketed and are errors,
/// as are runs longer than `max_gap`.
pub fn validate_and_repair(seq: &JointSequence, max_gap: usize) -> Result<JointSequence> {
    if seq.is_finite() {
        return Ok(seq.clone());
    }
    let n = seq.frame_count();
    let j = seq.joint_count();
    let mut positions = seq.positions().to_vec();
    for joint in 0..j {
        let name = || seq.skeleton().joint_names()[joint].clone();
        let mut t = 0;
        while t < n {
            if is_valid(&positions[t * j + joint]) {
                t += 1;
                continue;
            }
            let start = t;
            while t < n && !is_valid(&positions[t * j + joint]) {
                t += 1;
            }
            let end = t - 1;
            if start == 0 || t == n {
                return Err(Error::BoundaryGap {
                    joint: name(),
                    start,
                    end,
                });
            }
            let len = end - start + 1;
            if len > max_gap {
                return Err(Error::UnrecoverableGap {
                    joint: name(),
                    start,
                    end,
                    len,
                    max_gap,
                });
            }
            let a = positions[(start - 1) * j + joint];
            let b = positions[t * j + joint];
            let span = (len + 1) as f64;
            for (k, frame) in (start..=end).enumerate() {
                let s = (k + 1) as f64 / span;
                positions[frame * j + joint] = lerp(a, b, s);
            }
        }
    }
    Ok(seq.with_positions(seq.fps(), positions, n))
}

fn lerp(a: Vec3, b: Vec3, s: f64) -> Vec3 {
    [
        a[0] + (b[0] - a[0]) * s,
        a[1] + (b[1] - a[1]) * s,
        a[2] + (b[2] - a[2]) * s,
    ]
}

/// Linearly resamples every joint onto a uniform grid at `target_fps`.
///
/// The output keeps the duration `T / fps`, so it holds
/// `round(T * target_fps / fps)` frames, and its first and last samples
/// coincide with the source's first and last frames.
pub fn resample(seq: &JointSequence, target_fps: f64) -> Result<JointSequence> {
    if !(target_fps.is_finite() && target_fps > 0.0) {
        return Err(Error::invalid(format!(
            "target fps must be > 0, got {target_fps}"
        )));
    }
    let n = seq.frame_count();
    let j = seq.joint_count();
    let out_n = ((n as f64 * target_fps / seq.fps()).round() as usize).max(2);
    if out_n == n {
        return Ok(seq.with_positions(target_fps, seq.positions().to_vec(), n));
    }
    let last = (n - 1) as f64;
    let mut positions = Vec::with_capacity(out_n * j);
    for k in 0..out_n {
        // source frame coordinate
        let u = if k == out_n - 1 {
            last
        } else {
            k as f64 * last / (out_n - 1) as f64
        };
        let lo = (u.floor() as usize).min(n - 2);
        let s = u - lo as f64;
        for joint in 0..j {
            let a = seq.position(lo, joint);
            let b = seq.position(lo + 1, joint);
            positions.push(if s == 0.0 {
                a
            } else if s == 1.0 {
                b
            } else {
                lerp(a, b, s)
            });
        }
    }
    Ok(seq.with_positions(target_fps, positions, out_n))
}
