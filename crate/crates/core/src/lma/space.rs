//! Space component: kinesphere dispersion and pelvis trajectory.

use crate::error::Result;
use crate::floor::{height_above_floor, FloorPlane};
use crate::geom::{cross, dist, max, mean, min, norm, std_dev};
use crate::motion::{JointSequence, Role, Vec3};

use super::layout::TRACKED_ROLES;
use super::{LmaConfig, Motion, CURVATURE_SPEED_FLOOR};

pub const SPACE_TRAJECTORY_SLOTS: usize = 13;

const UPPER: [Role; 5] = [
    Role::Head,
    Role::LeftHand,
    Role::RightHand,
    Role::LeftShoulder,
    Role::RightShoulder,
];
const LOWER: [Role; 4] = [
    Role::LeftKnee,
    Role::RightKnee,
    Role::LeftAnkle,
    Role::RightAnkle,
];

fn mean_distance(m: &Motion<'_>, center: Role, parts: &[Role]) -> Result<Vec<f64>> {
    let c = m.joint(center)?;
    let idx: Vec<usize> = parts.iter().map(|r| m.joint(*r)).collect::<Result<_>>()?;
    Ok((0..m.seq.frame_count())
        .map(|t| {
            let frame = m.seq.frame(t);
            idx.iter().map(|&j| dist(frame[j], frame[c])).sum::<f64>() / idx.len() as f64
        })
        .collect())
}

pub(crate) fn dispersion(m: &Motion<'_>) -> Result<Vec<[f64; 4]>> {
    let upper = mean_distance(m, Role::Torso, &UPPER)?;
    let lower = mean_distance(m, Role::Pelvis, &LOWER)?;
    Ok(m.windows
        .iter()
        .map(|r| {
            let u = &upper[r.clone()];
            let l = &lower[r.clone()];
            [mean(u), std_dev(u), mean(l), std_dev(l)]
        })
        .collect())
}

fn path_length(track: &[Vec3]) -> f64 {
    track.windows(2).map(|p| dist(p[1], p[0])).sum()
}

pub(crate) fn trajectory(
    m: &Motion<'_>,
    plane: &FloorPlane,
) -> Result<Vec<[f64; SPACE_TRAJECTORY_SLOTS]>> {
    let pelvis = m.track(Role::Pelvis)?;
    let vel = m.deriv(Role::Pelvis, 1)?;
    let acc = m.deriv(Role::Pelvis, 2)?;
    let curvature: Vec<f64> = vel
        .iter()
        .zip(acc)
        .map(|(v, a)| norm(cross(*v, *a)) / norm(*v).powi(3).max(CURVATURE_SPEED_FLOOR))
        .collect();
    let heights: Vec<f64> = pelvis
        .iter()
        .map(|p| height_above_floor(*p, plane))
        .collect();
    let tracked: Vec<&[Vec3]> = TRACKED_ROLES
        .iter()
        .map(|r| m.track(*r))
        .collect::<Result<_>>()?;
    let eps = m.cfg.epsilon_net;

    Ok(m.windows
        .iter()
        .map(|r| {
            let mut out = [0.0; SPACE_TRAJECTORY_SLOTS];
            let path = path_length(&pelvis[r.clone()]);
            let net = dist(pelvis[r.end - 1], pelvis[r.start]);
            out[0] = path;
            out[1] = net;
            out[2] = if path == 0.0 {
                0.0
            } else {
                path / net.max(eps)
            };
            out[3] = mean(&curvature[r.clone()]);
            out[4] = max(&curvature[r.clone()]);
            for (k, t) in tracked.iter().enumerate() {
                out[5 + k] = path_length(&t[r.clone()]);
            }
            let h = &heights[r.clone()];
            out[10] = mean(h);
            out[11] = min(h);
            out[12] = max(h);
            out
        })
        .collect())
}

/// `(upper mean, upper std, lower mean, lower std)` per window: mean distance
/// of head, hands and shoulders to the torso, and of knees and ankles to the pelvis.
pub fn spatial_dispersion(seq: &JointSequence, cfg: &LmaConfig) -> Result<Vec<[f64; 4]>> {
    dispersion(&Motion::new(seq, cfg)?)
}

/// Pelvis path, net displacement, path/net ratio, curvature mean and max,
/// path length of the five tracked roles, and pelvis height above the
/// floor (mean, min, max), per window.
pub fn space_trajectory(
    seq: &JointSequence,
    plane: &FloorPlane,
    cfg: &LmaConfig,
) -> Result<Vec<[f64; SPACE_TRAJECTORY_SLOTS]>> {
    plane.validate()?;
    trajectory(&Motion::new(seq, cfg)?, plane)
}
