//! Body component: inter-joint distances, joint angles and movement initiation.

use crate::error::Result;
use crate::geom::{angle_at, dist, midpoint, norm, std_dev, sub};
use crate::motion::{JointSequence, Role, Vec3};

use super::{LmaConfig, Motion};

/// 8 distances followed by 6 angles.
pub const BODY_SLOTS: usize = 14;

const DISTANCE_PAIRS: [(Role, Role); 8] = [
    (Role::LeftHand, Role::RightHand),
    (Role::LeftHand, Role::Pelvis),
    (Role::RightHand, Role::Pelvis),
    (Role::LeftAnkle, Role::RightAnkle),
    (Role::LeftKnee, Role::RightKnee),
    (Role::LeftShoulder, Role::LeftHand),
    (Role::RightShoulder, Role::RightHand),
    (Role::Head, Role::Pelvis),
];

fn frame_values(m: &Motion<'_>, t: usize, idx: &Indices) -> [f64; BODY_SLOTS] {
    let p = |j: usize| m.seq.position(t, j);
    let mut out = [0.0; BODY_SLOTS];
    for (k, (a, b)) in idx.pairs.iter().enumerate() {
        out[k] = dist(p(*a), p(*b));
    }
    let elbow = |shoulder: usize, elbow: Option<usize>, hand: usize| -> f64 {
        let s = p(shoulder);
        let h = p(hand);
        let e = elbow.map_or_else(|| midpoint(s, h), p);
        angle_at(s, e, h)
    };
    out[8] = elbow(idx.lshoulder, idx.lelbow, idx.lhand);
    out[9] = elbow(idx.rshoulder, idx.relbow, idx.rhand);
    out[10] = angle_at(p(idx.pelvis), p(idx.lknee), p(idx.lankle));
    out[11] = angle_at(p(idx.pelvis), p(idx.rknee), p(idx.rankle));
    out[12] = angle_at(p(idx.head), p(idx.lshoulder), p(idx.lhand));
    out[13] = angle_at(p(idx.head), p(idx.rshoulder), p(idx.rhand));
    out
}

struct Indices {
    pairs: Vec<(usize, usize)>,
    head: usize,
    pelvis: usize,
    lshoulder: usize,
    rshoulder: usize,
    lelbow: Option<usize>,
    relbow: Option<usize>,
    lhand: usize,
    rhand: usize,
    lknee: usize,
    rknee: usize,
    lankle: usize,
    rankle: usize,
}

pub(crate) fn distances_angles(m: &Motion<'_>) -> Result<Vec<[f64; BODY_SLOTS]>> {
    let skel = m.seq.skeleton();
    let idx = Indices {
        pairs: DISTANCE_PAIRS
            .iter()
            .map(|(a, b)| Ok((m.joint(*a)?, m.joint(*b)?)))
            .collect::<Result<_>>()?,
        head: m.joint(Role::Head)?,
        pelvis: m.joint(Role::Pelvis)?,
        lshoulder: m.joint(Role::LeftShoulder)?,
        rshoulder: m.joint(Role::RightShoulder)?,
        lelbow: skel.role_index(Role::LeftElbow),
        relbow: skel.role_index(Role::RightElbow),
        lhand: m.joint(Role::LeftHand)?,
        rhand: m.joint(Role::RightHand)?,
        lknee: m.joint(Role::LeftKnee)?,
        rknee: m.joint(Role::RightKnee)?,
        lankle: m.joint(Role::LeftAnkle)?,
        rankle: m.joint(Role::RightAnkle)?,
    };
    let per_frame: Vec<[f64; BODY_SLOTS]> = (0..m.seq.frame_count())
        .map(|t| frame_values(m, t, &idx))
        .collect();
    Ok(m.windows
        .iter()
        .map(|r| {
            let mut acc = [0.0; BODY_SLOTS];
            for f in &per_frame[r.clone()] {
                for (a, v) in acc.iter_mut().zip(f) {
                    *a += v;
                }
            }
            acc.map(|a| a / r.len() as f64)
        })
        .collect())
}

/// Fraction of window frames at which `role` initiates movement: the
/// displacement over the next `w` frames, divided by `w·dt`, exceeds
/// `c·σ` where σ is the standard deviation of the joint's speed over the
/// whole sequence. Frames whose look-ahead runs past the sequence end are
/// excluded; a window with no eligible frame scores 0.
pub(crate) fn initiation(m: &Motion<'_>, role: Role) -> Result<Vec<f64>> {
    let track = m.track(role)?;
    let speeds: Vec<f64> = m.deriv(role, 1)?.iter().map(|v| norm(*v)).collect();
    let tau = m.cfg.initiation_scale * std_dev(&speeds);
    Ok(initiation_windows(
        track,
        m.cfg.window.w,
        m.dt(),
        tau,
        &m.windows,
    ))
}

fn initiation_windows(
    track: &[Vec3],
    w: usize,
    dt: f64,
    tau: f64,
    windows: &[std::ops::Range<usize>],
) -> Vec<f64> {
    let n = track.len();
    let span = w as f64 * dt;
    let fires: Vec<bool> = (0..n)
        .map(|t| t + w < n && norm(sub(track[t + w], track[t])) / span > tau)
        .collect();
    windows
        .iter()
        .map(|r| {
            let eligible = r.clone().filter(|t| t + w < n).count();
            if eligible == 0 {
                0.0
            } else {
                r.clone().filter(|&t| fires[t]).count() as f64 / eligible as f64
            }
        })
        .collect()
}

/// Per-window initiation rate of one joint.
pub fn initiation_rate(seq: &JointSequence, role: Role, cfg: &LmaConfig) -> Result<Vec<f64>> {
    initiation(&Motion::new(seq, cfg)?, role)
}

/// Per-window means of the 8 distances and 6 angles.
pub fn body_distances_angles(
    seq: &JointSequence,
    cfg: &LmaConfig,
) -> Result<Vec<[f64; BODY_SLOTS]>> {
    distances_angles(&Motion::new(seq, cfg)?)
}
