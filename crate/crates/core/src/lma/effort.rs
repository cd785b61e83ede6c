//! Effort component: Space (directness), Weight (kinetic energy), Time
//! (acceleration) and Flow (jerk).

use crate::error::{Error, Result};
use crate::geom::{max, mean, norm, sub};
use crate::motion::{JointSequence, Role};

use super::layout::TRACKED_ROLES;
use super::{LmaConfig, Motion};

/// Length of the short chords tiling each window in the Space ratio.
pub fn inner_window(w: usize) -> usize {
    (w / 5).max(2)
}

pub(crate) fn space_joint(m: &Motion<'_>, role: Role) -> Result<Vec<f64>> {
    let w = m.cfg.window.w;
    let inner = inner_window(w);
    if w < 2 * inner {
        return Err(Error::invalid(format!(
            "window of {w} frames is shorter than two chords of {inner}"
        )));
    }
    let track = m.track(role)?;
    let eps = m.cfg.epsilon_net;
    Ok(m.windows
        .iter()
        .map(|r| {
            let mut chords = 0.0;
            let mut last = r.start;
            let mut t = r.start + inner;
            while t < r.end {
                chords += norm(sub(track[t], track[t - inner]));
                last = t;
                t += inner;
            }
            if chords == 0.0 {
                return 0.0;
            }
            chords / norm(sub(track[last], track[r.start])).max(eps)
        })
        .collect())
}

pub(crate) fn space_total(m: &Motion<'_>) -> Result<Vec<f64>> {
    let mut total = vec![0.0; m.windows.len()];
    for role in &m.cfg.selected_joints {
        let alpha = m.weight(*role)?;
        for (t, s) in total.iter_mut().zip(space_joint(m, *role)?) {
            *t += alpha * s;
        }
    }
    Ok(total)
}

/// Σ α_j f(‖d_j(t)‖) per frame, summed over the selected joints.
fn weighted_frame_sum(m: &Motion<'_>, order: u8, f: impl Fn(f64) -> f64) -> Result<Vec<f64>> {
    let mut sum = vec![0.0; m.seq.frame_count()];
    for role in &m.cfg.selected_joints {
        let alpha = m.weight(*role)?;
        for (s, v) in sum.iter_mut().zip(m.deriv(*role, order)?) {
            *s += alpha * f(norm(*v));
        }
    }
    Ok(sum)
}

pub(crate) fn weight(m: &Motion<'_>) -> Result<Vec<(f64, f64)>> {
    let energy = weighted_frame_sum(m, 1, |v| 0.5 * v * v)?;
    Ok(m.windows
        .iter()
        .map(|r| (mean(&energy[r.clone()]), max(&energy[r.clone()])))
        .collect())
}

pub(crate) fn time(m: &Motion<'_>) -> Result<Vec<(f64, f64)>> {
    let accel = weighted_frame_sum(m, 2, |a| a)?;
    // mean of a weighted sum is the weighted sum of per-joint means
    Ok(m.windows
        .iter()
        .map(|r| (mean(&accel[r.clone()]), max(&accel[r.clone()])))
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowFeatures {
    /// Mean jerk magnitude of head, left hand, right hand, left foot, right foot.
    pub per_role: [f64; 5],
    /// Σ α_j · mean jerk magnitude over the selected joints.
    pub total: f64,
}

pub(crate) fn flow(m: &Motion<'_>) -> Result<Vec<FlowFeatures>> {
    let jerk_mag = |role: Role| -> Result<Vec<f64>> {
        Ok(m.deriv(role, 3)?.iter().map(|v| norm(*v)).collect())
    };
    let tracked: Vec<Vec<f64>> = TRACKED_ROLES
        .iter()
        .map(|r| jerk_mag(*r))
        .collect::<Result<_>>()?;
    let total = weighted_frame_sum(m, 3, |j| j)?;
    Ok(m.windows
        .iter()
        .map(|r| {
            let mut per_role = [0.0; 5];
            for (p, jm) in per_role.iter_mut().zip(&tracked) {
                *p = mean(&jm[r.clone()]);
            }
            FlowFeatures {
                per_role,
                total: mean(&total[r.clone()]),
            }
        })
        .collect())
}

/// Path-to-displacement ratio of one joint per window, measured with
/// chords of [`inner_window`] frames. Ratios are ≥ 1 unless the net
/// displacement is clamped to `epsilon_net`; a joint that does not move
/// scores 0.
pub fn effort_space_joint(seq: &JointSequence, role: Role, cfg: &LmaConfig) -> Result<Vec<f64>> {
    space_joint(&Motion::new(seq, cfg)?, role)
}

/// Σ α_j · Space_j over the selected joints.
pub fn effort_space_total(seq: &JointSequence, cfg: &LmaConfig) -> Result<Vec<f64>> {
    space_total(&Motion::new(seq, cfg)?)
}

/// Window mean and max of the per-frame kinetic energy Σ ½ α_j ‖v_j‖² (unit mass).
pub fn effort_weight(seq: &JointSequence, cfg: &LmaConfig) -> Result<Vec<(f64, f64)>> {
    weight(&Motion::new(seq, cfg)?)
}

/// `(Σ α_j · mean ‖a_j‖, max over frames of Σ α_j ‖a_j(t)‖)` per window.
pub fn effort_time(seq: &JointSequence, cfg: &LmaConfig) -> Result<Vec<(f64, f64)>> {
    time(&Motion::new(seq, cfg)?)
}

/// Mean jerk magnitudes per tracked role and their weighted total, per window.
pub fn effort_flow(seq: &JointSequence, cfg: &LmaConfig) -> Result<Vec<FlowFeatures>> {
    flow(&Motion::new(seq, cfg)?)
}
