//! Laban Movement Analysis descriptors over sliding windows.
//!
//! Every operation returns one value (or one small group of values) per
//! window of [`LmaConfig::window`]; [`assemble_features`] stitches them into
//! the 55-slot [`WindowFeatures`] vector described in [`layout`].

mod body;
mod csv;
mod effort;
pub mod layout;
mod shape;
mod space;

use std::cell::OnceCell;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::floor::FloorPlane;
use crate::kinematics::{derivative, windows, WindowConfig};
use crate::motion::{JointSequence, Role, Vec3};

pub use self::body::{body_distances_angles, initiation_rate, BODY_SLOTS};
pub use self::csv::{format_sig9, read_features_csv, write_features_csv, FeatureTable};
pub use self::effort::{
    effort_flow, effort_space_joint, effort_space_total, effort_time, effort_weight, inner_window,
    FlowFeatures,
};
pub use self::layout::{feature_index, feature_names, FEATURE_COUNT, FEATURE_NAMES};
pub use self::shape::{frame_volumes, shape_volume};
pub use self::space::{space_trajectory, spatial_dispersion, SPACE_TRAJECTORY_SLOTS};

/// Speed below which curvature is not resolved, m/s (cubed in the denominator).
pub const CURVATURE_SPEED_FLOOR: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LmaConfig {
    pub window: WindowConfig,
    /// Initiation threshold τ = c · σ(speed).
    pub initiation_scale: f64,
    /// Lower bound on net displacement in path/net ratios, meters.
    pub epsilon_net: f64,
    /// Joints weighted into the Effort totals.
    pub selected_joints: Vec<Role>,
}

impl Default for LmaConfig {
    fn default() -> Self {
        Self {
            window: WindowConfig::default(),
            initiation_scale: 1.0,
            epsilon_net: 1e-3,
            selected_joints: vec![
                Role::Head,
                Role::LeftHand,
                Role::RightHand,
                Role::LeftFoot,
                Role::RightFoot,
                Role::Pelvis,
            ],
        }
    }
}

impl LmaConfig {
    pub fn with_window(w: usize, stride: usize) -> Result<Self> {
        Ok(Self {
            window: WindowConfig::new(w, stride)?,
            ..Self::default()
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.window.validate()?;
        if !(self.initiation_scale.is_finite() && self.initiation_scale > 0.0) {
            return Err(Error::invalid("initiation_scale must be > 0"));
        }
        if !(self.epsilon_net.is_finite() && self.epsilon_net > 0.0) {
            return Err(Error::invalid("epsilon_net must be > 0"));
        }
        if self.selected_joints.is_empty() {
            return Err(Error::invalid("selected_joints must not be empty"));
        }
        Ok(())
    }
}

/// One 55-value descriptor for the window starting at `window_start`.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowFeatures {
    pub values: [f64; FEATURE_COUNT],
    pub window_start: usize,
    pub label: Option<String>,
    pub group_id: String,
}

impl WindowFeatures {
    pub fn layout() -> &'static [&'static str; FEATURE_COUNT] {
        &FEATURE_NAMES
    }
}

/// Shared per-sequence state: window ranges and lazily computed derivatives.
pub(crate) struct Motion<'a> {
    pub seq: &'a JointSequence,
    pub cfg: &'a LmaConfig,
    pub windows: Vec<Range<usize>>,
    derivs: Vec<[OnceCell<Vec<Vec3>>; 3]>,
    tracks: Vec<OnceCell<Vec<Vec3>>>,
}

impl<'a> Motion<'a> {
    pub fn new(seq: &'a JointSequence, cfg: &'a LmaConfig) -> Result<Self> {
        cfg.validate()?;
        if !seq.is_finite() {
            return Err(Error::invalid(
                "sequence has non-finite positions; repair it before feature extraction",
            ));
        }
        let windows = windows(seq.frame_count(), cfg.window)?;
        let j = seq.joint_count();
        Ok(Self {
            seq,
            cfg,
            windows,
            derivs: (0..j).map(|_| Default::default()).collect(),
            tracks: (0..j).map(|_| OnceCell::new()).collect(),
        })
    }

    pub fn dt(&self) -> f64 {
        self.seq.dt()
    }

    pub fn joint(&self, role: Role) -> Result<usize> {
        self.seq.skeleton().index(role)
    }

    pub fn weight(&self, role: Role) -> Result<f64> {
        self.seq.skeleton().weight(role)
    }

    pub fn track(&self, role: Role) -> Result<&[Vec3]> {
        let j = self.joint(role)?;
        Ok(self.tracks[j].get_or_init(|| self.seq.track(j)))
    }

    /// Derivative vectors of the given order for a role.
    pub fn deriv(&self, role: Role, order: u8) -> Result<&[Vec3]> {
        let j = self.joint(role)?;
        let required = order as usize + 1;
        if self.seq.frame_count() < required {
            return Err(Error::TooShort {
                found: self.seq.frame_count(),
                required,
            });
        }
        let track = self.track(role)?;
        Ok(self.derivs[j][order as usize - 1].get_or_init(|| {
            derivative(track, order, self.dt())
                .expect("length checked above")
                .values
        }))
    }
}

/// Computes the descriptor for every sliding window of `seq`.
pub fn assemble_features(
    seq: &JointSequence,
    plane: &FloorPlane,
    cfg: &LmaConfig,
) -> Result<Vec<WindowFeatures>> {
    let m = Motion::new(seq, cfg)?;
    seq.skeleton().require_canonical_roles()?;
    for role in &cfg.selected_joints {
        m.joint(*role)?;
    }
    plane.validate()?;

    let body = body::distances_angles(&m)?;
    let init: Vec<Vec<f64>> = layout::INITIATION_ROLES
        .iter()
        .map(|r| body::initiation(&m, *r))
        .collect::<Result<_>>()?;
    let space_joint: Vec<Vec<f64>> = layout::TRACKED_ROLES
        .iter()
        .map(|r| effort::space_joint(&m, *r))
        .collect::<Result<_>>()?;
    let space_total = effort::space_total(&m)?;
    let weight = effort::weight(&m)?;
    let time = effort::time(&m)?;
    let flow = effort::flow(&m)?;
    let volume = shape::volume(&m);
    let dispersion = space::dispersion(&m)?;
    let trajectory = space::trajectory(&m, plane)?;

    let out = m
        .windows
        .iter()
        .enumerate()
        .map(|(k, range)| {
            let mut v = [0.0; FEATURE_COUNT];
            v[layout::BODY_DISTANCES..layout::BODY_INITIATION].copy_from_slice(&body[k]);
            for (i, rates) in init.iter().enumerate() {
                v[layout::BODY_INITIATION + i] = rates[k];
            }
            for (i, s) in space_joint.iter().enumerate() {
                v[layout::EFFORT_SPACE + i] = s[k];
            }
            v[layout::EFFORT_SPACE + 5] = space_total[k];
            v[layout::EFFORT_WEIGHT] = weight[k].0;
            v[layout::EFFORT_WEIGHT + 1] = weight[k].1;
            v[layout::EFFORT_TIME] = time[k].0;
            v[layout::EFFORT_TIME + 1] = time[k].1;
            v[layout::EFFORT_FLOW..layout::EFFORT_FLOW + 5].copy_from_slice(&flow[k].per_role);
            v[layout::EFFORT_FLOW + 5] = flow[k].total;
            v[layout::SHAPE_VOLUME..layout::SPACE_DISPERSION].copy_from_slice(&volume[k]);
            v[layout::SPACE_DISPERSION..layout::SPACE_PELVIS_PATH].copy_from_slice(&dispersion[k]);
            v[layout::SPACE_PELVIS_PATH..].copy_from_slice(&trajectory[k]);
            WindowFeatures {
                values: v,
                window_start: range.start,
                label: seq.label.clone(),
                group_id: seq.group_id.clone(),
            }
        })
        .collect::<Vec<_>>();

    if let Some((w, i)) = out
        .iter()
        .enumerate()
        .find_map(|(w, f)| f.values.iter().position(|x| !x.is_finite()).map(|i| (w, i)))
    {
        return Err(Error::invalid(format!(
            "feature `{}` is non-finite in window {w}",
            FEATURE_NAMES[i]
        )));
    }
    Ok(out)
}

/// Features for several sequences, concatenated in input order.
pub fn assemble_corpus(
    seqs: &[JointSequence],
    plane: &FloorPlane,
    cfg: &LmaConfig,
) -> Result<Vec<WindowFeatures>> {
    use rayon::prelude::*;
    let per_seq: Vec<Vec<WindowFeatures>> = seqs
        .par_iter()
        .map(|s| assemble_features(s, plane, cfg))
        .collect::<Result<_>>()?;
    Ok(per_seq.into_iter().flatten().collect())
}
