//! Fixed 55-slot descriptor layout.
//!
//! Body 18 | Effort 16 | Shape 4 | Space 17. The name list doubles as the
//! feature CSV header and the SHAP display labels, so it must not change
//! without bumping the model format.

use crate::motion::Role;

pub const FEATURE_COUNT: usize = 55;

/// Roles with their own Effort and Space slots.
pub const TRACKED_ROLES: [Role; 5] = [
    Role::Head,
    Role::LeftHand,
    Role::RightHand,
    Role::LeftFoot,
    Role::RightFoot,
];

/// Roles whose movement initiation is reported.
pub const INITIATION_ROLES: [Role; 4] = [
    Role::LeftHand,
    Role::RightHand,
    Role::LeftFoot,
    Role::RightFoot,
];

pub const BODY_DISTANCES: usize = 0;
pub const BODY_ANGLES: usize = 8;
pub const BODY_INITIATION: usize = 14;
pub const EFFORT_SPACE: usize = 18;
pub const EFFORT_WEIGHT: usize = 24;
pub const EFFORT_TIME: usize = 26;
pub const EFFORT_FLOW: usize = 28;
pub const SHAPE_VOLUME: usize = 34;
pub const SPACE_DISPERSION: usize = 38;
pub const SPACE_PELVIS_PATH: usize = 42;
pub const SPACE_CURVATURE: usize = 45;
pub const SPACE_JOINT_DISTANCE: usize = 47;
pub const SPACE_PELVIS_HEIGHT: usize = 52;

pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    // body: distances (m)
    "body_dist_lhand_rhand",
    "body_dist_lhand_pelvis",
    "body_dist_rhand_pelvis",
    "body_dist_lankle_rankle",
    "body_dist_lknee_rknee",
    "body_dist_lshoulder_lhand",
    "body_dist_rshoulder_rhand",
    "body_dist_head_pelvis",
    // body: angles (rad)
    "body_angle_lelbow",
    "body_angle_relbow",
    "body_angle_lknee",
    "body_angle_rknee",
    "body_angle_lshoulder",
    "body_angle_rshoulder",
    // body: initiation rates
    "body_init_lhand",
    "body_init_rhand",
    "body_init_lfoot",
    "body_init_rfoot",
    // effort
    "effort_space_head",
    "effort_space_lhand",
    "effort_space_rhand",
    "effort_space_lfoot",
    "effort_space_rfoot",
    "effort_space_total",
    "effort_weight_mean",
    "effort_weight_max",
    "effort_time_mean",
    "effort_time_max",
    "effort_flow_head",
    "effort_flow_lhand",
    "effort_flow_rhand",
    "effort_flow_lfoot",
    "effort_flow_rfoot",
    "effort_flow_total",
    // shape (m³)
    "shape_volume_mean",
    "shape_volume_std",
    "shape_volume_min",
    "shape_volume_max",
    // space
    "space_dispersion_upper_mean",
    "space_dispersion_upper_std",
    "space_dispersion_lower_mean",
    "space_dispersion_lower_std",
    "space_pelvis_path",
    "space_pelvis_net",
    "space_pelvis_path_ratio",
    "space_pelvis_curvature_mean",
    "space_pelvis_curvature_max",
    "space_distance_head",
    "space_distance_lhand",
    "space_distance_rhand",
    "space_distance_lfoot",
    "space_distance_rfoot",
    "space_pelvis_height_mean",
    "space_pelvis_height_min",
    "space_pelvis_height_max",
];

pub fn feature_names() -> Vec<String> {
    FEATURE_NAMES.iter().map(|s| s.to_string()).collect()
}

pub fn feature_index(name: &str) -> Option<usize> {
    FEATURE_NAMES.iter().position(|n| *n == name)
}
