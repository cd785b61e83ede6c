use std::sync::Arc;

use crate::error::{Error, Result};

use super::skeleton::{Role, SkeletonSpec};

pub type Vec3 = [f64; 3];

/// Frame rate of the reference recordings.
pub const DEFAULT_FPS: f64 = 60.0;

/// Timestamped T×J×3 joint positions in meters.
///
/// Positions are stored frame-major. Non-finite values are allowed until the
/// sequence has gone through [`validate_and_repair`](super::validate_and_repair);
/// feature extraction rejects them.
#[derive(Clone, Debug, PartialEq)]
pub struct JointSequence {
    fps: f64,
    positions: Vec<Vec3>,
    frames: usize,
    skeleton: Arc<SkeletonSpec>,
    pub label: Option<String>,
    pub group_id: String,
}

impl JointSequence {
    /// Builds a sequence from per-frame joint rows.
    pub fn new(
        fps: f64,
        frames: Vec<Vec<Vec3>>,
        skeleton: Arc<SkeletonSpec>,
        label: Option<String>,
        group_id: impl Into<String>,
    ) -> Result<Self> {
        let j = skeleton.joint_count();
        for (t, row) in frames.iter().enumerate() {
            if row.len() != j {
                return Err(Error::Dimension {
                    frame: t,
                    expected: j,
                    found: row.len(),
                });
            }
        }
        let t = frames.len();
        Self::from_flat(
            fps,
            frames.into_iter().flatten().collect(),
            t,
            skeleton,
            label,
            group_id,
        )
    }

    pub fn from_flat(
        fps: f64,
        positions: Vec<Vec3>,
        frames: usize,
        skeleton: Arc<SkeletonSpec>,
        label: Option<String>,
        group_id: impl Into<String>,
    ) -> Result<Self> {
        if !(fps.is_finite() && fps > 0.0) {
            return Err(Error::invalid(format!("fps must be > 0, got {fps}")));
        }
        if frames < 2 {
            return Err(Error::TooShort {
                found: frames,
                required: 2,
            });
        }
        let j = skeleton.joint_count();
        if positions.len() != frames * j {
            return Err(Error::LengthMismatch(format!(
                "{} positions for {frames} frames of {j} joints",
                positions.len()
            )));
        }
        Ok(Self {
            fps,
            positions,
            frames,
            skeleton,
            label,
            group_id: group_id.into(),
        })
    }

    pub fn fps(&self) -> f64 {
        self.fps
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.fps
    }

    pub fn frame_count(&self) -> usize {
        self.frames
    }

    pub fn joint_count(&self) -> usize {
        self.skeleton.joint_count()
    }

    /// Duration covered by the frame count, `T / fps`.
    pub fn duration(&self) -> f64 {
        self.frames as f64 / self.fps
    }

    pub fn skeleton(&self) -> &SkeletonSpec {
        &self.skeleton
    }

    pub fn skeleton_arc(&self) -> &Arc<SkeletonSpec> {
        &self.skeleton
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.positions
    }

    pub fn frame(&self, t: usize) -> &[Vec3] {
        let j = self.joint_count();
        &self.positions[t * j..(t + 1) * j]
    }

    pub fn position(&self, t: usize, joint: usize) -> Vec3 {
        self.positions[t * self.joint_count() + joint]
    }

    /// Track of one joint over all frames.
    pub fn track(&self, joint: usize) -> Vec<Vec3> {
        (0..self.frames).map(|t| self.position(t, joint)).collect()
    }

    pub fn role_track(&self, role: Role) -> Result<Vec<Vec3>> {
        Ok(self.track(self.skeleton.index(role)?))
    }

    pub fn is_finite(&self) -> bool {
        self.positions.iter().flatten().all(|c| c.is_finite())
    }

    /// Applies `f` to every position, keeping metadata.
    pub fn map_positions(&self, mut f: impl FnMut(Vec3) -> Vec3) -> Self {
        Self {
            positions: self.positions.iter().map(|p| f(*p)).collect(),
            ..self.clone()
        }
    }

    pub(crate) fn with_positions(&self, fps: f64, positions: Vec<Vec3>, frames: usize) -> Self {
        debug_assert_eq!(positions.len(), frames * self.joint_count());
        Self {
            fps,
            positions,
            frames,
            ..self.clone()
        }
    }
}
