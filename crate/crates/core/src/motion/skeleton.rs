use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Semantic joint roles consumed by the feature bank.
///
/// The first thirteen variants form the canonical skeleton; elbows are
/// optional and only refine the elbow-angle slots when present.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Head,
    LeftShoulder,
    RightShoulder,
    LeftHand,
    RightHand,
    Torso,
    Pelvis,
    LeftKnee,
    RightKnee,
    LeftAnkle,
    RightAnkle,
    LeftFoot,
    RightFoot,
    LeftElbow,
    RightElbow,
}

impl Role {
    pub const CANONICAL: [Role; 13] = [
        Role::Head,
        Role::LeftShoulder,
        Role::RightShoulder,
        Role::LeftHand,
        Role::RightHand,
        Role::Torso,
        Role::Pelvis,
        Role::LeftKnee,
        Role::RightKnee,
        Role::LeftAnkle,
        Role::RightAnkle,
        Role::LeftFoot,
        Role::RightFoot,
    ];

    pub const ALL: [Role; 15] = [
        Role::Head,
        Role::LeftShoulder,
        Role::RightShoulder,
        Role::LeftHand,
        Role::RightHand,
        Role::Torso,
        Role::Pelvis,
        Role::LeftKnee,
        Role::RightKnee,
        Role::LeftAnkle,
        Role::RightAnkle,
        Role::LeftFoot,
        Role::RightFoot,
        Role::LeftElbow,
        Role::RightElbow,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Role::Head => "head",
            Role::LeftShoulder => "left_shoulder",
            Role::RightShoulder => "right_shoulder",
            Role::LeftHand => "left_hand",
            Role::RightHand => "right_hand",
            Role::Torso => "torso",
            Role::Pelvis => "pelvis",
            Role::LeftKnee => "left_knee",
            Role::RightKnee => "right_knee",
            Role::LeftAnkle => "left_ankle",
            Role::RightAnkle => "right_ankle",
            Role::LeftFoot => "left_foot",
            Role::RightFoot => "right_foot",
            Role::LeftElbow => "left_elbow",
            Role::RightElbow => "right_elbow",
        }
    }

    pub fn is_optional(self) -> bool {
        matches!(self, Role::LeftElbow | Role::RightElbow)
    }

    /// Default joint weight: extremities count most.
    pub fn default_weight(self) -> f64 {
        match self {
            Role::LeftHand
            | Role::RightHand
            | Role::LeftFoot
            | Role::RightFoot
            | Role::LeftAnkle
            | Role::RightAnkle => 1.0,
            Role::Head => 0.8,
            Role::Pelvis => 0.5,
            _ => 0.3,
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Role {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Role::ALL
            .iter()
            .copied()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::SkeletonMismatch(format!("unknown role `{s}`")))
    }
}

/// Weight given to joints that carry no semantic role.
pub const UNMAPPED_JOINT_WEIGHT: f64 = 0.3;

/// Joint naming, role assignment and per-joint weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkeletonSpec {
    joint_names: Vec<String>,
    roles: BTreeMap<Role, usize>,
    weights: Vec<f64>,
}

impl SkeletonSpec {
    pub fn new(
        joint_names: Vec<String>,
        roles: BTreeMap<Role, usize>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        let n = joint_names.len();
        for (i, name) in joint_names.iter().enumerate() {
            if joint_names[..i].contains(name) {
                return Err(Error::SkeletonMismatch(format!(
                    "duplicate joint name `{name}`"
                )));
            }
        }
        if weights.len() != n {
            return Err(Error::SkeletonMismatch(format!(
                "{} weights for {n} joints",
                weights.len()
            )));
        }
        let mut seen = vec![false; n];
        for (role, &idx) in &roles {
            if idx >= n {
                return Err(Error::SkeletonMismatch(format!(
                    "role `{role}` maps to joint {idx}, skeleton has {n}"
                )));
            }
            if seen[idx] {
                return Err(Error::SkeletonMismatch(format!(
                    "role `{role}` shares joint `{}` with another role",
                    joint_names[idx]
                )));
            }
            seen[idx] = true;
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::SkeletonMismatch(
                "joint weights must be finite and >= 0".into(),
            ));
        }
        if !weights.iter().any(|w| *w > 0.0) {
            return Err(Error::SkeletonMismatch(
                "at least one joint weight must be > 0".into(),
            ));
        }
        Ok(Self {
            joint_names,
            roles,
            weights,
        })
    }

    /// The 13-joint skeleton, joints named after their roles.
    pub fn canonical() -> Self {
        let names = Role::CANONICAL
            .iter()
            .map(|r| r.as_str().to_string())
            .collect();
        let roles = Role::CANONICAL
            .iter()
            .enumerate()
            .map(|(i, r)| (*r, i))
            .collect();
        let weights = Role::CANONICAL.iter().map(|r| r.default_weight()).collect();
        Self::new(names, roles, weights).expect("canonical skeleton is valid")
    }

    pub fn joint_count(&self) -> usize {
        self.joint_names.len()
    }

    pub fn joint_names(&self) -> &[String] {
        &self.joint_names
    }

    pub fn roles(&self) -> &BTreeMap<Role, usize> {
        &self.roles
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn joint_index(&self, name: &str) -> Option<usize> {
        self.joint_names.iter().position(|n| n == name)
    }

    pub fn role_index(&self, role: Role) -> Option<usize> {
        self.roles.get(&role).copied()
    }

    pub fn index(&self, role: Role) -> Result<usize> {
        self.role_index(role)
            .ok_or_else(|| Error::UnresolvedRole(role.as_str().to_string()))
    }

    pub fn weight(&self, role: Role) -> Result<f64> {
        Ok(self.weights[self.index(role)?])
    }

    /// Checks that every canonical role is mapped.
    pub fn require_canonical_roles(&self) -> Result<()> {
        for role in Role::CANONICAL {
            self.index(role)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_has_thirteen_distinct_roles() {
        let s = SkeletonSpec::canonical();
        assert_eq!(s.joint_count(), 13);
        assert_eq!(s.roles().len(), 13);
        assert_eq!(s.weight(Role::LeftHand).unwrap(), 1.0);
        assert_eq!(s.weight(Role::Head).unwrap(), 0.8);
        assert_eq!(s.weight(Role::Pelvis).unwrap(), 0.5);
        assert_eq!(s.weight(Role::Torso).unwrap(), 0.3);
        assert!(s.require_canonical_roles().is_ok());
    }

    #[test]
    fn rejects_duplicates_and_bad_weights() {
        let names = vec!["a".to_string(), "a".to_string()];
        assert!(SkeletonSpec::new(names, BTreeMap::new(), vec![1.0, 1.0]).is_err());

        let names = vec!["a".to_string(), "b".to_string()];
        assert!(SkeletonSpec::new(names.clone(), BTreeMap::new(), vec![0.0, 0.0]).is_err());
        assert!(SkeletonSpec::new(names.clone(), BTreeMap::new(), vec![-1.0, 1.0]).is_err());

        let roles = BTreeMap::from([(Role::Head, 0), (Role::Pelvis, 0)]);
        assert!(SkeletonSpec::new(names.clone(), roles, vec![1.0, 1.0]).is_err());
        let roles = BTreeMap::from([(Role::Head, 2)]);
        assert!(SkeletonSpec::new(names, roles, vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn role_names_round_trip() {
        for r in Role::ALL {
            assert_eq!(r.as_str().parse::<Role>().unwrap(), r);
        }
        assert!("elbow".parse::<Role>().is_err());
    }
}
