//! JSONL sequence files.
//!
//! Line 1 is a header object; every following line is one frame holding J
//! `[x, y, z]` triplets. Missing values are written as `null`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::sequence::{JointSequence, Vec3};
use super::skeleton::{Role, SkeletonSpec, UNMAPPED_JOINT_WEIGHT};

pub const SEQUENCE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SequenceHeader {
    pub format_version: u32,
    pub fps: f64,
    pub units: String,
    pub joints: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roles: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_id: Option<String>,
}

impl SequenceHeader {
    fn skeleton(&self) -> Result<SkeletonSpec> {
        let names = self.joints.clone();
        let lookup = |name: &str| {
            names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| Error::SkeletonMismatch(format!("unknown joint name `{name}`")))
        };
        let mut roles = BTreeMap::new();
        match &self.roles {
            Some(map) => {
                for (role, joint) in map {
                    roles.insert(role.parse::<Role>()?, lookup(joint)?);
                }
            }
            None => {
                for role in Role::ALL {
                    if let Some(i) = names.iter().position(|n| n == role.as_str()) {
                        roles.insert(role, i);
                    }
                }
            }
        }
        let role_of = |i: usize| roles.iter().find(|(_, &j)| j == i).map(|(r, _)| *r);
        let mut weights: Vec<f64> = (0..names.len())
            .map(|i| role_of(i).map_or(UNMAPPED_JOINT_WEIGHT, Role::default_weight))
            .collect();
        if let Some(map) = &self.weights {
            for (joint, w) in map {
                weights[lookup(joint)?] = *w;
            }
        }
        SkeletonSpec::new(names, roles, weights)
    }

    fn from_sequence(seq: &JointSequence) -> Self {
        let skel = seq.skeleton();
        let names = skel.joint_names();
        Self {
            format_version: SEQUENCE_FORMAT_VERSION,
            fps: seq.fps(),
            units: "meters".to_string(),
            joints: names.to_vec(),
            roles: Some(
                skel.roles()
                    .iter()
                    .map(|(r, &i)| (r.as_str().to_string(), names[i].clone()))
                    .collect(),
            ),
            weights: Some(
                names
                    .iter()
                    .cloned()
                    .zip(skel.weights().iter().copied())
                    .collect(),
            ),
            label: seq.label.clone(),
            group_id: Some(seq.group_id.clone()),
        }
    }
}

type RawFrame = Vec<Option<Vec<Option<f64>>>>;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Reads a sequence; `fallback_group` is used when the header carries no
/// `group_id`.
pub fn read_sequence(reader: impl BufRead, fallback_group: &str) -> Result<JointSequence> {
    let mut lines = reader.lines().enumerate();
    let header_line = loop {
        match lines.next() {
            Some((i, line)) => {
                let line = line.map_err(|e| parse_err(i + 1, e.to_string()))?;
                if !line.trim().is_empty() {
                    break (i + 1, line);
                }
            }
            None => return Err(parse_err(1, "missing header line")),
        }
    };
    let header: SequenceHeader = serde_json::from_str(&header_line.1)
        .map_err(|e| parse_err(header_line.0, format!("header: {e}")))?;
    if header.format_version != SEQUENCE_FORMAT_VERSION {
        return Err(Error::UnsupportedVersion(header.format_version.to_string()));
    }
    if header.units != "meters" {
        return Err(parse_err(
            header_line.0,
            format!("units must be \"meters\", got \"{}\"", header.units),
        ));
    }
    let skeleton = header.skeleton()?;
    let j = skeleton.joint_count();

    let mut positions = Vec::new();
    let mut frames = 0usize;
    for (i, line) in lines {
        let line_no = i + 1;
        let line = line.map_err(|e| parse_err(line_no, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawFrame =
            serde_json::from_str(&line).map_err(|e| parse_err(line_no, e.to_string()))?;
        if raw.len() != j {
            return Err(Error::Dimension {
                frame: frames,
                expected: j,
                found: raw.len(),
            });
        }
        for triplet in raw {
            let p = match triplet {
                None => [f64::NAN; 3],
                Some(c) if c.len() == 3 => [
                    c[0].unwrap_or(f64::NAN),
                    c[1].unwrap_or(f64::NAN),
                    c[2].unwrap_or(f64::NAN),
                ],
                Some(c) => {
                    return Err(parse_err(
                        line_no,
                        format!("frame {frames}: joint entry has {} coordinates", c.len()),
                    ))
                }
            };
            positions.push(p);
        }
        frames += 1;
    }
    if frames < 2 {
        return Err(Error::TooShort {
            found: frames,
            required: 2,
        });
    }
    let group = header
        .group_id
        .clone()
        .unwrap_or_else(|| fallback_group.to_string());
    JointSequence::from_flat(
        header.fps,
        positions,
        frames,
        Arc::new(skeleton),
        header.label.clone(),
        group,
    )
}

/// Loads a sequence file using the skeleton declared in its header.
pub fn load_sequence(path: impl AsRef<Path>) -> Result<JointSequence> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    read_sequence(BufReader::new(file), &stem)
}

/// Loads a sequence and reorders its joints to match `skeleton`.
pub fn load_sequence_as(
    path: impl AsRef<Path>,
    skeleton: &Arc<SkeletonSpec>,
) -> Result<JointSequence> {
    reorder_to(&load_sequence(path)?, skeleton)
}

/// Reorders joints by name so that storage follows `skeleton`.
pub fn reorder_to(seq: &JointSequence, skeleton: &Arc<SkeletonSpec>) -> Result<JointSequence> {
    let src = seq.skeleton();
    if src.joint_count() != skeleton.joint_count() {
        return Err(Error::SkeletonMismatch(format!(
            "file has {} joints, skeleton declares {}",
            src.joint_count(),
            skeleton.joint_count()
        )));
    }
    let mut perm = Vec::with_capacity(skeleton.joint_count());
    for name in skeleton.joint_names() {
        perm.push(
            src.joint_index(name)
                .ok_or_else(|| Error::SkeletonMismatch(format!("unknown joint name `{name}`")))?,
        );
    }
    for name in src.joint_names() {
        if skeleton.joint_index(name).is_none() {
            return Err(Error::SkeletonMismatch(format!(
                "unknown joint name `{name}`"
            )));
        }
    }
    let mut positions = Vec::with_capacity(seq.positions().len());
    for t in 0..seq.frame_count() {
        let frame = seq.frame(t);
        positions.extend(perm.iter().map(|&i| frame[i]));
    }
    JointSequence::from_flat(
        seq.fps(),
        positions,
        seq.frame_count(),
        Arc::clone(skeleton),
        seq.label.clone(),
        seq.group_id.clone(),
    )
}

fn coord(v: f64) -> serde_json::Value {
    serde_json::Number::from_f64(v).map_or(serde_json::Value::Null, serde_json::Value::Number)
}

pub fn write_sequence(seq: &JointSequence, mut writer: impl Write) -> Result<()> {
    let header = SequenceHeader::from_sequence(seq);
    let io = |e| Error::io("<writer>", e);
    serde_json::to_writer(&mut writer, &header)?;
    writer.write_all(b"\n").map_err(io)?;
    for t in 0..seq.frame_count() {
        let row: Vec<serde_json::Value> = seq
            .frame(t)
            .iter()
            .map(|p: &Vec3| serde_json::Value::Array(p.iter().map(|&c| coord(c)).collect()))
            .collect();
        serde_json::to_writer(&mut writer, &row)?;
        writer.write_all(b"\n").map_err(io)?;
    }
    writer.flush().map_err(io)
}

pub fn save_sequence(seq: &JointSequence, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_sequence(seq, BufWriter::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header(joints: usize) -> String {
        let names: Vec<String> = (0..joints).map(|i| format!("\"j{i}\"")).collect();
        format!(
            "{{\"format_version\":1,\"fps\":60,\"units\":\"meters\",\"joints\":[{}]}}",
            names.join(",")
        )
    }

    fn row(joints: usize, v: f64) -> String {
        let t: Vec<String> = (0..joints).map(|_| format!("[{v},0,0]")).collect();
        format!("[{}]", t.join(","))
    }

    #[test]
    fn minimal_file_loads() {
        let text = format!("{}\n{}\n{}\n", header(13), row(13, 0.0), row(13, 1.0));
        let seq = read_sequence(text.as_bytes(), "g").unwrap();
        assert_eq!(seq.frame_count(), 2);
        assert_eq!(seq.joint_count(), 13);
        assert_eq!(seq.fps(), 60.0);
        assert_eq!(seq.group_id, "g");
    }

    #[test]
    fn single_frame_is_rejected() {
        let text = format!("{}\n{}\n", header(13), row(13, 0.0));
        let err = read_sequence(text.as_bytes(), "g").unwrap_err();
        assert!(matches!(
            err,
            Error::TooShort {
                found: 1,
                required: 2
            }
        ));
    }

    #[test]
    fn short_row_names_frame() {
        let text = format!("{}\n{}\n{}\n", header(13), row(13, 0.0), row(12, 1.0));
        match read_sequence(text.as_bytes(), "g").unwrap_err() {
            Error::Dimension {
                frame,
                expected,
                found,
            } => assert_eq!((frame, expected, found), (1, 13, 12)),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn corrupt_line_reports_line_number() {
        let text = format!("{}\n{}\n{{oops\n", header(2), row(2, 0.0));
        match read_sequence(text.as_bytes(), "g").unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn nulls_become_nan_and_units_are_checked() {
        let text = format!("{}\n[null,[1,null,2]]\n[[0,0,0],[1,1,1]]\n", header(2));
        let seq = read_sequence(text.as_bytes(), "g").unwrap();
        assert!(seq.position(0, 0)[0].is_nan());
        assert!(seq.position(0, 1)[1].is_nan());
        assert_eq!(seq.position(0, 1)[2], 2.0);

        let bad = text.replace("meters", "millimeters");
        assert!(read_sequence(bad.as_bytes(), "g").is_err());
    }

    #[test]
    fn unknown_role_joint_is_a_skeleton_mismatch() {
        let text = "{\"format_version\":1,\"fps\":60,\"units\":\"meters\",\"joints\":[\"a\",\"b\"],\"roles\":{\"head\":\"zz\"}}\n[[0,0,0],[0,0,0]]\n[[0,0,0],[0,0,0]]\n";
        assert!(matches!(
            read_sequence(text.as_bytes(), "g").unwrap_err(),
            Error::SkeletonMismatch(_)
        ));
    }

    #[test]
    fn reorders_to_declared_skeleton() {
        let text = "{\"format_version\":1,\"fps\":30,\"units\":\"meters\",\"joints\":[\"head\",\"pelvis\"]}\n[[1,1,1],[2,2,2]]\n[[1,1,1],[2,2,2]]\n";
        let seq = read_sequence(text.as_bytes(), "g").unwrap();
        let target = Arc::new(
            SkeletonSpec::new(
                vec!["pelvis".into(), "head".into()],
                BTreeMap::from([(Role::Pelvis, 0), (Role::Head, 1)]),
                vec![0.5, 0.8],
            )
            .unwrap(),
        );
        let r = reorder_to(&seq, &target).unwrap();
        assert_eq!(r.position(0, 0), [2.0; 3]);
        assert_eq!(r.position(1, 1), [1.0; 3]);
        assert_eq!(r.role_track(Role::Head).unwrap()[0], [1.0; 3]);
    }
}
