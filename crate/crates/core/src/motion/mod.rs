//! Skeleton and sequence data model, sequence files, gap repair and resampling.

mod io;
mod repair;
mod sequence;
mod skeleton;

pub use io::{
    load_sequence, load_sequence_as, read_sequence, reorder_to, save_sequence, write_sequence,
    SequenceHeader, SEQUENCE_FORMAT_VERSION,
};
pub use repair::{resample, validate_and_repair, DEFAULT_MAX_GAP};
pub use sequence::{JointSequence, Vec3, DEFAULT_FPS};
pub use skeleton::{Role, SkeletonSpec, UNMAPPED_JOINT_WEIGHT};
