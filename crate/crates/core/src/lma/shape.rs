//! Shape component: convex-hull volume of the body.

use rayon::prelude::*;

use crate::geom::{max, mean, min, std_dev};
use crate::hull::hull_volume;
use crate::motion::JointSequence;

use super::{LmaConfig, Motion};
use crate::error::Result;

/// Hull volume of all joints, per frame.
pub fn frame_volumes(seq: &JointSequence) -> Vec<f64> {
    (0..seq.frame_count())
        .into_par_iter()
        .map(|t| hull_volume(seq.frame(t)))
        .collect()
}

pub(crate) fn volume(m: &Motion<'_>) -> Vec<[f64; 4]> {
    let v = frame_volumes(m.seq);
    m.windows
        .iter()
        .map(|r| {
            let s = &v[r.clone()];
            [mean(s), std_dev(s), min(s), max(s)]
        })
        .collect()
}

/// `(mean, std, min, max)` of hull volume per window, m³.
pub fn shape_volume(seq: &JointSequence, cfg: &LmaConfig) -> Result<Vec<[f64; 4]>> {
    Ok(volume(&Motion::new(seq, cfg)?))
}
