//! Floor estimation by linear quantile regression on a scene point cloud.
//!
//! Points are projected onto the (depth, up) plane and the line
//! `h = slope * d + intercept` minimizing the pinball loss is found exactly.
//! An optimal line always interpolates two sample points, so the solver walks
//! between such lines: it fixes one interpolated point as a pivot, solves the
//! one-dimensional problem over slopes through it (a weighted quantile), and
//! moves the pivot to the newly interpolated point until no rotation about
//! any point on the current line lowers the loss.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::motion::{JointSequence, Role, Vec3};

pub const DEFAULT_TAU: f64 = 0.05;
pub const DEFAULT_UP_AXIS: usize = 1;
pub const DEFAULT_DEPTH_AXIS: usize = 2;
pub const MIN_CLOUD_POINTS: usize = 10;

/// Percentile of head height used as standing body height.
pub const BODY_HEIGHT_PERCENTILE: f64 = 95.0;

#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    points: Vec<Vec3>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec3>) -> Result<Self> {
        if points.len() < MIN_CLOUD_POINTS {
            return Err(Error::invalid(format!(
                "point cloud needs at least {MIN_CLOUD_POINTS} points, got {}",
                points.len()
            )));
        }
        if let Some(i) = points.iter().position(|p| p.iter().any(|c| !c.is_finite())) {
            return Err(Error::invalid(format!(
                "point {i} has non-finite coordinates"
            )));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Reads an ASCII point cloud: one `x y z` (or `x,y,z`) per line.
/// Blank lines, `#` comments and a non-numeric first line are skipped.
pub fn read_point_cloud(path: impl AsRef<Path>) -> Result<PointCloud> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut points = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        let parsed: std::result::Result<Vec<f64>, _> =
            fields.iter().take(3).map(|s| s.parse::<f64>()).collect();
        match parsed {
            Ok(v) if v.len() == 3 => points.push([v[0], v[1], v[2]]),
            Err(_) if points.is_empty() && i == 0 => continue,
            _ => {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("expected three numbers, got `{line}`"),
                })
            }
        }
    }
    PointCloud::new(points)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FloorPlane {
    pub slope: f64,
    pub intercept: f64,
    pub up_axis: usize,
    pub depth_axis: usize,
    pub tau: f64,
    pub pinball_loss: f64,
}

impl FloorPlane {
    /// Horizontal floor through the origin.
    pub fn flat(up_axis: usize, depth_axis: usize) -> Result<Self> {
        let plane = Self {
            slope: 0.0,
            intercept: 0.0,
            up_axis,
            depth_axis,
            tau: DEFAULT_TAU,
            pinball_loss: 0.0,
        };
        plane.validate()?;
        Ok(plane)
    }

    pub fn validate(&self) -> Result<()> {
        validate_axes(self.up_axis, self.depth_axis)?;
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return Err(Error::invalid(format!(
                "tau must be in (0, 1), got {}",
                self.tau
            )));
        }
        if !(self.slope.is_finite() && self.intercept.is_finite()) {
            return Err(Error::invalid("floor parameters must be finite"));
        }
        if self.pinball_loss.is_nan() || self.pinball_loss < 0.0 {
            return Err(Error::invalid("pinball loss must be >= 0"));
        }
        Ok(())
    }

    /// Floor height under the given depth coordinate.
    pub fn floor_at(&self, depth: f64) -> f64 {
        self.slope * depth + self.intercept
    }
}

fn validate_axes(up: usize, depth: usize) -> Result<()> {
    if up > 2 || depth > 2 || up == depth {
        return Err(Error::invalid(format!(
            "up and depth axes must be distinct indices in 0..3, got {up} and {depth}"
        )));
    }
    Ok(())
}

/// ρ_τ(r) = r (τ − 1[r < 0]).
#[inline]
pub fn pinball(r: f64, tau: f64) -> f64 {
    if r < 0.0 {
        r * (tau - 1.0)
    } else {
        r * tau
    }
}

/// Total pinball loss of the line over projected `(depth, height)` samples.
pub fn line_loss(samples: &[(f64, f64)], slope: f64, intercept: f64, tau: f64) -> f64 {
    samples
        .iter()
        .map(|&(d, h)| pinball(h - (slope * d + intercept), tau))
        .sum()
}

struct Rotation {
    slope: f64,
    through: usize,
    loss: f64,
}

/// Best line through sample `pivot`, found as a weighted quantile of the
/// slopes to every other sample.
fn best_rotation(samples: &[(f64, f64)], pivot: usize, tau: f64) -> Option<Rotation> {
    let (dp, hp) = samples[pivot];
    // (candidate slope, weight, effective quantile, index)
    let mut cands: Vec<(f64, f64, f64, usize)> = samples
        .iter()
        .enumerate()
        .filter(|&(_, &(d, _))| d != dp)
        .map(|(j, &(d, h))| {
            let dd = d - dp;
            let q = if dd > 0.0 { tau } else { 1.0 - tau };
            ((h - hp) / dd, dd.abs(), q, j)
        })
        .collect();
    if cands.is_empty() {
        return None;
    }
    cands.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.3.cmp(&b.3)));
    // d/db of the loss left of every candidate
    let mut grad: f64 = -cands.iter().map(|c| c.1 * c.2).sum::<f64>();
    let mut pick = cands.len() - 1;
    for (k, c) in cands.iter().enumerate() {
        grad += c.1;
        if grad >= 0.0 {
            pick = k;
            break;
        }
    }
    let (slope, _, _, through) = cands[pick];
    let intercept = hp - slope * dp;
    Some(Rotation {
        slope,
        through,
        loss: line_loss(samples, slope, intercept, tau),
    })
}

/// Fits the floor line to a point cloud by exact quantile regression.
pub fn fit_floor(
    cloud: &PointCloud,
    tau: f64,
    up_axis: usize,
    depth_axis: usize,
) -> Result<FloorPlane> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::invalid(format!("tau must be in (0, 1), got {tau}")));
    }
    validate_axes(up_axis, depth_axis)?;
    let samples: Vec<(f64, f64)> = cloud
        .points()
        .iter()
        .map(|p| (p[depth_axis], p[up_axis]))
        .collect();
    let (slope, intercept, loss) = fit_line(&samples, tau)?;
    Ok(FloorPlane {
        slope,
        intercept,
        up_axis,
        depth_axis,
        tau,
        pinball_loss: loss,
    })
}

/// Exact pinball-loss line fit on `(x, y)` samples; returns `(slope, intercept, loss)`.
pub fn fit_line(samples: &[(f64, f64)], tau: f64) -> Result<(f64, f64, f64)> {
    let d0 = samples
        .first()
        .ok_or_else(|| Error::EmptyData("no samples".into()))?
        .0;
    if samples.iter().all(|s| s.0 == d0) {
        return Err(Error::SingularFit("all depth coordinates are equal".into()));
    }
    let scale = samples
        .iter()
        .map(|s| s.0.abs().max(s.1.abs()))
        .fold(1.0, f64::max);

    // start from the sample at the τ-quantile of height
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&a, &b| samples[a].1.total_cmp(&samples[b].1).then(a.cmp(&b)));
    let mut pivot = order[((samples.len() - 1) as f64 * tau).round() as usize];

    let first = best_rotation(samples, pivot, tau)
        .ok_or_else(|| Error::SingularFit("pivot shares depth with every sample".into()))?;
    let mut slope = first.slope;
    let mut intercept = samples[pivot].1 - slope * samples[pivot].0;
    let mut loss = first.loss;
    let mut next = first.through;
    let improves = |new: f64, old: f64| new < old - 1e-14 * (1.0 + old.abs());

    for _ in 0..10_000 {
        let mut moved = false;
        if let Some(r) = best_rotation(samples, next, tau) {
            if improves(r.loss, loss) {
                pivot = next;
                slope = r.slope;
                intercept = samples[pivot].1 - slope * samples[pivot].0;
                loss = r.loss;
                next = r.through;
                moved = true;
            }
        }
        if !moved {
            // degenerate vertices: try every other sample lying on the line
            let tol = 1e-12 * scale;
            for (j, &(d, h)) in samples.iter().enumerate() {
                if j == pivot || j == next || (h - (slope * d + intercept)).abs() > tol {
                    continue;
                }
                if let Some(r) = best_rotation(samples, j, tau) {
                    if improves(r.loss, loss) {
                        pivot = j;
                        slope = r.slope;
                        intercept = samples[pivot].1 - slope * samples[pivot].0;
                        loss = r.loss;
                        next = r.through;
                        moved = true;
                        break;
                    }
                }
            }
        }
        if !moved {
            return Ok((slope, intercept, loss));
        }
    }
    Err(Error::SingularFit(
        "quantile regression did not converge".into(),
    ))
}

/// Signed height of `p` above the floor, positive above.
pub fn height_above_floor(p: Vec3, plane: &FloorPlane) -> f64 {
    p[plane.up_axis] - plane.floor_at(p[plane.depth_axis])
}

/// Linear-interpolation percentile (`pct` in 0..=100) of unsorted values.
pub fn percentile(values: &[f64], pct: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = (pct / 100.0).clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

/// Standing body height: 95th percentile over frames of the head's height above the floor.
pub fn body_height(seq: &JointSequence, plane: &FloorPlane) -> Result<f64> {
    plane.validate()?;
    let heights: Vec<f64> = seq
        .role_track(Role::Head)?
        .into_iter()
        .map(|p| height_above_floor(p, plane))
        .collect();
    Ok(percentile(&heights, BODY_HEIGHT_PERCENTILE))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cloud_on_line(n: usize, slope: f64, intercept: f64) -> Vec<Vec3> {
        (0..n)
            .map(|i| {
                let d = -2.0 + 4.0 * i as f64 / (n - 1) as f64;
                [0.37 * i as f64 % 1.0, slope * d + intercept, d]
            })
            .collect()
    }

    #[test]
    fn exact_line_is_recovered() {
        let cloud = PointCloud::new(cloud_on_line(100, 0.1, 0.5)).unwrap();
        let f = fit_floor(&cloud, 0.05, 1, 2).unwrap();
        assert!((f.slope - 0.1).abs() < 1e-6);
        assert!((f.intercept - 0.5).abs() < 1e-6);
        assert!(f.pinball_loss < 1e-9);
    }

    #[test]
    fn body_points_above_floor_are_ignored() {
        let mut pts = cloud_on_line(100, 0.1, 0.5);
        for i in 0..50 {
            let d = -0.5 + i as f64 / 49.0;
            pts.push([0.0, 0.1 * d + 0.5 + 1.0, d]);
        }
        let f = fit_floor(&PointCloud::new(pts).unwrap(), 0.05, 1, 2).unwrap();
        assert!((f.slope - 0.1).abs() < 1e-3);
        assert!((f.intercept - 0.5).abs() < 1e-3);
    }

    #[test]
    fn small_or_degenerate_clouds_are_rejected() {
        assert!(PointCloud::new(vec![[0.0; 3]; 5]).is_err());
        let flat_depth: Vec<Vec3> = (0..20).map(|i| [i as f64, i as f64 * 0.1, 3.0]).collect();
        let cloud = PointCloud::new(flat_depth).unwrap();
        assert!(matches!(
            fit_floor(&cloud, 0.05, 1, 2),
            Err(Error::SingularFit(_))
        ));
        let ok = PointCloud::new(cloud_on_line(20, 0.0, 0.0)).unwrap();
        assert!(fit_floor(&ok, 0.0, 1, 2).is_err());
        assert!(fit_floor(&ok, 0.5, 1, 1).is_err());
    }

    #[test]
    fn heights() {
        let flat = FloorPlane::flat(1, 2).unwrap();
        assert!((height_above_floor([1.0, 0.7, 3.0], &flat) - 0.7).abs() < 1e-15);
        let tilted = FloorPlane {
            slope: 0.1,
            intercept: 0.5,
            ..flat
        };
        assert!((height_above_floor([0.0, 1.0, 2.0], &tilted) - 0.3).abs() < 1e-12);
        assert!(height_above_floor([9.0, 0.1 * -4.0 + 0.5, -4.0], &tilted).abs() < 1e-12);
    }

    #[test]
    fn percentile_interpolates() {
        let v: Vec<f64> = (0..=10).map(f64::from).collect();
        assert_eq!(percentile(&v, 50.0), 5.0);
        assert!((percentile(&v, 95.0) - 9.5).abs() < 1e-12);
    }
}
