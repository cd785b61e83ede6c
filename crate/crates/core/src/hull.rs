//! 3D convex hull (quickhull) and hull volume.

use std::collections::{HashMap, VecDeque};

use crate::geom::{cross, dot, norm, sub};
use crate::motion::Vec3;

#[derive(Clone, Debug)]
struct Face {
    v: [usize; 3],
    normal: Vec3,
    offset: f64,
    outside: Vec<usize>,
    alive: bool,
}

impl Face {
    fn new(points: &[Vec3], v: [usize; 3]) -> Self {
        let n = cross(
            sub(points[v[1]], points[v[0]]),
            sub(points[v[2]], points[v[0]]),
        );
        let len = norm(n);
        let normal = if len > 0.0 {
            n.map(|c| c / len)
        } else {
            [0.0; 3]
        };
        Self {
            v,
            normal,
            offset: dot(normal, points[v[0]]),
            outside: Vec::new(),
            alive: true,
        }
    }

    fn distance(&self, p: Vec3) -> f64 {
        dot(self.normal, p) - self.offset
    }

    fn edges(&self) -> [(usize, usize); 3] {
        [
            (self.v[0], self.v[1]),
            (self.v[1], self.v[2]),
            (self.v[2], self.v[0]),
        ]
    }
}

/// Triangulated convex hull with outward-oriented faces.
#[derive(Clone, Debug, Default)]
pub struct ConvexHull {
    pub faces: Vec<[usize; 3]>,
    pub volume: f64,
}

fn tetra_volume(a: Vec3, b: Vec3, c: Vec3, d: Vec3) -> f64 {
    dot(sub(b, a), cross(sub(c, a), sub(d, a))) / 6.0
}

/// Computes the hull of `points`. Degenerate inputs (fewer than four points,
/// or all points collinear or coplanar within tolerance) yield an empty hull
/// of volume 0.
pub fn convex_hull(points: &[Vec3]) -> ConvexHull {
    if points.len() < 4 {
        return ConvexHull::default();
    }
    let extent = points
        .iter()
        .flat_map(|p| p.iter())
        .fold(0.0f64, |m, c| m.max(c.abs()));
    let span = {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in points {
            for k in 0..3 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (0..3).map(|k| hi[k] - lo[k]).fold(0.0, f64::max)
    };
    if span == 0.0 {
        return ConvexHull::default();
    }
    let eps = 1e-12 * extent.max(span);

    let Some(seed) = initial_simplex(points, eps) else {
        return ConvexHull::default();
    };
    let interior = seed
        .iter()
        .fold([0.0; 3], |acc, &i| {
            [
                acc[0] + points[i][0],
                acc[1] + points[i][1],
                acc[2] + points[i][2],
            ]
        })
        .map(|c| c / 4.0);

    let [a, b, c, d] = seed;
    let mut faces: Vec<Face> = Vec::new();
    for tri in [[a, b, c], [a, b, d], [a, c, d], [b, c, d]] {
        let mut f = Face::new(points, tri);
        if f.distance(interior) > 0.0 {
            f = Face::new(points, [tri[0], tri[2], tri[1]]);
        }
        faces.push(f);
    }
    for (i, p) in points.iter().enumerate() {
        if seed.contains(&i) {
            continue;
        }
        assign(&mut faces, 0..4, i, *p, eps);
    }

    let mut edge_owner: HashMap<(usize, usize), usize> = HashMap::new();
    for (fi, f) in faces.iter().enumerate() {
        for e in f.edges() {
            edge_owner.insert(e, fi);
        }
    }

    while let Some(fi) = faces.iter().position(|f| f.alive && !f.outside.is_empty()) {
        let apex = *faces[fi]
            .outside
            .iter()
            .max_by(|&&x, &&y| {
                faces[fi]
                    .distance(points[x])
                    .total_cmp(&faces[fi].distance(points[y]))
                    .then(y.cmp(&x))
            })
            .expect("non-empty outside set");
        let p = points[apex];

        // connected region of faces that see the apex
        let mut visible = vec![fi];
        let mut seen: HashMap<usize, bool> = HashMap::from([(fi, true)]);
        let mut queue = VecDeque::from([fi]);
        let mut horizon: Vec<(usize, usize)> = Vec::new();
        while let Some(cur) = queue.pop_front() {
            for (u, v) in faces[cur].edges() {
                let nb = edge_owner[&(v, u)];
                let vis = *seen
                    .entry(nb)
                    .or_insert_with(|| faces[nb].distance(p) > eps);
                if vis {
                    if !visible.contains(&nb) {
                        visible.push(nb);
                        queue.push_back(nb);
                    }
                } else {
                    horizon.push((u, v));
                }
            }
        }

        let mut orphans = Vec::new();
        for &vf in &visible {
            faces[vf].alive = false;
            orphans.append(&mut faces[vf].outside);
            for e in faces[vf].edges() {
                edge_owner.remove(&e);
            }
        }
        let first_new = faces.len();
        for (u, v) in horizon {
            let f = Face::new(points, [u, v, apex]);
            let id = faces.len();
            for e in f.edges() {
                edge_owner.insert(e, id);
            }
            faces.push(f);
        }
        for o in orphans {
            if o != apex {
                let end = faces.len();
                assign(&mut faces, first_new..end, o, points[o], eps);
            }
        }
    }

    let alive: Vec<[usize; 3]> = faces.iter().filter(|f| f.alive).map(|f| f.v).collect();
    let volume = alive
        .iter()
        .map(|t| tetra_volume(interior, points[t[0]], points[t[1]], points[t[2]]))
        .sum::<f64>()
        .max(0.0);
    ConvexHull {
        faces: alive,
        volume,
    }
}

fn assign(faces: &mut [Face], range: std::ops::Range<usize>, i: usize, p: Vec3, eps: f64) {
    let mut best: Option<(usize, f64)> = None;
    for fi in range {
        let d = faces[fi].distance(p);
        if d > eps && best.is_none_or(|(_, bd)| d > bd) {
            best = Some((fi, d));
        }
    }
    if let Some((fi, _)) = best {
        faces[fi].outside.push(i);
    }
}

/// Four affinely independent points, or `None` when the set is flat.
fn initial_simplex(points: &[Vec3], eps: f64) -> Option<[usize; 4]> {
    // extreme pair along the widest axis
    let mut best = (0, 0, 0.0);
    for k in 0..3 {
        let lo = (0..points.len()).min_by(|&a, &b| points[a][k].total_cmp(&points[b][k]))?;
        let hi = (0..points.len()).max_by(|&a, &b| points[a][k].total_cmp(&points[b][k]))?;
        let span = points[hi][k] - points[lo][k];
        if span > best.2 {
            best = (lo, hi, span);
        }
    }
    let (i0, i1, _) = best;
    let axis = sub(points[i1], points[i0]);
    let axis_len = norm(axis);
    if axis_len <= eps {
        return None;
    }

    let line_dist = |p: Vec3| norm(cross(axis, sub(p, points[i0]))) / axis_len;
    let i2 =
        (0..points.len()).max_by(|&a, &b| line_dist(points[a]).total_cmp(&line_dist(points[b])))?;
    if line_dist(points[i2]) <= eps {
        return None;
    }

    let n = cross(axis, sub(points[i2], points[i0]));
    let n_len = norm(n);
    let plane_dist = |p: Vec3| (dot(n, sub(p, points[i0])) / n_len).abs();
    let i3 = (0..points.len())
        .max_by(|&a, &b| plane_dist(points[a]).total_cmp(&plane_dist(points[b])))?;
    if plane_dist(points[i3]) <= eps {
        return None;
    }
    Some([i0, i1, i2, i3])
}

/// Volume of the convex hull of `points`, 0 for flat sets.
pub fn hull_volume(points: &[Vec3]) -> f64 {
    convex_hull(points).volume
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_tetrahedron() {
        let pts = [
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
        ];
        assert!((hull_volume(&pts) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn unit_cube_with_interior_points() {
        let mut pts = Vec::new();
        for x in [0.0, 1.0] {
            for y in [0.0, 1.0] {
                for z in [0.0, 1.0] {
                    pts.push([x, y, z]);
                }
            }
        }
        assert!((hull_volume(&pts) - 1.0).abs() < 1e-12);
        pts.push([0.5, 0.5, 0.5]);
        pts.push([0.5, 0.5, 1.0]);
        let h = convex_hull(&pts);
        assert!((h.volume - 1.0).abs() < 1e-12);
        assert!(!h.faces.iter().flatten().any(|&i| i == 8));
    }

    #[test]
    fn flat_sets_have_zero_volume() {
        let square = [
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [1.0, 1.0, 0.0],
            [0.5, 0.2, 0.0],
        ];
        assert_eq!(hull_volume(&square), 0.0);
        let line: Vec<Vec3> = (0..6).map(|i| [i as f64, 2.0 * i as f64, 0.0]).collect();
        assert_eq!(hull_volume(&line), 0.0);
        assert_eq!(hull_volume(&[[1.0; 3]; 7]), 0.0);
        assert_eq!(hull_volume(&[[0.0; 3], [1.0, 0.0, 0.0]]), 0.0);
    }
}
