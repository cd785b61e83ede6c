//! Slow, direct implementations used to cross-check the fast algorithms.
//! Each one enumerates candidates exhaustively instead of searching.

use crate::floor::line_loss;
use crate::geom::{cross, dot, norm, sub};
use crate::motion::Vec3;

/// Convex hull volume by facet enumeration.
///
/// Every plane through three input points that has all points on one side
/// supports a hull face. Points on each distinct supporting plane are
/// reduced to their 2D hull, and the volume is the sum of the pyramids
/// from an interior point to each face polygon. O(n⁴).
pub fn hull_volume_facets(points: &[Vec3]) -> f64 {
    let n = points.len();
    if n < 4 {
        return 0.0;
    }
    let scale = points
        .iter()
        .flat_map(|p| p.iter())
        .fold(1.0f64, |m, c| m.max(c.abs()));
    let eps = 1e-10 * scale;
    let centroid = {
        let mut c = [0.0; 3];
        for p in points {
            for k in 0..3 {
                c[k] += p[k] / n as f64;
            }
        }
        c
    };

    let mut planes: Vec<(Vec3, f64)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let nrm = cross(sub(points[j], points[i]), sub(points[k], points[i]));
                let len = norm(nrm);
                if len <= eps * scale {
                    continue;
                }
                let mut u = nrm.map(|c| c / len);
                let mut off = dot(u, points[i]);
                let (mut above, mut below) = (false, false);
                for p in points {
                    let d = dot(u, *p) - off;
                    above |= d > eps;
                    below |= d < -eps;
                }
                if above && below {
                    continue;
                }
                if above {
                    u = u.map(|c| -c);
                    off = -off;
                }
                let seen = planes
                    .iter()
                    .any(|(v, o)| (dot(*v, u) - 1.0).abs() < 1e-9 && (o - off).abs() < eps * 10.0);
                if !seen {
                    planes.push((u, off));
                }
            }
        }
    }
    if planes.is_empty() {
        return 0.0;
    }

    let mut volume = 0.0;
    for (u, off) in planes {
        let on: Vec<Vec3> = points
            .iter()
            .copied()
            .filter(|p| (dot(u, *p) - off).abs() <= eps)
            .collect();
        // orthonormal basis of the plane
        let helper = if u[0].abs() < 0.9 {
            [1.0, 0.0, 0.0]
        } else {
            [0.0, 1.0, 0.0]
        };
        let e1 = {
            let c = cross(u, helper);
            let l = norm(c);
            c.map(|x| x / l)
        };
        let e2 = cross(u, e1);
        let flat: Vec<(f64, f64)> = on.iter().map(|p| (dot(*p, e1), dot(*p, e2))).collect();
        let area = polygon_area(&convex_hull_2d(flat));
        let height = off - dot(u, centroid);
        volume += area * height / 3.0;
    }
    volume
}

/// Andrew's monotone chain; returns the hull in counter-clockwise order.
fn convex_hull_2d(mut pts: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let turn = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && turn(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && turn(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn polygon_area(poly: &[(f64, f64)]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut a = 0.0;
    for i in 0..poly.len() {
        let (x0, y0) = poly[i];
        let (x1, y1) = poly[(i + 1) % poly.len()];
        a += x0 * y1 - x1 * y0;
    }
    a.abs() / 2.0
}

/// Best pinball-loss line among all lines through two samples with
/// distinct `x`. Some optimum always passes through two samples, so this
/// is the exact minimum. O(n³). Returns `(slope, intercept, loss)`, or
/// `None` when every sample shares one `x`.
pub fn quantile_line_by_pairs(samples: &[(f64, f64)], tau: f64) -> Option<(f64, f64, f64)> {
    let mut best: Option<(f64, f64, f64)> = None;
    for i in 0..samples.len() {
        for j in i + 1..samples.len() {
            let (xi, yi) = samples[i];
            let (xj, yj) = samples[j];
            if xi == xj {
                continue;
            }
            let slope = (yj - yi) / (xj - xi);
            let intercept = yi - slope * xi;
            let loss = line_loss(samples, slope, intercept, tau);
            if best.is_none_or(|b| loss < b.2) {
                best = Some((slope, intercept, loss));
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_shapes() {
        let tetra = [
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
        ];
        assert!((hull_volume_facets(&tetra) - 1.0 / 6.0).abs() < 1e-15);
        let mut cube = Vec::new();
        for i in 0..8 {
            cube.push([(i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64]);
        }
        cube.push([0.5, 0.5, 0.5]);
        cube.push([0.5, 0.0, 0.5]);
        assert!((hull_volume_facets(&cube) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn pairs_on_exact_line() {
        let samples: Vec<(f64, f64)> = (0..20).map(|i| (i as f64, 0.5 * i as f64 + 1.0)).collect();
        let (m, b, loss) = quantile_line_by_pairs(&samples, 0.1).unwrap();
        assert!((m - 0.5).abs() < 1e-12 && (b - 1.0).abs() < 1e-12 && loss < 1e-12);
    }
}
