use std::collections::HashSet;

use super::bbox_diagonal;
use crate::{Error, Result, Tolerances, Vec3};

#[derive(Debug, Clone)]
struct Facet {
    v: [usize; 3],
    normal: Vec3,
    offset: f64,
}

impl Facet {
    fn new(points: &[Vec3], v: [usize; 3]) -> Self {
        let n = (points[v[1]] - points[v[0]]).cross(&(points[v[2]] - points[v[0]]));
        let normal = n / n.norm();
        Self { v, normal, offset: normal.dot(&points[v[0]]) }
    }

    fn distance(&self, p: &Vec3) -> f64 {
        self.normal.dot(p) - self.offset
    }
}

/// Convex hull of a 3D point set: outward-oriented triangular facets and the
/// indices of the extreme points.
#[derive(Debug, Clone)]
pub struct ConvexHull {
    pub points: Vec<Vec3>,
    pub facets: Vec<[usize; 3]>,
    pub extreme: Vec<usize>,
    /// Absolute distance tolerance used for visibility tests.
    pub eps: f64,
    normals: Vec<(Vec3, f64)>,
}

impl ConvexHull {
    /// Largest signed distance from `p` to the facet planes; positive outside.
    pub fn signed_distance(&self, p: &Vec3) -> f64 {
        self.normals.iter().map(|(n, d)| n.dot(p) - d).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn facet_normal(&self, k: usize) -> Vec3 {
        self.normals[k].0
    }
}

fn initial_simplex(points: &[Vec3], eps: f64) -> Option<[usize; 4]> {
    let i0 = 0;
    let i1 = (1..points.len()).find(|&i| (points[i] - points[i0]).norm() > eps)?;
    let axis = (points[i1] - points[i0]).normalize();
    let i2 = (1..points.len()).find(|&i| (points[i] - points[i0]).cross(&axis).norm() > eps)?;
    let n = (points[i1] - points[i0]).cross(&(points[i2] - points[i0])).normalize();
    let i3 = (1..points.len()).find(|&i| n.dot(&(points[i] - points[i0])).abs() > eps)?;
    Some([i0, i1, i2, i3])
}

/// Incremental convex hull with tolerance-based visibility. Points are
/// inserted in input order after an initial simplex; points within
/// `tol.hull × diagonal` of the current hull are treated as inside.
pub fn convex_hull_3d(points: &[Vec3], tol: &Tolerances) -> Result<ConvexHull> {
    if points.len() < 4 {
        return Err(Error::DegenerateInput(format!("{} points, need at least 4", points.len())));
    }
    let eps = tol.hull * bbox_diagonal(points);
    let init = initial_simplex(points, eps).ok_or_else(|| Error::DegenerateInput("point set is coplanar".into()))?;
    let centroid = init.iter().map(|&i| points[i]).sum::<Vec3>() / 4.0;

    let mut facets: Vec<Facet> = Vec::new();
    for tri in [[0, 1, 2], [0, 3, 1], [1, 3, 2], [2, 3, 0]] {
        let mut v = tri.map(|k| init[k]);
        let mut f = Facet::new(points, v);
        if f.distance(&centroid) > 0.0 {
            v.swap(1, 2);
            f = Facet::new(points, v);
        }
        facets.push(f);
    }

    for (idx, p) in points.iter().enumerate() {
        if init.contains(&idx) {
            continue;
        }
        let visible: Vec<bool> = facets.iter().map(|f| f.distance(p) > eps).collect();
        if !visible.iter().any(|&v| v) {
            continue;
        }
        let mut visible_edges = HashSet::new();
        for (f, _) in facets.iter().zip(&visible).filter(|(_, &v)| v) {
            for k in 0..3 {
                visible_edges.insert((f.v[k], f.v[(k + 1) % 3]));
            }
        }
        let mut horizon = Vec::new();
        for (f, _) in facets.iter().zip(&visible).filter(|(_, &v)| v) {
            for k in 0..3 {
                let (a, b) = (f.v[k], f.v[(k + 1) % 3]);
                if !visible_edges.contains(&(b, a)) {
                    horizon.push((a, b));
                }
            }
        }
        let mut next: Vec<Facet> = facets.into_iter().zip(&visible).filter(|(_, &v)| !v).map(|(f, _)| f).collect();
        next.extend(horizon.into_iter().map(|(a, b)| Facet::new(points, [a, b, idx])));
        facets = next;
    }

    let mut extreme: Vec<usize> = facets.iter().flat_map(|f| f.v).collect();
    extreme.sort_unstable();
    extreme.dedup();
    Ok(ConvexHull {
        points: points.to_vec(),
        normals: facets.iter().map(|f| (f.normal, f.offset)).collect(),
        facets: facets.iter().map(|f| f.v).collect(),
        extreme,
        eps,
    })
}

/// How far `p` lies outside the convex hull of `others` (positive outside).
///
/// For a full-dimensional set this is the largest facet-plane distance. If
/// `others` spans only a plane (or less), the distance to that affine hull is
/// returned when `p` is off it; a point in the affine hull counts as inside.
pub fn distance_outside_hull(p: &Vec3, others: &[Vec3], tol: &Tolerances) -> f64 {
    let mut all = others.to_vec();
    all.push(*p);
    let eps = tol.hull * bbox_diagonal(&all);
    if others.len() >= 4 && initial_simplex(others, eps).is_some() {
        if let Ok(h) = convex_hull_3d(others, tol) {
            return h.signed_distance(p);
        }
    }
    // lower-dimensional: distance to the affine span
    let o = others[0];
    let mut basis: Vec<Vec3> = Vec::new();
    for q in &others[1..] {
        let mut w = q - o;
        for b in &basis {
            w -= b * b.dot(&w);
        }
        if w.norm() > eps && basis.len() < 3 {
            basis.push(w.normalize());
        }
    }
    let mut w = p - o;
    for b in &basis {
        w -= b * b.dot(&w);
    }
    w.norm()
}
