use serde::{Deserialize, Serialize};

use super::TriMesh;
use crate::geom::{bbox_diagonal, distance_outside_hull};
use crate::{Tolerances, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Convexity {
    WeaklyConvex,
    /// `witness` is the first vertex (by index) that is not an extreme point.
    Not {
        witness: usize,
        margin: f64,
    },
}

impl Convexity {
    pub fn is_weakly_convex(&self) -> bool {
        matches!(self, Convexity::WeaklyConvex)
    }
}

/// True when every point lies outside the hull of the others by more than
/// `tol.hull × diagonal`; otherwise the first failing index and its margin.
pub(crate) fn all_extreme(points: &[Vec3], tol: &Tolerances) -> Result<(), (usize, f64)> {
    let eps = tol.hull * bbox_diagonal(points);
    for i in 0..points.len() {
        let others: Vec<Vec3> = points.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, p)| *p).collect();
        let d = distance_outside_hull(&points[i], &others, tol);
        if d <= eps {
            return Err((i, d));
        }
    }
    Ok(())
}

/// Decides whether every vertex of `mesh` is an extreme point of the convex
/// hull of the vertex set.
pub fn weak_convexity_check(mesh: &TriMesh, tol: &Tolerances) -> Convexity {
    match all_extreme(mesh.vertices(), tol) {
        Ok(()) => Convexity::WeaklyConvex,
        Err((witness, margin)) => Convexity::Not { witness, margin },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    #[test]
    fn octahedron_is_weakly_convex() {
        let m = gallery::octahedron();
        assert_eq!(weak_convexity_check(&m, &Tolerances::default()), Convexity::WeaklyConvex);
    }

    #[test]
    fn face_centroid_is_witness() {
        let m = gallery::flat_vertex_tetra();
        match weak_convexity_check(&m, &Tolerances::default()) {
            Convexity::Not { witness, .. } => assert_eq!(witness, 4),
            c => panic!("unexpected {c:?}"),
        }
    }
}
