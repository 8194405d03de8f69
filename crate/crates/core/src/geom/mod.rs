//! Metric and predicate kernel: simplices from edge lengths, convex hulls and
//! vertical projections of triangles.

mod hull;
mod projected;
mod simplex;

pub use hull::{convex_hull_3d, distance_outside_hull, ConvexHull};
pub use projected::{quad_projection_check, ProjectedTriangle, QuadReason, QuadVerdict};
pub use simplex::{dihedral_angle_complex, SimplexLengths};

use crate::Vec3;

/// Diagonal of the axis-aligned bounding box of `points`.
pub fn bbox_diagonal(points: &[Vec3]) -> f64 {
    let mut lo = Vec3::repeat(f64::INFINITY);
    let mut hi = Vec3::repeat(f64::NEG_INFINITY);
    for p in points {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    if points.is_empty() {
        0.0
    } else {
        (hi - lo).norm()
    }
}

/// Signed volume of the tetrahedron `(a, b, c, d)`, positive when
/// `(b - a, c - a, d - a)` is a positively oriented frame.
pub fn signed_volume(a: &Vec3, b: &Vec3, c: &Vec3, d: &Vec3) -> f64 {
    (b - a).cross(&(c - a)).dot(&(d - a)) / 6.0
}

/// Area of the triangle `(a, b, c)`.
pub fn triangle_area(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    0.5 * (b - a).cross(&(c - a)).norm()
}
