use serde::{Deserialize, Serialize};

/// Numerical thresholds shared by all checks.
///
/// Quantities with units are applied relative to a length scale of the input
/// (bounding-box diagonal or the relevant edge length), so verdicts do not
/// change under uniform scaling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Triangle area over squared longest edge.
    pub area: f64,
    /// Simplex volume over cubed length scale.
    pub vol: f64,
    /// Hull distances, times the bounding-box diagonal.
    pub hull: f64,
    /// Angles, radians.
    pub angle: f64,
    /// Relative mismatch allowed between volume sums / area sums.
    pub rel: f64,
    /// Projected side length over intrinsic length.
    pub len: f64,
    /// Minimum vertical component of a unit upper-face normal.
    pub normal: f64,
    /// Singular value cut, relative to the largest one.
    pub rank: f64,
    /// Eigenvalue cut, relative to the matrix scale.
    pub eig: f64,
    /// Symmetry defect, relative to the largest entry.
    pub sym: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            area: 1e-10,
            vol: 1e-12,
            hull: 1e-9,
            angle: 1e-9,
            rel: 1e-9,
            len: 1e-9,
            normal: 1e-9,
            rank: 1e-8,
            eig: 1e-8,
            sym: 1e-7,
        }
    }
}
