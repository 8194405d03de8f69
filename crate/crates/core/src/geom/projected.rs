use serde::{Deserialize, Serialize};

use crate::{Error, Result, Tolerances, Vec3};

/// A triangle with fixed intrinsic side lengths whose vertices sit at given
/// heights; its shadow on `z = 0` has sides `sqrt(l² - Δh²)`.
///
/// `lengths[k]` is the side opposite corner `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectedTriangle {
    pub lengths: [f64; 3],
    pub heights: [f64; 3],
}

/// Area of a triangle from its sides (Kahan's stable Heron).
fn heron(a: f64, b: f64, c: f64) -> f64 {
    let mut s = [a, b, c];
    s.sort_by(|x, y| y.total_cmp(x));
    let [a, b, c] = s;
    let p = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    0.25 * p.max(0.0).sqrt()
}

impl ProjectedTriangle {
    pub fn new(lengths: [f64; 3], heights: [f64; 3]) -> Self {
        Self { lengths, heights }
    }

    /// Projected side lengths, opposite-corner indexed.
    pub fn projected_sides(&self, tol: &Tolerances) -> Result<[f64; 3]> {
        let mut out = [0.0; 3];
        for k in 0..3 {
            let dh = self.heights[(k + 1) % 3] - self.heights[(k + 2) % 3];
            let l = self.lengths[k];
            let sq = (l - dh) * (l + dh);
            let floor = tol.len * l;
            if !(sq > floor * floor) {
                return Err(Error::ProjectionCollapse(format!("side opposite corner {k}: l = {l}, dh = {dh}")));
            }
            out[k] = sq.sqrt();
        }
        let [a, b, c] = out;
        if a + b <= c || b + c <= a || a + c <= b {
            return Err(Error::ProjectionCollapse(format!("projected sides {out:?} violate the triangle inequality")));
        }
        Ok(out)
    }

    /// Angle of the projected triangle at `corner`.
    pub fn projected_angle(&self, corner: usize, tol: &Tolerances) -> Result<f64> {
        let s = self.projected_sides(tol)?;
        let opp = s[corner];
        let a = s[(corner + 1) % 3];
        let b = s[(corner + 2) % 3];
        let area = heron(s[0], s[1], s[2]);
        Ok((4.0 * area).atan2(a * a + b * b - opp * opp))
    }
}

/// Why four points fail the quadrilateral-projection test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuadReason {
    /// The two declared diagonals share a vertex.
    BadLabels,
    /// Two points have (numerically) the same horizontal projection.
    CoincidentProjection,
    /// Three projected points are collinear within tolerance.
    CollinearTriple,
    /// The projected diagonals do not cross.
    NotConvex,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadVerdict {
    pub ok: bool,
    pub crossing: Option<[f64; 2]>,
    pub reason: Option<QuadReason>,
}

impl QuadVerdict {
    fn fail(reason: QuadReason) -> Self {
        Self { ok: false, crossing: None, reason: Some(reason) }
    }
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

/// Tests whether the horizontal projections of four points form a convex
/// quadrilateral whose diagonals are the declared pairs, crossing strictly
/// inside. On success the crossing point is returned.
pub fn quad_projection_check(
    points: &[Vec3; 4],
    upper: (usize, usize),
    lower: (usize, usize),
    tol: &Tolerances,
) -> QuadVerdict {
    let mut labels = [upper.0, upper.1, lower.0, lower.1];
    labels.sort_unstable();
    if labels != [0, 1, 2, 3] {
        return QuadVerdict::fail(QuadReason::BadLabels);
    }
    let q: [[f64; 2]; 4] = points.map(|p| [p.x, p.y]);
    let scale = (0..4)
        .flat_map(|i| (0..4).map(move |j| (i, j)))
        .map(|(i, j)| ((q[i][0] - q[j][0]).powi(2) + (q[i][1] - q[j][1]).powi(2)).sqrt())
        .fold(0.0, f64::max);
    for i in 0..4 {
        for j in i + 1..4 {
            let d = ((q[i][0] - q[j][0]).powi(2) + (q[i][1] - q[j][1]).powi(2)).sqrt();
            if d <= tol.hull * scale || scale == 0.0 {
                return QuadVerdict::fail(QuadReason::CoincidentProjection);
            }
        }
    }
    let flat = tol.area * scale * scale;
    for t in [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]] {
        if orient(q[t[0]], q[t[1]], q[t[2]]).abs() <= flat {
            return QuadVerdict::fail(QuadReason::CollinearTriple);
        }
    }
    let (a, b) = (q[upper.0], q[upper.1]);
    let (c, d) = (q[lower.0], q[lower.1]);
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if o1 * o2 >= 0.0 || o3 * o4 >= 0.0 {
        return QuadVerdict::fail(QuadReason::NotConvex);
    }
    let t = o3 / (o3 - o4);
    QuadVerdict { ok: true, crossing: Some([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]), reason: None }
}
