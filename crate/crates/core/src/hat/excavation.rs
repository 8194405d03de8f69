use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::Hat;
use crate::geom::{quad_projection_check, ProjectedTriangle};
use crate::mesh::ordered;
use crate::spectral::jacobian_fd;
use crate::{CurvatureMatrix, Error, Result, Tolerances, TriMesh, Vec3};

/// A simplex whose upper and lower pairs of faces both project onto the same
/// convex quadrilateral, with the height Jacobian `M_S` of the lower-minus-
/// upper angle sums.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcavationStep {
    pub vertices: [usize; 4],
    pub upper: (usize, usize),
    pub lower: (usize, usize),
    /// Labelled by `vertices`.
    pub m_s: CurvatureMatrix,
}

impl ExcavationStep {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.m_s.eigenvalues
    }

    /// One positive eigenvalue, three within `tol.eig × λ_max` of zero.
    pub fn is_rank_one_psd(&self) -> bool {
        let s = self.m_s.signature;
        s.positive == 1 && s.zero == 3 && s.negative == 0
    }

    /// `M_S` placed at the rows of `labels`; vertices not listed are dropped.
    pub fn scatter(&self, labels: &[usize]) -> DMatrix<f64> {
        let n = labels.len();
        let mut out = DMatrix::zeros(n, n);
        let pos: Vec<Option<usize>> = self.vertices.iter().map(|v| labels.iter().position(|l| l == v)).collect();
        for a in 0..4 {
            for b in 0..4 {
                if let (Some(i), Some(j)) = (pos[a], pos[b]) {
                    out[(i, j)] += self.m_s.get(a, b);
                }
            }
        }
        out
    }

    fn relabel(mut self, vertices: [usize; 4]) -> Self {
        let map = |k: usize| vertices[k];
        self.upper = (map(self.upper.0), map(self.upper.1));
        self.lower = (map(self.lower.0), map(self.lower.1));
        self.m_s.labels = vertices.to_vec();
        self.vertices = vertices;
        self
    }
}

/// Builds `M_S` for the simplex on `points`; `upper` and `lower` are the
/// local index pairs of the two diagonals. Vertices are labelled `0..4`.
pub fn compute_m_s(
    points: &[Vec3; 4],
    upper: (usize, usize),
    lower: (usize, usize),
    tol: &Tolerances,
) -> Result<ExcavationStep> {
    let verdict = quad_projection_check(points, upper, lower, tol);
    let crossing = match (verdict.ok, verdict.crossing) {
        (true, Some(c)) => c,
        _ => {
            return Err(Error::InvalidFlip(
                upper.0,
                upper.1,
                format!("projection is not a convex quadrilateral with these diagonals: {:?}", verdict.reason),
            ))
        }
    };
    let height_at = |(i, j): (usize, usize)| {
        let (a, b) = (points[i], points[j]);
        let d = nalgebra::Vector2::new(b.x - a.x, b.y - a.y);
        let s = (nalgebra::Vector2::new(crossing[0] - a.x, crossing[1] - a.y)).dot(&d) / d.norm_squared();
        a.z + s * (b.z - a.z)
    };
    let scale =
        (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).map(|(i, j)| (points[i] - points[j]).norm()).sum::<f64>()
            / 6.0;
    let gap = height_at(upper) - height_at(lower);
    if gap <= tol.hull * scale {
        return Err(Error::InvalidFlip(
            upper.0,
            upper.1,
            format!("upper diagonal is not above the lower one (gap {gap:e})"),
        ));
    }

    let (a, b) = upper;
    let (c, d) = lower;
    let upper_faces = [[a, b, c], [a, b, d]];
    let lower_faces = [[c, d, a], [c, d, b]];
    let side = |t: [usize; 3]| -> [f64; 3] {
        [
            (points[t[1]] - points[t[2]]).norm(),
            (points[t[2]] - points[t[0]]).norm(),
            (points[t[0]] - points[t[1]]).norm(),
        ]
    };
    let angle_sums = |faces: &[[usize; 3]; 2], h: &[f64]| -> Result<[f64; 4]> {
        let mut out = [0.0; 4];
        for t in faces {
            let pt = ProjectedTriangle::new(side(*t), t.map(|v| h[v]));
            for (k, &v) in t.iter().enumerate() {
                out[v] += pt.projected_angle(k, tol)?;
            }
        }
        Ok(out)
    };
    let h0: Vec<f64> = points.iter().map(|p| p.z).collect();
    let defect = |h: &[f64]| -> Result<Vec<f64>> {
        let lo = angle_sums(&lower_faces, h)?;
        let up = angle_sums(&upper_faces, h)?;
        Ok((0..4).map(|k| lo[k] - up[k]).collect())
    };
    let jac = jacobian_fd(defect, &h0, &[super::HEIGHT_STEP * scale; 4])?;
    Ok(ExcavationStep {
        vertices: [0, 1, 2, 3],
        upper,
        lower,
        m_s: CurvatureMatrix::from_matrix(vec![0, 1, 2, 3], &jac, 0.0, tol),
    })
}

/// Replaces the faces `(a, b, c)` and `(b, a, d)` by `(c, a, d)` and
/// `(d, b, c)`. `excavating` selects which side of the simplex is removed.
fn flip(hat: &Hat, edge: (usize, usize), excavating: bool) -> Result<(Hat, ExcavationStep)> {
    let (ea, eb) = ordered(edge.0, edge.1);
    let bad = |msg: String| Error::InvalidFlip(ea, eb, msg);
    let ((a, b), c, d) = hat
        .interior_edges()
        .into_iter()
        .find(|(e, _, _)| *e == (ea, eb))
        .ok_or_else(|| bad("not an interior edge".into()))?;
    if hat.mesh.edges().binary_search(&ordered(c, d)).is_ok() {
        return Err(bad(format!("diagonal ({c}, {d}) already exists")));
    }
    let concavity = hat.concavity(a, b, c, d);
    let tol = hat.tol;
    if excavating && concavity >= -tol.angle {
        return Err(bad(format!("edge is not convex (concavity {concavity:e})")));
    }
    if !excavating && concavity <= tol.angle {
        return Err(bad(format!("edge is not concave (concavity {concavity:e})")));
    }
    let p = hat.mesh.vertices();
    let (labels, upper) = if excavating { ([a, b, c, d], (a, b)) } else { ([c, d, a, b], (c, d)) };
    let step =
        compute_m_s(&labels.map(|v| p[v]), (0, 1), (2, 3), &tol).map_err(|e| bad(e.to_string()))?.relabel(labels);
    debug_assert_eq!(step.upper, upper);

    let mut triangles = hat.mesh.triangles().to_vec();
    let has = |t: &[usize; 3], x: usize, y: usize| (0..3).any(|k| t[k] == x && t[(k + 1) % 3] == y);
    let f1 = triangles.iter().position(|t| has(t, a, b)).expect("face (a, b, c)");
    let f2 = triangles.iter().position(|t| has(t, b, a)).expect("face (b, a, d)");
    triangles[f1] = [c, a, d];
    triangles[f2] = [d, b, c];
    let mesh = TriMesh::new(p.to_vec(), triangles, &tol).map_err(|e| bad(e.to_string()))?;
    let new_hat = Hat::new(mesh, &tol).map_err(|e| bad(e.to_string()))?;
    Ok((new_hat, step))
}

/// Removes the simplex below the convex interior edge `edge`, flipping it to
/// the other diagonal of its quadrilateral.
pub fn excavate(hat: &Hat, edge: (usize, usize)) -> Result<(Hat, ExcavationStep)> {
    flip(hat, edge, true)
}

/// Glues the simplex above the concave interior edge `edge`, flipping it to
/// the other diagonal of its quadrilateral.
pub fn glue(hat: &Hat, edge: (usize, usize)) -> Result<(Hat, ExcavationStep)> {
    flip(hat, edge, false)
}

/// A convex hat reached by gluing simplices, with the steps in order.
#[derive(Debug, Clone)]
pub struct Completion {
    pub hat: Hat,
    pub steps: Vec<ExcavationStep>,
}

/// Glues simplices on concave edges until the hat is convex, taking the most
/// concave edge first (ties to the smallest vertex pair).
pub fn complete(hat: &Hat) -> Result<Completion> {
    let n = hat.mesh.num_vertices() as u64;
    let bound = (n * n.saturating_sub(1) * n.saturating_sub(2) * n.saturating_sub(3) / 24).max(1);
    let tol = hat.tol;
    let mut current = hat.clone();
    let mut steps = Vec::new();
    loop {
        let mut concave: Vec<((usize, usize), f64)> = current
            .interior_edges()
            .into_iter()
            .map(|((a, b), c, d)| ((a, b), current.concavity(a, b, c, d)))
            .filter(|&(_, x)| x > tol.angle)
            .collect();
        if concave.is_empty() {
            if current.is_convex() {
                return Ok(Completion { hat: current, steps });
            }
            return Err(Error::Stalled(format!(
                "no concave edge left but the hat is not convex after {} steps",
                steps.len()
            )));
        }
        if steps.len() as u64 >= bound {
            return Err(Error::Stalled(format!("step bound {bound} reached")));
        }
        concave.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));
        let mut glued = None;
        for &(e, _) in &concave {
            if let Ok(r) = glue(&current, e) {
                glued = Some(r);
                break;
            }
        }
        let Some((next, step)) = glued else {
            let edges: Vec<(usize, usize)> = concave.iter().map(|x| x.0).collect();
            return Err(Error::Stalled(format!("no concave edge can be glued: {edges:?}")));
        };
        current = next;
        steps.push(step);
    }
}
