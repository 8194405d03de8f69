//! Hats over the plane `z = 0`: upper surfaces with fixed edge lengths whose
//! vertices move vertically.

mod excavation;

pub use excavation::{complete, compute_m_s, excavate, glue, Completion, ExcavationStep};

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::geom::{bbox_diagonal, distance_outside_hull, ProjectedTriangle};
use crate::mesh::ordered;
use crate::spectral::jacobian_fd;
use crate::{CurvatureMatrix, Error, Result, Tolerances, TriMesh, Vec3};

/// Relative finite-difference step for heights, times the mean length of the
/// edges at the moved vertex.
pub const HEIGHT_STEP: f64 = 1e-5;

/// Disk-type upper surface in `z > 0` projecting injectively onto `z = 0`,
/// with every vertex extreme in the convex hull of its shadow.
#[derive(Debug, Clone)]
pub struct Hat {
    mesh: TriMesh,
    boundary: Vec<usize>,
    interior: Vec<usize>,
    lengths: BTreeMap<(usize, usize), f64>,
    convex: bool,
    tol: Tolerances,
}

impl Hat {
    /// Validates the hat invariants; intrinsic lengths are taken from the
    /// coordinates.
    pub fn new(mesh: TriMesh, tol: &Tolerances) -> Result<Self> {
        if mesh.is_closed() {
            return Err(Error::InvalidHat("upper surface must be a disk".into()));
        }
        let p = mesh.vertices();
        if let Some(v) = p.iter().position(|q| !(q.z > 0.0)) {
            return Err(Error::InvalidHat(format!("vertex {v} has non-positive height {}", p[v].z)));
        }
        for f in 0..mesh.triangles().len() {
            let nz = mesh.triangle_normal(f).z;
            if !(nz > tol.normal) {
                return Err(Error::InvalidHat(format!("face {f} has vertical normal component {nz}")));
            }
        }
        let boundary = mesh.boundary_loop();
        let face_area: f64 = mesh
            .triangles()
            .iter()
            .map(|t| {
                let [a, b, c] = t.map(|i| p[i]);
                0.5 * ((b - a).x * (c - a).y - (b - a).y * (c - a).x)
            })
            .sum();
        let n = boundary.len();
        let poly_area: f64 = (0..n)
            .map(|k| {
                let (a, b) = (p[boundary[k]], p[boundary[(k + 1) % n]]);
                0.5 * (a.x * b.y - a.y * b.x)
            })
            .sum();
        if (face_area - poly_area).abs() > tol.rel * poly_area.abs() {
            return Err(Error::InvalidHat(format!(
                "projection is not injective: face shadows cover {face_area}, boundary polygon {poly_area}"
            )));
        }

        let shadow = shadow_points(p);
        let eps = tol.hull * bbox_diagonal(&shadow);
        for i in 0..p.len() {
            let others: Vec<Vec3> = shadow.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, q)| *q).collect();
            let d = distance_outside_hull(&p[i], &others, tol);
            if d <= eps {
                return Err(Error::InvalidHat(format!("vertex {i} is not extreme in the shadow hull (margin {d:e})")));
            }
        }
        let convex = (0..mesh.triangles().len()).all(|f| {
            let nrm = mesh.triangle_normal(f);
            let a = p[mesh.triangles()[f][0]];
            shadow.iter().all(|q| (q - a).dot(&nrm) <= eps)
        });

        let on_boundary: Vec<bool> = (0..p.len()).map(|v| boundary.contains(&v)).collect();
        let interior = (0..p.len()).filter(|&v| !on_boundary[v]).collect();
        let lengths = mesh.edges().into_iter().map(|(a, b)| ((a, b), (p[a] - p[b]).norm())).collect();
        Ok(Self { mesh, boundary, interior, lengths, convex, tol: *tol })
    }

    pub fn mesh(&self) -> &TriMesh {
        &self.mesh
    }

    /// Boundary vertices in loop order.
    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    /// Interior vertices, ascending; these index Λ_G.
    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    pub fn is_convex(&self) -> bool {
        self.convex
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn heights(&self) -> Vec<f64> {
        self.mesh.vertices().iter().map(|v| v.z).collect()
    }

    /// Intrinsic length of the edge `(a, b)`.
    pub fn length(&self, a: usize, b: usize) -> Option<f64> {
        self.lengths.get(&ordered(a, b)).copied()
    }

    /// Edges shared by two faces, with the third vertices of the faces
    /// `(a, b, c)` and `(b, a, d)`.
    pub fn interior_edges(&self) -> Vec<((usize, usize), usize, usize)> {
        let tris = self.mesh.triangles();
        self.mesh
            .edge_faces()
            .into_iter()
            .filter(|(_, f)| f.len() == 2)
            .map(|((a, b), f)| {
                let third = |t: &[usize; 3], from: usize, to: usize| -> Option<usize> {
                    (0..3).find(|&k| t[k] == from && t[(k + 1) % 3] == to).map(|k| t[(k + 2) % 3])
                };
                let c = third(&tris[f[0]], a, b).or_else(|| third(&tris[f[1]], a, b)).expect("oriented");
                let d = third(&tris[f[0]], b, a).or_else(|| third(&tris[f[1]], b, a)).expect("oriented");
                ((a, b), c, d)
            })
            .collect()
    }

    /// Angles between the downward vertical half-plane at edge `(a, b)` and
    /// the two faces at it (through the vertices `c` and `d`).
    pub fn edge_angles(&self, a: usize, b: usize, c: usize, d: usize) -> (f64, f64) {
        let p = self.mesh.vertices();
        (angle_to_vertical(&p[a], &p[b], &p[c]), angle_to_vertical(&p[a], &p[b], &p[d]))
    }

    /// Dihedral angle of the shadow at an interior edge, minus π; positive on
    /// concave edges.
    pub fn concavity(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        let (x, y) = self.edge_angles(a, b, c, d);
        x + y - std::f64::consts::PI
    }

    pub fn generalized(&self) -> Result<GeneralizedHat> {
        GeneralizedHat::from_hat(self)
    }
}

/// Tops followed by their vertical projections.
fn shadow_points(p: &[Vec3]) -> Vec<Vec3> {
    p.iter().copied().chain(p.iter().map(|q| Vec3::new(q.x, q.y, 0.0))).collect()
}

/// Angle at edge `(a, b)` between the half-plane towards `k` and the
/// half-plane towards `-z`.
fn angle_to_vertical(a: &Vec3, b: &Vec3, k: &Vec3) -> f64 {
    let (ua, ub) = edge_perpendiculars(a, b, k);
    ua.cross(&ub).norm().atan2(ua.dot(&ub))
}

fn edge_perpendiculars(a: &Vec3, b: &Vec3, k: &Vec3) -> (Vec3, Vec3) {
    let e = (b - a).normalize();
    let w = k - a;
    let down = -Vec3::z();
    (w - e * e.dot(&w), down - e * e.dot(&down))
}

fn cot_to_vertical(a: &Vec3, b: &Vec3, k: &Vec3) -> f64 {
    let (ua, ub) = edge_perpendiculars(a, b, k);
    ua.dot(&ub) / ua.cross(&ub).norm()
}

/// Prisms over the faces of a hat glued along vertical edges, parametrized
/// by the vertex heights with the intrinsic face metrics frozen.
#[derive(Debug, Clone)]
pub struct GeneralizedHat {
    triangles: Vec<[usize; 3]>,
    /// Side lengths per face, opposite-corner indexed.
    side_lengths: Vec<[f64; 3]>,
    heights: Vec<f64>,
    interior: Vec<usize>,
    fixed: Vec<bool>,
    /// Faces and corners incident to each interior vertex.
    corners: Vec<Vec<(usize, usize)>>,
    steps: Vec<f64>,
    scale: f64,
    tol: Tolerances,
}

impl GeneralizedHat {
    pub fn from_hat(hat: &Hat) -> Result<Self> {
        let triangles = hat.mesh.triangles().to_vec();
        let side_lengths = triangles
            .iter()
            .map(|t| {
                let l = |i: usize, j: usize| hat.length(i, j).expect("registered edge");
                [l(t[1], t[2]), l(t[2], t[0]), l(t[0], t[1])]
            })
            .collect();
        let n = hat.mesh.num_vertices();
        let mut corners = vec![Vec::new(); hat.interior.len()];
        let slot: BTreeMap<usize, usize> = hat.interior.iter().enumerate().map(|(k, &v)| (v, k)).collect();
        for (f, t) in triangles.iter().enumerate() {
            for (c, v) in t.iter().enumerate() {
                if let Some(&k) = slot.get(v) {
                    corners[k].push((f, c));
                }
            }
        }
        let mut fixed = vec![true; n];
        for &v in &hat.interior {
            fixed[v] = false;
        }
        let nb = hat.mesh.neighbors();
        let steps = hat
            .interior
            .iter()
            .map(|&v| {
                let mean = nb[v].iter().map(|&w| hat.length(v, w).unwrap()).sum::<f64>() / nb[v].len() as f64;
                HEIGHT_STEP * mean
            })
            .collect();
        let scale = hat.lengths.values().sum::<f64>() / hat.lengths.len() as f64;
        let gh = Self {
            triangles,
            side_lengths,
            heights: hat.heights(),
            interior: hat.interior.clone(),
            fixed,
            corners,
            steps,
            scale,
            tol: hat.tol,
        };
        let theta = gh.theta_of_heights(&gh.heights)?;
        for (k, t) in theta.iter().enumerate() {
            if (t - 2.0 * std::f64::consts::PI).abs() > hat.tol.angle {
                return Err(Error::Inconsistency(format!(
                    "cone angle at interior vertex {} is {t} at the reference heights",
                    gh.interior[k]
                )));
            }
        }
        Ok(gh)
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    /// Whether each vertex height is held fixed (boundary vertices).
    pub fn fixed(&self) -> &[bool] {
        &self.fixed
    }

    /// Cone angle around the vertical edge at each interior vertex, as the
    /// sum of projected face angles at heights `h` (one per vertex).
    pub fn theta_of_heights(&self, h: &[f64]) -> Result<Vec<f64>> {
        self.corners
            .iter()
            .map(|cs| {
                cs.iter()
                    .map(|&(f, c)| {
                        let t = self.triangles[f];
                        ProjectedTriangle::new(self.side_lengths[f], t.map(|v| h[v])).projected_angle(c, &self.tol)
                    })
                    .sum()
            })
            .collect()
    }

    /// `∂θ_i/∂h_j` over interior vertices at the reference heights.
    pub fn lambda_g_fd(&self) -> Result<CurvatureMatrix> {
        let x0: Vec<f64> = self.interior.iter().map(|&v| self.heights[v]).collect();
        let f = |x: &[f64]| {
            let mut h = self.heights.clone();
            for (k, &v) in self.interior.iter().enumerate() {
                h[v] = x[k];
            }
            self.theta_of_heights(&h)
        };
        let jac = jacobian_fd(f, &x0, &self.steps)?;
        Ok(CurvatureMatrix::from_matrix(self.interior.clone(), &jac, 1.0 / self.scale, &self.tol))
    }
}

/// Cone angles of `gh` at heights `h`.
pub fn theta_of_heights(gh: &GeneralizedHat, h: &[f64]) -> Result<Vec<f64>> {
    gh.theta_of_heights(h)
}

/// Height Jacobian of the cone angles by finite differences.
pub fn lambda_g_fd(gh: &GeneralizedHat) -> Result<CurvatureMatrix> {
    gh.lambda_g_fd()
}

/// Cotangent formula for the height Jacobian of a convex hat. The diagonal
/// sums the coefficients of all edges at the vertex, boundary edges
/// included.
pub fn lambda_g_analytic(hat: &Hat) -> Result<CurvatureMatrix> {
    if !hat.is_convex() {
        return Err(Error::InvalidHat("the cotangent formula needs a convex hat".into()));
    }
    let p = hat.mesh.vertices();
    let slot: BTreeMap<usize, usize> = hat.interior.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let m = hat.interior.len();
    let mut a = DMatrix::zeros(m, m);
    for ((u, v), c, d) in hat.interior_edges() {
        if !slot.contains_key(&u) && !slot.contains_key(&v) {
            continue;
        }
        let l = (p[u] - p[v]).norm();
        let horiz2 = (p[u].x - p[v].x).powi(2) + (p[u].y - p[v].y).powi(2);
        if horiz2 <= (hat.tol.len * l).powi(2) {
            return Err(Error::ProjectionCollapse(format!("edge ({u}, {v}) is vertical")));
        }
        let w = (cot_to_vertical(&p[u], &p[v], &p[c]) + cot_to_vertical(&p[u], &p[v], &p[d])) * l / horiz2;
        for (x, y) in [(u, v), (v, u)] {
            if let Some(&i) = slot.get(&x) {
                a[(i, i)] += w;
                if let Some(&j) = slot.get(&y) {
                    a[(i, j)] -= w;
                }
            }
        }
    }
    let scale = hat.lengths.values().sum::<f64>() / hat.lengths.len() as f64;
    Ok(CurvatureMatrix::from_matrix(hat.interior.clone(), &a, 1.0 / scale, &hat.tol))
}

/// `|a_ii| ≥ Σ_{j≠i} |a_ij|` for every row, up to rounding.
pub fn is_diagonally_dominant(m: &CurvatureMatrix) -> bool {
    let slack = 1e-12 * m.max_abs_entry();
    (0..m.dim()).all(|i| {
        let off: f64 = (0..m.dim()).filter(|&j| j != i).map(|j| m.get(i, j).abs()).sum();
        m.get(i, i).abs() + slack >= off
    })
}
