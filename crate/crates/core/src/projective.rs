//! The projective map sending an extreme vertex to vertical infinity, the
//! transport of Killing fields through it, and the homotopy from the
//! identity.

use nalgebra::{Matrix3, Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::geom::{bbox_diagonal, convex_hull_3d};
use crate::lambda::lambda_p;
use crate::mesh::build_star_complex;
use crate::spectral::Signature;
use crate::{Error, Hat, KillingField, Result, Tolerances, TriMesh, Vec3};

/// Rigid change of coordinates putting the apex at the origin with the
/// polyhedron in `z > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub origin: Vec3,
    /// Rows are the new axes.
    pub rotation: Matrix3<f64>,
}

impl Frame {
    pub fn apply(&self, p: &Vec3) -> Vec3 {
        self.rotation * (p - self.origin)
    }

    pub fn homogeneous(&self) -> Matrix4<f64> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.rotation);
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&(-(self.rotation * self.origin)));
        m
    }
}

/// Projective transformation in homogeneous coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectiveMap {
    pub matrix: Matrix4<f64>,
    pub inverse: Matrix4<f64>,
    /// Spectral condition number of `matrix`.
    pub condition: f64,
}

impl ProjectiveMap {
    pub fn new(matrix: Matrix4<f64>) -> Result<Self> {
        let inverse =
            matrix.try_inverse().ok_or_else(|| Error::DegenerateInput("singular projective matrix".into()))?;
        let sv = matrix.singular_values();
        Ok(Self { matrix, inverse, condition: sv.max() / sv.min() })
    }

    fn dehomogenize(x: &Vector4<f64>) -> Vec3 {
        Vec3::new(x[0] / x[3], x[1] / x[3], x[2] / x[3])
    }

    pub fn apply(&self, p: &Vec3) -> Vec3 {
        Self::dehomogenize(&(self.matrix * p.push(1.0)))
    }

    pub fn apply_inverse(&self, p: &Vec3) -> Vec3 {
        Self::dehomogenize(&(self.inverse * p.push(1.0)))
    }

    /// Homogeneous weight of the image of `p`; zero on the plane sent to
    /// infinity.
    pub fn weight(&self, p: &Vec3) -> f64 {
        (self.matrix * p.push(1.0))[3]
    }

    /// Coefficients `(a, b, c, d)` of the plane `ax + by + cz + d = 0` sent to
    /// infinity.
    pub fn infinity_plane(&self) -> [f64; 4] {
        let r = self.matrix.row(3);
        [r[0], r[1], r[2], r[3]]
    }
}

/// The map `(x, y, z) ↦ (x/z, y/z, c − 1/z)` in framed coordinates.
pub fn apex_to_infinity(c: f64) -> Matrix4<f64> {
    Matrix4::new(
        1.0, 0.0, 0.0, 0.0, //
        0.0, 1.0, 0.0, 0.0, //
        0.0, 0.0, c, -1.0, //
        0.0, 0.0, 1.0, 0.0,
    )
}

/// φ for a polyhedron and apex: the framing, the constant `c` and the
/// composite map (frame first).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiMap {
    pub apex: usize,
    pub frame: Frame,
    pub c: f64,
    pub map: ProjectiveMap,
    /// Smallest framed height of a non-apex vertex, over the diagonal.
    pub margin: f64,
}

/// Frames `mesh` at `apex` (apex at the origin, inward normal as `z`) and
/// builds the map sending the apex to vertical infinity with minimum image
/// height 1.
pub fn build_phi(mesh: &TriMesh, apex: usize, tol: &Tolerances) -> Result<PhiMap> {
    let p = mesh.vertices();
    let hull = convex_hull_3d(p, tol)?;
    let no_plane = |msg: String| Error::NoSupportingPlane { apex, msg };
    if !hull.extreme.contains(&apex) {
        return Err(no_plane("apex is not an extreme point".into()));
    }
    let outward: Vec3 =
        (0..hull.facets.len()).filter(|&k| hull.facets[k].contains(&apex)).map(|k| hull.facet_normal(k)).sum();
    if outward.norm() <= tol.angle {
        return Err(no_plane("facet normals at the apex cancel".into()));
    }
    let ez = -outward.normalize();
    let seed = [Vec3::x(), Vec3::y(), Vec3::z()]
        .into_iter()
        .min_by(|a, b| a.dot(&ez).abs().total_cmp(&b.dot(&ez).abs()))
        .unwrap();
    let ex = (seed - ez * seed.dot(&ez)).normalize();
    let ey = ez.cross(&ex);
    let frame =
        Frame { origin: p[apex], rotation: Matrix3::from_rows(&[ex.transpose(), ey.transpose(), ez.transpose()]) };

    let diag = bbox_diagonal(p);
    let mut min_z = f64::INFINITY;
    let mut max_inv = 0.0f64;
    for (v, q) in p.iter().enumerate() {
        if v == apex {
            continue;
        }
        let z = frame.apply(q).z;
        if z <= tol.hull * diag {
            return Err(no_plane(format!("vertex {v} is not strictly above the supporting plane (height {z:e})")));
        }
        min_z = min_z.min(z);
        max_inv = max_inv.max(1.0 / z);
    }
    let c = 1.0 + max_inv;
    let map = ProjectiveMap::new(apex_to_infinity(c) * frame.homogeneous())?;
    Ok(PhiMap { apex, frame, c, map, margin: min_z / diag })
}

/// The hat whose shadow is the image of the polyhedron cut at `z = 0`: the
/// images of the faces away from the apex. Vertex indices skip the apex.
pub fn polyhedron_to_hat(mesh: &TriMesh, apex: usize, tol: &Tolerances) -> Result<(Hat, PhiMap)> {
    let phi = build_phi(mesh, apex, tol)?;
    let sc = build_star_complex(mesh, apex, tol)?;
    let renumber = |v: usize| if v > apex { v - 1 } else { v };
    let vertices: Vec<Vec3> =
        mesh.vertices().iter().enumerate().filter(|&(v, _)| v != apex).map(|(_, q)| phi.map.apply(q)).collect();
    let triangles: Vec<[usize; 3]> = sc.base_faces().iter().map(|t| t.map(renumber)).collect();
    let upper = TriMesh::new(vertices, triangles, tol)?;
    Ok((Hat::new(upper, tol)?, phi))
}

/// Pointwise maps carrying Killing fields at `x` to Killing fields at the
/// image of `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KillingTransport {
    pub map: ProjectiveMap,
    inverse_transpose: Matrix4<f64>,
}

impl KillingTransport {
    pub fn new(map: ProjectiveMap) -> Self {
        Self { map, inverse_transpose: map.inverse.transpose() }
    }

    /// Image of the vector `u` attached at `x`: the covector `(u, −⟨x, u⟩)`
    /// pushed forward by the inverse transpose and divided by the weight.
    pub fn psi(&self, x: &Vec3, u: &Vec3) -> Vec3 {
        let lifted = Vector4::new(u.x, u.y, u.z, -x.dot(u));
        let v = self.inverse_transpose * lifted;
        Vec3::new(v[0], v[1], v[2]) / self.map.weight(x)
    }

    /// Closed form of the transported field.
    pub fn transport_exact(&self, field: &KillingField) -> KillingField {
        let mut k = Matrix4::zeros();
        k.fixed_view_mut::<3, 3>(0, 0).copy_from(&field.linear_part());
        for i in 0..3 {
            k[(i, 3)] = field.translation[i];
            k[(3, i)] = -field.translation[i];
        }
        let kk = self.inverse_transpose * k * self.map.inverse;
        KillingField::new(Vec3::new(kk[(0, 3)], kk[(1, 3)], kk[(2, 3)]), Vec3::new(kk[(2, 1)], kk[(0, 2)], kk[(1, 0)]))
    }
}

/// A transported field fitted from samples, with its Killing defect.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportedField {
    pub field: KillingField,
    pub defect: f64,
}

/// Evaluates `ψ_x(U(x))` at the images of `samples` and fits an affine
/// field; `defect` measures how far it is from Killing.
pub fn transport_killing(
    transport: &KillingTransport,
    field: &KillingField,
    samples: &[Vec3],
    tol: &Tolerances,
) -> Result<TransportedField> {
    let diag = bbox_diagonal(samples);
    let plane = transport.map.infinity_plane();
    let normal = Vec3::new(plane[0], plane[1], plane[2]).norm();
    let mut images = Vec::with_capacity(samples.len());
    let mut values = Vec::with_capacity(samples.len());
    for x in samples {
        let w = transport.map.weight(x);
        if w.abs() <= tol.hull * diag * normal {
            return Err(Error::DegenerateInput(format!("sample {x:?} is on the plane sent to infinity")));
        }
        images.push(transport.map.apply(x));
        values.push(transport.psi(x, &field.eval(x)));
    }
    let (fitted, defect) = KillingField::fit(&images, &values)?;
    Ok(TransportedField { field: fitted, defect })
}

/// Distance of a field from the span of horizontal translations and
/// rotations about vertical axes, relative to its size.
pub fn vertical_subspace_residual(field: &KillingField) -> f64 {
    let size = field.translation.norm().max(field.rotation.norm());
    if size == 0.0 {
        return 0.0;
    }
    let off = Vec3::new(field.rotation.x, field.rotation.y, field.translation.z).norm();
    off / size
}

/// `φ_t = F⁻¹ ((1 − t) I + t M) F` for the frame `F` and apex map `M` of
/// `phi`: the identity at `t = 0`, and φ followed by the inverse frame at
/// `t = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomotopyFamily {
    pub phi: PhiMap,
}

impl HomotopyFamily {
    pub fn new(phi: PhiMap) -> Self {
        Self { phi }
    }

    pub fn at(&self, t: f64) -> Result<ProjectiveMap> {
        let m = Matrix4::identity() * (1.0 - t) + apex_to_infinity(self.phi.c) * t;
        let f = self.phi.frame.homogeneous();
        let f_inv = f.try_inverse().ok_or_else(|| Error::Inconsistency("frame is singular".into()))?;
        ProjectiveMap::new(f_inv * m * f)
    }

    /// Framed height of the plane sent to infinity, `−(1 − t)/t`.
    pub fn infinity_height(t: f64) -> f64 {
        -(1.0 - t) / t
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomotopyRow {
    pub t: f64,
    pub eigenvalues: Vec<f64>,
    pub signature: Signature,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomotopyReport {
    pub apex: usize,
    pub rows: Vec<HomotopyRow>,
    pub constant: bool,
    /// Spectrum of the height Jacobian of the hat at the end of the homotopy.
    pub hat_eigenvalues: Vec<f64>,
    pub hat_signature: Signature,
}

/// Runs the star decomposition and Λ_P on `φ_t(P)` for each sample `t`.
pub fn homotopy_signature(mesh: &TriMesh, apex: usize, samples: &[f64], tol: &Tolerances) -> Result<HomotopyReport> {
    let phi = build_phi(mesh, apex, tol)?;
    let family = HomotopyFamily::new(phi);
    let mut rows = Vec::with_capacity(samples.len());
    for &t in samples {
        if !(0.0..1.0).contains(&t) {
            return Err(Error::DegenerateInput(format!("homotopy parameter {t} outside [0, 1)")));
        }
        let map = family.at(t)?;
        let moved: Vec<Vec3> = mesh.vertices().iter().map(|q| map.apply(q)).collect();
        let image = mesh.with_vertices(moved, tol)?;
        let sc = build_star_complex(&image, apex, tol)
            .map_err(|e| Error::Inconsistency(format!("star decomposition lost at t = {t}: {e}")))?;
        let lam = lambda_p(&sc)?;
        rows.push(HomotopyRow { t, eigenvalues: lam.eigenvalues, signature: lam.signature });
    }
    let constant = rows.windows(2).all(|w| w[0].signature == w[1].signature);
    let (hat, _) = polyhedron_to_hat(mesh, apex, tol)?;
    let lam_h = hat.generalized()?.lambda_g_fd()?;
    Ok(HomotopyReport { apex, rows, constant, hat_eigenvalues: lam_h.eigenvalues, hat_signature: lam_h.signature })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn axis_point_stays_on_axis() {
        let m = apex_to_infinity(3.0);
        let map = ProjectiveMap::new(m).unwrap();
        assert_eq!(map.apply(&Vec3::new(0.0, 0.0, 1.0)), Vec3::new(0.0, 0.0, 2.0));
        let p = Vec3::new(0.3, -0.2, 0.7);
        assert!((map.apply_inverse(&map.apply(&p)) - p).norm() < 1e-12);
    }

    #[test]
    fn segments_through_apex_become_vertical() {
        let m = gallery::random_convex(10, 4).unwrap();
        let phi = build_phi(&m, 0, &tol()).unwrap();
        for v in 1..m.num_vertices() {
            let q = m.vertices()[v];
            let o = m.vertices()[0];
            let img = phi.map.apply(&q);
            for s in [0.1, 0.3, 0.5, 0.7, 0.9] {
                let x = phi.map.apply(&(o + (q - o) * s));
                assert!((x.x - img.x).abs() < 1e-10 && (x.y - img.y).abs() < 1e-10);
                assert!(x.z < img.z);
            }
        }
    }

    #[test]
    fn octahedron_heights() {
        let m = gallery::octahedron();
        let phi = build_phi(&m, 0, &tol()).unwrap();
        let heights: Vec<f64> = (1..6).map(|v| phi.map.apply(&m.vertices()[v]).z).collect();
        let min = heights.iter().copied().fold(f64::INFINITY, f64::min);
        assert!((min - 1.0).abs() < 1e-12);
        assert!(heights.iter().all(|&h| h >= 1.0 - 1e-12));
        // oracle: equator at framed height 1, far pole at 2, so c = 2
        assert!((phi.c - 2.0).abs() < 1e-12);
        assert!((heights[0] - 1.5).abs() < 1e-12);
    }

    #[test]
    fn octahedron_hat() {
        let (hat, _) = polyhedron_to_hat(&gallery::octahedron(), 0, &tol()).unwrap();
        assert_eq!(hat.boundary().len(), 4);
        assert_eq!(hat.interior(), &[0]);
        assert_eq!(hat.mesh().triangles().len(), 4);
        assert!(hat.is_convex());
    }

    #[test]
    fn tetrahedron_hat() {
        for apex in 0..4 {
            let (hat, _) = polyhedron_to_hat(&gallery::tetrahedron(), apex, &tol()).unwrap();
            assert_eq!(hat.mesh().triangles().len(), 1);
            assert_eq!(hat.boundary().len(), 3);
            assert!(hat.interior().is_empty());
        }
    }

    #[test]
    fn non_extreme_apex_has_no_plane() {
        let m = gallery::flat_vertex_tetra();
        assert!(matches!(build_phi(&m, 4, &tol()), Err(Error::NoSupportingPlane { .. })));
    }

    #[test]
    fn identity_at_zero() {
        let m = gallery::icosahedron();
        let phi = build_phi(&m, 5, &tol()).unwrap();
        let id = HomotopyFamily::new(phi).at(0.0).unwrap();
        for q in m.vertices() {
            assert!((id.apply(q) - q).norm() <= 1e-12);
        }
        for t in [0.25, 0.5, 0.9] {
            let plane = HomotopyFamily::new(phi).at(t).unwrap().infinity_plane();
            // framed plane z = -(1-t)/t: check a point on it
            let framed = Vec3::new(0.4, -0.1, HomotopyFamily::infinity_height(t));
            let world = phi.frame.rotation.transpose() * framed + phi.frame.origin;
            let w = plane[0] * world.x + plane[1] * world.y + plane[2] * world.z + plane[3];
            assert!(w.abs() < 1e-12);
        }
    }

    #[test]
    fn radial_vectors_on_axis_become_vertical() {
        let phi = build_phi(&gallery::octahedron(), 0, &tol()).unwrap();
        let tr = KillingTransport::new(phi.map);
        let axis = phi.frame.rotation.row(2).transpose();
        let x = phi.frame.origin + axis * 0.6;
        let u = axis * 0.25;
        let v = tr.psi(&x, &u);
        assert!((v - Vec3::new(0.0, 0.0, 0.25)).norm() < 1e-12);
    }

    #[test]
    fn transported_rotations() {
        let m = gallery::octahedron();
        let phi = build_phi(&m, 0, &tol()).unwrap();
        let tr = KillingTransport::new(phi.map);
        let samples: Vec<Vec3> = m.vertices()[1..].to_vec();
        let axes = phi.frame.rotation;
        for k in 0..3 {
            let axis = axes.row(k).transpose();
            let field = KillingField::new(-axis.cross(&phi.frame.origin), axis);
            let out = transport_killing(&tr, &field, &samples, &tol()).unwrap();
            assert!(out.defect < 1e-10);
            assert!(vertical_subspace_residual(&out.field) < 1e-10);
            let exact = tr.transport_exact(&field);
            assert!((exact.rotation - out.field.rotation).norm() < 1e-10);
            if k < 2 {
                assert!(out.field.translation.norm() > 0.5);
            } else {
                assert!(out.field.rotation.z.abs() > 0.5);
            }
        }
        let zero = transport_killing(&tr, &KillingField::zero(), &samples, &tol()).unwrap();
        assert_eq!(zero.field, KillingField::zero());
    }

    #[test]
    fn octahedron_homotopy() {
        let r = homotopy_signature(&gallery::octahedron(), 0, &[0.0, 0.25, 0.5, 0.75, 0.9], &tol()).unwrap();
        assert!(r.constant);
        for row in &r.rows {
            assert_eq!(row.signature, Signature { positive: 1, zero: 0, negative: 0 });
        }
        assert!((r.rows[0].eigenvalues[0] - 4.0).abs() < 1e-6);
    }
}
