use std::collections::BTreeMap;
use std::f64::consts::PI;

use super::{ordered, TriMesh};
use crate::geom::{bbox_diagonal, SimplexLengths};
use crate::{Error, Result, Tolerances, Vec3};

/// Decomposition of a closed polyhedron into the cones from one apex vertex
/// over the faces not containing it.
///
/// Simplices use the local vertex order `(apex, a, b, c)` where `(a, b, c)`
/// is the outward-oriented base face. Interior edges are the segments from
/// the apex to the vertices it is not joined to on the surface, sorted by
/// that vertex index.
#[derive(Debug, Clone)]
pub struct StarComplex {
    apex: usize,
    mesh: TriMesh,
    base_faces: Vec<[usize; 3]>,
    base_triangle_ids: Vec<usize>,
    interior_edges: Vec<usize>,
    interior_lengths: Vec<f64>,
    simplices: Vec<SimplexLengths>,
    cone_volumes: Vec<f64>,
    slot: Vec<Option<usize>>,
    tol: Tolerances,
}

/// Builds the star complex from `apex`, re-fanning polygons through the apex
/// and certifying star-shapedness by positive cone volumes summing to the
/// enclosed volume.
pub fn build_star_complex(mesh: &TriMesh, apex: usize, tol: &Tolerances) -> Result<StarComplex> {
    if !mesh.is_closed() {
        return Err(Error::Topology { element: "surface".into(), msg: "star complex needs a closed surface".into() });
    }
    if apex >= mesh.num_vertices() {
        return Err(Error::Topology { element: format!("vertex {apex}"), msg: "apex out of range".into() });
    }
    let mesh = mesh.refan_from(apex, tol)?;
    let p = mesh.vertices();
    let scale = bbox_diagonal(p);
    let o = p[apex];

    let mut base_faces = Vec::new();
    let mut base_triangle_ids = Vec::new();
    let mut cone_volumes = Vec::new();
    for (f, t) in mesh.triangles().iter().enumerate() {
        if t.contains(&apex) {
            continue;
        }
        let [a, b, c] = t.map(|i| p[i]);
        let vol = (b - a).cross(&(c - a)).dot(&(a - o)) / 6.0;
        if vol <= tol.vol * scale.powi(3) {
            let msg = if vol <= 0.0 { "cone has non-positive volume" } else { "degenerate cone" };
            return Err(Error::NotStarShaped { apex, face: f, msg: format!("{msg} ({vol:e})") });
        }
        base_faces.push(*t);
        base_triangle_ids.push(f);
        cone_volumes.push(vol);
    }
    let total: f64 = cone_volumes.iter().sum();
    let enclosed = mesh.volume();
    if (total - enclosed).abs() > tol.rel * enclosed.abs() {
        return Err(Error::NotStarShaped {
            apex,
            face: usize::MAX,
            msg: format!("cone volumes sum to {total}, enclosed volume is {enclosed}"),
        });
    }

    let neighbors = mesh.neighbors();
    let interior_edges: Vec<usize> =
        (0..mesh.num_vertices()).filter(|&w| w != apex && !neighbors[apex].contains(&w)).collect();
    let mut slot = vec![None; mesh.num_vertices()];
    for (k, &w) in interior_edges.iter().enumerate() {
        slot[w] = Some(k);
    }
    let interior_lengths = interior_edges.iter().map(|&w| (p[w] - o).norm()).collect();

    let mut simplices = Vec::with_capacity(base_faces.len());
    for (k, t) in base_faces.iter().enumerate() {
        let pts: [Vec3; 4] = [o, p[t[0]], p[t[1]], p[t[2]]];
        let s = SimplexLengths::from_points(&pts);
        s.check(tol).map_err(|msg| Error::NotStarShaped { apex, face: base_triangle_ids[k], msg })?;
        simplices.push(s);
    }

    let sc = StarComplex {
        apex,
        mesh,
        base_faces,
        base_triangle_ids,
        interior_edges,
        interior_lengths,
        simplices,
        cone_volumes,
        slot,
        tol: *tol,
    };
    for (k, theta) in sc.reference_angles()?.into_iter().enumerate() {
        if (theta - 2.0 * PI).abs() > tol.angle {
            return Err(Error::Inconsistency(format!(
                "cone angle around interior edge to vertex {} is {theta}, not 2π",
                sc.interior_edges[k]
            )));
        }
    }
    Ok(sc)
}

/// An edge of the complex with the simplices containing it.
#[derive(Debug, Clone)]
pub struct ComplexEdge {
    pub vertices: (usize, usize),
    pub interior: bool,
    /// `(simplex index, local i, local j)`
    pub incidences: Vec<(usize, usize, usize)>,
}

impl StarComplex {
    pub fn apex(&self) -> usize {
        self.apex
    }

    /// The surface after re-fanning polygons through the apex.
    pub fn mesh(&self) -> &TriMesh {
        &self.mesh
    }

    pub fn base_faces(&self) -> &[[usize; 3]] {
        &self.base_faces
    }

    /// Index in [`StarComplex::mesh`] of each base face.
    pub fn base_triangle_ids(&self) -> &[usize] {
        &self.base_triangle_ids
    }

    /// Non-apex endpoint of each interior edge.
    pub fn interior_edges(&self) -> &[usize] {
        &self.interior_edges
    }

    pub fn interior_lengths(&self) -> &[f64] {
        &self.interior_lengths
    }

    pub fn simplices(&self) -> &[SimplexLengths] {
        &self.simplices
    }

    pub fn cone_volumes(&self) -> &[f64] {
        &self.cone_volumes
    }

    /// Worst [`SimplexLengths::aspect`] over the simplices.
    pub fn aspect(&self) -> f64 {
        self.simplices.iter().map(SimplexLengths::aspect).fold(f64::INFINITY, f64::min)
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn num_interior(&self) -> usize {
        self.interior_edges.len()
    }

    /// Mesh vertex of local index `k` in simplex `s`.
    pub fn simplex_vertex(&self, s: usize, k: usize) -> usize {
        if k == 0 {
            self.apex
        } else {
            self.base_faces[s][k - 1]
        }
    }

    /// Simplices rebuilt with the given interior lengths (surface lengths
    /// fixed), each validated.
    pub fn simplices_at(&self, lengths: &[f64]) -> Result<Vec<SimplexLengths>> {
        assert_eq!(lengths.len(), self.num_interior(), "one length per interior edge");
        let mut out = Vec::with_capacity(self.simplices.len());
        for (s, base) in self.simplices.iter().enumerate() {
            let mut simplex = *base;
            for (k, &v) in self.base_faces[s].iter().enumerate() {
                if let Some(i) = self.slot[v] {
                    simplex = simplex.with_length(0, k + 1, lengths[i]);
                }
            }
            simplex.check(&self.tol).map_err(|msg| Error::Realization {
                simplex: s,
                msg: format!("{msg} at interior lengths {lengths:?}"),
            })?;
            out.push(simplex);
        }
        Ok(out)
    }

    /// Every edge of the complex (interior and surface) with its incidences.
    pub fn complex_edges(&self) -> Vec<ComplexEdge> {
        let mut map: BTreeMap<(usize, usize), Vec<(usize, usize, usize)>> = BTreeMap::new();
        for s in 0..self.simplices.len() {
            for i in 0..4 {
                for j in i + 1..4 {
                    let key = ordered(self.simplex_vertex(s, i), self.simplex_vertex(s, j));
                    map.entry(key).or_default().push((s, i, j));
                }
            }
        }
        map.into_iter()
            .map(|(vertices, incidences)| {
                let other = if vertices.0 == self.apex {
                    Some(vertices.1)
                } else if vertices.1 == self.apex {
                    Some(vertices.0)
                } else {
                    None
                };
                let interior = other.is_some_and(|w| self.slot[w].is_some());
                ComplexEdge { vertices, interior, incidences }
            })
            .collect()
    }

    fn reference_angles(&self) -> Result<Vec<f64>> {
        let mut theta = vec![0.0; self.num_interior()];
        for (s, simplex) in self.simplices.iter().enumerate() {
            for (k, &v) in self.base_faces[s].iter().enumerate() {
                if let Some(i) = self.slot[v] {
                    theta[i] += simplex.dihedral_angle(0, k + 1);
                }
            }
        }
        Ok(theta)
    }

    /// Slot of the interior edge ending at mesh vertex `v`, if any.
    pub fn interior_slot(&self, v: usize) -> Option<usize> {
        self.slot[v]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn octahedron_from_pole() {
        let m = gallery::octahedron();
        let sc = build_star_complex(&m, 0, &tol()).unwrap();
        assert_eq!(sc.simplices().len(), 4);
        assert_eq!(sc.num_interior(), 1);
        assert!((sc.interior_lengths()[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn tetrahedron_has_no_interior_edges() {
        let m = gallery::tetrahedron();
        for apex in 0..4 {
            let sc = build_star_complex(&m, apex, &tol()).unwrap();
            assert_eq!(sc.simplices().len(), 1);
            assert_eq!(sc.num_interior(), 0);
        }
    }

    #[test]
    fn cube_corner_by_enumeration() {
        let m = gallery::cube();
        let sc = build_star_complex(&m, 0, &tol()).unwrap();
        // oracle: adjacency enumeration on the re-fanned surface
        let mut adjacent = [false; 8];
        for t in sc.mesh().triangles() {
            if t.contains(&0) {
                for &v in t {
                    adjacent[v] = true;
                }
            }
        }
        let expected: Vec<usize> = (1..8).filter(|&v| !adjacent[v]).collect();
        assert_eq!(sc.interior_edges(), expected.as_slice());
        assert_eq!(sc.interior_edges(), &[7]);
        assert_eq!(sc.base_faces().len(), 6);
        // oracle: dihedral angles summed from explicit coordinates
        let p = sc.mesh().vertices();
        let axis = (p[7] - p[0]).normalize();
        let mut total = 0.0;
        for t in sc.base_faces().iter().filter(|t| t.contains(&7)) {
            let others: Vec<Vec3> = t.iter().filter(|&&v| v != 7).map(|&v| p[v] - p[0]).collect();
            let u = others[0] - axis * others[0].dot(&axis);
            let w = others[1] - axis * others[1].dot(&axis);
            total += (u.dot(&w) / (u.norm() * w.norm())).acos();
        }
        assert!((total - 2.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn interior_edges_are_the_non_surface_edges() {
        let m = gallery::icosahedron();
        let sc = build_star_complex(&m, 3, &tol()).unwrap();
        let surface: std::collections::BTreeSet<(usize, usize)> = sc.mesh().edges().into_iter().collect();
        let interior: Vec<(usize, usize)> =
            sc.complex_edges().into_iter().filter(|e| !surface.contains(&e.vertices)).map(|e| e.vertices).collect();
        let expected: Vec<(usize, usize)> = sc.interior_edges().iter().map(|&w| ordered(3, w)).collect();
        let mut sorted = expected.clone();
        sorted.sort();
        assert_eq!(interior, sorted);
        assert!(sc.complex_edges().iter().all(|e| e.interior == !surface.contains(&e.vertices)));
    }

    #[test]
    fn reflex_apex_is_rejected() {
        // flat vertex of the negative control sees coplanar faces from a base corner
        let m = gallery::flat_vertex_tetra();
        assert!(matches!(build_star_complex(&m, 1, &tol()), Err(Error::NotStarShaped { .. })));
    }

    #[test]
    fn volume_sum_matches() {
        let m = gallery::random_convex(12, 5).unwrap();
        for apex in 0..m.num_vertices() {
            let sc = build_star_complex(&m, apex, &tol()).unwrap();
            let total: f64 = sc.cone_volumes().iter().sum();
            assert!((total - m.volume()).abs() <= 1e-9 * m.volume());
        }
    }
}
