//! Triangulated surfaces: validation, file formats, weak convexity and star
//! decompositions.

mod convexity;
mod io;
mod star;

pub use convexity::{weak_convexity_check, Convexity};
pub use io::{load_mesh, write_off, MeshFormat};
pub use star::{build_star_complex, StarComplex};

use std::collections::{BTreeMap, BTreeSet};

use crate::geom::{signed_volume, triangle_area};
use crate::{Error, Result, Tolerances, Vec3};

/// Oriented triangulated surface, either closed (sphere-like) or a disk.
///
/// `polygons` keeps the faces as they were given before fan triangulation;
/// each triangle records which polygon it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    vertices: Vec<Vec3>,
    triangles: Vec<[usize; 3]>,
    polygons: Vec<Vec<usize>>,
    source: Vec<usize>,
    closed: bool,
}

impl TriMesh {
    /// Validates a triangle list; every triangle is its own polygon.
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[usize; 3]>, tol: &Tolerances) -> Result<Self> {
        let polygons = triangles.iter().map(|t| t.to_vec()).collect();
        Self::from_polygons(vertices, polygons, tol)
    }

    /// Fan-triangulates each polygon from its first vertex, then validates.
    pub fn from_polygons(vertices: Vec<Vec3>, polygons: Vec<Vec<usize>>, tol: &Tolerances) -> Result<Self> {
        let mut triangles = Vec::new();
        let mut source = Vec::new();
        for (f, poly) in polygons.iter().enumerate() {
            if poly.len() < 3 {
                return Err(Error::Degenerate { face: f, msg: format!("face has {} vertices", poly.len()) });
            }
            for k in 1..poly.len() - 1 {
                triangles.push([poly[0], poly[k], poly[k + 1]]);
                source.push(f);
            }
        }
        let mut mesh = Self { vertices, triangles, polygons, source, closed: false };
        mesh.closed = mesh.validate(tol)?;
        Ok(mesh)
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn polygons(&self) -> &[Vec<usize>] {
        &self.polygons
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// Polygon index each triangle was cut from.
    pub fn triangle_source(&self) -> &[usize] {
        &self.source
    }

    /// Same combinatorics, new coordinates (revalidated).
    pub fn with_vertices(&self, vertices: Vec<Vec3>, tol: &Tolerances) -> Result<Self> {
        let mut mesh = Self { vertices, ..self.clone() };
        mesh.closed = mesh.validate(tol)?;
        Ok(mesh)
    }

    /// Re-fans every polygon containing `apex` from `apex`, keeping the other
    /// triangles untouched.
    pub fn refan_from(&self, apex: usize, tol: &Tolerances) -> Result<Self> {
        let mut triangles = Vec::new();
        let mut source = Vec::new();
        for (f, poly) in self.polygons.iter().enumerate() {
            match poly.iter().position(|&v| v == apex) {
                Some(k) if poly.len() > 3 => {
                    let n = poly.len();
                    for i in 1..n - 1 {
                        triangles.push([apex, poly[(k + i) % n], poly[(k + i + 1) % n]]);
                        source.push(f);
                    }
                }
                _ => {
                    for (t, _) in self.triangles.iter().zip(&self.source).filter(|(_, &s)| s == f) {
                        triangles.push(*t);
                        source.push(f);
                    }
                }
            }
        }
        let mut mesh = Self { triangles, source, ..self.clone() };
        mesh.closed = mesh.validate(tol)?;
        Ok(mesh)
    }

    /// Undirected edges as sorted pairs, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let set: BTreeSet<(usize, usize)> =
            self.triangles.iter().flat_map(|t| (0..3).map(move |k| ordered(t[k], t[(k + 1) % 3]))).collect();
        set.into_iter().collect()
    }

    /// Triangles incident to each undirected edge.
    pub fn edge_faces(&self) -> BTreeMap<(usize, usize), Vec<usize>> {
        let mut map: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (f, t) in self.triangles.iter().enumerate() {
            for k in 0..3 {
                map.entry(ordered(t[k], t[(k + 1) % 3])).or_default().push(f);
            }
        }
        map
    }

    /// Sorted neighbour lists.
    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut nb = vec![BTreeSet::new(); self.vertices.len()];
        for (a, b) in self.edges() {
            nb[a].insert(b);
            nb[b].insert(a);
        }
        nb.into_iter().map(|s| s.into_iter().collect()).collect()
    }

    /// Boundary loop of a disk, oriented as in the triangles; empty when closed.
    pub fn boundary_loop(&self) -> Vec<usize> {
        let directed: BTreeSet<(usize, usize)> =
            self.triangles.iter().flat_map(|t| (0..3).map(move |k| (t[k], t[(k + 1) % 3]))).collect();
        let next: BTreeMap<usize, usize> =
            directed.iter().filter(|(a, b)| !directed.contains(&(*b, *a))).map(|&(a, b)| (a, b)).collect();
        let Some((&start, _)) = next.iter().next() else {
            return Vec::new();
        };
        let mut cycle = vec![start];
        let mut v = next[&start];
        while v != start && cycle.len() <= next.len() {
            cycle.push(v);
            v = next[&v];
        }
        cycle
    }

    /// Volume enclosed by a closed surface (divergence theorem).
    pub fn volume(&self) -> f64 {
        let o = Vec3::zeros();
        self.triangles
            .iter()
            .map(|t| signed_volume(&o, &self.vertices[t[0]], &self.vertices[t[1]], &self.vertices[t[2]]))
            .sum()
    }

    pub fn triangle_normal(&self, f: usize) -> Vec3 {
        let [a, b, c] = self.triangles[f].map(|i| self.vertices[i]);
        (b - a).cross(&(c - a)).normalize()
    }

    /// Checks the surface invariants; returns whether the surface is closed.
    fn validate(&self, tol: &Tolerances) -> Result<bool> {
        let n = self.vertices.len();
        let mut used = vec![false; n];
        for (f, t) in self.triangles.iter().enumerate() {
            let face = self.source[f];
            for &v in t {
                if v >= n {
                    return Err(Error::Topology {
                        element: format!("face {face}"),
                        msg: format!("vertex index {v} out of range"),
                    });
                }
                used[v] = true;
            }
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(Error::Degenerate { face, msg: "repeated vertex".into() });
            }
            let [a, b, c] = t.map(|i| self.vertices[i]);
            let longest = (b - a).norm().max((c - b).norm()).max((a - c).norm());
            if triangle_area(&a, &b, &c) <= tol.area * longest * longest {
                return Err(Error::Degenerate { face, msg: "triangle area below tolerance".into() });
            }
        }
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(Error::Topology { element: format!("vertex {v}"), msg: "vertex not used by any face".into() });
        }

        let mut directed: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (f, t) in self.triangles.iter().enumerate() {
            for k in 0..3 {
                let e = (t[k], t[(k + 1) % 3]);
                if directed.insert(e, f).is_some() {
                    return Err(Error::Topology {
                        element: format!("edge ({}, {})", e.0, e.1),
                        msg: "inconsistent orientation or non-manifold edge".into(),
                    });
                }
            }
        }
        let mut boundary = 0;
        for (e, faces) in self.edge_faces() {
            match faces.len() {
                1 => boundary += 1,
                2 => {
                    if !directed.contains_key(&(e.1, e.0)) {
                        return Err(Error::Topology {
                            element: format!("edge ({}, {})", e.0, e.1),
                            msg: "inconsistent orientation".into(),
                        });
                    }
                }
                k => {
                    return Err(Error::Topology {
                        element: format!("edge ({}, {})", e.0, e.1),
                        msg: format!("non-manifold edge shared by {k} faces"),
                    })
                }
            }
        }
        if boundary == 0 {
            return Ok(true);
        }
        let cycle = self.boundary_loop();
        if cycle.len() != boundary {
            return Err(Error::Topology {
                element: format!("vertex {}", cycle[0]),
                msg: "boundary edges do not form a single cycle".into(),
            });
        }
        Ok(false)
    }
}

pub(crate) fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}
