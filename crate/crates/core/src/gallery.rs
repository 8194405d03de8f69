//! Test shapes: platonic solids, random convex polyhedra, suspensions, convex
//! and excavated hats, their star-shaped pullbacks and a negative control.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geom::{bbox_diagonal, convex_hull_3d};
use crate::hat::{compute_m_s, excavate, ExcavationStep};
use crate::mesh::{build_star_complex, weak_convexity_check};
use crate::{Error, Hat, Result, SimplexLengths, Tolerances, TriMesh, Vec3};

fn build(vertices: Vec<Vec3>, triangles: Vec<[usize; 3]>) -> TriMesh {
    TriMesh::new(vertices, triangles, &Tolerances::default()).expect("built-in shape is valid")
}

pub fn tetrahedron() -> TriMesh {
    build(
        vec![
            Vec3::new(1.0, 1.0, 1.0),
            Vec3::new(1.0, -1.0, -1.0),
            Vec3::new(-1.0, 1.0, -1.0),
            Vec3::new(-1.0, -1.0, 1.0),
        ],
        vec![[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 2]],
    )
}

/// Poles are vertices 0 (north) and 1 (south); the equator follows.
pub fn octahedron() -> TriMesh {
    suspension(4, 1.0).expect("valid parameters")
}

/// Regular icosahedron, faces from its convex hull.
pub fn icosahedron() -> TriMesh {
    let g = (1.0 + 5f64.sqrt()) / 2.0;
    let mut v = Vec::new();
    for s in [-1.0, 1.0] {
        for t in [-1.0, 1.0] {
            v.push(Vec3::new(0.0, s, t * g));
            v.push(Vec3::new(s, t * g, 0.0));
            v.push(Vec3::new(t * g, 0.0, s));
        }
    }
    from_hull(v).expect("icosahedron hull")
}

/// Unit cube with quad faces; vertex `i` has coordinates given by its bits.
pub fn cube() -> TriMesh {
    let v = (0..8).map(|i| Vec3::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64)).collect();
    let quads = vec![
        vec![1, 0, 2, 3],
        vec![4, 5, 7, 6],
        vec![0, 1, 5, 4],
        vec![2, 6, 7, 3],
        vec![0, 4, 6, 2],
        vec![1, 3, 7, 5],
    ];
    TriMesh::from_polygons(v, quads, &Tolerances::default()).expect("cube is valid")
}

/// Double cone over a regular `n`-gon in `z = 0` with poles at `±h`.
pub fn suspension(n: usize, h: f64) -> Result<TriMesh> {
    if n < 3 || !(h > 0.0) {
        return Err(Error::Generator(format!("suspension needs n >= 3 and h > 0 (got n = {n}, h = {h})")));
    }
    let mut v = vec![Vec3::new(0.0, 0.0, h), Vec3::new(0.0, 0.0, -h)];
    for k in 0..n {
        let a = 2.0 * PI * k as f64 / n as f64;
        v.push(Vec3::new(a.cos(), a.sin(), 0.0));
    }
    let mut t = Vec::new();
    for k in 0..n {
        let (e0, e1) = (2 + k, 2 + (k + 1) % n);
        t.push([0, e0, e1]);
        t.push([1, e1, e0]);
    }
    TriMesh::new(v, t, &Tolerances::default())
}

/// Tetrahedron with the face opposite vertex 0 split at its centroid, which
/// becomes vertex 4.
pub fn flat_vertex_tetra() -> TriMesh {
    let t = tetrahedron();
    let mut v = t.vertices().to_vec();
    v.push((v[1] + v[2] + v[3]) / 3.0);
    build(v, vec![[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 4], [3, 2, 4], [2, 1, 4]])
}

fn from_hull(points: Vec<Vec3>) -> Result<TriMesh> {
    let tol = Tolerances::default();
    let hull = convex_hull_3d(&points, &tol)?;
    if hull.extreme.len() != points.len() {
        return Err(Error::Generator("some points are not extreme".into()));
    }
    TriMesh::new(points, hull.facets.clone(), &tol)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Convex hull of `n` random points on the unit sphere, kept apart by a
/// fraction of the mean spacing. Samples with a vertex closer than
/// `CONE_HEIGHT × spacing²` to the plane of a face not containing it are
/// redrawn.
pub fn random_convex(n: usize, seed: u64) -> Result<TriMesh> {
    if !(4..=32).contains(&n) {
        return Err(Error::Generator(format!("random_convex needs 4 <= n <= 32 (got {n})")));
    }
    let mut r = rng(seed);
    let min_sep = 0.5 * (4.0 * PI / n as f64).sqrt();
    for _ in 0..1000 {
        let pts = sphere_points(&mut r, n, min_sep)?;
        let mesh = from_hull(pts)?;
        if min_cone_height(&mesh) >= CONE_HEIGHT * min_sep * min_sep {
            return Ok(mesh);
        }
    }
    Err(Error::Generator("no well-conditioned sample within 1000 draws".into()))
}

pub const CONE_HEIGHT: f64 = 0.2;

fn sphere_points(r: &mut ChaCha8Rng, n: usize, min_sep: f64) -> Result<Vec<Vec3>> {
    let mut pts: Vec<Vec3> = Vec::with_capacity(n);
    let mut attempts = 0;
    while pts.len() < n {
        attempts += 1;
        if attempts > 100_000 {
            return Err(Error::Generator("could not place points on the sphere".into()));
        }
        let q = Vec3::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
        let len = q.norm();
        if !(0.1..=1.0).contains(&len) {
            continue;
        }
        let q = q / len;
        if pts.iter().all(|p| (p - q).norm() >= min_sep) {
            pts.push(q);
        }
    }
    Ok(pts)
}

/// Smallest distance from a vertex to the plane of a face not containing it.
pub fn min_cone_height(mesh: &TriMesh) -> f64 {
    let p = mesh.vertices();
    let mut best = f64::INFINITY;
    for (f, t) in mesh.triangles().iter().enumerate() {
        let n = mesh.triangle_normal(f);
        for (v, q) in p.iter().enumerate() {
            if !t.contains(&v) {
                best = best.min((q - p[t[0]]).dot(&n).abs());
            }
        }
    }
    best
}

/// Square of side 1 at height 1 with an apex above its centre at height 2.
pub fn pyramid_hat_mesh() -> TriMesh {
    let v = vec![
        Vec3::new(-0.5, -0.5, 1.0),
        Vec3::new(0.5, -0.5, 1.0),
        Vec3::new(0.5, 0.5, 1.0),
        Vec3::new(-0.5, 0.5, 1.0),
        Vec3::new(0.0, 0.0, 2.0),
    ];
    build(v, vec![[0, 1, 4], [1, 2, 4], [2, 3, 4], [3, 0, 4]])
}

pub fn pyramid_hat() -> Hat {
    Hat::new(pyramid_hat_mesh(), &Tolerances::default()).expect("pyramid hat is valid")
}

/// Convex hat: `n_boundary` points near the unit circle at heights near 1,
/// `n_interior` points on a concave paraboloid inside radius 0.7 and inside
/// 85% of the boundary polygon's inradius, joined by the upper facets of
/// their convex hull. Boundary vertices come first.
pub fn convex_hat(n_boundary: usize, n_interior: usize, seed: u64) -> Result<Hat> {
    if !(3..=64).contains(&n_boundary) || n_interior > 64 {
        return Err(Error::Generator(format!(
            "convex_hat needs 3 <= boundary <= 64 and interior <= 64 (got {n_boundary}, {n_interior})"
        )));
    }
    let tol = Tolerances::default();
    let mut r = rng(seed);
    let step = 2.0 * PI / n_boundary as f64;
    let mut pts: Vec<Vec3> = (0..n_boundary)
        .map(|k| {
            let a = step * (k as f64 + r.random_range(-0.2..0.2));
            Vec3::new(a.cos(), a.sin(), 1.0 + r.random_range(-0.01..0.01))
        })
        .collect();
    let inradius = (0..n_boundary)
        .map(|k| {
            let (a, b) = (pts[k], pts[(k + 1) % n_boundary]);
            (a.x * b.y - a.y * b.x).abs() / ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt()
        })
        .fold(f64::INFINITY, f64::min);
    let reach = (0.85 * inradius).min(0.7);
    let min_sep = 0.5 * (reach / 0.7) / (n_interior as f64 + 1.0).sqrt();
    let mut attempts = 0;
    while pts.len() < n_boundary + n_interior {
        attempts += 1;
        if attempts > 100_000 {
            return Err(Error::Generator("could not place interior points".into()));
        }
        let (x, y) = (r.random_range(-reach..reach), r.random_range(-reach..reach));
        let rr = x * x + y * y;
        if rr > reach * reach {
            continue;
        }
        let q = Vec3::new(x, y, 1.0 + 0.8 * (1.0 - rr));
        if pts.iter().all(|p| ((p.x - q.x).powi(2) + (p.y - q.y).powi(2)).sqrt() >= min_sep) {
            pts.push(q);
        }
    }
    let triangles = if pts.len() == 3 {
        vec![[0, 1, 2]]
    } else {
        let hull = convex_hull_3d(&pts, &tol)?;
        (0..hull.facets.len()).filter(|&k| hull.facet_normal(k).z > 0.0).map(|k| hull.facets[k]).collect()
    };
    let hat = Hat::new(TriMesh::new(pts, triangles, &tol)?, &tol)?;
    if !hat.is_convex() || hat.interior().len() != n_interior {
        return Err(Error::Generator("generated hat is not a convex hat over all points".into()));
    }
    Ok(hat)
}

/// Four points over a convex quadrilateral whose diagonal `(0, 1)` passes
/// above the diagonal `(2, 3)`; vertices go round the quadrilateral in the
/// order `0, 2, 1, 3`. Both diagonals bend by at least [`MIN_BEND`] and the
/// shadow triangles have no angle below [`MIN_SHADOW_ANGLE`].
pub fn random_flip_simplex(seed: u64) -> Result<[Vec3; 4]> {
    let mut r = rng(seed);
    let tol = Tolerances::default();
    for _ in 0..1000 {
        let mut p = [Vec3::zeros(); 4];
        for (slot, v) in [0, 2, 1, 3].into_iter().enumerate() {
            let a = PI / 2.0 * (slot as f64 + r.random_range(-0.3..0.3));
            let rad = r.random_range(0.5..1.5);
            p[v] = Vec3::new(rad * a.cos(), rad * a.sin(), 0.0);
        }
        for v in 0..4 {
            p[v].z = if v < 2 { r.random_range(1.0..2.0) } else { r.random_range(0.5..1.5) };
        }
        let s = SimplexLengths::from_points(&p);
        let bend = PI - s.dihedral_angle(0, 1).max(s.dihedral_angle(2, 3));
        if bend >= MIN_BEND
            && shadow_angle(&p, [0, 1, 2, 3]) >= MIN_SHADOW_ANGLE
            && compute_m_s(&p, (0, 1), (2, 3), &tol).is_ok()
        {
            return Ok(p);
        }
    }
    Err(Error::Generator("no valid flip simplex within 1000 draws".into()))
}

/// Smallest angle in the shadows of the triangles `(a, b, c)`, `(a, b, d)`,
/// `(c, d, a)` and `(c, d, b)` for `[a, b, c, d]`.
fn shadow_angle(p: &[Vec3], [a, b, c, d]: [usize; 4]) -> f64 {
    let corner = |o: usize, x: usize, y: usize| {
        let (u, w) = (p[x] - p[o], p[y] - p[o]);
        (u.x * w.y - u.y * w.x).abs().atan2(u.x * w.x + u.y * w.y)
    };
    let tri = |x: usize, y: usize, z: usize| corner(x, y, z).min(corner(y, z, x)).min(corner(z, x, y));
    tri(a, b, c).min(tri(a, b, d)).min(tri(c, d, a)).min(tri(c, d, b))
}

/// Smallest angle, in radians, of a gallery excavation's quadrilateral
/// shadow triangles.
pub const MIN_SHADOW_ANGLE: f64 = 5.0 * PI / 180.0;

/// Smallest angle in the shadows of the four triangles spanned by an interior
/// edge `(a, b)` and its opposite vertices `c`, `d`.
pub fn flip_shadow_angle(hat: &Hat, edge: (usize, usize)) -> Option<f64> {
    let ((a, b), c, d) = hat.interior_edges().into_iter().find(|(e, _, _)| *e == edge)?;
    Some(shadow_angle(hat.mesh().vertices(), [a, b, c, d]))
}

/// Smallest bend, in radians, at an edge a gallery excavation flips.
pub const MIN_BEND: f64 = 0.05;

/// Convex hat followed by `k` excavations on face-disjoint quadrilaterals,
/// chosen in a seeded random order among those whose shadow triangles have
/// no angle below [`MIN_SHADOW_ANGLE`] and whose edge bends by at least
/// [`MIN_BEND`].
pub fn excavated_hat(n_boundary: usize, n_interior: usize, k: usize, seed: u64) -> Result<(Hat, Vec<ExcavationStep>)> {
    let mut hat = convex_hat(n_boundary, n_interior, seed)?;
    let mut r = rng(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut candidates: Vec<(usize, usize)> = hat.interior_edges().into_iter().map(|(e, _, _)| e).collect();
    for i in (1..candidates.len()).rev() {
        let j = r.random_range(0..=i);
        candidates.swap(i, j);
    }
    let face_key = |t: &[usize; 3]| {
        let mut s = *t;
        s.sort_unstable();
        s
    };
    let mut touched: BTreeSet<[usize; 3]> = BTreeSet::new();
    let mut steps = Vec::new();
    for (a, b) in candidates {
        if steps.len() == k {
            break;
        }
        let Some(((_, _), c, d)) = hat.interior_edges().into_iter().find(|(e, _, _)| *e == (a, b)) else {
            continue;
        };
        if touched.contains(&face_key(&[a, b, c])) || touched.contains(&face_key(&[a, b, d])) {
            continue;
        }
        if flip_shadow_angle(&hat, (a, b)).is_none_or(|x| x < MIN_SHADOW_ANGLE) || hat.concavity(a, b, c, d) > -MIN_BEND
        {
            continue;
        }
        if let Ok((next, step)) = excavate(&hat, (a, b)) {
            touched.insert(face_key(&[c, a, d]));
            touched.insert(face_key(&[d, b, c]));
            hat = next;
            steps.push(step);
        }
    }
    if steps.len() < k {
        return Err(Error::SamplerExhausted { achieved: steps.len(), requested: k });
    }
    Ok((hat, steps))
}

/// Closed polyhedron whose image under the apex-to-infinity map is `hat`:
/// hat vertices keep their indices, the apex (at the origin) is appended.
pub fn star_pullback(hat: &Hat) -> Result<(TriMesh, usize)> {
    let p = hat.mesh().vertices();
    let c = p.iter().fold(f64::NEG_INFINITY, |m, q| m.max(q.z)) + 1.0;
    let mut v: Vec<Vec3> = p
        .iter()
        .map(|q| {
            let z = 1.0 / (c - q.z);
            Vec3::new(q.x * z, q.y * z, z)
        })
        .collect();
    let apex = v.len();
    v.push(Vec3::zeros());
    let mut t = hat.mesh().triangles().to_vec();
    let b = hat.boundary();
    for k in 0..b.len() {
        t.push([b[(k + 1) % b.len()], b[k], apex]);
    }
    Ok((TriMesh::new(v, t, &Tolerances::default())?, apex))
}

/// Every face plane has all vertices on or below it.
pub fn is_convex_polyhedron(mesh: &TriMesh, tol: &Tolerances) -> bool {
    let p = mesh.vertices();
    let eps = tol.hull * bbox_diagonal(p);
    (0..mesh.triangles().len()).all(|f| {
        let n = mesh.triangle_normal(f);
        let a = p[mesh.triangles()[f][0]];
        p.iter().all(|q| (q - a).dot(&n) <= eps)
    })
}

/// Surface edges where the solid is reflex.
pub fn concave_edges(mesh: &TriMesh, tol: &Tolerances) -> Vec<(usize, usize)> {
    let p = mesh.vertices();
    let eps = tol.hull * bbox_diagonal(p);
    let tris = mesh.triangles();
    mesh.edge_faces()
        .into_iter()
        .filter(|(_, f)| f.len() == 2)
        .filter(|((a, b), f)| {
            let d = tris[f[1]].iter().copied().find(|v| v != a && v != b).unwrap();
            (p[d] - p[*a]).dot(&mesh.triangle_normal(f[0])) > eps
        })
        .map(|(e, _)| e)
        .collect()
}

/// Advertised class of a generated shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeClass {
    /// Convex polyhedron, star-shaped from every vertex.
    Convex,
    /// Weakly convex, star-shaped from the designated apex, not convex.
    WeaklyConvexStar,
    /// Not weakly convex.
    NegativeControl,
    ConvexHat,
    /// Weakly convex hat with at least one concave edge.
    WeaklyConvexHat,
}

/// Generator name with numeric parameters, written `name` or
/// `name:key=value,key=value`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub name: String,
    pub params: BTreeMap<String, f64>,
}

impl std::str::FromStr for GeneratorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut params = BTreeMap::new();
        for kv in rest.split(',').filter(|x| !x.trim().is_empty()) {
            let (k, v) =
                kv.split_once('=').ok_or_else(|| Error::Generator(format!("parameter {kv:?} is not key=value")))?;
            let v: f64 =
                v.trim().parse().map_err(|_| Error::Generator(format!("parameter {k} has bad value {v:?}")))?;
            params.insert(k.trim().to_string(), v);
        }
        Ok(Self { name: name.trim().to_string(), params })
    }
}

impl std::fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.name)?;
        for (i, (k, v)) in self.params.iter().enumerate() {
            write!(f, "{}{k}={v}", if i == 0 { ':' } else { ',' })?;
        }
        Ok(())
    }
}

/// A generated shape with its class and, for hats, the hat and its history.
#[derive(Debug, Clone)]
pub struct GalleryShape {
    /// Canonical spec with defaults filled in.
    pub spec: GeneratorSpec,
    pub seed: u64,
    pub class: ShapeClass,
    /// Closed polyhedron, or the upper surface of a hat.
    pub mesh: TriMesh,
    pub apex: Option<usize>,
    pub hat: Option<Hat>,
    /// Excavations applied to reach the hat.
    pub history: Vec<ExcavationStep>,
}

struct Params {
    given: BTreeMap<String, f64>,
    used: BTreeMap<String, f64>,
}

impl Params {
    fn get(&mut self, key: &str, default: f64) -> f64 {
        let v = self.given.get(key).copied().unwrap_or(default);
        self.used.insert(key.to_string(), v);
        v
    }

    fn count(&mut self, key: &str, default: usize) -> Result<usize> {
        let v = self.get(key, default as f64);
        if v < 0.0 || v.fract() != 0.0 {
            return Err(Error::Generator(format!("parameter {key} must be a non-negative integer (got {v})")));
        }
        Ok(v as usize)
    }

    fn finish(self, name: &str) -> Result<GeneratorSpec> {
        if let Some(k) = self.given.keys().find(|k| !self.used.contains_key(*k)) {
            return Err(Error::Generator(format!("unknown parameter {k} for {name}")));
        }
        Ok(GeneratorSpec { name: name.to_string(), params: self.used })
    }
}

/// Runs a generator and enforces its advertised class.
pub fn generate(spec: &GeneratorSpec, seed: u64, tol: &Tolerances) -> Result<GalleryShape> {
    let mut p = Params { given: spec.params.clone(), used: BTreeMap::new() };
    let name = spec.name.as_str();
    let mut hat = None;
    let mut apex = None;
    let mut history = Vec::new();
    let (mesh, class) = match name {
        "tetra" => (tetrahedron(), ShapeClass::Convex),
        "octa" => (octahedron(), ShapeClass::Convex),
        "icosa" => (icosahedron(), ShapeClass::Convex),
        "cube" => (cube(), ShapeClass::Convex),
        "random_convex" => (random_convex(p.count("n", 12)?, seed)?, ShapeClass::Convex),
        "suspension" => {
            let n = p.count("n", 4)?;
            (suspension(n, p.get("h", 1.0))?, ShapeClass::Convex)
        }
        "flat_vertex_tetra" => (flat_vertex_tetra(), ShapeClass::NegativeControl),
        "pyramid_hat" => {
            let h = pyramid_hat();
            let m = h.mesh().clone();
            hat = Some(h);
            (m, ShapeClass::ConvexHat)
        }
        "convex_hat" => {
            let h = convex_hat(p.count("b", 6)?, p.count("i", 4)?, seed)?;
            let m = h.mesh().clone();
            hat = Some(h);
            (m, ShapeClass::ConvexHat)
        }
        "excavated_hat" | "star_pullback" => {
            let (b, i, k) = (p.count("b", 6)?, p.count("i", 5)?, p.count("k", 2)?);
            if k == 0 {
                return Err(Error::Generator("k must be at least 1".into()));
            }
            let (h, steps) = excavated_hat(b, i, k, seed)?;
            history = steps;
            if name == "excavated_hat" {
                let m = h.mesh().clone();
                hat = Some(h);
                (m, ShapeClass::WeaklyConvexHat)
            } else {
                let (m, a) = star_pullback(&h)?;
                apex = Some(a);
                hat = Some(h);
                (m, ShapeClass::WeaklyConvexStar)
            }
        }
        other => return Err(Error::Generator(format!("unknown generator {other:?}"))),
    };
    let spec = p.finish(name)?;
    check_class(&mesh, class, apex, hat.as_ref(), tol)?;
    Ok(GalleryShape { spec, seed, class, mesh, apex, hat, history })
}

fn check_class(
    mesh: &TriMesh,
    class: ShapeClass,
    apex: Option<usize>,
    hat: Option<&Hat>,
    tol: &Tolerances,
) -> Result<()> {
    let fail = |msg: &str| Err(Error::Generator(format!("class check failed: {msg}")));
    match class {
        ShapeClass::Convex => {
            if !is_convex_polyhedron(mesh, tol) || !weak_convexity_check(mesh, tol).is_weakly_convex() {
                return fail("not convex");
            }
            for v in 0..mesh.num_vertices() {
                build_star_complex(mesh, v, tol)?;
            }
        }
        ShapeClass::WeaklyConvexStar => {
            if !weak_convexity_check(mesh, tol).is_weakly_convex() {
                return fail("not weakly convex");
            }
            build_star_complex(mesh, apex.expect("apex"), tol)?;
            if concave_edges(mesh, tol).is_empty() {
                return fail("no concave edge");
            }
        }
        ShapeClass::NegativeControl => {
            if weak_convexity_check(mesh, tol).is_weakly_convex() {
                return fail("negative control is weakly convex");
            }
        }
        ShapeClass::ConvexHat => {
            if !hat.is_some_and(Hat::is_convex) {
                return fail("hat is not convex");
            }
        }
        ShapeClass::WeaklyConvexHat => {
            if hat.is_none_or(Hat::is_convex) {
                return fail("hat has no concave edge");
            }
        }
    }
    Ok(())
}
