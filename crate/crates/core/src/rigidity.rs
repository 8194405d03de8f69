//! Bar-joint rigidity of triangulated surfaces.

use nalgebra::{DMatrix, DVector, Matrix3};
use serde::{Deserialize, Serialize};

use crate::{Error, Result, Tolerances, TriMesh, Vec3};

/// Infinitesimal rigid motion `x ↦ translation + rotation × x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KillingField {
    pub translation: Vec3,
    pub rotation: Vec3,
}

impl KillingField {
    pub fn new(translation: Vec3, rotation: Vec3) -> Self {
        Self { translation, rotation }
    }

    pub fn zero() -> Self {
        Self::new(Vec3::zeros(), Vec3::zeros())
    }

    /// `translation + rotation × x`
    pub fn eval(&self, x: &Vec3) -> Vec3 {
        self.translation + self.rotation.cross(x)
    }

    /// Linear part, the cross-product matrix of `rotation`.
    pub fn linear_part(&self) -> Matrix3<f64> {
        self.rotation.cross_matrix()
    }

    /// Fits an affine field `x ↦ A x + b` to samples by least squares and
    /// returns it as a Killing field together with the defect
    /// `max(|A + Aᵀ|, fit residual)` relative to the largest sampled value.
    ///
    /// At least four affinely independent points are needed.
    pub fn fit(points: &[Vec3], values: &[Vec3]) -> Result<(Self, f64)> {
        assert_eq!(points.len(), values.len());
        let n = points.len();
        let design = DMatrix::from_fn(n, 4, |r, c| if c < 3 { points[r][c] } else { 1.0 });
        let rhs = DMatrix::from_fn(n, 3, |r, c| values[r][c]);
        let svd = design.clone().svd(true, true);
        let smax = svd.singular_values.max();
        if svd.rank(1e-12 * smax) < 4 {
            return Err(Error::DegenerateInput("sample points are affinely dependent".into()));
        }
        let sol = svd.solve(&rhs, 1e-12 * smax).map_err(|e| Error::Inconsistency(e.into()))?;
        // sol is 4x3: rows x, y, z, 1; column k gives component k
        let a = Matrix3::from_fn(|k, c| sol[(c, k)]);
        let b = Vec3::new(sol[(3, 0)], sol[(3, 1)], sol[(3, 2)]);
        let residual = (&design * &sol - &rhs).amax();
        let antisym = (a + a.transpose()).amax();
        let scale = values.iter().fold(0.0f64, |m, v| m.max(v.amax()));
        let defect = if scale > 0.0 { antisym.max(residual) / scale } else { antisym.max(residual) };
        let w = 0.5 * (a - a.transpose());
        Ok((Self::new(b, Vec3::new(w[(2, 1)], w[(0, 2)], w[(1, 0)])), defect))
    }
}

/// Rows: edges of `mesh` in [`TriMesh::edges`] order; columns: 3 per vertex.
pub fn rigidity_matrix(mesh: &TriMesh) -> DMatrix<f64> {
    let p = mesh.vertices();
    let edges = mesh.edges();
    let mut r = DMatrix::zeros(edges.len(), 3 * p.len());
    for (row, &(a, b)) in edges.iter().enumerate() {
        let d = p[a] - p[b];
        for k in 0..3 {
            r[(row, 3 * a + k)] = d[k];
            r[(row, 3 * b + k)] = -d[k];
        }
    }
    r
}

/// Three translations and three rotations about the vertex centroid,
/// evaluated at the vertices.
pub fn trivial_motion_basis(mesh: &TriMesh) -> Result<Vec<DVector<f64>>> {
    let p = mesh.vertices();
    let n = p.len();
    let centroid = p.iter().sum::<Vec3>() / n as f64;
    let fields = (0..6).map(|k| {
        let mut v = Vec3::zeros();
        v[k % 3] = 1.0;
        if k < 3 {
            KillingField::new(v, Vec3::zeros())
        } else {
            KillingField::new(-v.cross(&centroid), v)
        }
    });
    let basis: Vec<DVector<f64>> = fields
        .map(|f| DVector::from_iterator(3 * n, p.iter().flat_map(|x| f.eval(x).iter().copied().collect::<Vec<_>>())))
        .collect();
    let stacked = DMatrix::from_columns(&basis);
    let sv = stacked.svd(false, false).singular_values;
    if sv.min() <= 1e-10 * sv.max() {
        return Err(Error::DegenerateInput("vertices are collinear".into()));
    }
    Ok(basis)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RigidityVerdict {
    InfinitesimallyRigid,
    Flexible,
}

/// Kernel of the (optionally height-constrained) rigidity matrix and the
/// comparison with trivial motions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlexReport {
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    pub kernel_dim: usize,
    pub trivial_dim: usize,
    pub verdict: RigidityVerdict,
    pub sigma_max: f64,
    pub rank_cut: f64,
    /// Smallest singular value kept in the rank.
    pub sigma_kept: Option<f64>,
    /// Largest singular value treated as zero.
    pub sigma_dropped: Option<f64>,
    /// `sigma_kept / sigma_dropped`, when both exist.
    pub gap: Option<f64>,
    /// Largest residual `|R k| / (σ_max |k|)` of a trivial motion.
    pub trivial_residual: f64,
    /// One displacement per vertex for each kernel vector.
    pub kernel: Vec<Vec<[f64; 3]>>,
}

impl FlexReport {
    pub fn is_rigid(&self) -> bool {
        self.verdict == RigidityVerdict::InfinitesimallyRigid
    }

    /// Kernel dimension beyond the trivial motions.
    pub fn nontrivial_dim(&self) -> usize {
        self.kernel_dim.saturating_sub(self.trivial_dim)
    }
}

fn numerical_rank(sv: &[f64], rel: f64) -> usize {
    let smax = sv.iter().fold(0.0f64, |m, &s| m.max(s));
    sv.iter().filter(|&&s| s > rel * smax).count()
}

/// Rigidity analysis. Edge rows are normalized by edge length; when
/// `fixed_heights` is given, unit rows pin the vertical velocity of those
/// vertices, and trivial motions are the Killing fields that respect them.
pub fn flex_report(mesh: &TriMesh, fixed_heights: Option<&[usize]>, tol: &Tolerances) -> Result<FlexReport> {
    let n = mesh.num_vertices();
    let cols = 3 * n;
    let mut r = rigidity_matrix(mesh);
    for (row, (a, b)) in mesh.edges().into_iter().enumerate() {
        let l = (mesh.vertices()[a] - mesh.vertices()[b]).norm();
        r.row_mut(row).scale_mut(1.0 / l);
    }
    let fixed = fixed_heights.unwrap_or(&[]);
    let rows = r.nrows() + fixed.len();
    let mut full = DMatrix::zeros(rows.max(cols), cols);
    full.view_mut((0, 0), (r.nrows(), cols)).copy_from(&r);
    for (k, &v) in fixed.iter().enumerate() {
        if v >= n {
            return Err(Error::Topology { element: format!("vertex {v}"), msg: "fixed vertex out of range".into() });
        }
        full[(r.nrows() + k, 3 * v + 2)] = 1.0;
    }

    let svd = full.clone().svd(false, true);
    let v_t = svd.v_t.as_ref().expect("requested V");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sv: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let sigma_max = sv.first().copied().unwrap_or(0.0);
    let rank_cut = tol.rank * sigma_max;
    let rank = sv.iter().filter(|&&s| s > rank_cut).count();
    let kernel_dim = cols - rank;
    let kernel: Vec<Vec<[f64; 3]>> = order[rank..]
        .iter()
        .map(|&i| (0..n).map(|v| [v_t[(i, 3 * v)], v_t[(i, 3 * v + 1)], v_t[(i, 3 * v + 2)]]).collect())
        .collect();

    let basis = trivial_motion_basis(mesh)?;
    let k = DMatrix::from_columns(&basis);
    let trivial_dim = if fixed.is_empty() {
        let s = k.clone().svd(false, false).singular_values;
        numerical_rank(s.as_slice(), tol.rank)
    } else {
        let z = DMatrix::from_fn(fixed.len(), 6, |row, c| k[(3 * fixed[row] + 2, c)]);
        let s = z.svd(false, false).singular_values;
        let scale = k.amax();
        let constrained_rank = s.iter().filter(|&&x| x > tol.rank * scale).count();
        6 - constrained_rank
    };
    let trivial_residual =
        basis.iter().map(|b| (&r * b).norm() / (sigma_max.max(f64::MIN_POSITIVE) * b.norm())).fold(0.0f64, f64::max);

    let sigma_kept = rank.checked_sub(1).map(|i| sv[i]);
    let sigma_dropped = sv.get(rank).copied().or(if kernel_dim > 0 { Some(0.0) } else { None });
    let gap = match (sigma_kept, sigma_dropped) {
        (Some(a), Some(b)) if b > 0.0 => Some(a / b),
        _ => None,
    };
    let verdict =
        if kernel_dim == trivial_dim { RigidityVerdict::InfinitesimallyRigid } else { RigidityVerdict::Flexible };
    Ok(FlexReport {
        rows,
        cols,
        rank,
        kernel_dim,
        trivial_dim,
        verdict,
        sigma_max,
        rank_cut,
        sigma_kept,
        sigma_dropped,
        gap,
        trivial_residual,
        kernel,
    })
}
