//! Cone angles around the interior edges of a star decomposition and their
//! length derivatives.

use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use crate::geom::{bbox_diagonal, dihedral_angle_complex};
use crate::rigidity::flex_report;
use crate::spectral::jacobian_fd;
use crate::{CurvatureMatrix, Error, Result, StarComplex, Tolerances, TriMesh};

/// Relative finite-difference step for edge lengths.
pub const LENGTH_STEP: f64 = 1e-5;

/// Relative step for differencing the energy gradient, times the mean
/// length of each simplex.
pub const REGGE_STEP: f64 = 1e-4;

const COMPLEX_STEP: f64 = 1e-30;

const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Total dihedral angle around each interior edge when the interior lengths
/// are set to `lengths` and the surface lengths are kept.
pub fn cone_angles(sc: &StarComplex, lengths: &[f64]) -> Result<Vec<f64>> {
    let simplices = sc.simplices_at(lengths)?;
    let mut theta = vec![0.0; sc.num_interior()];
    for (s, simplex) in simplices.iter().enumerate() {
        for k in 1..4 {
            if let Some(i) = sc.interior_slot(sc.simplex_vertex(s, k)) {
                theta[i] += simplex.dihedral_angle(0, k);
            }
        }
    }
    Ok(theta)
}

/// `∂θ_i/∂l_j` at the reference lengths, symmetrized, with spectrum.
pub fn lambda_p(sc: &StarComplex) -> Result<CurvatureMatrix> {
    let l0 = sc.interior_lengths();
    let steps: Vec<f64> = l0.iter().map(|l| LENGTH_STEP * l).collect();
    let jac = jacobian_fd(|l| cone_angles(sc, l), l0, &steps)?;
    let scale = 1.0 / bbox_diagonal(sc.mesh().vertices());
    Ok(CurvatureMatrix::from_matrix(sc.interior_edges().to_vec(), &jac, scale, sc.tolerances()))
}

/// `Σ_e l_e (κ_e − Σ α_e)` over all edges of the complex, where `κ = 2π` on
/// interior edges and `π` on surface edges, and `α_e` are the dihedral
/// angles of the simplices at `e`.
pub fn regge_energy(sc: &StarComplex, lengths: &[f64]) -> Result<f64> {
    let simplices = sc.simplices_at(lengths)?;
    let mut total = 0.0;
    for edge in sc.complex_edges() {
        let (s0, i0, j0) = edge.incidences[0];
        let l = simplices[s0].length(i0, j0);
        let kappa = if edge.interior { 2.0 * PI } else { PI };
        let angle: f64 = edge.incidences.iter().map(|&(s, i, j)| simplices[s].dihedral_angle(i, j)).sum();
        total += l * (kappa - angle);
    }
    Ok(total)
}

/// Hessian of `-regge_energy` at the reference lengths: complex-step first
/// derivatives of the energy, differenced centrally with two Richardson
/// levels.
///
/// The `l κ` terms are linear, so the Hessian is assembled from the
/// per-simplex sums `Σ l α`, each differentiated in its own apex edges.
pub fn regge_hessian(sc: &StarComplex) -> Result<DMatrix<f64>> {
    let l0 = sc.interior_lengths();
    let n = l0.len();
    let mut out = DMatrix::zeros(n, n);
    for (s, base) in sc.simplices().iter().enumerate() {
        let slots: Vec<(usize, usize)> =
            (1..4).filter_map(|k| sc.interior_slot(sc.simplex_vertex(s, k)).map(|i| (k, i))).collect();
        if slots.is_empty() {
            continue;
        }
        let gradient = |x: &[f64]| -> Result<Vec<f64>> {
            let mut simplex = *base;
            for (&(k, _), &v) in slots.iter().zip(x) {
                simplex = simplex.with_length(0, k, v);
            }
            simplex.check(sc.tolerances()).map_err(|msg| Error::Realization { simplex: s, msg })?;
            let real = simplex.lengths().map(|v| Complex::new(v, 0.0));
            Ok(slots
                .iter()
                .map(|&(k, _)| {
                    let mut z = real;
                    z[k - 1].im = COMPLEX_STEP;
                    let mut e = Complex::new(0.0, 0.0);
                    for (p, (i, j)) in PAIRS.iter().enumerate() {
                        e += z[p] * dihedral_angle_complex(&z, *i, *j);
                    }
                    e.im / COMPLEX_STEP
                })
                .collect())
        };
        let x0: Vec<f64> = slots.iter().map(|&(k, _)| base.length(0, k)).collect();
        let mean = base.lengths().iter().sum::<f64>() / 6.0;
        let coarse = jacobian_fd(gradient, &x0, &vec![REGGE_STEP * mean; x0.len()])?;
        let fine = jacobian_fd(gradient, &x0, &vec![REGGE_STEP * mean / 2.0; x0.len()])?;
        let h = (fine * 16.0 - coarse) / 15.0;
        for (a, &(_, i)) in slots.iter().enumerate() {
            for (b, &(_, j)) in slots.iter().enumerate() {
                out[(i, j)] += h[(a, b)];
            }
        }
    }
    Ok(out)
}

/// Outcome of comparing the flex count with the kernel of Λ_P.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RemarkCheck {
    /// `dim ker R − 6`
    pub nontrivial_flexes: usize,
    /// `dim ker Λ_P`
    pub lambda_kernel: usize,
    pub consistent: bool,
    /// Set when a singular value or eigenvalue sits within a factor 100 of
    /// its cut.
    pub borderline: bool,
}

/// Compares the infinitesimal flexes of `mesh` with the kernel of Λ_P.
pub fn remark_cross_check(mesh: &TriMesh, sc: &StarComplex, tol: &Tolerances) -> Result<RemarkCheck> {
    let flex = flex_report(mesh, None, tol)?;
    let lambda = lambda_p(sc)?;
    let near = |v: f64, cut: f64| v.abs() > cut / 100.0 && v.abs() < cut * 100.0;
    let borderline = flex.sigma_kept.is_some_and(|s| near(s, flex.rank_cut))
        || flex.sigma_dropped.is_some_and(|s| near(s, flex.rank_cut))
        || lambda.eigenvalues.iter().any(|&e| near(e, lambda.eig_cut));
    let nontrivial_flexes = flex.kernel_dim.saturating_sub(6);
    Ok(RemarkCheck {
        nontrivial_flexes,
        lambda_kernel: lambda.kernel_dim(),
        consistent: nontrivial_flexes == lambda.kernel_dim(),
        borderline,
    })
}
