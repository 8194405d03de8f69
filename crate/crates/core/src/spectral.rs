//! Symmetric matrices with spectral summaries, and the finite-difference
//! Jacobian used for every curvature matrix.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::{Error, Result, Tolerances};

/// Counts of positive, zero and negative eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub positive: usize,
    pub zero: usize,
    pub negative: usize,
}

/// Square symmetric matrix indexed by mesh elements, with its spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureMatrix {
    /// Vertex (or interior-edge endpoint) attached to each row.
    pub labels: Vec<usize>,
    /// Row-major entries after symmetrization.
    pub entries: Vec<Vec<f64>>,
    /// `max|A - Aᵀ| / max|A|` before symmetrization.
    pub symmetry_defect: f64,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub signature: Signature,
    /// Eigenvalues with absolute value at or below this count as zero.
    pub eig_cut: f64,
}

impl CurvatureMatrix {
    /// Symmetrizes `a`, records the defect and classifies the spectrum.
    ///
    /// The zero cut is `tol.eig × max(max|λ|, natural_scale)`; `natural_scale`
    /// is the typical magnitude of an entry for the geometry at hand, so that
    /// a matrix that is zero up to noise is not rescaled into a full rank one.
    pub fn from_matrix(labels: Vec<usize>, a: &DMatrix<f64>, natural_scale: f64, tol: &Tolerances) -> Self {
        assert!(a.is_square() && a.nrows() == labels.len(), "one label per row");
        let max_abs = a.amax();
        let defect = (a - a.transpose()).amax();
        let symmetry_defect = if max_abs > 0.0 { defect / max_abs } else { 0.0 };
        let s = (a + a.transpose()) * 0.5;
        let mut eigenvalues: Vec<f64> = if s.nrows() == 0 {
            Vec::new()
        } else {
            SymmetricEigen::new(s.clone()).eigenvalues.iter().copied().collect()
        };
        eigenvalues.sort_by(f64::total_cmp);
        let top = eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let eig_cut = tol.eig * top.max(natural_scale.abs());
        let signature = Signature {
            positive: eigenvalues.iter().filter(|&&v| v > eig_cut).count(),
            zero: eigenvalues.iter().filter(|&&v| v.abs() <= eig_cut).count(),
            negative: eigenvalues.iter().filter(|&&v| v < -eig_cut).count(),
        };
        let entries = s.row_iter().map(|r| r.iter().copied().collect()).collect();
        Self { labels, entries, symmetry_defect, eigenvalues, signature, eig_cut }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.entries[i][j])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i][j]
    }

    pub fn min_eigenvalue(&self) -> Option<f64> {
        self.eigenvalues.first().copied()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Empty matrices are positive definite.
    pub fn is_positive_definite(&self) -> bool {
        self.signature.positive == self.dim()
    }

    pub fn kernel_dim(&self) -> usize {
        self.signature.zero
    }

    /// Row of `label`, if present.
    pub fn index_of(&self, label: usize) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }
}

/// Jacobian `∂f_i/∂x_j` by central differences at steps `δ_j` and `δ_j / 2`
/// combined by one Richardson step. A column whose stencil leaves the domain
/// is retried once with `δ_j / 10`.
pub fn jacobian_fd<F>(f: F, x0: &[f64], steps: &[f64]) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    assert_eq!(x0.len(), steps.len());
    let n = x0.len();
    let m = if n == 0 { 0 } else { f(x0)?.len() };
    let mut jac = DMatrix::zeros(m, n);
    for j in 0..n {
        let col = match fd_column(&f, x0, j, steps[j]) {
            Ok(c) => c,
            Err(_) => fd_column(&f, x0, j, steps[j] / 10.0).map_err(|e| match e {
                Error::Realization { simplex, msg } => {
                    Error::Realization { simplex, msg: format!("finite-difference stencil of coordinate {j}: {msg}") }
                }
                other => other,
            })?,
        };
        if col.len() != m {
            return Err(Error::Inconsistency("function output length changed".into()));
        }
        jac.set_column(j, &col);
    }
    Ok(jac)
}

fn fd_column<F>(f: &F, x0: &[f64], j: usize, delta: f64) -> Result<DVector<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let central = |d: f64| -> Result<DVector<f64>> {
        let mut xp = x0.to_vec();
        let mut xm = x0.to_vec();
        xp[j] += d;
        xm[j] -= d;
        let fp = DVector::from_vec(f(&xp)?);
        let fm = DVector::from_vec(f(&xm)?);
        Ok((fp - fm) / (2.0 * d))
    };
    let coarse = central(delta)?;
    let fine = central(delta / 2.0)?;
    Ok((fine * 4.0 - coarse) / 3.0)
}
