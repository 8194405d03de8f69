//! Infinitesimal rigidity of triangulated polyhedra and numerical certificates
//! for the positivity of their cone-angle Jacobians.
//!
//! The crate is organised bottom-up:
//!
//! - [`mesh`]: triangulated surfaces, OFF/OBJ input, weak convexity and star
//!   decompositions from an apex vertex.
//! - [`geom`]: simplices from edge lengths, 3D convex hulls, projected triangles.
//! - [`rigidity`]: bar-joint rigidity matrices, Killing fields, flex reports.
//! - [`lambda`]: cone angles around interior edges of a star decomposition, the
//!   matrix of their length derivatives and the Regge energy.
//! - [`hat`]: hats over the plane `z = 0`, height-parametrized cone angles,
//!   the analytic matrix of convex hats and excavation/completion chains.
//! - [`projective`]: the projective map sending the apex to vertical infinity,
//!   Killing-field transport and the homotopy from the identity.
//! - [`gallery`] and [`report`]: test-shape generators and the JSON report.

pub mod error;
pub mod gallery;
pub mod geom;
pub mod hat;
pub mod lambda;
pub mod mesh;
pub mod projective;
pub mod report;
pub mod rigidity;
pub mod spectral;
pub mod tolerance;

pub use error::{Error, Result};
pub use geom::{ProjectedTriangle, SimplexLengths};
pub use hat::{ExcavationStep, GeneralizedHat, Hat};
pub use mesh::{StarComplex, TriMesh};
pub use rigidity::{FlexReport, KillingField};
pub use spectral::CurvatureMatrix;
pub use tolerance::Tolerances;

/// 3D point / vector type used throughout.
pub type Vec3 = nalgebra::Vector3<f64>;
