//! Discrete exterior calculus on tetrahedral meshes with Whitney forms.
//!
//! "Mass" below follows the naming of the source inequality; in geometric
//! measure theory the same quantity is called the comass.

pub mod hodge;
pub mod metric;
pub mod norms;
pub mod pointwise;
pub mod whitney;

use thiserror::Error;

use crate::complex::ComplexError;
use crate::sparse::SolveError;

pub use hodge::{harmonic_defect, hodge_decompose, HodgeDecomposition};
pub use metric::{
    assemble_metric, det3, inv3, mat_vec, CellGeometry, Geometry, Mat3, Measures, MetricData,
    TetGeometry,
};
pub use whitney::Vec3;
pub use norms::{norms, sup_l2_ratio, Norms};
pub use pointwise::{PointForm, PointFrame};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("tetrahedron {tet} is degenerate (non-positive volume or invalid metric)")]
    DegenerateCell { tet: usize },
    #[error("geometry has {got} entries, expected {expected}")]
    GeometryLength { expected: usize, got: usize },
    #[error("metric data needs a 3-dimensional complex")]
    NotThreeDimensional,
    #[error("metric tensor is not positive definite")]
    NotPositiveDefinite,
    #[error("wedge product of total degree {0} exceeds the dimension")]
    DegreeOverflow(usize),
    #[error("interior product of a 0-form")]
    DegreeUnderflow,
    #[error("form degree {0} out of range")]
    BadDegree(usize),
    #[error("form is identically zero")]
    ZeroForm,
}
