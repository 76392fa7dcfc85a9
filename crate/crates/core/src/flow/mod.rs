//! Flow of the vector field `X = (⋆dα)♯`: exact integration of the
//! piecewise-constant field, closing and homological unrolling of
//! trajectories, and the Monte Carlo estimates built on them.

pub mod closing;
pub mod field;
pub mod montecarlo;
pub mod trajectory;

pub use closing::{close_and_unroll, ClosedConstruction, ClosingOptions};
pub use field::{beta_primitive, build_vector_field, BetaPrimitive, VectorField};
pub use montecarlo::{run_monte_carlo, MonteCarloConfig, MonteCarloReport};
pub use trajectory::{integrate_trajectory, snap_vertex, FlowCurve, Segment, TrajectoryOptions};

use thiserror::Error;

use crate::complex::ComplexError;
use crate::dec::DecError;
use crate::filling::FillingError;
use crate::homology::HomologyError;
use crate::sparse::SolveError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Dec(#[from] DecError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error(transparent)]
    Filling(#[from] FillingError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("start point is not a valid barycentric point of tetrahedron {tet}")]
    BadStart { tet: usize },
    #[error("negative integration time {0}")]
    NegativeTime(f64),
    #[error("trajectory left the complex through a boundary face of tetrahedron {tet}")]
    Boundary { tet: usize },
    #[error("trajectory exceeded {0} segments")]
    SegmentLimit(usize),
    #[error("mesh has no charts; ambient vectors cannot be converted")]
    NoCharts,
    #[error("need at least one trajectory")]
    NoTrajectories,
    #[error(
        "dual cocycle integration inaccurate (rounding residual {residual:.3e}), refine mesh or quadrature"
    )]
    Rounding { residual: f64 },
    #[error("primitive solve residual {residual:.3e} exceeds {tol:.1e}; is α coexact?")]
    PrimitiveResidual { residual: f64, tol: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
}
