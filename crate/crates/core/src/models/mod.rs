//! Model geometries: the flat torus, Berger spheres, the cusp-like warped
//! product, and small fixtures.

pub mod berger;
pub mod cusp;
pub mod fixtures;
pub mod torus;

use thiserror::Error;

use crate::complex::ComplexError;
use crate::dec::DecError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Dec(#[from] DecError),
    #[error("{model} needs resolution at least {min}, got {got}")]
    Resolution {
        model: &'static str,
        min: usize,
        got: usize,
    },
    #[error("{name} = {value} outside {range}")]
    Parameter {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("generated tetrahedron {tet} is degenerate")]
    Degenerate { tet: usize },
}

/// A generated geometry and its resolution parameters.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum ModelSpec {
    Torus { n: usize },
    Berger { epsilon: f64, n: usize },
    Cusp { epsilon: f64, sphere_level: usize, layers: usize },
}

impl ModelSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::Torus { .. } => "torus",
            ModelSpec::Berger { .. } => "berger",
            ModelSpec::Cusp { .. } => "cusp",
        }
    }
}

/// Meshes a model. The complex is owned by the returned metric data.
pub fn generate_mesh(spec: &ModelSpec) -> Result<crate::dec::MetricData, ModelError> {
    match *spec {
        ModelSpec::Torus { n } => torus::flat_torus(n),
        ModelSpec::Berger { epsilon, n } => Ok(berger::berger_mesh(&berger::BergerModel::new(epsilon)?, n)?.metric),
        ModelSpec::Cusp {
            epsilon,
            sphere_level,
            layers,
        } => {
            let model = cusp::CuspModel::new(epsilon, cusp::MIN_GRID)?;
            Ok(cusp::cusp_mesh(&model, sphere_level, layers)?.metric)
        }
    }
}
