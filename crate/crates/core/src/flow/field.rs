//! Piecewise-constant vector fields on tetrahedral meshes.

use serde::{Deserialize, Serialize};

use crate::dec::{inv3, mat_vec, whitney, MetricData, Vec3};
use crate::sparse::{max_abs, minres};

use super::FlowError;

/// One constant vector per tetrahedron, in the reference coordinates
/// `ξ = (λ₁, λ₂, λ₃)` of that tetrahedron.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VectorField {
    pub vectors: Vec<Vec3>,
    /// Flux 2-cochain the field was built from, when there is one.
    pub flux: Option<Vec<f64>>,
}

impl VectorField {
    pub fn zero(m: &MetricData) -> Self {
        Self {
            vectors: vec![[0.0; 3]; m.complex().count(3)],
            flux: None,
        }
    }

    /// The field whose interior product with the volume form is the Whitney
    /// 2-form of `flux`. The flux must be closed (`d₂ flux = 0`) for the
    /// field to be constant on cells; the barycentre value is used.
    pub fn from_flux(m: &MetricData, flux: &[f64]) -> Result<Self, FlowError> {
        let nf = m.complex().count(2);
        if flux.len() != nf {
            return Err(crate::dec::DecError::GeometryLength {
                expected: nf,
                got: flux.len(),
            }
            .into());
        }
        let vectors = (0..m.complex().count(3))
            .map(|t| {
                let w = whitney::eval2(&m.local2(t, flux), &[0.25; 4]);
                let g = m.cell(t);
                let s = g.orientation / g.det.sqrt();
                w.map(|c| s * c)
            })
            .collect();
        Ok(Self {
            vectors,
            flux: Some(flux.to_vec()),
        })
    }

    /// Field given by an ambient vector per tetrahedron, expressed in the
    /// tetrahedron's chart.
    pub fn from_ambient<F>(m: &MetricData, f: F) -> Result<Self, FlowError>
    where
        F: Fn(usize) -> Vec3,
    {
        let charts = m.charts().ok_or(FlowError::NoCharts)?;
        let vectors = charts
            .iter()
            .enumerate()
            .map(|(t, c)| {
                let mut j = [[0.0; 3]; 3];
                for (col, p) in c[1..].iter().enumerate() {
                    for k in 0..3 {
                        j[k][col] = p[k] - c[0][k];
                    }
                }
                let ji = inv3(&j).ok_or(crate::dec::DecError::DegenerateCell { tet: t })?;
                Ok(mat_vec(&ji, f(t)))
            })
            .collect::<Result<_, FlowError>>()?;
        Ok(Self { vectors, flux: None })
    }

    pub fn negated(&self) -> Self {
        Self {
            vectors: self.vectors.iter().map(|v| v.map(|c| -c)).collect(),
            flux: self.flux.as_ref().map(|f| f.iter().map(|c| -c).collect()),
        }
    }

    /// `dλᵢ/dt` inside tetrahedron `t`.
    pub fn rates(&self, t: usize) -> [f64; 4] {
        let x = self.vectors[t];
        [-(x[0] + x[1] + x[2]), x[0], x[1], x[2]]
    }

    /// `|X|` in the metric of tetrahedron `t`.
    pub fn speed(&self, m: &MetricData, t: usize) -> f64 {
        m.cell(t).vector_length(self.vectors[t])
    }

    /// `∫ |X| dμ`
    pub fn l1_speed(&self, m: &MetricData) -> f64 {
        (0..self.vectors.len())
            .map(|t| m.cell(t).volume * self.speed(m, t))
            .sum()
    }

    pub fn is_zero(&self) -> bool {
        self.vectors.iter().all(|v| v.iter().all(|&c| c == 0.0))
    }
}

/// `X = (⋆dα)♯` for a real 1-cochain `α`. Its flux through every triangle
/// is the value of `d₁α` there, shared by both cofaces.
pub fn build_vector_field(m: &MetricData, alpha: &[f64]) -> Result<VectorField, FlowError> {
    m.complex().require_closed_3manifold()?;
    let flux = m.d(1).mul_vec(alpha);
    if max_abs(&flux) == 0.0 {
        log::warn!("dα = 0: the flow is trivial");
        let mut field = VectorField::zero(m);
        field.flux = Some(flux);
        return Ok(field);
    }
    VectorField::from_flux(m, &flux)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaPrimitive {
    pub beta: Vec<f64>,
    /// `‖D₁β − σ‖ / ‖σ‖` in the `M₂` norm, `σ` the discrete `⋆α`.
    pub fit_residual: f64,
    /// Factor applied so that `∫ W(β) ∧ W(dα) = ‖α‖₂²` holds exactly.
    pub normalization: f64,
    pub iterations: usize,
}

/// A 1-cochain `β` with `dβ ≈ ⋆α`.
///
/// The discrete `⋆α` is the 2-cochain `σ = M₂⁻¹ C α`, the `L²` projection of
/// `⋆W(α)` onto Whitney 2-forms (`C` is the wedge pairing of 2- and
/// 1-forms). `β` is the `M₁`-minimum-norm least-squares solution of
/// `D₁β = σ`, i.e. of `D₁ᵀM₂D₁ β = D₁ᵀ C α`, found by MINRES. It is then
/// scaled by a factor close to one so the pairing identity with `dα` is
/// exact at the discrete level.
///
/// A Galerkin formulation through the wedge pairing alone is not used: the
/// Whitney curl pairing `D₁ᵀC` has a large spurious kernel.
pub fn beta_primitive(m: &MetricData, alpha: &[f64], tol: f64) -> Result<BetaPrimitive, FlowError> {
    let c = m.wedge21_matrix();
    let d1 = m.d(1);
    let m2 = m.mass(2);
    let c_alpha = c.mul_vec(alpha);
    let rhs = d1.tr_mul_vec(&c_alpha);
    let chol = m.mass_cholesky(1)?;
    let apply = |x: &[f64]| d1.tr_mul_vec(&m2.mul_vec(&d1.mul_vec(x)));
    let sol = minres(apply, |r: &[f64]| chol.solve(r), &rhs, tol, 20 * alpha.len() + 100)?;
    let mut beta = sol.x;

    let sigma = m.mass_solve(2, &c_alpha)?;
    let mut diff = d1.mul_vec(&beta);
    for (d, s) in diff.iter_mut().zip(&sigma) {
        *d -= s;
    }
    let sigma_norm = m2.form(&sigma, &sigma).max(0.0).sqrt();
    if sigma_norm == 0.0 || max_abs(&rhs) == 0.0 {
        return Err(crate::dec::DecError::ZeroForm.into());
    }
    let fit_residual = m2.form(&diff, &diff).max(0.0).sqrt() / sigma_norm;
    if fit_residual > 0.5 {
        return Err(FlowError::PrimitiveResidual {
            residual: fit_residual,
            tol: 0.5,
        });
    }
    let pairing = beta.iter().zip(&rhs).map(|(b, r)| b * r).sum::<f64>();
    let normalization = m.mass(1).form(alpha, alpha) / pairing;
    for b in beta.iter_mut() {
        *b *= normalization;
    }
    log::debug!("primitive: fit residual {fit_residual:.3e}, normalization {normalization:.6}");
    Ok(BetaPrimitive {
        beta,
        fit_residual,
        normalization,
        iterations: sol.iterations,
    })
}
