//! L¹, L², L^∞ and mass norms of cochains through their Whitney
//! reconstructions.

use serde::{Deserialize, Serialize};

use super::metric::MetricData;
use super::pointwise::{PointForm, PointFrame};
use super::whitney;
use super::DecError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Norms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
    /// Supremum of the pointwise comass.
    pub mass: f64,
}

/// Whitney reconstruction of a `k`-cochain at a point of tetrahedron `t`.
pub fn reconstruct(m: &MetricData, k: usize, omega: &[f64], t: usize, bary: &[f64; 4]) -> PointForm {
    match k {
        0 => PointForm::Zero(whitney::eval0(&m.local0(t, omega), bary)),
        1 => PointForm::One(whitney::eval1(&m.local1(t, omega), bary)),
        2 => PointForm::Two(whitney::eval2(&m.local2(t, omega), bary)),
        _ => PointForm::Three(whitney::eval3(omega[t])),
    }
}

fn check_len(m: &MetricData, k: usize, omega: &[f64]) -> Result<(), DecError> {
    if k > 3 {
        return Err(DecError::BadDegree(k));
    }
    let n = m.complex().count(k);
    if omega.len() != n {
        return Err(DecError::GeometryLength {
            expected: n,
            got: omega.len(),
        });
    }
    Ok(())
}

/// Norms of a `k`-cochain. L² is exact (`ωᵀ M_k ω`); L¹ uses the 4-point
/// degree-2 quadrature on each tetrahedron, which is exact for forms that are
/// constant per cell; L^∞ and mass are exact suprema.
pub fn norms(m: &MetricData, k: usize, omega: &[f64]) -> Result<Norms, DecError> {
    check_len(m, k, omega)?;
    let l2 = m.mass(k).form(omega, omega).max(0.0).sqrt();
    let mut l1 = 0.0;
    let mut linf = 0.0f64;
    let mut mass = 0.0f64;
    for t in 0..m.complex().count(3) {
        let g = m.cell(t);
        for (bary, w) in whitney::quadrature_points() {
            let frame = PointFrame::new(t, bary, g);
            l1 += w * g.volume * frame.norm(reconstruct(m, k, omega, t, &bary));
        }
        // Whitney forms are affine on a cell and norms are convex, so the
        // suprema sit at the corners.
        for i in 0..4 {
            let mut bary = [0.0; 4];
            bary[i] = 1.0;
            let frame = PointFrame::new(t, bary, g);
            let f = reconstruct(m, k, omega, t, &bary);
            linf = linf.max(frame.norm(f));
            mass = mass.max(frame.comass(f));
        }
    }
    Ok(Norms { l1, l2, linf, mass })
}

/// Pointwise norm of the Whitney 2-form of a 2-cochain that is constant on
/// each cell, such as `d₁α`; returns one value per tetrahedron.
pub fn cellwise_norm2(m: &MetricData, omega: &[f64]) -> Vec<f64> {
    (0..m.complex().count(3))
        .map(|t| {
            let w = whitney::eval2(&m.local2(t, omega), &[0.25; 4]);
            m.cell(t).inner2(w, w).max(0.0).sqrt()
        })
        .collect()
}

/// `μ(M)^{1/2} · ‖α‖_∞ / ‖α‖₂`
pub fn sup_l2_ratio(m: &MetricData, alpha: &[f64]) -> Result<f64, DecError> {
    let n = norms(m, 1, alpha)?;
    if n.l2 == 0.0 {
        return Err(DecError::ZeroForm);
    }
    Ok(m.total_volume().sqrt() * n.linf / n.l2)
}
