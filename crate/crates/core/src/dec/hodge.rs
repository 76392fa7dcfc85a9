//! Discrete Hodge decomposition of cochains.

use serde::{Deserialize, Serialize};

use crate::sparse::{conjugate_gradient, norm2};

use super::metric::MetricData;
use super::DecError;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HodgeDecomposition {
    pub exact: Vec<f64>,
    pub coexact: Vec<f64>,
    pub harmonic: Vec<f64>,
}

impl HodgeDecomposition {
    /// Largest pairwise `M_k` inner product relative to the norms.
    pub fn orthogonality_defect(&self, m: &MetricData, k: usize) -> f64 {
        let mk = m.mass(k);
        let parts = [&self.exact, &self.coexact, &self.harmonic];
        let norm: Vec<f64> = parts.iter().map(|p| mk.form(p, p).max(0.0).sqrt()).collect();
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in i + 1..3 {
                if norm[i] > 0.0 && norm[j] > 0.0 {
                    worst = worst.max((mk.form(parts[i], parts[j]) / (norm[i] * norm[j])).abs());
                }
            }
        }
        worst
    }
}

/// Tolerance relative to `‖rhs‖` that stops at `tol · scale` in absolute
/// terms; `None` when the right-hand side is already below it, which
/// happens when `ω` has no component of the requested type.
fn relative_tol(rhs: &[f64], scale: f64, tol: f64) -> Option<f64> {
    let r = norm2(rhs);
    if r <= tol * scale || r == 0.0 {
        None
    } else {
        Some(tol.max(tol * scale / r).min(0.5))
    }
}

/// Splits a `k`-cochain into exact, coexact and harmonic parts that are
/// mutually `M_k`-orthogonal.
///
/// The exact part `d f` solves `(dᵀ M_k d) f = dᵀ M_k ω`; the coexact part is
/// `M_k⁻¹ dᵀ z` with `(d M_k⁻¹ dᵀ) z = d ω`; the harmonic part is the rest.
pub fn hodge_decompose(
    m: &MetricData,
    k: usize,
    omega: &[f64],
    tol: f64,
) -> Result<HodgeDecomposition, DecError> {
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
    let max_iter = 20 * n + 100;

    let exact = if k == 0 {
        vec![0.0; n]
    } else {
        let d = m.d(k - 1);
        let a = d.congruence(m.mass(k));
        let m_omega = m.mass(k).mul_vec(omega);
        let rhs = d.tr_mul_vec(&m_omega);
        match relative_tol(&rhs, norm2(&m_omega), tol) {
            None => vec![0.0; m.complex().count(k)],
            Some(rtol) => {
                let sol = conjugate_gradient(|x| a.mul_vec(x), &rhs, Some(&a.diagonal()), rtol, max_iter)?;
                d.mul_vec(&sol.x)
            }
        }
    };

    let coexact = if k == 3 {
        vec![0.0; n]
    } else {
        let d = m.d(k);
        let rhs = d.mul_vec(omega);
        if let Some(rtol) = relative_tol(&rhs, norm2(omega), tol) {
            let chol = m.mass_cholesky(k)?;
            let apply = |z: &[f64]| -> Vec<f64> { d.mul_vec(&chol.solve(&d.tr_mul_vec(z))) };
            let sol = conjugate_gradient(apply, &rhs, None, rtol, max_iter)?;
            m.mass_solve(k, &d.tr_mul_vec(&sol.x))?
        } else {
            vec![0.0; n]
        }
    };

    let harmonic: Vec<f64> = (0..n).map(|i| omega[i] - exact[i] - coexact[i]).collect();
    Ok(HodgeDecomposition {
        exact,
        coexact,
        harmonic,
    })
}

/// `(‖d_k h‖, ‖d_{k−1}ᵀ M_k h‖)`: both vanish for a harmonic cochain.
pub fn harmonic_defect(m: &MetricData, k: usize, h: &[f64]) -> (f64, f64) {
    let up = if k < 3 { norm2(&m.d(k).mul_vec(h)) } else { 0.0 };
    let down = if k > 0 {
        norm2(&m.d(k - 1).tr_mul_vec(&m.mass(k).mul_vec(h)))
    } else {
        0.0
    };
    (up, down)
}
