//! Monte Carlo estimates along `n` random trajectories of length `T`.
//!
//! Starting points are drawn from the Riemannian volume: a tetrahedron with
//! probability proportional to its volume, then a uniform barycentric point.
//! Trajectory `i` uses its own ChaCha stream, so results do not depend on
//! the number of threads.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dec::{norms, MetricData};
use crate::homology::HomologyBasis;

use super::closing::{close_and_unroll, ClosingOptions};
use super::field::{beta_primitive, build_vector_field};
use super::trajectory::{integrate_trajectory, FlowCurve, TrajectoryOptions};
use super::FlowError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloConfig {
    pub n: usize,
    pub time: f64,
    pub seed: u64,
    /// Number of batches for the batch-means standard errors.
    pub batches: usize,
    /// Build and fill `Γ(n,T)`.
    pub close: bool,
    pub closing: ClosingOptions,
    pub trajectory: TrajectoryOptions,
    /// Relative tolerance of the primitive solve.
    pub beta_tol: f64,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        Self {
            n: 256,
            time: 4.0,
            seed: 7,
            batches: 16,
            close: true,
            closing: ClosingOptions::default(),
            trajectory: TrajectoryOptions::default(),
            beta_tol: 1e-10,
        }
    }
}

/// Estimates along the constructed curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Items {
    /// `l(γ(n,T)) / nT`, target `‖dα‖₁`.
    pub dalpha_l1_via_length: f64,
    /// `(1/nT) ∫_{γ(n,T)} β`, target `‖α‖₂²`.
    pub alpha_l2sq_via_beta: f64,
    /// `l(ν(n,T)) / nT`, target 0.
    pub nu_fraction: f64,
    /// `maxⱼ |⟨βⱼ, Γ⟩|`, target 0.
    pub homology_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StokesCheck {
    /// `(1/nT) ∫_Γ β`
    pub lhs: f64,
    /// `(A(Γ)/nT) ‖α‖_∞`
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainCheck {
    /// `‖dα‖₁ ‖α‖_∞`
    pub lhs: f64,
    /// `ρ̂ ‖α‖₂² (1 − 5 s)` with `s` the relative standard error of the β estimate.
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloReport {
    pub n: usize,
    pub time: f64,
    pub seed: u64,
    pub estimates: Items,
    pub targets: Items,
    pub errors: Items,
    /// Batch-means standard errors of the length and β estimates.
    pub stderr_length: f64,
    pub stderr_beta: f64,
    pub alpha_linf: f64,
    pub beta_fit_residual: f64,
    pub beta_normalization: f64,
    pub jitters: usize,
    pub stalled: usize,
    pub curve_length: Option<f64>,
    pub filling_area: Option<f64>,
    pub r_used: Option<u64>,
    /// `max |∂₂S − r·Γ|` of the filling chain.
    pub boundary_residual: Option<f64>,
    pub rho_hat: Option<f64>,
    pub unrolling: Vec<i64>,
    pub stokes: Option<StokesCheck>,
    pub chain: Option<ChainCheck>,
}

/// Uniform point of the standard simplex.
fn uniform_barycentric(rng: &mut ChaCha8Rng) -> [f64; 4] {
    let mut e: [f64; 4] = std::array::from_fn(|_| -(1.0 - rng.random::<f64>()).ln());
    let s: f64 = e.iter().sum();
    for c in e.iter_mut() {
        *c /= s;
    }
    e
}

/// `n` trajectories from volume-distributed starting points.
pub fn sample_trajectories(
    m: &MetricData,
    field: &super::VectorField,
    n: usize,
    time: f64,
    seed: u64,
    opts: &TrajectoryOptions,
) -> Result<Vec<FlowCurve>, FlowError> {
    let weights = WeightedIndex::new(m.volumes()).map_err(|e| FlowError::Config(e.to_string()))?;
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let t = weights.sample(&mut rng);
            let bary = uniform_barycentric(&mut rng);
            integrate_trajectory(m, field, t, bary, time, opts)
        })
        .collect()
}

/// Mean and batch-means standard error.
fn batch_stats(values: &[f64], batches: usize) -> (f64, f64) {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let b = batches.min(n).max(1);
    if b < 2 {
        return (mean, f64::NAN);
    }
    let means: Vec<f64> = (0..b)
        .map(|k| {
            let (lo, hi) = (k * n / b, (k + 1) * n / b);
            values[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect();
    let mm = means.iter().sum::<f64>() / b as f64;
    let var = means.iter().map(|x| (x - mm).powi(2)).sum::<f64>() / (b - 1) as f64;
    (mean, (var / b as f64).sqrt())
}

/// Runs the probabilistic construction for a coexact 1-cochain `α`.
/// Estimates are scaled by `vol(M)`, so they target the unnormalised
/// integrals.
pub fn run_monte_carlo(
    m: &MetricData,
    h: &HomologyBasis,
    alpha: &[f64],
    cfg: &MonteCarloConfig,
) -> Result<MonteCarloReport, FlowError> {
    if cfg.n == 0 {
        return Err(FlowError::NoTrajectories);
    }
    if !(cfg.time > 0.0) || !cfg.time.is_finite() {
        return Err(FlowError::Config(format!("time must be positive, got {}", cfg.time)));
    }
    let field = build_vector_field(m, alpha)?;
    let beta = beta_primitive(m, alpha, cfg.beta_tol)?;
    let vol = m.total_volume();
    let na = norms(m, 1, alpha)?;
    let dalpha = m.d(1).mul_vec(alpha);
    let nd = norms(m, 2, &dalpha)?;

    let curves = sample_trajectories(m, &field, cfg.n, cfg.time, cfg.seed, &cfg.trajectory)?;
    let lengths: Vec<f64> = curves.iter().map(|c| vol * c.length / cfg.time).collect();
    let betas: Vec<f64> = curves
        .iter()
        .map(|c| vol * c.line_integral(m, &beta.beta) / cfg.time)
        .collect();
    let (len_mean, len_se) = batch_stats(&lengths, cfg.batches);
    let (beta_mean, beta_se) = batch_stats(&betas, cfg.batches);
    let jitters = curves.iter().map(|c| c.jitters).sum();
    let stalled = curves.iter().filter(|c| c.stalled).count();

    let alpha_l2sq = na.l2 * na.l2;
    let mut estimates = Items {
        dalpha_l1_via_length: len_mean,
        alpha_l2sq_via_beta: beta_mean,
        nu_fraction: f64::NAN,
        homology_residual: f64::NAN,
    };
    let mut report_extra = (None, None, None, None, None, Vec::new(), None, None);
    if cfg.close {
        let nt = cfg.n as f64 * cfg.time;
        let cons = close_and_unroll(m, h, curves, &cfg.closing)?;
        estimates.nu_fraction = cons.nu_part_length / nt;
        estimates.homology_residual = cons.homology_residual;
        let length = cons.length();
        let area = cons.filling_area();
        let stokes = area.map(|a| StokesCheck {
            lhs: cons.line_integral(m, h, &beta.beta) / nt,
            rhs: a / nt * na.linf,
        });
        let rho = cons.ratio();
        let chain = rho.map(|rho| {
            let rel = beta_se / alpha_l2sq;
            let lhs = nd.l1 * na.linf;
            let rhs = rho * alpha_l2sq * (1.0 - 5.0 * rel);
            ChainCheck {
                lhs,
                rhs,
                holds: lhs >= rhs,
            }
        });
        report_extra = (
            Some(length),
            area,
            cons.filling.as_ref().map(|f| f.r_used),
            cons.filling.as_ref().map(|f| f.boundary_residual),
            rho,
            cons.unrolling.clone(),
            stokes,
            chain,
        );
    }
    let targets = Items {
        dalpha_l1_via_length: nd.l1,
        alpha_l2sq_via_beta: alpha_l2sq,
        nu_fraction: 0.0,
        homology_residual: 0.0,
    };
    let errors = Items {
        dalpha_l1_via_length: (estimates.dalpha_l1_via_length - targets.dalpha_l1_via_length).abs(),
        alpha_l2sq_via_beta: (estimates.alpha_l2sq_via_beta - targets.alpha_l2sq_via_beta).abs(),
        nu_fraction: estimates.nu_fraction.abs(),
        homology_residual: estimates.homology_residual.abs(),
    };
    let (curve_length, filling_area, r_used, boundary_residual, rho_hat, unrolling, stokes, chain) = report_extra;
    Ok(MonteCarloReport {
        n: cfg.n,
        time: cfg.time,
        seed: cfg.seed,
        estimates,
        targets,
        errors,
        stderr_length: len_se,
        stderr_beta: beta_se,
        alpha_linf: na.linf,
        beta_fit_residual: beta.fit_residual,
        beta_normalization: beta.normalization,
        jitters,
        stalled,
        curve_length,
        filling_area,
        r_used,
        boundary_residual,
        rho_hat,
        unrolling,
        stokes,
        chain,
    })
}

/// Occupation-time fractions of an ensemble of trajectories against volume
/// fractions, over `groups` bins of consecutive tetrahedra; returns the
/// largest relative deviation. Invariance of the volume under the flow makes
/// the expected fractions equal at every time.
pub fn occupation_deviation(m: &MetricData, curves: &[FlowCurve], groups: usize) -> f64 {
    let nt = m.complex().count(3);
    let mut occ = vec![0.0; nt];
    let mut total = 0.0;
    for c in curves {
        for (o, x) in occ.iter_mut().zip(c.occupation(nt)) {
            *o += x;
        }
        total += c.total_time;
    }
    let vols = m.volumes();
    let tv = m.total_volume();
    let g = groups.clamp(1, nt);
    (0..g)
        .map(|k| {
            let (lo, hi) = (k * nt / g, (k + 1) * nt / g);
            let o: f64 = occ[lo..hi].iter().sum::<f64>() / total;
            let v: f64 = vols[lo..hi].iter().sum::<f64>() / tv;
            (o - v).abs() / v
        })
        .fold(0.0, f64::max)
}
