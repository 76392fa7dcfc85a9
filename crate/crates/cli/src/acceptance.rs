//! The acceptance suite run by `verify-all`: eleven end-to-end checks, each
//! reported as one pass/fail line.

use std::f64::consts::{E, PI};
use std::time::Instant;

use coexact::complex::{build_complex, build_surface, chain_complex_identity_holds, Chain, SimplicialComplex};
use coexact::dec::{Measures, MetricData};
use coexact::filling::{min_filling_area, FillingOptions};
use coexact::flow::{run_monte_carlo, MonteCarloConfig, MonteCarloReport};
use coexact::homology::{classify_cycle, fundamental_cycles, homology_basis, TrivialOrder};
use coexact::models::berger::{berger_mesh, berger_spectrum_invariant, BergerModel};
use coexact::models::cusp::{cusp_eigenvalue, cusp_mesh, CuspModel, MIN_GRID};
use coexact::models::fixtures::{
    four_simplex_boundary, octahedron, octahedron_equator, octahedron_measures, rp2, rp2_measures,
    seven_vertex_torus, single_tetrahedron, tetrahedron_surface,
};
use coexact::models::torus::{flat_torus, torus_eigenform};
use coexact::spectra::{coexact_spectrum, SpectralOptions};
use serde::Serialize;

use crate::commands::run;
use crate::config::{CommandKind, ExperimentConfig, ModelName};
use crate::formats::{Mesh, MeshFile};

/// Resolutions used by the Berger criteria.
pub const BERGER_SPECTRUM_N: usize = 6;
pub const BERGER_FIBRE_N: usize = 4;
/// Torus resolution and run size of the converged Monte Carlo run.
pub const FLOW_N: usize = 8;
pub const CONVERGED_TRAJECTORIES: usize = 1024;
pub const CONVERGED_TIME: f64 = 8.0;

#[derive(Clone, Debug)]
pub struct Criterion {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Criterion {
    pub fn line(&self) -> String {
        format!(
            "{} {:>2}  {:<28} {:>6.1}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds,
            self.detail
        )
    }
}

#[derive(Serialize)]
pub struct SummaryRow {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Serialize)]
pub struct Summary {
    pub passed: usize,
    pub total: usize,
    pub criteria: Vec<SummaryRow>,
}

impl From<&Vec<Criterion>> for Summary {
    fn from(c: &Vec<Criterion>) -> Self {
        Self {
            passed: c.iter().filter(|c| c.passed).count(),
            total: c.len(),
            criteria: c
                .iter()
                .map(|c| SummaryRow {
                    id: c.id,
                    name: c.name,
                    passed: c.passed,
                    detail: c.detail.clone(),
                })
                .collect(),
        }
    }
}

type Check = Result<(bool, String), String>;
type CheckFn = fn(&mut Context) -> Check;

/// Shared state: the converged Monte Carlo run feeds criteria 8 to 10.
#[derive(Default)]
pub struct Context {
    torus: Option<(MetricData, Vec<f64>)>,
    converged: Option<Result<MonteCarloReport, String>>,
}

impl Context {
    fn torus(&mut self) -> Result<&(MetricData, Vec<f64>), String> {
        if self.torus.is_none() {
            let m = flat_torus(FLOW_N).map_err(|e| e.to_string())?;
            let a = torus_eigenform(&m, FLOW_N, 1.0).map_err(|e| e.to_string())?;
            self.torus = Some((m, a));
        }
        Ok(self.torus.as_ref().expect("set above"))
    }

    fn converged(&mut self) -> Result<MonteCarloReport, String> {
        if self.converged.is_none() {
            let r = self.torus().and_then(|(m, a)| {
                let h = homology_basis(m.complex()).map_err(|e| e.to_string())?;
                let cfg = MonteCarloConfig {
                    n: CONVERGED_TRAJECTORIES,
                    time: CONVERGED_TIME,
                    seed: 7,
                    ..MonteCarloConfig::default()
                };
                run_monte_carlo(m, &h, a, &cfg).map_err(|e| e.to_string())
            });
            self.converged = Some(r);
        }
        self.converged.clone().expect("set above")
    }
}

pub const CRITERIA: [(usize, &str, CheckFn); 11] = [
    (1, "chain complex identity", chain_identity),
    (2, "homology oracles", homology_oracles),
    (3, "flat torus spectrum", torus_spectrum),
    (4, "berger eigenvalue", berger_eigenvalue),
    (5, "berger cheeger bounds", berger_cheeger),
    (6, "cusp collapse", cusp_collapse),
    (7, "filling lp vs ilp", filling_lp_vs_ilp),
    (8, "monte carlo lln", monte_carlo_lln),
    (9, "homological triviality", homological_triviality),
    (10, "chain inequality", chain_inequality),
    (11, "determinism", determinism),
];

fn evaluate(id: usize, name: &'static str, f: CheckFn, ctx: &mut Context) -> Criterion {
    let start = Instant::now();
    let (passed, detail) = match f(ctx) {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    Criterion {
        id,
        name,
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// Runs every criterion in order, reporting each as it finishes.
pub fn run_all(mut progress: impl FnMut(&Criterion)) -> Vec<Criterion> {
    let mut ctx = Context::default();
    CRITERIA
        .iter()
        .map(|&(id, name, f)| {
            let c = evaluate(id, name, f, &mut ctx);
            progress(&c);
            c
        })
        .collect()
}

/// Runs a single criterion.
pub fn run_one(id: usize) -> Option<Criterion> {
    let mut ctx = Context::default();
    CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .map(|&(id, name, f)| evaluate(id, name, f, &mut ctx))
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn same_metric(a: &MetricData, b: &MetricData) -> bool {
    a.complex().to_data() == b.complex().to_data()
        && a.cells().iter().zip(b.cells()).all(|(x, y)| x.gram == y.gram)
        && a.measures() == b.measures()
        && a.cells().len() == b.cells().len()
}

/// Criterion 1: ∂∂ = 0 on generated meshes, fixtures and meshes read back
/// from JSON and OFF.
fn chain_identity(_: &mut Context) -> Check {
    let mut complexes: Vec<(String, SimplicialComplex)> = Vec::new();
    let mut roundtrip_failures = Vec::new();

    for n in [3, 4, 8] {
        let m = flat_torus(n).map_err(err)?;
        let file = MeshFile::from_metric(&m, serde_json::Value::Null, Vec::new());
        match MeshFile::from_json(&file.to_json()).and_then(|f| f.to_mesh()) {
            Ok(Mesh::Metric(back)) if same_metric(&m, &back) => {
                complexes.push((format!("torus {n} (json)"), back.complex().clone()))
            }
            _ => roundtrip_failures.push(format!("torus {n} json")),
        }
        complexes.push((format!("torus {n}"), m.complex().clone()));
    }
    for (eps, n) in [(1.0, 2), (0.5, 4)] {
        let bm = berger_mesh(&BergerModel::new(eps).map_err(err)?, n).map_err(err)?;
        let vertices: Vec<Vec<f64>> = bm.positions.iter().map(|p| p.to_vec()).collect();
        let file = MeshFile::from_metric(&bm.metric, serde_json::Value::Null, vertices.clone());
        match MeshFile::from_json(&file.to_json()).and_then(|f| f.to_mesh()) {
            Ok(Mesh::Metric(back)) if same_metric(&bm.metric, &back) => {}
            _ => roundtrip_failures.push(format!("berger {eps} json")),
        }
        // OFF keeps positions and oriented connectivity.
        let off = MeshFile::from_complex(bm.metric.complex(), serde_json::Value::Null, vertices.clone());
        match off.to_off().and_then(|t| MeshFile::from_off(&t)) {
            Ok(back) => {
                let cx = build_complex(back.resolved_vertex_count(), &back.tets).map_err(err)?;
                if back.vertices != vertices || cx.to_data() != bm.metric.complex().to_data() {
                    roundtrip_failures.push(format!("berger {eps} off"));
                }
                complexes.push((format!("berger {eps} (off)"), cx));
            }
            Err(_) => roundtrip_failures.push(format!("berger {eps} off")),
        }
        complexes.push((format!("berger {eps} n={n}"), bm.metric.complex().clone()));
    }
    for (eps, level, layers) in [(E.powi(-2), 1, 4), (E.powi(-5), 2, 8)] {
        let cm = cusp_mesh(&CuspModel::new(eps, MIN_GRID).map_err(err)?, level, layers).map_err(err)?;
        complexes.push((format!("cusp {eps:.4}"), cm.metric.complex().clone()));
    }
    complexes.push(("boundary 4-simplex".into(), four_simplex_boundary()));
    complexes.push(("tetrahedron".into(), single_tetrahedron().0));
    complexes.push(("rp2".into(), rp2()));
    complexes.push(("tetrahedron surface".into(), tetrahedron_surface().0));
    complexes.push(("seven-vertex torus".into(), seven_vertex_torus().0));
    let (oct, pos) = octahedron();
    let vertices: Vec<Vec<f64>> = pos.iter().map(|p| p.to_vec()).collect();
    let off = MeshFile::from_complex(&oct, serde_json::Value::Null, vertices.clone());
    match off.to_off().and_then(|t| MeshFile::from_off(&t)) {
        Ok(back) => {
            let cx = build_surface(back.resolved_vertex_count(), &back.triangles).map_err(err)?;
            if back.vertices != vertices || cx.to_data() != oct.to_data() {
                roundtrip_failures.push("octahedron off".into());
            }
            complexes.push(("octahedron (off)".into(), cx));
        }
        Err(_) => roundtrip_failures.push("octahedron off".into()),
    }
    complexes.push(("octahedron".into(), oct));

    let bad: Vec<&str> = complexes
        .iter()
        .filter(|(_, cx)| !chain_complex_identity_holds(cx))
        .map(|(n, _)| n.as_str())
        .collect();
    let passed = bad.is_empty() && roundtrip_failures.is_empty();
    let detail = if passed {
        format!("{} complexes, all boundary compositions vanish; round trips exact", complexes.len())
    } else {
        format!("nonzero: {bad:?}; round-trip failures: {roundtrip_failures:?}")
    };
    Ok((passed, detail))
}

/// Criterion 2: Betti numbers, the dual pairing and torsion on fixtures.
fn homology_oracles(_: &mut Context) -> Check {
    let s3 = homology_basis(&four_simplex_boundary()).map_err(err)?;
    let t = flat_torus(3).map_err(err)?;
    let ht = homology_basis(t.complex()).map_err(err)?;
    let pairing = ht.pairing_matrix();
    let delta = pairing
        .iter()
        .enumerate()
        .all(|(i, row)| row.iter().enumerate().all(|(j, &v)| v == i64::from(i == j)));
    let p = rp2();
    let hp = homology_basis(&p).map_err(err)?;
    let order = hp
        .torsion_cycles
        .first()
        .map(|c| classify_cycle(&p, &hp, c))
        .transpose()
        .map_err(err)?
        .map(|c| c.trivial_order);
    let ok_s3 = s3.betti == [1, 0, 0, 1];
    let ok_t3 = ht.betti == [1, 3, 3, 1] && ht.rank == 3 && delta;
    let ok_rp2 = hp.torsion_orders == [2] && hp.r_universal == 2 && order == Some(TrivialOrder::Finite(2));
    Ok((
        ok_s3 && ok_t3 && ok_rp2,
        format!(
            "S3 betti {:?}; T3 betti {:?}, k = {}, pairing identity {}; RP2 torsion {:?}, r = {:?}",
            s3.betti,
            ht.betti,
            ht.rank,
            delta,
            hp.torsion_orders,
            order.and_then(|o| o.finite())
        ),
    ))
}

fn first_coexact(m: &MetricData) -> Result<f64, String> {
    coexact_spectrum(m, 1, &SpectralOptions::default())
        .map_err(err)?
        .first()
        .ok_or_else(|| "empty spectrum".to_string())
}

/// Criterion 3: flat torus λ₁ against 4π² at N = 8 and 16.
fn torus_spectrum(_: &mut Context) -> Check {
    let exact = 4.0 * PI * PI;
    let e8 = rel(first_coexact(&flat_torus(8).map_err(err)?)?, exact);
    let e16 = rel(first_coexact(&flat_torus(16).map_err(err)?)?, exact);
    Ok((
        e16 <= 0.10 && e16 < e8,
        format!("relative error N=8 {e8:.4}, N=16 {e16:.4} (limit 0.10, decreasing)"),
    ))
}

/// Criterion 4: the invariant eigenvalue is 4ε² to 1e-12; meshed within 15%.
fn berger_eigenvalue(_: &mut Context) -> Check {
    let mut worst_inv: f64 = 0.0;
    for eps in [1.0, 0.5, 0.25, 0.1] {
        let inv = berger_spectrum_invariant(&BergerModel::new(eps).map_err(err)?).map_err(err)?;
        worst_inv = worst_inv.max(rel(inv[0], 4.0 * eps * eps));
    }
    let mut meshed = Vec::new();
    for eps in [1.0, 0.5] {
        let bm = berger_mesh(&BergerModel::new(eps).map_err(err)?, BERGER_SPECTRUM_N).map_err(err)?;
        meshed.push((eps, rel(first_coexact(&bm.metric)?, 4.0 * eps * eps)));
    }
    let passed = worst_inv <= 1e-12 && meshed.iter().all(|&(_, e)| e <= 0.15);
    let m: Vec<String> = meshed.iter().map(|(e, r)| format!("eps {e}: {r:.4}")).collect();
    Ok((
        passed,
        format!(
            "invariant max relative error {worst_inv:.1e}; meshed N={BERGER_SPECTRUM_N} {}",
            m.join(", ")
        ),
    ))
}

/// Criterion 5: fibre ratio at most 2ε·1.1 and filling area at least 0.95π.
fn berger_cheeger(_: &mut Context) -> Check {
    let mut passed = true;
    let mut parts = Vec::new();
    for eps in [1.0, 0.5, 0.25, 0.1] {
        let bm = berger_mesh(&BergerModel::new(eps).map_err(err)?, BERGER_FIBRE_N).map_err(err)?;
        let m = &bm.metric;
        let fibre = bm.fiber_loop();
        let h = homology_basis(m.complex()).map_err(err)?;
        let f = min_filling_area(m.complex(), &m.measures().face_areas, &h, &fibre, &FillingOptions::default())
            .map_err(err)?;
        let ratio = fibre.weighted_l1(&m.measures().edge_lengths) / f.area;
        passed &= ratio <= 2.0 * eps * 1.1 && f.area >= 0.95 * PI;
        parts.push(format!("eps {eps}: l/A = {:.3} eps, A = {:.3}", ratio / eps, f.area));
    }
    Ok((passed, parts.join("; ")))
}

/// Criterion 6: finite-difference value against (π / (2 ln(1/ε)))².
fn cusp_collapse(_: &mut Context) -> Check {
    let mut values = Vec::new();
    let mut worst: f64 = 0.0;
    for k in [2, 5, 10] {
        let ev = cusp_eigenvalue(&CuspModel::new(E.powi(-k), 2048).map_err(err)?).map_err(err)?;
        let analytic = (PI / (2.0 * k as f64)).powi(2);
        worst = worst.max(rel(ev.finite_difference, analytic));
        values.push(ev.finite_difference);
    }
    let monotone = values.windows(2).all(|w| w[1] < w[0]);
    Ok((
        worst <= 1e-3 && monotone,
        format!("N=2048 max relative error {worst:.2e}; values {values:.5?} decreasing {monotone}"),
    ))
}

/// Smallest area of an integer 2-chain with entries in {−1, 0, 1} and
/// boundary `r·γ`, by enumerating all of them (odometer order, with the boundary
/// and its mismatch count updated incrementally).
fn exhaustive_filling(cx: &SimplicialComplex, areas: &[f64], gamma: &Chain, r: i64) -> Option<f64> {
    let nf = cx.count(2);
    let ne = cx.count(1);
    let target = gamma.scaled(r).to_dense(ne);
    let d2 = cx.boundary_matrix(2).ok()?.transpose();
    let faces: Vec<Vec<(usize, i64)>> = (0..nf)
        .map(|f| {
            let (e, s) = d2.row(f);
            e.iter().copied().zip(s.iter().copied()).collect()
        })
        .collect();
    let mut x = vec![-1i64; nf];
    let mut bd = vec![0i64; ne];
    for (f, col) in faces.iter().enumerate() {
        for &(e, s) in col {
            bd[e] += s * x[f];
        }
    }
    let mut mismatch = bd.iter().zip(&target).filter(|(a, b)| a != b).count();
    let mut best: Option<f64> = None;
    loop {
        if mismatch == 0 {
            let a: f64 = x.iter().zip(areas).map(|(c, w)| c.abs() as f64 * w).sum();
            best = Some(best.map_or(a, |b: f64| b.min(a)));
        }
        // Advance the odometer.
        let mut f = 0;
        loop {
            if f == nf {
                return best.map(|b| b / r as f64);
            }
            let (old, new) = if x[f] == 1 { (1, -1) } else { (x[f], x[f] + 1) };
            x[f] = new;
            for &(e, s) in &faces[f] {
                let before = bd[e] == target[e];
                bd[e] += s * (new - old);
                let after = bd[e] == target[e];
                match (before, after) {
                    (true, false) => mismatch += 1,
                    (false, true) => mismatch -= 1,
                    _ => {}
                }
            }
            if new != -1 {
                break;
            }
            f += 1;
        }
    }
}

/// Criterion 7: LP optimum against the branch-and-bound integer optimum and
/// exhaustive enumeration on every small fixture.
fn filling_lp_vs_ilp(_: &mut Context) -> Check {
    let simplex = four_simplex_boundary();
    let simplex_measures = Measures {
        edge_lengths: vec![2f64.sqrt(); simplex.count(1)],
        face_areas: vec![3f64.sqrt() / 2.0; simplex.count(2)],
    };
    let (oct, oct_m) = octahedron_measures();
    let equator = octahedron_equator(&oct);
    let fixtures: Vec<(&str, SimplicialComplex, Measures, Vec<Chain>)> = vec![
        ("tetrahedron surface", tetrahedron_surface().0, tetrahedron_surface().1, Vec::new()),
        ("octahedron", oct, oct_m, vec![equator]),
        ("rp2", rp2_measures().0, rp2_measures().1, Vec::new()),
        ("seven-vertex torus", seven_vertex_torus().0, seven_vertex_torus().1, Vec::new()),
        ("boundary 4-simplex", simplex, simplex_measures, Vec::new()),
    ];
    let opts = FillingOptions::default();
    let mut checked = 0;
    let mut failures = Vec::new();
    let mut max_gap: f64 = 0.0;
    for (name, cx, m, extra) in fixtures {
        if cx.count(2) > 40 {
            continue;
        }
        let h = homology_basis(&cx).map_err(err)?;
        let torsion_free = h.torsion_orders.is_empty();
        let mut cycles: Vec<Chain> = fundamental_cycles(&cx).into_iter().map(|(_, c)| c).collect();
        cycles.extend(h.torsion_cycles.iter().cloned());
        cycles.extend(extra);
        for (i, gamma) in cycles.iter().enumerate() {
            let class = classify_cycle(&cx, &h, gamma).map_err(err)?;
            let Some(r) = class.trivial_order.finite() else {
                continue;
            };
            let f = min_filling_area(&cx, &m.face_areas, &h, gamma, &opts).map_err(err)?;
            let Some(gap) = f.integrality_gap else {
                failures.push(format!("{name} #{i}: no integer solution"));
                continue;
            };
            let ilp = f.area + gap;
            checked += 1;
            max_gap = max_gap.max(gap.abs());
            if gap < -1e-9 {
                failures.push(format!("{name} #{i}: LP above ILP by {:.2e}", -gap));
            }
            if torsion_free && gap.abs() > 1e-9 {
                failures.push(format!("{name} #{i}: gap {gap:.2e}"));
            }
            match exhaustive_filling(&cx, &m.face_areas, gamma, r as i64) {
                Some(b) if (b - ilp).abs() <= 1e-9 => {}
                other => failures.push(format!("{name} #{i}: exhaustive {other:?} vs ILP {ilp}")),
            }
        }
    }
    Ok((
        failures.is_empty() && checked > 0,
        if failures.is_empty() {
            format!("{checked} cycles on 5 fixtures; max |ILP - LP| {max_gap:.1e}; exhaustive search agrees")
        } else {
            failures.join("; ")
        },
    ))
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Criterion 8: the length estimate error decays like n^(−1/2); the β estimate agrees with
/// the quadrature value within 3 standard errors.
fn monte_carlo_lln(ctx: &mut Context) -> Check {
    let (m, alpha) = ctx.torus()?;
    let h = homology_basis(m.complex()).map_err(err)?;
    let ns: Vec<usize> = (4..=12).map(|k| 1usize << k).collect();
    let replicates = 16;
    let mut rms = Vec::new();
    for &n in &ns {
        let mut sq = 0.0;
        for r in 0..replicates {
            let cfg = MonteCarloConfig {
                n,
                time: 1.0,
                seed: 1000 + r,
                close: false,
                ..MonteCarloConfig::default()
            };
            let rep = run_monte_carlo(m, &h, alpha, &cfg).map_err(err)?;
            sq += rep.errors.dalpha_l1_via_length.powi(2);
        }
        rms.push((sq / replicates as f64).sqrt());
    }
    let x: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let slope = loglog_slope(&x, &rms);
    let conv = ctx.converged()?;
    let z = conv.errors.alpha_l2sq_via_beta / conv.stderr_beta;
    Ok((
        (slope + 0.5).abs() <= 0.15 && z <= 3.0,
        format!(
            "length estimate slope {slope:.3} over n = 16..4096; beta estimate {:.5} vs {:.5}, {z:.2} standard errors",
            conv.estimates.alpha_l2sq_via_beta, conv.targets.alpha_l2sq_via_beta
        ),
    ))
}

/// Criterion 9: homology residual and fillability of every constructed Γ.
fn homological_triviality(ctx: &mut Context) -> Check {
    let mut reports = vec![ctx.converged()?];
    let (m, alpha) = ctx.torus()?;
    let h = homology_basis(m.complex()).map_err(err)?;
    for (n, time, seed) in [(64, 4.0, 1), (256, 2.0, 2)] {
        let cfg = MonteCarloConfig {
            n,
            time,
            seed,
            ..MonteCarloConfig::default()
        };
        reports.push(run_monte_carlo(m, &h, alpha, &cfg).map_err(err)?);
    }
    let mut passed = true;
    let mut parts = Vec::new();
    for r in &reports {
        let l = r.curve_length.unwrap_or(f64::NAN);
        let res = r.estimates.homology_residual;
        let fill_res = r.boundary_residual.unwrap_or(f64::INFINITY);
        let ok = res <= 1e-6 * l && r.filling_area.is_some() && r.r_used.is_some() && fill_res <= 1e-6 * l;
        passed &= ok;
        parts.push(format!(
            "n={} T={}: residual {res:.1e} (l = {l:.0}), filled at r = {:?}",
            r.n, r.time, r.r_used.unwrap_or(0)
        ));
    }
    Ok((passed, parts.join("; ")))
}

/// Criterion 10: ‖dα‖₁‖α‖_∞ ≥ ρ̂‖α‖₂²(1 − 5s) on the converged run.
fn chain_inequality(ctx: &mut Context) -> Check {
    let r = ctx.converged()?;
    let c = r.chain.ok_or("converged run has no filling")?;
    Ok((
        c.holds,
        format!(
            "lhs {:.4} >= rhs {:.4} (rho = {:.4}, n = {}, T = {})",
            c.lhs,
            c.rhs,
            r.rho_hat.unwrap_or(f64::NAN),
            r.n,
            r.time
        ),
    ))
}

/// Criterion 11: repeated stochastic commands give identical bytes,
/// including under different thread counts.
fn determinism(_: &mut Context) -> Check {
    let cfg = ExperimentConfig {
        command: CommandKind::Montecarlo,
        model: Some(ModelName::Torus),
        n: Some(4),
        n_traj: 128,
        time: 4.0,
        seed: Some(7),
        dump_trajectories: 2,
        ..ExperimentConfig::default()
    };
    let render = |threads: usize| -> Result<Vec<String>, String> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(err)?;
        let out = pool.install(|| run(&cfg)).map_err(err)?;
        let mut v = vec![out.json];
        v.extend(out.tables.into_iter().map(|t| t.csv));
        Ok(v)
    };
    let a = render(1)?;
    let b = render(1)?;
    let c = render(4)?;
    let passed = a == b && a == c;
    Ok((
        passed,
        format!(
            "montecarlo report and {} tables identical across 3 runs (1, 1, 4 threads): {passed}",
            a.len() - 1
        ),
    ))
}
