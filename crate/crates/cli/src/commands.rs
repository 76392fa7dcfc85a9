//! One function per command; each returns a rendered report.

use std::f64::consts::PI;

use coexact::complex::{chain_complex_identity_holds, Chain};
use coexact::dec::{hodge_decompose, MetricData};
use coexact::filling::{cheeger_estimate, min_filling_area, CheegerCandidate, CheegerOptions, FillingOptions};
use coexact::flow::montecarlo::sample_trajectories;
use coexact::flow::{build_vector_field, run_monte_carlo, MonteCarloConfig, MonteCarloReport};
use coexact::homology::{classify_cycle, homology_basis};
use coexact::lp::LpStatus;
use coexact::models::berger::{berger_h1_bounds, berger_mesh, berger_spectrum_invariant, BergerModel};
use coexact::models::cusp::{cusp_eigenvalue, cusp_mesh, CuspEigenvalue, CuspModel, MIN_GRID};
use coexact::models::torus::{flat_torus, torus_eigenform, vertex_coords};
use coexact::models::ModelSpec;
use coexact::spectra::{coexact_spectrum, SpectralOptions};
use serde::Serialize;

use crate::config::{CommandKind, ExperimentConfig, ModelName};
use crate::formats::{read_mesh_file, Mesh, MeshFile};
use crate::report::{csv, Output, Table};
use crate::{acceptance, num, CliError};

/// Runs the configured command.
pub fn run(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    cfg.validate()?;
    match cfg.command {
        CommandKind::Spectrum => spectrum(cfg),
        CommandKind::Homology => homology(cfg),
        CommandKind::Filling => filling(cfg),
        CommandKind::Cheeger => cheeger(cfg),
        CommandKind::Montecarlo => montecarlo(cfg),
        CommandKind::Berger => berger(cfg),
        CommandKind::Cusp => cusp(cfg),
        CommandKind::VerifyAll => verify_all(cfg),
    }
}

/// A mesh with whatever the model knows about it.
struct Source {
    label: String,
    mesh: Mesh,
    /// A natural homologically trivial cycle (Berger fibre, cusp equator).
    cycle: Option<Chain>,
    /// A coexact eigenform for the flow.
    form: Option<(&'static str, Vec<f64>)>,
    reference: Option<(&'static str, f64)>,
}

#[derive(Serialize)]
struct MeshSummary {
    source: String,
    vertices: usize,
    edges: usize,
    triangles: usize,
    tets: usize,
    volume: Option<f64>,
}

impl Source {
    fn summary(&self) -> MeshSummary {
        let cx = self.mesh.complex();
        MeshSummary {
            source: self.label.clone(),
            vertices: cx.vertex_count(),
            edges: cx.count(1),
            triangles: cx.count(2),
            tets: if cx.dim() == 3 { cx.count(3) } else { 0 },
            volume: self.mesh.metric().map(MetricData::total_volume),
        }
    }

    fn metric(&self, command: &str) -> Result<&MetricData, CliError> {
        self.mesh.metric().ok_or_else(|| {
            CliError::Config(format!("{command} needs a closed tetrahedral mesh with geometry"))
        })
    }
}

fn model_header(spec: &ModelSpec) -> serde_json::Value {
    serde_json::json!({
        "generator": crate::report::TOOL,
        "version": crate::report::VERSION,
        "model": spec,
    })
}

fn export(cfg: &ExperimentConfig, file: impl FnOnce() -> MeshFile) -> Result<(), CliError> {
    if let Some(path) = &cfg.export_mesh {
        std::fs::write(path, file().to_json()).map_err(|e| CliError::io(path, e))?;
    }
    Ok(())
}

fn torus_positions(n: usize) -> Vec<Vec<f64>> {
    (0..n * n * n)
        .map(|v| vertex_coords(n, v).iter().map(|&c| c as f64 / n as f64).collect())
        .collect()
}

fn load_source(cfg: &ExperimentConfig) -> Result<Source, CliError> {
    if let Some(path) = &cfg.mesh {
        let file = read_mesh_file(path)?;
        let mesh = file.to_mesh().map_err(|e| match e {
            CliError::Parse { message, .. } => CliError::Parse {
                path: path.display().to_string(),
                message,
            },
            other => other,
        })?;
        return Ok(Source {
            label: path.display().to_string(),
            mesh,
            cycle: None,
            form: None,
            reference: None,
        });
    }
    let eps = cfg.epsilon.unwrap_or(1.0);
    match cfg.model.unwrap_or(ModelName::Torus) {
        ModelName::Torus => {
            let n = cfg.n.unwrap_or(8);
            let m = flat_torus(n).map_err(num("models"))?;
            let alpha = torus_eigenform(&m, n, 1.0).map_err(num("models"))?;
            export(cfg, || {
                MeshFile::from_metric(&m, model_header(&ModelSpec::Torus { n }), torus_positions(n))
            })?;
            Ok(Source {
                label: format!("torus n={n}"),
                mesh: Mesh::Metric(m),
                cycle: None,
                form: Some(("sin(2 pi z) dx", alpha)),
                reference: Some(("4 pi^2", 4.0 * PI * PI)),
            })
        }
        ModelName::Berger => {
            let n = cfg.n.unwrap_or(4);
            let bm = berger_mesh(&BergerModel::new(eps).map_err(num("models"))?, n).map_err(num("models"))?;
            let alpha = hodge_decompose(&bm.metric, 1, &bm.vertical_form(), 1e-10)
                .map_err(num("dec"))?
                .coexact;
            export(cfg, || {
                MeshFile::from_metric(
                    &bm.metric,
                    model_header(&ModelSpec::Berger { epsilon: eps, n }),
                    bm.positions.iter().map(|p| p.to_vec()).collect(),
                )
            })?;
            let cycle = bm.fiber_loop();
            Ok(Source {
                label: format!("berger epsilon={eps} n={n}"),
                mesh: Mesh::Metric(bm.metric),
                cycle: Some(cycle),
                form: Some(("coexact part of sigma_1", alpha)),
                reference: Some(("4 epsilon^2", 4.0 * eps * eps)),
            })
        }
        ModelName::Cusp => {
            let layers = cfg.layers.unwrap_or(8);
            let model = CuspModel::new(eps, MIN_GRID).map_err(num("models"))?;
            let cm = cusp_mesh(&model, cfg.sphere_level, layers).map_err(num("models"))?;
            export(cfg, || {
                let spec = ModelSpec::Cusp {
                    epsilon: eps,
                    sphere_level: cfg.sphere_level,
                    layers,
                };
                MeshFile::from_metric(&cm.metric, model_header(&spec), Vec::new())
            })?;
            let cycle = cm.equator();
            Ok(Source {
                label: format!("cusp epsilon={eps} sphere_level={} layers={layers}", cfg.sphere_level),
                mesh: Mesh::Metric(cm.metric),
                cycle: Some(cycle),
                form: None,
                reference: None,
            })
        }
    }
}

fn spectral_options(cfg: &ExperimentConfig) -> SpectralOptions {
    let mut o = SpectralOptions {
        tol: cfg.tol,
        ..SpectralOptions::default()
    };
    if let Some(s) = cfg.seed {
        o.seed = s;
    }
    o
}

#[derive(Serialize)]
struct Reference {
    name: &'static str,
    value: f64,
    relative_error: f64,
}

#[derive(Serialize)]
struct SpectrumResult {
    mesh: MeshSummary,
    eigenvalues: Vec<f64>,
    residuals: Vec<f64>,
    kernel_dimension: usize,
    zero_threshold: f64,
    truncated: bool,
    reference: Option<Reference>,
}

fn spectrum(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let src = load_source(cfg)?;
    let m = src.metric("spectrum")?;
    let r = coexact_spectrum(m, cfg.count, &spectral_options(cfg)).map_err(num("spectra"))?;
    let reference = src.reference.zip(r.first()).map(|((name, value), first)| Reference {
        name,
        value,
        relative_error: (first - value).abs() / value,
    });
    let table = csv(
        &["index", "eigenvalue", "residual"],
        r.eigenvalues
            .iter()
            .zip(&r.residuals)
            .enumerate()
            .map(|(i, (l, res))| [i.to_string(), l.to_string(), res.to_string()]),
    );
    let result = SpectrumResult {
        mesh: src.summary(),
        eigenvalues: r.eigenvalues,
        residuals: r.residuals,
        kernel_dimension: r.kernel_dimension,
        zero_threshold: r.zero_threshold,
        truncated: r.truncated,
        reference,
    };
    Output::new(cfg, &result, vec![Table { name: "eigenvalues".into(), csv: table }])
}

#[derive(Serialize)]
struct HomologyResult {
    mesh: MeshSummary,
    betti: [usize; 4],
    rank: usize,
    torsion_orders: Vec<u64>,
    r_universal: u64,
    euler_characteristic: i64,
    chain_complex_identity: bool,
    pairing_is_identity: bool,
    cycle_edges: Vec<usize>,
    torsion_cycle_edges: Vec<usize>,
}

fn homology(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let src = load_source(cfg)?;
    let cx = src.mesh.complex();
    let h = homology_basis(cx).map_err(num("homology"))?;
    let pairing = h.pairing_matrix();
    let identity = pairing
        .iter()
        .enumerate()
        .all(|(i, row)| row.iter().enumerate().all(|(j, &v)| v == i64::from(i == j)));
    let rows: Vec<[String; 3]> = h
        .cycles
        .iter()
        .enumerate()
        .map(|(i, c)| ["free".to_string(), i.to_string(), c.len().to_string()])
        .chain(
            h.torsion_cycles
                .iter()
                .enumerate()
                .map(|(i, c)| ["torsion".to_string(), i.to_string(), c.len().to_string()]),
        )
        .collect();
    let result = HomologyResult {
        mesh: src.summary(),
        betti: h.betti,
        rank: h.rank,
        torsion_orders: h.torsion_orders.clone(),
        r_universal: h.r_universal,
        euler_characteristic: h.euler_characteristic(),
        chain_complex_identity: chain_complex_identity_holds(cx),
        pairing_is_identity: identity,
        cycle_edges: h.cycles.iter().map(Chain::len).collect(),
        torsion_cycle_edges: h.torsion_cycles.iter().map(Chain::len).collect(),
    };
    let table = csv(&["kind", "index", "edges"], rows);
    Output::new(cfg, &result, vec![Table { name: "cycles".into(), csv: table }])
}

fn input_cycle(cfg: &ExperimentConfig, src: &Source) -> Result<Chain, CliError> {
    match &cfg.cycle {
        Some(walk) => Chain::edge_path(src.mesh.complex(), walk)
            .ok_or_else(|| CliError::Config("cycle walk steps along a non-edge".into())),
        None => src
            .cycle
            .clone()
            .ok_or_else(|| CliError::Config("this mesh has no default cycle; pass --cycle".into())),
    }
}

fn need_measures<'a>(src: &'a Source, command: &str) -> Result<&'a coexact::dec::Measures, CliError> {
    src.mesh
        .measures()
        .ok_or_else(|| CliError::Config(format!("{command} needs vertex positions or measures in the mesh")))
}

#[derive(Serialize)]
struct FillingReport {
    mesh: MeshSummary,
    cycle_edges: usize,
    length: f64,
    area: f64,
    ratio: f64,
    r_used: u64,
    lp_status: LpStatus,
    integrality_gap: Option<f64>,
    boundary_residual: f64,
    torsion_coords: Vec<u64>,
}

fn filling(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let src = load_source(cfg)?;
    let cx = src.mesh.complex();
    let measures = need_measures(&src, "filling")?;
    let gamma = input_cycle(cfg, &src)?;
    let h = homology_basis(cx).map_err(num("homology"))?;
    let class = classify_cycle(cx, &h, &gamma).map_err(num("homology"))?;
    let f = min_filling_area(cx, &measures.face_areas, &h, &gamma, &FillingOptions::default())
        .map_err(num("filling"))?;
    let length = gamma.weighted_l1(&measures.edge_lengths);
    let table = csv(
        &["triangle", "coefficient"],
        f.chain.iter().map(|(t, c)| [t.to_string(), c.to_string()]),
    );
    let result = FillingReport {
        mesh: src.summary(),
        cycle_edges: gamma.len(),
        length,
        area: f.area,
        ratio: length / f.area,
        r_used: f.r_used,
        lp_status: f.lp_status,
        integrality_gap: f.integrality_gap,
        boundary_residual: f.boundary_residual,
        torsion_coords: class.torsion_coords,
    };
    Output::new(cfg, &result, vec![Table { name: "chain".into(), csv: table }])
}

#[derive(Serialize)]
struct CheegerReport {
    mesh: MeshSummary,
    h1_upper: f64,
    cycles_examined: usize,
    witness_length: f64,
    witness_area: f64,
    witness_r: u64,
    candidates: Vec<CheegerCandidate>,
}

fn cheeger(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let src = load_source(cfg)?;
    let cx = src.mesh.complex();
    let measures = need_measures(&src, "cheeger")?;
    let h = homology_basis(cx).map_err(num("homology"))?;
    let mut extra = Vec::new();
    if let Some(c) = cfg.cycle.is_some().then(|| input_cycle(cfg, &src)).transpose()? {
        extra.push(c);
    } else if let Some(c) = &src.cycle {
        extra.push(c.clone());
    }
    let est = cheeger_estimate(cx, measures, &h, &extra, &CheegerOptions::default()).map_err(num("filling"))?;
    let table = est.to_csv();
    let result = CheegerReport {
        mesh: src.summary(),
        h1_upper: est.h1_upper,
        cycles_examined: est.cycles_examined,
        witness_length: est.witness_cycle.weighted_l1(&measures.edge_lengths),
        witness_area: est.witness_filling.area,
        witness_r: est.witness_filling.r_used,
        candidates: est.candidates,
    };
    Output::new(cfg, &result, vec![Table { name: "candidates".into(), csv: table }])
}

#[derive(Serialize)]
struct MonteCarloResult {
    mesh: MeshSummary,
    form: &'static str,
    report: MonteCarloReport,
}

fn montecarlo(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let seed = cfg
        .seed
        .ok_or_else(|| CliError::Config("montecarlo needs --seed".into()))?;
    let src = load_source(cfg)?;
    let m = src.metric("montecarlo")?;
    let (form, alpha) = match &src.form {
        Some((name, a)) => (*name, a.clone()),
        None => {
            let opts = SpectralOptions {
                seed,
                ..spectral_options(cfg)
            };
            let r = coexact_spectrum(m, 1, &opts).map_err(num("spectra"))?;
            let a = r
                .eigenforms
                .into_iter()
                .next()
                .ok_or_else(|| CliError::Numerical {
                    module: "spectra",
                    message: "no coexact eigenform found".into(),
                })?;
            ("first coexact eigenform", a)
        }
    };
    let h = homology_basis(m.complex()).map_err(num("homology"))?;
    let mc = MonteCarloConfig {
        n: cfg.n_traj,
        time: cfg.time,
        seed,
        ..MonteCarloConfig::default()
    };
    let report = run_monte_carlo(m, &h, &alpha, &mc).map_err(num("flow"))?;
    let e = (&report.estimates, &report.targets, &report.errors);
    let items = [
        ("dalpha_l1_via_length", e.0.dalpha_l1_via_length, e.1.dalpha_l1_via_length, e.2.dalpha_l1_via_length, report.stderr_length),
        ("alpha_l2sq_via_beta", e.0.alpha_l2sq_via_beta, e.1.alpha_l2sq_via_beta, e.2.alpha_l2sq_via_beta, report.stderr_beta),
        ("nu_fraction", e.0.nu_fraction, e.1.nu_fraction, e.2.nu_fraction, f64::NAN),
        ("homology_residual", e.0.homology_residual, e.1.homology_residual, e.2.homology_residual, f64::NAN),
    ];
    let mut tables = vec![Table {
        name: "items".into(),
        csv: csv(
            &["item", "estimate", "target", "error", "stderr"],
            items.iter().map(|(n, a, b, c, d)| {
                [n.to_string(), a.to_string(), b.to_string(), c.to_string(), d.to_string()]
            }),
        ),
    }];
    if cfg.dump_trajectories > 0 {
        let field = build_vector_field(m, &alpha).map_err(num("flow"))?;
        let k = cfg.dump_trajectories.min(cfg.n_traj);
        // Trajectory i uses the same random stream as in the run.
        let curves = sample_trajectories(m, &field, k, cfg.time, seed, &mc.trajectory).map_err(num("flow"))?;
        for (i, c) in curves.iter().enumerate() {
            let mut rows = Vec::with_capacity(c.segments.len() + 1);
            let mut push = |t: f64, tet: usize, b: &[f64; 4]| {
                let mut row = vec![t.to_string(), tet.to_string()];
                row.extend(b.iter().map(|x| x.to_string()));
                let p = m.position(tet, b);
                row.extend((0..3).map(|k| p.map_or(String::new(), |p| p[k].to_string())));
                rows.push(row);
            };
            for (j, s) in c.segments.iter().enumerate() {
                if j == 0 {
                    push(s.t0, s.tet, &s.entry);
                }
                push(s.t1, s.tet, &s.exit);
            }
            tables.push(Table {
                name: format!("trajectory_{i}"),
                csv: csv(&["t", "cell", "b0", "b1", "b2", "b3", "x", "y", "z"], rows),
            });
        }
    }
    let result = MonteCarloResult {
        mesh: src.summary(),
        form,
        report,
    };
    Output::new(cfg, &result, tables)
}

#[derive(Serialize)]
struct BergerMeshed {
    n: usize,
    tets: usize,
    volume: f64,
    /// `2π² ε`
    exact_volume: f64,
    eigenvalues: Vec<f64>,
    relative_error: Option<f64>,
    fibre_length: f64,
    fibre_area: f64,
    fibre_ratio: f64,
}

#[derive(Serialize)]
struct BergerResult {
    epsilon: f64,
    invariant_eigenvalues: [f64; 3],
    /// `4ε²`
    invariant_eigenvalue: f64,
    d_alpha_area_coefficient: f64,
    base_area: f64,
    ratio_bound: f64,
    area_bound: f64,
    meshed: Option<BergerMeshed>,
}

fn berger(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let eps = cfg.epsilon.unwrap_or(1.0);
    let model = BergerModel::new(eps).map_err(num("models"))?;
    let inv = berger_spectrum_invariant(&model).map_err(num("models"))?;
    let (ratio_bound, area_bound) = berger_h1_bounds(&model).map_err(num("models"))?;
    let mut tables = vec![Table {
        name: "invariant".into(),
        csv: csv(
            &["index", "eigenvalue"],
            inv.iter().enumerate().map(|(i, l)| [i.to_string(), l.to_string()]),
        ),
    }];
    let meshed = match cfg.n {
        None => None,
        Some(n) => {
            let src = load_source(&ExperimentConfig {
                model: Some(ModelName::Berger),
                n: Some(n),
                ..cfg.clone()
            })?;
            let m = src.metric("berger")?;
            let r = coexact_spectrum(m, cfg.count, &spectral_options(cfg)).map_err(num("spectra"))?;
            let fibre = src.cycle.as_ref().expect("berger has a fibre");
            let h = homology_basis(m.complex()).map_err(num("homology"))?;
            let f = min_filling_area(m.complex(), &m.measures().face_areas, &h, fibre, &FillingOptions::default())
                .map_err(num("filling"))?;
            let length = fibre.weighted_l1(&m.measures().edge_lengths);
            tables.push(Table {
                name: "eigenvalues".into(),
                csv: csv(
                    &["index", "eigenvalue", "residual"],
                    r.eigenvalues
                        .iter()
                        .zip(&r.residuals)
                        .enumerate()
                        .map(|(i, (l, res))| [i.to_string(), l.to_string(), res.to_string()]),
                ),
            });
            Some(BergerMeshed {
                n,
                tets: m.complex().count(3),
                volume: m.total_volume(),
                exact_volume: 2.0 * PI * PI * eps,
                relative_error: r.first().map(|l| (l - inv[0]).abs() / inv[0]),
                eigenvalues: r.eigenvalues,
                fibre_length: length,
                fibre_area: f.area,
                fibre_ratio: length / f.area,
            })
        }
    };
    let result = BergerResult {
        epsilon: eps,
        invariant_eigenvalues: inv,
        invariant_eigenvalue: inv[0],
        d_alpha_area_coefficient: model.d_alpha_area_coefficient(),
        base_area: model.base_area(),
        ratio_bound,
        area_bound,
        meshed,
    };
    Output::new(cfg, &result, tables)
}

#[derive(Serialize)]
struct CuspMeshed {
    sphere_level: usize,
    layers: usize,
    tets: usize,
    volume: f64,
    central_volume: f64,
    exact_central_volume: f64,
    equator_length: f64,
    equator_area: f64,
    equator_ratio: f64,
}

#[derive(Serialize)]
struct CuspResult {
    epsilon: f64,
    half_length: f64,
    eigenvalue: CuspEigenvalue,
    meshed: Option<CuspMeshed>,
}

fn cusp(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let eps = cfg.epsilon.unwrap_or((-2.0f64).exp());
    let model = CuspModel::new(eps, cfg.n.unwrap_or(2048)).map_err(num("models"))?;
    let ev = cusp_eigenvalue(&model).map_err(num("models"))?;
    let l = model.half_length();
    let table = csv(
        &["index", "t", "f"],
        ev.eigenfunction
            .iter()
            .enumerate()
            .map(|(i, f)| [i.to_string(), (-l + (i + 1) as f64 * ev.spacing).to_string(), f.to_string()]),
    );
    let meshed = match cfg.layers {
        None => None,
        Some(layers) => {
            let cm = cusp_mesh(&model, cfg.sphere_level, layers).map_err(num("models"))?;
            export(cfg, || {
                let spec = ModelSpec::Cusp {
                    epsilon: eps,
                    sphere_level: cfg.sphere_level,
                    layers,
                };
                MeshFile::from_metric(&cm.metric, model_header(&spec), Vec::new())
            })?;
            let m = &cm.metric;
            let eq = cm.equator();
            let h = homology_basis(m.complex()).map_err(num("homology"))?;
            let f = min_filling_area(m.complex(), &m.measures().face_areas, &h, &eq, &FillingOptions::default())
                .map_err(num("filling"))?;
            let length = eq.weighted_l1(&m.measures().edge_lengths);
            Some(CuspMeshed {
                sphere_level: cfg.sphere_level,
                layers,
                tets: m.complex().count(3),
                volume: m.total_volume(),
                central_volume: cm.central_volume(),
                exact_central_volume: model.central_volume(),
                equator_length: length,
                equator_area: f.area,
                equator_ratio: length / f.area,
            })
        }
    };
    let result = CuspResult {
        epsilon: eps,
        half_length: l,
        eigenvalue: ev,
        meshed,
    };
    Output::new(cfg, &result, vec![Table { name: "eigenfunction".into(), csv: table }])
}

fn verify_all(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let results = acceptance::run_all(|c| println!("{}", c.line()));
    let failed = results.iter().filter(|c| !c.passed).count();
    let table = csv(
        &["id", "name", "passed", "seconds", "detail"],
        results.iter().map(|c| {
            [
                c.id.to_string(),
                c.name.to_string(),
                c.passed.to_string(),
                format!("{:.1}", c.seconds),
                format!("\"{}\"", c.detail.replace('"', "'")),
            ]
        }),
    );
    // Timings stay out of the JSON report.
    let mut out = Output::new(cfg, &acceptance::Summary::from(&results), vec![Table { name: "criteria".into(), csv: table }])?;
    out.summary = Some(format!("{}/{} criteria passed\n", results.len() - failed, results.len()));
    out.failure = (failed > 0).then_some(CliError::Acceptance {
        failed,
        total: results.len(),
    });
    Ok(out)
}
