//! Mesh files.
//!
//! JSON: `{header, vertex_count, vertices, tets | triangles, orientation,
//! grams, edge_lengths, face_areas, charts}`. Only the connectivity is
//! required. With `grams` (one 3×3 Gram matrix per tetrahedron, in the
//! order and sorted vertex convention of the built complex) the metric is
//! taken as given; otherwise it is induced from the vertex positions, which
//! may live in any `Rᵈ` with `d ≥ 3`. Generated meshes are exported with
//! their Gram matrices and measures, so they reload bit for bit.
//!
//! OFF: the usual `OFF` / `4OFF` / `nOFF` header; faces with 3 indices are
//! triangles and, as an extension, faces with 4 indices are tetrahedra.
//! Orientation is carried by the index order.

use std::fmt::Write as _;
use std::path::Path;

use coexact::complex::{build_complex, build_surface, ComplexData, SimplicialComplex};
use coexact::dec::{assemble_metric, CellGeometry, Geometry, Mat3, Measures, MetricData};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshFile {
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub header: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub vertices: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tets: Vec<[usize; 4]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub triangles: Vec<[usize; 3]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub orientation: Vec<i8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grams: Option<Vec<Mat3>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_lengths: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub face_areas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub charts: Option<Vec<[[f64; 3]; 4]>>,
}

/// A loaded mesh: a tetrahedral complex with its metric, or a bare complex
/// (surfaces, or tetrahedra without geometry) with optional measures.
pub enum Mesh {
    Metric(MetricData),
    Complex {
        complex: SimplicialComplex,
        measures: Option<Measures>,
    },
}

impl Mesh {
    pub fn complex(&self) -> &SimplicialComplex {
        match self {
            Mesh::Metric(m) => m.complex(),
            Mesh::Complex { complex, .. } => complex,
        }
    }

    pub fn measures(&self) -> Option<&Measures> {
        match self {
            Mesh::Metric(m) => Some(m.measures()),
            Mesh::Complex { measures, .. } => measures.as_ref(),
        }
    }

    pub fn metric(&self) -> Option<&MetricData> {
        match self {
            Mesh::Metric(m) => Some(m),
            Mesh::Complex { .. } => None,
        }
    }
}

fn format_err(message: impl Into<String>) -> CliError {
    CliError::Parse {
        path: "<mesh>".into(),
        message: message.into(),
    }
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn chord_measures(cx: &SimplicialComplex, pos: &[Vec<f64>]) -> Measures {
    let edge_lengths = cx
        .edges()
        .iter()
        .map(|&[a, b]| {
            let d = sub(&pos[b], &pos[a]);
            dot(&d, &d).sqrt()
        })
        .collect();
    let face_areas = cx
        .triangles()
        .iter()
        .map(|&[a, b, c]| {
            let (u, v) = (sub(&pos[b], &pos[a]), sub(&pos[c], &pos[a]));
            let (uu, vv, uv) = (dot(&u, &u), dot(&v, &v), dot(&u, &v));
            0.5 * (uu * vv - uv * uv).max(0.0).sqrt()
        })
        .collect();
    Measures {
        edge_lengths,
        face_areas,
    }
}

impl MeshFile {
    pub fn resolved_vertex_count(&self) -> usize {
        self.vertex_count.unwrap_or(self.vertices.len())
    }

    fn check_vertices(&self) -> Result<(), CliError> {
        if let Some(first) = self.vertices.first() {
            let d = first.len();
            if self.vertices.iter().any(|v| v.len() != d) {
                return Err(format_err("vertices have mixed dimensions"));
            }
            if self.vertices.len() != self.resolved_vertex_count() {
                return Err(format_err(format!(
                    "vertex_count {} but {} vertices listed",
                    self.resolved_vertex_count(),
                    self.vertices.len()
                )));
            }
        }
        Ok(())
    }

    /// Builds the complex and, when geometry is available, its metric.
    pub fn to_mesh(&self) -> Result<Mesh, CliError> {
        self.check_vertices()?;
        let nv = self.resolved_vertex_count();
        let bad = |e: &dyn std::fmt::Display| format_err(e.to_string());
        let measures = match (&self.edge_lengths, &self.face_areas) {
            (Some(l), Some(a)) => Some(Measures {
                edge_lengths: l.clone(),
                face_areas: a.clone(),
            }),
            (None, None) => None,
            _ => return Err(format_err("edge_lengths and face_areas must be given together")),
        };
        if self.tets.is_empty() {
            if self.triangles.is_empty() {
                return Err(format_err("mesh has no tets or triangles"));
            }
            let mut cx = build_surface(nv, &self.triangles).map_err(|e| bad(&e))?;
            if !self.orientation.is_empty() {
                cx.set_orientation(self.orientation.clone()).map_err(|e| bad(&e))?;
            }
            let measures = measures.or_else(|| (!self.vertices.is_empty()).then(|| chord_measures(&cx, &self.vertices)));
            check_measures(&cx, measures.as_ref())?;
            return Ok(Mesh::Complex { complex: cx, measures });
        }
        if !self.triangles.is_empty() {
            return Err(format_err("give either tets or triangles, not both"));
        }
        let mut cx = build_complex(nv, &self.tets).map_err(|e| bad(&e))?;
        if !self.orientation.is_empty() {
            cx.set_orientation(self.orientation.clone()).map_err(|e| bad(&e))?;
        }
        let grams = match &self.grams {
            Some(g) => Some(g.clone()),
            None if self.vertices.first().is_some_and(|v| v.len() >= 3) => Some(
                cx.tets()
                    .iter()
                    .map(|t| {
                        let e: [Vec<f64>; 3] =
                            std::array::from_fn(|i| sub(&self.vertices[t[i + 1]], &self.vertices[t[0]]));
                        std::array::from_fn(|i| std::array::from_fn(|j| dot(&e[i], &e[j])))
                    })
                    .collect(),
            ),
            None => None,
        };
        let Some(grams) = grams else {
            check_measures(&cx, measures.as_ref())?;
            return Ok(Mesh::Complex { complex: cx, measures });
        };
        let charts = self.charts.clone().or_else(|| {
            self.vertices.first().filter(|v| v.len() == 3).map(|_| {
                cx.tets()
                    .iter()
                    .map(|t| t.map(|v| [self.vertices[v][0], self.vertices[v][1], self.vertices[v][2]]))
                    .collect()
            })
        });
        let geometry = Geometry::Cells(CellGeometry {
            grams,
            measures,
            charts,
        });
        assemble_metric(cx, geometry).map(Mesh::Metric).map_err(|e| bad(&e))
    }

    /// Exact description of metric data, for reloading.
    pub fn from_metric(m: &MetricData, header: Value, vertices: Vec<Vec<f64>>) -> Self {
        let data: ComplexData = m.complex().to_data();
        Self {
            header,
            vertex_count: Some(data.vertex_count),
            vertices,
            tets: data.tets,
            triangles: Vec::new(),
            orientation: data.orientation,
            grams: Some(m.cells().iter().map(|c| c.gram).collect()),
            edge_lengths: Some(m.measures().edge_lengths.clone()),
            face_areas: Some(m.measures().face_areas.clone()),
            charts: m.charts().map(|c| c.to_vec()),
        }
    }

    /// Connectivity and positions only.
    pub fn from_complex(cx: &SimplicialComplex, header: Value, vertices: Vec<Vec<f64>>) -> Self {
        let data = cx.to_data();
        Self {
            header,
            vertex_count: Some(data.vertex_count),
            vertices,
            tets: data.tets,
            triangles: data.triangles,
            orientation: data.orientation,
            ..Self::default()
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("mesh serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| format_err(e.to_string()))
    }

    /// OFF text; the orientation is folded into the index order.
    pub fn to_off(&self) -> Result<String, CliError> {
        self.check_vertices()?;
        let d = self.vertices.first().map_or(0, Vec::len);
        if self.vertices.is_empty() || d == 0 {
            return Err(format_err("OFF output needs vertex positions"));
        }
        let mut s = String::new();
        match d {
            3 => s.push_str("OFF\n"),
            4 => s.push_str("4OFF\n"),
            _ => {
                let _ = writeln!(s, "nOFF\n{d}");
            }
        }
        let faces = self.tets.len() + self.triangles.len();
        let _ = writeln!(s, "{} {} 0", self.vertices.len(), faces);
        for v in &self.vertices {
            let row: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(s, "{}", row.join(" "));
        }
        let negative = |i: usize| self.orientation.get(i).is_some_and(|&o| o < 0);
        for (i, t) in self.tets.iter().enumerate() {
            let t = if negative(i) { [t[1], t[0], t[2], t[3]] } else { *t };
            let _ = writeln!(s, "4 {} {} {} {}", t[0], t[1], t[2], t[3]);
        }
        for (i, t) in self.triangles.iter().enumerate() {
            let t = if negative(i) { [t[1], t[0], t[2]] } else { *t };
            let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
        }
        Ok(s)
    }

    pub fn from_off(text: &str) -> Result<Self, CliError> {
        let mut tokens = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or(""))
            .flat_map(str::split_whitespace);
        let mut next = |what: &str| tokens.next().ok_or_else(|| format_err(format!("OFF ended before {what}")));
        let parse_usize = |t: &str| t.parse::<usize>().map_err(|_| format_err(format!("bad integer {t:?}")));
        let d = match next("header")? {
            "OFF" => 3,
            "4OFF" => 4,
            "nOFF" => parse_usize(next("dimension")?)?,
            other => return Err(format_err(format!("unknown OFF header {other:?}"))),
        };
        let nv = parse_usize(next("counts")?)?;
        let nf = parse_usize(next("counts")?)?;
        let _edges = parse_usize(next("counts")?)?;
        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let mut v = Vec::with_capacity(d);
            for _ in 0..d {
                let t = next("vertex coordinates")?;
                v.push(t.parse::<f64>().map_err(|_| format_err(format!("bad coordinate {t:?}")))?);
            }
            vertices.push(v);
        }
        let mut mesh = MeshFile {
            vertex_count: Some(nv),
            vertices,
            ..Self::default()
        };
        for _ in 0..nf {
            let k = parse_usize(next("face size")?)?;
            let mut ids = Vec::with_capacity(k);
            for _ in 0..k {
                ids.push(parse_usize(next("face indices")?)?);
            }
            match k {
                3 => mesh.triangles.push([ids[0], ids[1], ids[2]]),
                4 => mesh.tets.push([ids[0], ids[1], ids[2], ids[3]]),
                _ => return Err(format_err(format!("faces must have 3 or 4 vertices, got {k}"))),
            }
        }
        Ok(mesh)
    }
}

fn check_measures(cx: &SimplicialComplex, m: Option<&Measures>) -> Result<(), CliError> {
    if let Some(m) = m {
        if m.edge_lengths.len() != cx.count(1) || m.face_areas.len() != cx.count(2) {
            return Err(format_err("measures do not match the complex"));
        }
    }
    Ok(())
}

/// Reads a `.off` or JSON mesh file.
pub fn read_mesh_file(path: &Path) -> Result<MeshFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let is_off = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("off"));
    let parsed = if is_off {
        MeshFile::from_off(&text)
    } else {
        MeshFile::from_json(&text)
    };
    parsed.map_err(|e| match e {
        CliError::Parse { message, .. } => CliError::Parse {
            path: path.display().to_string(),
            message,
        },
        other => other,
    })
}
