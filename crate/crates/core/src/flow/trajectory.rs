//! Exact integration of piecewise-constant fields: straight segments inside
//! cells, ray/face intersection, re-entry into the neighbouring cell.

use serde::{Deserialize, Serialize};

use crate::complex::SimplicialComplex;
use crate::dec::{whitney, MetricData};

use super::field::VectorField;
use super::FlowError;

/// Straight piece of a curve inside one tetrahedron, in its barycentric
/// coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub tet: usize,
    pub entry: [f64; 4],
    pub exit: [f64; 4],
    pub t0: f64,
    pub t1: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowCurve {
    pub segments: Vec<Segment>,
    pub total_time: f64,
    pub length: f64,
    pub start: (usize, [f64; 4]),
    /// Codimension-2 hits resolved by jitter.
    pub jitters: usize,
    /// Whether the curve got stuck in a cell where the field vanishes.
    pub stalled: bool,
}

impl FlowCurve {
    pub fn end(&self) -> (usize, [f64; 4]) {
        match self.segments.last() {
            Some(s) => (s.tet, s.exit),
            None => self.start,
        }
    }

    /// `∫ W(ω)` along the curve for a 1-cochain `ω` (exact per segment).
    pub fn line_integral(&self, m: &MetricData, omega: &[f64]) -> f64 {
        self.segments
            .iter()
            .map(|s| whitney::segment_integral1(&m.local1(s.tet, omega), &s.entry, &s.exit))
            .sum()
    }

    /// Same as [`line_integral`](Self::line_integral) for an integer cochain.
    pub fn line_integral_int(&self, m: &MetricData, omega: &[i64]) -> f64 {
        self.segments
            .iter()
            .map(|s| {
                let c = m.complex().tet_edges(s.tet).map(|e| omega[e] as f64);
                whitney::segment_integral1(&c, &s.entry, &s.exit)
            })
            .sum()
    }

    /// Time spent in each tetrahedron.
    pub fn occupation(&self, tets: usize) -> Vec<f64> {
        let mut occ = vec![0.0; tets];
        for s in &self.segments {
            occ[s.tet] += s.t1 - s.t0;
        }
        occ
    }

    /// CSV rows `t,x,y,z,cell` of the segment endpoints in chart coordinates.
    pub fn to_csv(&self, m: &MetricData) -> Option<String> {
        let mut out = String::from("t,x,y,z,cell\n");
        for (i, s) in self.segments.iter().enumerate() {
            if i == 0 {
                let p = m.position(s.tet, &s.entry)?;
                out.push_str(&format!("{},{},{},{},{}\n", s.t0, p[0], p[1], p[2], s.tet));
            }
            let p = m.position(s.tet, &s.exit)?;
            out.push_str(&format!("{},{},{},{},{}\n", s.t1, p[0], p[1], p[2], s.tet));
        }
        Some(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryOptions {
    /// Size of the perturbation used when the curve runs into an edge.
    pub jitter: f64,
    pub max_segments: usize,
}

impl Default for TrajectoryOptions {
    fn default() -> Self {
        Self {
            jitter: 1e-12,
            max_segments: 10_000_000,
        }
    }
}

/// Vertex of tetrahedron `t` with the largest barycentric weight, ties to
/// the lowest global index.
pub fn snap_vertex(cx: &SimplicialComplex, t: usize, bary: &[f64; 4]) -> usize {
    let verts = cx.tets()[t];
    let mut best = 0;
    for i in 1..4 {
        if bary[i] > bary[best] || (bary[i] == bary[best] && verts[i] < verts[best]) {
            best = i;
        }
    }
    verts[best]
}

fn normalize(p: &mut [f64; 4]) {
    for c in p.iter_mut() {
        *c = c.max(0.0);
    }
    let s: f64 = p.iter().sum();
    for c in p.iter_mut() {
        *c /= s;
    }
}

/// Integrates `field` for time `time` from the barycentric point `bary` of
/// tetrahedron `tet`. A cell where the field vanishes stalls the curve for
/// the remaining time.
pub fn integrate_trajectory(
    m: &MetricData,
    field: &VectorField,
    tet: usize,
    bary: [f64; 4],
    time: f64,
    opts: &TrajectoryOptions,
) -> Result<FlowCurve, FlowError> {
    let cx = m.complex();
    if tet >= cx.count(3)
        || bary.iter().any(|&c| !(c >= -1e-12))
        || (bary.iter().sum::<f64>() - 1.0).abs() > 1e-9
    {
        return Err(FlowError::BadStart { tet });
    }
    if time < 0.0 || time.is_nan() {
        return Err(FlowError::NegativeTime(time));
    }
    let mut p = bary;
    normalize(&mut p);
    let mut t = tet;
    let mut now = 0.0;
    let mut entry_face: Option<usize> = None;
    let mut segments = Vec::new();
    let mut length = 0.0;
    let mut jitters = 0;
    let mut stalled = false;
    let mut tiny_run = 0usize;

    while now < time {
        if segments.len() >= opts.max_segments {
            return Err(FlowError::SegmentLimit(opts.max_segments));
        }
        let r = field.rates(t);
        let scale = r.iter().fold(0.0f64, |a, &c| a.max(c.abs()));
        if scale == 0.0 {
            segments.push(Segment {
                tet: t,
                entry: p,
                exit: p,
                t0: now,
                t1: time,
            });
            stalled = true;
            break;
        }
        // First face reached; the entry face is skipped for flow tangent to it.
        let mut exit: Option<(usize, f64)> = None;
        for i in 0..4 {
            if r[i] < 0.0 && Some(i) != entry_face.filter(|_| r[i] > -1e-14 * scale) {
                let tau = p[i].max(0.0) / -r[i];
                if exit.is_none_or(|(_, best)| tau < best) {
                    exit = Some((i, tau));
                }
            }
        }
        let remaining = time - now;
        let (face, tau) = match exit {
            Some((i, tau)) if tau < remaining => (i, tau),
            _ => {
                let mut q: [f64; 4] = std::array::from_fn(|i| p[i] + r[i] * remaining);
                normalize(&mut q);
                length += m.cell(t).segment_length(&p, &q);
                segments.push(Segment {
                    tet: t,
                    entry: p,
                    exit: q,
                    t0: now,
                    t1: time,
                });
                break;
            }
        };
        let mut q: [f64; 4] = std::array::from_fn(|i| p[i] + r[i] * tau);
        q[face] = 0.0;
        normalize(&mut q);
        length += m.cell(t).segment_length(&p, &q);
        segments.push(Segment {
            tet: t,
            entry: p,
            exit: q,
            t0: now,
            t1: now + tau,
        });
        now += tau;

        // Another coordinate vanishing with the exit one means an edge hit.
        let edge_hit = (0..4).any(|i| i != face && q[i] <= opts.jitter && r[i] < 0.0);
        tiny_run = if tau <= opts.jitter { tiny_run + 1 } else { 0 };

        let (t2, local2) = cx.neighbor(t, face).ok_or(FlowError::Boundary { tet: t })?;
        let from = cx.tets()[t];
        let to = cx.tets()[t2];
        let mut p2 = [0.0; 4];
        for (i, v) in from.iter().enumerate() {
            if i != face {
                let j = to.iter().position(|w| w == v).expect("shared face");
                p2[j] = q[i];
            }
        }
        p2[local2] = 0.0;
        if edge_hit || tiny_run > 8 {
            let delta = opts.jitter * (1u64 << tiny_run.min(40)) as f64;
            for c in p2.iter_mut() {
                *c = (1.0 - delta) * *c + 0.25 * delta;
            }
            jitters += 1;
            log::debug!("trajectory jittered near an edge of tetrahedron {t2}");
        }
        normalize(&mut p2);
        t = t2;
        p = p2;
        entry_face = Some(local2);
    }
    if let Some(last) = segments.last_mut() {
        last.t1 = time;
    }
    Ok(FlowCurve {
        segments,
        total_time: time,
        length,
        start: (tet, bary),
        jitters,
        stalled,
    })
}
