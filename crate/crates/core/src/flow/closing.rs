//! Closing a family of trajectories into one loop and subtracting its
//! homology class.
//!
//! The end of each trajectory is joined to the start of the next by a
//! straight snap to the nearest vertex and a shortest edge path. The loop's
//! free homology coordinates are read off by integrating the dual cocycles
//! along it, and the corresponding multiples of the basis cycles are
//! subtracted. The result is kept as a formal chain; it need not be
//! connected.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::complex::{Chain, SimplicialComplex};
use crate::dec::{whitney, MetricData};
use crate::filling::{project_path, FillingContext, FillingOptions, FillingResult, PolySegment};
use crate::homology::{classify_cycle, edge_loop, HomologyBasis};

use super::trajectory::{snap_vertex, FlowCurve};
use super::FlowError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosingOptions {
    /// Largest accepted distance of a cocycle integral from an integer.
    pub rounding_tol: f64,
    /// Project to the skeleton and fill with the LP.
    pub fill: bool,
    pub filling: FillingOptions,
}

impl Default for ClosingOptions {
    fn default() -> Self {
        Self {
            rounding_tol: 0.1,
            fill: true,
            filling: FillingOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedConstruction {
    pub trajectories: Vec<FlowCurve>,
    /// Straight pieces between trajectory endpoints and their snap vertices.
    pub snaps: Vec<PolySegment>,
    /// Vertex paths from the end of trajectory `i` to the start of `i + 1`.
    pub connectors: Vec<Vec<usize>>,
    /// `cⱼ`, the free coordinates removed from the loop.
    pub unrolling: Vec<i64>,
    pub rounding_residual: f64,
    /// `maxⱼ |⟨βⱼ, Γ⟩|`
    pub homology_residual: f64,
    pub gamma_part_length: f64,
    pub snap_length: f64,
    pub connector_length: f64,
    /// `Σ |cⱼ| l(υⱼ)` plus a round trip from the loop to each used `υⱼ`.
    pub unrolling_length: f64,
    pub nu_part_length: f64,
    pub n_t: f64,
    /// `γ_c − Σ cⱼ υⱼ` with the trajectory and snap pieces projected.
    pub skeleton: Chain,
    pub correction_area: f64,
    pub projection_constant: f64,
    pub filling: Option<FillingResult>,
}

impl ClosedConstruction {
    pub fn length(&self) -> f64 {
        self.gamma_part_length + self.nu_part_length
    }

    /// Area of the constructed filling of `Γ`: the LP filling of the
    /// skeleton cycle plus the cone corrections.
    pub fn filling_area(&self) -> Option<f64> {
        self.filling.as_ref().map(|f| f.area + self.correction_area)
    }

    /// `ρ̂ = l(Γ) / area` of the constructed filling.
    pub fn ratio(&self) -> Option<f64> {
        self.filling_area().map(|a| self.length() / a)
    }

    /// `∫_Γ W(ω)` for a real 1-cochain.
    pub fn line_integral(&self, m: &MetricData, h: &HomologyBasis, omega: &[f64]) -> f64 {
        let cx = m.complex();
        let mut acc: f64 = self.trajectories.iter().map(|c| c.line_integral(m, omega)).sum();
        acc += self
            .snaps
            .iter()
            .map(|s| whitney::segment_integral1(&m.local1(s.tet, omega), &s.p, &s.q))
            .sum::<f64>();
        for path in &self.connectors {
            if let Some(c) = Chain::edge_path(cx, path) {
                acc += c.pair_real(omega);
            }
        }
        for (c, z) in self.unrolling.iter().zip(&h.cycles) {
            acc -= *c as f64 * z.pair_real(omega);
        }
        acc
    }
}

#[derive(PartialEq)]
struct Item(f64, usize);

impl Eq for Item {}

impl Ord for Item {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortest-path tree from `source` under edge lengths.
fn dijkstra(cx: &SimplicialComplex, lengths: &[f64], source: usize) -> (Vec<f64>, Vec<usize>) {
    let n = cx.vertex_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut prev = vec![usize::MAX; n];
    dist[source] = 0.0;
    let mut heap = BinaryHeap::from([Item(0.0, source)]);
    while let Some(Item(d, v)) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &e in cx.vertex_edges(v) {
            let [a, b] = cx.edges()[e];
            let w = if a == v { b } else { a };
            let nd = d + lengths[e];
            if nd < dist[w] {
                dist[w] = nd;
                prev[w] = v;
                heap.push(Item(nd, w));
            }
        }
    }
    (dist, prev)
}

fn path_to(prev: &[usize], source: usize, target: usize) -> Vec<usize> {
    let mut p = vec![target];
    let mut v = target;
    while v != source {
        v = prev[v];
        p.push(v);
    }
    p.reverse();
    p
}

fn corner(t: &[usize; 4], v: usize) -> [f64; 4] {
    let mut c = [0.0; 4];
    c[t.iter().position(|&w| w == v).expect("vertex of tet")] = 1.0;
    c
}

/// Builds `Γ(n,T)` from `n` trajectories: connectors, homological
/// unrolling, skeleton projection and (optionally) the LP filling.
pub fn close_and_unroll(
    m: &MetricData,
    h: &HomologyBasis,
    trajectories: Vec<FlowCurve>,
    opts: &ClosingOptions,
) -> Result<ClosedConstruction, FlowError> {
    let n = trajectories.len();
    if n == 0 {
        return Err(FlowError::NoTrajectories);
    }
    let cx = m.complex();
    let lengths = &m.measures().edge_lengths;
    let ends: Vec<((usize, [f64; 4]), (usize, [f64; 4]))> =
        trajectories.iter().map(|c| (c.start, c.end())).collect();
    let start_v: Vec<usize> = ends.iter().map(|((t, p), _)| snap_vertex(cx, *t, p)).collect();
    let end_v: Vec<usize> = ends.iter().map(|(_, (t, p))| snap_vertex(cx, *t, p)).collect();

    // Snap pieces: vertex → start and end → vertex.
    let mut snaps = Vec::with_capacity(2 * n);
    let mut pieces: Vec<Vec<PolySegment>> = Vec::with_capacity(n);
    for (i, c) in trajectories.iter().enumerate() {
        let ((ts, ps), (te, pe)) = ends[i];
        let vin = PolySegment {
            tet: ts,
            p: corner(&cx.tets()[ts], start_v[i]),
            q: ps,
        };
        let vout = PolySegment {
            tet: te,
            p: pe,
            q: corner(&cx.tets()[te], end_v[i]),
        };
        snaps.push(vin);
        snaps.push(vout);
        let mut piece = vec![vin];
        piece.extend(c.segments.iter().map(|s| PolySegment {
            tet: s.tet,
            p: s.entry,
            q: s.exit,
        }));
        piece.push(vout);
        pieces.push(piece);
    }
    let snap_length: f64 = snaps.iter().map(|s| m.cell(s.tet).segment_length(&s.p, &s.q)).sum();

    // Connectors between consecutive trajectories (cyclically).
    let mut connectors = Vec::with_capacity(n);
    let mut connector_length = 0.0;
    for i in 0..n {
        let (a, b) = (end_v[i], start_v[(i + 1) % n]);
        if a == b {
            connectors.push(vec![a]);
            continue;
        }
        let (dist, prev) = dijkstra(cx, lengths, a);
        connector_length += dist[b];
        connectors.push(path_to(&prev, a, b));
    }
    let connector_chain = {
        let mut c = Chain::zero(1);
        for p in &connectors {
            if let Some(z) = Chain::edge_path(cx, p) {
                c.add_chain(&z, 1);
            }
        }
        c
    };

    // Free coordinates by integrating the dual cocycles.
    let mut raw = Vec::with_capacity(h.rank);
    for beta in &h.dual_cocycles {
        let mut s: f64 = trajectories.iter().map(|c| c.line_integral_int(m, beta)).sum();
        for sn in &snaps {
            let c = cx.tet_edges(sn.tet).map(|e| beta[e] as f64);
            s += whitney::segment_integral1(&c, &sn.p, &sn.q);
        }
        s += connector_chain.pair(beta) as f64;
        raw.push(s);
    }
    let unrolling: Vec<i64> = raw.iter().map(|s| s.round() as i64).collect();
    let rounding_residual = raw
        .iter()
        .zip(&unrolling)
        .fold(0.0f64, |a, (s, c)| a.max((s - *c as f64).abs()));
    if rounding_residual >= opts.rounding_tol {
        return Err(FlowError::Rounding {
            residual: rounding_residual,
        });
    }
    let pairing = h.pairing_matrix();
    let homology_residual = (0..h.rank)
        .map(|j| {
            let sub: i64 = (0..h.rank).map(|k| unrolling[k] * pairing[j][k]).sum();
            (raw[j] - sub as f64).abs()
        })
        .fold(0.0f64, f64::max);

    // Unrolling cost: copies of υⱼ plus a round trip from the loop.
    let mut unrolling_length = 0.0;
    let base = start_v[0];
    let mut base_dist: Option<Vec<f64>> = None;
    for (c, z) in unrolling.iter().zip(&h.cycles) {
        if *c == 0 {
            continue;
        }
        let dist = base_dist.get_or_insert_with(|| dijkstra(cx, lengths, base).0);
        let anchor = edge_loop(cx, z).and_then(|w| w.first().copied()).unwrap_or(base);
        unrolling_length += c.unsigned_abs() as f64 * m.chain_length(z) + 2.0 * dist[anchor];
    }

    let gamma_part_length: f64 = trajectories.iter().map(|c| c.length).sum();
    let n_t: f64 = trajectories.iter().map(|c| c.total_time).sum();

    // Skeleton cycle.
    let mut skeleton = connector_chain;
    let mut correction_area = 0.0;
    let mut curve_len = 0.0;
    let mut skel_len = 0.0;
    for piece in &pieces {
        let p = project_path(m, piece)?;
        skeleton.add_chain(&p.chain, 1);
        correction_area += p.correction_area;
        curve_len += p.curve_length;
        skel_len += p.skeleton_length;
    }
    for (c, z) in unrolling.iter().zip(&h.cycles) {
        skeleton.add_chain(z, -c);
    }
    let projection_constant = if curve_len > 0.0 {
        skel_len.max(correction_area) / curve_len
    } else {
        0.0
    };

    let filling = if opts.fill {
        let class = classify_cycle(cx, h, &skeleton)?;
        if class.free_coords.iter().any(|&c| c != 0) {
            return Err(crate::filling::FillingError::NotTrivial(class.free_coords).into());
        }
        let ctx = FillingContext::new(cx, &m.measures().face_areas)?;
        Some(ctx.fill(h, &skeleton, &opts.filling)?)
    } else {
        None
    };

    Ok(ClosedConstruction {
        trajectories,
        snaps,
        connectors,
        unrolling,
        rounding_residual,
        homology_residual,
        gamma_part_length,
        snap_length,
        connector_length,
        unrolling_length,
        nu_part_length: snap_length + connector_length + unrolling_length,
        n_t,
        skeleton,
        correction_area,
        projection_constant,
        filling,
    })
}
