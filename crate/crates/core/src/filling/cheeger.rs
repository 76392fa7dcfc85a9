//! Upper estimates of `h¹ = inf l(γ) / A(γ)` over sampled trivial cycles.
//!
//! The estimate is a minimum over a finite set of skeleton cycles, hence an
//! upper bound for the discrete constant and only a heuristic for the smooth
//! one.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::complex::{Chain, SimplicialComplex};
use crate::dec::Measures;
use crate::homology::{classify_cycle, fundamental_cycles, HomologyBasis};

use super::{FillingContext, FillingError, FillingOptions, FillingResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CycleSource {
    Fundamental,
    ShortCycle,
    Extra,
}

impl CycleSource {
    fn label(self) -> &'static str {
        match self {
            CycleSource::Fundamental => "fundamental",
            CycleSource::ShortCycle => "short",
            CycleSource::Extra => "extra",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheegerOptions {
    /// At most this many trivial fundamental cycles are filled.
    pub max_fundamental: usize,
    /// Number of BFS roots for short cycles.
    pub short_roots: usize,
    /// Depth bound of the BFS.
    pub short_depth: usize,
    /// Short cycles kept per root.
    pub short_per_root: usize,
    pub filling: FillingOptions,
}

impl Default for CheegerOptions {
    fn default() -> Self {
        Self {
            max_fundamental: 16,
            short_roots: 4,
            short_depth: 3,
            short_per_root: 4,
            filling: FillingOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheegerCandidate {
    pub id: usize,
    pub source: CycleSource,
    pub length: f64,
    pub r: u64,
    pub area: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheegerEstimate {
    /// Upper bound for the discrete `h¹`.
    pub h1_upper: f64,
    pub witness_cycle: Chain,
    pub witness_filling: FillingResult,
    pub cycles_examined: usize,
    pub candidates: Vec<CheegerCandidate>,
}

impl CheegerEstimate {
    /// Table with one row per examined cycle.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("cycle_id,source,length,r,area,ratio\n");
        for c in &self.candidates {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                c.id,
                c.source.label(),
                c.length,
                c.r,
                c.area,
                c.ratio
            ));
        }
        out
    }
}

/// Cycles through BFS roots closed by a non-tree edge, within `depth` hops.
fn short_cycles(cx: &SimplicialComplex, opts: &CheegerOptions) -> Vec<Chain> {
    let nv = cx.vertex_count();
    let roots = opts.short_roots.min(nv);
    let mut out = Vec::new();
    for k in 0..roots {
        let root = k * nv / roots.max(1);
        let mut parent: Vec<Option<usize>> = vec![None; nv];
        let mut depth = vec![usize::MAX; nv];
        depth[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &e in cx.vertex_edges(v) {
                let [a, b] = cx.edges()[e];
                let w = if a == v { b } else { a };
                if depth[w] == usize::MAX && depth[v] < opts.short_depth {
                    depth[w] = depth[v] + 1;
                    parent[w] = Some(v);
                    queue.push_back(w);
                }
            }
        }
        let mut closing: Vec<(usize, usize)> = cx
            .edges()
            .iter()
            .filter(|&&[v, w]| {
                depth[v] != usize::MAX
                    && depth[w] != usize::MAX
                    && parent[v] != Some(w)
                    && parent[w] != Some(v)
            })
            .map(|&[v, w]| (v, w))
            .collect();
        // Longest closing edges first: they give the largest cycles.
        closing.sort_by_key(|&(v, w)| std::cmp::Reverse(depth[v] + depth[w]));
        let path_to_root = |mut v: usize| {
            let mut p = vec![v];
            while let Some(u) = parent[v] {
                p.push(u);
                v = u;
            }
            p
        };
        for (v, w) in closing.into_iter().take(opts.short_per_root) {
            let mut walk = path_to_root(v);
            walk.reverse();
            walk.extend(path_to_root(w));
            if let Some(c) = Chain::edge_path(cx, &walk) {
                if !c.is_zero() {
                    out.push(c);
                }
            }
        }
    }
    out
}

/// Minimum of `l(γ) / A(γ)` over trivial fundamental cycles, short BFS
/// cycles and the caller's `extra` cycles (such as projected flow curves).
pub fn cheeger_estimate(
    cx: &SimplicialComplex,
    measures: &Measures,
    h: &HomologyBasis,
    extra: &[Chain],
    opts: &CheegerOptions,
) -> Result<CheegerEstimate, FillingError> {
    let ctx = FillingContext::new(cx, &measures.face_areas)?;
    let is_trivial = |c: &Chain| {
        classify_cycle(cx, h, c)
            .map(|k| k.trivial_order.finite().is_some())
            .unwrap_or(false)
    };
    let mut pool: Vec<(CycleSource, Chain)> = Vec::new();
    pool.extend(
        fundamental_cycles(cx)
            .into_iter()
            .map(|(_, c)| c)
            .filter(|c| is_trivial(c))
            .take(opts.max_fundamental)
            .map(|c| (CycleSource::Fundamental, c)),
    );
    pool.extend(
        short_cycles(cx, opts)
            .into_iter()
            .filter(|c| is_trivial(c))
            .map(|c| (CycleSource::ShortCycle, c)),
    );
    pool.extend(
        extra
            .iter()
            .filter(|c| !c.is_zero() && is_trivial(c))
            .map(|c| (CycleSource::Extra, c.clone())),
    );
    let cycles: Vec<Chain> = pool.iter().map(|(_, c)| c.clone()).collect();
    let fills = ctx.fill_many(h, &cycles, &opts.filling);

    let mut candidates = Vec::new();
    let mut best: Option<(usize, FillingResult)> = None;
    for (id, ((source, c), fill)) in pool.iter().zip(fills).enumerate() {
        let fill = fill?;
        if fill.area <= 0.0 {
            continue;
        }
        let length = c.weighted_l1(&measures.edge_lengths);
        let ratio = length / fill.area;
        candidates.push(CheegerCandidate {
            id,
            source: *source,
            length,
            r: fill.r_used,
            area: fill.area,
            ratio,
        });
        if best.as_ref().is_none_or(|(b, _)| ratio < candidates[*b].ratio) {
            best = Some((candidates.len() - 1, fill));
        }
    }
    let (b, witness_filling) = best.ok_or(FillingError::NoTrivialCycles)?;
    Ok(CheegerEstimate {
        h1_upper: candidates[b].ratio,
        witness_cycle: pool[candidates[b].id].1.clone(),
        witness_filling,
        cycles_examined: candidates.len(),
        candidates,
    })
}
