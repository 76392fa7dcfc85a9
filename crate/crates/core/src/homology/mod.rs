//! Integer homology of a simplicial complex: Betti numbers, torsion, a cycle
//! basis of the free part of H₁ and the dual integer cocycles.
//!
//! H₁ is computed as `Z₁ / B₁` in the coordinates of fundamental cycles of a
//! spanning forest, so a cycle's coordinates are just its coefficients on
//! the non-tree edges. The boundary relations are reduced by sparse unit-pivot
//! elimination and the small remainder by an exact Smith normal form.

pub mod reduce;
pub mod snf;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{Chain, ComplexError, SimplicialComplex};
use crate::sparse::CsrMatrix;

pub use snf::{smith_normal_form, IntMatrix, Snf};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HomologyError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("chain is not a 1-cycle (boundary has {0} nonzero entries)")]
    NotACycle(usize),
    #[error("expected a 1-chain, got degree {0}")]
    WrongDegree(usize),
    #[error("cocycle coefficient does not fit in 64 bits")]
    Overflow,
}

/// Order with which a cycle becomes an integer boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrivialOrder {
    Finite(u64),
    Infinite,
}

impl TrivialOrder {
    pub fn finite(self) -> Option<u64> {
        match self {
            TrivialOrder::Finite(r) => Some(r),
            TrivialOrder::Infinite => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleClass {
    /// `cⱼ = ⟨βⱼ, γ⟩`
    pub free_coords: Vec<i64>,
    /// Coordinates in each torsion summand, reduced mod its order.
    pub torsion_coords: Vec<u64>,
    /// Smallest `r > 0` with `r·γ` a boundary, if any.
    pub trivial_order: TrivialOrder,
    /// Smallest `r > 0` with `r·(γ − Σ cⱼ υⱼ)` a boundary; always finite.
    pub residual_order: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HomologyBasis {
    /// First Betti number `k`.
    pub rank: usize,
    pub torsion_orders: Vec<u64>,
    /// `υ₁..υ_k`
    pub cycles: Vec<Chain>,
    /// `β₁..β_k` as integer edge cochains.
    pub dual_cocycles: Vec<Vec<i64>>,
    /// Generators of the torsion summands.
    pub torsion_cycles: Vec<Chain>,
    /// Cocycles modulo the torsion orders reading off torsion coordinates.
    pub torsion_cocycles: Vec<Vec<i64>>,
    /// Least common multiple of the torsion orders.
    pub r_universal: u64,
    pub betti: [usize; 4],
}

fn big_to_i64(v: &BigInt) -> Result<i64, HomologyError> {
    v.to_i64().ok_or(HomologyError::Overflow)
}

/// Spanning forest by breadth-first search: parent edge of every vertex.
struct Forest {
    parent: Vec<Option<(usize, usize)>>,
    tree_edge: Vec<bool>,
    components: usize,
}

impl Forest {
    fn new(cx: &SimplicialComplex) -> Self {
        let nv = cx.vertex_count();
        let mut parent = vec![None; nv];
        let mut seen = vec![false; nv];
        let mut tree_edge = vec![false; cx.count(1)];
        let mut components = 0;
        for s in 0..nv {
            if seen[s] {
                continue;
            }
            components += 1;
            seen[s] = true;
            let mut queue = std::collections::VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &e in cx.vertex_edges(v) {
                    let [a, b] = cx.edges()[e];
                    let w = if a == v { b } else { a };
                    if !seen[w] {
                        seen[w] = true;
                        parent[w] = Some((v, e));
                        tree_edge[e] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        Self {
            parent,
            tree_edge,
            components,
        }
    }

    /// Oriented edge path from `v` to its tree root.
    fn root_path(&self, cx: &SimplicialComplex, mut v: usize, sign: i64, out: &mut Chain) {
        while let Some((p, _)) = self.parent[v] {
            let (e, s) = cx.edge_index(v, p).expect("tree edge exists");
            out.add(e, sign * s);
            v = p;
        }
    }

    /// Fundamental cycle of the non-tree edge `e`, traversed along `e`.
    fn fundamental_cycle(&self, cx: &SimplicialComplex, e: usize) -> Chain {
        let [a, b] = cx.edges()[e];
        let mut z = Chain::from_pairs(1, [(e, 1)]);
        self.root_path(cx, b, 1, &mut z);
        self.root_path(cx, a, -1, &mut z);
        z
    }
}

/// Marks the edges of a breadth-first spanning forest. A 1-cycle is
/// determined by its coefficients on the unmarked edges.
pub fn spanning_forest_edges(cx: &SimplicialComplex) -> Vec<bool> {
    Forest::new(cx).tree_edge
}

/// Fundamental cycles of all non-tree edges of the breadth-first forest,
/// as `(edge, cycle)` pairs.
pub fn fundamental_cycles(cx: &SimplicialComplex) -> Vec<(usize, Chain)> {
    let forest = Forest::new(cx);
    (0..cx.count(1))
        .filter(|&e| !forest.tree_edge[e])
        .map(|e| (e, forest.fundamental_cycle(cx, e)))
        .collect()
}

fn sparse_columns(m: &CsrMatrix<i64>, row_map: &[usize]) -> (usize, Vec<Vec<(usize, i64)>>) {
    let t = m.transpose();
    let nrows = row_map.iter().filter(|&&r| r != usize::MAX).count();
    let cols = (0..t.nrows())
        .map(|c| {
            let (rows, vals) = t.row(c);
            let mut col: Vec<(usize, i64)> = rows
                .iter()
                .zip(vals)
                .filter(|(&r, _)| row_map[r] != usize::MAX)
                .map(|(&r, &v)| (row_map[r], v))
                .collect();
            col.sort_unstable();
            col
        })
        .collect();
    (nrows, cols)
}

/// Rank of an integer matrix (exact).
pub fn integer_rank(m: &CsrMatrix<i64>) -> usize {
    let identity: Vec<usize> = (0..m.nrows()).collect();
    let (nrows, cols) = sparse_columns(m, &identity);
    let red = reduce::reduce(nrows, cols);
    if red.remainder.cols() == 0 {
        return red.pivots();
    }
    red.pivots() + smith_normal_form(&red.remainder).rank()
}

/// Computes Betti numbers, torsion, the cycle basis and dual cocycles.
pub fn homology_basis(cx: &SimplicialComplex) -> Result<HomologyBasis, HomologyError> {
    let forest = Forest::new(cx);
    let nontree: Vec<usize> = (0..cx.count(1)).filter(|&e| !forest.tree_edge[e]).collect();
    let mut row_map = vec![usize::MAX; cx.count(1)];
    for (k, &e) in nontree.iter().enumerate() {
        row_map[e] = k;
    }

    let d2 = cx.boundary_matrix(2)?;
    let (m, cols) = sparse_columns(&d2, &row_map);
    let red = reduce::reduce(m, cols);
    let snf = smith_normal_form(&red.remainder);
    let factors = snf.invariant_factors();
    let rank_d2 = red.pivots() + factors.len();
    let rank_d1 = cx.vertex_count() - forest.components;
    let rank_d3 = if cx.count(3) > 0 {
        integer_rank(&cx.boundary_matrix(3)?)
    } else {
        0
    };
    let betti = [
        forest.components,
        cx.count(1) - rank_d1 - rank_d2,
        cx.count(2) - rank_d2 - rank_d3,
        cx.count(3) - rank_d3,
    ];

    let survivors = red.rows.len();
    let to_cochain = |coords: Vec<BigInt>| -> Result<Vec<i64>, HomologyError> {
        let mut c = vec![0i64; cx.count(1)];
        for (k, v) in coords.iter().enumerate() {
            c[nontree[k]] = big_to_i64(v)?;
        }
        Ok(c)
    };
    let to_cycle = |col: usize| -> Result<Chain, HomologyError> {
        let mut z = Chain::zero(1);
        for k in 0..survivors {
            let x = snf.u_inv.get(k, col);
            if !x.is_zero() {
                let e = nontree[red.rows[k]];
                z.add_chain(&forest.fundamental_cycle(cx, e), big_to_i64(x)?);
            }
        }
        Ok(z)
    };

    let mut torsion_orders = Vec::new();
    let mut torsion_cycles = Vec::new();
    let mut torsion_cocycles = Vec::new();
    for (i, d) in factors.iter().enumerate() {
        if *d > BigInt::from(1) {
            let order = d.to_u64().ok_or(HomologyError::Overflow)?;
            let raw = reduce::pull_back_covector(&red, m, snf.u.row(i));
            let reduced: Vec<BigInt> = raw.iter().map(|v| v.mod_floor(d)).collect();
            torsion_orders.push(order);
            torsion_cocycles.push(to_cochain(reduced)?);
            torsion_cycles.push(to_cycle(i)?);
        }
    }
    let mut cycles = Vec::new();
    let mut dual_cocycles = Vec::new();
    for i in factors.len()..survivors {
        let raw = reduce::pull_back_covector(&red, m, snf.u.row(i));
        dual_cocycles.push(to_cochain(raw)?);
        cycles.push(to_cycle(i)?);
    }
    let r_universal = torsion_orders.iter().fold(1u64, |acc, &d| acc.lcm(&d));

    Ok(HomologyBasis {
        rank: cycles.len(),
        torsion_orders,
        cycles,
        dual_cocycles,
        torsion_cycles,
        torsion_cocycles,
        r_universal,
        betti,
    })
}

impl HomologyBasis {
    /// `⟨βᵢ, υⱼ⟩`
    pub fn pairing_matrix(&self) -> Vec<Vec<i64>> {
        self.dual_cocycles
            .iter()
            .map(|b| self.cycles.iter().map(|z| z.pair(b)).collect())
            .collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.betti[0] as i64 - self.betti[1] as i64 + self.betti[2] as i64
            - self.betti[3] as i64
    }

    /// `γ − Σ cⱼ υⱼ` for the free coordinates of `γ`.
    pub fn unrolled(&self, gamma: &Chain) -> Chain {
        let mut out = gamma.clone();
        for (b, z) in self.dual_cocycles.iter().zip(&self.cycles) {
            out.add_chain(z, -gamma.pair(b));
        }
        out
    }
}

/// Free and torsion coordinates of a 1-cycle and the order with which it
/// bounds. The default order is the per-curve minimum; `r_universal` on the
/// basis is the global alternative.
pub fn classify_cycle(
    cx: &SimplicialComplex,
    h: &HomologyBasis,
    gamma: &Chain,
) -> Result<CycleClass, HomologyError> {
    if gamma.degree != 1 {
        return Err(HomologyError::WrongDegree(gamma.degree));
    }
    let bd = gamma.boundary(cx)?;
    if !bd.is_zero() {
        return Err(HomologyError::NotACycle(bd.len()));
    }
    let free_coords: Vec<i64> = h.dual_cocycles.iter().map(|b| gamma.pair(b)).collect();
    let mut residual_order = 1u64;
    let mut torsion_coords = Vec::new();
    for (tau, &d) in h.torsion_cocycles.iter().zip(&h.torsion_orders) {
        let t = gamma
            .iter()
            .map(|(i, c)| (c as i128) * (tau[i] as i128))
            .sum::<i128>()
            .rem_euclid(d as i128) as u64;
        torsion_coords.push(t);
        residual_order = residual_order.lcm(&(d / t.gcd(&d)));
    }
    let trivial_order = if free_coords.iter().all(|&c| c == 0) {
        TrivialOrder::Finite(residual_order)
    } else {
        TrivialOrder::Infinite
    };
    Ok(CycleClass {
        free_coords,
        torsion_coords,
        trivial_order,
        residual_order,
    })
}

/// Writes a 1-cycle as a single closed vertex walk when its support is
/// connected (Euler circuit on the oriented edges, multiplicities included).
pub fn edge_loop(cx: &SimplicialComplex, gamma: &Chain) -> Option<Vec<usize>> {
    use std::collections::HashMap;
    let mut out_edges: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut total = 0usize;
    for (e, c) in gamma.iter() {
        let [a, b] = cx.edges()[e];
        let (from, to) = if c > 0 { (a, b) } else { (b, a) };
        for _ in 0..c.unsigned_abs() {
            out_edges.entry(from).or_default().push(to);
            total += 1;
        }
    }
    let start = *out_edges.keys().min()?;
    for v in out_edges.values_mut() {
        v.sort_unstable_by(|a, b| b.cmp(a));
    }
    // Hierholzer.
    let mut stack = vec![start];
    let mut walk = Vec::with_capacity(total + 1);
    while let Some(&v) = stack.last() {
        match out_edges.get_mut(&v).and_then(Vec::pop) {
            Some(w) => stack.push(w),
            None => walk.push(stack.pop().expect("nonempty")),
        }
    }
    walk.reverse();
    (walk.len() == total + 1).then_some(walk)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{build_complex, build_surface};

    #[test]
    fn four_simplex_boundary_is_a_sphere() {
        let tets: Vec<[usize; 4]> = (0..5)
            .map(|skip| {
                let v: Vec<usize> = (0..5).filter(|&i| i != skip).collect();
                [v[0], v[1], v[2], v[3]]
            })
            .collect();
        let cx = build_complex(5, &tets).unwrap();
        let h = homology_basis(&cx).unwrap();
        assert_eq!(h.betti, [1, 0, 0, 1]);
        assert_eq!(h.rank, 0);
        assert_eq!(h.r_universal, 1);
    }

    #[test]
    fn annulus_has_one_free_class() {
        // Triangulated annulus: inner triangle 0,1,2 and outer 3,4,5.
        let tris = [
            [0, 1, 4],
            [0, 4, 3],
            [1, 2, 5],
            [1, 5, 4],
            [2, 0, 3],
            [2, 3, 5],
        ];
        let cx = build_surface(6, &tris).unwrap();
        let h = homology_basis(&cx).unwrap();
        assert_eq!(h.betti[..2], [1, 1]);
        assert_eq!(h.pairing_matrix(), vec![vec![1]]);
        let inner = Chain::edge_path(&cx, &[0, 1, 2, 0]).unwrap();
        let class = classify_cycle(&cx, &h, &inner).unwrap();
        assert_eq!(class.free_coords.len(), 1);
        assert_eq!(class.free_coords[0].abs(), 1);
        assert_eq!(class.trivial_order, TrivialOrder::Infinite);
        let unrolled = h.unrolled(&inner);
        assert_eq!(
            classify_cycle(&cx, &h, &unrolled).unwrap().trivial_order,
            TrivialOrder::Finite(1)
        );
    }

    #[test]
    fn non_cycle_rejected() {
        let cx = build_surface(3, &[[0, 1, 2]]).unwrap();
        let h = homology_basis(&cx).unwrap();
        let path = Chain::edge_path(&cx, &[0, 1, 2]).unwrap();
        assert!(matches!(
            classify_cycle(&cx, &h, &path),
            Err(HomologyError::NotACycle(2))
        ));
    }

    #[test]
    fn euler_walk_recovers_loop() {
        let cx = build_surface(3, &[[0, 1, 2]]).unwrap();
        let z = Chain::edge_path(&cx, &[0, 2, 1, 0]).unwrap();
        let walk = edge_loop(&cx, &z).unwrap();
        assert_eq!(walk.len(), 4);
        assert_eq!(Chain::edge_path(&cx, &walk).unwrap(), z);
    }
}
