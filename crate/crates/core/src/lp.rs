//! Linear programs in equality standard form `min cᵀx, A x = b, x ≥ 0`.
//!
//! A dense two-phase revised simplex with Bland's rule handles small
//! problems deterministically; larger ones go to a sparse LU-based solver.
//! A depth-first branch and bound on top of the dense simplex solves the
//! pure integer version for tiny instances.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::sparse::CsrMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct LpProblem {
    pub a: CsrMatrix,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

impl LpSolution {
    fn failed(status: LpStatus, n: usize, iterations: usize) -> Self {
        Self {
            status,
            x: vec![0.0; n],
            objective: f64::NAN,
            iterations,
        }
    }
}

const EPS: f64 = 1e-9;

/// Dense revised simplex state. Columns `n..n+m` are artificials.
struct Simplex<'a> {
    p: &'a LpProblem,
    /// Columns of `A` as dense vectors, row signs folded in so `b ≥ 0`.
    cols: Vec<Vec<(usize, f64)>>,
    b: Vec<f64>,
    m: usize,
    n: usize,
    basis: Vec<usize>,
    binv: DMatrix<f64>,
    xb: Vec<f64>,
    iterations: usize,
    since_refactor: usize,
}

impl<'a> Simplex<'a> {
    fn new(p: &'a LpProblem) -> Self {
        let (m, n) = (p.a.nrows(), p.a.ncols());
        let sign: Vec<f64> = p.b.iter().map(|&v| if v < 0.0 { -1.0 } else { 1.0 }).collect();
        let at = p.a.transpose();
        let mut cols: Vec<Vec<(usize, f64)>> = (0..n)
            .map(|j| {
                let (rows, vals) = at.row(j);
                rows.iter().zip(vals).map(|(&r, &v)| (r, v * sign[r])).collect()
            })
            .collect();
        for i in 0..m {
            cols.push(vec![(i, 1.0)]);
        }
        let b: Vec<f64> = p.b.iter().zip(&sign).map(|(v, s)| v * s).collect();
        Self {
            p,
            cols,
            xb: b.clone(),
            b,
            m,
            n,
            basis: (n..n + m).collect(),
            binv: DMatrix::identity(m, m),
            iterations: 0,
            since_refactor: 0,
        }
    }

    fn ftran(&self, j: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.m];
        for &(r, v) in &self.cols[j] {
            for (i, o) in out.iter_mut().enumerate() {
                *o += self.binv[(i, r)] * v;
            }
        }
        out
    }

    fn refactor(&mut self) {
        let mut bm = DMatrix::zeros(self.m, self.m);
        for (k, &j) in self.basis.iter().enumerate() {
            for &(r, v) in &self.cols[j] {
                bm[(r, k)] = v;
            }
        }
        if let Some(inv) = bm.try_inverse() {
            self.binv = inv;
            self.xb = (&self.binv * nalgebra::DVector::from_column_slice(&self.b))
                .iter()
                .map(|&v| if v.abs() < 1e-12 { 0.0 } else { v })
                .collect();
        }
        self.since_refactor = 0;
    }

    /// Runs simplex iterations with costs `cost` over allowed entering
    /// columns. Returns false on unboundedness.
    fn run(&mut self, cost: &[f64], allowed: &dyn Fn(usize) -> bool, max_iter: usize) -> Option<bool> {
        loop {
            if self.iterations >= max_iter {
                return None;
            }
            let cb: Vec<f64> = self.basis.iter().map(|&j| cost[j]).collect();
            let mut y = vec![0.0; self.m];
            for (k, &c) in cb.iter().enumerate() {
                if c != 0.0 {
                    for (r, yr) in y.iter_mut().enumerate() {
                        *yr += c * self.binv[(k, r)];
                    }
                }
            }
            let mut in_basis = vec![false; self.cols.len()];
            for &j in &self.basis {
                in_basis[j] = true;
            }
            // Bland: lowest-index improving column.
            let entering = (0..self.cols.len()).find(|&j| {
                if in_basis[j] || !allowed(j) {
                    return false;
                }
                let d = cost[j] - self.cols[j].iter().map(|&(r, v)| y[r] * v).sum::<f64>();
                d < -EPS
            });
            let Some(q) = entering else { return Some(true) };
            let col = self.ftran(q);
            let mut leave: Option<(usize, f64)> = None;
            for k in 0..self.m {
                if col[k] > EPS {
                    let ratio = self.xb[k] / col[k];
                    let better = match leave {
                        None => true,
                        Some((l, best)) => {
                            ratio < best - 1e-12
                                || (ratio <= best + 1e-12 && self.basis[k] < self.basis[l])
                        }
                    };
                    if better {
                        leave = Some((k, ratio));
                    }
                }
            }
            let Some((r, _)) = leave else { return Some(false) };
            self.pivot(r, q, &col);
        }
    }

    fn pivot(&mut self, r: usize, q: usize, col: &[f64]) {
        let piv = col[r];
        let theta = self.xb[r] / piv;
        for k in 0..self.m {
            if k != r {
                self.xb[k] -= theta * col[k];
                if self.xb[k].abs() < 1e-13 {
                    self.xb[k] = 0.0;
                }
            }
        }
        self.xb[r] = theta;
        let row_r: Vec<f64> = (0..self.m).map(|c| self.binv[(r, c)] / piv).collect();
        for k in 0..self.m {
            if k != r && col[k] != 0.0 {
                for c in 0..self.m {
                    self.binv[(k, c)] -= col[k] * row_r[c];
                }
            }
        }
        for c in 0..self.m {
            self.binv[(r, c)] = row_r[c];
        }
        self.basis[r] = q;
        self.iterations += 1;
        self.since_refactor += 1;
        if self.since_refactor >= 64 {
            self.refactor();
        }
    }

    fn solve(mut self, max_iter: usize) -> LpSolution {
        let (m, n) = (self.m, self.n);
        // Phase 1: minimize the sum of artificials.
        let mut cost1 = vec![0.0; n + m];
        for c in cost1.iter_mut().skip(n) {
            *c = 1.0;
        }
        match self.run(&cost1, &|_| true, max_iter) {
            None => return LpSolution::failed(LpStatus::Infeasible, n, self.iterations),
            Some(_) => {}
        }
        self.refactor();
        let infeas: f64 = self
            .basis
            .iter()
            .zip(&self.xb)
            .filter(|(&j, _)| j >= n)
            .map(|(_, v)| v.abs())
            .sum();
        let scale = 1.0 + self.b.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if infeas > 1e-7 * scale {
            return LpSolution::failed(LpStatus::Infeasible, n, self.iterations);
        }
        // Drive artificials out where an original column can replace them.
        for r in 0..m {
            if self.basis[r] < n {
                continue;
            }
            let mut in_basis = vec![false; n + m];
            for &j in &self.basis {
                in_basis[j] = true;
            }
            let row: Vec<f64> = (0..m).map(|c| self.binv[(r, c)]).collect();
            let q = (0..n).find(|&j| {
                !in_basis[j] && self.cols[j].iter().map(|&(i, v)| row[i] * v).sum::<f64>().abs() > 1e-7
            });
            if let Some(q) = q {
                let col = self.ftran(q);
                self.pivot(r, q, &col);
            }
        }
        // Phase 2 over original columns only.
        let mut cost2 = self.p.c.clone();
        cost2.extend(std::iter::repeat_n(0.0, m));
        let bounded = match self.run(&cost2, &|j| j < n, max_iter) {
            None => return LpSolution::failed(LpStatus::Infeasible, n, self.iterations),
            Some(b) => b,
        };
        if !bounded {
            return LpSolution::failed(LpStatus::Unbounded, n, self.iterations);
        }
        self.refactor();
        let mut x = vec![0.0; n];
        for (k, &j) in self.basis.iter().enumerate() {
            if j < n {
                x[j] = self.xb[k].max(0.0);
            }
        }
        let objective = x.iter().zip(&self.p.c).map(|(a, b)| a * b).sum();
        LpSolution {
            status: LpStatus::Optimal,
            x,
            objective,
            iterations: self.iterations,
        }
    }
}

/// Dense two-phase revised simplex with Bland's anti-cycling rule.
pub fn solve_dense(p: &LpProblem) -> LpSolution {
    let limit = 200 * (p.a.nrows() + p.a.ncols()) + 1000;
    Simplex::new(p).solve(limit)
}

/// Sparse solver for large instances.
pub fn solve_sparse(p: &LpProblem) -> LpSolution {
    use minilp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem};
    let n = p.a.ncols();
    let mut prob = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = p.c.iter().map(|&c| prob.add_var(c, (0.0, f64::INFINITY))).collect();
    for i in 0..p.a.nrows() {
        let (cols, vals) = p.a.row(i);
        let mut expr = LinearExpr::empty();
        for (&j, &v) in cols.iter().zip(vals) {
            expr.add(vars[j], v);
        }
        prob.add_constraint(expr, ComparisonOp::Eq, p.b[i]);
    }
    match prob.solve() {
        Ok(sol) => {
            let x: Vec<f64> = vars.iter().map(|&v| sol[v].max(0.0)).collect();
            LpSolution {
                status: LpStatus::Optimal,
                objective: x.iter().zip(&p.c).map(|(a, b)| a * b).sum(),
                x,
                iterations: 0,
            }
        }
        Err(minilp::Error::Infeasible) => LpSolution::failed(LpStatus::Infeasible, n, 0),
        Err(minilp::Error::Unbounded) => LpSolution::failed(LpStatus::Unbounded, n, 0),
    }
}

/// Dense simplex up to `dense_limit` rows + columns, sparse beyond.
pub fn solve(p: &LpProblem, dense_limit: usize) -> LpSolution {
    if p.a.nrows() + p.a.ncols() <= dense_limit {
        solve_dense(p)
    } else {
        solve_sparse(p)
    }
}

/// Pure integer program by depth-first branch and bound over the dense
/// simplex. Returns `None` when the node budget runs out.
pub fn solve_integer(p: &LpProblem, max_nodes: usize) -> Option<LpSolution> {
    let n = p.a.ncols();
    // Bounds as (variable, lower, upper) constraints appended to the LP.
    type Bounds = Vec<(usize, Option<f64>, Option<f64>)>;
    let with_bounds = |bounds: &Bounds| -> LpProblem {
        let mut trip: Vec<(usize, usize, f64)> = p.a.iter().collect();
        let mut b = p.b.clone();
        let mut c = p.c.clone();
        let mut row = p.a.nrows();
        let mut col = n;
        for &(j, lo, hi) in bounds {
            if let Some(lo) = lo {
                trip.push((row, j, 1.0));
                trip.push((row, col, -1.0));
                b.push(lo);
                c.push(0.0);
                row += 1;
                col += 1;
            }
            if let Some(hi) = hi {
                trip.push((row, j, 1.0));
                trip.push((row, col, 1.0));
                b.push(hi);
                c.push(0.0);
                row += 1;
                col += 1;
            }
        }
        LpProblem {
            a: CsrMatrix::from_triplets(row, col, &trip),
            b,
            c,
        }
    };
    let mut best: Option<LpSolution> = None;
    let mut stack: Vec<Bounds> = vec![Vec::new()];
    let mut nodes = 0;
    while let Some(bounds) = stack.pop() {
        nodes += 1;
        if nodes > max_nodes {
            return None;
        }
        let sol = solve_dense(&with_bounds(&bounds));
        if sol.status != LpStatus::Optimal {
            continue;
        }
        let x: Vec<f64> = sol.x[..n].to_vec();
        let obj: f64 = x.iter().zip(&p.c).map(|(a, b)| a * b).sum();
        if let Some(b) = &best {
            if obj >= b.objective - 1e-9 {
                continue;
            }
        }
        let frac = (0..n).find(|&j| (x[j] - x[j].round()).abs() > 1e-7);
        match frac {
            None => {
                best = Some(LpSolution {
                    status: LpStatus::Optimal,
                    x: x.iter().map(|v| v.round()).collect(),
                    objective: obj,
                    iterations: sol.iterations,
                });
            }
            Some(j) => {
                let mut up = bounds.clone();
                up.push((j, Some(x[j].ceil()), None));
                let mut down = bounds;
                down.push((j, None, Some(x[j].floor())));
                stack.push(up);
                stack.push(down);
            }
        }
    }
    Some(best.unwrap_or_else(|| LpSolution::failed(LpStatus::Infeasible, n, 0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> LpProblem {
        let mut trip = Vec::new();
        for (i, row) in a.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                trip.push((i, j, v));
            }
        }
        LpProblem {
            a: CsrMatrix::from_triplets(a.len(), c.len(), &trip),
            b: b.to_vec(),
            c: c.to_vec(),
        }
    }

    #[test]
    fn small_lp_matches_sparse_solver() {
        // min -x - 2y, x + y + s1 = 4, x + 3y + s2 = 6
        let p = problem(
            &[vec![1.0, 1.0, 1.0, 0.0], vec![1.0, 3.0, 0.0, 1.0]],
            &[4.0, 6.0],
            &[-1.0, -2.0, 0.0, 0.0],
        );
        let d = solve_dense(&p);
        let s = solve_sparse(&p);
        assert_eq!(d.status, LpStatus::Optimal);
        assert!((d.objective - (-5.0)).abs() < 1e-9);
        assert!((s.objective - d.objective).abs() < 1e-9);
    }

    #[test]
    fn infeasible_and_redundant_rows() {
        let p = problem(&[vec![1.0, 1.0], vec![1.0, 1.0]], &[1.0, 2.0], &[1.0, 1.0]);
        assert_eq!(solve_dense(&p).status, LpStatus::Infeasible);
        let p = problem(&[vec![1.0, 1.0], vec![2.0, 2.0]], &[1.0, 2.0], &[1.0, 3.0]);
        let s = solve_dense(&p);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unbounded_detected() {
        let p = problem(&[vec![1.0, -1.0]], &[1.0], &[0.0, -1.0]);
        assert_eq!(solve_dense(&p).status, LpStatus::Unbounded);
    }

    #[test]
    fn branch_and_bound_rounds_up() {
        // min x, 2x - s = 1 → LP x = 0.5, ILP x = 1.
        let p = problem(&[vec![2.0, -1.0]], &[1.0], &[1.0, 0.0]);
        assert!((solve_dense(&p).objective - 0.5).abs() < 1e-12);
        let ilp = solve_integer(&p, 100).unwrap();
        assert!((ilp.objective - 1.0).abs() < 1e-12);
    }
}
