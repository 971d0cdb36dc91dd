//! Exact optimal transport between equal-size uniform empirical measures.
//!
//! With uniform weights and equal counts an optimal coupling is a
//! permutation, so `W_k^k` is `(1/N)` times the optimal assignment cost of
//! the matrix `||x_i - y_j||^k`. The assignment is solved with the
//! shortest-augmenting-path Hungarian method in `O(N^3)`.

use std::collections::VecDeque;

use crate::autodiff::Tensor;
use crate::error::{Error, Result};
use crate::samples::{check_pair, SampleSet};

/// Square matrix of nonnegative finite transport costs.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    entries: Tensor,
}

impl CostMatrix {
    pub fn new(entries: Tensor) -> Result<Self> {
        if entries.ndim() != 2 || entries.rows() != entries.cols() {
            return Err(Error::contract(format!(
                "cost matrix must be square, got {:?}",
                entries.shape()
            )));
        }
        if entries.data().iter().any(|&c| c < 0.0) {
            return Err(Error::contract("cost matrix has negative entries"));
        }
        Ok(Self { entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(Tensor::from_rows(rows)?)
    }

    pub fn size(&self) -> usize {
        self.entries.rows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries.get(i, j)
    }

    pub fn entries(&self) -> &Tensor {
        &self.entries
    }

    /// `sum_i c[i, perm[i]]`, accumulated in row order.
    pub fn cost_of(&self, perm: &[usize]) -> f64 {
        perm.iter()
            .enumerate()
            .fold(0.0, |acc, (i, &j)| acc + self.get(i, j))
    }
}

/// A bijection `row -> column` with its total cost.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub permutation: Vec<usize>,
    pub cost: f64,
}

/// `entries[i][j] = ||x_i - y_j||_2^k`.
pub fn cost_matrix(x: &SampleSet, y: &SampleSet, k: f64) -> Result<CostMatrix> {
    check_pair(x, y)?;
    let (n, d) = (x.len(), x.dim());
    let (xs, ys) = (x.points().data(), y.points().data());
    let mut data = Vec::with_capacity(n * n);
    for xi in xs.chunks_exact(d) {
        if d == 2 {
            let (a0, a1) = (xi[0], xi[1]);
            data.extend(ys.chunks_exact(2).map(|yj| {
                let (e0, e1) = (a0 - yj[0], a1 - yj[1]);
                e0 * e0 + e1 * e1
            }));
        } else {
            data.extend(ys.chunks_exact(d).map(|yj| {
                xi.iter().zip(yj).fold(0.0, |acc, (a, b)| acc + (a - b) * (a - b))
            }));
        }
    }
    if k != 2.0 {
        for c in &mut data {
            *c = c.sqrt().powf(k);
        }
    }
    if data.iter().any(|c| !c.is_finite()) {
        return Err(Error::NumericOverflow {
            primitive: "cost_matrix",
        });
    }
    Ok(CostMatrix {
        entries: Tensor::from_parts(vec![n, n], data),
    })
}

const NONE: usize = usize::MAX;

/// Shortest-augmenting-path assignment solver that can reuse column
/// potentials between calls.
///
/// A solve starts from column duals (column minima when cold, the previous
/// solution's duals when warm), matches each row to its cheapest reduced-cost
/// column if that column is free, runs two rounds of augmenting row
/// reduction, and finishes the remaining rows with Dijkstra searches over
/// reduced costs. For slowly moving point clouds a warm solve leaves only a
/// handful of rows for the search phase.
#[derive(Debug, Clone, Default)]
pub struct AssignmentSolver {
    col_potential: Vec<f64>,
}

impl AssignmentSolver {
    pub fn new() -> Self {
        Self::default()
    }

    /// Forgets the stored potentials; the next solve starts cold.
    pub fn reset(&mut self) {
        self.col_potential.clear();
    }

    /// Each free row takes its cheapest reduced-cost column, lowering that
    /// column's potential to the row's second-best value so the assignment
    /// stays tight; a displaced row is retried. Every assigned row keeps its
    /// column as an argmin of `c[i][j] - v[j]`. Returns the rows still free.
    fn row_reduction(
        cost: &[f64],
        n: usize,
        v: &mut [f64],
        row4col: &mut [usize],
        free: Vec<usize>,
    ) -> Vec<usize> {
        let mut queue: VecDeque<usize> = free.into();
        let mut left = Vec::new();
        // Near-ties make the reduction cycle with tiny potential drops; past
        // this budget the shortest-path phase is cheaper.
        let mut budget = n / 2 + queue.len();
        while let Some(i) = queue.pop_front() {
            if budget == 0 {
                left.push(i);
                continue;
            }
            budget -= 1;
            let (umin, j1, usub, j2) = two_smallest(&cost[i * n..(i + 1) * n], v);
            let (mut j, mut displaced) = (j1, row4col[j1]);
            let lowered = umin < usub && usub.is_finite();
            if lowered {
                v[j] -= usub - umin;
            } else if displaced != NONE {
                j = j2;
                displaced = row4col[j];
            }
            row4col[j] = i;
            if displaced != NONE {
                if lowered {
                    queue.push_front(displaced);
                } else {
                    left.push(displaced);
                }
            }
        }
        left
    }

    pub fn solve(&mut self, c: &CostMatrix) -> Result<Assignment> {
        let n = c.size();
        if !c.entries.all_finite() {
            return Err(Error::contract("cost matrix has non-finite entries"));
        }
        if n == 0 {
            return Ok(Assignment {
                permutation: Vec::new(),
                cost: 0.0,
            });
        }
        let cost = c.entries.data();
        if self.col_potential.len() != n {
            self.col_potential = vec![f64::INFINITY; n];
            for row in cost.chunks_exact(n) {
                for (v, &c) in self.col_potential.iter_mut().zip(row) {
                    *v = v.min(c);
                }
            }
        }
        let mut v = std::mem::take(&mut self.col_potential);
        let mut row4col = vec![NONE; n];

        let mut free = Vec::new();
        for i in 0..n {
            let j = row_argmin(&cost[i * n..(i + 1) * n], &v);
            if row4col[j] == NONE {
                row4col[j] = i;
            } else {
                free.push(i);
            }
        }
        for _ in 0..2 {
            free = Self::row_reduction(cost, n, &mut v, &mut row4col, free);
        }

        // Assigned rows sit at their row minimum of c - v.
        let mut u = vec![0.0; n];
        let mut col4row = vec![NONE; n];
        for (j, &i) in row4col.iter().enumerate() {
            if i != NONE {
                col4row[i] = j;
                u[i] = cost[i * n + j] - v[j];
            }
        }

        let mut shortest = vec![f64::INFINITY; n];
        let mut path = vec![NONE; n];
        let mut remaining: Vec<usize> = Vec::with_capacity(n);
        let mut scanned_rows = Vec::new();
        let mut scanned_cols = Vec::new();
        for &start in &free {
            u[start] = two_smallest(&cost[start * n..(start + 1) * n], &v).0;
            shortest.iter_mut().for_each(|s| *s = f64::INFINITY);
            remaining.clear();
            remaining.extend(0..n);
            scanned_rows.clear();
            scanned_cols.clear();
            let mut min_val = 0.0;
            let mut i = start;
            let sink = loop {
                scanned_rows.push(i);
                let row = &cost[i * n..(i + 1) * n];
                let ui = u[i];
                let (mut lowest, mut index) = (f64::INFINITY, NONE);
                for (it, &j) in remaining.iter().enumerate() {
                    let r = min_val + row[j] - ui - v[j];
                    if r < shortest[j] {
                        path[j] = i;
                        shortest[j] = r;
                    }
                    if shortest[j] < lowest || (shortest[j] == lowest && row4col[j] == NONE) {
                        lowest = shortest[j];
                        index = it;
                    }
                }
                if index == NONE {
                    return Err(Error::Numeric("assignment search found no column".into()));
                }
                min_val = lowest;
                let j = remaining.swap_remove(index);
                scanned_cols.push(j);
                if row4col[j] == NONE {
                    break j;
                }
                i = row4col[j];
            };

            u[start] += min_val;
            for &r in &scanned_rows[1..] {
                u[r] += min_val - shortest[col4row[r]];
            }
            for &j in &scanned_cols {
                v[j] -= min_val - shortest[j];
            }
            let mut j = sink;
            loop {
                let i = path[j];
                row4col[j] = i;
                let prev = std::mem::replace(&mut col4row[i], j);
                if i == start {
                    break;
                }
                j = prev;
            }
        }

        self.col_potential = v;
        let cost = c.cost_of(&col4row);
        Ok(Assignment {
            permutation: col4row,
            cost,
        })
    }
}

/// First index of the smallest `row[j] - v[j]`.
fn row_argmin(row: &[f64], v: &[f64]) -> usize {
    let (mut best, mut arg) = (f64::INFINITY, 0);
    for (j, (c, vj)) in row.iter().zip(v).enumerate() {
        let r = c - vj;
        if r < best {
            best = r;
            arg = j;
        }
    }
    arg
}

/// Smallest and second-smallest `row[j] - v[j]` with their (first) indices.
fn two_smallest(row: &[f64], v: &[f64]) -> (f64, usize, f64, usize) {
    let (mut a, mut ja, mut b, mut jb) = (f64::INFINITY, 0, f64::INFINITY, 0);
    for (j, (c, vj)) in row.iter().zip(v).enumerate() {
        let r = c - vj;
        if r < b {
            if r < a {
                (b, jb) = (a, ja);
                (a, ja) = (r, j);
            } else {
                (b, jb) = (r, j);
            }
        }
    }
    if row.len() == 1 {
        jb = ja;
    }
    (a, ja, b, jb)
}

/// Minimum-cost perfect matching of a square cost matrix.
pub fn solve_assignment(c: &CostMatrix) -> Result<Assignment> {
    AssignmentSolver::new().solve(c)
}

/// `((1/N) min_sigma sum_i ||x_i - y_sigma(i)||^k)^(1/k)`, with the matched
/// costs summed in ascending order.
pub fn exact_wasserstein(x: &SampleSet, y: &SampleSet, k: f64) -> Result<f64> {
    exact_wasserstein_with(&mut AssignmentSolver::new(), x, y, k)
}

/// [`exact_wasserstein`] reusing a solver's potentials from earlier calls.
pub fn exact_wasserstein_with(
    solver: &mut AssignmentSolver,
    x: &SampleSet,
    y: &SampleSet,
    k: f64,
) -> Result<f64> {
    if !(k >= 1.0) {
        return Err(Error::contract(format!("order k must be >= 1, got {k}")));
    }
    let c = cost_matrix(x, y, k)?;
    let a = solver.solve(&c)?;
    let mut matched: Vec<f64> = a.permutation.iter().enumerate().map(|(i, &j)| c.get(i, j)).collect();
    matched.sort_unstable_by(f64::total_cmp);
    let total: f64 = matched.iter().sum();
    Ok((total / x.len() as f64).max(0.0).powf(1.0 / k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_optimal() {
        let c = CostMatrix::from_rows(&[vec![0.0, 9.0], vec![9.0, 0.0]]).unwrap();
        let a = solve_assignment(&c).unwrap();
        assert_eq!(a.permutation, vec![0, 1]);
        assert_eq!(a.cost, 0.0);
    }

    #[test]
    fn anti_diagonal_optimal() {
        let c = CostMatrix::from_rows(&[vec![5.0, 1.0, 9.0], vec![1.0, 5.0, 9.0], vec![9.0, 9.0, 0.0]])
            .unwrap();
        let a = solve_assignment(&c).unwrap();
        assert_eq!(a.permutation, vec![1, 0, 2]);
        assert_eq!(a.cost, 2.0);
    }

    #[test]
    fn cost_entry_by_hand() {
        let x = SampleSet::from_rows(&[vec![0.0, 0.0]]).unwrap();
        let y = SampleSet::from_rows(&[vec![3.0, 4.0]]).unwrap();
        assert_eq!(cost_matrix(&x, &y, 2.0).unwrap().get(0, 0), 25.0);
        assert_eq!(cost_matrix(&x, &y, 1.0).unwrap().get(0, 0), 5.0);
    }

    #[test]
    fn zero_diagonal_and_transpose_symmetry() {
        let x = SampleSet::from_rows(&[vec![0.0, 1.0], vec![2.0, 0.5], vec![-1.0, 3.0]]).unwrap();
        let y = SampleSet::from_rows(&[vec![1.0, 1.0], vec![0.0, 0.0], vec![4.0, 2.0]]).unwrap();
        let cxx = cost_matrix(&x, &x, 2.0).unwrap();
        for i in 0..3 {
            assert_eq!(cxx.get(i, i), 0.0);
        }
        let cxy = cost_matrix(&x, &y, 2.0).unwrap();
        let cyx = cost_matrix(&y, &x, 2.0).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(cxy.get(i, j), cyx.get(j, i));
            }
        }
    }

    #[test]
    fn translation_by_unit() {
        let x = SampleSet::from_rows(&[vec![0.0, 0.0], vec![5.0, 1.0]]).unwrap();
        let y = x.translated(&[0.0, 1.0]).unwrap();
        assert_eq!(exact_wasserstein(&x, &y, 2.0).unwrap(), 1.0);
        assert_eq!(exact_wasserstein(&x, &x, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(CostMatrix::from_rows(&[vec![1.0, 2.0]]).is_err());
        assert!(CostMatrix::from_rows(&[vec![-1.0]]).is_err());
        assert!(Tensor::matrix(1, 1, vec![f64::NAN]).is_err());
    }
}
