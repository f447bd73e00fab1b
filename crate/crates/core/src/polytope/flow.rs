//! Exact feasibility of support-restricted membership.
//!
//! `C(P,Q)` contains a table supported inside `mask` iff the bipartite
//! network — source→row `i` with capacity `pᵢ`, mask edges with unbounded
//! capacity, column `j`→sink with capacity `qⱼ` — carries a flow of value 1.
//! Augmenting paths over exact rationals decide this without rounding; the
//! number of augmentations is bounded by the path-length argument, not by
//! capacities.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::scalar::Rational;
use crate::support::SupportPattern;

use super::Polytope;

pub(super) struct FeasibilityFlow {
    rows: usize,
    cols: usize,
    cell_flow: Vec<Rational>, // row-major over the full grid; zero off-mask
}

/// Runs max-flow; `Some` iff the full mass 1 is routable inside `mask`.
pub(super) fn feasibility_flow(
    polytope: &Polytope<Rational>,
    mask: &SupportPattern,
) -> Option<FeasibilityFlow> {
    let (n, m) = (polytope.rows(), polytope.cols());
    let p = polytope.row_marginal().masses();
    let q = polytope.col_marginal().masses();

    let mut cell_flow = alloc::vec![Rational::zero(); n * m];
    let mut row_used = alloc::vec![Rational::zero(); n];
    let mut col_used = alloc::vec![Rational::zero(); m];

    // Edmonds-Karp: shortest augmenting path source → row ⇝ col → sink,
    // alternating forward mask edges and backward positive cells.
    loop {
        // parent of a column: the row we entered from (forward edge);
        // parent of a row: the column we backed out of, or the source.
        let mut row_parent: Vec<Option<usize>> = alloc::vec![None; n];
        let mut col_parent: Vec<Option<usize>> = alloc::vec![None; m];
        let mut queue = VecDeque::new();
        for i in 0..n {
            if row_used[i] < p[i] {
                row_parent[i] = Some(m); // sentinel: entered from the source
                queue.push_back(Node::Row(i));
            }
        }

        let mut reached_col: Option<usize> = None;
        'bfs: while let Some(node) = queue.pop_front() {
            match node {
                Node::Row(i) => {
                    for j in 0..m {
                        if mask.contains(i, j) && col_parent[j].is_none() {
                            col_parent[j] = Some(i);
                            if col_used[j] < q[j] {
                                reached_col = Some(j);
                                break 'bfs;
                            }
                            queue.push_back(Node::Col(j));
                        }
                    }
                }
                Node::Col(j) => {
                    for i in 0..n {
                        if !cell_flow[i * m + j].is_zero() && row_parent[i].is_none() {
                            row_parent[i] = Some(j);
                            queue.push_back(Node::Row(i));
                        }
                    }
                }
            }
        }

        let Some(last_col) = reached_col else { break };

        // bottleneck along source → … → last_col → sink
        let mut bottleneck = q[last_col].clone() - col_used[last_col].clone();
        let mut j = last_col;
        loop {
            let i = col_parent[j].expect("reached column has a parent row");
            match row_parent[i] {
                Some(back) if back < m => {
                    let f = &cell_flow[i * m + back];
                    if *f < bottleneck {
                        bottleneck = f.clone();
                    }
                    j = back;
                }
                _ => {
                    let slack = p[i].clone() - row_used[i].clone();
                    if slack < bottleneck {
                        bottleneck = slack;
                    }
                    break;
                }
            }
        }

        // apply the augmentation
        col_used[last_col] = col_used[last_col].clone() + bottleneck.clone();
        let mut j = last_col;
        loop {
            let i = col_parent[j].expect("reached column has a parent row");
            cell_flow[i * m + j] = cell_flow[i * m + j].clone() + bottleneck.clone();
            match row_parent[i] {
                Some(back) if back < m => {
                    cell_flow[i * m + back] = cell_flow[i * m + back].clone() - bottleneck.clone();
                    j = back;
                }
                _ => {
                    row_used[i] = row_used[i].clone() + bottleneck.clone();
                    break;
                }
            }
        }
    }

    let value: Rational = row_used.iter().fold(Rational::zero(), |a, b| a + b);
    if value.is_one() {
        Some(FeasibilityFlow {
            rows: n,
            cols: m,
            cell_flow,
        })
    } else {
        None
    }
}

enum Node {
    Row(usize),
    Col(usize),
}

impl FeasibilityFlow {
    /// Union of the supports of all feasible tables inside `mask`.
    ///
    /// A zero-flow mask cell `(i, j)` can carry positive mass in some
    /// feasible table iff the residual graph — forward arcs `row→col` on
    /// every mask cell, backward arcs `col→row` on positive cells — has a
    /// path from column `j` back to row `i`; source and sink arcs are
    /// saturated at feasibility, so reroutes circulate among rows and
    /// columns only.
    pub(super) fn maximal_support(&self, mask: &SupportPattern) -> SupportPattern {
        let (n, m) = (self.rows, self.cols);
        let mut out = SupportPattern::empty(n, m);
        for (i, j) in mask.cells() {
            if !self.cell_flow[i * m + j].is_zero() || self.reaches_row(mask, j, i) {
                out.insert(i, j);
            }
        }
        out
    }

    fn reaches_row(&self, mask: &SupportPattern, start_col: usize, target_row: usize) -> bool {
        let (n, m) = (self.rows, self.cols);
        let mut seen_row = alloc::vec![false; n];
        let mut seen_col = alloc::vec![false; m];
        seen_col[start_col] = true;
        let mut stack: Vec<Node> = alloc::vec![Node::Col(start_col)];
        while let Some(node) = stack.pop() {
            match node {
                Node::Col(j) => {
                    for i in 0..n {
                        if !self.cell_flow[i * m + j].is_zero() && !seen_row[i] {
                            if i == target_row {
                                return true;
                            }
                            seen_row[i] = true;
                            stack.push(Node::Row(i));
                        }
                    }
                }
                Node::Row(i) => {
                    for j in 0..m {
                        if mask.contains(i, j) && !seen_col[j] {
                            seen_col[j] = true;
                            stack.push(Node::Col(j));
                        }
                    }
                }
            }
        }
        false
    }
}
