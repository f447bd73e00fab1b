//! Exact combinatorics of the transportation polytope `C(P,Q)`.
//!
//! `C(P,Q)` is the set of nonnegative `n×m` tables with row sums `P` and
//! column sums `Q`. Its vertices are the tables whose support graph is a
//! forest; every face is determined by its support. Everything here runs in
//! exact rational arithmetic: vertex tables, Fréchet–Hoeffding bounds,
//! support-restricted feasibility (max-flow), geometric equivalence, and
//! face lattices are decided without rounding.

mod faces;
mod flow;

pub use faces::{Face, FaceLattice};

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::dist::Distribution;
use crate::error::Error;
use crate::scalar::{rational_from_f64, Rational, Scalar};
use crate::support::{Dsu, SupportPattern};
use crate::table::JointTable;

/// Size limits for the enumerative operations. Vertex counts grow
/// super-exponentially with the grid, so desk-scale defaults are enforced
/// and overridable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SizeCaps {
    /// Maximum `n·m` for vertex enumeration (default 25).
    pub max_cells: usize,
    /// Maximum vertex count for face-lattice construction (default 64,
    /// hard ceiling 128).
    pub max_vertices: usize,
}

impl Default for SizeCaps {
    fn default() -> Self {
        Self {
            max_cells: 25,
            max_vertices: 64,
        }
    }
}

/// A marginal pair `(P, Q)` defining the polytope `C(P,Q)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Polytope<T: Scalar> {
    row_marginal: Distribution<T>,
    col_marginal: Distribution<T>,
}

/// A vertex of `C(P,Q)`: an exact table whose support graph is a forest.
#[derive(Clone, Debug, PartialEq)]
pub struct Vertex {
    support: SupportPattern,
    table: JointTable<Rational>,
}

/// Outcome of a geometric-equivalence check, with the first unmatched
/// vertex support as witness on failure.
#[derive(Clone, Debug, PartialEq)]
pub struct Equivalence {
    pub equivalent: bool,
    pub witness: Option<SupportPattern>,
}

impl Vertex {
    pub fn support(&self) -> &SupportPattern {
        &self.support
    }

    pub fn table(&self) -> &JointTable<Rational> {
        &self.table
    }

    /// Spanning-tree vertices have exactly `n+m−1` cells.
    pub fn is_nondegenerate(&self) -> bool {
        self.support.len() == self.support.rows() + self.support.cols() - 1
    }
}

impl<T: Scalar> Polytope<T> {
    /// Both marginals must be valid distributions; they then share total
    /// mass 1 by construction.
    pub fn new(row_marginal: Distribution<T>, col_marginal: Distribution<T>) -> Result<Self, Error> {
        Ok(Self {
            row_marginal,
            col_marginal,
        })
    }

    pub fn rows(&self) -> usize {
        self.row_marginal.len()
    }

    pub fn cols(&self) -> usize {
        self.col_marginal.len()
    }

    pub fn row_marginal(&self) -> &Distribution<T> {
        &self.row_marginal
    }

    pub fn col_marginal(&self) -> &Distribution<T> {
        &self.col_marginal
    }

    /// The independent coupling `P × Q`, always a member of `C(P,Q)`.
    pub fn product(&self) -> JointTable<T> {
        crate::table::product_table(&self.row_marginal, &self.col_marginal)
    }

    pub fn to_f64(&self) -> Polytope<f64> {
        Polytope {
            row_marginal: self.row_marginal.to_f64(),
            col_marginal: self.col_marginal.to_f64(),
        }
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.rows() == other.rows() && self.cols() == other.cols()
    }
}

impl Polytope<f64> {
    /// Exact dyadic image of the float marginals, normalized so both sides
    /// sum to exactly 1. The normalization moves each mass by at most the
    /// float-mode sum tolerance and preserves supports, so feasibility and
    /// support questions about generic float polytopes are decided
    /// consistently.
    pub fn to_exact(&self) -> Polytope<Rational> {
        let exactify = |d: &Distribution<f64>| {
            let raw: Vec<Rational> = d.masses().iter().map(|&x| rational_from_f64(x)).collect();
            let total: Rational = raw.iter().fold(Rational::zero(), |a, b| a + b);
            let masses = raw.into_iter().map(|x| x / total.clone()).collect();
            Distribution::new(masses).expect("normalized exact marginal")
        };
        Polytope {
            row_marginal: exactify(&self.row_marginal),
            col_marginal: exactify(&self.col_marginal),
        }
    }
}

impl Polytope<Rational> {
    /// All vertices of `C(P,Q)`, sorted by support pattern.
    ///
    /// Enumerates every spanning tree of the complete bipartite graph
    /// `K_{n,m}` (there are `n^{m−1}·m^{n−1}`), solves each tree's unique
    /// table by leaf-stripping, keeps the nonnegative solutions, and
    /// dedupes by support. Degenerate polytopes are handled correctly:
    /// several trees collapse to one vertex whose support is a strict
    /// subforest.
    pub fn enumerate_vertices(&self, caps: &SizeCaps) -> Result<Vec<Vertex>, Error> {
        let (n, m) = (self.rows(), self.cols());
        if n * m > caps.max_cells {
            return Err(Error::CapacityExceeded {
                size: n * m,
                cap: caps.max_cells,
            });
        }

        let edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (0..m).map(move |j| (i, j)))
            .collect();
        let want = n + m - 1;

        let mut by_support: BTreeMap<SupportPattern, JointTable<Rational>> = BTreeMap::new();
        let mut chosen: Vec<(usize, usize)> = Vec::with_capacity(want);
        let mut dsu = Dsu::new(n + m);
        self.tree_search(&edges, 0, want, &mut chosen, &mut dsu, &mut by_support);

        Ok(by_support
            .into_iter()
            .map(|(support, table)| Vertex { support, table })
            .collect())
    }

    /// Backtracking over acyclic edge subsets of size `n+m−1`; any such
    /// subset on `n+m` nodes is automatically a spanning tree.
    fn tree_search(
        &self,
        edges: &[(usize, usize)],
        idx: usize,
        want: usize,
        chosen: &mut Vec<(usize, usize)>,
        dsu: &mut Dsu,
        out: &mut BTreeMap<SupportPattern, JointTable<Rational>>,
    ) {
        if chosen.len() == want {
            if let Some((support, table)) = self.solve_tree(chosen) {
                out.entry(support).or_insert(table);
            }
            return;
        }
        if edges.len() - idx < want - chosen.len() {
            return;
        }
        let (i, j) = edges[idx];
        if let Some((winner, loser)) = dsu.try_union(i, self.rows() + j) {
            chosen.push((i, j));
            self.tree_search(edges, idx + 1, want, chosen, dsu, out);
            chosen.pop();
            dsu.rollback(winner, loser);
        }
        self.tree_search(edges, idx + 1, want, chosen, dsu, out);
    }

    /// Solves the unique table supported on a spanning tree by repeatedly
    /// stripping leaves; rejects solutions with a negative cell.
    fn solve_tree(&self, tree: &[(usize, usize)]) -> Option<(SupportPattern, JointTable<Rational>)> {
        let (n, m) = (self.rows(), self.cols());
        let nodes = n + m;
        let mut degree = alloc::vec![0usize; nodes];
        let mut incident: Vec<Vec<usize>> = alloc::vec![Vec::new(); nodes];
        for (e, &(i, j)) in tree.iter().enumerate() {
            degree[i] += 1;
            degree[n + j] += 1;
            incident[i].push(e);
            incident[n + j].push(e);
        }

        let mut rem: Vec<Rational> = self
            .row_marginal
            .masses()
            .iter()
            .chain(self.col_marginal.masses())
            .cloned()
            .collect();
        let mut used = alloc::vec![false; tree.len()];
        let mut values: Vec<Option<Rational>> = alloc::vec![None; tree.len()];
        let mut leaves: Vec<usize> = (0..nodes).filter(|&v| degree[v] == 1).collect();

        while let Some(v) = leaves.pop() {
            let Some(&e) = incident[v].iter().find(|&&e| !used[e]) else {
                continue;
            };
            let (i, j) = tree[e];
            let other = if v == i { n + j } else { i };
            let val = rem[v].clone();
            if val.is_negative() {
                return None;
            }
            rem[other] = rem[other].clone() - val.clone();
            rem[v] = Rational::zero();
            values[e] = Some(val);
            used[e] = true;
            degree[v] -= 1;
            degree[other] -= 1;
            if degree[other] == 1 {
                leaves.push(other);
            }
        }
        debug_assert!(values.iter().all(Option::is_some));
        debug_assert!(rem.iter().all(Zero::is_zero), "marginal totals must agree");

        let mut entries = alloc::vec![Rational::zero(); n * m];
        let mut support = SupportPattern::empty(n, m);
        for (e, &(i, j)) in tree.iter().enumerate() {
            let val = values[e].take().unwrap();
            if val.is_negative() {
                return None;
            }
            if !val.is_zero() {
                support.insert(i, j);
            }
            entries[i * m + j] = val;
        }
        Some((support, JointTable::from_raw(n, m, entries)))
    }

    /// Fréchet–Hoeffding upper bound: the unique vertex whose support has
    /// no crossing pair, computed by the northwest-corner rule in natural
    /// index order.
    pub fn fh_upper(&self) -> Vertex {
        let (n, m) = (self.rows(), self.cols());
        let mut rem_p: Vec<Rational> = self.row_marginal.masses().to_vec();
        let mut rem_q: Vec<Rational> = self.col_marginal.masses().to_vec();
        let mut entries = alloc::vec![Rational::zero(); n * m];
        let mut support = SupportPattern::empty(n, m);

        let (mut i, mut j) = (0, 0);
        while i < n && j < m {
            let x = rem_p[i].clone().min(rem_q[j].clone());
            if !x.is_zero() {
                entries[i * m + j] = x.clone();
                support.insert(i, j);
                rem_p[i] = rem_p[i].clone() - x.clone();
                rem_q[j] = rem_q[j].clone() - x;
            }
            if rem_p[i].is_zero() {
                i += 1;
            } else {
                j += 1;
            }
        }

        Vertex {
            support,
            table: JointTable::from_raw(n, m, entries),
        }
    }

    /// Fréchet–Hoeffding lower bound: crossing-free after reversing the
    /// column order, i.e. the upper bound of `C(P, Q̃)` with
    /// `Q̃(j) = Q(m−1−j)`, columns un-reversed afterward.
    pub fn fh_lower(&self) -> Vertex {
        let m = self.cols();
        let reversed = Distribution::new(
            self.col_marginal.masses().iter().rev().cloned().collect(),
        )
        .expect("reversed marginal stays valid");
        let tilted = Polytope {
            row_marginal: self.row_marginal.clone(),
            col_marginal: reversed,
        };
        let v = tilted.fh_upper();

        let n = self.rows();
        let mut entries = alloc::vec![Rational::zero(); n * m];
        for i in 0..n {
            for j in 0..m {
                entries[i * m + j] = v.table.entry(i, m - 1 - j).clone();
            }
        }
        let support = v.support.reverse_cols();
        Vertex {
            support,
            table: JointTable::from_raw(n, m, entries),
        }
    }

    /// Whether some `T ∈ C(P,Q)` has `supp(T) ⊆ mask`; decided by exact
    /// max-flow on the bipartite network.
    pub fn feasible_within_support(&self, mask: &SupportPattern) -> Result<bool, Error> {
        if mask.rows() != self.rows() || mask.cols() != self.cols() {
            return Err(Error::ShapeMismatch(
                self.rows(),
                self.cols(),
                mask.rows(),
                mask.cols(),
            ));
        }
        Ok(flow::feasibility_flow(self, mask).is_some())
    }

    /// The support of the face `{T ∈ C(P,Q) : supp(T) ⊆ mask}` — the
    /// largest support realized inside `mask` — or `None` when that face is
    /// empty. This is exactly the support of the I-projection of any table
    /// with support `mask` onto `C(P,Q)`.
    pub fn limit_support(&self, mask: &SupportPattern) -> Result<Option<SupportPattern>, Error> {
        if mask.rows() != self.rows() || mask.cols() != self.cols() {
            return Err(Error::ShapeMismatch(
                self.rows(),
                self.cols(),
                mask.rows(),
                mask.cols(),
            ));
        }
        Ok(flow::feasibility_flow(self, mask).map(|f| f.maximal_support(mask)))
    }

    /// Definition-level geometric equivalence: the two vertex-support
    /// families coincide as sets. On failure the witness is the first
    /// support (in pattern order) present on exactly one side.
    pub fn geometrically_equivalent(
        &self,
        other: &Self,
        caps: &SizeCaps,
    ) -> Result<Equivalence, Error> {
        if !self.same_shape(other) {
            return Err(Error::ShapeMismatch(
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols(),
            ));
        }
        let mine: Vec<SupportPattern> = self
            .enumerate_vertices(caps)?
            .into_iter()
            .map(|v| v.support)
            .collect();
        let theirs: Vec<SupportPattern> = other
            .enumerate_vertices(caps)?
            .into_iter()
            .map(|v| v.support)
            .collect();

        // both sides sorted; first mismatch in the merged order is the witness
        let (mut a, mut b) = (mine.iter(), theirs.iter());
        let (mut x, mut y) = (a.next(), b.next());
        loop {
            match (x, y) {
                (None, None) => {
                    return Ok(Equivalence {
                        equivalent: true,
                        witness: None,
                    })
                }
                (Some(s), None) | (None, Some(s)) => {
                    return Ok(Equivalence {
                        equivalent: false,
                        witness: Some(s.clone()),
                    })
                }
                (Some(s), Some(t)) => {
                    if s == t {
                        x = a.next();
                        y = b.next();
                    } else if s < t {
                        return Ok(Equivalence {
                            equivalent: false,
                            witness: Some(s.clone()),
                        });
                    } else {
                        return Ok(Equivalence {
                            equivalent: false,
                            witness: Some(t.clone()),
                        });
                    }
                }
            }
        }
    }

    /// Genericity (nondegeneracy): every vertex has exactly `n+m−1`
    /// positive cells.
    pub fn is_generic(&self, caps: &SizeCaps) -> Result<bool, Error> {
        Ok(self
            .enumerate_vertices(caps)?
            .iter()
            .all(Vertex::is_nondegenerate))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn dist(masses: &[(i64, i64)]) -> Distribution<Rational> {
        Distribution::new(masses.iter().map(|&(n, d)| rat(n, d)).collect()).unwrap()
    }

    fn poly(p: &[(i64, i64)], q: &[(i64, i64)]) -> Polytope<Rational> {
        Polytope::new(dist(p), dist(q)).unwrap()
    }

    fn example2_c1() -> Polytope<Rational> {
        poly(&[(1, 2), (1, 2)], &[(1, 3), (2, 3)])
    }

    fn example2_c2() -> Polytope<Rational> {
        poly(&[(1, 2), (1, 2)], &[(1, 2), (1, 2)])
    }

    #[test]
    fn example2_vertices() {
        let caps = SizeCaps::default();
        let u = example2_c1().enumerate_vertices(&caps).unwrap();
        assert_eq!(u.len(), 2);
        //sorted by support: U1 = {(0,0),(0,1),(1,1)} precedes U2 = {(0,1),(1,0),(1,1)}
        assert_eq!(
            u[0].table().entries(),
            &[rat(1, 3), rat(1, 6), rat(0, 1), rat(1, 2)]
        );
        assert_eq!(
            u[1].table().entries(),
            &[rat(0, 1), rat(1, 2), rat(1, 3), rat(1, 6)]
        );

        let v = example2_c2().enumerate_vertices(&caps).unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(
            v[0].table().entries(),
            &[rat(1, 2), rat(0, 1), rat(0, 1), rat(1, 2)]
        );
        assert_eq!(
            v[1].table().entries(),
            &[rat(0, 1), rat(1, 2), rat(1, 2), rat(0, 1)]
        );
    }

    #[test]
    fn one_point_polytope() {
        let caps = SizeCaps::default();
        let c = poly(&[(1, 1)], &[(1, 4), (1, 4), (1, 2)]);
        let v = c.enumerate_vertices(&caps).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].table().entries(), &[rat(1, 4), rat(1, 4), rat(1, 2)]);
        assert_eq!(c.fh_upper(), v[0]);
        assert_eq!(c.fh_lower(), v[0]);
    }

    #[test]
    fn cap_is_enforced() {
        let caps = SizeCaps {
            max_cells: 3,
            max_vertices: 64,
        };
        let c = example2_c1();
        assert!(matches!(
            c.enumerate_vertices(&caps),
            Err(Error::CapacityExceeded { size: 4, cap: 3 })
        ));
    }

    #[test]
    fn fh_bounds_on_example2() {
        let c1 = example2_c1();
        assert_eq!(
            c1.fh_upper().table().entries(),
            &[rat(1, 3), rat(1, 6), rat(0, 1), rat(1, 2)]
        );
        assert_eq!(
            c1.fh_lower().table().entries(),
            &[rat(0, 1), rat(1, 2), rat(1, 3), rat(1, 6)]
        );
        assert!(!c1.fh_upper().support().has_crossing());
        assert!(!c1.fh_lower().support().reverse_cols().has_crossing());
    }

    #[test]
    fn fh_derived_3x2() {
        // NW-corner on P=(1/2,3/10,1/5), Q=(2/5,3/5)
        let c = poly(&[(1, 2), (3, 10), (1, 5)], &[(2, 5), (3, 5)]);
        assert_eq!(
            c.fh_upper().table().entries(),
            &[rat(2, 5), rat(1, 10), rat(0, 1), rat(3, 10), rat(0, 1), rat(1, 5)]
        );
        assert_eq!(
            c.fh_lower().table().entries(),
            &[rat(0, 1), rat(1, 2), rat(1, 5), rat(1, 10), rat(1, 5), rat(0, 1)]
        );
    }

    #[test]
    fn fh_bounds_are_vertices() {
        let caps = SizeCaps::default();
        for c in [
            example2_c1(),
            poly(&[(1, 2), (3, 10), (1, 5)], &[(2, 5), (3, 5)]),
            poly(&[(1, 4), (1, 4), (1, 4), (1, 4)], &[(1, 3), (1, 3), (1, 3)]),
        ] {
            let verts = c.enumerate_vertices(&caps).unwrap();
            assert!(verts.contains(&c.fh_upper()));
            assert!(verts.contains(&c.fh_lower()));
        }
    }

    #[test]
    fn degenerate_zero_marginal() {
        // zero-mass middle row: polytope lives on a 2x2 subgrid
        let caps = SizeCaps::default();
        let c = poly(&[(1, 2), (0, 1), (1, 2)], &[(1, 2), (1, 2)]);
        let verts = c.enumerate_vertices(&caps).unwrap();
        for v in &verts {
            assert!(v.support().cells().all(|(i, _)| i != 1));
            assert!(!v.is_nondegenerate());
        }
        assert_eq!(verts.len(), 2);
    }

    #[test]
    fn example2_not_equivalent_with_witness() {
        let caps = SizeCaps::default();
        let e = example2_c1()
            .geometrically_equivalent(&example2_c2(), &caps)
            .unwrap();
        assert!(!e.equivalent);
        // first mismatch in pattern order is U1's staircase support
        assert_eq!(
            e.witness.unwrap(),
            SupportPattern::from_cells(2, 2, [(0, 0), (0, 1), (1, 1)]).unwrap()
        );
    }

    #[test]
    fn equivalence_with_self() {
        let caps = SizeCaps::default();
        let c = poly(&[(1, 2), (3, 10), (1, 5)], &[(2, 5), (3, 5)]);
        assert!(c.geometrically_equivalent(&c, &caps).unwrap().equivalent);
    }

    #[test]
    fn derived_3x2_pair_is_equivalent() {
        let caps = SizeCaps::default();
        let c1 = poly(&[(1, 2), (3, 10), (1, 5)], &[(2, 5), (3, 5)]);
        let c2 = poly(&[(1, 2), (3, 10), (1, 5)], &[(9, 20), (11, 20)]);
        assert!(c1.geometrically_equivalent(&c2, &caps).unwrap().equivalent);
    }

    #[test]
    fn genericity_flag() {
        let caps = SizeCaps::default();
        assert!(poly(&[(1, 2), (3, 10), (1, 5)], &[(2, 5), (3, 5)])
            .is_generic(&caps)
            .unwrap());
        // Birkhoff-style square is degenerate
        assert!(!example2_c2().is_generic(&caps).unwrap());
    }
}
