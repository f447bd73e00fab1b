use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;

/// The set of cells `(i, j)` of an `n×m` grid carrying positive mass.
///
/// A pattern doubles as a bipartite graph: rows on the left, columns on the
/// right, one edge per cell. Vertices of a transportation polytope are
/// exactly the tables whose pattern is a forest in this graph, and every
/// face of the polytope is determined by its pattern.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SupportPattern {
    rows: usize,
    cols: usize,
    cells: BTreeSet<(usize, usize)>,
}

impl SupportPattern {
    pub fn empty(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            cells: BTreeSet::new(),
        }
    }

    pub fn from_cells<I>(rows: usize, cols: usize, cells: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut set = BTreeSet::new();
        for (i, j) in cells {
            if i >= rows || j >= cols {
                return Err(Error::CellOutOfRange(i, j, rows, cols));
            }
            set.insert((i, j));
        }
        Ok(Self {
            rows,
            cols,
            cells: set,
        })
    }

    /// Every cell of the grid.
    pub fn full(rows: usize, cols: usize) -> Self {
        let cells = (0..rows)
            .flat_map(|i| (0..cols).map(move |j| (i, j)))
            .collect();
        Self { rows, cols, cells }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.cells.contains(&(i, j))
    }

    pub(crate) fn insert(&mut self, i: usize, j: usize) {
        debug_assert!(i < self.rows && j < self.cols);
        self.cells.insert((i, j));
    }

    /// Cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.cells.iter().copied()
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols
    }

    /// Subset relation; false when shapes differ.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.same_shape(other) && self.cells.is_subset(&other.cells)
    }

    pub fn union(&self, other: &Self) -> Self {
        debug_assert!(self.same_shape(other));
        Self {
            rows: self.rows,
            cols: self.cols,
            cells: self.cells.union(&other.cells).copied().collect(),
        }
    }

    /// Pattern with column order reversed (`j ↦ m−1−j`).
    pub fn reverse_cols(&self) -> Self {
        let cells = self
            .cells
            .iter()
            .map(|&(i, j)| (i, self.cols - 1 - j))
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            cells,
        }
    }

    /// A crossing is a pair of cells `(i, j)`, `(k, l)` with `i < k` and
    /// `j > l`. Crossing-free patterns are the staircases of the
    /// Fréchet–Hoeffding upper bound.
    pub fn has_crossing(&self) -> bool {
        // cells iterate sorted by (i, j); a crossing is a later cell with a
        // smaller column than some earlier row's cell
        let cells: Vec<_> = self.cells.iter().copied().collect();
        for (a, &(i, j)) in cells.iter().enumerate() {
            for &(k, l) in &cells[a + 1..] {
                if k > i && l < j {
                    return true;
                }
            }
        }
        false
    }

    pub fn touched_rows(&self) -> usize {
        let set: BTreeSet<usize> = self.cells.iter().map(|&(i, _)| i).collect();
        set.len()
    }

    pub fn touched_cols(&self) -> usize {
        let set: BTreeSet<usize> = self.cells.iter().map(|&(_, j)| j).collect();
        set.len()
    }

    /// Acyclicity of the bipartite graph on the pattern's cells.
    pub fn is_forest(&self) -> bool {
        let mut dsu = Dsu::new(self.rows + self.cols);
        for &(i, j) in &self.cells {
            if !dsu.union(i, self.rows + j) {
                return false;
            }
        }
        true
    }

    /// Connected components of the bipartite graph restricted to touched
    /// nodes.
    pub fn component_count(&self) -> usize {
        let mut dsu = Dsu::new(self.rows + self.cols);
        let mut touched = BTreeSet::new();
        for &(i, j) in &self.cells {
            touched.insert(i);
            touched.insert(self.rows + j);
            dsu.union(i, self.rows + j);
        }
        let roots: BTreeSet<usize> = touched.into_iter().map(|v| dsu.find(v)).collect();
        roots.len()
    }

    /// Affine dimension of the face this pattern determines:
    /// `cells − rows touched − cols touched + components`.
    pub fn face_dimension(&self) -> usize {
        let free = self.len() + self.component_count();
        let constrained = self.touched_rows() + self.touched_cols();
        debug_assert!(free >= constrained, "pattern graph has more cycles than cells");
        free - constrained
    }
}

/// Union-find over the bipartite node set; `union` reports whether the
/// edge joined two distinct components.
pub(crate) struct Dsu {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub(crate) fn find(&self, mut v: usize) -> usize {
        while self.parent[v] != v {
            v = self.parent[v];
        }
        v
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            core::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }

    /// Like `union`, but returns the joined roots so the edge can be
    /// undone with [`Dsu::rollback`]. `None` when `a` and `b` were already
    /// connected.
    pub(crate) fn try_union(&mut self, a: usize, b: usize) -> Option<(usize, usize)> {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return None;
        }
        if self.size[ra] < self.size[rb] {
            core::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        Some((ra, rb))
    }

    /// Undoes a successful `try_union` of roots `(winner, loser)`.
    pub(crate) fn rollback(&mut self, winner: usize, loser: usize) {
        self.parent[loser] = loser;
        self.size[winner] -= self.size[loser];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossing_detection() {
        // staircase: no crossing
        let nw = SupportPattern::from_cells(2, 2, [(0, 0), (0, 1), (1, 1)]).unwrap();
        assert!(!nw.has_crossing());
        // anti-diagonal support crosses
        let anti = SupportPattern::from_cells(2, 2, [(0, 1), (1, 0)]).unwrap();
        assert!(anti.has_crossing());
        assert!(!anti.reverse_cols().has_crossing());
    }

    #[test]
    fn forest_and_components() {
        let tree = SupportPattern::from_cells(2, 2, [(0, 0), (0, 1), (1, 1)]).unwrap();
        assert!(tree.is_forest());
        assert_eq!(tree.component_count(), 1);
        assert_eq!(tree.face_dimension(), 0);

        let cycle = SupportPattern::full(2, 2);
        assert!(!cycle.is_forest());
        assert_eq!(cycle.face_dimension(), 1);

        let two = SupportPattern::from_cells(2, 2, [(0, 0), (1, 1)]).unwrap();
        assert_eq!(two.component_count(), 2);
        assert_eq!(two.face_dimension(), 0);
    }

    #[test]
    fn out_of_range_cell_rejected() {
        assert!(matches!(
            SupportPattern::from_cells(2, 2, [(2, 0)]),
            Err(Error::CellOutOfRange(2, 0, 2, 2))
        ));
    }
}
