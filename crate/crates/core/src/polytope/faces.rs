//! Faces of `C(P,Q)` and lattice-level (combinatorial) equivalence.
//!
//! Every face is determined by its support: the face with support `s` is
//! `{T : supp(T) ⊆ s}`, its vertices are the polytope vertices whose
//! support fits inside `s`, and its dimension follows from the support
//! graph. The lattice is generated from single-vertex faces and the top
//! face by closing under pairwise joins.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::error::Error;
use crate::scalar::Rational;
use crate::support::SupportPattern;

use super::{Polytope, SizeCaps};

/// Vertex sets are stored as bitmasks; lattices beyond this many vertices
/// are rejected regardless of the configured cap.
const HARD_VERTEX_LIMIT: usize = 128;

/// A nonempty face of the polytope: its support, the vertices it contains
/// (as indices into the lattice's vertex list), and its affine dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    support: SupportPattern,
    vertex_mask: u128,
    dimension: usize,
}

impl Face {
    pub fn support(&self) -> &SupportPattern {
        &self.support
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_mask.count_ones() as usize
    }

    pub fn contains_vertex(&self, index: usize) -> bool {
        self.vertex_mask >> index & 1 == 1
    }

    /// Indices into [`FaceLattice::vertex_supports`], ascending.
    pub fn vertex_indices(&self) -> Vec<usize> {
        (0..HARD_VERTEX_LIMIT)
            .filter(|&i| self.contains_vertex(i))
            .collect()
    }
}

/// The nonempty faces of a polytope, ordered by inclusion of their vertex
/// sets; includes every vertex as a 0-dimensional face and the whole
/// polytope as the top face.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceLattice {
    vertex_supports: Vec<SupportPattern>,
    faces: Vec<Face>,
}

impl FaceLattice {
    pub fn vertex_count(&self) -> usize {
        self.vertex_supports.len()
    }

    /// Supports of the 0-dimensional faces, in vertex-index order.
    pub fn vertex_supports(&self) -> &[SupportPattern] {
        &self.vertex_supports
    }

    /// Faces sorted by (dimension, support).
    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    /// Face counts by dimension, `f[k]` = number of `k`-dimensional faces.
    pub fn f_vector(&self) -> Vec<usize> {
        let top = self.faces.iter().map(Face::dimension).max().unwrap_or(0);
        let mut f = alloc::vec![0usize; top + 1];
        for face in &self.faces {
            f[face.dimension] += 1;
        }
        f
    }

    /// Whether an inclusion-preserving bijection exists between the two
    /// lattices, i.e. a bijection of vertices carrying the face family of
    /// one onto the other.
    ///
    /// Geometrically equivalent polytopes match through the
    /// identity-on-supports map; otherwise a backtracking search over
    /// vertex bijections (pruned by incidence invariants) decides exact
    /// isomorphism at desk scale.
    pub fn combinatorially_equivalent(&self, other: &FaceLattice) -> bool {
        if self.vertex_count() != other.vertex_count() || self.faces.len() != other.faces.len() {
            return false;
        }
        let profile = |l: &FaceLattice| {
            let mut v: Vec<(usize, usize)> = l
                .faces
                .iter()
                .map(|f| (f.dimension, f.vertex_count()))
                .collect();
            v.sort_unstable();
            v
        };
        if profile(self) != profile(other) {
            return false;
        }

        if let Some(map) = self.support_matching(other) {
            if self.is_isomorphism(other, &map) {
                return true;
            }
        }

        let mine = self.vertex_signatures();
        let theirs = other.vertex_signatures();
        {
            let mut a = mine.clone();
            let mut b = theirs.clone();
            a.sort_unstable();
            b.sort_unstable();
            if a != b {
                return false;
            }
        }

        let k = self.vertex_count();
        let mut map: Vec<Option<usize>> = alloc::vec![None; k];
        let mut used = alloc::vec![false; k];
        self.search(other, &mine, &theirs, 0, &mut map, &mut used)
    }

    /// Map by equal vertex supports when the two polytopes realize the
    /// same support family.
    fn support_matching(&self, other: &FaceLattice) -> Option<Vec<usize>> {
        let index: BTreeMap<&SupportPattern, usize> = other
            .vertex_supports
            .iter()
            .enumerate()
            .map(|(i, s)| (s, i))
            .collect();
        self.vertex_supports
            .iter()
            .map(|s| index.get(s).copied())
            .collect()
    }

    fn face_mask_set(&self) -> BTreeSet<u128> {
        self.faces.iter().map(|f| f.vertex_mask).collect()
    }

    fn is_isomorphism(&self, other: &FaceLattice, map: &[usize]) -> bool {
        let target = other.face_mask_set();
        self.faces
            .iter()
            .map(|f| {
                let mut mask = 0u128;
                for i in 0..map.len() {
                    if f.contains_vertex(i) {
                        mask |= 1 << map[i];
                    }
                }
                mask
            })
            .collect::<BTreeSet<u128>>()
            == target
    }

    /// Per-vertex incidence signature: sorted (dimension, size) of every
    /// face containing the vertex.
    fn vertex_signatures(&self) -> Vec<Vec<(usize, usize)>> {
        (0..self.vertex_count())
            .map(|v| {
                let mut sig: Vec<(usize, usize)> = self
                    .faces
                    .iter()
                    .filter(|f| f.contains_vertex(v))
                    .map(|f| (f.dimension, f.vertex_count()))
                    .collect();
                sig.sort_unstable();
                sig
            })
            .collect()
    }

    fn search(
        &self,
        other: &FaceLattice,
        mine: &[Vec<(usize, usize)>],
        theirs: &[Vec<(usize, usize)>],
        next: usize,
        map: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
    ) -> bool {
        if next == map.len() {
            let assignment: Vec<usize> = map.iter().map(|m| m.unwrap()).collect();
            return self.is_isomorphism(other, &assignment);
        }
        for candidate in 0..map.len() {
            if used[candidate] || mine[next] != theirs[candidate] {
                continue;
            }
            map[next] = Some(candidate);
            used[candidate] = true;
            if self.search(other, mine, theirs, next + 1, map, used) {
                return true;
            }
            map[next] = None;
            used[candidate] = false;
        }
        false
    }
}

impl Polytope<Rational> {
    /// Builds the face lattice by seeding with the single-vertex faces and
    /// the top face, then closing under pairwise joins: union the supports,
    /// collect the vertices fitting inside the union, and take their
    /// support union as the face's support, until a fixpoint.
    pub fn face_lattice(&self, caps: &SizeCaps) -> Result<FaceLattice, Error> {
        let vertices = self.enumerate_vertices(caps)?;
        let count = vertices.len();
        let cap = caps.max_vertices.min(HARD_VERTEX_LIMIT);
        if count > cap {
            return Err(Error::CapacityExceeded { size: count, cap });
        }

        let supports: Vec<SupportPattern> =
            vertices.iter().map(|v| v.support().clone()).collect();
        let mut faces: BTreeMap<u128, Face> = BTreeMap::new();

        for (i, v) in vertices.iter().enumerate() {
            faces.insert(
                1u128 << i,
                Face {
                    support: v.support().clone(),
                    vertex_mask: 1 << i,
                    dimension: 0,
                },
            );
        }
        if count > 0 {
            let mut all = SupportPattern::empty(self.rows(), self.cols());
            for s in &supports {
                all = all.union(s);
            }
            let top = self.join_of(&supports, all);
            faces.insert(top.vertex_mask, top);
        }

        loop {
            let masks: Vec<u128> = faces.keys().copied().collect();
            let mut grew = false;
            for (a, &ma) in masks.iter().enumerate() {
                for &mb in &masks[a + 1..] {
                    let joined = ma | mb;
                    if faces.contains_key(&joined) {
                        continue;
                    }
                    let union = faces[&ma].support.union(&faces[&mb].support);
                    let face = self.join_of(&supports, union);
                    grew |= faces.insert(face.vertex_mask, face).is_none();
                }
            }
            if !grew {
                break;
            }
        }

        let mut list: Vec<Face> = faces.into_values().collect();
        list.sort_by(|x, y| {
            (x.dimension, &x.support).cmp(&(y.dimension, &y.support))
        });
        Ok(FaceLattice {
            vertex_supports: supports,
            faces: list,
        })
    }

    /// The face generated by a support union: vertices fitting inside it,
    /// re-collected support, dimension from the support graph.
    fn join_of(&self, vertex_supports: &[SupportPattern], union: SupportPattern) -> Face {
        let mut mask = 0u128;
        let mut support = SupportPattern::empty(self.rows(), self.cols());
        for (i, s) in vertex_supports.iter().enumerate() {
            if s.is_subset_of(&union) {
                mask |= 1 << i;
                support = support.union(s);
            }
        }
        let dimension = support.face_dimension();
        Face {
            support,
            vertex_mask: mask,
            dimension,
        }
    }
}
