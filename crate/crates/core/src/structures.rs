//! Ordered posets, RN graphs and homomorphisms between them.
//!
//! Every structure lives on the dense vertex set `0..n`. Constructors check all
//! definitional invariants up front and reject invalid input instead of
//! repairing it.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Vertex identifier, dense in `0..n` within one structure.
pub type VertexId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("vertex {vertex} out of range for n={n}")]
    VertexOutOfRange { vertex: VertexId, n: usize },
    #[error("order is not a permutation of 0..{n}")]
    NotAPermutation { n: usize },
    #[error("relation contains the loop ({0},{0})")]
    NotIrreflexive(VertexId),
    #[error("relation is not transitive: ({0},{1}) and ({1},{2}) present but ({0},{2}) missing")]
    NotTransitive(VertexId, VertexId, VertexId),
    #[error("pair ({0},{1}) of R is not ordered by the linear extension")]
    NotLinearExtension(VertexId, VertexId),
    #[error("pair ({0},{1}) lies in both R and N")]
    NotDisjoint(VertexId, VertexId),
    #[error("pair ({0},{1}) points backwards in the order")]
    NotCompatible(VertexId, VertexId),
    #[error("size must be at least 1")]
    EmptyStructure,
}

/// A set of ordered pairs, kept sorted so iteration is canonical.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Relation {
    pairs: BTreeSet<(VertexId, VertexId)>,
}

impl Relation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, x: VertexId, y: VertexId) -> bool {
        self.pairs.contains(&(x, y))
    }

    pub fn insert(&mut self, x: VertexId, y: VertexId) -> bool {
        self.pairs.insert((x, y))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Pairs in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn is_disjoint(&self, other: &Relation) -> bool {
        self.pairs.is_disjoint(&other.pairs)
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.pairs.is_subset(&other.pairs)
    }

    fn check_range(&self, n: usize) -> Result<(), StructureError> {
        for (x, y) in self.iter() {
            for vertex in [x, y] {
                if vertex >= n {
                    return Err(StructureError::VertexOutOfRange { vertex, n });
                }
            }
            if x == y {
                return Err(StructureError::NotIrreflexive(x));
            }
        }
        Ok(())
    }

    /// Successor lists indexed by source vertex.
    fn successors(&self, n: usize) -> Vec<Vec<VertexId>> {
        let mut out = vec![Vec::new(); n];
        for (x, y) in self.iter() {
            out[x].push(y);
        }
        out
    }
}

impl FromIterator<(VertexId, VertexId)> for Relation {
    fn from_iter<I: IntoIterator<Item = (VertexId, VertexId)>>(iter: I) -> Self {
        Relation {
            pairs: iter.into_iter().collect(),
        }
    }
}

/// A linear order stored as a permutation: `sequence[i]` is the i-th smallest
/// vertex, `rank[v]` its inverse.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearOrder {
    sequence: Vec<VertexId>,
    rank: Vec<usize>,
}

impl LinearOrder {
    pub fn new(sequence: Vec<VertexId>) -> Result<Self, StructureError> {
        let n = sequence.len();
        let mut rank = vec![usize::MAX; n];
        for (pos, &v) in sequence.iter().enumerate() {
            if v >= n || rank[v] != usize::MAX {
                return Err(StructureError::NotAPermutation { n });
            }
            rank[v] = pos;
        }
        Ok(LinearOrder { sequence, rank })
    }

    pub fn identity(n: usize) -> Self {
        LinearOrder {
            sequence: (0..n).collect(),
            rank: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    pub fn rank(&self, v: VertexId) -> usize {
        self.rank[v]
    }

    /// The vertex at position `pos`.
    pub fn at(&self, pos: usize) -> VertexId {
        self.sequence[pos]
    }

    /// Strict comparison `x < y`.
    pub fn precedes(&self, x: VertexId, y: VertexId) -> bool {
        self.rank[x] < self.rank[y]
    }

    pub fn as_slice(&self) -> &[VertexId] {
        &self.sequence
    }

    pub fn is_identity(&self) -> bool {
        self.sequence.iter().enumerate().all(|(i, &v)| i == v)
    }
}

/// Which flavour of ordered structure a value is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StructureKind {
    Poset,
    Rn,
}

impl fmt::Display for StructureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StructureKind::Poset => f.write_str("poset"),
            StructureKind::Rn => f.write_str("rn"),
        }
    }
}

/// Common read access for linearly ordered structures with up to two binary
/// relations. Posets report an empty `N`.
pub trait OrderedStructure {
    fn kind(&self) -> StructureKind;
    fn vertex_count(&self) -> usize;
    fn order(&self) -> &LinearOrder;
    fn has_r(&self, x: VertexId, y: VertexId) -> bool;
    fn has_n(&self, x: VertexId, y: VertexId) -> bool;
    /// R-successors of `x`, sorted by rank.
    fn r_successors(&self, x: VertexId) -> &[VertexId];
    /// N-successors of `x`, sorted by rank.
    fn n_successors(&self, x: VertexId) -> &[VertexId];
}

fn sort_by_rank(lists: &mut [Vec<VertexId>], order: &LinearOrder) {
    for list in lists {
        list.sort_by_key(|&v| order.rank(v));
    }
}

/// A finite strict partial order together with a linear extension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderedPoset {
    r: Relation,
    order: LinearOrder,
    r_succ: Vec<Vec<VertexId>>,
}

impl OrderedPoset {
    pub fn new(n: usize, r: Relation, order: Vec<VertexId>) -> Result<Self, StructureError> {
        if order.len() != n {
            return Err(StructureError::NotAPermutation { n });
        }
        let order = LinearOrder::new(order)?;
        r.check_range(n)?;
        for (x, y) in r.iter() {
            if !order.precedes(x, y) {
                return Err(StructureError::NotLinearExtension(x, y));
            }
        }
        let mut r_succ = r.successors(n);
        // transitivity: every two-step path must be closed
        for (x, y) in r.iter() {
            for &z in &r_succ[y] {
                if !r.contains(x, z) {
                    return Err(StructureError::NotTransitive(x, y, z));
                }
            }
        }
        sort_by_rank(&mut r_succ, &order);
        Ok(OrderedPoset { r, order, r_succ })
    }

    /// The chain `0 < 1 < ... < k-1`.
    pub fn chain(k: usize) -> Result<Self, StructureError> {
        if k == 0 {
            return Err(StructureError::EmptyStructure);
        }
        let r = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
        Self::new(k, r, (0..k).collect())
    }

    /// `k` pairwise incomparable points ordered by id.
    pub fn antichain(k: usize) -> Result<Self, StructureError> {
        if k == 0 {
            return Err(StructureError::EmptyStructure);
        }
        Self::new(k, Relation::new(), (0..k).collect())
    }

    pub fn r(&self) -> &Relation {
        &self.r
    }

    /// Expand to the complete RN graph with `N = < \ R`.
    pub fn to_complete_rn(&self) -> RnGraph {
        let n = self.vertex_count();
        let mut nrel = Relation::new();
        for i in 0..n {
            for j in i + 1..n {
                let (x, y) = (self.order.at(i), self.order.at(j));
                if !self.r.contains(x, y) {
                    nrel.insert(x, y);
                }
            }
        }
        RnGraph::new(n, self.r.clone(), nrel, self.order.as_slice().to_vec())
            .expect("complete expansion of a valid poset is a valid RN graph")
    }
}

impl OrderedStructure for OrderedPoset {
    fn kind(&self) -> StructureKind {
        StructureKind::Poset
    }
    fn vertex_count(&self) -> usize {
        self.order.len()
    }
    fn order(&self) -> &LinearOrder {
        &self.order
    }
    fn has_r(&self, x: VertexId, y: VertexId) -> bool {
        self.r.contains(x, y)
    }
    fn has_n(&self, _x: VertexId, _y: VertexId) -> bool {
        false
    }
    fn r_successors(&self, x: VertexId) -> &[VertexId] {
        &self.r_succ[x]
    }
    fn n_successors(&self, _x: VertexId) -> &[VertexId] {
        &[]
    }
}

/// A linearly ordered vertex set with two disjoint forward-pointing relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RnGraph {
    r: Relation,
    n: Relation,
    order: LinearOrder,
    r_succ: Vec<Vec<VertexId>>,
    n_succ: Vec<Vec<VertexId>>,
}

impl RnGraph {
    pub fn new(n: usize, r: Relation, nrel: Relation, order: Vec<VertexId>) -> Result<Self, StructureError> {
        if order.len() != n {
            return Err(StructureError::NotAPermutation { n });
        }
        let order = LinearOrder::new(order)?;
        r.check_range(n)?;
        nrel.check_range(n)?;
        if let Some((x, y)) = r.iter().find(|&(x, y)| nrel.contains(x, y)) {
            return Err(StructureError::NotDisjoint(x, y));
        }
        if let Some((x, y)) = r.iter().chain(nrel.iter()).find(|&(x, y)| !order.precedes(x, y)) {
            return Err(StructureError::NotCompatible(x, y));
        }
        let mut r_succ = r.successors(n);
        let mut n_succ = nrel.successors(n);
        sort_by_rank(&mut r_succ, &order);
        sort_by_rank(&mut n_succ, &order);
        Ok(RnGraph {
            r,
            n: nrel,
            order,
            r_succ,
            n_succ,
        })
    }

    /// Graph on `0..n` with the identity order.
    pub fn with_identity_order(n: usize, r: Relation, nrel: Relation) -> Result<Self, StructureError> {
        Self::new(n, r, nrel, (0..n).collect())
    }

    pub fn r(&self) -> &Relation {
        &self.r
    }

    pub fn n(&self) -> &Relation {
        &self.n
    }

    /// Every forward pair lies in `R ∪ N`.
    pub fn is_complete(&self) -> bool {
        let pairs = self.vertex_count() * self.vertex_count().saturating_sub(1) / 2;
        // R and N are disjoint and forward-only, so counting suffices
        self.r.len() + self.n.len() == pairs
    }

    /// Recover the ordered poset when `R` is a strict partial order.
    pub fn to_poset(&self) -> Result<OrderedPoset, StructureError> {
        OrderedPoset::new(self.vertex_count(), self.r.clone(), self.order.as_slice().to_vec())
    }

    /// Substructure induced on `vertices`, renumbered densely by rank.
    /// Returns the graph and the new-id to old-id map.
    pub fn induced(&self, vertices: &[VertexId]) -> (RnGraph, Vec<VertexId>) {
        let mut old: Vec<VertexId> = vertices.to_vec();
        old.sort_by_key(|&v| self.order.rank(v));
        old.dedup();
        let mut new_id = vec![usize::MAX; self.vertex_count()];
        for (i, &v) in old.iter().enumerate() {
            new_id[v] = i;
        }
        let pick = |rel: &Relation| -> Relation {
            rel.iter()
                .filter(|&(x, y)| new_id[x] != usize::MAX && new_id[y] != usize::MAX)
                .map(|(x, y)| (new_id[x], new_id[y]))
                .collect()
        };
        let g = RnGraph::with_identity_order(old.len(), pick(&self.r), pick(&self.n))
            .expect("induced substructure of a valid RN graph is valid");
        (g, old)
    }
}

impl OrderedStructure for RnGraph {
    fn kind(&self) -> StructureKind {
        StructureKind::Rn
    }
    fn vertex_count(&self) -> usize {
        self.order.len()
    }
    fn order(&self) -> &LinearOrder {
        &self.order
    }
    fn has_r(&self, x: VertexId, y: VertexId) -> bool {
        self.r.contains(x, y)
    }
    fn has_n(&self, x: VertexId, y: VertexId) -> bool {
        self.n.contains(x, y)
    }
    fn r_successors(&self, x: VertexId) -> &[VertexId] {
        &self.r_succ[x]
    }
    fn n_successors(&self, x: VertexId) -> &[VertexId] {
        &self.n_succ[x]
    }
}

/// A vertex map `source -> target`. Whether it preserves anything is checked
/// against concrete structures with [`Homomorphism::is_homomorphism`].
///
/// Only forward preservation of `R` and `N` is required; weak monotonicity is
/// a separate predicate.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Homomorphism {
    map: Vec<VertexId>,
}

impl Homomorphism {
    pub fn new(map: Vec<VertexId>) -> Self {
        Homomorphism { map }
    }

    pub fn identity(n: usize) -> Self {
        Homomorphism { map: (0..n).collect() }
    }

    pub fn map(&self) -> &[VertexId] {
        &self.map
    }

    pub fn apply(&self, v: VertexId) -> VertexId {
        self.map[v]
    }

    /// `R` and `N` edges of `source` land on `R` and `N` edges of `target`.
    pub fn is_homomorphism<S, T>(&self, source: &S, target: &T) -> bool
    where
        S: OrderedStructure + RelationView,
        T: OrderedStructure,
    {
        if self.map.len() != source.vertex_count() {
            return false;
        }
        if self.map.iter().any(|&v| v >= target.vertex_count()) {
            return false;
        }
        source.r_pairs().all(|(x, y)| target.has_r(self.map[x], self.map[y]))
            && source.n_pairs().all(|(x, y)| target.has_n(self.map[x], self.map[y]))
    }

    /// `x <= y` in the source implies `h(x) <= h(y)` in the target.
    pub fn is_weakly_monotone<S: OrderedStructure, T: OrderedStructure>(&self, source: &S, target: &T) -> bool {
        let order = source.order();
        self.map.len() == source.vertex_count()
            && (1..order.len()).all(|i| {
                let (x, y) = (order.at(i - 1), order.at(i));
                target.order().rank(self.map[x]) <= target.order().rank(self.map[y])
            })
    }

    /// `other ∘ self`: first apply `self`, then `other`.
    pub fn then(&self, other: &Homomorphism) -> Homomorphism {
        Homomorphism {
            map: self.map.iter().map(|&v| other.map[v]).collect(),
        }
    }
}

/// Edge iteration, used where a full scan over pairs is needed.
pub trait RelationView {
    fn r_pairs(&self) -> Box<dyn Iterator<Item = (VertexId, VertexId)> + '_>;
    fn n_pairs(&self) -> Box<dyn Iterator<Item = (VertexId, VertexId)> + '_>;
}

impl RelationView for RnGraph {
    fn r_pairs(&self) -> Box<dyn Iterator<Item = (VertexId, VertexId)> + '_> {
        Box::new(self.r.iter())
    }
    fn n_pairs(&self) -> Box<dyn Iterator<Item = (VertexId, VertexId)> + '_> {
        Box::new(self.n.iter())
    }
}

impl RelationView for OrderedPoset {
    fn r_pairs(&self) -> Box<dyn Iterator<Item = (VertexId, VertexId)> + '_> {
        Box::new(self.r.iter())
    }
    fn n_pairs(&self) -> Box<dyn Iterator<Item = (VertexId, VertexId)> + '_> {
        Box::new(std::iter::empty())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(pairs: &[(usize, usize)]) -> Relation {
        pairs.iter().copied().collect()
    }

    #[test]
    fn two_chain_and_antichain() {
        let c = OrderedPoset::new(2, rel(&[(0, 1)]), vec![0, 1]).unwrap();
        assert_eq!(c.r().len(), 1);
        let a = OrderedPoset::new(2, rel(&[]), vec![0, 1]).unwrap();
        assert!(a.r().is_empty());
    }

    #[test]
    fn poset_rejects_missing_transitive_pair() {
        let err = OrderedPoset::new(3, rel(&[(0, 1), (1, 2)]), vec![0, 1, 2]).unwrap_err();
        assert_eq!(err, StructureError::NotTransitive(0, 1, 2));
    }

    #[test]
    fn poset_rejects_loops_and_bad_extensions() {
        assert_eq!(
            OrderedPoset::new(2, rel(&[(1, 1)]), vec![0, 1]).unwrap_err(),
            StructureError::NotIrreflexive(1)
        );
        assert_eq!(
            OrderedPoset::new(2, rel(&[(1, 0)]), vec![0, 1]).unwrap_err(),
            StructureError::NotLinearExtension(1, 0)
        );
        assert!(matches!(
            OrderedPoset::new(2, rel(&[]), vec![0, 0]),
            Err(StructureError::NotAPermutation { .. })
        ));
        assert!(matches!(
            OrderedPoset::new(2, rel(&[(0, 2)]), vec![0, 1]),
            Err(StructureError::VertexOutOfRange { vertex: 2, n: 2 })
        ));
    }

    #[test]
    fn complete_expansion() {
        let chain = OrderedPoset::chain(2).unwrap().to_complete_rn();
        assert_eq!(chain.r(), &rel(&[(0, 1)]));
        assert!(chain.n().is_empty());

        let anti = OrderedPoset::antichain(2).unwrap().to_complete_rn();
        assert!(anti.r().is_empty());
        assert_eq!(anti.n(), &rel(&[(0, 1)]));

        let v = OrderedPoset::new(3, rel(&[(0, 2), (1, 2)]), vec![0, 1, 2]).unwrap();
        let g = v.to_complete_rn();
        assert_eq!(g.n(), &rel(&[(0, 1)]));
        assert!(g.is_complete());
    }

    #[test]
    fn complete_expansion_respects_non_identity_order() {
        // 2 < 0 < 1 with 2 below 1
        let p = OrderedPoset::new(3, rel(&[(2, 1)]), vec![2, 0, 1]).unwrap();
        let g = p.to_complete_rn();
        assert_eq!(g.n(), &rel(&[(0, 1), (2, 0)]));
        assert!(g.is_complete());
        assert_eq!(g.to_poset().unwrap(), p);
    }

    #[test]
    fn rn_graph_validation() {
        let g = RnGraph::new(3, rel(&[(0, 1), (1, 2)]), rel(&[(0, 2)]), vec![0, 1, 2]).unwrap();
        assert_eq!(g.r().len(), 2);
        assert_eq!(
            RnGraph::new(2, rel(&[(0, 1)]), rel(&[(0, 1)]), vec![0, 1]).unwrap_err(),
            StructureError::NotDisjoint(0, 1)
        );
        assert_eq!(
            RnGraph::new(2, rel(&[(1, 0)]), rel(&[]), vec![0, 1]).unwrap_err(),
            StructureError::NotCompatible(1, 0)
        );
    }

    #[test]
    fn completeness() {
        let empty = RnGraph::new(2, rel(&[]), rel(&[]), vec![0, 1]).unwrap();
        assert!(!empty.is_complete());
        let g = RnGraph::new(3, rel(&[(0, 1)]), rel(&[(1, 2), (0, 2)]), vec![0, 1, 2]).unwrap();
        assert!(g.is_complete());
    }

    #[test]
    fn chain_and_antichain_builders() {
        assert_eq!(OrderedPoset::chain(1).unwrap(), OrderedPoset::antichain(1).unwrap());
        assert_eq!(OrderedPoset::chain(3).unwrap().r().len(), 3);
        let anti = OrderedPoset::antichain(4).unwrap();
        assert!(anti.r().is_empty());
        assert_eq!(anti.to_complete_rn().n().len(), 6);
        assert_eq!(OrderedPoset::chain(0).unwrap_err(), StructureError::EmptyStructure);
        assert_eq!(OrderedPoset::antichain(0).unwrap_err(), StructureError::EmptyStructure);
    }

    #[test]
    fn induced_renumbers_by_rank() {
        let g = RnGraph::new(4, rel(&[(3, 0), (0, 2)]), rel(&[(3, 2)]), vec![3, 1, 0, 2]).unwrap();
        let (sub, old) = g.induced(&[2, 3, 0]);
        assert_eq!(old, vec![3, 0, 2]);
        assert_eq!(sub.r(), &rel(&[(0, 1), (1, 2)]));
        assert_eq!(sub.n(), &rel(&[(0, 2)]));
    }

    #[test]
    fn homomorphism_checks_and_composition() {
        let chain3 = OrderedPoset::chain(3).unwrap().to_complete_rn();
        let chain2 = OrderedPoset::chain(2).unwrap().to_complete_rn();
        assert!(Homomorphism::identity(3).is_homomorphism(&chain3, &chain3));
        // collapsing an R-edge onto a single vertex cannot preserve R
        let collapse = Homomorphism::new(vec![0, 0, 1]);
        assert!(!collapse.is_homomorphism(&chain3, &chain2));
        let inject = Homomorphism::new(vec![0, 2]);
        assert!(inject.is_homomorphism(&chain2, &chain3));
        assert!(inject.is_weakly_monotone(&chain2, &chain3));
        let back = Homomorphism::new(vec![0, 1]);
        let composed = back.then(&inject);
        assert_eq!(composed.map(), &[0, 2]);
        assert!(composed.is_homomorphism(&chain2, &chain3));
    }
}
