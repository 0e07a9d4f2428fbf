//! A-partite RN graphs and their product with a base witness.
//!
//! Fix a good complete RN graph `A` with vertices `v_1 < ... < v_p`. An
//! A-partite graph splits its vertices into consecutive parts `X_1 < ... < X_p`
//! such that every R-edge (N-edge) from `X_i` to `X_j` sits over an R-edge
//! (N-edge) `(v_i, v_j)` of `A`.

use std::ops::ControlFlow;

use thiserror::Error;

use crate::analysis::is_good;
use crate::arrow::{
    decide, oracle_ramsey, ArrowError, ArrowLimits, ArrowVerdict, BaseOracle, Certification, Coloring, CopyHypergraph,
    OracleError,
};
use crate::embeddings::{enumerate_copies, is_embedding, visit_copies_filtered, Embedding};
use crate::structures::{Homomorphism, OrderedStructure, Relation, RnGraph, StructureError, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartiteError {
    #[error("base graph A must be complete and good")]
    BaseNotCompleteGood,
    #[error("expected {expected} parts, got {got}")]
    PartCount { expected: usize, got: usize },
    #[error("vertex {0} is missing from the partition or listed twice")]
    InvalidPartition(VertexId),
    #[error("edge ({x},{y}) lies inside part {part}")]
    IntraPartEdge { x: VertexId, y: VertexId, part: usize },
    #[error("{kind}-edge ({x},{y}) from part {from} to part {to} has no {kind}-edge below it in A")]
    PartProjectionViolation {
        kind: char,
        x: VertexId,
        y: VertexId,
        from: usize,
        to: usize,
    },
    #[error("vertex {x} of an earlier part comes after vertex {y} of a later part")]
    PartOrderViolation { x: VertexId, y: VertexId },
    #[error("copy {0:?} of A is not crossing")]
    NonCrossingCopy(Vec<VertexId>),
    #[error("graphs are partite over different base graphs")]
    BaseMismatch,
    #[error("more than {0} partite copies")]
    TooManyCopies(usize),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Arrow(#[from] ArrowError),
}

/// An RN graph with a distinguished partition projecting onto `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct APartiteRnGraph {
    base: RnGraph,
    a: RnGraph,
    parts: Vec<Vec<VertexId>>,
    part_of: Vec<usize>,
}

impl APartiteRnGraph {
    /// Validate `base` as A-partite with the given parts; part `i` lies over
    /// the `i`-th vertex of `A` in its order. Parts may be empty.
    pub fn new(a: &RnGraph, parts: Vec<Vec<VertexId>>, base: RnGraph) -> Result<Self, PartiteError> {
        if !a.is_complete() || !is_good(a) {
            return Err(PartiteError::BaseNotCompleteGood);
        }
        let p = a.vertex_count();
        if parts.len() != p {
            return Err(PartiteError::PartCount {
                expected: p,
                got: parts.len(),
            });
        }
        let n = base.vertex_count();
        let mut part_of = vec![usize::MAX; n];
        for (i, part) in parts.iter().enumerate() {
            for &v in part {
                if v >= n || part_of[v] != usize::MAX {
                    return Err(PartiteError::InvalidPartition(v));
                }
                part_of[v] = i;
            }
        }
        if let Some(v) = part_of.iter().position(|&i| i == usize::MAX) {
            return Err(PartiteError::InvalidPartition(v));
        }
        for (kind, rel) in [('R', base.r()), ('N', base.n())] {
            for (x, y) in rel.iter() {
                if part_of[x] == part_of[y] {
                    return Err(PartiteError::IntraPartEdge { x, y, part: part_of[x] });
                }
            }
            for (x, y) in rel.iter() {
                let (from, to) = (part_of[x], part_of[y]);
                let (vi, vj) = (a.order().at(from), a.order().at(to));
                let below = if kind == 'R' { a.has_r(vi, vj) } else { a.has_n(vi, vj) };
                if !below {
                    return Err(PartiteError::PartProjectionViolation { kind, x, y, from, to });
                }
            }
        }
        // consecutive parts: scanning in order, part indices never decrease
        let order = base.order();
        for pos in 1..n {
            let (x, y) = (order.at(pos - 1), order.at(pos));
            if part_of[x] > part_of[y] {
                return Err(PartiteError::PartOrderViolation { x, y });
            }
        }
        let mut parts = parts;
        for part in &mut parts {
            part.sort_by_key(|&v| order.rank(v));
        }
        Ok(APartiteRnGraph {
            base,
            a: a.clone(),
            parts,
            part_of,
        })
    }

    pub fn base(&self) -> &RnGraph {
        &self.base
    }

    pub fn a(&self) -> &RnGraph {
        &self.a
    }

    /// Parts in order, each sorted by rank.
    pub fn parts(&self) -> &[Vec<VertexId>] {
        &self.parts
    }

    pub fn part_of(&self, v: VertexId) -> usize {
        self.part_of[v]
    }

    /// The projection sending `X_i` to `v_i`.
    pub fn projection(&self) -> Homomorphism {
        Homomorphism::new(self.part_of.iter().map(|&i| self.a.order().at(i)).collect())
    }

    /// Copies of `A` in the base graph; each one meets every part once.
    pub fn crossing_copies(&self) -> Result<Vec<Embedding>, PartiteError> {
        let copies = enumerate_copies(&self.a, &self.base);
        for c in &copies {
            if !self.is_crossing(c) {
                return Err(PartiteError::NonCrossingCopy(c.image().to_vec()));
            }
        }
        Ok(copies)
    }

    pub fn is_crossing(&self, copy: &Embedding) -> bool {
        let mut hits = vec![0usize; self.parts.len()];
        for &v in copy.image() {
            hits[self.part_of[v]] += 1;
        }
        hits.iter().all(|&h| h == 1)
    }
}

/// Part-preserving embeddings of `e` into `f`, in lexicographic image order.
pub fn partite_embeddings(e: &APartiteRnGraph, f: &APartiteRnGraph) -> Result<Vec<Embedding>, PartiteError> {
    partite_embeddings_bounded(e, f, usize::MAX)
}

pub fn partite_embeddings_bounded(
    e: &APartiteRnGraph,
    f: &APartiteRnGraph,
    limit: usize,
) -> Result<Vec<Embedding>, PartiteError> {
    if e.a != f.a {
        return Err(PartiteError::BaseMismatch);
    }
    let mut out = Vec::new();
    let flow = visit_copies_filtered(
        &e.base,
        &f.base,
        |x, v| e.part_of[x] == f.part_of[v],
        |emb| {
            if out.len() == limit {
                return ControlFlow::Break(());
            }
            out.push(emb.clone());
            ControlFlow::Continue(())
        },
    );
    match flow {
        ControlFlow::Continue(()) => Ok(out),
        ControlFlow::Break(()) => Err(PartiteError::TooManyCopies(limit)),
    }
}

/// Where the N-edges of the product come from.
///
/// `MatchN` pairs N-edges of `A` with N-edges of the witness, which is what
/// makes lifted copies of graphs containing N-edges genuine copies. `FromR`
/// pairs them with R-edges of the witness; it agrees with `MatchN` whenever
/// `A` has no N-edge and is kept for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum NEdgeRule {
    #[default]
    MatchN,
    FromR,
}

/// The A-partite graph `F` on `A × W` for a witness `W`, with the
/// correspondences between copies in `W` and copies in `F`.
#[derive(Debug, Clone)]
pub struct PartiteProduct {
    f: APartiteRnGraph,
    witness: RnGraph,
    certification: Certification,
}

impl PartiteProduct {
    /// Build the product of `a` and `witness`.
    ///
    /// Vertex `(v_t, u)` gets id `t * |W| + rank(u)`, which is the
    /// lexicographic order. Edges:
    /// `((a,u),(a',u')) ∈ R(F)  iff (a,a') ∈ R(A) and (u,u') ∈ R(W)`,
    /// `((a,u),(a',u')) ∈ N(F)  iff (a,a') ∈ N(A) and (u,u') ∈ N(W)`
    /// (or `∈ R(W)` under [`NEdgeRule::FromR`]).
    pub fn new(a: &RnGraph, witness: RnGraph, rule: NEdgeRule) -> Result<Self, PartiteError> {
        let p = a.vertex_count();
        let m = witness.vertex_count();
        let wo = witness.order();
        let id = |t: usize, u: VertexId| t * m + wo.rank(u);
        let mut r = Relation::new();
        let mut nrel = Relation::new();
        for (x, y) in a.r().iter() {
            let (tx, ty) = (a.order().rank(x), a.order().rank(y));
            for (u, w) in witness.r().iter() {
                r.insert(id(tx, u), id(ty, w));
            }
        }
        let n_source = match rule {
            NEdgeRule::MatchN => witness.n(),
            NEdgeRule::FromR => witness.r(),
        };
        for (x, y) in a.n().iter() {
            let (tx, ty) = (a.order().rank(x), a.order().rank(y));
            for (u, w) in n_source.iter() {
                nrel.insert(id(tx, u), id(ty, w));
            }
        }
        let base = RnGraph::with_identity_order(p * m, r, nrel)?;
        let parts = (0..p).map(|t| (t * m..(t + 1) * m).collect()).collect();
        let f = APartiteRnGraph::new(a, parts, base)?;
        Ok(PartiteProduct {
            f,
            witness,
            certification: Certification::Certified,
        })
    }

    pub fn f(&self) -> &APartiteRnGraph {
        &self.f
    }

    pub fn witness(&self) -> &RnGraph {
        &self.witness
    }

    pub fn certification(&self) -> &Certification {
        &self.certification
    }

    /// Id of the product vertex `(v_t, u)`.
    pub fn vertex(&self, t: usize, u: VertexId) -> VertexId {
        t * self.witness.vertex_count() + self.witness.order().rank(u)
    }

    /// `(t, u)` with `v` = `(v_t, u)`.
    pub fn coordinates(&self, v: VertexId) -> (usize, VertexId) {
        let m = self.witness.vertex_count();
        (v / m, self.witness.order().at(v % m))
    }

    /// The diagonal copy `{(v_i, x_i)}` of a copy `x_1 < ... < x_p` of `A` in
    /// the witness.
    pub fn diagonal_lift(&self, a_copy: &Embedding) -> Embedding {
        let a = self.f.a();
        let map = (0..a.vertex_count())
            .map(|x| self.vertex(a.order().rank(x), a_copy.apply(x)))
            .collect();
        Embedding::from_map(map, self.f.base())
    }

    /// Inverse of [`Self::diagonal_lift`] on copies of `A` in `F`.
    pub fn undo_diagonal(&self, f_copy: &Embedding) -> Option<Embedding> {
        let map: Vec<VertexId> = f_copy.map().iter().map(|&v| self.coordinates(v).1).collect();
        is_embedding(&map, self.f.a(), &self.witness).then(|| Embedding::from_map(map, &self.witness))
    }

    /// Lift a copy of `e` in the witness to the part-respecting copy
    /// `∪_i {(v_i, x) : x ∈ X_i(E')}` in `F`.
    pub fn lift(&self, e: &APartiteRnGraph, e_copy: &Embedding) -> Embedding {
        let map = (0..e.base().vertex_count())
            .map(|x| self.vertex(e.part_of(x), e_copy.apply(x)))
            .collect();
        Embedding::from_map(map, self.f.base())
    }

    /// Lifts of all copies of `e` in the witness.
    pub fn lifted_copies(&self, e: &APartiteRnGraph) -> Vec<Embedding> {
        enumerate_copies(e.base(), &self.witness)
            .iter()
            .map(|c| self.lift(e, c))
            .collect()
    }

    /// Pull a colouring of the copies of `A` in `F` back to the witness along
    /// diagonal copies.
    pub fn transfer_coloring(&self, coloring: &Coloring) -> Result<Coloring, ArrowError> {
        let mut out = Coloring::new(coloring.colors());
        for a_copy in enumerate_copies(self.f.a(), &self.witness) {
            let lifted = self.diagonal_lift(&a_copy);
            let color = coloring
                .get(lifted.image())
                .ok_or_else(|| ArrowError::IncompleteColoring(lifted.image().to_vec()))?;
            out.set(a_copy.image().to_vec(), color);
        }
        Ok(out)
    }
}

/// Obtain a witness `W -> (E)^A_2` from the oracle and form the product.
pub fn product_construction(
    a: &RnGraph,
    e: &APartiteRnGraph,
    oracle: &BaseOracle,
    rule: NEdgeRule,
) -> Result<PartiteProduct, PartiteError> {
    let witness = oracle_ramsey(oracle, a, e.base())?;
    let mut product = PartiteProduct::new(a, witness.graph, rule)?;
    product.certification = witness.certification;
    Ok(product)
}

/// Decide `F -> (E)^A_2` in the partite sense: every 2-colouring of the copies
/// of `A` in `F` leaves some part-preserving copy of `E` monochromatic.
pub fn check_partite_arrow(
    f: &APartiteRnGraph,
    e: &APartiteRnGraph,
    limits: &ArrowLimits,
) -> Result<ArrowVerdict, PartiteError> {
    let points = f.crossing_copies()?;
    let index: std::collections::HashMap<&[VertexId], usize> =
        points.iter().enumerate().map(|(i, c)| (c.image(), i)).collect();
    let a_in_e = enumerate_copies(e.a(), e.base());
    let mut edges = Vec::new();
    for copy in partite_embeddings_bounded(e, f, limits.max_copies)? {
        let mut edge: Vec<usize> = a_in_e
            .iter()
            .map(|ac| {
                let image: Vec<VertexId> = ac.image().iter().map(|&v| copy.apply(v)).collect();
                index[image.as_slice()]
            })
            .collect();
        edge.sort_unstable();
        edges.push(edge);
    }
    let h = CopyHypergraph::from_parts(points, edges);
    Ok(decide(&h, 2, limits)?)
}
