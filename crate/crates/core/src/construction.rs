//! The partite construction and the tower of ℓ-RN Ramsey witnesses.
//!
//! Given a host `D`, a picture is a D-partite RN graph: its vertices are split
//! into parts indexed by the vertices of `D`, consecutive in the order, and
//! collapsing each part to its index is a homomorphism onto `D`. Starting from
//! disjoint copies of `B`, each copy of `A` in `D` triggers one amalgamation
//! step that glues copies of the current picture along the partite copies of
//! the induced subsystem inside a partite product.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::analysis::{is_ell_rn, is_good, longest_r_path_vertices, transitive_closure, AnalysisError};
use crate::arrow::{find_monochromatic, oracle_ramsey, ArrowError, BaseOracle, Certification, Coloring, OracleError};
use crate::embeddings::{enumerate_copies, enumerate_copies_bounded, is_embedding, Embedding};
use crate::partite::{partite_embeddings_bounded, product_construction, APartiteRnGraph, NEdgeRule, PartiteError};
use crate::structures::{Homomorphism, OrderedPoset, OrderedStructure, Relation, RnGraph, StructureError, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("B has no copy in the host")]
    NoCopiesOfB,
    #[error("step {step}: glued copies disagree ({detail})")]
    GlueConflict { step: usize, detail: String },
    #[error("step {step}: result is not {ell}-RN")]
    EllRnViolated { step: usize, ell: usize },
    #[error("{0} is not a homomorphism")]
    NotAHomomorphism(String),
    #[error("resource limit: {0}")]
    ResourceExceeded(String),
    #[error("tower reaches {reached}, finishing needs {required}")]
    TowerTooShort { required: usize, reached: usize },
    #[error("R-path with {found} vertices exceeds the bound {bound}")]
    PathTooLong { found: usize, bound: usize },
    #[error("closure of R meets N at ({0},{1})")]
    ClosureIntersectsN(VertexId, VertexId),
    #[error("copy {0:?} of B gained closure edges")]
    CopyNotIntact(Vec<VertexId>),
    #[error("no monochromatic copy of B")]
    NoneFound,
    #[error(transparent)]
    Partite(#[from] PartiteError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Arrow(#[from] ArrowError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

impl ConstructionError {
    /// Errors that can only come from a bug, never from bad input or limits.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            ConstructionError::GlueConflict { .. }
                | ConstructionError::EllRnViolated { .. }
                | ConstructionError::NotAHomomorphism(_)
                | ConstructionError::PathTooLong { .. }
                | ConstructionError::ClosureIntersectsN(..)
                | ConstructionError::CopyNotIntact(_)
                | ConstructionError::NoneFound
        )
    }

    /// Errors caused by a size or time ceiling.
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            ConstructionError::ResourceExceeded(_)
                | ConstructionError::Oracle(OracleError::NotFoundWithinBounds { .. })
                | ConstructionError::Oracle(OracleError::Arrow(ArrowError::ResourceExceeded(_)))
                | ConstructionError::Arrow(ArrowError::ResourceExceeded(_))
                | ConstructionError::Partite(PartiteError::TooManyCopies(_))
                | ConstructionError::Partite(PartiteError::Oracle(OracleError::NotFoundWithinBounds { .. }))
                | ConstructionError::Partite(PartiteError::Oracle(OracleError::Arrow(ArrowError::ResourceExceeded(
                    _
                ),)))
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionLimits {
    /// Largest picture the construction may build.
    pub max_vertices: usize,
    /// Largest number of partite copies glued in one step.
    pub max_copies: usize,
    pub rule: NEdgeRule,
}

impl Default for ConstructionLimits {
    fn default() -> Self {
        ConstructionLimits {
            max_vertices: 200_000,
            max_copies: 200_000,
            rule: NEdgeRule::MatchN,
        }
    }
}

/// Where a picture vertex came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Origin {
    /// A vertex of the `h`-th copy of `B` in the initial picture.
    BCopy(usize),
    /// A product vertex shared by the glued copies.
    Shared(VertexId),
    /// The image of `source` in the glued copy number `copy`.
    Fresh { copy: usize, source: VertexId },
}

/// A D-partite RN graph. `part_of[x]` is the vertex of `D` that `x` lies over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Picture {
    base: RnGraph,
    host: RnGraph,
    part_of: Vec<VertexId>,
    origin: Option<Vec<Origin>>,
}

impl Picture {
    /// A picture read back from its parts; provenance is not recorded.
    pub fn new(base: RnGraph, host: RnGraph, part_of: Vec<VertexId>) -> Result<Self, ConstructionError> {
        if part_of.len() != base.vertex_count() {
            return Err(ConstructionError::NotAHomomorphism(
                "part map of the wrong length".into(),
            ));
        }
        if let Some(&i) = part_of.iter().find(|&&i| i >= host.vertex_count()) {
            return Err(StructureError::VertexOutOfRange {
                vertex: i,
                n: host.vertex_count(),
            }
            .into());
        }
        let picture = Picture {
            base,
            host,
            part_of,
            origin: None,
        };
        if !picture.is_valid() {
            return Err(ConstructionError::NotAHomomorphism("part collapse".into()));
        }
        Ok(picture)
    }

    pub fn base(&self) -> &RnGraph {
        &self.base
    }

    pub fn host(&self) -> &RnGraph {
        &self.host
    }

    pub fn part_of(&self, x: VertexId) -> VertexId {
        self.part_of[x]
    }

    pub fn origin(&self, x: VertexId) -> Option<Origin> {
        self.origin.as_ref().map(|o| o[x])
    }

    pub fn part_map(&self) -> &[VertexId] {
        &self.part_of
    }

    /// Part over host vertex `i`, sorted by rank.
    pub fn part(&self, i: VertexId) -> Vec<VertexId> {
        let order = self.base.order();
        (0..order.len())
            .map(|pos| order.at(pos))
            .filter(|&x| self.part_of[x] == i)
            .collect()
    }

    /// Parts in host order.
    pub fn parts(&self) -> Vec<Vec<VertexId>> {
        let mut parts = vec![Vec::new(); self.host.vertex_count()];
        let order = self.base.order();
        for pos in 0..order.len() {
            let x = order.at(pos);
            parts[self.host.order().rank(self.part_of[x])].push(x);
        }
        parts
    }

    /// The part-collapsing map onto the host.
    pub fn homomorphism(&self) -> Homomorphism {
        Homomorphism::new(self.part_of.clone())
    }

    /// The collapse is a homomorphism and the parts are consecutive.
    pub fn is_valid(&self) -> bool {
        let order = self.base.order();
        let host_rank = |x: VertexId| self.host.order().rank(self.part_of[x]);
        self.homomorphism().is_homomorphism(&self.base, &self.host)
            && (1..order.len()).all(|pos| host_rank(order.at(pos - 1)) <= host_rank(order.at(pos)))
    }
}

/// Disjoint copies of `b`, one per copy of `b` in `host`, each vertex placed
/// on the part it occupies in the host.
pub fn build_picture_zero(host: &RnGraph, b: &RnGraph) -> Result<Picture, ConstructionError> {
    let copies = enumerate_copies(b, host);
    if copies.is_empty() {
        return Err(ConstructionError::NoCopiesOfB);
    }
    // ids: parts in host order, copy index inside a part
    let mut id = vec![vec![usize::MAX; b.vertex_count()]; copies.len()];
    let mut part_of = Vec::new();
    let mut origin = Vec::new();
    for pos in 0..host.vertex_count() {
        let i = host.order().at(pos);
        for (h, c) in copies.iter().enumerate() {
            if let Some(x) = c.map().iter().position(|&v| v == i) {
                id[h][x] = part_of.len();
                part_of.push(i);
                origin.push(Origin::BCopy(h));
            }
        }
    }
    let mut r = Relation::new();
    let mut nrel = Relation::new();
    for ids in &id {
        for (x, y) in b.r().iter() {
            r.insert(ids[x], ids[y]);
        }
        for (x, y) in b.n().iter() {
            nrel.insert(ids[x], ids[y]);
        }
    }
    let base = RnGraph::with_identity_order(part_of.len(), r, nrel)?;
    Ok(Picture {
        base,
        host: host.clone(),
        part_of,
        origin: Some(origin),
    })
}

/// The A-partite graph induced on the parts over a copy of `a` in the host,
/// together with the map from its vertices to picture vertices.
pub fn induced_subsystem(
    picture: &Picture,
    a: &RnGraph,
    a_copy: &Embedding,
) -> Result<(APartiteRnGraph, Vec<VertexId>), ConstructionError> {
    let wanted: BTreeSet<VertexId> = a_copy.image().iter().copied().collect();
    let vertices: Vec<VertexId> = (0..picture.base.vertex_count())
        .filter(|x| wanted.contains(&picture.part_of[*x]))
        .collect();
    let (graph, to_picture) = picture.base.induced(&vertices);
    let mut parts = vec![Vec::new(); a.vertex_count()];
    for (v, &x) in to_picture.iter().enumerate() {
        let t = a_copy.image().iter().position(|&i| i == picture.part_of[x]).unwrap();
        parts[t].push(v);
    }
    Ok((APartiteRnGraph::new(a, parts, graph)?, to_picture))
}

/// Result of one amalgamation step.
#[derive(Debug, Clone)]
pub struct Amalgamation {
    pub picture: Picture,
    /// For each glued copy, the map from old picture vertices to new ones.
    pub copy_maps: Vec<Vec<VertexId>>,
}

/// Glue one copy of `picture` along each partite copy `lifts[c]` of `e` in
/// `f`. `e_to_picture` maps vertices of `e` to picture vertices.
#[allow(clippy::too_many_arguments)]
pub fn amalgamate(
    picture: &Picture,
    a_copy: &Embedding,
    e: &APartiteRnGraph,
    e_to_picture: &[VertexId],
    f: &APartiteRnGraph,
    lifts: &[Embedding],
    limits: &ConstructionLimits,
    step: usize,
) -> Result<Amalgamation, ConstructionError> {
    let old_n = picture.base.vertex_count();
    let mut in_e = vec![None; old_n];
    for (v, &x) in e_to_picture.iter().enumerate() {
        in_e[x] = Some(v);
    }
    let shared: BTreeSet<VertexId> = lifts.iter().flat_map(|l| l.map().iter().copied()).collect();
    let fresh_per_copy = old_n - e.base().vertex_count();
    let projected = lifts
        .len()
        .checked_mul(fresh_per_copy)
        .and_then(|x| x.checked_add(shared.len()));
    match projected {
        Some(total) if total <= limits.max_vertices => {}
        _ => {
            return Err(ConstructionError::ResourceExceeded(format!(
                "step {step}: {} shared + {} x {} fresh vertices exceed {}",
                shared.len(),
                lifts.len(),
                fresh_per_copy,
                limits.max_vertices
            )))
        }
    }

    let host = &picture.host;
    let mut shared_id = vec![usize::MAX; f.base().vertex_count()];
    let mut fresh_id = vec![usize::MAX; old_n * lifts.len()];
    let mut part_of = Vec::new();
    let mut origin = Vec::new();
    let old_parts = picture.parts();
    for (pos, old_part) in old_parts.iter().enumerate() {
        let i = host.order().at(pos);
        if let Some(t) = a_copy.image().iter().position(|&v| v == i) {
            for &u in &f.parts()[t] {
                if shared.contains(&u) {
                    shared_id[u] = part_of.len();
                    part_of.push(i);
                    origin.push(Origin::Shared(u));
                }
            }
        } else {
            for &x in old_part {
                for c in 0..lifts.len() {
                    fresh_id[x * lifts.len() + c] = part_of.len();
                    part_of.push(i);
                    origin.push(Origin::Fresh { copy: c, source: x });
                }
            }
        }
    }

    let copy_maps: Vec<Vec<VertexId>> = lifts
        .iter()
        .enumerate()
        .map(|(c, lift)| {
            (0..old_n)
                .map(|x| match in_e[x] {
                    Some(v) => shared_id[lift.apply(v)],
                    None => fresh_id[x * lifts.len() + c],
                })
                .collect()
        })
        .collect();

    let mut r = Relation::new();
    let mut nrel = Relation::new();
    for map in &copy_maps {
        for (x, y) in picture.base.r().iter() {
            r.insert(map[x], map[y]);
        }
        for (x, y) in picture.base.n().iter() {
            nrel.insert(map[x], map[y]);
        }
    }
    let base = RnGraph::with_identity_order(part_of.len(), r, nrel).map_err(|err| ConstructionError::GlueConflict {
        step,
        detail: err.to_string(),
    })?;
    for (c, map) in copy_maps.iter().enumerate() {
        if !is_embedding(map, &picture.base, &base) {
            return Err(ConstructionError::GlueConflict {
                step,
                detail: format!("glued copy {c} is not induced"),
            });
        }
    }
    let next = Picture {
        base,
        host: host.clone(),
        part_of,
        origin: Some(origin),
    };
    if !next.is_valid() {
        return Err(ConstructionError::NotAHomomorphism(format!(
            "part collapse after step {step}"
        )));
    }
    for map in &copy_maps {
        if (0..old_n).any(|x| next.part_of[map[x]] != picture.part_of[x]) {
            return Err(ConstructionError::NotAHomomorphism(format!(
                "part collapse after step {step} does not restrict to the old one"
            )));
        }
    }
    Ok(Amalgamation {
        picture: next,
        copy_maps,
    })
}

/// Summary of one amalgamation step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepReport {
    pub step: usize,
    /// Image of the copy of `A` in the host handled by this step.
    pub a_copy: Vec<VertexId>,
    pub subsystem_vertices: usize,
    pub witness_vertices: usize,
    pub product_vertices: usize,
    pub glued_copies: usize,
    pub shared_vertices: usize,
    pub picture_vertices: usize,
    pub certification: Certification,
    pub ell_rn: bool,
}

/// The final picture of a partite construction run.
#[derive(Debug, Clone)]
pub struct ConstructionRun {
    pub picture: Picture,
    pub steps: Vec<StepReport>,
    pub certification: Certification,
}

/// Run the construction over `host` for `a` and `b`, checking after every step
/// that the picture is still `ell`-RN.
///
/// `on_step` sees each report as soon as the step finishes.
pub fn run_partite_construction(
    host: &RnGraph,
    a: &RnGraph,
    b: &RnGraph,
    ell: usize,
    oracle: &BaseOracle,
    limits: &ConstructionLimits,
    mut on_step: impl FnMut(&StepReport),
) -> Result<ConstructionRun, ConstructionError> {
    let mut picture = build_picture_zero(host, b)?;
    if !is_good(&picture.base) {
        return Err(ConstructionError::EllRnViolated { step: 0, ell });
    }
    let mut certification = Certification::Certified;
    let mut steps = Vec::new();
    let a_copies = enumerate_copies(a, host);
    for (j, a_copy) in a_copies.iter().enumerate() {
        let step = j + 1;
        let (e, e_to_picture) = induced_subsystem(&picture, a, a_copy)?;
        let product = product_construction(a, &e, oracle, limits.rule)?;
        let lifts = partite_embeddings_bounded(&e, product.f(), limits.max_copies)?;
        let shared: BTreeSet<VertexId> = lifts.iter().flat_map(|l| l.map().iter().copied()).collect();
        let was_ell_rn = is_ell_rn(&picture.base, ell);
        let glued = amalgamate(&picture, a_copy, &e, &e_to_picture, product.f(), &lifts, limits, step)?;
        let ell_rn = is_ell_rn(&glued.picture.base, ell);
        if was_ell_rn && !ell_rn {
            return Err(ConstructionError::EllRnViolated { step, ell });
        }
        certification = certification.and(product.certification().clone());
        let report = StepReport {
            step,
            a_copy: a_copy.image().to_vec(),
            subsystem_vertices: e.base().vertex_count(),
            witness_vertices: product.witness().vertex_count(),
            product_vertices: product.f().base().vertex_count(),
            glued_copies: lifts.len(),
            shared_vertices: shared.len(),
            picture_vertices: glued.picture.base.vertex_count(),
            certification: product.certification().clone(),
            ell_rn,
        };
        on_step(&report);
        steps.push(report);
        picture = glued.picture;
    }
    Ok(ConstructionRun {
        picture,
        steps,
        certification,
    })
}

/// One level `C_ℓ` of the tower.
#[derive(Debug, Clone)]
pub struct TowerStage {
    pub ell: usize,
    pub graph: RnGraph,
    /// Map to the previous stage; `None` for the first stage.
    pub down: Option<Homomorphism>,
    /// Composite map to the first stage.
    pub to_first: Homomorphism,
    pub certification: Certification,
    /// The previous stage was already `ell`-RN and was reused as is.
    pub carried_forward: bool,
    pub steps: Vec<StepReport>,
}

#[derive(Debug, Clone)]
pub struct Tower {
    pub stages: Vec<TowerStage>,
    /// Why the tower stops before the requested height, if it does.
    pub truncated: Option<String>,
}

impl Tower {
    pub fn top(&self) -> &TowerStage {
        self.stages.last().expect("a tower has at least one stage")
    }

    pub fn stage(&self, ell: usize) -> Option<&TowerStage> {
        self.stages.iter().find(|s| s.ell == ell)
    }

    /// `|X(C_2)|`, the height needed by [`finish`].
    pub fn lambda(&self) -> usize {
        self.stages[0].graph.vertex_count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerOptions {
    pub ell_max: usize,
    /// Reuse a stage that already has the next stage's RN property instead of
    /// running the construction on it.
    pub carry_forward: bool,
    pub limits: ConstructionLimits,
}

impl Default for TowerOptions {
    fn default() -> Self {
        TowerOptions {
            ell_max: 3,
            carry_forward: true,
            limits: ConstructionLimits::default(),
        }
    }
}

/// Build `C_2, ..., C_{ell_max}`. `oracle` supplies `C_2`; the construction
/// steps use `oracle` in search mode with the same limits. Stages failing on
/// limits or oracle bounds truncate the tower; invariant violations are errors.
pub fn build_tower(
    a: &RnGraph,
    b: &RnGraph,
    oracle: &BaseOracle,
    options: &TowerOptions,
    mut on_step: impl FnMut(usize, &StepReport),
) -> Result<Tower, ConstructionError> {
    let witness = oracle_ramsey(oracle, a, b)?;
    let first = witness.graph;
    let n = first.vertex_count();
    let mut stages = vec![TowerStage {
        ell: 2,
        graph: first,
        down: None,
        to_first: Homomorphism::identity(n),
        certification: witness.certification,
        carried_forward: false,
        steps: Vec::new(),
    }];
    let search = oracle.as_search();
    let mut truncated = None;
    for ell in 3..=options.ell_max {
        let prev = stages.last().unwrap();
        let stage = if options.carry_forward && is_ell_rn(&prev.graph, ell) {
            TowerStage {
                ell,
                graph: prev.graph.clone(),
                down: Some(Homomorphism::identity(prev.graph.vertex_count())),
                to_first: prev.to_first.clone(),
                certification: prev.certification.clone(),
                carried_forward: true,
                steps: Vec::new(),
            }
        } else {
            let run =
                match run_partite_construction(&prev.graph, a, b, ell, &search, &options.limits, |r| on_step(ell, r)) {
                    Ok(run) => run,
                    Err(err) if err.is_internal() => return Err(err),
                    Err(err) => {
                        truncated = Some(format!("stage {ell}: {err}"));
                        break;
                    }
                };
            let down = run.picture.homomorphism();
            TowerStage {
                ell,
                to_first: down.then(&prev.to_first),
                graph: run.picture.base,
                down: Some(down),
                certification: prev.certification.clone().and(run.certification),
                carried_forward: false,
                steps: run.steps,
            }
        };
        if !is_ell_rn(&stage.graph, ell) {
            return Err(ConstructionError::EllRnViolated { step: 0, ell });
        }
        if !stage.down.as_ref().unwrap().is_homomorphism(&stage.graph, &prev.graph) {
            return Err(ConstructionError::NotAHomomorphism(format!("map from stage {ell}")));
        }
        if !stage.to_first.is_homomorphism(&stage.graph, &stages[0].graph) {
            return Err(ConstructionError::NotAHomomorphism(format!(
                "composite map from stage {ell}"
            )));
        }
        stages.push(stage);
    }
    Ok(Tower { stages, truncated })
}

/// The poset obtained from the tower, with the copy-intactness report.
#[derive(Debug, Clone)]
pub struct Finished {
    pub poset: OrderedPoset,
    pub lambda: usize,
    /// Stage whose closure was taken.
    pub ell: usize,
    pub copies_of_b: usize,
    pub intact: usize,
    pub certification: Certification,
}

/// Take the transitive closure of `R` at stage `λ = |X(C_2)|`.
pub fn finish(tower: &Tower, b: &RnGraph) -> Result<Finished, ConstructionError> {
    let lambda = tower.lambda();
    let ell = lambda.max(2);
    let stage = tower.stage(ell).ok_or(ConstructionError::TowerTooShort {
        required: ell,
        reached: tower.top().ell,
    })?;
    let g = &stage.graph;
    let longest = longest_r_path_vertices(g);
    if longest > lambda {
        return Err(ConstructionError::PathTooLong {
            found: longest,
            bound: lambda,
        });
    }
    let closure = transitive_closure(g.r(), g.vertex_count())?;
    if let Some((x, y)) = g.n().iter().find(|&(x, y)| closure.contains(x, y)) {
        return Err(ConstructionError::ClosureIntersectsN(x, y));
    }
    let poset = OrderedPoset::new(g.vertex_count(), closure, g.order().as_slice().to_vec())?;
    let complete = poset.to_complete_rn();
    let copies = enumerate_copies(b, g);
    for copy in &copies {
        if !is_embedding(copy.map(), b, &complete) {
            return Err(ConstructionError::CopyNotIntact(copy.image().to_vec()));
        }
    }
    Ok(Finished {
        poset,
        lambda,
        ell,
        copies_of_b: copies.len(),
        intact: copies.len(),
        certification: stage.certification.clone(),
    })
}

/// A copy of `b` in `target` whose copies of `a` all share one colour.
pub fn extract_monochromatic_b(
    target: &RnGraph,
    coloring: &Coloring,
    a: &RnGraph,
    b: &RnGraph,
) -> Result<Embedding, ConstructionError> {
    find_monochromatic(target, coloring, b, a)?.ok_or(ConstructionError::NoneFound)
}

/// Copies of `b` in `target`, or `ResourceExceeded` past `limit`.
pub fn copies_bounded(b: &RnGraph, target: &RnGraph, limit: usize) -> Result<Vec<Embedding>, ConstructionError> {
    enumerate_copies_bounded(b, target, limit)
        .ok_or_else(|| ConstructionError::ResourceExceeded(format!("more than {limit} copies")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrow::{check_arrow, greedy_coloring, random_coloring, ArrowLimits, OracleLimits};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn chain(k: usize) -> RnGraph {
        OrderedPoset::chain(k).unwrap().to_complete_rn()
    }

    fn anti(k: usize) -> RnGraph {
        OrderedPoset::antichain(k).unwrap().to_complete_rn()
    }

    fn search() -> BaseOracle {
        BaseOracle::search(OracleLimits::default())
    }

    fn part_sizes(p: &Picture) -> Vec<usize> {
        p.parts().iter().map(Vec::len).collect()
    }

    #[test]
    fn picture_zero_of_chains() {
        let p = build_picture_zero(&chain(3), &chain(2)).unwrap();
        assert_eq!(p.base().vertex_count(), 6);
        assert_eq!(part_sizes(&p), vec![2, 2, 2]);
        assert_eq!(p.base().r().len(), 3);
        assert!(p.base().n().is_empty());
        assert!(p.is_valid());
        assert!(is_good(p.base()));
        // brute-force part sizes: how many copies contain each host vertex
        let copies = enumerate_copies(&chain(2), &chain(3));
        for i in 0..3 {
            let expect = copies.iter().filter(|c| c.image().contains(&i)).count();
            assert_eq!(p.part(i).len(), expect);
        }
    }

    #[test]
    fn picture_zero_of_antichains() {
        let p = build_picture_zero(&anti(3), &anti(2)).unwrap();
        assert_eq!(part_sizes(&p), vec![2, 2, 2]);
        assert!(p.base().r().is_empty());
        assert_eq!(p.base().n().len(), 3);
    }

    #[test]
    fn picture_zero_of_b_itself() {
        let b = chain(3);
        let p = build_picture_zero(&b, &b).unwrap();
        assert_eq!(p.base(), &b);
        assert_eq!(
            build_picture_zero(&chain(2), &chain(3)).unwrap_err(),
            ConstructionError::NoCopiesOfB
        );
    }

    #[test]
    fn induced_subsystems() {
        let p = build_picture_zero(&chain(3), &chain(2)).unwrap();
        let copies = enumerate_copies(&chain(2), &chain(3));
        let (e, map) = induced_subsystem(&p, &chain(2), &copies[2]).unwrap();
        assert_eq!(copies[2].image(), &[1, 2]);
        assert_eq!(e.parts().iter().map(Vec::len).collect::<Vec<_>>(), vec![2, 2]);
        assert_eq!(e.base().r().len(), 1);
        assert_eq!(map.len(), 4);
        let point = chain(1);
        let (e, _) = induced_subsystem(&p, &point, &enumerate_copies(&point, &chain(3))[0]).unwrap();
        assert_eq!(e.base().vertex_count(), 2);
        assert!(e.base().r().is_empty() && e.base().n().is_empty());
        let q = build_picture_zero(&chain(2), &chain(2)).unwrap();
        let (e, _) = induced_subsystem(&q, &chain(2), &enumerate_copies(&chain(2), &chain(2))[0]).unwrap();
        assert_eq!(e.base(), q.base());
    }

    #[test]
    fn single_lift_reproduces_the_picture() {
        let p = build_picture_zero(&chain(3), &chain(2)).unwrap();
        let a = chain(2);
        let a_copy = &enumerate_copies(&a, &chain(3))[0];
        let (e, map) = induced_subsystem(&p, &a, a_copy).unwrap();
        let f = e.clone();
        let lifts = vec![Embedding::from_map((0..f.base().vertex_count()).collect(), f.base())];
        let out = amalgamate(&p, a_copy, &e, &map, &f, &lifts, &ConstructionLimits::default(), 1).unwrap();
        assert_eq!(out.picture.base().vertex_count(), p.base().vertex_count());
        assert!(is_embedding(&out.copy_maps[0], p.base(), out.picture.base()));
    }

    #[test]
    fn disjoint_lifts_double_the_picture() {
        let point = chain(1);
        let p = build_picture_zero(&chain(2), &chain(2)).unwrap();
        let a_copy = &enumerate_copies(&point, &chain(2))[0];
        let (e, map) = induced_subsystem(&p, &point, a_copy).unwrap();
        let edgeless = RnGraph::with_identity_order(2, Relation::new(), Relation::new()).unwrap();
        let f = APartiteRnGraph::new(&point, vec![vec![0, 1]], edgeless).unwrap();
        let lifts = vec![
            Embedding::from_map(vec![0], f.base()),
            Embedding::from_map(vec![1], f.base()),
        ];
        let out = amalgamate(&p, a_copy, &e, &map, &f, &lifts, &ConstructionLimits::default(), 1).unwrap();
        assert_eq!(out.picture.base().vertex_count(), 4);
        assert_eq!(out.picture.base().r().len(), 2);
        let tight = ConstructionLimits {
            max_vertices: 3,
            ..ConstructionLimits::default()
        };
        assert!(matches!(
            amalgamate(&p, a_copy, &e, &map, &f, &lifts, &tight, 1),
            Err(ConstructionError::ResourceExceeded(_))
        ));
    }

    #[test]
    fn point_over_two_chain_first_steps() {
        // steps on the chain(3) host: 6 -> 15 -> 4169 vertices; stop before the third
        let host = chain(3);
        let point = chain(1);
        let b = chain(2);
        let mut picture = build_picture_zero(&host, &b).unwrap();
        let copies = enumerate_copies(&point, &host);
        let mut sizes = vec![picture.base().vertex_count()];
        for (j, a_copy) in copies.iter().take(2).enumerate() {
            let (e, map) = induced_subsystem(&picture, &point, a_copy).unwrap();
            let product = product_construction(&point, &e, &search(), NEdgeRule::MatchN).unwrap();
            let lifts = partite_embeddings_bounded(&e, product.f(), 10_000).unwrap();
            let shared: BTreeSet<_> = lifts.iter().flat_map(|l| l.map().to_vec()).collect();
            let out = amalgamate(
                &picture,
                a_copy,
                &e,
                &map,
                product.f(),
                &lifts,
                &ConstructionLimits::default(),
                j + 1,
            )
            .unwrap();
            let expect = shared.len() + lifts.len() * (picture.base().vertex_count() - e.base().vertex_count());
            assert_eq!(out.picture.base().vertex_count(), expect);
            for m in &out.copy_maps {
                assert!(is_embedding(m, picture.base(), out.picture.base()));
            }
            assert!(is_ell_rn(out.picture.base(), 3));
            picture = out.picture;
            sizes.push(picture.base().vertex_count());
        }
        assert_eq!(sizes, vec![6, 15, 4169]);
    }

    #[test]
    fn construction_with_no_copies_of_a() {
        let run = run_partite_construction(
            &anti(2),
            &chain(2),
            &anti(2),
            3,
            &search(),
            &ConstructionLimits::default(),
            |_| {},
        )
        .unwrap();
        assert!(run.steps.is_empty());
        assert_eq!(run.picture.base(), &anti(2));
    }

    #[test]
    fn two_chain_construction() {
        let run = run_partite_construction(
            &chain(2),
            &chain(2),
            &chain(2),
            3,
            &search(),
            &ConstructionLimits::default(),
            |_| {},
        )
        .unwrap();
        assert_eq!(run.steps.len(), 1);
        assert!(run.steps[0].ell_rn);
        assert!(run.certification.is_certified());
        assert_eq!(run.picture.base(), &chain(2));
    }

    #[test]
    fn tower_and_finish_for_point_and_two_chain() {
        let (a, b) = (chain(1), chain(2));
        let tower = build_tower(&a, &b, &search(), &TowerOptions::default(), |_, _| {}).unwrap();
        assert_eq!(tower.stages.len(), 2);
        assert_eq!(tower.stages[0].graph, chain(3));
        assert!(tower.stages[1].carried_forward);
        assert!(tower.truncated.is_none());
        assert_eq!(tower.lambda(), 3);
        let done = finish(&tower, &b).unwrap();
        assert_eq!(done.copies_of_b, 3);
        assert_eq!(done.intact, 3);
        let c = done.poset.to_complete_rn();
        assert!(check_arrow(&c, &b, &a, 2, &ArrowLimits::default()).unwrap().holds());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let col = random_coloring(&c, &a, 2, &mut rng);
            extract_monochromatic_b(&c, &col, &a, &b).unwrap();
        }
        let greedy = greedy_coloring(&c, &b, &a, 2, 1000).unwrap();
        extract_monochromatic_b(&c, &greedy, &a, &b).unwrap();
    }

    #[test]
    fn short_tower_cannot_finish() {
        let options = TowerOptions {
            ell_max: 2,
            ..TowerOptions::default()
        };
        let tower = build_tower(&chain(1), &chain(2), &search(), &options, |_, _| {}).unwrap();
        assert_eq!(tower.stages.len(), 1);
        assert_eq!(
            finish(&tower, &chain(2)).unwrap_err(),
            ConstructionError::TowerTooShort {
                required: 3,
                reached: 2
            }
        );
    }

    #[test]
    fn forced_construction_truncates_on_oracle_bounds() {
        let options = TowerOptions {
            carry_forward: false,
            ..TowerOptions::default()
        };
        let mut reports = Vec::new();
        let tower = build_tower(&chain(1), &chain(2), &search(), &options, |_, r| {
            reports.push(r.clone())
        })
        .unwrap();
        assert_eq!(tower.stages.len(), 1);
        assert!(tower.truncated.as_ref().unwrap().starts_with("stage 3"));
        assert_eq!(reports.len(), 2);
        assert!(reports.iter().all(|r| r.ell_rn));
    }

    #[test]
    fn constant_coloring_gives_first_copy() {
        let c = chain(3);
        let copies = enumerate_copies(&chain(1), &c);
        let col = Coloring::constant(&copies, 2, 0);
        let got = extract_monochromatic_b(&c, &col, &chain(1), &chain(2)).unwrap();
        assert_eq!(got.image(), &[0, 1]);
    }
}
