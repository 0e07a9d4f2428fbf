//! Partition arrows `target -> (Q)^P_r`.
//!
//! The copies of `P` in `target` are the points of a hypergraph whose edges
//! are the sets of `P`-copies inside each copy of `Q`. The arrow holds exactly
//! when that hypergraph has no proper `r`-colouring (one without a
//! monochromatic edge). Deciding that is an exact backtracking search.

mod oracle;

use std::collections::{BTreeMap, HashMap};
use std::ops::ControlFlow;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::embeddings::{enumerate_copies, enumerate_copies_bounded, visit_copies, Embedding};
use crate::structures::{OrderedStructure, VertexId};

pub use oracle::{oracle_ramsey, BaseOracle, Certification, OracleError, OracleLimits, OracleMode, OracleWitness};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArrowError {
    #[error("resource limit exceeded: {0}")]
    ResourceExceeded(String),
    #[error("colouring has no colour for copy {0:?}")]
    IncompleteColoring(Vec<VertexId>),
    #[error("number of colours must be at least 1")]
    NoColors,
}

/// Search budget for [`check_arrow`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrowLimits {
    /// Colour assignments tried by the backtracking search.
    pub max_nodes: u64,
    /// Upper bound on the number of copies of `P` and of `Q` in the target.
    pub max_copies: usize,
    /// Random colourings tried before the exact search.
    pub samples: usize,
    pub seed: u64,
    pub max_duration: Option<Duration>,
}

impl Default for ArrowLimits {
    fn default() -> Self {
        ArrowLimits {
            max_nodes: 50_000_000,
            max_copies: 200_000,
            samples: 32,
            seed: 0,
            max_duration: None,
        }
    }
}

/// An assignment of colours `0..colors` to copies, keyed by copy image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    colors: usize,
    assignment: BTreeMap<Vec<VertexId>, usize>,
}

impl Coloring {
    pub fn new(colors: usize) -> Self {
        Coloring {
            colors,
            assignment: BTreeMap::new(),
        }
    }

    pub fn colors(&self) -> usize {
        self.colors
    }

    pub fn set(&mut self, image: Vec<VertexId>, color: usize) {
        assert!(color < self.colors, "colour {color} out of range");
        self.assignment.insert(image, color);
    }

    pub fn get(&self, image: &[VertexId]) -> Option<usize> {
        self.assignment.get(image).copied()
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// Entries sorted by image.
    pub fn iter(&self) -> impl Iterator<Item = (&[VertexId], usize)> + '_ {
        self.assignment.iter().map(|(k, &c)| (k.as_slice(), c))
    }

    /// Every copy gets colour `color`.
    pub fn constant(copies: &[Embedding], colors: usize, color: usize) -> Self {
        let mut c = Coloring::new(colors);
        for e in copies {
            c.set(e.image().to_vec(), color);
        }
        c
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArrowVerdict {
    Holds,
    /// A colouring without monochromatic copy of `Q`.
    Fails(Coloring),
}

impl ArrowVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, ArrowVerdict::Holds)
    }

    pub fn counterexample(&self) -> Option<&Coloring> {
        match self {
            ArrowVerdict::Holds => None,
            ArrowVerdict::Fails(c) => Some(c),
        }
    }
}

/// The copies of `P` (points) and, for each copy of `Q`, the indices of the
/// `P`-copies it contains (edges).
#[derive(Debug, Clone)]
pub struct CopyHypergraph {
    points: Vec<Embedding>,
    edges: Vec<Vec<usize>>,
}

impl CopyHypergraph {
    pub fn build<S: OrderedStructure>(target: &S, q: &S, p: &S, max_copies: usize) -> Result<Self, ArrowError> {
        let points = enumerate_copies_bounded(p, target, max_copies)
            .ok_or_else(|| ArrowError::ResourceExceeded(format!("more than {max_copies} copies of P")))?;
        let index: HashMap<&[VertexId], usize> = points.iter().enumerate().map(|(i, e)| (e.image(), i)).collect();
        let p_in_q = enumerate_copies(p, q);
        let mut edges = Vec::new();
        let mut overflow = false;
        let _ = visit_copies(q, target, |qc| {
            if edges.len() == max_copies {
                overflow = true;
                return ControlFlow::Break(());
            }
            let mut edge: Vec<usize> = p_in_q
                .iter()
                .map(|pc| {
                    let image: Vec<VertexId> = pc.image().iter().map(|&v| qc.apply(v)).collect();
                    index[image.as_slice()]
                })
                .collect();
            edge.sort_unstable();
            edges.push(edge);
            ControlFlow::Continue(())
        });
        if overflow {
            return Err(ArrowError::ResourceExceeded(format!(
                "more than {max_copies} copies of Q"
            )));
        }
        Ok(CopyHypergraph { points, edges })
    }

    /// Assemble from explicit points and edges (indices into `points`).
    pub fn from_parts(points: Vec<Embedding>, edges: Vec<Vec<usize>>) -> Self {
        CopyHypergraph { points, edges }
    }

    pub fn points(&self) -> &[Embedding] {
        &self.points
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    fn to_coloring(&self, colors: usize, assignment: &[usize]) -> Coloring {
        let mut c = Coloring::new(colors);
        for (e, &col) in self.points.iter().zip(assignment) {
            c.set(e.image().to_vec(), col);
        }
        c
    }

    fn has_monochromatic_edge(&self, assignment: &[usize]) -> bool {
        self.edges.iter().any(|edge| match edge.split_first() {
            None => true,
            Some((&first, rest)) => rest.iter().all(|&v| assignment[v] == assignment[first]),
        })
    }
}

/// Decide `target -> (q)^p_colors` exactly.
pub fn check_arrow<S: OrderedStructure>(
    target: &S,
    q: &S,
    p: &S,
    colors: usize,
    limits: &ArrowLimits,
) -> Result<ArrowVerdict, ArrowError> {
    if colors == 0 {
        return Err(ArrowError::NoColors);
    }
    let h = CopyHypergraph::build(target, q, p, limits.max_copies)?;
    decide(&h, colors, limits)
}

/// Decide whether the hypergraph has a proper colouring.
pub fn decide(h: &CopyHypergraph, colors: usize, limits: &ArrowLimits) -> Result<ArrowVerdict, ArrowError> {
    // a copy of Q with at most one P-copy is monochromatic under every colouring
    if h.edges.iter().any(|e| e.len() <= 1) {
        return Ok(ArrowVerdict::Holds);
    }
    let npoints = h.points.len();
    if h.edges.is_empty() {
        return Ok(ArrowVerdict::Fails(h.to_coloring(colors, &vec![0; npoints])));
    }
    if colors == 1 {
        // edges all have two or more points and every point has colour 0
        return Ok(ArrowVerdict::Holds);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(limits.seed);
    let mut sample = vec![0usize; npoints];
    for _ in 0..limits.samples {
        for slot in sample.iter_mut() {
            *slot = rng.random_range(0..colors);
        }
        if !h.has_monochromatic_edge(&sample) {
            return Ok(ArrowVerdict::Fails(h.to_coloring(colors, &sample)));
        }
    }

    let mut solver = Solver::new(h, colors, limits);
    match solver.search(0, 0)? {
        true => Ok(ArrowVerdict::Fails(h.to_coloring(colors, &solver.color))),
        false => Ok(ArrowVerdict::Holds),
    }
}

const UNSET: usize = usize::MAX;

/// Backtracking search for a proper colouring with forward checking.
struct Solver<'a> {
    h: &'a CopyHypergraph,
    colors: usize,
    incident: Vec<Vec<usize>>,
    color: Vec<usize>,
    // per edge and colour: number of points with that colour
    edge_counts: Vec<u32>,
    edge_colored: Vec<u32>,
    // per point and colour: number of reasons the colour is ruled out
    forbidden: Vec<u32>,
    nodes: u64,
    max_nodes: u64,
    deadline: Option<Instant>,
}

impl<'a> Solver<'a> {
    fn new(h: &'a CopyHypergraph, colors: usize, limits: &ArrowLimits) -> Self {
        let npoints = h.points.len();
        let mut incident = vec![Vec::new(); npoints];
        for (e, edge) in h.edges.iter().enumerate() {
            for &v in edge {
                incident[v].push(e);
            }
        }
        Solver {
            h,
            colors,
            incident,
            color: vec![UNSET; npoints],
            edge_counts: vec![0; h.edges.len() * colors],
            edge_colored: vec![0; h.edges.len()],
            forbidden: vec![0; npoints * colors],
            nodes: 0,
            max_nodes: limits.max_nodes,
            deadline: limits.max_duration.map(|d| Instant::now() + d),
        }
    }

    /// Colours points `v..` given that colours `0..used` are in use.
    fn search(&mut self, v: usize, used: usize) -> Result<bool, ArrowError> {
        if v == self.color.len() {
            return Ok(true);
        }
        // colours beyond the first unused one are symmetric to it
        let top = (used + 1).min(self.colors);
        for c in 0..top {
            if self.forbidden[v * self.colors + c] > 0 {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.max_nodes {
                return Err(ArrowError::ResourceExceeded(format!(
                    "more than {} search nodes",
                    self.max_nodes
                )));
            }
            if self.nodes.is_multiple_of(4096) {
                if let Some(deadline) = self.deadline {
                    if Instant::now() > deadline {
                        return Err(ArrowError::ResourceExceeded("time bound".into()));
                    }
                }
            }
            let mut trail = Vec::new();
            let ok = self.assign(v, c, &mut trail);
            if ok && self.search(v + 1, used.max(c + 1))? {
                return Ok(true);
            }
            self.unassign(v, c, &trail);
        }
        Ok(false)
    }

    fn assign(&mut self, v: usize, c: usize, trail: &mut Vec<(usize, usize)>) -> bool {
        self.color[v] = c;
        let mut ok = true;
        for i in 0..self.incident[v].len() {
            let e = self.incident[v][i];
            let size = self.h.edges[e].len() as u32;
            self.edge_counts[e * self.colors + c] += 1;
            self.edge_colored[e] += 1;
            let same = self.edge_counts[e * self.colors + c];
            if same == size {
                ok = false;
            } else if self.edge_colored[e] == size - 1 && same == size - 1 {
                // the last free point of this edge must avoid colour c
                let u = *self.h.edges[e]
                    .iter()
                    .find(|&&u| self.color[u] == UNSET)
                    .expect("one point is uncoloured");
                self.forbidden[u * self.colors + c] += 1;
                trail.push((u, c));
                if (0..self.colors).all(|k| self.forbidden[u * self.colors + k] > 0) {
                    ok = false;
                }
            }
        }
        ok
    }

    fn unassign(&mut self, v: usize, c: usize, trail: &[(usize, usize)]) {
        for &(u, k) in trail {
            self.forbidden[u * self.colors + k] -= 1;
        }
        for &e in &self.incident[v] {
            self.edge_counts[e * self.colors + c] -= 1;
            self.edge_colored[e] -= 1;
        }
        self.color[v] = UNSET;
    }
}

/// First copy of `q` (in enumeration order) whose `p`-copies all share one
/// colour under `coloring`.
pub fn find_monochromatic<S: OrderedStructure>(
    target: &S,
    coloring: &Coloring,
    q: &S,
    p: &S,
) -> Result<Option<Embedding>, ArrowError> {
    let p_in_q = enumerate_copies(p, q);
    let mut found = None;
    let mut missing = None;
    let _ = visit_copies(q, target, |qc| {
        let mut first = None;
        let mut mono = true;
        for pc in &p_in_q {
            let image: Vec<VertexId> = pc.image().iter().map(|&v| qc.apply(v)).collect();
            let Some(col) = coloring.get(&image) else {
                missing = Some(image);
                return ControlFlow::Break(());
            };
            match first {
                None => first = Some(col),
                Some(f) if f != col => {
                    mono = false;
                    break;
                }
                Some(_) => {}
            }
        }
        if mono {
            found = Some(qc.clone());
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    if let Some(image) = missing {
        return Err(ArrowError::IncompleteColoring(image));
    }
    Ok(found)
}

/// Uniformly random colouring of the copies of `p` in `target`.
pub fn random_coloring<S: OrderedStructure, R: Rng>(target: &S, p: &S, colors: usize, rng: &mut R) -> Coloring {
    let mut c = Coloring::new(colors);
    for e in enumerate_copies(p, target) {
        c.set(e.image().to_vec(), rng.random_range(0..colors));
    }
    c
}

/// Greedy adversary: colours the copies of `p` one at a time, each time
/// choosing the colour that completes the fewest monochromatic copies of `q`
/// and, among those, keeps the fewest copies monochromatic so far.
pub fn greedy_coloring<S: OrderedStructure>(
    target: &S,
    q: &S,
    p: &S,
    colors: usize,
    max_copies: usize,
) -> Result<Coloring, ArrowError> {
    let h = CopyHypergraph::build(target, q, p, max_copies)?;
    let npoints = h.points.len();
    let mut incident = vec![Vec::new(); npoints];
    for (e, edge) in h.edges.iter().enumerate() {
        for &v in edge {
            incident[v].push(e);
        }
    }
    let mut counts = vec![0usize; h.edges.len() * colors];
    let mut colored = vec![0usize; h.edges.len()];
    let mut assignment = vec![0usize; npoints];
    for v in 0..npoints {
        let mut best = (usize::MAX, usize::MAX, 0);
        for c in 0..colors {
            let mut completes = 0;
            let mut partial = 0;
            for &e in &incident[v] {
                let size = h.edges[e].len();
                if counts[e * colors + c] == colored[e] {
                    if colored[e] + 1 == size {
                        completes += 1;
                    } else {
                        partial += 1;
                    }
                }
            }
            if (completes, partial) < (best.0, best.1) {
                best = (completes, partial, c);
            }
        }
        let c = best.2;
        assignment[v] = c;
        for &e in &incident[v] {
            counts[e * colors + c] += 1;
            colored[e] += 1;
        }
    }
    Ok(h.to_coloring(colors, &assignment))
}
