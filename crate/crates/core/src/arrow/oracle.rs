//! The base Ramsey oracle: produce an RN graph `F` with `F -> (E)^A_2`.
//!
//! Such witnesses always exist, but no general construction is attempted here. Instead the oracle either searches
//! small RN graphs exhaustively and certifies the first hit with
//! [`check_arrow`](super::check_arrow), or takes a witness from the caller.

use std::fmt;

use thiserror::Error;

use super::{check_arrow, ArrowError, ArrowLimits, ArrowVerdict};
use crate::embeddings::enumerate_copies;
use crate::structures::{OrderedStructure, Relation, RnGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OracleMode {
    /// Exhaustive search by increasing vertex count.
    Search,
    /// Caller-supplied witness, certified before use.
    File,
    /// Caller-supplied witness, used without certification.
    Assume,
}

impl fmt::Display for OracleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OracleMode::Search => "search",
            OracleMode::File => "file",
            OracleMode::Assume => "assume",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleLimits {
    /// Largest candidate vertex count tried in search mode.
    pub max_vertices: usize,
    /// Total number of candidates examined in search mode.
    pub max_candidates: u64,
    pub arrow: ArrowLimits,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_vertices: 12,
            max_candidates: 2_000_000,
            arrow: ArrowLimits::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BaseOracle {
    pub mode: OracleMode,
    pub witness: Option<RnGraph>,
    pub limits: OracleLimits,
}

impl BaseOracle {
    pub fn search(limits: OracleLimits) -> Self {
        BaseOracle {
            mode: OracleMode::Search,
            witness: None,
            limits,
        }
    }

    pub fn from_file(witness: RnGraph, limits: OracleLimits) -> Self {
        BaseOracle {
            mode: OracleMode::File,
            witness: Some(witness),
            limits,
        }
    }

    pub fn assume(witness: RnGraph, limits: OracleLimits) -> Self {
        BaseOracle {
            mode: OracleMode::Assume,
            witness: Some(witness),
            limits,
        }
    }

    /// A search-mode oracle with the same limits.
    pub fn as_search(&self) -> Self {
        BaseOracle::search(self.limits.clone())
    }
}

/// Whether a witness was verified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certification {
    Certified,
    /// Correct only if the stated assumption holds.
    Conditional(String),
}

impl Certification {
    pub fn is_certified(&self) -> bool {
        matches!(self, Certification::Certified)
    }

    /// Combine two flags; conditional wins.
    pub fn and(self, other: Certification) -> Certification {
        match (self, other) {
            (Certification::Certified, Certification::Certified) => Certification::Certified,
            (Certification::Conditional(a), Certification::Conditional(b)) if a == b => Certification::Conditional(a),
            (Certification::Conditional(a), Certification::Conditional(b)) => {
                Certification::Conditional(format!("{a}; {b}"))
            }
            (Certification::Conditional(a), _) | (_, Certification::Conditional(a)) => Certification::Conditional(a),
        }
    }
}

#[derive(Debug, Clone)]
pub struct OracleWitness {
    pub graph: RnGraph,
    pub certification: Certification,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("no witness with at most {max_vertices} vertices ({detail})")]
    NotFoundWithinBounds { max_vertices: usize, detail: String },
    #[error("supplied witness does not satisfy the arrow")]
    CertificationFailed,
    #[error("oracle mode {0} needs a supplied witness")]
    MissingWitness(OracleMode),
    #[error(transparent)]
    Arrow(#[from] ArrowError),
}

/// Return `F` with `F -> (e)^a_2`.
pub fn oracle_ramsey(oracle: &BaseOracle, a: &RnGraph, e: &RnGraph) -> Result<OracleWitness, OracleError> {
    match oracle.mode {
        OracleMode::Search => search(a, e, &oracle.limits),
        OracleMode::File => {
            let w = oracle
                .witness
                .as_ref()
                .ok_or(OracleError::MissingWitness(OracleMode::File))?;
            match check_arrow(w, e, a, 2, &oracle.limits.arrow) {
                Ok(ArrowVerdict::Holds) => Ok(OracleWitness {
                    graph: w.clone(),
                    certification: Certification::Certified,
                }),
                Ok(ArrowVerdict::Fails(_)) => Err(OracleError::CertificationFailed),
                Err(ArrowError::ResourceExceeded(why)) => Ok(OracleWitness {
                    graph: w.clone(),
                    certification: Certification::Conditional(format!("supplied witness not certified: {why}")),
                }),
                Err(other) => Err(other.into()),
            }
        }
        OracleMode::Assume => {
            let w = oracle
                .witness
                .as_ref()
                .ok_or(OracleError::MissingWitness(OracleMode::Assume))?;
            Ok(OracleWitness {
                graph: w.clone(),
                certification: Certification::Conditional("supplied witness assumed".into()),
            })
        }
    }
}

/// Smallest vertex count a witness can have.
///
/// Colour a copy of `a` by whether its least vertex sits among the first `k`
/// target positions. A monochromatic copy of `e` then needs the least vertices
/// of all its `a`-copies on one side of the threshold, which is impossible for
/// some `k` once the target is shorter than `|e| + t - s`, where `s` and `t`
/// are the first and last positions of `e` that start an `a`-copy. The same
/// argument on the reversed order uses the greatest vertices.
pub fn witness_lower_bound(a: &RnGraph, e: &RnGraph) -> usize {
    let m = e.vertex_count();
    let copies = enumerate_copies(a, e);
    if copies.is_empty() {
        return m;
    }
    let order = e.order();
    let firsts = copies.iter().map(|c| order.rank(c.image()[0]));
    let lasts = copies.iter().map(|c| order.rank(*c.image().last().unwrap()));
    let spread = |it: &mut dyn Iterator<Item = usize>| {
        let (lo, hi) = it.fold((usize::MAX, 0), |(lo, hi), r| (lo.min(r), hi.max(r)));
        hi - lo
    };
    m + spread(&mut firsts.into_iter()).max(spread(&mut lasts.into_iter()))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum PairValue {
    None,
    R,
    N,
}

/// Pair values ordered by how often they occur in `e`; ties favour no edge,
/// then R.
fn value_preference(e: &RnGraph) -> [PairValue; 3] {
    let n = e.vertex_count();
    let pairs = n * n.saturating_sub(1) / 2;
    let r = e.r().len();
    let nn = e.n().len();
    let mut prefs = [
        (pairs - r - nn, 0, PairValue::None),
        (r, 1, PairValue::R),
        (nn, 2, PairValue::N),
    ];
    prefs.sort_by_key(|&(count, tie, _)| (std::cmp::Reverse(count), tie));
    prefs.map(|(_, _, v)| v)
}

fn search(a: &RnGraph, e: &RnGraph, limits: &OracleLimits) -> Result<OracleWitness, OracleError> {
    let a_copies = enumerate_copies(a, e).len();
    if a_copies <= 1 {
        // every colouring of at most one copy is monochromatic
        return Ok(OracleWitness {
            graph: identity_ordered(e),
            certification: Certification::Certified,
        });
    }
    let lower = witness_lower_bound(a, e);
    if lower > limits.max_vertices {
        return Err(OracleError::NotFoundWithinBounds {
            max_vertices: limits.max_vertices,
            detail: format!("any witness needs at least {lower} vertices"),
        });
    }
    let prefs = value_preference(e);
    let mut examined: u64 = 0;
    for n in lower..=limits.max_vertices {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let mut digits = vec![0u8; pairs.len()];
        loop {
            examined += 1;
            if examined > limits.max_candidates {
                return Err(OracleError::NotFoundWithinBounds {
                    max_vertices: n,
                    detail: format!("candidate budget of {} exhausted", limits.max_candidates),
                });
            }
            let mut r = Relation::new();
            let mut nr = Relation::new();
            for (&(i, j), &d) in pairs.iter().zip(&digits) {
                match prefs[d as usize] {
                    PairValue::None => {}
                    PairValue::R => {
                        r.insert(i, j);
                    }
                    PairValue::N => {
                        nr.insert(i, j);
                    }
                }
            }
            let candidate = RnGraph::with_identity_order(n, r, nr).expect("forward disjoint pairs");
            if check_arrow(&candidate, e, a, 2, &limits.arrow)?.holds() {
                return Ok(OracleWitness {
                    graph: candidate,
                    certification: Certification::Certified,
                });
            }
            if !advance(&mut digits) {
                break;
            }
        }
    }
    Err(OracleError::NotFoundWithinBounds {
        max_vertices: limits.max_vertices,
        detail: format!("{examined} candidates examined"),
    })
}

/// Odometer step, last digit fastest. Returns false after the final state.
fn advance(digits: &mut [u8]) -> bool {
    for d in digits.iter_mut().rev() {
        if *d < 2 {
            *d += 1;
            return true;
        }
        *d = 0;
    }
    false
}

/// Relabel so that vertex ids follow the order.
fn identity_ordered(g: &RnGraph) -> RnGraph {
    if g.order().is_identity() {
        return g.clone();
    }
    let all: Vec<usize> = (0..g.vertex_count()).collect();
    g.induced(&all).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::OrderedPoset;

    fn complete_chain(k: usize) -> RnGraph {
        OrderedPoset::chain(k).unwrap().to_complete_rn()
    }

    #[test]
    fn point_over_two_chain_gives_three_chain() {
        let oracle = BaseOracle::search(OracleLimits::default());
        let w = oracle_ramsey(&oracle, &complete_chain(1), &complete_chain(2)).unwrap();
        assert_eq!(w.graph, complete_chain(3));
        assert!(w.certification.is_certified());
    }

    #[test]
    fn point_over_point_is_identity() {
        let oracle = BaseOracle::search(OracleLimits::default());
        let w = oracle_ramsey(&oracle, &complete_chain(1), &complete_chain(1)).unwrap();
        assert_eq!(w.graph, complete_chain(1));
    }

    #[test]
    fn edge_over_triangle_gives_six_chain() {
        let oracle = BaseOracle::search(OracleLimits::default());
        let w = oracle_ramsey(&oracle, &complete_chain(2), &complete_chain(3)).unwrap();
        assert_eq!(w.graph, complete_chain(6));
    }

    #[test]
    fn lower_bounds() {
        let point = complete_chain(1);
        let empty = RnGraph::with_identity_order(6, Relation::new(), Relation::new()).unwrap();
        assert_eq!(witness_lower_bound(&point, &empty), 11);
        assert_eq!(witness_lower_bound(&complete_chain(2), &complete_chain(3)), 4);
        assert_eq!(witness_lower_bound(&complete_chain(3), &complete_chain(2)), 2);
    }

    #[test]
    fn edgeless_target_is_found_at_the_bound() {
        let oracle = BaseOracle::search(OracleLimits::default());
        let empty = RnGraph::with_identity_order(3, Relation::new(), Relation::new()).unwrap();
        let w = oracle_ramsey(&oracle, &complete_chain(1), &empty).unwrap();
        assert_eq!(w.graph.vertex_count(), 5);
        assert!(w.graph.r().is_empty() && w.graph.n().is_empty());
    }

    #[test]
    fn out_of_bounds() {
        let limits = OracleLimits {
            max_vertices: 5,
            ..OracleLimits::default()
        };
        let oracle = BaseOracle::search(limits);
        assert!(matches!(
            oracle_ramsey(&oracle, &complete_chain(2), &complete_chain(3)),
            Err(OracleError::NotFoundWithinBounds { .. })
        ));
    }

    #[test]
    fn file_and_assume_modes() {
        let limits = OracleLimits::default();
        let good = BaseOracle::from_file(complete_chain(3), limits.clone());
        let w = oracle_ramsey(&good, &complete_chain(1), &complete_chain(2)).unwrap();
        assert!(w.certification.is_certified());

        let bad = BaseOracle::from_file(complete_chain(2), limits.clone());
        assert_eq!(
            oracle_ramsey(&bad, &complete_chain(1), &complete_chain(2)).unwrap_err(),
            OracleError::CertificationFailed
        );

        let assumed = BaseOracle::assume(complete_chain(2), limits.clone());
        let w = oracle_ramsey(&assumed, &complete_chain(1), &complete_chain(2)).unwrap();
        assert!(!w.certification.is_certified());

        let mut missing = BaseOracle::search(limits);
        missing.mode = OracleMode::File;
        assert_eq!(
            oracle_ramsey(&missing, &complete_chain(1), &complete_chain(2)).unwrap_err(),
            OracleError::MissingWitness(OracleMode::File)
        );
    }

    #[test]
    fn file_mode_with_exhausted_budget_is_conditional() {
        let limits = OracleLimits {
            arrow: ArrowLimits {
                max_nodes: 1,
                samples: 0,
                ..ArrowLimits::default()
            },
            ..OracleLimits::default()
        };
        let oracle = BaseOracle::from_file(complete_chain(6), limits);
        let w = oracle_ramsey(&oracle, &complete_chain(2), &complete_chain(3)).unwrap();
        assert!(matches!(w.certification, Certification::Conditional(_)));
    }
}
