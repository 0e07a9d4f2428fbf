//! Seeded generators for test corpora. Callers pass the RNG; nothing here
//! draws from ambient entropy.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::analysis::transitive_closure;
use crate::partite::APartiteRnGraph;
use crate::structures::{OrderedPoset, OrderedStructure, Relation, RnGraph};

/// Random RN graph on `n` vertices with a shuffled order. Each forward pair is
/// an R-edge with probability `p_r`, otherwise an N-edge with probability
/// `p_n`.
pub fn random_rn_graph<G: Rng>(n: usize, p_r: f64, p_n: f64, rng: &mut G) -> RnGraph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut r = Relation::new();
    let mut nrel = Relation::new();
    for i in 0..n {
        for j in i + 1..n {
            let (x, y) = (order[i], order[j]);
            if rng.random_bool(p_r) {
                r.insert(x, y);
            } else if rng.random_bool(p_n) {
                nrel.insert(x, y);
            }
        }
    }
    RnGraph::new(n, r, nrel, order).expect("forward disjoint relations")
}

/// Random ordered poset: the closure of a random forward relation, under a
/// shuffled order.
pub fn random_poset<G: Rng>(n: usize, density: f64, rng: &mut G) -> OrderedPoset {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut r = Relation::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(density) {
                r.insert(order[i], order[j]);
            }
        }
    }
    let closure = transitive_closure(&r, n).expect("forward relations are acyclic");
    OrderedPoset::new(n, closure, order).expect("closure of a forward relation")
}

/// Random A-partite graph with between 0 and `max_part` vertices per part.
/// Each pair over an R-edge (N-edge) of `a` becomes an R-edge (N-edge) with
/// probability `p_edge`.
pub fn random_apartite<G: Rng>(a: &RnGraph, max_part: usize, p_edge: f64, rng: &mut G) -> APartiteRnGraph {
    let p = a.vertex_count();
    let mut parts = Vec::with_capacity(p);
    let mut next = 0;
    for _ in 0..p {
        let size = rng.random_range(0..=max_part);
        parts.push((next..next + size).collect::<Vec<_>>());
        next += size;
    }
    let mut r = Relation::new();
    let mut nrel = Relation::new();
    for s in 0..p {
        for t in s + 1..p {
            let (vs, vt) = (a.order().at(s), a.order().at(t));
            let (to_r, to_n) = (a.has_r(vs, vt), a.has_n(vs, vt));
            for &x in &parts[s] {
                for &y in &parts[t] {
                    if rng.random_bool(p_edge) {
                        if to_r {
                            r.insert(x, y);
                        } else if to_n {
                            nrel.insert(x, y);
                        }
                    }
                }
            }
        }
    }
    let base = RnGraph::with_identity_order(next, r, nrel).expect("edges follow the parts");
    APartiteRnGraph::new(a, parts, base).expect("edges project onto A")
}
