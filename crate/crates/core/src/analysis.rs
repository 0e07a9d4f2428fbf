//! Bad quasicycles, the ℓ-RN and goodness predicates, transitive closure and
//! longest R-paths.

use std::collections::VecDeque;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::structures::{OrderedStructure, Relation, RnGraph, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("relation has a directed cycle through vertex {0}")]
    CycleDetected(VertexId),
}

/// An R-path `x_1 .. x_j` whose endpoints form an N-edge `(x_1, x_j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasicyclePath {
    vertices: Vec<VertexId>,
}

impl QuasicyclePath {
    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    /// Number of vertices on the path.
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Re-check the defining conditions against `g`.
    pub fn is_valid_in(&self, g: &RnGraph) -> bool {
        self.vertices.len() >= 2
            && self.vertices.windows(2).all(|w| g.has_r(w[0], w[1]))
            && g.has_n(self.vertices[0], *self.vertices.last().unwrap())
    }
}

/// Shortest bad quasicycle with at most `max_len` vertices (`None` = no bound).
///
/// Ties are broken towards the lexicographically least vertex sequence.
pub fn find_bad_quasicycle(g: &RnGraph, max_len: Option<usize>) -> Option<QuasicyclePath> {
    let n = g.vertex_count();
    let max_edges = max_len.map(|l| l.saturating_sub(1)).unwrap_or(usize::MAX);
    if max_edges == 0 {
        return None;
    }
    let mut best: Option<(usize, VertexId, VertexId)> = None;
    let mut dist = vec![usize::MAX; n];
    let mut touched = Vec::new();
    let mut queue = VecDeque::new();
    for source in 0..n {
        if g.n_successors(source).is_empty() {
            continue;
        }
        // later sources can only win with a strictly shorter path
        let limit = match best {
            Some((len, _, _)) => max_edges.min(len - 1),
            None => max_edges,
        };
        for &v in &touched {
            dist[v] = usize::MAX;
        }
        touched.clear();
        dist[source] = 0;
        touched.push(source);
        queue.clear();
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            if dist[u] >= limit {
                continue;
            }
            for &w in g.r_successors(u) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    touched.push(w);
                    queue.push_back(w);
                }
            }
        }
        for &target in g.n_successors(source) {
            let d = dist[target];
            if d == usize::MAX || d > limit {
                continue;
            }
            let candidate = (d, source, target);
            let better = match best {
                None => true,
                Some((bd, bs, bt)) => {
                    d < bd || (d == bd && lexicographically_smaller(g, (source, target), (bs, bt), d))
                }
            };
            if better {
                best = Some(candidate);
            }
        }
    }
    best.map(|(d, s, t)| QuasicyclePath {
        vertices: least_path(g, s, t, d),
    })
}

fn lexicographically_smaller(g: &RnGraph, a: (VertexId, VertexId), b: (VertexId, VertexId), edges: usize) -> bool {
    if a.0 != b.0 {
        return a.0 < b.0;
    }
    least_path(g, a.0, a.1, edges) < least_path(g, b.0, b.1, edges)
}

/// Lexicographically least R-path from `s` to `t` with exactly `edges` edges.
fn least_path(g: &RnGraph, s: VertexId, t: VertexId, edges: usize) -> Vec<VertexId> {
    // backwards BFS from t gives the distance-to-target of every vertex
    let n = g.vertex_count();
    let mut preds = vec![Vec::new(); n];
    for (x, y) in g.r().iter() {
        preds[y].push(x);
    }
    let mut to_t = vec![usize::MAX; n];
    to_t[t] = 0;
    let mut queue = VecDeque::from([t]);
    while let Some(u) = queue.pop_front() {
        for &p in &preds[u] {
            if to_t[p] == usize::MAX {
                to_t[p] = to_t[u] + 1;
                queue.push_back(p);
            }
        }
    }
    let mut path = vec![s];
    let mut cur = s;
    for step in (0..edges).rev() {
        cur = g
            .r_successors(cur)
            .iter()
            .copied()
            .filter(|&w| to_t[w] == step)
            .min()
            .expect("a shortest path exists by construction");
        path.push(cur);
    }
    path
}

/// No bad quasicycle with `2..=ell` vertices.
pub fn is_ell_rn(g: &RnGraph, ell: usize) -> bool {
    find_bad_quasicycle(g, Some(ell)).is_none()
}

/// The largest ℓ for which `g` is ℓ-RN, or `None` when `g` is good.
pub fn ell_rn_max(g: &RnGraph) -> Option<usize> {
    find_bad_quasicycle(g, None).map(|q| q.len() - 1)
}

/// Reachability sets over R, computed in reverse linear order.
fn r_reachability(g: &RnGraph) -> Vec<FixedBitSet> {
    let n = g.vertex_count();
    let order = g.order();
    let mut reach = vec![FixedBitSet::with_capacity(n); n];
    for pos in (0..n).rev() {
        let v = order.at(pos);
        let mut set = FixedBitSet::with_capacity(n);
        for &w in g.r_successors(v) {
            set.insert(w);
            set.union_with(&reach[w]);
        }
        reach[v] = set;
    }
    reach
}

/// No bad quasicycle of any length, decided as `closure(R) ∩ N = ∅`.
pub fn is_good(g: &RnGraph) -> bool {
    let reach = r_reachability(g);
    g.n().iter().all(|(x, y)| !reach[x].contains(y))
}

/// Transitive closure of the R relation of `g`.
pub fn r_closure(g: &RnGraph) -> Relation {
    let reach = r_reachability(g);
    reach
        .iter()
        .enumerate()
        .flat_map(|(x, set)| set.ones().map(move |y| (x, y)))
        .collect()
}

/// Transitive closure of an arbitrary relation on `0..n`.
pub fn transitive_closure(rel: &Relation, n: usize) -> Result<Relation, AnalysisError> {
    let mut succ = vec![Vec::new(); n];
    let mut indeg = vec![0usize; n];
    for (x, y) in rel.iter() {
        if x == y {
            return Err(AnalysisError::CycleDetected(x));
        }
        succ[x].push(y);
        indeg[y] += 1;
    }
    // Kahn's algorithm, smallest id first
    let mut ready: std::collections::BTreeSet<VertexId> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut topo = Vec::with_capacity(n);
    while let Some(v) = ready.pop_first() {
        topo.push(v);
        for &w in &succ[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                ready.insert(w);
            }
        }
    }
    if topo.len() < n {
        let stuck = (0..n).find(|&v| indeg[v] > 0).unwrap();
        return Err(AnalysisError::CycleDetected(stuck));
    }
    let mut reach = vec![FixedBitSet::with_capacity(n); n];
    for &v in topo.iter().rev() {
        let mut set = FixedBitSet::with_capacity(n);
        for &w in &succ[v] {
            set.insert(w);
            set.union_with(&reach[w]);
        }
        reach[v] = set;
    }
    Ok(reach
        .iter()
        .enumerate()
        .flat_map(|(x, set)| set.ones().map(move |y| (x, y)))
        .collect())
}

/// Maximum number of vertices on a directed R-path.
pub fn longest_r_path_vertices(g: &RnGraph) -> usize {
    let n = g.vertex_count();
    let order = g.order();
    let mut longest = vec![1usize; n];
    for pos in (0..n).rev() {
        let v = order.at(pos);
        longest[v] = 1 + g.r_successors(v).iter().map(|&w| longest[w]).max().unwrap_or(0);
    }
    longest.into_iter().max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::{Homomorphism, OrderedPoset};

    fn rn(n: usize, r: &[(usize, usize)], nr: &[(usize, usize)]) -> RnGraph {
        RnGraph::with_identity_order(n, r.iter().copied().collect(), nr.iter().copied().collect()).unwrap()
    }

    #[test]
    fn bad_triangle() {
        let g = rn(3, &[(0, 1), (1, 2)], &[(0, 2)]);
        let q = find_bad_quasicycle(&g, None).unwrap();
        assert_eq!(q.vertices(), &[0, 1, 2]);
        assert!(q.is_valid_in(&g));
        assert!(is_ell_rn(&g, 2));
        assert!(!is_ell_rn(&g, 3));
        assert!(!is_good(&g));
        assert_eq!(ell_rn_max(&g), Some(2));
    }

    #[test]
    fn posets_are_good() {
        for p in [
            OrderedPoset::chain(4).unwrap(),
            OrderedPoset::antichain(4).unwrap(),
            OrderedPoset::new(3, [(0, 2), (1, 2)].into_iter().collect(), vec![0, 1, 2]).unwrap(),
        ] {
            let g = p.to_complete_rn();
            assert!(find_bad_quasicycle(&g, None).is_none());
            assert!(is_good(&g));
            assert!(is_ell_rn(&g, 10));
        }
    }

    #[test]
    fn unreachable_n_target() {
        let g = rn(4, &[(0, 1), (1, 2), (0, 2)], &[(0, 3)]);
        assert!(find_bad_quasicycle(&g, None).is_none());
    }

    #[test]
    fn good_graph_with_disjoint_closure() {
        let g = rn(3, &[(0, 1)], &[(1, 2)]);
        assert!(is_good(&g));
    }

    #[test]
    fn shortest_then_lexicographic() {
        // N-edge (0,4) closes 0-1-4, 0-2-4 and 0-3-4
        let g = rn(5, &[(0, 2), (0, 1), (1, 4), (2, 4), (0, 3), (3, 4)], &[(0, 4)]);
        assert_eq!(find_bad_quasicycle(&g, None).unwrap().vertices(), &[0, 1, 4]);
        // a length-4 cycle only becomes visible with a large enough bound
        let h = rn(4, &[(0, 1), (1, 2), (2, 3)], &[(0, 3)]);
        assert!(find_bad_quasicycle(&h, Some(3)).is_none());
        assert_eq!(find_bad_quasicycle(&h, Some(4)).unwrap().vertices(), &[0, 1, 2, 3]);
    }

    #[test]
    fn closure_examples() {
        let rel: Relation = [(0, 1), (1, 2)].into_iter().collect();
        let expected: Relation = [(0, 1), (1, 2), (0, 2)].into_iter().collect();
        assert_eq!(transitive_closure(&rel, 3).unwrap(), expected);
        assert!(transitive_closure(&Relation::new(), 3).unwrap().is_empty());
        let cyc: Relation = [(0, 1), (1, 0)].into_iter().collect();
        assert!(matches!(
            transitive_closure(&cyc, 2),
            Err(AnalysisError::CycleDetected(_))
        ));
    }

    #[test]
    fn closure_of_path_matches_reachability_oracle() {
        let rel: Relation = [(0, 1), (1, 2), (2, 3)].into_iter().collect();
        // Floyd–Warshall oracle
        let n = 4;
        let mut m = vec![vec![false; n]; n];
        for (x, y) in rel.iter() {
            m[x][y] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if m[i][k] && m[k][j] {
                        m[i][j] = true;
                    }
                }
            }
        }
        let oracle: Relation = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| m[i][j])
            .collect();
        let closed = transitive_closure(&rel, n).unwrap();
        assert_eq!(closed, oracle);
        assert_eq!(closed.len(), 6);
        let g = rn(4, &[(0, 1), (1, 2), (2, 3)], &[]);
        assert_eq!(r_closure(&g), oracle);
    }

    #[test]
    fn longest_paths() {
        assert_eq!(longest_r_path_vertices(&rn(3, &[], &[])), 1);
        assert_eq!(
            longest_r_path_vertices(&OrderedPoset::chain(4).unwrap().to_complete_rn()),
            4
        );
        assert_eq!(longest_r_path_vertices(&rn(4, &[(0, 1), (0, 2), (2, 3)], &[])), 3);
        assert_eq!(longest_r_path_vertices(&rn(0, &[], &[])), 0);
    }

    #[test]
    fn homomorphism_edge_mapped_to_non_edge() {
        let src = rn(2, &[(0, 1)], &[]);
        let tgt = rn(2, &[], &[(0, 1)]);
        assert!(!Homomorphism::identity(2).is_homomorphism(&src, &tgt));
        assert!(Homomorphism::identity(2).is_homomorphism(&src, &src));
    }
}
