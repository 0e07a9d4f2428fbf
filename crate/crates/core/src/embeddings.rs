//! Enumeration of embeddings (copies) of one ordered structure in another.
//!
//! A linear order makes embeddings rigid: a copy is determined by its image,
//! and the search only ever extends towards larger target positions. Copies
//! therefore come out in lexicographic order of their images (listed in target
//! order) without any sorting.

use std::ops::ControlFlow;

use crate::structures::{OrderedStructure, VertexId};

/// An embedding `P -> Q`. `map[x]` is the image of `x`; `image` lists the
/// image vertices in the order of `Q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Embedding {
    image: Vec<VertexId>,
    map: Vec<VertexId>,
}

impl Embedding {
    /// Build from a total map; `image` is derived by sorting on target rank.
    pub fn from_map<Q: OrderedStructure>(map: Vec<VertexId>, target: &Q) -> Self {
        let mut image = map.clone();
        image.sort_by_key(|&v| target.order().rank(v));
        Embedding { image, map }
    }

    pub fn map(&self) -> &[VertexId] {
        &self.map
    }

    pub fn image(&self) -> &[VertexId] {
        &self.image
    }

    pub fn apply(&self, v: VertexId) -> VertexId {
        self.map[v]
    }

    /// `outer ∘ self` for `self: P -> Q` and `outer: Q -> T`.
    pub fn then<T: OrderedStructure>(&self, outer: &Embedding, target: &T) -> Embedding {
        Embedding::from_map(self.map.iter().map(|&v| outer.map[v]).collect(), target)
    }
}

/// Checks the three biconditionals (R, N, order) and injectivity.
pub fn is_embedding<P, Q>(map: &[VertexId], p: &P, q: &Q) -> bool
where
    P: OrderedStructure,
    Q: OrderedStructure,
{
    let n = p.vertex_count();
    if map.len() != n || map.iter().any(|&v| v >= q.vertex_count()) {
        return false;
    }
    for x in 0..n {
        for y in 0..n {
            if x == y {
                continue;
            }
            let (fx, fy) = (map[x], map[y]);
            if fx == fy {
                return false;
            }
            if p.has_r(x, y) != q.has_r(fx, fy)
                || p.has_n(x, y) != q.has_n(fx, fy)
                || p.order().precedes(x, y) != q.order().precedes(fx, fy)
            {
                return false;
            }
        }
    }
    true
}

/// Visit every copy of `p` in `q` in lexicographic image order.
/// `allowed(x, v)` may veto placing source vertex `x` on target vertex `v`.
pub fn visit_copies_filtered<P, Q, A, F>(p: &P, q: &Q, allowed: A, mut visit: F) -> ControlFlow<()>
where
    P: OrderedStructure,
    Q: OrderedStructure,
    A: Fn(VertexId, VertexId) -> bool,
    F: FnMut(&Embedding) -> ControlFlow<()>,
{
    let k = p.vertex_count();
    let n = q.vertex_count();
    if k > n {
        return ControlFlow::Continue(());
    }
    if k == 0 {
        return visit(&Embedding {
            image: Vec::new(),
            map: Vec::new(),
        });
    }
    let p_seq: Vec<VertexId> = p.order().as_slice().to_vec();
    // For every source position, the earlier positions it must be R/N-joined to.
    let r_preds: Vec<Vec<usize>> = (0..k)
        .map(|j| (0..j).filter(|&i| p.has_r(p_seq[i], p_seq[j])).collect())
        .collect();
    let n_preds: Vec<Vec<usize>> = (0..k)
        .map(|j| (0..j).filter(|&i| p.has_n(p_seq[i], p_seq[j])).collect())
        .collect();

    let mut search = Search {
        p,
        q,
        p_seq: &p_seq,
        r_preds: &r_preds,
        n_preds: &n_preds,
        allowed: &allowed,
        positions: Vec::with_capacity(k),
        chosen: Vec::with_capacity(k),
    };
    search.extend(&mut visit)
}

struct Search<'a, P, Q, A> {
    p: &'a P,
    q: &'a Q,
    p_seq: &'a [VertexId],
    r_preds: &'a [Vec<usize>],
    n_preds: &'a [Vec<usize>],
    allowed: &'a A,
    positions: Vec<usize>,
    chosen: Vec<VertexId>,
}

impl<P, Q, A> Search<'_, P, Q, A>
where
    P: OrderedStructure,
    Q: OrderedStructure,
    A: Fn(VertexId, VertexId) -> bool,
{
    fn extend<F: FnMut(&Embedding) -> ControlFlow<()>>(&mut self, visit: &mut F) -> ControlFlow<()> {
        let k = self.p_seq.len();
        let j = self.chosen.len();
        if j == k {
            let mut map = vec![0; k];
            for (pos, &x) in self.p_seq.iter().enumerate() {
                map[x] = self.chosen[pos];
            }
            return visit(&Embedding {
                image: self.chosen.clone(),
                map,
            });
        }
        let order = self.q.order();
        let lo = self.positions.last().map_or(0, |&p| p + 1);
        let hi = order.len() - (k - j); // inclusive upper bound on the position
        if lo > hi {
            return ControlFlow::Continue(());
        }
        let x = self.p_seq[j];

        // Candidates come from the shortest successor list of an already placed
        // predecessor when there is one, otherwise from the whole position range.
        let anchor_list = self.r_preds[j]
            .iter()
            .map(|&i| self.q.r_successors(self.chosen[i]))
            .chain(self.n_preds[j].iter().map(|&i| self.q.n_successors(self.chosen[i])))
            .min_by_key(|list| list.len());
        match anchor_list {
            Some(list) => {
                for &v in list {
                    let pos = order.rank(v);
                    if pos < lo || pos > hi {
                        continue;
                    }
                    self.try_place(x, v, pos, visit)?;
                }
            }
            None => {
                for pos in lo..=hi {
                    self.try_place(x, order.at(pos), pos, visit)?;
                }
            }
        }
        ControlFlow::Continue(())
    }

    fn try_place<F: FnMut(&Embedding) -> ControlFlow<()>>(
        &mut self,
        x: VertexId,
        v: VertexId,
        pos: usize,
        visit: &mut F,
    ) -> ControlFlow<()> {
        if !(self.allowed)(x, v) {
            return ControlFlow::Continue(());
        }
        for (i, &u) in self.chosen.iter().enumerate() {
            let px = self.p_seq[i];
            if self.p.has_r(px, x) != self.q.has_r(u, v) || self.p.has_n(px, x) != self.q.has_n(u, v) {
                return ControlFlow::Continue(());
            }
        }
        self.positions.push(pos);
        self.chosen.push(v);
        let flow = self.extend(visit);
        self.positions.pop();
        self.chosen.pop();
        flow
    }
}

/// Visit every copy of `p` in `q` in lexicographic image order.
pub fn visit_copies<P, Q, F>(p: &P, q: &Q, visit: F) -> ControlFlow<()>
where
    P: OrderedStructure,
    Q: OrderedStructure,
    F: FnMut(&Embedding) -> ControlFlow<()>,
{
    visit_copies_filtered(p, q, |_, _| true, visit)
}

/// All copies of `p` in `q`, i.e. the set binom(q, p), in deterministic order.
pub fn enumerate_copies<P: OrderedStructure, Q: OrderedStructure>(p: &P, q: &Q) -> Vec<Embedding> {
    let mut out = Vec::new();
    let _ = visit_copies(p, q, |e| {
        out.push(e.clone());
        ControlFlow::Continue(())
    });
    out
}

/// Copies, or `None` once more than `limit` have been seen.
pub fn enumerate_copies_bounded<P: OrderedStructure, Q: OrderedStructure>(
    p: &P,
    q: &Q,
    limit: usize,
) -> Option<Vec<Embedding>> {
    let mut out = Vec::new();
    let flow = visit_copies(p, q, |e| {
        if out.len() == limit {
            return ControlFlow::Break(());
        }
        out.push(e.clone());
        ControlFlow::Continue(())
    });
    match flow {
        ControlFlow::Continue(()) => Some(out),
        ControlFlow::Break(()) => None,
    }
}

pub fn count_copies<P: OrderedStructure, Q: OrderedStructure>(p: &P, q: &Q) -> usize {
    let mut count = 0;
    let _ = visit_copies(p, q, |_| {
        count += 1;
        ControlFlow::Continue(())
    });
    count
}

pub fn first_copy<P: OrderedStructure, Q: OrderedStructure>(p: &P, q: &Q) -> Option<Embedding> {
    let mut found = None;
    let _ = visit_copies(p, q, |e| {
        found = Some(e.clone());
        ControlFlow::Break(())
    });
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::{OrderedPoset, Relation, RnGraph};

    #[test]
    fn point_copies_are_vertices() {
        let point = OrderedPoset::chain(1).unwrap();
        let q = OrderedPoset::new(3, [(0, 2)].into_iter().collect(), vec![0, 1, 2]).unwrap();
        let copies = enumerate_copies(&point, &q);
        assert_eq!(copies.len(), 3);
        assert_eq!(copies[2].image(), &[2]);
    }

    #[test]
    fn two_chain_in_three_chain() {
        let copies = enumerate_copies(&OrderedPoset::chain(2).unwrap(), &OrderedPoset::chain(3).unwrap());
        let images: Vec<_> = copies.iter().map(|c| c.image().to_vec()).collect();
        assert_eq!(images, vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
    }

    #[test]
    fn antichain_in_v_poset() {
        let v = OrderedPoset::new(3, [(0, 2), (1, 2)].into_iter().collect(), vec![0, 1, 2])
            .unwrap()
            .to_complete_rn();
        let anti = OrderedPoset::antichain(2).unwrap().to_complete_rn();
        // brute force over the three pairs
        let brute: Vec<Vec<usize>> = [(0, 1), (0, 2), (1, 2)]
            .into_iter()
            .filter(|&(x, y)| v.n().contains(x, y))
            .map(|(x, y)| vec![x, y])
            .collect();
        let copies: Vec<Vec<usize>> = enumerate_copies(&anti, &v).iter().map(|c| c.image().to_vec()).collect();
        assert_eq!(copies, brute);
        assert_eq!(copies, vec![vec![0, 1]]);
    }

    #[test]
    fn is_embedding_cases() {
        let q = OrderedPoset::chain(3).unwrap().to_complete_rn();
        let p = OrderedPoset::chain(2).unwrap().to_complete_rn();
        assert!(is_embedding(&[0, 2], &p, &q));
        assert!(!is_embedding(&[2, 0], &p, &q));
        let n_edge = RnGraph::with_identity_order(2, Relation::new(), [(0, 1)].into_iter().collect()).unwrap();
        assert!(!is_embedding(&[0, 1], &p, &n_edge));
        assert!(!is_embedding(&[0, 0], &p, &q));
    }

    #[test]
    fn larger_pattern_has_no_copies() {
        assert!(enumerate_copies(&OrderedPoset::chain(4).unwrap(), &OrderedPoset::chain(3).unwrap()).is_empty());
    }

    #[test]
    fn non_identity_target_order() {
        // target ordered 2 < 0 < 1 with R = {(2,1)}
        let q = RnGraph::new(3, [(2, 1)].into_iter().collect(), Relation::new(), vec![2, 0, 1]).unwrap();
        let p = RnGraph::with_identity_order(2, [(0, 1)].into_iter().collect(), Relation::new()).unwrap();
        let copies = enumerate_copies(&p, &q);
        assert_eq!(copies.len(), 1);
        assert_eq!(copies[0].map(), &[2, 1]);
        assert_eq!(copies[0].image(), &[2, 1]);
        assert!(is_embedding(copies[0].map(), &p, &q));
    }

    #[test]
    fn bounded_enumeration() {
        let p = OrderedPoset::chain(1).unwrap();
        let q = OrderedPoset::antichain(5).unwrap();
        assert_eq!(enumerate_copies_bounded(&p, &q, 5).unwrap().len(), 5);
        assert!(enumerate_copies_bounded(&p, &q, 4).is_none());
        assert_eq!(count_copies(&p, &q), 5);
        assert_eq!(first_copy(&p, &q).unwrap().image(), &[0]);
    }
}
