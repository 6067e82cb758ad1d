//! Memoized truss-degrees.
//!
//! The truss-degree of an edge `x` with `K(x) = k` is the number of triangles
//! on `x` whose other two edges both have `K >= k`. An edge whose truss-degree
//! is below `k - 1` cannot move from `k` to `k + 1` on the next update, so
//! [`Variant::JkInc`](super::Variant::JkInc) neither explores it nor lets it
//! carry a triangle for its neighbours.
//!
//! A truss-degree only changes when a triangle appears on the edge or a
//! triangle neighbour's truss number changes, so maintenance is a recount of
//! the marked edges.

use std::collections::{BTreeSet, HashMap};

use crate::decompose::TrussState;
use crate::graph::{EdgeId, Graph};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TrussDegreeIndex {
    td: Vec<u32>,
    dirty: BTreeSet<EdgeId>,
}

fn count(g: &Graph, st: &TrussState, x: EdgeId) -> u32 {
    let k = st.get(x);
    g.wedges_of(x)
        .filter(|w| st.get(w.first) >= k && st.get(w.second) >= k)
        .count() as u32
}

impl TrussDegreeIndex {
    pub fn rebuild(g: &Graph, st: &TrussState) -> TrussDegreeIndex {
        TrussDegreeIndex {
            td: g.edge_ids().map(|x| count(g, st, x)).collect(),
            dirty: BTreeSet::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.td.len()
    }

    pub fn is_empty(&self) -> bool {
        self.td.is_empty()
    }

    pub fn get(&self, id: EdgeId) -> u32 {
        self.td[id.index()]
    }

    pub fn values(&self) -> &[u32] {
        &self.td
    }

    /// Whether an edge with truss number `k` clears the `k - 1` bar.
    pub fn clears(&self, id: EdgeId, k: u32) -> bool {
        self.td.get(id.index()).is_some_and(|&d| d + 1 >= k)
    }

    /// Edges waiting for [`TrussDegreeIndex::refresh`].
    pub fn dirty(&self) -> &BTreeSet<EdgeId> {
        &self.dirty
    }

    /// Marks `edges` and every edge sharing a triangle with one of them.
    pub fn mark_around<I>(&mut self, g: &Graph, edges: I)
    where
        I: IntoIterator<Item = EdgeId>,
    {
        for x in edges {
            self.dirty.insert(x);
            for w in g.wedges_of(x) {
                self.dirty.insert(w.first);
                self.dirty.insert(w.second);
            }
        }
    }

    /// Recounts every marked edge (and any edge added since the last refresh).
    pub fn refresh(&mut self, g: &Graph, st: &TrussState) {
        let m = g.edge_count();
        if self.td.len() < m {
            let first_new = self.td.len() as u32;
            self.td.resize(m, 0);
            self.dirty.extend((first_new..m as u32).map(EdgeId));
        }
        for x in std::mem::take(&mut self.dirty) {
            self.td[x.index()] = count(g, st, x);
        }
    }

    /// Truss-degrees of the triangle neighbours of a freshly added `inserted`
    /// edge, counting it as above every level. Nothing is stored.
    pub fn speculate(&self, g: &Graph, st: &TrussState, inserted: EdgeId) -> HashMap<EdgeId, u32> {
        let mut overlay = HashMap::new();
        for w in g.wedges_of(inserted) {
            let (a, b) = (w.first, w.second);
            let (ka, kb) = (st.get(a), st.get(b));
            overlay.insert(a, self.get(a) + u32::from(kb >= ka));
            overlay.insert(b, self.get(b) + u32::from(ka >= kb));
        }
        overlay
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::truss_decompose;
    use crate::graph::VertexId;

    fn index_of(g: &Graph) -> TrussDegreeIndex {
        TrussDegreeIndex::rebuild(g, &truss_decompose(g))
    }

    #[test]
    fn k4_edges_have_degree_two() {
        let g = Graph::from_edges([(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let idx = index_of(&g);
        assert!(idx.values().iter().all(|&d| d == 2));
        // level 4 wants 3
        assert!(g.edge_ids().all(|x| !idx.clears(x, 4)));
    }

    #[test]
    fn pendant_edge_has_degree_zero() {
        let g = Graph::from_edges([(0, 1), (1, 2), (0, 2), (2, 3)]);
        let idx = index_of(&g);
        let pendant = g.find_edge(VertexId(2), VertexId(3)).unwrap();
        assert_eq!(idx.get(pendant), 0);
        assert_eq!(idx.get(EdgeId(0)), 1);
        assert!(!idx.clears(EdgeId(0), 3));
        assert!(!idx.clears(pendant, 2));
    }

    #[test]
    fn lower_co_edges_do_not_count() {
        // K4 with a triangle hanging off edge (2, 3)
        let g = Graph::from_edges([(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (2, 4), (3, 4)]);
        let idx = index_of(&g);
        let hub = g.find_edge(VertexId(2), VertexId(3)).unwrap();
        let side = g.find_edge(VertexId(2), VertexId(4)).unwrap();
        assert_eq!(idx.get(hub), 2);
        assert_eq!(idx.get(side), 1);
    }

    #[test]
    fn refresh_after_addition_matches_rebuild() {
        let mut g = Graph::from_edges([(0, 1), (1, 2), (0, 2), (2, 3), (1, 3)]);
        let st = truss_decompose(&g);
        let mut idx = TrussDegreeIndex::rebuild(&g, &st);
        let id = g.add_edge(VertexId(0), VertexId(3)).added().unwrap();
        let st2 = truss_decompose(&g);
        let changed: Vec<EdgeId> = g
            .edge_ids()
            .filter(|&x| st.try_get(x) != Some(st2.get(x)))
            .chain([id])
            .collect();
        idx.mark_around(&g, changed);
        idx.refresh(&g, &st2);
        assert_eq!(idx, TrussDegreeIndex::rebuild(&g, &st2));
        assert!(idx.dirty().is_empty());
    }

    #[test]
    fn speculation_counts_the_new_edge_on_top() {
        // K4 minus (0, 1)
        let mut g = Graph::from_edges([(0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let mut st = truss_decompose(&g);
        let idx = TrussDegreeIndex::rebuild(&g, &st);
        let e = g.add_edge(VertexId(0), VertexId(1)).added().unwrap();
        st.push(2);
        let over = idx.speculate(&g, &st, e);
        assert_eq!(over.len(), 4);
        let a = g.find_edge(VertexId(0), VertexId(2)).unwrap();
        assert_eq!(over[&a], idx.get(a) + 1);
    }
}
