//! Mutable undirected simple graph with stable edge identifiers.
//!
//! Adjacency lists are kept sorted by neighbor id and carry the identifier of
//! the connecting edge, so intersecting two lists yields every triangle on an
//! edge together with the ids of its two other edges in a single merge.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::TrussError;

/// Dense vertex identifier in `[0, vertex_count)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Append-only edge identifier. Ids are assigned in insertion order and never reused.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId(pub u32);

impl EdgeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// Canonical undirected edge, `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    u: VertexId,
    v: VertexId,
}

impl Edge {
    /// Returns `None` for a self-loop.
    pub fn new(a: VertexId, b: VertexId) -> Option<Edge> {
        match a.cmp(&b) {
            Ordering::Less => Some(Edge { u: a, v: b }),
            Ordering::Greater => Some(Edge { u: b, v: a }),
            Ordering::Equal => None,
        }
    }

    pub fn u(&self) -> VertexId {
        self.u
    }

    pub fn v(&self) -> VertexId {
        self.v
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.u, self.v)
    }
}

/// Canonical triangle, `a < b < c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triangle {
    pub a: VertexId,
    pub b: VertexId,
    pub c: VertexId,
}

impl Triangle {
    pub fn new(x: VertexId, y: VertexId, z: VertexId) -> Triangle {
        let mut t = [x, y, z];
        t.sort_unstable();
        Triangle { a: t[0], b: t[1], c: t[2] }
    }

    pub fn contains(&self, x: VertexId) -> bool {
        self.a == x || self.b == x || self.c == x
    }

    /// The vertex of the triangle not on `e`, if `e` lies on the triangle.
    pub fn apex(&self, e: Edge) -> Option<VertexId> {
        if !self.contains(e.u()) || !self.contains(e.v()) {
            return None;
        }
        [self.a, self.b, self.c]
            .into_iter()
            .find(|&x| x != e.u() && x != e.v())
    }
}

/// Outcome of [`Graph::add_edge`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AddOutcome {
    Added(EdgeId),
    Duplicate(EdgeId),
    SelfLoop,
}

impl AddOutcome {
    pub fn added(self) -> Option<EdgeId> {
        match self {
            AddOutcome::Added(id) => Some(id),
            _ => None,
        }
    }
}

/// One triangle on an edge `(u, v)` as seen from that edge: the apex `w` and
/// the ids of `(u, w)` and `(v, w)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Wedge {
    pub apex: VertexId,
    pub first: EdgeId,
    pub second: EdgeId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Slot {
    to: VertexId,
    edge: EdgeId,
}

#[derive(Debug, Clone, Default)]
pub struct Graph {
    adjacency: Vec<Vec<Slot>>,
    edges: Vec<Edge>,
}

impl Graph {
    pub fn new() -> Graph {
        Graph::default()
    }

    pub fn with_vertices(n: usize) -> Graph {
        Graph {
            adjacency: vec![Vec::new(); n],
            edges: Vec::new(),
        }
    }

    pub fn from_edges<I>(pairs: I) -> Graph
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        let mut g = Graph::new();
        for (a, b) in pairs {
            g.add_edge(VertexId(a), VertexId(b));
        }
        g
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edge(&self, id: EdgeId) -> Edge {
        self.edges[id.index()]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edges.len() as u32).map(EdgeId)
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency.get(v.index()).map_or(0, Vec::len)
    }

    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.slots(v).iter().map(|s| s.to)
    }

    fn slots(&self, v: VertexId) -> &[Slot] {
        self.adjacency.get(v.index()).map_or(&[], Vec::as_slice)
    }

    fn ensure_vertex(&mut self, v: VertexId) {
        if v.index() >= self.adjacency.len() {
            self.adjacency.resize_with(v.index() + 1, Vec::new);
        }
    }

    pub fn find_edge(&self, a: VertexId, b: VertexId) -> Option<EdgeId> {
        let e = Edge::new(a, b)?;
        let (small, other) = if self.degree(e.u()) <= self.degree(e.v()) {
            (e.u(), e.v())
        } else {
            (e.v(), e.u())
        };
        let slots = self.slots(small);
        slots
            .binary_search_by_key(&other, |s| s.to)
            .ok()
            .map(|i| slots[i].edge)
    }

    pub fn contains(&self, a: VertexId, b: VertexId) -> bool {
        self.find_edge(a, b).is_some()
    }

    /// Adds the undirected edge `{a, b}`. Self-loops and repeats leave the graph untouched.
    pub fn add_edge(&mut self, a: VertexId, b: VertexId) -> AddOutcome {
        let Some(e) = Edge::new(a, b) else {
            return AddOutcome::SelfLoop;
        };
        self.ensure_vertex(e.v());
        let pos_u = match self.adjacency[e.u().index()].binary_search_by_key(&e.v(), |s| s.to) {
            Ok(i) => return AddOutcome::Duplicate(self.adjacency[e.u().index()][i].edge),
            Err(i) => i,
        };
        let id = EdgeId(
            u32::try_from(self.edges.len()).expect("edge count exceeds u32 range"),
        );
        self.adjacency[e.u().index()].insert(pos_u, Slot { to: e.v(), edge: id });
        let adj_v = &mut self.adjacency[e.v().index()];
        let pos_v = adj_v
            .binary_search_by_key(&e.u(), |s| s.to)
            .expect_err("adjacency out of sync");
        adj_v.insert(pos_v, Slot { to: e.u(), edge: id });
        self.edges.push(e);
        AddOutcome::Added(id)
    }

    /// Triangles on the edge `(u, v)`, reported in increasing apex order.
    pub fn wedges(&self, u: VertexId, v: VertexId) -> Wedges<'_> {
        Wedges {
            left: self.slots(u),
            right: self.slots(v),
        }
    }

    /// Triangles on a stored edge.
    pub fn wedges_of(&self, id: EdgeId) -> Wedges<'_> {
        let e = self.edge(id);
        self.wedges(e.u(), e.v())
    }

    /// `Adj(u) ∩ Adj(v)` in increasing order.
    pub fn common_neighbors(&self, u: VertexId, v: VertexId) -> Vec<VertexId> {
        self.wedges(u, v).map(|w| w.apex).collect()
    }

    pub fn support(&self, e: Edge) -> Result<usize, TrussError> {
        if self.find_edge(e.u(), e.v()).is_none() {
            return Err(TrussError::UnknownEdge(e.u().0, e.v().0));
        }
        Ok(self.wedges(e.u(), e.v()).count())
    }

    pub fn support_of(&self, id: EdgeId) -> usize {
        self.wedges_of(id).count()
    }

    /// Every triangle exactly once.
    pub fn triangles(&self) -> impl Iterator<Item = Triangle> + '_ {
        self.edges.iter().flat_map(move |e| {
            let (u, v) = (e.u(), e.v());
            self.wedges(u, v)
                .filter(move |w| w.apex > v)
                .map(move |w| Triangle { a: u, b: v, c: w.apex })
        })
    }
}

/// Sorted-merge iterator over `Adj(u) ∩ Adj(v)`.
#[derive(Debug, Clone)]
pub struct Wedges<'a> {
    left: &'a [Slot],
    right: &'a [Slot],
}

impl Iterator for Wedges<'_> {
    type Item = Wedge;

    fn next(&mut self) -> Option<Wedge> {
        while let (Some(l), Some(r)) = (self.left.first(), self.right.first()) {
            match l.to.cmp(&r.to) {
                Ordering::Less => self.left = &self.left[1..],
                Ordering::Greater => self.right = &self.right[1..],
                Ordering::Equal => {
                    let w = Wedge {
                        apex: l.to,
                        first: l.edge,
                        second: r.edge,
                    };
                    self.left = &self.left[1..];
                    self.right = &self.right[1..];
                    return Some(w);
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vid(x: u32) -> VertexId {
        VertexId(x)
    }

    fn k4() -> Graph {
        Graph::from_edges([(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
    }

    #[test]
    fn first_insertion_gets_id_zero() {
        let mut g = Graph::new();
        assert_eq!(g.add_edge(vid(0), vid(1)), AddOutcome::Added(EdgeId(0)));
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn reversed_pair_is_duplicate() {
        let mut g = Graph::new();
        g.add_edge(vid(0), vid(1));
        assert_eq!(g.add_edge(vid(1), vid(0)), AddOutcome::Duplicate(EdgeId(0)));
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.degree(vid(0)), 1);
    }

    #[test]
    fn self_loop_rejected() {
        let mut g = k4();
        assert_eq!(g.add_edge(vid(3), vid(3)), AddOutcome::SelfLoop);
        assert_eq!(g.edge_count(), 6);
    }

    #[test]
    fn edge_canonicalization() {
        assert_eq!(Edge::new(vid(5), vid(2)), Edge::new(vid(2), vid(5)));
        assert_eq!(Edge::new(vid(5), vid(2)).unwrap().u(), vid(2));
        assert!(Edge::new(vid(1), vid(1)).is_none());
    }

    #[test]
    fn common_neighbors_examples() {
        let tri = Graph::from_edges([(0, 1), (1, 2), (0, 2)]);
        assert_eq!(tri.common_neighbors(vid(0), vid(1)), vec![vid(2)]);
        assert_eq!(k4().common_neighbors(vid(0), vid(1)), vec![vid(2), vid(3)]);
        let path = Graph::from_edges([(0, 1), (1, 2)]);
        assert!(path.common_neighbors(vid(0), vid(1)).is_empty());
        // vertices beyond the adjacency table
        assert!(path.common_neighbors(vid(7), vid(9)).is_empty());
    }

    #[test]
    fn support_examples() {
        let g = k4();
        assert_eq!(g.support(Edge::new(vid(0), vid(3)).unwrap()).unwrap(), 2);
        let star = Graph::from_edges([(0, 1), (0, 2), (0, 3), (0, 4)]);
        assert_eq!(star.support(Edge::new(vid(0), vid(4)).unwrap()).unwrap(), 0);
        assert!(matches!(
            star.support(Edge::new(vid(1), vid(2)).unwrap()),
            Err(TrussError::UnknownEdge(1, 2))
        ));
    }

    #[test]
    fn wedges_report_both_co_edges() {
        let g = k4();
        let e = g.find_edge(vid(0), vid(1)).unwrap();
        let ws: Vec<_> = g.wedges_of(e).collect();
        assert_eq!(ws.len(), 2);
        for w in ws {
            assert_eq!(g.edge(w.first), Edge::new(vid(0), w.apex).unwrap());
            assert_eq!(g.edge(w.second), Edge::new(vid(1), w.apex).unwrap());
        }
    }

    #[test]
    fn triangle_listing_k4() {
        let tris: Vec<_> = k4().triangles().collect();
        assert_eq!(tris.len(), 4);
        assert!(tris.contains(&Triangle::new(vid(3), vid(1), vid(2))));
    }

    #[test]
    fn triangle_apex() {
        let t = Triangle::new(vid(4), vid(1), vid(9));
        assert_eq!(t.apex(Edge::new(vid(9), vid(1)).unwrap()), Some(vid(4)));
        assert_eq!(t.apex(Edge::new(vid(9), vid(2)).unwrap()), None);
    }
}
