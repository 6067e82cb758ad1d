//! Batch insertion: add every edge of the batch at truss number 2, then raise
//! batch edges level by level, each time growing one exploration from a
//! batch edge that is still at the current level.
//!
//! Batch edges that belong to the same `(k + 1)`-truss rise together in one
//! exploration instead of being re-explored once per insertion.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::graph::{AddOutcome, Edge, EdgeId, VertexId};
use crate::incremental::{Anchor, DynamicTruss, Gate};

use crate::incremental::level_view;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SkipReason {
    Duplicate,
    SelfLoop,
    RepeatInBatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchResult {
    /// Batch edges actually added, in input order.
    pub accepted: Vec<EdgeId>,
    /// Input position, pair and reason for every batch entry not added.
    pub skipped: Vec<(usize, (VertexId, VertexId), SkipReason)>,
    /// Final truss number per accepted edge, parallel to `accepted`.
    pub final_k: Vec<u32>,
    /// Pre-existing edges that moved: `(id, old K, new K)`.
    pub promoted_existing: Vec<(EdgeId, u32, u32)>,
    /// Pivot explorations that passed the gate.
    pub explorations: usize,
    pub explored: usize,
    pub evicted: usize,
    pub work_units: usize,
    /// Share of `work_units` spent on the pivots themselves.
    pub pivot_units: usize,
}

impl DynamicTruss {
    pub fn insert_batch(&mut self, batch: &[(VertexId, VertexId)]) -> BatchResult {
        let mut accepted = Vec::new();
        let mut skipped = Vec::new();
        let mut seen: HashSet<Edge> = HashSet::new();
        let first_new = self.graph.edge_count();
        for (i, &(a, b)) in batch.iter().enumerate() {
            let Some(edge) = Edge::new(a, b) else {
                skipped.push((i, (a, b), SkipReason::SelfLoop));
                continue;
            };
            if !seen.insert(edge) {
                skipped.push((i, (a, b), SkipReason::RepeatInBatch));
                continue;
            }
            match self.graph.add_edge(a, b) {
                AddOutcome::Added(id) => {
                    self.state.push(2);
                    accepted.push(id);
                }
                AddOutcome::Duplicate(_) => skipped.push((i, (a, b), SkipReason::Duplicate)),
                AddOutcome::SelfLoop => unreachable!("self-loops filtered above"),
            }
        }
        if let Some(idx) = self.degrees.as_mut() {
            idx.mark_around(&self.graph, accepted.iter().copied());
            idx.refresh(&self.graph, &self.state);
        }

        let mut original: BTreeMap<EdgeId, u32> = BTreeMap::new();
        let (mut explorations, mut explored, mut evicted, mut pivot_units) = (0, 0, 0, 0);
        let mut k = 2;
        while accepted.iter().any(|&b| self.state.get(b) >= k) {
            let mut risen: Vec<EdgeId> = Vec::new();
            {
                let mut gate = match &self.degrees {
                    Some(idx) => Gate::truss_degree(idx, Default::default()),
                    None => Gate::open(),
                };
                // explored by an earlier pivot of this pass and evicted there:
                // its own exploration would reach the same edges and fail again
                let mut settled: HashSet<EdgeId> = HashSet::new();
                for &pivot in &accepted {
                    // an earlier pivot of this pass may already have lifted it
                    if self.state.get(pivot) != k
                        || settled.contains(&pivot)
                        || !gate.admits(pivot, k)
                    {
                        continue;
                    }
                    let view = level_view(&self.graph, &self.state, &gate, Anchor::Pivot(pivot), k);
                    let out = crate::incremental::run_view(view);
                    if !out.ran {
                        continue;
                    }
                    explorations += 1;
                    pivot_units += if out.promoted.binary_search(&pivot).is_ok() { 1 } else { 2 };
                    explored += out.explored.len();
                    evicted += out.evicted;
                    settled.extend(
                        out.explored
                            .iter()
                            .filter(|x| out.promoted.binary_search(x).is_err()),
                    );
                    for &x in &out.promoted {
                        if x.index() < first_new {
                            original.entry(x).or_insert(k);
                        }
                        self.state.set(x, k + 1);
                        gate.revoke(x);
                    }
                    risen.extend(out.promoted);
                }
            }
            if let Some(idx) = self.degrees.as_mut() {
                if !risen.is_empty() {
                    idx.mark_around(&self.graph, risen.iter().copied());
                    idx.refresh(&self.graph, &self.state);
                }
            }
            k += 1;
        }

        let final_k = accepted.iter().map(|&b| self.state.get(b)).collect();
        let promoted_existing = original
            .into_iter()
            .map(|(id, old)| (id, old, self.state.get(id)))
            .collect();
        BatchResult {
            accepted,
            skipped,
            final_k,
            promoted_existing,
            explorations,
            explored,
            evicted,
            work_units: explored + evicted,
            pivot_units,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::truss_decompose;
    use crate::graph::Graph;
    use crate::incremental::Variant;

    fn v(x: u32) -> VertexId {
        VertexId(x)
    }

    #[test]
    fn two_edges_into_empty_graph() {
        let mut dt = DynamicTruss::new(Variant::JkInc);
        let r = dt.insert_batch(&[(v(0), v(1)), (v(2), v(3))]);
        assert_eq!(r.final_k, vec![2, 2]);
        assert!(r.promoted_existing.is_empty());
        assert!(dt.verify().is_valid());
    }

    #[test]
    fn k5_minus_matching_completes_together() {
        let mut g = Graph::new();
        for a in 0..5u32 {
            for b in a + 1..5 {
                if (a, b) != (0, 1) && (a, b) != (2, 3) {
                    g.add_edge(v(a), v(b));
                }
            }
        }
        assert!(truss_decompose(&g).values().iter().all(|&k| k == 3));
        for variant in [Variant::Hcqty, Variant::JkInc] {
            let mut dt = DynamicTruss::from_graph(g.clone(), variant);
            let r = dt.insert_batch(&[(v(0), v(1)), (v(3), v(2))]);
            assert_eq!(r.final_k, vec![5, 5]);
            assert_eq!(r.promoted_existing.len(), 8);
            assert!(r.promoted_existing.iter().all(|&(_, old, new)| (old, new) == (3, 5)));
            assert!(dt.state().values().iter().all(|&k| k == 5));
            assert!(dt.verify().is_valid());
        }
    }

    #[test]
    fn degenerate_entries_are_skipped() {
        let mut dt = DynamicTruss::from_graph(Graph::from_edges([(0, 1)]), Variant::JkInc);
        let r = dt.insert_batch(&[(v(1), v(2)), (v(2), v(1)), (v(4), v(4)), (v(1), v(0))]);
        assert_eq!(r.accepted.len(), 1);
        let reasons: Vec<_> = r.skipped.iter().map(|s| (s.0, s.2)).collect();
        assert_eq!(
            reasons,
            vec![
                (1, SkipReason::RepeatInBatch),
                (2, SkipReason::SelfLoop),
                (3, SkipReason::Duplicate)
            ]
        );
        assert_eq!(r.accepted.len() + r.skipped.len(), 4);
    }
}
