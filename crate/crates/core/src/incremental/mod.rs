//! Truss maintenance under single-edge insertion.
//!
//! Every level `k` in `[2, ktmax]` is handled independently: explore the
//! `K = k` edges reachable from the new edge through triangles whose edges all
//! reach `k`, evict candidates that cannot keep `k - 1` such triangles, and
//! promote what is left. The inserted edge's own truss number is settled last.

mod level;
mod truss_degree;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decompose::{truss_decompose, verify_state, TrussState, Verdict};
use crate::error::{Result, TrussError};
use crate::graph::{AddOutcome, Edge, EdgeId, Graph, Triangle, VertexId};

pub use level::{Anchor, CandidateSet, Gate, LevelOutcome, Pruned};
pub use truss_degree::TrussDegreeIndex;

use level::LevelView;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Variant {
    /// Explores every same-level edge reachable through qualifying triangles.
    Hcqty,
    /// Additionally skips edges whose memoized truss-degree rules them out.
    #[default]
    JkInc,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Hcqty => "hcqty",
            Variant::JkInc => "jk-inc",
        })
    }
}

impl FromStr for Variant {
    type Err = TrussError;

    fn from_str(s: &str) -> Result<Variant> {
        match s.to_ascii_lowercase().as_str() {
            "hcqty" => Ok(Variant::Hcqty),
            "jk-inc" | "jkinc" | "jk" => Ok(Variant::JkInc),
            other => Err(TrussError::InvalidParameter(format!("unknown variant {other:?}"))),
        }
    }
}

/// Order in which the eligible levels of one insertion are processed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LevelOrder {
    #[default]
    Ascending,
    Descending,
    /// A seeded random permutation.
    Shuffled(u64),
    /// All levels at once against a snapshot of the truss numbers, joined before promotion.
    Parallel,
}

/// Why an insertion left the state untouched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum Rejection {
    #[error("edge already present as {0}")]
    Duplicate(EdgeId),
    #[error("self-loop")]
    SelfLoop,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InsertionResult {
    pub inserted: EdgeId,
    pub new_k: u32,
    /// Edges whose truss number went from `old` to `old + 1`.
    pub promoted: Vec<(EdgeId, u32)>,
    /// Levels that passed the relevant-support gate, in execution order.
    pub levels_run: Vec<u32>,
    pub levels: Vec<LevelOutcome>,
    pub explored: usize,
    pub evicted: usize,
    pub work_units: usize,
}

/// `Φ(tri, e)`: the smaller truss number of the two edges of `tri` other than `e`.
pub fn min_truss_of_triangle(g: &Graph, st: &TrussState, tri: Triangle, e: Edge) -> Result<u32> {
    let apex = tri
        .apex(e)
        .ok_or(TrussError::UnknownEdge(e.u().0, e.v().0))?;
    let lookup = |a: VertexId, b: VertexId| {
        g.find_edge(a, b)
            .and_then(|id| st.try_get(id))
            .ok_or(TrussError::UnknownEdge(a.0.min(b.0), a.0.max(b.0)))
    };
    g.find_edge(e.u(), e.v())
        .ok_or(TrussError::UnknownEdge(e.u().0, e.v().0))?;
    Ok(lookup(e.u(), apex)?.min(lookup(e.v(), apex)?))
}

pub(crate) fn level_view<'a>(
    g: &'a Graph,
    st: &'a TrussState,
    gate: &'a Gate<'a>,
    anchor: Anchor,
    k: u32,
) -> LevelView<'a> {
    LevelView {
        g,
        st,
        gate,
        anchor,
        k,
    }
}

pub(crate) fn run_view(view: LevelView<'_>) -> LevelOutcome {
    level::run(view)
}

/// Graph, truss numbers and (for [`Variant::JkInc`]) truss-degrees, kept in sync.
#[derive(Debug, Clone)]
pub struct DynamicTruss {
    pub(crate) graph: Graph,
    pub(crate) state: TrussState,
    pub(crate) degrees: Option<TrussDegreeIndex>,
    variant: Variant,
    order: LevelOrder,
}

impl DynamicTruss {
    pub fn new(variant: Variant) -> DynamicTruss {
        DynamicTruss::from_graph(Graph::new(), variant)
    }

    /// Decomposes `graph` from scratch and starts maintaining it.
    pub fn from_graph(graph: Graph, variant: Variant) -> DynamicTruss {
        let state = truss_decompose(&graph);
        DynamicTruss::from_parts(graph, state, variant)
    }

    /// Adopts an existing decomposition; `state` must be valid for `graph`.
    pub fn from_parts(graph: Graph, state: TrussState, variant: Variant) -> DynamicTruss {
        let degrees = match variant {
            Variant::JkInc => Some(TrussDegreeIndex::rebuild(&graph, &state)),
            Variant::Hcqty => None,
        };
        DynamicTruss {
            graph,
            state,
            degrees,
            variant,
            order: LevelOrder::Ascending,
        }
    }

    pub fn with_order(mut self, order: LevelOrder) -> DynamicTruss {
        self.order = order;
        self
    }

    pub fn set_order(&mut self, order: LevelOrder) {
        self.order = order;
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn state(&self) -> &TrussState {
        &self.state
    }

    pub fn truss_degrees(&self) -> Option<&TrussDegreeIndex> {
        self.degrees.as_ref()
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn ktmax(&self) -> u32 {
        self.state.ktmax()
    }

    pub fn truss_number(&self, a: VertexId, b: VertexId) -> Option<u32> {
        self.graph.find_edge(a, b).map(|id| self.state.get(id))
    }

    pub fn verify(&self) -> Verdict {
        verify_state(&self.graph, &self.state).expect("maintained state covers its graph")
    }

    pub fn into_parts(self) -> (Graph, TrussState) {
        (self.graph, self.state)
    }

    pub fn insert_edge(&mut self, a: VertexId, b: VertexId) -> Result<InsertionResult, Rejection> {
        self.insert_edge_ordered(a, b, self.order)
    }

    pub fn insert_edge_ordered(
        &mut self,
        a: VertexId,
        b: VertexId,
        order: LevelOrder,
    ) -> Result<InsertionResult, Rejection> {
        let e = match self.graph.add_edge(a, b) {
            AddOutcome::Added(id) => id,
            AddOutcome::Duplicate(id) => return Err(Rejection::Duplicate(id)),
            AddOutcome::SelfLoop => return Err(Rejection::SelfLoop),
        };
        Ok(self.settle_inserted(e, order))
    }

    /// Updates truss numbers after `e` was appended to the graph.
    pub(crate) fn settle_inserted(&mut self, e: EdgeId, order: LevelOrder) -> InsertionResult {
        let ktmax_before = self.state.ktmax();
        // placeholder; the anchor is pinned during the levels
        self.state.push(2);

        let overlay = match &self.degrees {
            Some(idx) => idx.speculate(&self.graph, &self.state, e),
            None => HashMap::new(),
        };
        let mut gate = match &self.degrees {
            Some(idx) => Gate::truss_degree(idx, overlay),
            None => Gate::open(),
        };

        let mut levels: Vec<u32> = (2..=ktmax_before).collect();
        let outcomes: Vec<LevelOutcome> = match order {
            LevelOrder::Parallel => {
                let (g, st, gate_ref) = (&self.graph, &self.state, &gate);
                let outcomes: Vec<LevelOutcome> = levels
                    .par_iter()
                    .map(|&k| {
                        level::run(LevelView {
                            g,
                            st,
                            gate: gate_ref,
                            anchor: Anchor::Inserted(e),
                            k,
                        })
                    })
                    .collect();
                for out in &outcomes {
                    for &x in &out.promoted {
                        self.state.set(x, out.k + 1);
                    }
                }
                outcomes
            }
            serial => {
                match serial {
                    LevelOrder::Descending => levels.reverse(),
                    LevelOrder::Shuffled(seed) => {
                        levels.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
                    }
                    _ => {}
                }
                let mut outcomes = Vec::with_capacity(levels.len());
                for &k in &levels {
                    let out = level::run(LevelView {
                        g: &self.graph,
                        st: &self.state,
                        gate: &gate,
                        anchor: Anchor::Inserted(e),
                        k,
                    });
                    for &x in &out.promoted {
                        self.state.set(x, k + 1);
                        gate.revoke(x);
                    }
                    outcomes.push(out);
                }
                outcomes
            }
        };
        drop(gate);

        let new_k = self.inserted_truss_number(e);
        self.state.set(e, new_k);

        let mut promoted = Vec::new();
        let mut levels_run = Vec::new();
        let (mut explored, mut evicted) = (0, 0);
        for out in &outcomes {
            if out.ran {
                levels_run.push(out.k);
            }
            explored += out.explored.len();
            evicted += out.evicted;
            promoted.extend(out.promoted.iter().map(|&x| (x, out.k)));
        }
        promoted.sort_unstable();

        if let Some(idx) = self.degrees.as_mut() {
            idx.mark_around(
                &self.graph,
                std::iter::once(e).chain(promoted.iter().map(|&(x, _)| x)),
            );
            idx.refresh(&self.graph, &self.state);
        }

        InsertionResult {
            inserted: e,
            new_k,
            promoted,
            levels_run,
            levels: outcomes,
            explored,
            evicted,
            work_units: explored + evicted,
        }
    }

    /// Largest `k` such that `e` sits on at least `k - 2` triangles whose other
    /// two edges both have truss number at least `k`.
    fn inserted_truss_number(&self, e: EdgeId) -> u32 {
        let mut phis: Vec<u32> = self
            .graph
            .wedges_of(e)
            .map(|w| self.state.get(w.first).min(self.state.get(w.second)))
            .collect();
        phis.sort_unstable_by(|a, b| b.cmp(a));
        // phis[j] >= j + 3 means j + 1 triangles reach k = j + 3
        let mut k = 2;
        for (j, &phi) in phis.iter().enumerate() {
            let want = j as u32 + 3;
            if phi >= want {
                k = want;
            } else {
                break;
            }
        }
        k
    }

    /// Explored set of level `k` for an inserted edge `e` whose truss number
    /// has not been settled yet (see [`DynamicTruss::begin_insert`]).
    pub fn explore_candidates(&self, e: EdgeId, k: u32) -> CandidateSet {
        let overlay = self.speculation(e);
        let gate = self.gate(overlay);
        level::explore(self.view(&gate, Anchor::Inserted(e), k))
    }

    /// Explores and prunes level `k`; returns the candidate set and the survivors `S′`.
    pub fn prune_candidates(&self, e: EdgeId, k: u32) -> (CandidateSet, Pruned) {
        let overlay = self.speculation(e);
        let gate = self.gate(overlay);
        let view = self.view(&gate, Anchor::Inserted(e), k);
        let cs = level::explore(view);
        let pruned = level::prune(view, &cs);
        (cs, pruned)
    }

    /// One level against the current truss numbers, without applying promotions.
    pub fn run_level(&self, e: EdgeId, k: u32) -> LevelOutcome {
        let overlay = self.speculation(e);
        let gate = self.gate(overlay);
        level::run(self.view(&gate, Anchor::Inserted(e), k))
    }

    /// Adds an edge to the graph without settling any truss number, so the
    /// per-level operations can be inspected. Finish with [`DynamicTruss::finish_insert`].
    pub fn begin_insert(&mut self, a: VertexId, b: VertexId) -> Result<EdgeId, Rejection> {
        match self.graph.add_edge(a, b) {
            AddOutcome::Added(id) => {
                self.state.push(2);
                Ok(id)
            }
            AddOutcome::Duplicate(id) => Err(Rejection::Duplicate(id)),
            AddOutcome::SelfLoop => Err(Rejection::SelfLoop),
        }
    }

    pub fn finish_insert(&mut self, e: EdgeId) -> InsertionResult {
        // drop the placeholder so `settle_inserted` sees the pre-insertion ktmax
        self.state.pop();
        self.settle_inserted(e, self.order)
    }

    fn speculation(&self, e: EdgeId) -> HashMap<EdgeId, u32> {
        match &self.degrees {
            Some(idx) => idx.speculate(&self.graph, &self.state, e),
            None => HashMap::new(),
        }
    }

    fn gate(&self, overlay: HashMap<EdgeId, u32>) -> Gate<'_> {
        match &self.degrees {
            Some(idx) => Gate::truss_degree(idx, overlay),
            None => Gate::open(),
        }
    }

    fn view<'a>(&'a self, gate: &'a Gate<'a>, anchor: Anchor, k: u32) -> LevelView<'a> {
        LevelView {
            g: &self.graph,
            st: &self.state,
            gate,
            anchor,
            k,
        }
    }
}
