//! Support peeling: the non-incremental truss decomposition.
//!
//! Also the oracle every incremental and batch update is checked against.

use std::collections::{BTreeMap, BTreeSet};

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TrussError};
use crate::graph::{Edge, EdgeId, Graph};

/// Truss numbers indexed by [`EdgeId`], plus their maximum.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrussState {
    truss: Vec<u32>,
    ktmax: u32,
}

impl TrussState {
    pub fn new() -> TrussState {
        TrussState::default()
    }

    pub fn from_values(truss: Vec<u32>) -> TrussState {
        let ktmax = truss.iter().copied().max().unwrap_or(0);
        TrussState { truss, ktmax }
    }

    #[inline]
    pub fn get(&self, id: EdgeId) -> u32 {
        self.truss[id.index()]
    }

    pub fn try_get(&self, id: EdgeId) -> Option<u32> {
        self.truss.get(id.index()).copied()
    }

    /// Overwrites one truss number; `ktmax` only ever grows here.
    pub fn set(&mut self, id: EdgeId, k: u32) {
        self.truss[id.index()] = k;
        self.ktmax = self.ktmax.max(k);
    }

    pub(crate) fn push(&mut self, k: u32) {
        self.truss.push(k);
        self.ktmax = self.ktmax.max(k);
    }

    /// Drops a trailing placeholder pushed for an unsettled edge.
    pub(crate) fn pop(&mut self) {
        self.truss.pop();
        if self.truss.is_empty() {
            self.ktmax = 0;
        }
    }

    pub fn len(&self) -> usize {
        self.truss.len()
    }

    pub fn is_empty(&self) -> bool {
        self.truss.is_empty()
    }

    pub fn values(&self) -> &[u32] {
        &self.truss
    }

    pub fn ktmax(&self) -> u32 {
        self.ktmax
    }

    /// Number of edges per truss number.
    pub fn histogram(&self) -> BTreeMap<u32, usize> {
        let mut h = BTreeMap::new();
        for &k in &self.truss {
            *h.entry(k).or_insert(0) += 1;
        }
        h
    }
}

/// Order in which equal-support edges leave the peeling queue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Bin-sort position order (constant-time moves).
    #[default]
    Bucket,
    LowestEdgeId,
    HighestEdgeId,
}

pub fn truss_decompose(g: &Graph) -> TrussState {
    truss_decompose_with(g, TieBreak::Bucket)
}

pub fn truss_decompose_with(g: &Graph, tie: TieBreak) -> TrussState {
    let trace = peeling_trace(g, tie);
    let mut truss = vec![0; g.edge_count()];
    for (id, k) in trace {
        truss[id.index()] = k;
    }
    TrussState::from_values(truss)
}

fn initial_support(g: &Graph) -> Vec<u32> {
    g.edge_ids().map(|id| g.support_of(id) as u32).collect()
}

/// Edges in removal order with the truss number assigned at removal.
pub fn peeling_trace(g: &Graph, tie: TieBreak) -> Vec<(EdgeId, u32)> {
    match tie {
        TieBreak::Bucket => bucket_peel(g),
        TieBreak::LowestEdgeId => ordered_peel(g, false),
        TieBreak::HighestEdgeId => ordered_peel(g, true),
    }
}

fn bucket_peel(g: &Graph) -> Vec<(EdgeId, u32)> {
    let m = g.edge_count();
    let mut sup = initial_support(g);
    let max_sup = sup.iter().copied().max().unwrap_or(0) as usize;

    // bin[d] = first position of support d in `order`
    let mut bin = vec![0usize; max_sup + 2];
    for &s in &sup {
        bin[s as usize + 1] += 1;
    }
    for d in 1..bin.len() {
        bin[d] += bin[d - 1];
    }
    let mut order = vec![0u32; m];
    let mut pos = vec![0usize; m];
    {
        let mut next = bin.clone();
        for (e, &s) in sup.iter().enumerate() {
            let p = next[s as usize];
            order[p] = e as u32;
            pos[e] = p;
            next[s as usize] += 1;
        }
    }

    let mut removed = vec![false; m];
    let mut trace = Vec::with_capacity(m);
    for i in 0..m {
        let e = order[i] as usize;
        let s = sup[e];
        trace.push((EdgeId(e as u32), s + 2));
        for w in g.wedges_of(EdgeId(e as u32)) {
            let (a, b) = (w.first.index(), w.second.index());
            if removed[a] || removed[b] {
                continue;
            }
            for f in [a, b] {
                if sup[f] > s {
                    let d = sup[f] as usize;
                    let pf = pos[f];
                    let pw = bin[d];
                    let head = order[pw] as usize;
                    if head != f {
                        order.swap(pf, pw);
                        pos[f] = pw;
                        pos[head] = pf;
                    }
                    bin[d] += 1;
                    sup[f] -= 1;
                }
            }
        }
        removed[e] = true;
    }
    trace
}

fn ordered_peel(g: &Graph, highest_first: bool) -> Vec<(EdgeId, u32)> {
    let m = g.edge_count();
    let key = |e: usize| -> u32 {
        if highest_first {
            u32::MAX - e as u32
        } else {
            e as u32
        }
    };
    let mut sup = initial_support(g);
    let mut queue: BTreeSet<(u32, u32, usize)> =
        (0..m).map(|e| (sup[e], key(e), e)).collect();
    let mut removed = vec![false; m];
    let mut trace = Vec::with_capacity(m);
    let mut level = 0;
    while let Some((s, _, e)) = queue.pop_first() {
        level = level.max(s);
        trace.push((EdgeId(e as u32), level + 2));
        removed[e] = true;
        for w in g.wedges_of(EdgeId(e as u32)) {
            let (a, b) = (w.first.index(), w.second.index());
            if removed[a] || removed[b] {
                continue;
            }
            for f in [a, b] {
                if sup[f] > level {
                    queue.remove(&(sup[f], key(f), f));
                    sup[f] -= 1;
                    queue.insert((sup[f], key(f), f));
                }
            }
        }
    }
    trace
}

/// A triangle-connected group of edges that all have truss number at least `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrussSubgraph {
    pub k: u32,
    pub edges: Vec<Edge>,
    pub ids: Vec<EdgeId>,
}

impl TrussSubgraph {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// The `k`-trusses of `g`: edges with `K >= k`, grouped by shared triangles whose
/// three edges all reach `k`.
pub fn extract_truss(g: &Graph, st: &TrussState, k: u32) -> Result<Vec<TrussSubgraph>> {
    if k < 2 {
        return Err(TrussError::InvalidParameter(format!(
            "truss level must be at least 2, got {k}"
        )));
    }
    check_cover(g, st)?;
    if k > st.ktmax() {
        return Ok(Vec::new());
    }
    let keep = |id: EdgeId| st.get(id) >= k;
    let mut uf = UnionFind::<usize>::new(g.edge_count());
    for id in g.edge_ids().filter(|&id| keep(id)) {
        for w in g.wedges_of(id) {
            if keep(w.first) && keep(w.second) {
                uf.union(id.index(), w.first.index());
                uf.union(id.index(), w.second.index());
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<EdgeId>> = BTreeMap::new();
    for id in g.edge_ids().filter(|&id| keep(id)) {
        groups.entry(uf.find(id.index())).or_default().push(id);
    }
    let mut out: Vec<TrussSubgraph> = groups
        .into_values()
        .map(|mut ids| {
            ids.sort_unstable_by_key(|&id| g.edge(id));
            TrussSubgraph {
                k,
                edges: ids.iter().map(|&id| g.edge(id)).collect(),
                ids,
            }
        })
        .collect();
    out.sort_by(|a, b| a.edges[0].cmp(&b.edges[0]));
    Ok(out)
}

/// An edge whose maintained truss number disagrees with a fresh decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub id: EdgeId,
    pub edge: Edge,
    pub expected: u32,
    pub found: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Valid,
    Violations(Vec<Violation>),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }
}

fn check_cover(g: &Graph, st: &TrussState) -> Result<()> {
    if st.len() != g.edge_count() {
        return Err(TrussError::StateMismatch {
            states: st.len(),
            edges: g.edge_count(),
        });
    }
    Ok(())
}

/// Compares `st` edge-for-edge with [`truss_decompose`].
pub fn verify_state(g: &Graph, st: &TrussState) -> Result<Verdict> {
    check_cover(g, st)?;
    Ok(compare_states(g, &truss_decompose(g), st))
}

pub(crate) fn compare_states(g: &Graph, expected: &TrussState, found: &TrussState) -> Verdict {
    let violations: Vec<Violation> = g
        .edge_ids()
        .filter(|&id| expected.get(id) != found.get(id))
        .map(|id| Violation {
            id,
            edge: g.edge(id),
            expected: expected.get(id),
            found: found.get(id),
        })
        .collect();
    if violations.is_empty() && expected.ktmax() == found.ktmax() {
        Verdict::Valid
    } else {
        Verdict::Violations(violations)
    }
}
