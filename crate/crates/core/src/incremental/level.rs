//! One level of the update: explore the `K = k` edges that could move to
//! `k + 1`, prune them to the subset that provably does, report that subset.
//!
//! A level never mutates truss numbers itself; callers apply the promotions.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::decompose::TrussState;
use crate::graph::{EdgeId, Graph};

/// Admission test for `K = k` edges. The open gate admits everything; the
/// truss-degree gate admits an edge only while its truss-degree clears `k - 1`.
#[derive(Debug, Clone, Default)]
pub struct Gate<'a> {
    stored: Option<&'a crate::incremental::TrussDegreeIndex>,
    overlay: HashMap<EdgeId, u32>,
    revoked: HashSet<EdgeId>,
}

impl<'a> Gate<'a> {
    pub fn open() -> Gate<'a> {
        Gate::default()
    }

    /// `overlay` replaces stored truss-degrees for the edges it names.
    pub fn truss_degree(
        index: &'a crate::incremental::TrussDegreeIndex,
        overlay: HashMap<EdgeId, u32>,
    ) -> Gate<'a> {
        Gate {
            stored: Some(index),
            overlay,
            revoked: HashSet::new(),
        }
    }

    /// Whether `id`, currently at truss number `k`, may take part in level `k`.
    #[inline]
    pub fn admits(&self, id: EdgeId, k: u32) -> bool {
        let Some(index) = self.stored else {
            return true;
        };
        if self.revoked.contains(&id) {
            return false;
        }
        match self.overlay.get(&id) {
            Some(&td) => td + 1 >= k,
            None => index.clears(id, k),
        }
    }

    /// Withdraws admission from an edge whose truss number moved during this update.
    pub fn revoke(&mut self, id: EdgeId) {
        if self.stored.is_some() {
            self.revoked.insert(id);
        }
    }
}

/// What a level grows from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Anchor {
    /// A freshly inserted edge without a truss number yet; it qualifies in
    /// every triangle and takes part in pruning but is never promoted.
    Inserted(EdgeId),
    /// An edge already at level `k` (batch updates); it is an ordinary member.
    Pivot(EdgeId),
}

impl Anchor {
    pub fn edge(self) -> EdgeId {
        match self {
            Anchor::Inserted(e) | Anchor::Pivot(e) => e,
        }
    }

    fn pinned(self) -> Option<EdgeId> {
        match self {
            Anchor::Inserted(e) => Some(e),
            Anchor::Pivot(_) => None,
        }
    }
}

#[derive(Clone, Copy)]
pub(crate) struct LevelView<'a> {
    pub g: &'a Graph,
    pub st: &'a TrussState,
    pub gate: &'a Gate<'a>,
    pub anchor: Anchor,
    pub k: u32,
}

impl LevelView<'_> {
    #[inline]
    fn is_pinned(&self, c: EdgeId) -> bool {
        self.anchor.pinned() == Some(c)
    }

    /// A co-edge qualifies if it is above the level, or at the level and admitted.
    #[inline]
    fn qualifies(&self, c: EdgeId) -> bool {
        if self.is_pinned(c) {
            return true;
        }
        let kc = self.st.get(c);
        kc > self.k || (kc == self.k && self.gate.admits(c, kc))
    }

    #[inline]
    fn candidate(&self, c: EdgeId) -> bool {
        !self.is_pinned(c) && self.st.get(c) == self.k && self.gate.admits(c, self.k)
    }

    /// Triangles on `x` whose two other edges both qualify.
    fn qualifying(&self, x: EdgeId) -> impl Iterator<Item = [EdgeId; 2]> + '_ {
        self.g
            .wedges_of(x)
            .filter(move |w| self.qualifies(w.first) && self.qualifies(w.second))
            .map(|w| [w.first, w.second])
    }

    /// Relevant support count of the anchor at this level.
    pub fn anchor_support(&self) -> u32 {
        self.qualifying(self.anchor.edge()).count() as u32
    }
}

/// The explored set `S` of one level with its relevant support counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSet {
    pub k: u32,
    pub anchor: Anchor,
    /// Members in exploration order.
    pub members: Vec<EdgeId>,
    /// Relevant support count per member, parallel to `members`.
    pub relevant_support: Vec<u32>,
    /// Relevant support count of an inserted anchor (equal to the pivot's
    /// entry in `relevant_support` for [`Anchor::Pivot`]).
    pub inserted_edge_rsc: u32,
    slot: HashMap<EdgeId, usize>,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, id: EdgeId) -> bool {
        self.slot.contains_key(&id)
    }

    pub fn support_of(&self, id: EdgeId) -> Option<u32> {
        self.slot.get(&id).map(|&i| self.relevant_support[i])
    }
}

/// Result of pruning a [`CandidateSet`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pruned {
    /// Surviving members, ascending by id.
    pub survivors: Vec<EdgeId>,
    /// Members removed, in eviction order.
    pub evicted: Vec<EdgeId>,
    /// Whether an inserted anchor fell below the threshold itself.
    pub anchor_evicted: bool,
    pub inserted_edge_rsc: u32,
}

pub(crate) fn explore(view: LevelView<'_>) -> CandidateSet {
    let mut cs = CandidateSet {
        k: view.k,
        anchor: view.anchor,
        members: Vec::new(),
        relevant_support: Vec::new(),
        inserted_edge_rsc: 0,
        slot: HashMap::new(),
    };
    let mut layer: Vec<EdgeId> = match view.anchor {
        Anchor::Inserted(e) => {
            let mut seeds = Vec::new();
            for [a, b] in view.qualifying(e) {
                cs.inserted_edge_rsc += 1;
                // only triangles whose min-truss number is exactly k seed the search
                for c in [a, b] {
                    if view.candidate(c) {
                        seeds.push(c);
                    }
                }
            }
            seeds.sort_unstable();
            seeds.dedup();
            seeds
        }
        Anchor::Pivot(b) => vec![b],
    };
    for &s in &layer {
        cs.slot.insert(s, cs.members.len());
        cs.members.push(s);
        cs.relevant_support.push(0);
    }
    // breadth-first, each layer in id order
    while !layer.is_empty() {
        let mut next = Vec::new();
        for &x in &layer {
            let mut rs = 0;
            for [a, b] in view.qualifying(x) {
                rs += 1;
                for c in [a, b] {
                    if view.candidate(c) && !cs.slot.contains_key(&c) {
                        cs.slot.insert(c, cs.members.len());
                        cs.members.push(c);
                        cs.relevant_support.push(0);
                        next.push(c);
                    }
                }
            }
            cs.relevant_support[cs.slot[&x]] = rs;
        }
        next.sort_unstable();
        layer = next;
    }
    if let Anchor::Pivot(b) = view.anchor {
        cs.inserted_edge_rsc = cs.relevant_support[cs.slot[&b]];
    }
    cs
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Pending {
    Member(usize),
    Anchor,
}

/// Cascading eviction down to the fixpoint where every survivor (and an
/// inserted anchor, if it survives) keeps at least `k - 1` relevant triangles.
pub(crate) fn prune(view: LevelView<'_>, cs: &CandidateSet) -> Pruned {
    let threshold = view.k - 1;
    let mut support = cs.relevant_support.clone();
    let mut anchor_support = cs.inserted_edge_rsc;
    let n = cs.members.len();
    let mut queued = vec![false; n];
    let mut gone = vec![false; n];
    let mut anchor_queued = false;
    let mut anchor_gone = false;
    let mut queue: VecDeque<Pending> = VecDeque::new();

    for i in 0..n {
        if support[i] < threshold {
            queued[i] = true;
            queue.push_back(Pending::Member(i));
        }
    }
    let inserted = matches!(view.anchor, Anchor::Inserted(_));
    if inserted && anchor_support < threshold {
        anchor_queued = true;
        queue.push_back(Pending::Anchor);
    }

    let mut evicted = Vec::new();
    while let Some(item) = queue.pop_front() {
        let x = match item {
            Pending::Member(i) => cs.members[i],
            Pending::Anchor => view.anchor.edge(),
        };
        for co in view.qualifying(x) {
            // a triangle dies with the first of its S ∪ {e} edges to leave
            let live = co.iter().all(|&c| {
                if view.is_pinned(c) {
                    !anchor_gone
                } else if let Some(&j) = cs.slot.get(&c) {
                    !gone[j]
                } else {
                    true
                }
            });
            if !live {
                continue;
            }
            for c in co {
                if view.is_pinned(c) {
                    anchor_support -= 1;
                    if anchor_support < threshold && !anchor_queued {
                        anchor_queued = true;
                        queue.push_back(Pending::Anchor);
                    }
                } else if let Some(&j) = cs.slot.get(&c) {
                    support[j] -= 1;
                    if support[j] < threshold && !queued[j] {
                        queued[j] = true;
                        queue.push_back(Pending::Member(j));
                    }
                }
            }
        }
        match item {
            Pending::Member(i) => {
                gone[i] = true;
                evicted.push(x);
            }
            Pending::Anchor => anchor_gone = true,
        }
    }

    let mut survivors: Vec<EdgeId> = (0..n).filter(|&i| !gone[i]).map(|i| cs.members[i]).collect();
    survivors.sort_unstable();
    Pruned {
        survivors,
        evicted,
        anchor_evicted: anchor_gone,
        inserted_edge_rsc: anchor_support,
    }
}

/// Outcome of one level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelOutcome {
    pub k: u32,
    /// False when the anchor's relevant support ruled the level out.
    pub ran: bool,
    /// Every explored member, ascending by id.
    pub explored: Vec<EdgeId>,
    pub evicted: usize,
    /// Edges to move from `k` to `k + 1`, ascending by id.
    pub promoted: Vec<EdgeId>,
}

impl LevelOutcome {
    pub fn work_units(&self) -> usize {
        self.explored.len() + self.evicted
    }
}

pub(crate) fn run(view: LevelView<'_>) -> LevelOutcome {
    let k = view.k;
    if k < 2 || view.anchor_support() < k - 1 {
        return LevelOutcome {
            k,
            ran: false,
            explored: Vec::new(),
            evicted: 0,
            promoted: Vec::new(),
        };
    }
    let cs = explore(view);
    let pruned = prune(view, &cs);
    let mut explored = cs.members;
    explored.sort_unstable();
    LevelOutcome {
        k,
        ran: true,
        explored,
        evicted: pruned.evicted.len(),
        promoted: pruned.survivors,
    }
}
