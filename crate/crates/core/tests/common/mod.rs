#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use truss_core::{Graph, TrussState, VertexId};

pub type Pair = (u32, u32);

pub fn canon(a: u32, b: u32) -> Pair {
    (a.min(b), a.max(b))
}

/// Erdős–Rényi G(n, p) by flipping a coin per pair, independent of the crate's generators.
pub fn gnp(n: u32, p: f64, seed: u64) -> Vec<Pair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                out.push((a, b));
            }
        }
    }
    out
}

pub fn graph_of(pairs: &[Pair]) -> Graph {
    Graph::from_edges(pairs.iter().copied())
}

fn adjacency(edges: &HashSet<Pair>) -> HashMap<u32, BTreeSet<u32>> {
    let mut adj: HashMap<u32, BTreeSet<u32>> = HashMap::new();
    for &(a, b) in edges {
        adj.entry(a).or_default().insert(b);
        adj.entry(b).or_default().insert(a);
    }
    adj
}

/// Support of every edge by set intersection.
pub fn brute_support(pairs: &[Pair]) -> HashMap<Pair, usize> {
    let edges: HashSet<Pair> = pairs.iter().map(|&(a, b)| canon(a, b)).collect();
    let adj = adjacency(&edges);
    edges
        .iter()
        .map(|&(a, b)| ((a, b), adj[&a].intersection(&adj[&b]).count()))
        .collect()
}

/// Triangles by triple enumeration.
pub fn brute_triangles(pairs: &[Pair]) -> usize {
    let edges: HashSet<Pair> = pairs.iter().map(|&(a, b)| canon(a, b)).collect();
    let mut vs: Vec<u32> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
    vs.sort_unstable();
    vs.dedup();
    let mut n = 0;
    for (i, &a) in vs.iter().enumerate() {
        for (j, &b) in vs.iter().enumerate().skip(i + 1) {
            if !edges.contains(&(a, b)) {
                continue;
            }
            for &c in &vs[j + 1..] {
                if edges.contains(&(a, c)) && edges.contains(&(b, c)) {
                    n += 1;
                }
            }
        }
    }
    n
}

/// Truss numbers by definition: for k = 3, 4, ..., delete edges with fewer
/// than k - 2 triangles among the survivors until stable; an edge's truss
/// number is the last k whose truss still contains it.
pub fn brute_truss(pairs: &[Pair]) -> HashMap<Pair, u32> {
    let mut alive: HashSet<Pair> = pairs.iter().map(|&(a, b)| canon(a, b)).collect();
    let mut k_of: HashMap<Pair, u32> = alive.iter().map(|&e| (e, 2)).collect();
    let mut k = 3;
    while !alive.is_empty() {
        loop {
            let adj = adjacency(&alive);
            let doomed: Vec<Pair> = alive
                .iter()
                .copied()
                .filter(|&(a, b)| adj[&a].intersection(&adj[&b]).count() + 2 < k as usize)
                .collect();
            if doomed.is_empty() {
                break;
            }
            for e in doomed {
                alive.remove(&e);
            }
        }
        for &e in &alive {
            k_of.insert(e, k);
        }
        k += 1;
    }
    k_of
}

/// The state's values keyed by canonical pair.
pub fn keyed(g: &Graph, st: &TrussState) -> HashMap<Pair, u32> {
    g.edge_ids()
        .map(|id| {
            let e = g.edge(id);
            ((e.u().0, e.v().0), st.get(id))
        })
        .collect()
}

pub fn v(x: u32) -> VertexId {
    VertexId(x)
}

/// Random vertex pairs not yet in `g`, at most `count` of them.
pub fn fresh_pairs(g: &Graph, n: u32, count: usize, seed: u64) -> Vec<Pair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut taken: HashSet<Pair> = g.edges().iter().map(|e| (e.u().0, e.v().0)).collect();
    let mut out = Vec::new();
    let total = n as usize * (n as usize - 1) / 2;
    while out.len() < count && taken.len() < total {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a != b && taken.insert(canon(a, b)) {
            out.push(canon(a, b));
        }
    }
    out
}
