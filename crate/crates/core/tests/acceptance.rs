//! Acceptance criteria, one PASS/FAIL/SKIP line each. Runs without the libtest
//! harness so the lines are always printed; exits nonzero if any line is FAIL.

use std::collections::HashSet;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use truss_core::bench::{stream_bench, StreamAlgorithm, StreamBenchConfig};
use truss_core::stream::{
    build_prefix, generate_synthetic, load_temporal_file, Fraction, StreamDataset, SyntheticModel,
};
use truss_core::{truss_decompose, DynamicTruss, Graph, LevelOrder, Variant, VertexId};

const FUZZ_INSERTIONS: usize = 1000;
const MIN_MULTI_LEVEL: usize = 100;
const MIN_DOMINANCE_REPLAY: usize = 500;
const MIN_PARALLEL: usize = 200;
const BATCH_SIZES: [usize; 3] = [1, 10, 100];
const DENSE_TIME_SLACK: f64 = 1.1;
const DENSE_TIMING_REPEATS: usize = 5;
const SPEEDUP_FLOOR_SMALL: f64 = 10.0;
const SPEEDUP_SAMPLES: usize = 100;
const CLIQUES: std::ops::RangeInclusive<u32> = 3..=10;

enum Verdict {
    Pass(String),
    Fail(String),
    Skip(String),
}

struct Dataset {
    name: &'static str,
    ds: StreamDataset,
}

fn datasets() -> Vec<Dataset> {
    vec![
        Dataset {
            name: "uniform(100, 0.1)",
            ds: generate_synthetic(SyntheticModel::Uniform { n: 100, p: 0.1 }, 11).unwrap(),
        },
        Dataset {
            name: "preferential(200, 3)",
            ds: generate_synthetic(SyntheticModel::Preferential { n: 200, m: 3 }, 7).unwrap(),
        },
    ]
}

fn half() -> Fraction {
    "0.5".parse().unwrap()
}

/// Stream events after the prefix, then random absent pairs, until `count`
/// insertions are effective.
fn insertion_plan(ds: &StreamDataset, g: &Graph, count: usize, seed: u64) -> Vec<(VertexId, VertexId)> {
    let n = ds.stats().vertex_count as u32;
    let mut present: HashSet<(u32, u32)> = g.edges().iter().map(|e| (e.u().0, e.v().0)).collect();
    let mut plan = Vec::new();
    let mut effective = 0;
    for ev in build_prefix(ds, half()).remaining {
        plan.push((ev.src, ev.dst));
        let key = (ev.src.0.min(ev.dst.0), ev.src.0.max(ev.dst.0));
        if ev.src != ev.dst && present.insert(key) {
            effective += 1;
        }
        if effective == count {
            return plan;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while effective < count {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a != b && present.insert((a.min(b), a.max(b))) {
            plan.push((VertexId(a), VertexId(b)));
            effective += 1;
        }
    }
    plan
}

#[derive(Default)]
struct FuzzStats {
    insertions: usize,
    oracle_mismatch: Vec<String>,
    delta_violation: Vec<String>,
    containment_violation: Vec<String>,
    multi_level: usize,
    order_mismatch: Vec<String>,
    parallel_checked: usize,
    parallel_mismatch: Vec<String>,
    hcqty_explored: usize,
    jk_explored: usize,
}

fn fuzz(d: &Dataset, seed: u64) -> FuzzStats {
    let prefix = build_prefix(&d.ds, half());
    let base = DynamicTruss::from_graph(prefix.graph, Variant::Hcqty);
    let plan = insertion_plan(&d.ds, base.graph(), FUZZ_INSERTIONS, seed);

    let mut hc = base.clone();
    let mut jk = DynamicTruss::from_graph(base.graph().clone(), Variant::JkInc);
    let mut desc = jk.clone().with_order(LevelOrder::Descending);
    let mut shuf = jk.clone().with_order(LevelOrder::Shuffled(seed));
    let mut par = jk.clone().with_order(LevelOrder::Parallel);
    let mut s = FuzzStats::default();

    for (step, &(a, b)) in plan.iter().enumerate() {
        let before = hc.state().values().to_vec();
        let rh = hc.insert_edge(a, b);
        let rj = jk.insert_edge(a, b);
        let _ = desc.insert_edge(a, b);
        let _ = shuf.insert_edge(a, b);
        let rp = par.insert_edge(a, b);
        let (Ok(rh), Ok(rj)) = (rh, rj) else {
            if hc.state().values() != before || jk.state().values() != before {
                s.oracle_mismatch.push(format!("step {step}: rejected insertion changed the state"));
            }
            continue;
        };
        let rp = rp.unwrap();
        s.insertions += 1;
        s.hcqty_explored += rh.explored;
        s.jk_explored += rj.explored;

        let oracle = truss_decompose(hc.graph());
        let truth = oracle.values();
        for (name, dt) in [("hcqty", &hc), ("jk-inc", &jk)] {
            if dt.state().values() != truth {
                s.oracle_mismatch.push(format!("step {step}: {name} differs from scratch"));
            }
        }

        for (i, &old) in before.iter().enumerate() {
            if truth[i] < old || truth[i] > old + 1 {
                s.delta_violation.push(format!("step {step}: edge {i} {old} -> {}", truth[i]));
            }
        }

        for (name, r) in [("hcqty", &rh), ("jk-inc", &rj)] {
            let ktop = before.iter().copied().max().unwrap_or(0);
            for k in 2..=ktop {
                let explored: HashSet<usize> = r
                    .levels
                    .iter()
                    .filter(|l| l.k == k)
                    .flat_map(|l| l.explored.iter().map(|x| x.index()))
                    .collect();
                let missed = (0..before.len())
                    .filter(|&i| before[i] == k && truth[i] == k + 1 && !explored.contains(&i))
                    .count();
                if missed > 0 {
                    s.containment_violation
                        .push(format!("step {step}: {name} level {k} missed {missed} promoted edges"));
                }
            }
        }

        if rj.levels_run.len() >= 2 {
            s.multi_level += 1;
        }
        for (name, dt) in [("descending", &desc), ("shuffled", &shuf)] {
            if dt.state().values() != jk.state().values() {
                s.order_mismatch.push(format!("step {step}: {name}"));
            }
        }
        s.parallel_checked += 1;
        if par.state().values() != jk.state().values() || rp.new_k != rj.new_k {
            s.parallel_mismatch.push(format!("step {step}"));
        }
    }
    s
}

fn first(v: &[String]) -> String {
    v.first().cloned().unwrap_or_default()
}

struct BatchStats {
    tested: usize,
    /// Per batch size: (batches, batches over the sequential work count).
    by_size: Vec<(usize, usize, usize)>,
    oracle_mismatch: Vec<String>,
    work_violation: Vec<String>,
}

fn batch_runs(all: &[Dataset]) -> BatchStats {
    let mut s = BatchStats {
        tested: 0,
        by_size: BATCH_SIZES.iter().map(|&z| (z, 0, 0)).collect(),
        oracle_mismatch: Vec::new(),
        work_violation: Vec::new(),
    };
    for d in all {
        for &size in &BATCH_SIZES {
            let prefix = build_prefix(&d.ds, half());
            let events: Vec<(VertexId, VertexId)> = prefix.remaining.map(|e| (e.src, e.dst)).collect();
            let mut state = DynamicTruss::from_graph(prefix.graph, Variant::JkInc);
            for (i, chunk) in events.chunks(size).enumerate().take(100) {
                if chunk.len() < size {
                    break;
                }
                let mut seq = state.clone();
                let r = state.insert_batch(chunk);
                let seq_work: usize = chunk
                    .iter()
                    .filter_map(|&(a, b)| seq.insert_edge(a, b).ok())
                    .map(|x| x.work_units)
                    .sum();
                s.tested += 1;
                let slot = s.by_size.iter_mut().find(|x| x.0 == size).unwrap();
                slot.1 += 1;
                let label = format!("{} size {size} batch {i}", d.name);
                if state.state().values() != truss_decompose(state.graph()).values() {
                    s.oracle_mismatch.push(format!("{label}: differs from scratch"));
                }
                if state.state().values() != seq.state().values() {
                    s.oracle_mismatch.push(format!("{label}: differs from sequential"));
                }
                if r.work_units > seq_work {
                    slot.2 += 1;
                    s.work_violation.push(format!("{label}: {} > {seq_work}", r.work_units));
                }
            }
        }
    }
    s
}

/// Fastest of several runs: one batch of 100 on a dense graph, batched and one at a time.
fn dense_batch_timing() -> (f64, f64, usize, usize) {
    let ds = generate_synthetic(SyntheticModel::Uniform { n: 120, p: 0.5 }, 21).unwrap();
    let prefix = build_prefix(&ds, "0.9".parse().unwrap());
    let batch: Vec<(VertexId, VertexId)> = prefix.remaining.take(100).map(|e| (e.src, e.dst)).collect();
    let base = DynamicTruss::from_graph(prefix.graph, Variant::JkInc);
    let (mut best_batch, mut best_seq) = (f64::MAX, f64::MAX);
    let (mut batch_work, mut seq_work) = (0, 0);
    for _ in 0..DENSE_TIMING_REPEATS {
        let mut b = base.clone();
        let t = Instant::now();
        let r = b.insert_batch(&batch);
        best_batch = best_batch.min(t.elapsed().as_secs_f64());
        batch_work = r.work_units;

        let mut s = base.clone();
        let t = Instant::now();
        seq_work = batch.iter().filter_map(|&(x, y)| s.insert_edge(x, y).ok()).map(|r| r.work_units).sum();
        best_seq = best_seq.min(t.elapsed().as_secs_f64());
        assert_eq!(b.state().values(), s.state().values());
    }
    (best_batch, best_seq, batch_work, seq_work)
}

/// Mean over insertions of scratch time / incremental time, after a 95% prefix.
fn mean_speedup(n: u32, p: f64) -> (usize, f64) {
    let ds = generate_synthetic(SyntheticModel::Uniform { n, p }, 1).unwrap();
    let prefix = build_prefix(&ds, "0.95".parse().unwrap());
    let edges = prefix.graph.edge_count();
    let mut dt = DynamicTruss::from_graph(prefix.graph, Variant::JkInc);
    let mut ratios = Vec::new();
    for ev in prefix.remaining {
        if ratios.len() == SPEEDUP_SAMPLES {
            break;
        }
        let Ok(e) = dt.begin_insert(ev.src, ev.dst) else {
            continue;
        };
        let t = Instant::now();
        dt.finish_insert(e);
        let inc = t.elapsed().as_nanos().max(1) as f64;
        let g = dt.graph().clone();
        let t = Instant::now();
        let scratch = truss_decompose(&g);
        let full = t.elapsed().as_nanos() as f64;
        assert_eq!(scratch.values(), dt.state().values());
        ratios.push(full / inc);
    }
    (edges, ratios.iter().sum::<f64>() / ratios.len() as f64)
}

fn snap_dir() -> PathBuf {
    std::env::var_os("TRUSS_DATA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data")))
}

fn snap_replay(file: &str, fraction: &str, count: usize) -> Result<Option<String>, String> {
    let path = snap_dir().join(file);
    if !path.exists() {
        return Ok(None);
    }
    let ds = load_temporal_file(&path).map_err(|e| e.to_string())?;
    let cfg = StreamBenchConfig {
        dataset: file.into(),
        fraction: fraction.parse().map_err(|e| format!("{e}"))?,
        count,
        algorithm: StreamAlgorithm::JkInc,
        verify: true,
        baseline: false,
        parallel_levels: false,
    };
    let report = stream_bench(&ds, &cfg);
    let verified = report.per_insertion.iter().filter(|r| r.verified == Some(true)).count();
    if report.passed() && verified == report.per_insertion.len() && verified == count {
        Ok(Some(format!("{file}: {verified}/{count} verified")))
    } else {
        Err(format!("{file}: {verified}/{count} verified, first failure {:?}", report.first_failure))
    }
}

fn main() -> ExitCode {
    let all = datasets();
    let runs: Vec<FuzzStats> = all.iter().enumerate().map(|(i, d)| fuzz(d, 100 + i as u64)).collect();
    let mut lines: Vec<(&str, Verdict)> = Vec::new();

    let per = |f: &dyn Fn(&FuzzStats) -> String| -> String {
        all.iter().zip(&runs).map(|(d, s)| format!("{}: {}", d.name, f(s))).collect::<Vec<_>>().join("; ")
    };

    let bad: Vec<String> = runs.iter().flat_map(|s| s.oracle_mismatch.clone()).collect();
    let enough = runs.iter().all(|s| s.insertions >= FUZZ_INSERTIONS);
    lines.push((
        "oracle equivalence, single insert",
        if bad.is_empty() && enough {
            Verdict::Pass(per(&|s| format!("{} insertions exact", s.insertions)))
        } else {
            Verdict::Fail(format!("{} mismatches, first {}; {}", bad.len(), first(&bad), per(&|s| s.insertions.to_string())))
        },
    ));

    let batches = batch_runs(&all);
    lines.push((
        "oracle equivalence, batch",
        if batches.oracle_mismatch.is_empty() {
            Verdict::Pass(format!("{} batches of sizes {BATCH_SIZES:?} exact", batches.tested))
        } else {
            Verdict::Fail(format!("{} mismatches, first {}", batches.oracle_mismatch.len(), first(&batches.oracle_mismatch)))
        },
    ));

    let bad: Vec<String> = runs.iter().flat_map(|s| s.delta_violation.clone()).collect();
    lines.push((
        "single-insert delta in {0, 1}",
        if bad.is_empty() {
            Verdict::Pass(per(&|s| format!("{} insertions", s.insertions)))
        } else {
            Verdict::Fail(format!("{} violations, first {}", bad.len(), first(&bad)))
        },
    ));

    let bad: Vec<String> = runs.iter().flat_map(|s| s.order_mismatch.clone()).collect();
    let multi: usize = runs.iter().map(|s| s.multi_level).sum();
    lines.push((
        "level commutativity",
        if bad.is_empty() && multi >= MIN_MULTI_LEVEL {
            Verdict::Pass(per(&|s| format!("{} insertions over >= 2 levels", s.multi_level)))
        } else {
            Verdict::Fail(format!("{} mismatches ({}); multi-level {}", bad.len(), first(&bad), per(&|s| s.multi_level.to_string())))
        },
    ));

    let bad: Vec<String> = runs.iter().flat_map(|s| s.containment_violation.clone()).collect();
    lines.push((
        "containment of promoted edges in explored sets",
        if bad.is_empty() {
            Verdict::Pass(per(&|s| format!("{} insertions, both variants", s.insertions)))
        } else {
            Verdict::Fail(format!("{} violations, first {}", bad.len(), first(&bad)))
        },
    ));

    let ok = runs.iter().all(|s| s.insertions >= MIN_DOMINANCE_REPLAY && s.jk_explored <= s.hcqty_explored);
    let detail = per(&|s| format!("jk-inc {} <= hcqty {}", s.jk_explored, s.hcqty_explored));
    lines.push(("jk-inc explores no more than hcqty", if ok { Verdict::Pass(detail) } else { Verdict::Fail(detail) }));

    let (bt, st, bw, sw) = dense_batch_timing();
    let time_ok = bt <= DENSE_TIME_SLACK * st;
    let work_ok = batches.work_violation.is_empty() && bw <= sw;
    let detail = format!(
        "work: {} of {} stream batches over the sequential count (by size {}; first {}), dense {bw} vs {sw}; dense time {:.4}s vs {:.4}s",
        batches.work_violation.len(),
        batches.tested,
        batches
            .by_size
            .iter()
            .map(|(z, n, over)| format!("{z}: {over}/{n}"))
            .collect::<Vec<_>>()
            .join(", "),
        first(&batches.work_violation),
        bt,
        st
    );
    lines.push((
        "batch work and time bound",
        if work_ok && time_ok { Verdict::Pass(detail) } else { Verdict::Fail(detail) },
    ));

    let (m_small, s_small) = mean_speedup(5_000, 4.0 / 4_999.0);
    let (m_large, s_large) = mean_speedup(50_000, 4.0 / 49_999.0);
    let detail = format!("{m_small} edges: {s_small:.1}x; {m_large} edges: {s_large:.1}x");
    lines.push((
        "speedup grows with graph size",
        if s_small > SPEEDUP_FLOOR_SMALL && s_large > s_small {
            Verdict::Pass(detail)
        } else {
            Verdict::Fail(detail)
        },
    ));

    let snap = [
        snap_replay("email-Eu-core-temporal.txt", "0.05", 100),
        snap_replay("sx-stackoverflow-a2q.txt", "0.05", 20),
    ];
    let verdict = if let Some(Err(e)) = snap.iter().find(|r| r.is_err()) {
        Verdict::Fail(e.clone())
    } else {
        let found: Vec<String> = snap.iter().filter_map(|r| r.clone().ok().flatten()).collect();
        if found.is_empty() {
            Verdict::Skip(format!("no SNAP files under {}", snap_dir().display()))
        } else {
            Verdict::Pass(found.join("; "))
        }
    };
    lines.push(("dataset replay methodology", verdict));

    let mut bad = Vec::new();
    for n in CLIQUES {
        for variant in [Variant::Hcqty, Variant::JkInc] {
            let mut dt = DynamicTruss::new(variant);
            for a in 0..n {
                for b in a + 1..n {
                    dt.insert_edge(VertexId(a), VertexId(b)).unwrap();
                }
            }
            if dt.ktmax() != n || dt.state().values().iter().any(|&k| k != n) {
                bad.push(format!("K{n} {variant}"));
            }
        }
    }
    lines.push((
        "clique law",
        if bad.is_empty() {
            Verdict::Pass("K3..K10, both variants".into())
        } else {
            Verdict::Fail(bad.join(", "))
        },
    ));

    let bad: Vec<String> = runs.iter().flat_map(|s| s.parallel_mismatch.clone()).collect();
    let checked = runs.iter().map(|s| s.parallel_checked).min().unwrap_or(0);
    lines.push((
        "parallel levels equal serial",
        if bad.is_empty() && checked >= MIN_PARALLEL {
            Verdict::Pass(per(&|s| format!("{} insertions", s.parallel_checked)))
        } else {
            Verdict::Fail(format!("{} mismatches, first {}", bad.len(), first(&bad)))
        },
    ));

    let mut failed = 0;
    for (name, v) in &lines {
        match v {
            Verdict::Pass(d) => println!("PASS {name}: {d}"),
            Verdict::Skip(d) => println!("SKIP {name}: {d}"),
            Verdict::Fail(d) => {
                failed += 1;
                println!("FAIL {name}: {d}");
            }
        }
    }
    println!("{} criteria, {failed} failed", lines.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
