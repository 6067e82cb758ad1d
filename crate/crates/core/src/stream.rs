//! Temporal edge streams: SNAP-style edge lists, timestamp prefixes and
//! seeded synthetic generators.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TrussError};
use crate::graph::{Edge, Graph, VertexId};

/// One line of a temporal edge list, with its original labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TemporalEdge {
    pub src: u64,
    pub dst: u64,
    pub timestamp: i64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamStats {
    pub raw_count: usize,
    pub distinct_simple_edges: usize,
    pub self_loop_count: usize,
    /// Non-loop events whose undirected pair already occurred earlier.
    pub duplicate_count: usize,
    pub vertex_count: usize,
}

/// Timestamp-ordered events with labels remapped to dense vertex ids.
///
/// Ids are handed out in order of first appearance in the sorted stream.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StreamDataset {
    events: Vec<TemporalEdge>,
    pairs: Vec<(VertexId, VertexId)>,
    labels: Vec<u64>,
    label_map: HashMap<u64, VertexId>,
    stats: StreamStats,
}

impl StreamDataset {
    /// Stable-sorts `events` by timestamp and indexes them.
    pub fn from_events(mut events: Vec<TemporalEdge>) -> StreamDataset {
        events.sort_by_key(|e| e.timestamp);
        let mut labels = Vec::new();
        let mut label_map = HashMap::new();
        let mut id_of = |label: u64| {
            *label_map.entry(label).or_insert_with(|| {
                labels.push(label);
                VertexId(labels.len() as u32 - 1)
            })
        };
        let pairs: Vec<(VertexId, VertexId)> =
            events.iter().map(|e| (id_of(e.src), id_of(e.dst))).collect();

        let mut seen: HashSet<Edge> = HashSet::new();
        let mut stats = StreamStats {
            raw_count: events.len(),
            vertex_count: labels.len(),
            ..StreamStats::default()
        };
        for &(a, b) in &pairs {
            match Edge::new(a, b) {
                None => stats.self_loop_count += 1,
                Some(edge) if seen.insert(edge) => stats.distinct_simple_edges += 1,
                Some(_) => stats.duplicate_count += 1,
            }
        }
        StreamDataset {
            events,
            pairs,
            labels,
            label_map,
            stats,
        }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn events(&self) -> &[TemporalEdge] {
        &self.events
    }

    /// Dense endpoints of every event, parallel to [`StreamDataset::events`].
    pub fn pairs(&self) -> &[(VertexId, VertexId)] {
        &self.pairs
    }

    pub fn stats(&self) -> &StreamStats {
        &self.stats
    }

    pub fn label(&self, v: VertexId) -> u64 {
        self.labels[v.index()]
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn vertex(&self, label: u64) -> Option<VertexId> {
        self.label_map.get(&label).copied()
    }

    /// Number of events in the prefix covering `fraction` of the raw stream.
    pub fn prefix_len(&self, fraction: Fraction) -> usize {
        fraction.of(self.events.len())
    }
}

/// Parses whitespace-separated `SRC DST [TIMESTAMP]` lines.
///
/// Lines starting with `#` and blank lines are skipped. Without a timestamp
/// column an event is stamped with its line number.
pub fn load_temporal_edges<R: BufRead>(reader: R) -> Result<StreamDataset> {
    let mut events = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = text.split_whitespace().collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(TrussError::Parse {
                line: lineno,
                message: format!("expected 2 or 3 columns, found {}", fields.len()),
            });
        }
        let field = |j: usize, what: &str| -> Result<i128> {
            fields[j].parse::<i128>().map_err(|_| TrussError::Parse {
                line: lineno,
                message: format!("bad {what} {:?}", fields[j]),
            })
        };
        let label = |j: usize, what: &str| -> Result<u64> {
            u64::try_from(field(j, what)?).map_err(|_| TrussError::Parse {
                line: lineno,
                message: format!("{what} {:?} is not a non-negative label", fields[j]),
            })
        };
        let src = label(0, "source")?;
        let dst = label(1, "target")?;
        let timestamp = if fields.len() == 3 {
            i64::try_from(field(2, "timestamp")?).map_err(|_| TrussError::Parse {
                line: lineno,
                message: format!("timestamp {:?} out of range", fields[2]),
            })?
        } else {
            lineno as i64
        };
        events.push(TemporalEdge {
            src,
            dst,
            timestamp,
        });
    }
    Ok(StreamDataset::from_events(events))
}

pub fn load_temporal_file(path: &Path) -> Result<StreamDataset> {
    let file = File::open(path).map_err(|source| TrussError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    load_temporal_edges(BufReader::new(file))
}

/// Writes `events` back out as `SRC DST TIMESTAMP` lines.
pub fn write_temporal_edges<W: Write>(mut out: W, events: &[TemporalEdge]) -> Result<()> {
    for e in events {
        writeln!(out, "{} {} {}", e.src, e.dst, e.timestamp)?;
    }
    out.flush()?;
    Ok(())
}

/// An exact rational in `(0, 1]`, written as `0.05`, `5%` or `1/20`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fraction {
    num: u64,
    den: u64,
}

impl Fraction {
    pub fn new(num: u64, den: u64) -> Result<Fraction> {
        if den == 0 || num == 0 || num > den {
            return Err(TrussError::InvalidParameter(format!(
                "fraction {num}/{den} is not in (0, 1]"
            )));
        }
        Ok(Fraction { num, den })
    }

    pub fn whole() -> Fraction {
        Fraction { num: 1, den: 1 }
    }

    pub fn numerator(self) -> u64 {
        self.num
    }

    pub fn denominator(self) -> u64 {
        self.den
    }

    /// `floor(self * count)`.
    pub fn of(self, count: usize) -> usize {
        (count as u128 * self.num as u128 / self.den as u128) as usize
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Fraction {
    type Err = TrussError;

    fn from_str(s: &str) -> Result<Fraction> {
        let bad = || TrussError::InvalidParameter(format!("cannot parse fraction {s:?}"));
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let num = n.trim().parse().map_err(|_| bad())?;
            let den = d.trim().parse().map_err(|_| bad())?;
            return Fraction::new(num, den);
        }
        let (body, scale) = match s.strip_suffix('%') {
            Some(body) => (body.trim(), 100u64),
            None => (s, 1),
        };
        let (int, frac) = body.split_once('.').unwrap_or((body, ""));
        if int.is_empty() && frac.is_empty()
            || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())
            || frac.len() > 18
        {
            return Err(bad());
        }
        let den = 10u64.pow(frac.len() as u32).checked_mul(scale).ok_or_else(bad)?;
        let digits = format!("{int}{frac}");
        let num: u64 = if digits.is_empty() { 0 } else { digits.parse().map_err(|_| bad())? };
        let g = gcd(num, den);
        Fraction::new(num / g.max(1), den / g.max(1))
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// One post-prefix event, as seen by a replay.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamEvent {
    /// Position in the sorted stream.
    pub index: usize,
    pub src: VertexId,
    pub dst: VertexId,
    pub timestamp: i64,
}

/// Events after the prefix, in stream order. Duplicates are not filtered
/// here; the consumer sees them against its own growing graph.
#[derive(Debug, Clone)]
pub struct Remaining<'a> {
    ds: &'a StreamDataset,
    next: usize,
}

impl Iterator for Remaining<'_> {
    type Item = StreamEvent;

    fn next(&mut self) -> Option<StreamEvent> {
        let i = self.next;
        let &(src, dst) = self.ds.pairs.get(i)?;
        self.next += 1;
        Some(StreamEvent {
            index: i,
            src,
            dst,
            timestamp: self.ds.events[i].timestamp,
        })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.ds.len() - self.next;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Remaining<'_> {}

/// Static graph over the first `fraction` of the events.
#[derive(Debug, Clone)]
pub struct Prefix<'a> {
    pub graph: Graph,
    /// Raw events consumed, loops and repeats included.
    pub events: usize,
    pub remaining: Remaining<'a>,
}

pub fn build_prefix(ds: &StreamDataset, fraction: Fraction) -> Prefix<'_> {
    let events = ds.prefix_len(fraction);
    let mut graph = Graph::with_vertices(ds.stats.vertex_count);
    for &(a, b) in &ds.pairs[..events] {
        graph.add_edge(a, b);
    }
    Prefix {
        graph,
        events,
        remaining: Remaining { ds, next: events },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SyntheticModel {
    /// Every pair independently with probability `p`, streamed in random order.
    Uniform { n: u32, p: f64 },
    /// Preferential attachment: each new vertex links to `m` distinct
    /// existing ones chosen proportionally to degree.
    Preferential { n: u32, m: u32 },
}

impl fmt::Display for SyntheticModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SyntheticModel::Uniform { n, p } => write!(f, "uniform:{n}:{p}"),
            SyntheticModel::Preferential { n, m } => write!(f, "preferential:{n}:{m}"),
        }
    }
}

impl FromStr for SyntheticModel {
    type Err = TrussError;

    /// `uniform:N:P` or `preferential:N:M`.
    fn from_str(s: &str) -> Result<SyntheticModel> {
        let bad = || {
            TrussError::InvalidParameter(format!(
                "expected uniform:N:P or preferential:N:M, got {s:?}"
            ))
        };
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let [kind, n, x] = parts[..] else {
            return Err(bad());
        };
        let n: u32 = n.parse().map_err(|_| bad())?;
        let model = match kind.to_ascii_lowercase().as_str() {
            "uniform" | "gnp" => SyntheticModel::Uniform {
                n,
                p: x.parse().map_err(|_| bad())?,
            },
            "preferential" | "ba" => SyntheticModel::Preferential {
                n,
                m: x.parse().map_err(|_| bad())?,
            },
            _ => return Err(bad()),
        };
        model.validate()?;
        Ok(model)
    }
}

impl SyntheticModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SyntheticModel::Uniform { p, .. } if !(0.0..=1.0).contains(&p) => Err(
                TrussError::InvalidParameter(format!("edge probability {p} is not in [0, 1]")),
            ),
            SyntheticModel::Preferential { n, m } if m == 0 || m >= n => {
                Err(TrussError::InvalidParameter(format!(
                    "attachment count m = {m} must satisfy 0 < m < n = {n}"
                )))
            }
            _ => Ok(()),
        }
    }
}

/// Deterministic stream for `(model, seed)`; timestamps are generation order.
pub fn generate_synthetic(model: SyntheticModel, seed: u64) -> Result<StreamDataset> {
    model.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs = match model {
        SyntheticModel::Uniform { n, p } => {
            let mut pairs = uniform_pairs(n, p, &mut rng);
            pairs.shuffle(&mut rng);
            pairs
        }
        SyntheticModel::Preferential { n, m } => preferential_pairs(n, m, &mut rng),
    };
    let events = pairs
        .into_iter()
        .enumerate()
        .map(|(t, (a, b))| TemporalEdge {
            src: a as u64,
            dst: b as u64,
            timestamp: t as i64,
        })
        .collect();
    Ok(StreamDataset::from_events(events))
}

/// Geometric skipping over the pairs `(w, v)`, `w < v`.
fn uniform_pairs(n: u32, p: f64, rng: &mut ChaCha8Rng) -> Vec<(u32, u32)> {
    let mut pairs = Vec::new();
    if p <= 0.0 || n < 2 {
        return pairs;
    }
    if p >= 1.0 {
        for v in 1..n {
            for w in 0..v {
                pairs.push((w, v));
            }
        }
        return pairs;
    }
    let lp = (1.0 - p).ln();
    let (mut v, mut w): (i64, i64) = (1, -1);
    let n = n as i64;
    while v < n {
        let r: f64 = rng.gen();
        w += 1 + ((1.0 - r).ln() / lp).floor() as i64;
        while w >= v && v < n {
            w -= v;
            v += 1;
        }
        if v < n {
            pairs.push((w as u32, v as u32));
        }
    }
    pairs
}

fn preferential_pairs(n: u32, m: u32, rng: &mut ChaCha8Rng) -> Vec<(u32, u32)> {
    let mut pairs = Vec::with_capacity(((n - m) * m) as usize);
    let mut targets: Vec<u32> = (0..m).collect();
    let mut repeated: Vec<u32> = Vec::new();
    for source in m..n {
        for &t in &targets {
            pairs.push((source, t));
        }
        repeated.extend_from_slice(&targets);
        repeated.extend(std::iter::repeat_n(source, m as usize));
        let mut chosen: Vec<u32> = Vec::with_capacity(m as usize);
        while chosen.len() < m as usize {
            let x = repeated[rng.gen_range(0..repeated.len())];
            if !chosen.contains(&x) {
                chosen.push(x);
            }
        }
        targets = chosen;
    }
    pairs
}
