//! Dynamic graph stream model: stream tokens, universes, derived-update
//! rules, and the space/communication meter.
//!
//! The input is a stream of edge insertions and deletions. Every protocol
//! defines one or more tuple universes and a rule mapping each stream token
//! (or certificate element) to a set of wildcard patterns; the verifier
//! folds those patterns into its sketches while the honest prover mirrors
//! them into exact sparse vectors.

use crate::field::{Coord, FieldElem, GridParams, LdeSketch, Pattern};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StreamError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("vertex id {id} out of range for n = {n}")]
    VertexOutOfRange { id: usize, n: usize },
    #[error("edge ({i}, {j}) has final multiplicity {mult}, expected 0 or 1")]
    BadMultiplicity { i: usize, j: usize, mult: i64 },
    #[error("edge ({i}, {j}) deleted with weight {got} but inserted with {expect}")]
    NonAtomicWeight { i: usize, j: usize, got: u64, expect: u64 },
    #[error("self-loop ({v}, {v}) is not allowed")]
    SelfLoop { v: usize },
    #[error("{0}")]
    Invalid(String),
}

/// One dynamic stream token: edge endpoints (normalized to `i < j` on
/// ingestion), an optional weight, and a +1/-1 delta. Weight updates are
/// atomic: an edge is inserted or deleted together with its full weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamUpdate {
    pub i: usize,
    pub j: usize,
    pub w: Option<u64>,
    pub delta: i8,
}

impl StreamUpdate {
    pub fn new(a: usize, b: usize, w: Option<u64>, delta: i8) -> Result<Self, StreamError> {
        if a == b {
            return Err(StreamError::SelfLoop { v: a });
        }
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        Ok(StreamUpdate { i, j, w, delta })
    }
}

/// A materialized simple graph, the result of replaying a well-formed
/// stream. `edges` is sorted by `(i, j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    pub n: usize,
    pub edges: Vec<(usize, usize, u64)>,
}

impl Graph {
    pub fn from_updates(n: usize, updates: &[StreamUpdate]) -> Result<Graph, StreamError> {
        let mut mult: HashMap<(usize, usize), (i64, u64)> = HashMap::new();
        for u in updates {
            if u.i >= n || u.j >= n {
                return Err(StreamError::VertexOutOfRange {
                    id: u.i.max(u.j),
                    n,
                });
            }
            let w = u.w.unwrap_or(1);
            let entry = mult.entry((u.i, u.j)).or_insert((0, w));
            if entry.1 != w {
                return Err(StreamError::NonAtomicWeight {
                    i: u.i,
                    j: u.j,
                    got: w,
                    expect: entry.1,
                });
            }
            entry.0 += u.delta as i64;
        }
        let mut edges = Vec::new();
        for (&(i, j), &(m, w)) in &mult {
            match m {
                0 => {}
                1 => edges.push((i, j, w)),
                _ => return Err(StreamError::BadMultiplicity { i, j, mult: m }),
            }
        }
        edges.sort_unstable();
        Ok(Graph { n, edges })
    }

    pub fn to_updates(&self) -> Vec<StreamUpdate> {
        self.edges
            .iter()
            .map(|&(i, j, w)| StreamUpdate {
                i,
                j,
                w: Some(w),
                delta: 1,
            })
            .collect()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let key = (a.min(b), a.max(b));
        self.edges
            .binary_search_by_key(&key, |&(i, j, _)| (i, j))
            .is_ok()
    }

    pub fn weight(&self, a: usize, b: usize) -> Option<u64> {
        let key = (a.min(b), a.max(b));
        self.edges
            .binary_search_by_key(&key, |&(i, j, _)| (i, j))
            .ok()
            .map(|k| self.edges[k].2)
    }

    pub fn max_weight(&self) -> u64 {
        self.edges.iter().map(|e| e.2).max().unwrap_or(1)
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(i, j, _) in &self.edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        adj
    }
}

/// Stream file format: one token per line, `E i j [w] delta`, with `#`
/// comments and a `N n` header fixing the vertex count. Disjointness
/// instances use `X i` / `Y i` lines listing the set bits of each vector.
pub fn parse_stream_file(text: &str) -> Result<(usize, Vec<StreamUpdate>), StreamError> {
    let mut n = 0usize;
    let mut updates = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let bad = |msg: &str| StreamError::Parse {
            line: lineno + 1,
            msg: msg.to_string(),
        };
        match parts[0] {
            "N" => {
                n = parts
                    .get(1)
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| bad("expected `N n`"))?;
            }
            "E" => {
                let i: usize = parts
                    .get(1)
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| bad("bad endpoint"))?;
                let j: usize = parts
                    .get(2)
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| bad("bad endpoint"))?;
                let (w, delta) = match parts.len() {
                    4 => (None, parts[3]),
                    5 => (
                        Some(
                            parts[3]
                                .parse::<u64>()
                                .map_err(|_| bad("bad weight"))?,
                        ),
                        parts[4],
                    ),
                    _ => return Err(bad("expected `E i j [w] delta`")),
                };
                let delta: i8 = match delta {
                    "+1" | "1" => 1,
                    "-1" => -1,
                    _ => return Err(bad("delta must be +1 or -1")),
                };
                updates.push(StreamUpdate::new(i, j, w, delta)?);
            }
            other => return Err(bad(&format!("unknown token `{other}`"))),
        }
    }
    if n == 0 {
        let max_id = updates.iter().map(|u| u.j).max().map_or(0, |v| v + 1);
        n = max_id;
    }
    Ok((n, updates))
}

pub fn emit_stream_file(n: usize, updates: &[StreamUpdate]) -> String {
    let mut out = String::new();
    out.push_str(&format!("N {n}\n"));
    for u in updates {
        match u.w {
            Some(w) => out.push_str(&format!("E {} {} {} {:+}\n", u.i, u.j, w, u.delta)),
            None => out.push_str(&format!("E {} {} {:+}\n", u.i, u.j, u.delta)),
        }
    }
    out
}

/// Parses a disjointness instance: `X i` / `Y i` lines, optional `N n`.
pub fn parse_disj_file(text: &str) -> Result<(usize, Vec<usize>, Vec<usize>), StreamError> {
    let mut n = 0usize;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let bad = |msg: &str| StreamError::Parse {
            line: lineno + 1,
            msg: msg.to_string(),
        };
        let arg = |k: usize| -> Result<usize, StreamError> {
            parts
                .get(k)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad("expected an index"))
        };
        match parts[0] {
            "N" => n = arg(1)?,
            "X" => xs.push(arg(1)?),
            "Y" => ys.push(arg(1)?),
            other => return Err(bad(&format!("unknown token `{other}`"))),
        }
    }
    if n == 0 {
        n = xs.iter().chain(ys.iter()).max().map_or(0, |&v| v + 1);
    }
    Ok((n, xs, ys))
}

// ---------------------------------------------------------------------------
// Instance generators. All deterministic per seed.
// ---------------------------------------------------------------------------

pub fn gen_random_graph(n: usize, p: f64, max_w: u64, seed: u64) -> Vec<StreamUpdate> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut updates = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < p {
                let w = if max_w <= 1 {
                    None
                } else {
                    Some(1 + rng.next_u64() % max_w)
                };
                updates.push(StreamUpdate::new(i, j, w, 1).unwrap());
            }
        }
    }
    // churn: insert-then-delete a few extra edges so streams are genuinely
    // dynamic
    let present: std::collections::HashSet<(usize, usize)> =
        updates.iter().map(|u| (u.i, u.j)).collect();
    let mut extra = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if !present.contains(&(i, j)) && rng.random::<f64>() < 0.1 {
                let w = if max_w <= 1 {
                    None
                } else {
                    Some(1 + rng.next_u64() % max_w)
                };
                extra.push(StreamUpdate::new(i, j, w, 1).unwrap());
                extra.push(StreamUpdate::new(i, j, w, -1).unwrap());
            }
        }
    }
    updates.extend(extra);
    // deterministic shuffle of token order
    for k in (1..updates.len()).rev() {
        let swap = (rng.next_u64() as usize) % (k + 1);
        updates.swap(k, swap);
    }
    updates
}

/// Random bipartite graph: vertices `0..half` on the left, `half..n` on the
/// right, edges only across.
pub fn gen_bipartite_graph(n: usize, p: f64, max_w: u64, seed: u64) -> Vec<StreamUpdate> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let half = n / 2;
    let mut updates = Vec::new();
    for i in 0..half {
        for j in half..n {
            if rng.random::<f64>() < p {
                let w = if max_w <= 1 {
                    None
                } else {
                    Some(1 + rng.next_u64() % max_w)
                };
                updates.push(StreamUpdate::new(i, j, w, 1).unwrap());
            }
        }
    }
    updates
}

/// Complete weighted graph whose weights satisfy the triangle inequality:
/// distances between random points on an integer line.
pub fn gen_metric_graph(n: usize, span: u64, seed: u64) -> Vec<StreamUpdate> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n);
    while points.len() < n {
        let x = rng.next_u64() % span;
        if !points.contains(&x) {
            points.push(x);
        }
    }
    let mut updates = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let w = points[i].abs_diff(points[j]).max(1);
            updates.push(StreamUpdate::new(i, j, Some(w), 1).unwrap());
        }
    }
    updates
}

/// Complete graph with weights drawn uniformly from `[hi/2, hi]`; any
/// such band satisfies the triangle inequality outright, which keeps the
/// weight coordinate of the flattened dual universes small.
pub fn gen_metric_band(n: usize, hi: u64, seed: u64) -> Vec<StreamUpdate> {
    let lo = hi / 2 + hi % 2;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut updates = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let w = lo + rng.next_u64() % (hi - lo + 1);
            updates.push(StreamUpdate::new(i, j, Some(w), 1).unwrap());
        }
    }
    updates
}

pub fn gen_disj_pair(n: usize, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let xs: Vec<usize> = (0..n).filter(|_| rng.random::<f64>() < 0.3).collect();
    let ys: Vec<usize> = (0..n).filter(|_| rng.random::<f64>() < 0.3).collect();
    (xs, ys)
}

// ---------------------------------------------------------------------------
// Universes and derived updates
// ---------------------------------------------------------------------------

/// A tuple universe: named coordinate ranges on a grid, plus the semantic
/// member count (members can be a strict subset of the coordinate product
/// when a membership predicate couples coordinates; non-members are simply
/// never updated).
#[derive(Clone, Debug)]
pub struct Universe {
    pub name: &'static str,
    pub grid: GridParams,
    pub member_count: u64,
}

/// Sum-check layout selector: binary grid with `ceil(log2 u)` rounds, or a
/// `gamma`-round grid with branching factor about `u^(1/gamma)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    LogRound,
    ConstRound(usize),
}

impl Mode {
    pub fn grid(self, radices: &[u64]) -> Result<GridParams, StreamError> {
        match self {
            Mode::LogRound => Ok(GridParams::log_round(radices)),
            Mode::ConstRound(gamma) => GridParams::const_round(radices, gamma).map_err(|_| {
                StreamError::Invalid(format!(
                    "const-round mode with {gamma} rounds cannot host {} coordinates",
                    radices.len()
                ))
            }),
        }
    }
}

fn binom2(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

impl Universe {
    /// Flat universe `[u]`.
    pub fn flat(name: &'static str, u: u64, mode: Mode) -> Result<Universe, StreamError> {
        Ok(Universe {
            name,
            grid: mode.grid(&[u])?,
            member_count: u,
        })
    }

    /// Ordered triples `(i, j, k)` with `i < j < k` inside an `n^3` grid.
    pub fn triangles(n: usize, mode: Mode) -> Result<Universe, StreamError> {
        let m = n as u64;
        Ok(Universe {
            name: "triangles",
            grid: mode.grid(&[m, m, m])?,
            member_count: m * m.saturating_sub(1) * m.saturating_sub(2) / 6,
        })
    }

    /// Ordered pairs `(i, j)` with `i < j` inside an `n^2` grid.
    pub fn pairs(n: usize, mode: Mode) -> Result<Universe, StreamError> {
        let m = n as u64;
        Ok(Universe {
            name: "pairs",
            grid: mode.grid(&[m, m])?,
            member_count: binom2(m),
        })
    }

    /// Pairs with a component label: `(i, j, k)`, `i < j`, `k` in
    /// `[labels]`.
    pub fn labeled_pairs(n: usize, labels: usize, mode: Mode) -> Result<Universe, StreamError> {
        let m = n as u64;
        Ok(Universe {
            name: "labeled-pairs",
            grid: mode.grid(&[m, m, labels as u64])?,
            member_count: binom2(m) * labels as u64,
        })
    }

    /// Directed pairs `(out, in)` over `n^2`, used for tree-edge replays.
    pub fn directed_pairs(n: usize, mode: Mode) -> Result<Universe, StreamError> {
        let m = n as u64;
        Ok(Universe {
            name: "directed-pairs",
            grid: mode.grid(&[m, m])?,
            member_count: m * m,
        })
    }
}

/// One derived vector: the verifier's sketch and the honest prover's exact
/// mirror, fed by the same update patterns.
#[derive(Clone, Debug)]
pub struct DerivedVector {
    pub universe: Universe,
    pub sketch: LdeSketch,
    pub exact: HashMap<u64, i64>,
}

impl DerivedVector {
    pub fn new(universe: Universe, rng: &mut impl RngCore) -> DerivedVector {
        let sketch = LdeSketch::new(universe.grid.clone(), rng);
        DerivedVector {
            universe,
            sketch,
            exact: HashMap::new(),
        }
    }

    pub fn apply(&mut self, pattern: &[Coord], delta: i64) {
        if delta == 0 {
            return;
        }
        self.sketch.update_pattern(pattern, delta);
        for idx in self.universe.grid.expand_pattern(pattern) {
            let e = self.exact.entry(idx).or_insert(0);
            *e += delta;
            if *e == 0 {
                self.exact.remove(&idx);
            }
        }
    }

    pub fn apply_tuple(&mut self, tuple: &[u64], delta: i64) {
        let pattern: Pattern = tuple.iter().map(|&v| Coord::Fix(v)).collect();
        self.apply(&pattern, delta);
    }

    /// Exact count of members whose frequency is in `targets`
    /// (prover-side; the verifier learns it only through the sum-check).
    pub fn count_frequencies(&self, targets: &[i64]) -> u64 {
        let zero_counted = targets.contains(&0);
        let mut count = self
            .exact
            .values()
            .filter(|&&v| v != 0 && targets.contains(&v))
            .count() as u64;
        if zero_counted {
            let nonzero = self.exact.values().filter(|&&v| v != 0).count() as u64;
            count += self.universe.member_count - nonzero;
        }
        count
    }

    pub fn sketch_value(&self) -> FieldElem {
        self.sketch.value()
    }
}

/// Strict canonical-order replay check. Returns the position of the first
/// violation: a repeated or out-of-order key means a malformed certificate.
pub fn replay_canonical_check<K: Ord>(keys: impl IntoIterator<Item = K>) -> Result<(), usize> {
    let mut prev: Option<K> = None;
    for (pos, k) in keys.into_iter().enumerate() {
        if let Some(p) = &prev {
            if *p >= k {
                return Err(pos);
            }
        }
        prev = Some(k);
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Shared derived-update rules
// ---------------------------------------------------------------------------

/// Triangle counting: edge `(i, j)` touches the three pattern slices
/// `(i, *, j)`, `(*, i, j)` and `(i, j, *)` of the ordered-triple universe,
/// together covering the `n - 2` triangles containing the edge.
pub fn triangle_patterns(n: usize, i: usize, j: usize) -> Vec<Pattern> {
    let (i, j, n) = (i as u64, j as u64, n as u64);
    debug_assert!(i < j && j < n);
    let mut out = Vec::with_capacity(3);
    if j > i + 1 {
        out.push(vec![Coord::Fix(i), Coord::Span(i + 1, j - 1), Coord::Fix(j)]);
    }
    if i > 0 {
        out.push(vec![Coord::Span(0, i - 1), Coord::Fix(i), Coord::Fix(j)]);
    }
    if j + 1 < n {
        out.push(vec![Coord::Fix(i), Coord::Fix(j), Coord::Span(j + 1, n - 1)]);
    }
    out
}

/// Patterns covering every ordered pair containing vertex `v`:
/// `(v, *)` over `j > v` and `(*, v)` over `i < v`.
pub fn incident_pair_patterns(n: usize, v: usize) -> Vec<Pattern> {
    let (v, n) = (v as u64, n as u64);
    let mut out = Vec::with_capacity(2);
    if v + 1 < n {
        out.push(vec![Coord::Fix(v), Coord::Span(v + 1, n - 1)]);
    }
    if v > 0 {
        out.push(vec![Coord::Span(0, v - 1), Coord::Fix(v)]);
    }
    out
}

/// Same as [`incident_pair_patterns`] with a label coordinate appended.
pub fn incident_labeled_patterns(n: usize, v: usize, label: Coord) -> Vec<Pattern> {
    incident_pair_patterns(n, v)
        .into_iter()
        .map(|mut p| {
            p.push(label);
            p
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Cost accounting
// ---------------------------------------------------------------------------

/// Verifier space and communication meter. Words are counted as 61-bit
/// field elements; ids and weights at their natural bit widths. Values are
/// monotone over a session.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostMeter {
    pub verifier_space_bits: u64,
    pub comm_bits_p2v: u64,
    pub comm_bits_v2p: u64,
    pub rounds: u64,
}

impl CostMeter {
    pub fn note_space(&mut self, bits: u64) {
        self.verifier_space_bits = self.verifier_space_bits.max(bits);
    }
}

pub fn bits_for(n: usize) -> u64 {
    (usize::BITS - n.next_power_of_two().leading_zeros()) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stream_round_trip_and_normalization() {
        let u = StreamUpdate::new(5, 2, Some(3), 1).unwrap();
        assert_eq!((u.i, u.j), (2, 5));
        assert!(StreamUpdate::new(4, 4, None, 1).is_err());
        let text = "# demo\nN 6\nE 0 1 +1\nE 2 5 7 +1\nE 2 5 7 -1\n";
        let (n, updates) = parse_stream_file(text).unwrap();
        assert_eq!(n, 6);
        assert_eq!(updates.len(), 3);
        let graph = Graph::from_updates(n, &updates).unwrap();
        assert_eq!(graph.edges, vec![(0, 1, 1)]);
        let emitted = emit_stream_file(n, &updates);
        let (n2, reparsed) = parse_stream_file(&emitted).unwrap();
        assert_eq!((n2, reparsed), (n, updates));
    }

    #[test]
    fn malformed_streams_are_setup_errors() {
        let double = [
            StreamUpdate::new(0, 1, None, 1).unwrap(),
            StreamUpdate::new(1, 0, None, 1).unwrap(),
        ];
        assert!(matches!(
            Graph::from_updates(3, &double),
            Err(StreamError::BadMultiplicity { .. })
        ));
        let nonatomic = [
            StreamUpdate::new(0, 1, Some(2), 1).unwrap(),
            StreamUpdate::new(0, 1, Some(3), -1).unwrap(),
        ];
        assert!(matches!(
            Graph::from_updates(3, &nonatomic),
            Err(StreamError::NonAtomicWeight { .. })
        ));
        assert!(matches!(
            Graph::from_updates(1, &[StreamUpdate::new(0, 1, None, 1).unwrap()]),
            Err(StreamError::VertexOutOfRange { .. })
        ));
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(
            gen_random_graph(8, 0.5, 4, 99),
            gen_random_graph(8, 0.5, 4, 99)
        );
        assert_eq!(gen_metric_graph(6, 30, 7), gen_metric_graph(6, 30, 7));
    }

    #[test]
    fn metric_generator_satisfies_triangle_inequality() {
        for seed in 0..10 {
            let updates = gen_metric_graph(8, 40, seed);
            let g = Graph::from_updates(8, &updates).unwrap();
            for i in 0..8 {
                for j in (i + 1)..8 {
                    for k in 0..8 {
                        if k == i || k == j {
                            continue;
                        }
                        let d = g.weight(i, j).unwrap();
                        let via = g.weight(i, k).unwrap() + g.weight(k, j).unwrap();
                        assert!(d <= via, "triangle inequality violated at seed {seed}");
                    }
                }
            }
        }
    }

    #[test]
    fn triangle_patterns_cover_each_containing_slot_once() {
        // every edge token covers exactly the n-2 triangles containing it
        let n = 8;
        let uni = Universe::triangles(n, Mode::LogRound).unwrap();
        for i in 0..n {
            for j in (i + 1)..n {
                let pats = triangle_patterns(n, i, j);
                let mut covered: Vec<u64> = pats
                    .iter()
                    .flat_map(|p| uni.grid.expand_pattern(p))
                    .collect();
                covered.sort_unstable();
                let before = covered.len();
                covered.dedup();
                assert_eq!(covered.len(), before, "pattern slices overlap");
                assert_eq!(covered.len(), n - 2);
                for idx in covered {
                    let t = uni.grid.decode(idx);
                    assert!(t[0] < t[1] && t[1] < t[2]);
                    let trio = [t[0] as usize, t[1] as usize, t[2] as usize];
                    assert!(trio.contains(&i) && trio.contains(&j));
                }
            }
        }
    }

    #[test]
    fn derived_update_mass_is_conserved() {
        // triangles: total single-entry update mass per token is n - 2
        let n = 9;
        let uni = Universe::triangles(n, Mode::LogRound).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(21);
        let mut vec = DerivedVector::new(uni, &mut rng);
        let updates = gen_random_graph(n, 0.4, 1, 5);
        let mut expected_mass = 0i64;
        for u in &updates {
            for p in triangle_patterns(n, u.i, u.j) {
                vec.apply(&p, u.delta as i64);
            }
            expected_mass += (n as i64 - 2) * u.delta as i64;
        }
        let mass: i64 = vec.exact.values().sum();
        assert_eq!(mass, expected_mass);
    }

    #[test]
    fn canonical_replay_rejects_duplicates_with_position() {
        assert_eq!(replay_canonical_check([1, 2, 3]), Ok(()));
        assert_eq!(replay_canonical_check([1, 2, 2, 3]), Err(2));
        assert_eq!(replay_canonical_check([5]), Ok(()));
        assert_eq!(replay_canonical_check(Vec::<u64>::new()), Ok(()));
    }

    #[test]
    fn incident_patterns_cover_exactly_incident_pairs() {
        let n = 7;
        let uni = Universe::pairs(n, Mode::LogRound).unwrap();
        for v in 0..n {
            let mut hit: Vec<(u64, u64)> = incident_pair_patterns(n, v)
                .iter()
                .flat_map(|p| uni.grid.expand_pattern(p))
                .map(|idx| {
                    let t = uni.grid.decode(idx);
                    (t[0], t[1])
                })
                .collect();
            hit.sort_unstable();
            let want: Vec<(u64, u64)> = (0..n as u64)
                .filter(|&x| x != v as u64)
                .map(|x| (x.min(v as u64), x.max(v as u64)))
                .collect();
            let mut want = want;
            want.sort_unstable();
            assert_eq!(hit, want);
        }
    }
}
