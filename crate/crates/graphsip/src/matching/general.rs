//! Maximum weight matching in general graphs, certified by integral
//! odd-set duals.
//!
//! The dual certificate is a vertex weight per vertex plus a family of
//! disjoint claws: chains of nested odd sets, each streamed level by level
//! as `(LI, level, r_U, boundary)` where `r_U` is the cumulative weight
//! down to that level. The verifier never stores a set; it sketches a
//! flattened constraint universe in which a dual-satisfied edge produces a
//! frequency of exactly 5 in exactly one slot:
//!
//! * +1 when the edge arrives from the stream,
//! * +1 from each endpoint's vertex weight,
//! * +2 from the claw stream (or, for edges satisfied by vertex weights
//!   alone, +2 from each endpoint on the separate `r = 0` slice).
//!
//! Universe tuples are `(i, j, w, y, y', LI, level_i, level_j, r)`; the
//! two level coordinates record each endpoint's claw level, which pins the
//! claw-stream increments to a single slot for nested, crossing and
//! same-boundary edges alike. Tuples obey two membership constraints:
//! `w <= y + y' + r`, and not both `y + y' >= w` and `r > 0`. Updates are
//! only ever issued to member tuples.

use super::dual_search::{edge_r, find_duals, Claw};
use super::{MatchingCert, MatchingCheck, MatchingTamper};
use crate::field::Coord;
use crate::fingerprint::Fingerprint;
use crate::gstream::{
    bits_for, replay_canonical_check, DerivedVector, Graph, Mode, StreamError, StreamUpdate,
    Universe,
};
use crate::session::{
    session_rng, AdversaryStrategy, SessionConfig, SessionRng, Transcript, Value,
};
use crate::sumcheck::{run_finv, FreqDomain, ProverTactic};

/// Vertex duals plus disjoint claws of nested odd sets.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LaminarDualCert {
    pub y: Vec<u64>,
    pub claws: Vec<Claw>,
}

impl LaminarDualCert {
    pub fn value(&self) -> u64 {
        let zsum: u64 = self
            .claws
            .iter()
            .flat_map(|c| c.sets.iter())
            .map(|(set, z)| z * (set.len() as u64 / 2))
            .sum();
        self.y.iter().sum::<u64>() + zsum
    }

    /// All claw vertices in ascending order (the laminar replay).
    pub fn participants_sorted(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .claws
            .iter()
            .flat_map(|c| c.sets.first().map(|(s, _)| s.clone()).unwrap_or_default())
            .collect();
        v.sort_unstable();
        v
    }
}

/// Universe bounds both parties agree on before the stream.
#[derive(Clone, Copy, Debug)]
pub(crate) struct DualUniverseParams {
    pub n: usize,
    /// Weights, vertex duals and cumulative claw weights all live in
    /// `0..=w_bound`.
    pub w_bound: u64,
    /// Claw indices live in `1..=claw_bound` (1-based; 0 marks the
    /// vertex-only slice).
    pub claw_bound: usize,
    /// Claw levels live in `1..=depth_bound`.
    pub depth_bound: usize,
}

impl DualUniverseParams {
    pub fn for_graph(n: usize, w_bound: u64) -> DualUniverseParams {
        DualUniverseParams {
            n,
            w_bound,
            claw_bound: (n / 3).max(2),
            depth_bound: (n.saturating_sub(1) / 2).max(1),
        }
    }

    fn universe(&self) -> Universe {
        let n = self.n as u64;
        let w = self.w_bound + 1;
        let radices = [
            n,
            n,
            w,
            w,
            w,
            self.claw_bound as u64 + 1,
            self.depth_bound as u64 + 1,
            self.depth_bound as u64 + 1,
            w,
        ];
        Universe {
            name: "dual-constraints",
            grid: Mode::LogRound.grid(&radices).expect("grid"),
            member_count: radices.iter().product(),
        }
    }
}

/// Tampering hooks for the dual phase of the protocol.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct DualTamper {
    /// Break r monotonicity (or strict positivity on single-level claws).
    pub wrong_sigma_r: bool,
    /// Duplicate a claw vertex into a second claw, sanitizing the replay.
    pub non_laminar: bool,
    /// Make a non-deepest boundary odd by stealing an outside vertex.
    pub non_odd_set: bool,
    /// Lie about the final frequency-5 count.
    pub lie_on_count: bool,
}


const LI: usize = 5;
const LEV_I: usize = 6;
const LEV_J: usize = 7;
const R: usize = 8;

/// Patterns for one endpoint role. `role_first` means the vertex is the
/// smaller endpoint (coordinate `i`); the free endpoint coordinate spans
/// the rest of its range.
fn role_coords(params: &DualUniverseParams, v: usize, role_first: bool) -> Option<[Coord; 2]> {
    let n = params.n as u64;
    let v = v as u64;
    if role_first {
        (v + 1 < n).then(|| [Coord::Fix(v), Coord::Span(v + 1, n - 1)])
    } else {
        (v > 0).then(|| [Coord::Span(0, v - 1), Coord::Fix(v)])
    }
}

fn base_pattern(role: [Coord; 2]) -> Vec<Coord> {
    vec![
        role[0],
        role[1],
        Coord::All,
        Coord::All,
        Coord::All,
        Coord::All,
        Coord::All,
        Coord::All,
        Coord::All,
    ]
}

/// The `r` coordinate values compatible with `(w, y, y')` under the two
/// membership constraints, as an inclusive span (plus the separate
/// `r = 0` case handled by the caller where needed).
fn member_r_span(w: u64, yy: u64, w_bound: u64) -> Option<(u64, u64)> {
    if w > yy {
        // positive r required and allowed
        if w - yy <= w_bound {
            Some((w - yy, w_bound))
        } else {
            None
        }
    } else {
        None // positive r forbidden when y + y' already covers w
    }
}

/// Verifier+prover state for one dual-constraint vector.
pub(crate) struct DualCheck {
    pub params: DualUniverseParams,
    pub vec: DerivedVector,
    fp_vertex_base: Fingerprint,
    pub fp_claw_vertices: Fingerprint,
}

impl DualCheck {
    pub fn new(params: DualUniverseParams, rng: &mut SessionRng) -> DualCheck {
        let fp_vertex_base = Fingerprint::new(params.n as u64, rng);
        Self::with_fp_base(params, fp_vertex_base, rng)
    }

    pub fn with_fp_base(
        params: DualUniverseParams,
        fp_vertex_base: Fingerprint,
        rng: &mut SessionRng,
    ) -> DualCheck {
        let vec = DerivedVector::new(params.universe(), rng);
        let fp_claw_vertices = fp_vertex_base.sibling();
        DualCheck {
            params,
            vec,
            fp_vertex_base,
            fp_claw_vertices,
        }
    }

    pub fn space_bits(&self) -> u64 {
        self.vec.sketch.space_bits() + 2 * self.fp_vertex_base.space_bits() + 256
    }

    /// Stream edge update: +delta on every member tuple matching
    /// `(i, j, w_e, *, *, *, *, *, *)`.
    pub fn absorb_edge(&mut self, i: usize, j: usize, w_e: u64, delta: i64) {
        let (i, j) = (i.min(j), i.max(j));
        let p = &self.params;
        debug_assert!(w_e <= p.w_bound);
        let head = [Coord::Fix(i as u64), Coord::Fix(j as u64), Coord::Fix(w_e)];
        // vertex-only slice
        let mut pat = vec![
            head[0],
            head[1],
            head[2],
            Coord::All,
            Coord::All,
            Coord::Fix(0),
            Coord::Fix(0),
            Coord::Fix(0),
            Coord::Fix(0),
        ];
        self.vec.apply(&pat, delta);
        // claw slices, constrained in (y, y', r)
        pat[LI] = Coord::Span(1, p.claw_bound as u64);
        pat[LEV_I] = Coord::Span(1, p.depth_bound as u64);
        pat[LEV_J] = Coord::Span(1, p.depth_bound as u64);
        for y in 0..=p.w_bound {
            for y2 in 0..=p.w_bound {
                pat[3] = Coord::Fix(y);
                pat[4] = Coord::Fix(y2);
                if w_e <= y + y2 {
                    pat[R] = Coord::Fix(0);
                    self.vec.apply(&pat, delta);
                } else if let Some((lo, hi)) = member_r_span(w_e, y + y2, p.w_bound) {
                    pat[R] = Coord::Span(lo, hi);
                    self.vec.apply(&pat, delta);
                }
            }
        }
    }

    /// Vertex dual update (+1 on claw slices compatible with `y_v`, +2 on
    /// the vertex-only slice where `w <= y + y'`).
    fn absorb_vertex_dual(&mut self, v: usize, y_v: u64) {
        let p = self.params;
        for role_first in [true, false] {
            let Some(role) = role_coords(&p, v, role_first) else {
                continue;
            };
            let (own, other) = if role_first { (3, 4) } else { (4, 3) };
            let mut pat = base_pattern(role);
            pat[own] = Coord::Fix(y_v);
            // claw slices: +1
            pat[LI] = Coord::Span(1, p.claw_bound as u64);
            pat[LEV_I] = Coord::Span(1, p.depth_bound as u64);
            pat[LEV_J] = Coord::Span(1, p.depth_bound as u64);
            for y2 in 0..=p.w_bound {
                pat[other] = Coord::Fix(y2);
                let yy = y_v + y2;
                pat[R] = Coord::Fix(0);
                pat[2] = Coord::Span(0, yy.min(p.w_bound));
                self.vec.apply(&pat, 1);
                if yy < p.w_bound {
                    for w in (yy + 1)..=p.w_bound {
                        if let Some((lo, hi)) = member_r_span(w, yy, p.w_bound) {
                            pat[2] = Coord::Fix(w);
                            pat[R] = Coord::Span(lo, hi);
                            self.vec.apply(&pat, 1);
                        }
                    }
                }
            }
            // vertex-only slice: +2 where the vertex weights already
            // satisfy the constraint
            pat[LI] = Coord::Fix(0);
            pat[LEV_I] = Coord::Fix(0);
            pat[LEV_J] = Coord::Fix(0);
            pat[R] = Coord::Fix(0);
            for y2 in 0..=p.w_bound {
                pat[other] = Coord::Fix(y2);
                pat[2] = Coord::Span(0, (y_v + y2).min(p.w_bound));
                self.vec.apply(&pat, 2);
            }
        }
    }

    /// Boundary-vertex update from the claw stream. Two slices per
    /// incident role: one where this endpoint is the shallower one (its
    /// level is the edge level, so `r` must equal this `r_u`), one where
    /// it is strictly deeper (the other endpoint's level is smaller and
    /// carries the `r`).
    fn absorb_claw_vertex(&mut self, v: usize, level: usize, r_u: u64, claw_index: usize) {
        let p = self.params;
        debug_assert!(level >= 1 && r_u >= 1);
        for role_first in [true, false] {
            let Some(role) = role_coords(&p, v, role_first) else {
                continue;
            };
            let (own_lev, other_lev) = if role_first {
                (LEV_I, LEV_J)
            } else {
                (LEV_J, LEV_I)
            };
            let mut pat = base_pattern(role);
            pat[LI] = Coord::Fix(claw_index as u64);
            pat[own_lev] = Coord::Fix(level as u64);
            // shallower-endpoint slice: r is pinned to this level's weight
            if level <= p.depth_bound {
                pat[other_lev] = Coord::Span(level as u64, p.depth_bound as u64);
                pat[R] = Coord::Fix(r_u);
                for y in 0..=p.w_bound {
                    for y2 in 0..=p.w_bound {
                        let yy = y + y2;
                        // membership: y + y' < w <= y + y' + r_u
                        let lo = yy + 1;
                        let hi = (yy + r_u).min(p.w_bound);
                        if lo <= hi {
                            pat[3] = Coord::Fix(y);
                            pat[4] = Coord::Fix(y2);
                            pat[2] = Coord::Span(lo, hi);
                            self.vec.apply(&pat, 1);
                        }
                    }
                }
            }
            // deeper-endpoint slice: the other endpoint is strictly above
            if level >= 2 {
                pat[other_lev] = Coord::Span(1, level as u64 - 1);
                for y in 0..=p.w_bound {
                    for y2 in 0..=p.w_bound {
                        let yy = y + y2;
                        pat[3] = Coord::Fix(y);
                        pat[4] = Coord::Fix(y2);
                        // r = 0 members
                        pat[R] = Coord::Fix(0);
                        pat[2] = Coord::Span(0, yy.min(p.w_bound));
                        self.vec.apply(&pat, 1);
                        // r >= 1 members
                        if yy < p.w_bound {
                            for w in (yy + 1)..=p.w_bound {
                                if let Some((lo, hi)) = member_r_span(w, yy, p.w_bound) {
                                    pat[2] = Coord::Fix(w);
                                    pat[R] = Coord::Span(lo, hi);
                                    self.vec.apply(&pat, 1);
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    /// TSP restriction: -1 on every member tuple incident to a vertex
    /// outside the odd set.
    pub fn absorb_outside_decrement(&mut self, v: usize) {
        let p = self.params;
        for role_first in [true, false] {
            let Some(role) = role_coords(&p, v, role_first) else {
                continue;
            };
            let mut pat = base_pattern(role);
            // vertex-only slice
            pat[LI] = Coord::Fix(0);
            pat[LEV_I] = Coord::Fix(0);
            pat[LEV_J] = Coord::Fix(0);
            pat[R] = Coord::Fix(0);
            self.vec.apply(&pat, -1);
            // claw slices
            pat[LI] = Coord::Span(1, p.claw_bound as u64);
            pat[LEV_I] = Coord::Span(1, p.depth_bound as u64);
            pat[LEV_J] = Coord::Span(1, p.depth_bound as u64);
            for y in 0..=p.w_bound {
                for y2 in 0..=p.w_bound {
                    let yy = y + y2;
                    pat[3] = Coord::Fix(y);
                    pat[4] = Coord::Fix(y2);
                    pat[R] = Coord::Fix(0);
                    pat[2] = Coord::Span(0, yy.min(p.w_bound));
                    self.vec.apply(&pat, -1);
                    if yy < p.w_bound {
                        for w in (yy + 1)..=p.w_bound {
                            if let Some((lo, hi)) = member_r_span(w, yy, p.w_bound) {
                                pat[2] = Coord::Fix(w);
                                pat[R] = Coord::Span(lo, hi);
                                self.vec.apply(&pat, -1);
                            }
                        }
                    }
                }
            }
        }
    }

    /// Processes the dual certificate: the vertex weight list, the claw
    /// stream (with sortedness, positivity, monotonicity, parity and
    /// fingerprint checks), and the participant replay. Returns the sums
    /// needed for the value equation.
    pub fn process_certificate(
        &mut self,
        label: &str,
        cert: &LaminarDualCert,
        tamper: DualTamper,
        tr: &mut Transcript,
    ) -> Result<(u64, u64), (String, String)> {
        let p = self.params;
        let n = p.n;
        let bad = |stage: &str, reason: String| Err((format!("{label}/{stage}"), reason));
        let id_bits = bits_for(n);
        let w_bits = bits_for(p.w_bound as usize + 1);

        // vertex weights, ascending, zeros inferred
        if cert.y.len() != n {
            return bad("duals", "vertex weight list length mismatch".to_string());
        }
        let mut y_sum = 0u64;
        for (v, &y_v) in cert.y.iter().enumerate() {
            if y_v > 0 {
                tr.p2v(&format!("{label}/cert/dual-y"), 0, id_bits + w_bits);
            }
            if y_v > p.w_bound {
                return bad("duals", format!("vertex weight {y_v} out of range"));
            }
            y_sum += y_v;
            self.absorb_vertex_dual(v, y_v);
        }

        // claw stream, possibly tampered
        let mut wire: Vec<(usize, usize, u64, Vec<usize>)> = Vec::new();
        for (ci, claw) in cert.claws.iter().enumerate() {
            let rs = claw.r_values();
            for (t, boundary) in claw.boundaries().into_iter().enumerate() {
                wire.push((ci + 1, t + 1, rs[t], boundary));
            }
        }
        if tamper.wrong_sigma_r {
            // deeper r no larger than its parent (or zero on a singleton)
            if let Some(k) = wire.iter().position(|e| e.1 == 2) {
                wire[k].2 = wire[k - 1].2.saturating_sub(wire[k - 1].2.min(1));
            } else if let Some(first) = wire.first_mut() {
                first.2 = 0;
            }
        }
        if tamper.non_odd_set {
            if let Some(k) = wire.iter().position(|e| !e.3.is_empty()) {
                let used: Vec<usize> = wire.iter().flat_map(|e| e.3.iter().copied()).collect();
                if let Some(outsider) = (0..n).find(|v| !used.contains(v)) {
                    wire[k].3.push(outsider);
                    wire[k].3.sort_unstable();
                }
            }
        }
        if tamper.non_laminar {
            // duplicate one claw vertex into a new single-level claw; the
            // sanitized replay below leaves only the fingerprint to object
            if let Some((ci, _, r_u, b)) = wire.first().cloned() {
                let dup = b[0];
                let next_claw = wire.iter().map(|e| e.0).max().unwrap_or(ci) + 1;
                if next_claw <= p.claw_bound {
                    wire.push((next_claw, 1, r_u, vec![dup]));
                }
            }
        }

        let mut sigma_r = 0u64;
        let mut sigma_max = 0u64;
        let mut prev_key: Option<(usize, usize)> = None;
        let mut prev_r: Option<u64> = None;
        for (k, (ci, level, r_u, boundary)) in wire.iter().enumerate() {
            tr.p2v(
                &format!("{label}/cert/claw"),
                0,
                id_bits + w_bits + boundary.len() as u64 * id_bits,
            );
            if *ci > p.claw_bound || *level > p.depth_bound {
                return bad("claws", "claw index or level out of range".to_string());
            }
            if *r_u == 0 || *r_u > p.w_bound {
                return bad("claws", format!("r value {r_u} out of range"));
            }
            let key = (*ci, *level);
            if let Some(prev) = prev_key {
                if prev >= key {
                    return bad("claws", "claw tuples out of lexicographic order".to_string());
                }
                if prev.0 == *ci && prev_r.unwrap() > *r_u {
                    return bad("claws", "r values not monotone within claw".to_string());
                }
            }
            // parity: every boundary except the deepest of its claw is
            // even; the deepest is odd
            let is_last_of_claw = wire.get(k + 1).is_none_or(|next| next.0 != *ci);
            if is_last_of_claw {
                if boundary.len() % 2 != 1 {
                    return bad("claws", "deepest boundary has even cardinality".to_string());
                }
            } else if boundary.len() % 2 != 0 {
                return bad("claws", "non-deepest boundary has odd cardinality".to_string());
            }
            // r counts once per boundary vertex, so over a whole claw the
            // running sum telescopes to sum_U z_U |U|; the deepest r alone
            // is sum_U z_U, and half their difference is the family's
            // floor(|U|/2)-weighted cost
            sigma_r += r_u * boundary.len() as u64;
            if is_last_of_claw {
                sigma_max += r_u;
            }
            if replay_canonical_check(boundary.iter()).is_err() {
                return bad("claws", "boundary vertices out of order".to_string());
            }
            for &v in boundary {
                if v >= n {
                    return bad("claws", format!("boundary vertex {v} out of range"));
                }
                self.fp_claw_vertices.update(v as u64, 1).unwrap();
                self.absorb_claw_vertex(v, *level, *r_u, *ci);
            }
            prev_key = Some(key);
            prev_r = Some(*r_u);
        }

        // participant replay: ascending, so distinct; fingerprint equality
        // proves the claws are vertex-disjoint
        let mut replay = cert.participants_sorted();
        if tamper.non_odd_set {
            // mirror the stolen vertex so only the parity check trips
            replay = wire.iter().flat_map(|e| e.3.iter().copied()).collect();
            replay.sort_unstable();
            replay.dedup();
        }
        let mut fp_replay = self.fp_vertex_base.sibling();
        for &v in &replay {
            tr.p2v(&format!("{label}/cert/participant"), 0, id_bits);
            fp_replay.update(v as u64, 1).unwrap();
        }
        if let Err(pos) = replay_canonical_check(replay.iter()) {
            return bad("laminar", format!("participant replay out of order at {pos}"));
        }
        if !fp_replay.equals(&self.fp_claw_vertices).unwrap() {
            return bad(
                "laminar",
                "non-laminar family: vertex repeated across claws".to_string(),
            );
        }
        if (sigma_r - sigma_max) % 2 != 0 {
            return bad("claws", "odd dual remainder".to_string());
        }
        Ok((y_sum, (sigma_r - sigma_max) / 2))
    }

    /// Final inverse-frequency query: the number of frequency-5 tuples
    /// must equal `expected` (the edge count, or the odd-set pair count
    /// for the TSP restriction).
    pub fn finv5(
        &self,
        label: &str,
        expected: u64,
        window_lo: i64,
        lie: bool,
        tr: &mut Transcript,
    ) -> Result<(), (String, String)> {
        let tactic = if lie { ProverTactic::Lie } else { ProverTactic::Honest };
        let claimed = if lie {
            expected
        } else {
            self.vec.count_frequencies(&[5])
        };
        let out = run_finv(
            &format!("{label}/finv5"),
            &self.vec,
            &FreqDomain::window(window_lo, 5),
            &[5],
            claimed,
            tactic,
            tr,
        )
        .map_err(|e| (format!("{label}/finv5"), e.to_string()))?;
        if !out.accepted {
            return Err((
                format!("{label}/finv5"),
                out.reason.unwrap_or_else(|| "count rejected".to_string()),
            ));
        }
        if out.total.value() != expected {
            return Err((
                format!("{label}/finv5"),
                format!(
                    "dual constraint violated: {} satisfied slots, expected {expected}",
                    out.total.value()
                ),
            ));
        }
        Ok(())
    }
}

/// Test support: builds the dual-constraint vector densely for an honest
/// certificate (optionally with the duals pushed below feasibility) and
/// summarizes the frequency histogram. For honest duals it also checks
/// from first principles that the frequency-5 slots are exactly the
/// analytic per-edge slots: the vertex-only tuple when the vertex weights
/// cover the edge, otherwise the in-claw tuple carrying both endpoint
/// levels and the edge's cumulative claw weight.
///
/// Returns `(frequency-5 slots, max frequency, edge count)`, or `None`
/// when a broken-dual variant was requested but the instance has no dual
/// weight to lower.
pub fn shadow_dual_histogram(
    graph: &Graph,
    w_bound: u64,
    break_dual: bool,
    seed: u64,
) -> Option<(u64, i64, u64)> {
    let params = DualUniverseParams::for_graph(graph.n, w_bound);
    let (_, mut duals) = honest_dual_cert(graph, &params)?;
    if break_dual {
        if let Some(v) = duals.y.iter().position(|&y| y > 0) {
            duals.y[v] -= 1;
        } else {
            let claw = duals
            .claws
            .iter_mut()
            .find(|c| c.sets.last().is_some_and(|s| s.1 >= 2))?;
            claw.sets.last_mut().unwrap().1 -= 1;
        }
    }
    let mut rng = session_rng(seed);
    let mut dual = DualCheck::new(params, &mut rng);
    for &(i, j, w) in &graph.edges {
        dual.absorb_edge(i, j, w, 1);
    }
    let mut tr = Transcript::new("shadow", 0);
    dual.process_certificate("shadow", &duals, DualTamper::default(), &mut tr)
        .expect("structurally valid certificate");
    let grid = &dual.vec.universe.grid;
    let mut fives: Vec<u64> = dual
        .vec
        .exact
        .iter()
        .filter(|&(_, &c)| c == 5)
        .map(|(&idx, _)| idx)
        .collect();
    fives.sort_unstable();
    let max_freq = dual.vec.exact.values().copied().max().unwrap_or(0);
    if !break_dual {
        let mut expected = Vec::new();
        for &(i, j, w) in &graph.edges {
            let (yi, yj) = (duals.y[i], duals.y[j]);
            if yi + yj >= w {
                expected.push(grid.index_of(&[i as u64, j as u64, w, yi, yj, 0, 0, 0, 0]));
            } else {
                let r_e = edge_r(&duals.claws, i, j);
                let home = duals
                    .claws
                    .iter()
                    .position(|c| c.level_of(i).is_some() && c.level_of(j).is_some())
                    .expect("satisfied edge lives in a claw");
                let li = duals.claws[home].level_of(i).unwrap() as u64;
                let lj = duals.claws[home].level_of(j).unwrap() as u64;
                expected.push(grid.index_of(&[
                    i as u64,
                    j as u64,
                    w,
                    yi,
                    yj,
                    home as u64 + 1,
                    li,
                    lj,
                    r_e,
                ]));
            }
        }
        expected.sort_unstable();
        assert_eq!(fives, expected, "frequency-5 slots differ from the case analysis");
    }
    Some((fives.len() as u64, max_freq, graph.edges.len() as u64))
}

/// Honest prover: optimal matching by enumeration, duals by the
/// complementary-slackness search.
pub(crate) fn honest_dual_cert(
    graph: &Graph,
    params: &DualUniverseParams,
) -> Option<(MatchingCert, LaminarDualCert)> {
    let (_, pairs) = crate::oracles::oracle_mwm(graph);
    let (y, claws) = find_duals(
        graph,
        &pairs,
        params.claw_bound,
        params.depth_bound,
        params.w_bound,
    )?;
    Some((
        MatchingCert::from_weighted(&pairs, graph),
        LaminarDualCert { y, claws },
    ))
}

/// Verified maximum weight matching in a general graph, with the built-in
/// prover searching for its own certificates.
pub fn mwm_general(
    n: usize,
    updates: &[StreamUpdate],
    w_bound: u64,
    cfg: &SessionConfig,
) -> Result<Transcript, StreamError> {
    let graph = Graph::from_updates(n, updates)?;
    if graph.max_weight() > w_bound {
        return Err(StreamError::Invalid(format!(
            "edge weight exceeds the declared bound {w_bound}"
        )));
    }
    let params = DualUniverseParams::for_graph(n, w_bound);
    let Some((cert, duals)) = honest_dual_cert(&graph, &params) else {
        return Err(StreamError::Invalid(
            "no dual certificate within the declared claw bounds".to_string(),
        ));
    };
    run_mwm_general(n, updates, &graph, &params, &cert, &duals, cfg)
}

/// Same protocol driven by an externally supplied (for example
/// file-loaded) matching and dual certificate instead of the built-in
/// search.
pub fn mwm_general_with_cert(
    n: usize,
    updates: &[StreamUpdate],
    w_bound: u64,
    cert: &MatchingCert,
    duals: &LaminarDualCert,
    cfg: &SessionConfig,
) -> Result<Transcript, StreamError> {
    let graph = Graph::from_updates(n, updates)?;
    if graph.max_weight() > w_bound {
        return Err(StreamError::Invalid(format!(
            "edge weight exceeds the declared bound {w_bound}"
        )));
    }
    let params = DualUniverseParams::for_graph(n, w_bound);
    run_mwm_general(n, updates, &graph, &params, cert, duals, cfg)
}

pub(crate) fn run_mwm_general(
    n: usize,
    updates: &[StreamUpdate],
    graph: &Graph,
    params: &DualUniverseParams,
    cert: &MatchingCert,
    duals: &LaminarDualCert,
    cfg: &SessionConfig,
) -> Result<Transcript, StreamError> {
    let mut tr = Transcript::new("mwm-general", cfg.seed);
    let mut rng = session_rng(cfg.seed);

    let mut cert = cert.clone();
    let mut m_tamper = MatchingTamper::honest(&cert);
    let mut d_tamper = DualTamper::default();
    match cfg.adversary {
        Some(AdversaryStrategy::FakeMatchingEdge) => {
            'outer: for a in 0..n {
                for b in (a + 1)..n {
                    if !graph.has_edge(a, b) {
                        if cert.edges.is_empty() {
                            cert.edges.push((a, b, 1));
                        } else {
                            cert.edges[0] = (a, b, cert.edges[0].2);
                        }
                        cert.edges.sort_unstable();
                        m_tamper = MatchingTamper::honest(&cert);
                        m_tamper.lie_on_subset = true;
                        break 'outer;
                    }
                }
            }
        }
        Some(AdversaryStrategy::WrongSigmaR) => {
            d_tamper.wrong_sigma_r = true;
            d_tamper.lie_on_count = true;
        }
        Some(AdversaryStrategy::NonLaminarClaw) => d_tamper.non_laminar = true,
        Some(AdversaryStrategy::NonOddSet) => d_tamper.non_odd_set = true,
        _ => {}
    }

    let mut matching = MatchingCheck::new(n, Some(params.w_bound), &mut rng);
    let mut dual = DualCheck::new(*params, &mut rng);
    let mut m_count = 0i64;
    for u in updates {
        let w = u.w.unwrap_or(1);
        matching.absorb(u.i, u.j, w, u.delta as i64);
        dual.absorb_edge(u.i, u.j, w, u.delta as i64);
        m_count += u.delta as i64;
    }
    tr.note_space(matching.space_bits() + dual.space_bits() + 64);

    if let Err((stage, reason)) = matching.verify("matching", &cert, &m_tamper, &mut tr) {
        tr.reject(&stage, &reason);
        return Ok(tr);
    }
    let (y_sum, z_half) = match dual.process_certificate("dual", duals, d_tamper, &mut tr) {
        Ok(v) => v,
        Err((stage, reason)) => {
            tr.reject(&stage, &reason);
            return Ok(tr);
        }
    };
    let dual_value = y_sum + z_half;
    if dual_value != cert.weight() {
        tr.reject(
            "value",
            &format!(
                "dual value {dual_value} does not meet the matching weight {}",
                cert.weight()
            ),
        );
        return Ok(tr);
    }
    if let Err((stage, reason)) =
        dual.finv5("dual", m_count as u64, 0, d_tamper.lie_on_count, &mut tr)
    {
        tr.reject(&stage, &reason);
        return Ok(tr);
    }
    tr.accept(Value::Count(cert.weight()));
    Ok(tr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gstream::gen_random_graph;
    use crate::oracles::oracle_mwm;

    fn to_updates(edges: &[(usize, usize, u64)]) -> Vec<StreamUpdate> {
        edges
            .iter()
            .map(|&(a, b, w)| StreamUpdate::new(a, b, Some(w), 1).unwrap())
            .collect()
    }

    #[test]
    fn triangle_unit_weights() {
        let updates = to_updates(&[(0, 1, 1), (0, 2, 1), (1, 2, 1)]);
        let tr = mwm_general(3, &updates, 1, &SessionConfig::honest(1)).unwrap();
        assert_eq!(tr.verdict.accepted_count(), Some(1));
    }

    #[test]
    fn single_heavy_edge() {
        let updates = to_updates(&[(0, 1, 5)]);
        let tr = mwm_general(2, &updates, 5, &SessionConfig::honest(2)).unwrap();
        assert_eq!(tr.verdict.accepted_count(), Some(5));
    }

    #[test]
    fn five_cycle_weighted() {
        let updates = to_updates(&[(0, 1, 2), (1, 2, 3), (2, 3, 2), (3, 4, 3), (0, 4, 1)]);
        let g = Graph::from_updates(5, &updates).unwrap();
        let want = oracle_mwm(&g).0;
        let tr = mwm_general(5, &updates, 3, &SessionConfig::honest(3)).unwrap();
        assert_eq!(tr.verdict.accepted_count(), Some(want));
    }

    #[test]
    fn matches_oracle_on_random_instances() {
        for seed in 0..8 {
            let n = 4 + (seed as usize % 3);
            let updates = gen_random_graph(n, 0.6, 4, seed);
            let g = Graph::from_updates(n, &updates).unwrap();
            let want = oracle_mwm(&g).0;
            let tr = mwm_general(n, &updates, 4, &SessionConfig::honest(seed)).unwrap();
            assert_eq!(tr.verdict.accepted_count(), Some(want), "seed {seed}");
        }
    }

    #[test]
    fn satisfied_edges_have_exactly_one_frequency5_slot() {
        // shadow dense check of the counting argument
        let updates = to_updates(&[(0, 1, 1), (0, 2, 1), (1, 2, 1), (2, 3, 1)]);
        let graph = Graph::from_updates(4, &updates).unwrap();
        let params = DualUniverseParams::for_graph(4, 1);
        let (cert, duals) = honest_dual_cert(&graph, &params).unwrap();
        let mut rng = session_rng(77);
        let mut dual = DualCheck::new(params, &mut rng);
        for u in &updates {
            dual.absorb_edge(u.i, u.j, u.w.unwrap(), 1);
        }
        let mut tr = Transcript::new("shadow", 0);
        dual.process_certificate("dual", &duals, DualTamper::default(), &mut tr)
            .unwrap();
        let mut fives: Vec<Vec<u64>> = dual
            .vec
            .exact
            .iter()
            .filter(|&(_, &c)| c == 5)
            .map(|(&idx, _)| dual.vec.universe.grid.decode(idx))
            .collect();
        fives.sort_unstable();
        assert_eq!(fives.len(), graph.edges.len());
        let mut seen_edges: Vec<(u64, u64)> = fives.iter().map(|t| (t[0], t[1])).collect();
        seen_edges.dedup();
        assert_eq!(seen_edges.len(), graph.edges.len(), "one slot per edge");
        // frequencies never exceed 5
        assert!(dual.vec.exact.values().all(|&c| (0..=5).contains(&c)));
        assert_eq!(cert.weight(), duals.value());
    }

    #[test]
    fn unsatisfied_edges_reach_at_most_four() {
        // tamper the duals: drop a vertex weight below feasibility
        let updates = to_updates(&[(0, 1, 3), (1, 2, 2)]);
        let graph = Graph::from_updates(3, &updates).unwrap();
        let params = DualUniverseParams::for_graph(3, 3);
        let (_, mut duals) = honest_dual_cert(&graph, &params).unwrap();
        let v = duals.y.iter().position(|&y| y > 0).unwrap();
        duals.y[v] -= 1;
        let mut rng = session_rng(78);
        let mut dual = DualCheck::new(params, &mut rng);
        for u in &updates {
            dual.absorb_edge(u.i, u.j, u.w.unwrap(), 1);
        }
        let mut tr = Transcript::new("shadow", 0);
        dual.process_certificate("dual", &duals, DualTamper::default(), &mut tr)
            .unwrap();
        let fives = dual.vec.exact.values().filter(|&&c| c == 5).count();
        assert!(fives < graph.edges.len(), "a violated edge lost its slot");
    }

    #[test]
    fn general_adversaries_are_rejected() {
        // a triangle plus an isolated vertex: the honest certificate needs
        // a claw, so every dual tamper has something to corrupt
        let updates = to_updates(&[(0, 1, 1), (0, 2, 1), (1, 2, 1)]);
        for strategy in [
            AdversaryStrategy::FakeMatchingEdge,
            AdversaryStrategy::WrongSigmaR,
            AdversaryStrategy::NonLaminarClaw,
            AdversaryStrategy::NonOddSet,
        ] {
            let cfg = SessionConfig::adversarial(5, strategy);
            let tr = mwm_general(4, &updates, 1, &cfg).unwrap();
            assert!(!tr.verdict.is_accept(), "{strategy:?} was accepted");
        }
    }
}
