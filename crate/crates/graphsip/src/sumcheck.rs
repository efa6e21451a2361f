//! The interactive sum-check protocol, in log-round and constant-round
//! modes, plus the derived inverse-frequency and subset subprotocols.
//!
//! The verifier holds `h(f_a(r))` for its secret point `r` (maintained
//! during the stream by the sketch); the prover holds the exact frequency
//! vector. The claim `sum_i h(a_i) = K` is reduced one grid variable per
//! round: the prover sends the univariate restriction of the partial sum,
//! the verifier checks it against the previous round at the pre-drawn
//! challenge, and the last polynomial is compared against the sketch.
//!
//! Inverse-frequency queries (`F^-1` of a frequency or a set of
//! frequencies) instantiate `h` as the Lagrange indicator of the queried
//! values over the window of attainable frequencies. Subset checks reduce
//! to `F^-1(-1) = 0` after crediting +1 per base element and -1 per
//! claimed member.

use crate::field::{FieldElem, GridParams, WORD_BITS};
use crate::gstream::{replay_canonical_check, DerivedVector};
use crate::session::Transcript;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SumcheckError {
    #[error("queried frequency {0} lies outside the declared window")]
    TargetOutsideWindow(i64),
    #[error("window is empty or malformed")]
    BadWindow,
}

// ---------------------------------------------------------------------------
// Univariate polynomials over F_p
// ---------------------------------------------------------------------------

/// Dense univariate polynomial in coefficient form, low degree first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniPoly {
    pub coeffs: Vec<FieldElem>,
}

impl UniPoly {
    pub fn new(coeffs: Vec<FieldElem>) -> UniPoly {
        let mut p = UniPoly { coeffs };
        p.trim();
        p
    }

    pub fn zero() -> UniPoly {
        UniPoly { coeffs: vec![] }
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: FieldElem) -> FieldElem {
        let mut acc = FieldElem::ZERO;
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Unique interpolating polynomial through `(xs[k], ys[k])`, by Newton
    /// divided differences. The nodes must be distinct.
    pub fn interpolate(xs: &[FieldElem], ys: &[FieldElem]) -> UniPoly {
        assert_eq!(xs.len(), ys.len());
        let n = xs.len();
        if n == 0 {
            return UniPoly::zero();
        }
        let mut dd = ys.to_vec();
        for level in 1..n {
            for k in (level..n).rev() {
                dd[k] = (dd[k] - dd[k - 1]) * (xs[k] - xs[k - level]).inv();
            }
        }
        let mut coeffs = vec![FieldElem::ZERO; n];
        let mut basis = vec![FieldElem::ZERO; n + 1];
        basis[0] = FieldElem::ONE;
        let mut blen = 1;
        for k in 0..n {
            for t in 0..blen {
                coeffs[t] += dd[k] * basis[t];
            }
            if k + 1 < n {
                for t in (0..blen).rev() {
                    let b = basis[t];
                    basis[t + 1] += b;
                    basis[t] = -(xs[k]) * b;
                }
                blen += 1;
            }
        }
        UniPoly::new(coeffs)
    }
}

/// `ps[i] = sum_{x=0}^{ell-1} x^i`, so round sums over the grid nodes cost
/// one inner product with the received coefficients.
fn power_sums(ell: u64, max_degree: usize) -> Vec<FieldElem> {
    let mut ps = vec![FieldElem::ZERO; max_degree + 1];
    for x in 0..ell {
        let fx = FieldElem::new(x);
        let mut cur = FieldElem::ONE;
        for p in ps.iter_mut() {
            *p += cur;
            cur *= fx;
        }
    }
    ps
}

// ---------------------------------------------------------------------------
// Frequency windows and indicator polynomials
// ---------------------------------------------------------------------------

/// Bounds on every attainable frequency of a derived vector. Honest
/// executions stay inside the window; the indicator `h` is interpolated
/// over exactly these values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FreqWindow {
    pub lo: i64,
    pub hi: i64,
}

impl FreqWindow {
    pub fn new(lo: i64, hi: i64) -> FreqWindow {
        FreqWindow { lo, hi }
    }
}

/// Domain of the outer polynomial `h`: either a contiguous signed window
/// or an explicit sorted list of attainable values (used when frequencies
/// are sparse over a huge range, as in the progression-free maximality
/// check).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FreqDomain {
    Window(FreqWindow),
    Nodes(Vec<i64>),
}

impl FreqDomain {
    pub fn window(lo: i64, hi: i64) -> FreqDomain {
        FreqDomain::Window(FreqWindow::new(lo, hi))
    }

    pub fn node_values(&self) -> Vec<i64> {
        match self {
            FreqDomain::Window(w) => (w.lo..=w.hi).collect(),
            FreqDomain::Nodes(v) => v.clone(),
        }
    }

    pub fn contains(&self, v: i64) -> bool {
        match self {
            FreqDomain::Window(w) => w.lo <= v && v <= w.hi,
            FreqDomain::Nodes(ns) => ns.contains(&v),
        }
    }

    /// The unique polynomial of degree `< |domain|` that is 1 on `targets`
    /// and 0 on the rest of the domain. Signed values embed via
    /// `v mod p`.
    pub fn indicator(&self, targets: &[i64]) -> Result<UniPoly, SumcheckError> {
        let nodes = self.node_values();
        if nodes.is_empty() {
            return Err(SumcheckError::BadWindow);
        }
        for &t in targets {
            if !self.contains(t) {
                return Err(SumcheckError::TargetOutsideWindow(t));
            }
        }
        let xs: Vec<FieldElem> = nodes.iter().map(|&v| FieldElem::from_i64(v)).collect();
        let ys: Vec<FieldElem> = nodes
            .iter()
            .map(|&v| {
                if targets.contains(&v) {
                    FieldElem::ONE
                } else {
                    FieldElem::ZERO
                }
            })
            .collect();
        Ok(UniPoly::interpolate(&xs, &ys))
    }
}

// ---------------------------------------------------------------------------
// Provers
// ---------------------------------------------------------------------------

/// One side of the sum-check conversation: produces the round-`j`
/// polynomial after learning the previous challenge.
pub trait RoundProver {
    fn round_poly(&mut self, j: usize, prev: Option<FieldElem>, degree_bound: usize)
        -> Vec<FieldElem>;
}

/// Honest prover: folds its exact sparse vector one grid digit per round.
pub struct HonestSumcheck {
    ell: u64,
    d: usize,
    h: UniPoly,
    h0: FieldElem,
    /// (flat index, frequency) sorted by index; indices live in the
    /// not-yet-bound suffix space
    cur: Vec<(u64, FieldElem)>,
    node_chi: Vec<Vec<FieldElem>>,
}

impl HonestSumcheck {
    pub fn new(grid: &GridParams, h: &UniPoly, entries: &HashMap<u64, i64>) -> HonestSumcheck {
        let mut cur: Vec<(u64, FieldElem)> = entries
            .iter()
            .filter(|&(_, &c)| c != 0)
            .map(|(&i, &c)| (i, FieldElem::from_i64(c)))
            .collect();
        cur.sort_unstable_by_key(|e| e.0);
        HonestSumcheck {
            ell: grid.ell,
            d: grid.d,
            h: h.clone(),
            h0: h.eval(FieldElem::ZERO),
            cur,
            node_chi: Vec::new(),
        }
    }

    /// Total `sum h(a_v)` over the whole grid, padding included.
    pub fn grid_total(grid: &GridParams, h: &UniPoly, entries: &HashMap<u64, i64>) -> FieldElem {
        let mut total = FieldElem::ZERO;
        let mut nonzero = 0u64;
        for &c in entries.values() {
            if c != 0 {
                total += h.eval(FieldElem::from_i64(c));
                nonzero += 1;
            }
        }
        total + FieldElem::new(grid.grid_size() - nonzero) * h.eval(FieldElem::ZERO)
    }

    fn ensure_node_tables(&mut self, degree_bound: usize) {
        if !self.node_chi.is_empty() {
            return;
        }
        for node in 0..=degree_bound as u64 {
            let x = FieldElem::new(node);
            let row: Vec<FieldElem> = (0..self.ell)
                .map(|k| crate::field::chi(k, x, self.ell).expect("k < ell"))
                .collect();
            self.node_chi.push(row);
        }
    }

    fn fold(&mut self, r: FieldElem) {
        let chi_r: Vec<FieldElem> = (0..self.ell)
            .map(|k| crate::field::chi(k, r, self.ell).expect("k < ell"))
            .collect();
        let mut out: Vec<(u64, FieldElem)> = Vec::with_capacity(self.cur.len());
        let mut i = 0;
        while i < self.cur.len() {
            let q = self.cur[i].0 / self.ell;
            let mut acc = FieldElem::ZERO;
            while i < self.cur.len() && self.cur[i].0 / self.ell == q {
                acc += chi_r[(self.cur[i].0 % self.ell) as usize] * self.cur[i].1;
                i += 1;
            }
            if !acc.is_zero() {
                out.push((q, acc));
            }
        }
        self.cur = out;
    }
}

impl RoundProver for HonestSumcheck {
    fn round_poly(
        &mut self,
        j: usize,
        prev: Option<FieldElem>,
        degree_bound: usize,
    ) -> Vec<FieldElem> {
        if let Some(r) = prev {
            self.fold(r);
        }
        self.ensure_node_tables(degree_bound);
        let nodes = degree_bound + 1;
        let suffix_total = self.ell.pow((self.d - j) as u32);
        let mut vals = vec![FieldElem::ZERO; nodes];
        let mut groups = 0u64;
        let mut slots = vec![FieldElem::ZERO; self.ell as usize];
        let mut i = 0;
        while i < self.cur.len() {
            let q = self.cur[i].0 / self.ell;
            slots.iter_mut().for_each(|s| *s = FieldElem::ZERO);
            while i < self.cur.len() && self.cur[i].0 / self.ell == q {
                slots[(self.cur[i].0 % self.ell) as usize] = self.cur[i].1;
                i += 1;
            }
            groups += 1;
            for (node, val) in vals.iter_mut().enumerate() {
                let mut v = FieldElem::ZERO;
                for (s, &sv) in slots.iter().enumerate() {
                    if !sv.is_zero() {
                        v += self.node_chi[node][s] * sv;
                    }
                }
                *val += self.h.eval(v);
            }
        }
        if !self.h0.is_zero() {
            let pad = FieldElem::new(suffix_total - groups) * self.h0;
            vals.iter_mut().for_each(|v| *v += pad);
        }
        let xs: Vec<FieldElem> = (0..nodes as u64).map(FieldElem::new).collect();
        let mut coeffs = UniPoly::interpolate(&xs, &vals).coeffs;
        coeffs.resize(nodes, FieldElem::ZERO);
        coeffs
    }
}

/// How the prover half behaves inside one sum-check instance.
#[derive(Clone, Copy, Debug)]
pub enum ProverTactic {
    Honest,
    /// Support a false claim by tilting each round polynomial just enough
    /// to pass the running consistency checks; the final sketch comparison
    /// catches the accumulated tilt unless the hidden challenge point is a
    /// root.
    Lie,
    /// Add one to a single coefficient of one round polynomial.
    Perturb { round: usize, coeff: usize },
}

struct TacticProver {
    inner: HonestSumcheck,
    tactic: ProverTactic,
    /// Lie state: how far the previous round's tilt has drifted.
    carry: FieldElem,
    started: bool,
    ell: u64,
}

impl TacticProver {
    fn new(inner: HonestSumcheck, tactic: ProverTactic, claim_offset: FieldElem) -> TacticProver {
        let ell = inner.ell;
        TacticProver {
            inner,
            tactic,
            carry: claim_offset,
            started: false,
            ell,
        }
    }
}

impl RoundProver for TacticProver {
    fn round_poly(
        &mut self,
        j: usize,
        prev: Option<FieldElem>,
        degree_bound: usize,
    ) -> Vec<FieldElem> {
        let mut coeffs = self.inner.round_poly(j, prev, degree_bound);
        match self.tactic {
            ProverTactic::Honest => {}
            ProverTactic::Perturb { round, coeff } => {
                if j == round {
                    let c = coeff.min(degree_bound);
                    coeffs[c] += FieldElem::ONE;
                }
            }
            ProverTactic::Lie => {
                // carry_j = claim offset (round 1) or previous tilt at the
                // revealed challenge
                if self.started {
                    if let Some(r) = prev {
                        self.carry *= r; // tilt was carry * x
                    }
                }
                self.started = true;
                if degree_bound >= 1 {
                    // distribute the carry over a linear tilt c * x with
                    // sum_x c*x = carry
                    let t1: FieldElem = (0..self.ell).map(FieldElem::new).sum();
                    let c = self.carry * t1.inv();
                    coeffs[1] += c;
                    self.carry = c;
                } else {
                    let c = self.carry * FieldElem::new(self.ell).inv();
                    coeffs[0] += c;
                    self.carry = FieldElem::ZERO; // constant tilt dies at final check
                }
            }
        }
        coeffs
    }
}

// ---------------------------------------------------------------------------
// The verifier
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
pub struct SumcheckOutcome {
    pub accepted: bool,
    /// Verified semantic total (meaningful only on accept).
    pub total: FieldElem,
    pub rounds: usize,
    pub reject_round: Option<usize>,
    pub reason: Option<String>,
}

impl SumcheckOutcome {
    fn rejected(round: usize, reason: &str) -> SumcheckOutcome {
        SumcheckOutcome {
            accepted: false,
            total: FieldElem::ZERO,
            rounds: round,
            reject_round: Some(round),
            reason: Some(reason.to_string()),
        }
    }
}

/// Runs one sum-check instance against `prover` and records every message
/// under `label/` in the transcript.
///
/// `claimed_semantic` is the claim over the declared universe;
/// `member_count` converts it to the padded grid claim via the `h(0)`
/// correction. `challenges` are the sketch's pre-drawn coordinates and
/// `sketch_value` is `f_a(r)`.
#[allow(clippy::too_many_arguments)]
pub fn run_sumcheck(
    label: &str,
    grid: &GridParams,
    h: &UniPoly,
    claimed_semantic: FieldElem,
    member_count: u64,
    sketch_value: FieldElem,
    challenges: &[FieldElem],
    prover: &mut dyn RoundProver,
    tr: &mut Transcript,
) -> SumcheckOutcome {
    assert_eq!(challenges.len(), grid.d);
    let d = grid.d;
    let ell = grid.ell;
    let degree_bound = h.degree() * (ell - 1) as usize;
    let h0 = h.eval(FieldElem::ZERO);
    let pad = FieldElem::new(grid.grid_size() - member_count);
    let claimed_grid = claimed_semantic + pad * h0;

    tr.p2v(&format!("{label}/claim"), 1, WORD_BITS);
    let ps = power_sums(ell, degree_bound);
    let mut expected = claimed_grid;
    for j in 1..=d {
        let prev = if j > 1 {
            tr.v2p(&format!("{label}/challenge"), 1, WORD_BITS);
            Some(challenges[j - 2])
        } else {
            None
        };
        let coeffs = prover.round_poly(j, prev, degree_bound);
        tr.p2v(
            &format!("{label}/round-poly"),
            coeffs.len() as u64,
            coeffs.len() as u64 * WORD_BITS,
        );
        tr.round();
        if coeffs.len() > degree_bound + 1 {
            return SumcheckOutcome::rejected(j, "round polynomial exceeds degree bound");
        }
        let sum: FieldElem = coeffs
            .iter()
            .zip(ps.iter())
            .map(|(&c, &y)| c * y)
            .sum();
        if sum != expected {
            return SumcheckOutcome::rejected(j, "round consistency check failed");
        }
        expected = UniPoly {
            coeffs: coeffs.clone(),
        }
        .eval(challenges[j - 1]);
    }
    if expected != h.eval(sketch_value) {
        return SumcheckOutcome::rejected(d, "final evaluation disagrees with sketch");
    }
    SumcheckOutcome {
        accepted: true,
        total: claimed_semantic,
        rounds: d,
        reject_round: None,
        reason: None,
    }
}

/// Verifies `sum_i h(a_i) = claimed` over a mirrored vector.
pub fn sumcheck_run(
    label: &str,
    vec: &DerivedVector,
    h: &UniPoly,
    claimed: FieldElem,
    tactic: ProverTactic,
    tr: &mut Transcript,
) -> SumcheckOutcome {
    let grid = &vec.universe.grid;
    let honest = HonestSumcheck::new(grid, h, &vec.exact);
    let member = vec.universe.member_count;
    let h0 = h.eval(FieldElem::ZERO);
    let claim_grid = claimed + FieldElem::new(grid.grid_size() - member) * h0;
    let offset = claim_grid - HonestSumcheck::grid_total(grid, h, &vec.exact);
    let mut prover = TacticProver::new(honest, tactic, offset);
    run_sumcheck(
        label,
        grid,
        h,
        claimed,
        member,
        vec.sketch_value(),
        &vec.sketch.r,
        &mut prover,
        tr,
    )
}

/// Verifies a claimed `F^-1` count for a set of frequencies over `domain`.
pub fn run_finv(
    label: &str,
    vec: &DerivedVector,
    domain: &FreqDomain,
    targets: &[i64],
    claimed: u64,
    tactic: ProverTactic,
    tr: &mut Transcript,
) -> Result<SumcheckOutcome, SumcheckError> {
    let h = domain.indicator(targets)?;
    Ok(sumcheck_run(
        label,
        vec,
        &h,
        FieldElem::new(claimed),
        tactic,
        tr,
    ))
}

/// Subset protocol: after `+1` per base element and `-1` per claimed
/// member (members must arrive in strictly increasing canonical order),
/// the claim `S` is a subset of `E` is exactly `F^-1(-1) = 0`.
pub fn subset_check(
    label: &str,
    vec: &mut DerivedVector,
    claimed_members: &[u64],
    tactic: ProverTactic,
    tr: &mut Transcript,
) -> Result<SumcheckOutcome, SumcheckError> {
    if let Err(pos) = replay_canonical_check(claimed_members.iter()) {
        return Ok(SumcheckOutcome::rejected(
            0,
            &format!("subset stream out of canonical order at position {pos}"),
        ));
    }
    for &m in claimed_members {
        let tuple = vec.universe.grid.decode(m);
        vec.apply_tuple(&tuple, -1);
    }
    run_finv(
        label,
        vec,
        &FreqDomain::window(-1, 1),
        &[-1],
        0,
        tactic,
        tr,
    )
}
