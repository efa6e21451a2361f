//! Maximum cardinality matching in general graphs, certified by a
//! separator and the odd components it leaves behind.
//!
//! The matching itself is the lower bound. For the upper bound the prover
//! names a separator `V_S` and spanning trees of the components of
//! `G - V_S`; once the spanning-forest battery has verified the trees and
//! their maximality, the component sizes are trusted and the verifier
//! checks `(n + |V_S| - odd) / 2` against the matching size.
//!
//! Two maximality variants are offered. Variant A runs on the labeled
//! pair universe with increments of 2. Variant B replaces the labels by
//! per-component decrements drawn from a strictly monotone
//! progression-free sequence with all values 2 mod 5; the crossing
//! frequencies `1 - f(i) - f(j)` then collide with no benign case, so a
//! single inverse query over that set settles maximality.

use super::{MatchingCert, MatchingCheck, MatchingTamper};
use crate::gstream::{Graph, StreamError, StreamUpdate};
use crate::session::{
    session_rng, AdversaryStrategy, SessionConfig, Transcript, Value,
};
use crate::spanning::{
    check_forest, tamper_forest, ForestCheck, ForestTamper, MaximalityKind, SpanningForestCert,
};

/// Which maximality protocol backs the certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MaximalityVariant {
    A,
    B,
}

/// Separator plus spanning forest of the remaining components.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TutteBergeCert {
    pub separator: Vec<usize>,
    pub forest: SpanningForestCert,
}

impl TutteBergeCert {
    pub fn build(graph: &Graph) -> TutteBergeCert {
        let (_, separator) = crate::oracles::oracle_tutte_berge(graph);
        let forest = SpanningForestCert::build(graph, &separator);
        TutteBergeCert { separator, forest }
    }

    pub fn bound(&self, n: usize) -> u64 {
        let odd = self
            .forest
            .component_sizes()
            .iter()
            .filter(|&&s| s % 2 == 1)
            .count() as u64;
        (n as u64 + self.separator.len() as u64 - odd) / 2
    }
}

// ---------------------------------------------------------------------------
// Progression-free sequence generation
// ---------------------------------------------------------------------------

/// Strictly increasing 3-AP-free values, all 2 mod 5, for the variant-B
/// component decrements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApFreeSequence {
    pub d: usize,
    pub k: usize,
    pub values: Vec<u64>,
}

impl ApFreeSequence {
    /// The crossing-frequency query set `X = {1 - f(i) - f(j), i != j}`.
    pub fn crossing_values(&self) -> Vec<i64> {
        let mut out = Vec::new();
        for (a, &fa) in self.values.iter().enumerate() {
            for &fb in self.values.iter().skip(a + 1) {
                out.push(1 - fa as i64 - fb as i64);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Digit-multiset value: `a_1 + a_2 (2d-1) + ... + a_k (2d-1)^(k-1)`,
/// where `digits` lists `(a_k, ..., a_1)` most significant first.
pub(crate) fn digit_value(digits_msd_first: &[u64], radix: u64) -> u64 {
    digits_msd_first.iter().fold(0, |acc, &a| acc * radix + a)
}

fn next_permutation(arr: &mut [u64]) -> bool {
    if arr.len() < 2 {
        return false;
    }
    let mut i = arr.len() - 1;
    while i > 0 && arr[i - 1] >= arr[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = arr.len() - 1;
    while arr[j] <= arr[i - 1] {
        j -= 1;
    }
    arr.swap(i - 1, j);
    arr[i..].reverse();
    true
}

fn family_size(d: u64, k: u64) -> u64 {
    // k! / ((k/d)!)^d, saturating; desk-scale arguments stay tiny
    let fact = |m: u64| (1..=m).fold(1u64, |a, b| a.saturating_mul(b));
    let rep = fact(k / d);
    let mut denom = 1u64;
    for _ in 0..d {
        denom = denom.saturating_mul(rep);
    }
    fact(k) / denom
}

/// Generates the component-decrement sequence for `r` components: take
/// the first `5r` members of a digit-multiset family (each digit value
/// appearing exactly `k/d` times, radix `2d - 1`), keep the largest
/// residue class mod 5, and shift it onto residue 2.
pub fn generate_f_a(r: usize) -> ApFreeSequence {
    if r == 0 {
        return ApFreeSequence {
            d: 3,
            k: 3,
            values: vec![],
        };
    }
    let need = 5 * r as u64;
    let (d, k) = 'search: {
        for k in 3u64..=24 {
            // larger d first: biggest family for this digit count
            for d in (3..=k).rev() {
                if k % d == 0 && family_size(d, k) >= need {
                    break 'search (d, k);
                }
            }
        }
        panic!("no digit family large enough for r = {r}");
    };
    let radix = 2 * d - 1;
    // smallest permutation: digits ascending, most significant first
    let mut digits: Vec<u64> = (0..k).map(|t| t / (k / d)).collect();
    let mut members = Vec::with_capacity(need as usize);
    loop {
        members.push(digit_value(&digits, radix));
        if members.len() as u64 == need || !next_permutation(&mut digits) {
            break;
        }
    }
    // largest residue class mod 5, smallest residue on ties
    let mut counts = [0usize; 5];
    for &v in &members {
        counts[(v % 5) as usize] += 1;
    }
    let j = (0..5).max_by_key(|&j| (counts[j], std::cmp::Reverse(j))).unwrap();
    let shift = 2i64 - j as i64;
    let values: Vec<u64> = members
        .iter()
        .filter(|&&v| v % 5 == j as u64)
        .take(r)
        .map(|&v| (v as i64 + shift) as u64)
        .collect();
    assert_eq!(values.len(), r, "pigeonhole guarantees r members");
    ApFreeSequence {
        d: d as usize,
        k: k as usize,
        values,
    }
}

// ---------------------------------------------------------------------------
// The protocol
// ---------------------------------------------------------------------------

/// Verified maximum cardinality matching in a general graph.
pub fn mcm_general_tutte_berge(
    n: usize,
    updates: &[StreamUpdate],
    variant: MaximalityVariant,
    cfg: &SessionConfig,
) -> Result<Transcript, StreamError> {
    let graph = Graph::from_updates(n, updates)?;
    let (_, pairs) = crate::oracles::oracle_mcm(&graph);
    let cert = MatchingCert::from_pairs(&pairs);
    let tb = TutteBergeCert::build(&graph);
    run_mcm_general(n, updates, &graph, &cert, &tb, variant, cfg)
}

pub(crate) fn run_mcm_general(
    n: usize,
    updates: &[StreamUpdate],
    graph: &Graph,
    cert: &MatchingCert,
    tb: &TutteBergeCert,
    variant: MaximalityVariant,
    cfg: &SessionConfig,
) -> Result<Transcript, StreamError> {
    let mut tr = Transcript::new(
        match variant {
            MaximalityVariant::A => "mcm-general-a",
            MaximalityVariant::B => "mcm-general-b",
        },
        cfg.seed,
    );
    let mut rng = session_rng(cfg.seed);

    let mut cert = cert.clone();
    let mut m_tamper = MatchingTamper::honest(&cert);
    let mut forest = tb.forest.clone();
    let mut f_tamper = ForestTamper::default();
    match cfg.adversary {
        Some(AdversaryStrategy::FakeMatchingEdge) => {
            'outer: for a in 0..n {
                for b in (a + 1)..n {
                    if !graph.has_edge(a, b) {
                        if cert.edges.is_empty() {
                            cert.edges.push((a, b, 1));
                        } else {
                            cert.edges[0] = (a, b, 1);
                        }
                        cert.edges.sort_unstable();
                        m_tamper = MatchingTamper::honest(&cert);
                        m_tamper.lie_on_subset = true;
                        break 'outer;
                    }
                }
            }
        }
        Some(strategy) => {
            // forest-level tampering within G - V_S
            let sub_edges: Vec<(usize, usize, u64)> = graph
                .edges
                .iter()
                .filter(|&&(a, b, _)| !tb.separator.contains(&a) && !tb.separator.contains(&b))
                .copied()
                .collect();
            let sub = Graph {
                n,
                edges: sub_edges,
            };
            if let Some((t_forest, t_tamper)) = tamper_forest(&sub, &tb.forest, strategy) {
                forest = t_forest;
                f_tamper = t_tamper;
            }
        }
        None => {}
    }

    let mut matching = MatchingCheck::new(n, None, &mut rng);
    for u in updates {
        matching.absorb(u.i, u.j, 1, u.delta as i64);
    }
    tr.note_space(matching.space_bits());
    if let Err((stage, reason)) = matching.verify("matching", &cert, &m_tamper, &mut tr) {
        tr.reject(&stage, &reason);
        return Ok(tr);
    }

    let maximality = match variant {
        MaximalityVariant::A => MaximalityKind::Labeled { freq_hi: 5 },
        MaximalityVariant::B => MaximalityKind::ApFree {
            f: generate_f_a(forest.trees.len()).values,
        },
    };
    let check = ForestCheck {
        label: "tutte-berge",
        n,
        stream: updates,
        cert: &forest,
        excluded: &tb.separator,
        mode: cfg.mode,
        maximality,
        tamper: f_tamper,
    };
    let sizes = match check_forest(&check, &mut rng, &mut tr) {
        Ok(pass) => pass.sizes,
        Err((stage, reason)) => {
            tr.reject(&stage, &reason);
            return Ok(tr);
        }
    };
    let odd = sizes.iter().filter(|&&s| s % 2 == 1).count() as u64;
    let upper = (n as u64 + tb.separator.len() as u64 - odd) / 2;
    if upper != cert.size() {
        tr.reject(
            "tutte-berge/bound",
            &format!("bounds do not meet: matching {} vs upper {upper}", cert.size()),
        );
        return Ok(tr);
    }
    tr.accept(Value::Count(cert.size()));
    Ok(tr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gstream::gen_random_graph;
    use crate::oracles::{oracle_3ap_free, oracle_mcm};

    fn to_updates(pairs: &[(usize, usize)]) -> Vec<StreamUpdate> {
        pairs
            .iter()
            .map(|&(a, b)| StreamUpdate::new(a, b, None, 1).unwrap())
            .collect()
    }

    #[test]
    fn triangle_certificate_arithmetic() {
        // one odd component of size 3, empty separator: (3 + 0 - 1)/2 = 1
        let updates = to_updates(&[(0, 1), (1, 2), (0, 2)]);
        let g = Graph::from_updates(3, &updates).unwrap();
        let tb = TutteBergeCert::build(&g);
        assert!(tb.separator.is_empty());
        assert_eq!(tb.bound(3), 1);
        for variant in [MaximalityVariant::A, MaximalityVariant::B] {
            let tr =
                mcm_general_tutte_berge(3, &updates, variant, &SessionConfig::honest(1)).unwrap();
            assert_eq!(tr.verdict.accepted_count(), Some(1), "{variant:?}");
        }
    }

    #[test]
    fn two_disjoint_triangles() {
        let updates = to_updates(&[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]);
        let tr = mcm_general_tutte_berge(6, &updates, MaximalityVariant::A, &SessionConfig::honest(2))
            .unwrap();
        assert_eq!(tr.verdict.accepted_count(), Some(2));
    }

    #[test]
    fn k4_has_an_even_component() {
        let updates = to_updates(&[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let g = Graph::from_updates(4, &updates).unwrap();
        let tb = TutteBergeCert::build(&g);
        assert_eq!(tb.bound(4), 2);
        let tr = mcm_general_tutte_berge(4, &updates, MaximalityVariant::A, &SessionConfig::honest(3))
            .unwrap();
        assert_eq!(tr.verdict.accepted_count(), Some(2));
    }

    #[test]
    fn variants_agree_with_the_oracle_and_each_other() {
        for seed in 0..25 {
            let n = 4 + (seed as usize % 7);
            let updates = gen_random_graph(n, 0.35, 1, seed);
            let g = Graph::from_updates(n, &updates).unwrap();
            let want = oracle_mcm(&g).0;
            let a = mcm_general_tutte_berge(n, &updates, MaximalityVariant::A, &SessionConfig::honest(seed))
                .unwrap();
            let b = mcm_general_tutte_berge(n, &updates, MaximalityVariant::B, &SessionConfig::honest(seed))
                .unwrap();
            assert_eq!(a.verdict.accepted_count(), Some(want), "seed {seed}");
            assert_eq!(
                a.verdict.is_accept(),
                b.verdict.is_accept(),
                "variant verdicts disagree at seed {seed}"
            );
            assert_eq!(b.verdict.accepted_count(), Some(want), "seed {seed}");
        }
    }

    #[test]
    fn general_matching_adversaries_are_rejected() {
        // two components joined by nothing, with a cycle for slack
        let updates = to_updates(&[(0, 1), (1, 2), (0, 2), (2, 3), (4, 5), (5, 6), (4, 6)]);
        for variant in [MaximalityVariant::A, MaximalityVariant::B] {
            for strategy in [
                AdversaryStrategy::FakeMatchingEdge,
                AdversaryStrategy::ForestCycle,
                AdversaryStrategy::HiddenCrossEdge,
                AdversaryStrategy::DuplicateVertex,
            ] {
                let cfg = SessionConfig::adversarial(17, strategy);
                let tr = mcm_general_tutte_berge(7, &updates, variant, &cfg).unwrap();
                assert!(!tr.verdict.is_accept(), "{variant:?} {strategy:?} accepted");
            }
        }
    }

    #[test]
    fn digit_family_hand_values() {
        // d = 3, k = 3, radix 5: the digit vector (a1, a2, a3) = (0, 1, 2)
        // evaluates to 0*1 + 1*5 + 2*25 = 55; the family's smallest value
        // comes from the ascending permutation and equals 7
        assert_eq!(digit_value(&[2, 1, 0], 5), 55);
        assert_eq!(digit_value(&[0, 1, 2], 5), 7);
        let mut digits = vec![0u64, 1, 2];
        let mut values = vec![digit_value(&digits, 5)];
        while next_permutation(&mut digits) {
            values.push(digit_value(&digits, 5));
        }
        assert_eq!(values, vec![7, 11, 27, 35, 51, 55]);
        assert!(values.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn generated_sequences_are_progression_free_and_2_mod_5() {
        for r in [1usize, 2, 3, 5, 10, 25, 50] {
            let f = generate_f_a(r);
            assert_eq!(f.values.len(), r);
            assert!(f.values.windows(2).all(|w| w[0] < w[1]), "monotone");
            assert!(f.values.iter().all(|&v| v % 5 == 2), "residue");
            assert!(oracle_3ap_free(&f.values), "r = {r}");
        }
    }

    #[test]
    fn crossing_values_collide_with_no_benign_case() {
        for r in 1usize..=50 {
            let f = generate_f_a(r);
            let crossing = f.crossing_values();
            let mut benign: Vec<i64> = vec![0, 1];
            for &v in &f.values {
                let v = v as i64;
                benign.extend([-2 * v, 1 - 2 * v, -v, 1 - v]);
            }
            for (a, &fa) in f.values.iter().enumerate() {
                for &fb in f.values.iter().skip(a + 1) {
                    benign.push(-(fa as i64) - fb as i64);
                }
            }
            for x in &crossing {
                assert!(!benign.contains(x), "collision at r = {r}");
                assert_eq!(x.rem_euclid(5), 2, "crossing values are 2 mod 5");
            }
        }
    }
}
