//! The four matching protocols and the metric TSP pipeline built on them.
//!
//! All of them share one sub-protocol: the prover presents a claimed
//! matching, and the verifier checks that the edges really are stream
//! edges (subset protocol) and that no two share an endpoint (multiset
//! equality between edge endpoints and a strictly sorted vertex replay).
//! What differs is the optimality certificate: a vertex cover for
//! bipartite cardinality matching, vertex duals for bipartite weighted
//! matching, vertex duals plus a laminar family of odd sets in general
//! graphs, and a separator with odd components for general cardinality
//! matching.

pub mod bipartite;
pub mod general;
pub mod tsp;
pub mod tutte_berge;
pub mod weighted;

pub use bipartite::{mcm_bipartite, verify_matching_cert, verify_vertex_cover};
pub use general::{mwm_general, mwm_general_with_cert, shadow_dual_histogram, LaminarDualCert};
pub use tsp::tsp_verify;
pub use tutte_berge::{generate_f_a, mcm_general_tutte_berge, ApFreeSequence, MaximalityVariant};
pub use weighted::mwm_bipartite;

use crate::fingerprint::Fingerprint;
use crate::gstream::{replay_canonical_check, DerivedVector, Universe};
use crate::session::{SessionRng, Transcript};
use crate::sumcheck::{subset_check, ProverTactic, SumcheckOutcome};

/// A claimed matching: edges in increasing `(i, j)` order, weight 1 for
/// unweighted protocols.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MatchingCert {
    pub edges: Vec<(usize, usize, u64)>,
}

impl MatchingCert {
    pub fn from_pairs(pairs: &[(usize, usize)]) -> MatchingCert {
        let mut edges: Vec<(usize, usize, u64)> = pairs
            .iter()
            .map(|&(a, b)| (a.min(b), a.max(b), 1))
            .collect();
        edges.sort_unstable();
        MatchingCert { edges }
    }

    pub fn from_weighted(pairs: &[(usize, usize)], graph: &crate::gstream::Graph) -> MatchingCert {
        let mut edges: Vec<(usize, usize, u64)> = pairs
            .iter()
            .map(|&(a, b)| {
                let (a, b) = (a.min(b), a.max(b));
                (a, b, graph.weight(a, b).expect("matching edge in graph"))
            })
            .collect();
        edges.sort_unstable();
        MatchingCert { edges }
    }

    pub fn size(&self) -> u64 {
        self.edges.len() as u64
    }

    pub fn weight(&self) -> u64 {
        self.edges.iter().map(|e| e.2).sum()
    }

    /// The matched-vertex replay an honest prover sends: endpoints in
    /// strictly increasing order.
    pub fn endpoints_sorted(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.edges.iter().flat_map(|&(a, b, _)| [a, b]).collect();
        v.sort_unstable();
        v
    }
}

/// How a cheating prover interferes with the matching sub-protocol.
pub(crate) struct MatchingTamper {
    pub lie_on_subset: bool,
    /// The matched-vertex replay actually transmitted (honest provers send
    /// `cert.endpoints_sorted()`).
    pub vertex_replay: Vec<usize>,
}

impl MatchingTamper {
    pub fn honest(cert: &MatchingCert) -> MatchingTamper {
        MatchingTamper {
            lie_on_subset: false,
            vertex_replay: cert.endpoints_sorted(),
        }
    }
}

/// Verifier state for the matching sub-protocol: a subset vector over the
/// edge universe (weighted protocols index by `(i, j, w)`) and an endpoint
/// fingerprint.
pub(crate) struct MatchingCheck {
    pub subset_vec: DerivedVector,
    fp_base: Fingerprint,
    fp_endpoints: Fingerprint,
    weighted: bool,
    n: usize,
}

impl MatchingCheck {
    pub fn new(n: usize, weight_bound: Option<u64>, rng: &mut SessionRng) -> MatchingCheck {
        let fp_base = Fingerprint::new(n as u64, rng);
        Self::with_fp_base(n, weight_bound, fp_base, rng)
    }

    /// Shares the caller's vertex fingerprint basis so the endpoint
    /// multiset can be compared against other vertex-set fingerprints.
    pub fn with_fp_base(
        n: usize,
        weight_bound: Option<u64>,
        fp_base: Fingerprint,
        rng: &mut SessionRng,
    ) -> MatchingCheck {
        let universe = match weight_bound {
            Some(w) => Universe {
                name: "weighted-edges",
                grid: crate::gstream::Mode::LogRound
                    .grid(&[n as u64, n as u64, w + 1])
                    .expect("grid"),
                member_count: (n * n) as u64 * (w + 1),
            },
            None => Universe::pairs(n, crate::gstream::Mode::LogRound).expect("grid"),
        };
        let fp_endpoints = fp_base.sibling();
        MatchingCheck {
            subset_vec: DerivedVector::new(universe, rng),
            fp_base,
            fp_endpoints,
            weighted: weight_bound.is_some(),
            n,
        }
    }

    pub fn fp_endpoints(&self) -> &Fingerprint {
        &self.fp_endpoints
    }

    pub fn absorb(&mut self, i: usize, j: usize, w: u64, delta: i64) {
        if self.weighted {
            self.subset_vec
                .apply_tuple(&[i.min(j) as u64, i.max(j) as u64, w], delta);
        } else {
            self.subset_vec
                .apply_tuple(&[i.min(j) as u64, i.max(j) as u64], delta);
        }
    }

    pub fn space_bits(&self) -> u64 {
        self.subset_vec.sketch.space_bits() + 2 * self.fp_base.space_bits()
    }

    /// Checks that `M` is a matching contained in the stream.
    pub fn verify(
        &mut self,
        label: &str,
        cert: &MatchingCert,
        tamper: &MatchingTamper,
        tr: &mut Transcript,
    ) -> Result<(), (String, String)> {
        let n_bits = crate::gstream::bits_for(self.n);
        let bad = |stage: &str, reason: String| Err((format!("{label}/{stage}"), reason));
        let mut members = Vec::with_capacity(cert.edges.len());
        for &(a, b, w) in &cert.edges {
            tr.p2v(&format!("{label}/cert/edge"), 0, 3 * n_bits);
            if a >= self.n || b >= self.n || a >= b {
                return bad("cert", format!("malformed matching edge ({a}, {b})"));
            }
            self.fp_endpoints.update(a as u64, 1).unwrap();
            self.fp_endpoints.update(b as u64, 1).unwrap();
            let tuple: Vec<u64> = if self.weighted {
                vec![a as u64, b as u64, w]
            } else {
                vec![a as u64, b as u64]
            };
            members.push(self.subset_vec.universe.grid.index_of(&tuple));
        }
        // vertex replay: strict order means each vertex at most once, so
        // fingerprint equality pins every endpoint frequency to exactly 1
        let mut fp_replay = self.fp_base.sibling();
        for &v in &tamper.vertex_replay {
            tr.p2v(&format!("{label}/cert/vertex"), 0, n_bits);
            if v >= self.n {
                return bad("cert", format!("matched vertex {v} out of range"));
            }
            fp_replay.update(v as u64, 1).unwrap();
        }
        if let Err(pos) = replay_canonical_check(tamper.vertex_replay.iter()) {
            return bad("mse", format!("matched-vertex replay out of order at {pos}"));
        }
        if !fp_replay.equals(&self.fp_endpoints).unwrap() {
            return bad("mse", "shared endpoint in claimed matching".to_string());
        }
        let tactic = if tamper.lie_on_subset {
            ProverTactic::Lie
        } else {
            ProverTactic::Honest
        };
        let out: SumcheckOutcome = subset_check(
            &format!("{label}/subset"),
            &mut self.subset_vec,
            &members,
            tactic,
            tr,
        )
        .map_err(|e| (format!("{label}/subset"), e.to_string()))?;
        if !out.accepted {
            return bad(
                "subset",
                out.reason
                    .unwrap_or_else(|| "non-edge in matching".to_string()),
            );
        }
        Ok(())
    }
}

/// Honest dual search shared by the weighted protocols: given an optimal
/// matching, find integral duals certifying it. Guided by complementary
/// slackness: unmatched vertices carry zero, matched edges are tight, and
/// sets with positive weight hold a near-perfect internal matching.
pub mod dual_search {
    use crate::gstream::Graph;

    /// One claw: nested odd sets, outermost first, each with its z-weight.
    /// Wire tuples carry the cumulative sums.
    #[derive(Clone, Debug, PartialEq, Eq)]
    pub struct Claw {
        pub sets: Vec<(Vec<usize>, u64)>,
    }

    impl Claw {
        /// Cumulative weight down to each level.
        pub fn r_values(&self) -> Vec<u64> {
            let mut acc = 0;
            self.sets
                .iter()
                .map(|&(_, z)| {
                    acc += z;
                    acc
                })
                .collect()
        }

        /// Boundary of each level: the set minus the next deeper one.
        pub fn boundaries(&self) -> Vec<Vec<usize>> {
            let mut out = Vec::with_capacity(self.sets.len());
            for (t, (set, _)) in self.sets.iter().enumerate() {
                let boundary: Vec<usize> = match self.sets.get(t + 1) {
                    Some((inner, _)) => {
                        set.iter().copied().filter(|v| !inner.contains(v)).collect()
                    }
                    None => set.clone(),
                };
                out.push(boundary);
            }
            out
        }

        /// Level of a vertex (1-based), if it participates.
        pub fn level_of(&self, v: usize) -> Option<usize> {
            let mut level = None;
            for (t, (set, _)) in self.sets.iter().enumerate() {
                if set.contains(&v) {
                    level = Some(t + 1);
                }
            }
            level
        }
    }

    /// Weight assigned to an edge by the family: cumulative z over sets
    /// containing both endpoints.
    pub fn edge_r(claws: &[Claw], a: usize, b: usize) -> u64 {
        claws
            .iter()
            .flat_map(|c| c.sets.iter())
            .filter(|(set, _)| set.contains(&a) && set.contains(&b))
            .map(|&(_, z)| z)
            .sum()
    }

    fn is_full(mask: u64, matching: &[(usize, usize)]) -> bool {
        let inside = matching
            .iter()
            .filter(|&&(a, b)| mask & (1 << a) != 0 && mask & (1 << b) != 0)
            .count();
        inside == (mask.count_ones() as usize) / 2
    }

    fn split_targets(
        graph: &Graph,
        pairs: &[(usize, usize, u64)],
        r_of: &dyn Fn(usize, usize) -> u64,
    ) -> Option<Vec<u64>> {
        let n = graph.n;
        let mut y = vec![0u64; n];
        let mut fixed = vec![false; n];
        for v in 0..n {
            if !pairs.iter().any(|&(a, b, _)| a == v || b == v) {
                fixed[v] = true; // exposed vertices are pinned to zero
            }
        }
        // exposed-exposed edges must already be covered by the family
        for &(a, b, w) in &graph.edges {
            if fixed[a] && fixed[b] && r_of(a, b) < w {
                return None;
            }
        }
        fn rec(
            graph: &Graph,
            pairs: &[(usize, usize, u64)],
            k: usize,
            y: &mut Vec<u64>,
            fixed: &mut Vec<bool>,
            r_of: &dyn Fn(usize, usize) -> u64,
        ) -> bool {
            if k == pairs.len() {
                return true;
            }
            let (a, b, t) = pairs[k];
            for ya in 0..=t {
                y[a] = ya;
                y[b] = t - ya;
                fixed[a] = true;
                fixed[b] = true;
                let consistent = graph.edges.iter().all(|&(p, q, w)| {
                    if fixed[p] && fixed[q] && (p == a || p == b || q == a || q == b) {
                        y[p] + y[q] + r_of(p, q) >= w
                    } else {
                        true
                    }
                });
                if consistent && rec(graph, pairs, k + 1, y, fixed, r_of) {
                    return true;
                }
                fixed[a] = false;
                fixed[b] = false;
            }
            y[a] = 0;
            y[b] = 0;
            false
        }
        if rec(graph, pairs, 0, &mut y, &mut fixed, r_of) {
            Some(y)
        } else {
            None
        }
    }

    /// Searches for integral duals `(y, claws)` whose value equals the
    /// weight of the given optimal matching. Bipartite-like instances
    /// resolve at the empty family; odd structures get claws. The claw
    /// count, nesting depth and cumulative weight are bounded by the wire
    /// format's universe parameters.
    pub fn find_duals(
        graph: &Graph,
        matching: &[(usize, usize)],
        max_claws: usize,
        max_depth: usize,
        max_r: u64,
    ) -> Option<(Vec<u64>, Vec<Claw>)> {
        let n = graph.n;
        assert!(n <= 16);
        let w_of = |a: usize, b: usize| graph.weight(a, b).expect("matching edge");
        let mut pool: Vec<u64> = (1u64..(1 << n))
            .filter(|m| {
                let c = m.count_ones();
                c >= 3 && c % 2 == 1 && is_full(*m, matching)
            })
            .collect();
        pool.sort_unstable_by_key(|m| (m.count_ones(), *m));

        let mut chains: Vec<Vec<u64>> = pool.iter().map(|&m| vec![m]).collect();
        if max_depth >= 2 {
            for &outer in &pool {
                for &inner in &pool {
                    if inner != outer && inner & outer == inner {
                        chains.push(vec![outer, inner]);
                    }
                }
            }
        }
        let mut families: Vec<Vec<Vec<u64>>> = vec![vec![]];
        for chain in &chains {
            families.push(vec![chain.clone()]);
        }
        if max_claws >= 2 {
            for i in 0..chains.len() {
                for j in (i + 1)..chains.len() {
                    if chains[i][0] & chains[j][0] == 0 {
                        families.push(vec![chains[i].clone(), chains[j].clone()]);
                    }
                }
            }
        }

        let masks_to_claw = |chain: &[u64], zs: &[u64]| -> Claw {
            Claw {
                sets: chain
                    .iter()
                    .zip(zs.iter())
                    .map(|(&m, &z)| {
                        let set: Vec<usize> = (0..n).filter(|v| m & (1 << v) != 0).collect();
                        (set, z)
                    })
                    .collect(),
            }
        };

        for family in &families {
            let shapes: Vec<usize> = family.iter().map(|c| c.len()).collect();
            let total_sets: usize = shapes.iter().sum();
            let mut zs = vec![1u64; total_sets.max(1)];
            if total_sets == 0 {
                zs.clear();
            }
            'z: loop {
                let mut claws = Vec::new();
                let mut off = 0;
                let mut ok = true;
                for (chain, &len) in family.iter().zip(shapes.iter()) {
                    let z = &zs[off..off + len];
                    off += len;
                    if z.iter().sum::<u64>() > max_r {
                        ok = false;
                        break;
                    }
                    claws.push(masks_to_claw(chain, z));
                }
                if ok {
                    let r_of = |a: usize, b: usize| edge_r(&claws, a, b);
                    let mut pairs = Vec::new();
                    let mut feasible = true;
                    for &(a, b) in matching {
                        let w = w_of(a, b);
                        let r = r_of(a, b);
                        if r > w {
                            feasible = false;
                            break;
                        }
                        pairs.push((a, b, w - r));
                    }
                    if feasible {
                        if let Some(y) = split_targets(graph, &pairs, &r_of) {
                            return Some((y, claws));
                        }
                    }
                }
                if zs.is_empty() {
                    break 'z;
                }
                let mut k = 0;
                loop {
                    if k == zs.len() {
                        break 'z;
                    }
                    zs[k] += 1;
                    if zs[k] <= max_r {
                        break;
                    }
                    zs[k] = 1;
                    k += 1;
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::dual_search::{edge_r, find_duals, Claw};
    use super::*;
    use crate::gstream::Graph;
    use crate::oracles::oracle_mwm;

    #[test]
    fn cert_accessors() {
        let cert = MatchingCert::from_pairs(&[(3, 1), (0, 2)]);
        assert_eq!(cert.edges, vec![(0, 2, 1), (1, 3, 1)]);
        assert_eq!(cert.size(), 2);
        assert_eq!(cert.endpoints_sorted(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn claw_accessors() {
        let claw = Claw {
            sets: vec![(vec![0, 1, 2, 3, 4], 2), (vec![1, 2, 3], 1)],
        };
        assert_eq!(claw.r_values(), vec![2, 3]);
        assert_eq!(claw.boundaries(), vec![vec![0, 4], vec![1, 2, 3]]);
        assert_eq!(claw.level_of(1), Some(2));
        assert_eq!(claw.level_of(0), Some(1));
        assert_eq!(claw.level_of(5), None);
        assert_eq!(edge_r(std::slice::from_ref(&claw), 1, 2), 3);
        assert_eq!(edge_r(std::slice::from_ref(&claw), 0, 1), 2);
        assert_eq!(edge_r(&[claw], 0, 5), 0);
    }

    #[test]
    fn triangle_unit_weights_get_the_textbook_certificate() {
        let g = Graph {
            n: 3,
            edges: vec![(0, 1, 1), (0, 2, 1), (1, 2, 1)],
        };
        let (c, m) = oracle_mwm(&g);
        assert_eq!(c, 1);
        let (y, claws) = find_duals(&g, &m, 2, 2, 6).unwrap();
        assert_eq!(y, vec![0, 0, 0]);
        assert_eq!(claws.len(), 1);
        assert_eq!(claws[0].sets, vec![(vec![0, 1, 2], 1)]);
    }

    #[test]
    fn single_edge_gets_pure_vertex_duals() {
        let g = Graph {
            n: 2,
            edges: vec![(0, 1, 7)],
        };
        let (c, m) = oracle_mwm(&g);
        let (y, claws) = find_duals(&g, &m, 2, 2, 7).unwrap();
        assert!(claws.is_empty());
        assert_eq!(y.iter().sum::<u64>(), c);
        assert_eq!(y, vec![0, 7]); // lexicographically first split
    }

    #[test]
    fn duals_certify_random_small_instances() {
        use crate::gstream::gen_random_graph;
        for seed in 0..40 {
            let n = 3 + (seed as usize % 4);
            let updates = gen_random_graph(n, 0.7, 4, seed);
            let g = Graph::from_updates(n, &updates).unwrap();
            let (c, m) = oracle_mwm(&g);
            let Some((y, claws)) = find_duals(&g, &m, 2, 2, 4) else {
                panic!("no certificate found at seed {seed}");
            };
            for &(a, b, w) in &g.edges {
                assert!(y[a] + y[b] + edge_r(&claws, a, b) >= w, "seed {seed}");
            }
            let zsum: u64 = claws
                .iter()
                .flat_map(|c| c.sets.iter())
                .map(|(set, z)| z * (set.len() as u64 / 2))
                .sum();
            assert_eq!(y.iter().sum::<u64>() + zsum, c, "seed {seed}");
            for claw in &claws {
                for (set, z) in &claw.sets {
                    assert!(set.len() % 2 == 1 && *z >= 1);
                }
            }
        }
    }
}
