//! Maximum cardinality matching in bipartite graphs.
//!
//! The prover sends a matching (the lower bound) and a vertex cover of the
//! same size (the upper bound). A vertex cover is verified without
//! replaying the edges: the stream put +1 on every edge slot, each cover
//! vertex takes -1 from all slots incident to it, and the cover is valid
//! iff no slot is left at frequency 1.

use super::{MatchingCert, MatchingCheck, MatchingTamper};
use crate::gstream::{
    bits_for, incident_pair_patterns, replay_canonical_check, DerivedVector, Graph, StreamError,
    StreamUpdate, Universe,
};
use crate::session::{
    session_rng, AdversaryStrategy, SessionConfig, Transcript, Value,
};
use crate::sumcheck::{run_finv, FreqDomain, ProverTactic};

/// A claimed vertex cover, strictly sorted.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct VertexCoverCert {
    pub vertices: Vec<usize>,
}

/// Honest prover: maximum bipartite matching by augmenting paths, and the
/// matched cover construction (alternating reachability from unmatched
/// left vertices).
pub(crate) fn konig_prover(graph: &Graph) -> Option<(Vec<(usize, usize)>, Vec<usize>)> {
    let n = graph.n;
    let adj = graph.adjacency();
    // 2-color; the protocol's precondition is a bipartite input
    let mut color = vec![-1i8; n];
    for s in 0..n {
        if color[s] != -1 {
            continue;
        }
        color[s] = 0;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if color[w] == -1 {
                    color[w] = 1 - color[v];
                    stack.push(w);
                } else if color[w] == color[v] {
                    return None;
                }
            }
        }
    }
    let left: Vec<usize> = (0..n).filter(|&v| color[v] == 0).collect();
    let mut mate = vec![usize::MAX; n];
    fn augment(
        v: usize,
        adj: &[Vec<usize>],
        mate: &mut [usize],
        visited: &mut [bool],
    ) -> bool {
        for &w in &adj[v] {
            if visited[w] {
                continue;
            }
            visited[w] = true;
            if mate[w] == usize::MAX || augment(mate[w], adj, mate, visited) {
                mate[w] = v;
                mate[v] = w;
                return true;
            }
        }
        false
    }
    for &v in &left {
        if mate[v] == usize::MAX {
            let mut visited = vec![false; n];
            augment(v, &adj, &mut mate, &mut visited);
        }
    }
    let matching: Vec<(usize, usize)> = left
        .iter()
        .filter(|&&v| mate[v] != usize::MAX)
        .map(|&v| (v.min(mate[v]), v.max(mate[v])))
        .collect();
    // alternating reachability from exposed left vertices
    let mut reach = vec![false; n];
    let mut stack: Vec<usize> = left
        .iter()
        .copied()
        .filter(|&v| mate[v] == usize::MAX)
        .collect();
    for &v in &stack {
        reach[v] = true;
    }
    while let Some(v) = stack.pop() {
        if color[v] == 0 {
            for &w in &adj[v] {
                if !reach[w] && mate[v] != w {
                    reach[w] = true;
                    stack.push(w);
                }
            }
        } else if mate[v] != usize::MAX && !reach[mate[v]] {
            reach[mate[v]] = true;
            stack.push(mate[v]);
        }
    }
    let mut cover: Vec<usize> = (0..n)
        .filter(|&v| (color[v] == 0 && !reach[v]) || (color[v] == 1 && reach[v]))
        .filter(|&v| !adj[v].is_empty() || mate[v] != usize::MAX)
        .collect();
    cover.sort_unstable();
    debug_assert_eq!(cover.len(), matching.len(), "Koenig equality");
    Some((matching, cover))
}

/// Standalone matching-certificate check: edges are stream edges and no
/// endpoint repeats.
pub fn verify_matching_cert(
    n: usize,
    updates: &[StreamUpdate],
    cert: &MatchingCert,
    cfg: &SessionConfig,
) -> Result<Transcript, StreamError> {
    Graph::from_updates(n, updates)?;
    let mut tr = Transcript::new("matching-cert", cfg.seed);
    let mut rng = session_rng(cfg.seed);
    let mut check = MatchingCheck::new(n, None, &mut rng);
    for u in updates {
        check.absorb(u.i, u.j, 1, u.delta as i64);
    }
    tr.note_space(check.space_bits());
    match check.verify("matching", cert, &MatchingTamper::honest(cert), &mut tr) {
        Ok(()) => tr.accept(Value::Count(cert.size())),
        Err((stage, reason)) => tr.reject(&stage, &reason),
    }
    Ok(tr)
}

/// Applies a cover vertex's decrements to the pair universe.
pub(crate) fn cover_decrements(vec: &mut DerivedVector, n: usize, v: usize) {
    for p in incident_pair_patterns(n, v) {
        vec.apply(&p, -1);
    }
}

/// Standalone vertex-cover check over a stream: accepts iff no edge is
/// left uncovered (`F^-1(1) = 0` after the decrements).
pub fn verify_vertex_cover(
    n: usize,
    updates: &[StreamUpdate],
    cover: &VertexCoverCert,
    cfg: &SessionConfig,
) -> Result<Transcript, StreamError> {
    Graph::from_updates(n, updates)?;
    let mut tr = Transcript::new("vertex-cover", cfg.seed);
    let mut rng = session_rng(cfg.seed);
    let mut vec = DerivedVector::new(Universe::pairs(n, cfg.mode)?, &mut rng);
    for u in updates {
        vec.apply_tuple(&[u.i as u64, u.j as u64], u.delta as i64);
    }
    tr.note_space(vec.sketch.space_bits());
    if replay_canonical_check(cover.vertices.iter()).is_err()
        || cover.vertices.iter().any(|&v| v >= n)
    {
        tr.reject("cover", "cover list malformed");
        return Ok(tr);
    }
    for &v in &cover.vertices {
        tr.p2v("cover/vertex", 0, bits_for(n));
        cover_decrements(&mut vec, n, v);
    }
    let truth = vec.count_frequencies(&[1]);
    let out = run_finv(
        "cover/finv1",
        &vec,
        &FreqDomain::window(-2, 1),
        &[1],
        truth,
        ProverTactic::Honest,
        &mut tr,
    )
    .expect("window covers 1");
    if !out.accepted || !out.total.is_zero() {
        tr.reject("cover/finv1", "uncovered edge exists");
    } else {
        tr.accept(Value::Count(cover.vertices.len() as u64));
    }
    Ok(tr)
}

/// Full bipartite maximum-matching session: matching certificate, vertex
/// cover certificate, and the size equality between them.
pub fn mcm_bipartite(
    n: usize,
    updates: &[StreamUpdate],
    cfg: &SessionConfig,
) -> Result<Transcript, StreamError> {
    let graph = Graph::from_updates(n, updates)?;
    let Some((pairs, cover)) = konig_prover(&graph) else {
        return Err(StreamError::Invalid(
            "input graph is not bipartite".to_string(),
        ));
    };
    let cert = MatchingCert::from_pairs(&pairs);
    run_mcm_bipartite(n, updates, &graph, &cert, &cover, cfg)
}

pub(crate) fn run_mcm_bipartite(
    n: usize,
    updates: &[StreamUpdate],
    graph: &Graph,
    cert: &MatchingCert,
    cover: &[usize],
    cfg: &SessionConfig,
) -> Result<Transcript, StreamError> {
    let mut tr = Transcript::new("mcm-bipartite", cfg.seed);
    let mut rng = session_rng(cfg.seed);

    // adversarial cert mutations
    let mut cert = cert.clone();
    let mut cover: Vec<usize> = cover.to_vec();
    let mut m_tamper = MatchingTamper::honest(&cert);
    let mut lie_on_cover = false;
    match cfg.adversary {
        Some(AdversaryStrategy::FakeMatchingEdge) => {
            // swap one matching edge for a non-edge of the same endpoints'
            // neighborhood-free slot
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
        Some(AdversaryStrategy::SharedEndpoint) => {
            // claim two adjacent stream edges and sanitize the replay
            'search: for &(a, b, _) in &graph.edges {
                for &(c, d, _) in &graph.edges {
                    let shares = a == c || a == d || b == c || b == d;
                    if (a, b) != (c, d) && shares {
                        cert = MatchingCert::from_pairs(&[(a, b), (c, d)]);
                        let mut replay = cert.endpoints_sorted();
                        replay.dedup();
                        m_tamper = MatchingTamper {
                            lie_on_subset: false,
                            vertex_replay: replay,
                        };
                        break 'search;
                    }
                }
            }
        }
        Some(AdversaryStrategy::CoverMissingVertex) => {
            // swap one cover vertex for a vertex that covers nothing new
            if let Some(k) = cover.iter().position(|&v| {
                graph
                    .edges
                    .iter()
                    .any(|&(a, b, _)| (a == v || b == v) && !cover.contains(&(a + b - v)))
            }) {
                let replacement = (0..n).find(|v| !cover.contains(v)).unwrap_or(0);
                cover[k] = replacement;
                cover.sort_unstable();
                cover.dedup();
                lie_on_cover = true;
            }
        }
        _ => {}
    }

    let mut check = MatchingCheck::new(n, None, &mut rng);
    let mut cover_vec = DerivedVector::new(Universe::pairs(n, cfg.mode)?, &mut rng);
    for u in updates {
        check.absorb(u.i, u.j, 1, u.delta as i64);
        cover_vec.apply_tuple(&[u.i as u64, u.j as u64], u.delta as i64);
    }
    tr.note_space(check.space_bits() + cover_vec.sketch.space_bits() + 128);

    if let Err((stage, reason)) = check.verify("matching", &cert, &m_tamper, &mut tr) {
        tr.reject(&stage, &reason);
        return Ok(tr);
    }

    // cover stream
    if replay_canonical_check(cover.iter()).is_err() || cover.iter().any(|&v| v >= n) {
        tr.reject("cover", "cover list malformed");
        return Ok(tr);
    }
    for &v in &cover {
        tr.p2v("cover/vertex", 0, bits_for(n));
        cover_decrements(&mut cover_vec, n, v);
    }
    // |M| = |S| by stream-length counters
    if cover.len() as u64 != cert.size() {
        tr.reject("koenig", "matching and cover sizes differ");
        return Ok(tr);
    }
    let tactic = if lie_on_cover {
        ProverTactic::Lie
    } else {
        ProverTactic::Honest
    };
    let claimed = if lie_on_cover {
        0
    } else {
        cover_vec.count_frequencies(&[1])
    };
    let out = run_finv(
        "cover/finv1",
        &cover_vec,
        &FreqDomain::window(-2, 1),
        &[1],
        claimed,
        tactic,
        &mut tr,
    )
    .expect("window covers 1");
    if !out.accepted || !out.total.is_zero() {
        tr.reject("cover/finv1", "uncovered edge exists");
        return Ok(tr);
    }
    tr.accept(Value::Count(cert.size()));
    Ok(tr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gstream::gen_bipartite_graph;
    use crate::oracles::{oracle_mcm, oracle_min_vertex_cover};

    fn k33() -> Vec<StreamUpdate> {
        let mut v = Vec::new();
        for i in 0..3 {
            for j in 3..6 {
                v.push(StreamUpdate::new(i, j, None, 1).unwrap());
            }
        }
        v
    }

    #[test]
    fn perfect_matching_on_k33() {
        let tr = mcm_bipartite(6, &k33(), &SessionConfig::honest(1)).unwrap();
        assert_eq!(tr.verdict.accepted_count(), Some(3));
    }

    #[test]
    fn path_of_three_vertices() {
        let updates = vec![
            StreamUpdate::new(0, 1, None, 1).unwrap(),
            StreamUpdate::new(1, 2, None, 1).unwrap(),
        ];
        let tr = mcm_bipartite(3, &updates, &SessionConfig::honest(2)).unwrap();
        assert_eq!(tr.verdict.accepted_count(), Some(1));
    }

    #[test]
    fn empty_graph_accepts_zero() {
        let tr = mcm_bipartite(4, &[], &SessionConfig::honest(3)).unwrap();
        assert_eq!(tr.verdict.accepted_count(), Some(0));
    }

    #[test]
    fn matches_oracle_on_random_bipartite_graphs() {
        for seed in 0..50 {
            let n = 4 + (seed as usize % 17);
            let updates = gen_bipartite_graph(n, 0.4, 1, seed);
            let g = Graph::from_updates(n, &updates).unwrap();
            let want = oracle_mcm(&g).0;
            let tr = mcm_bipartite(n, &updates, &SessionConfig::honest(seed ^ 5)).unwrap();
            assert_eq!(tr.verdict.accepted_count(), Some(want), "seed {seed}");
        }
    }

    #[test]
    fn konig_cover_matches_minimum_cover_oracle() {
        for seed in 0..30 {
            let n = 4 + (seed as usize % 10);
            let updates = gen_bipartite_graph(n, 0.5, 1, seed);
            let g = Graph::from_updates(n, &updates).unwrap();
            let (m, cover) = konig_prover(&g).unwrap();
            assert_eq!(m.len() as u64, oracle_min_vertex_cover(&g), "seed {seed}");
            for &(a, b, _) in &g.edges {
                assert!(cover.contains(&a) || cover.contains(&b), "seed {seed}");
            }
        }
    }

    #[test]
    fn standalone_cert_checks() {
        let updates = k33();
        let good = MatchingCert::from_pairs(&[(0, 3), (1, 4), (2, 5)]);
        let tr = verify_matching_cert(6, &updates, &good, &SessionConfig::honest(7)).unwrap();
        assert!(tr.verdict.is_accept());

        // two edges sharing a vertex
        let shared = MatchingCert::from_pairs(&[(0, 3), (0, 4)]);
        let tr = verify_matching_cert(6, &updates, &shared, &SessionConfig::honest(8)).unwrap();
        assert!(!tr.verdict.is_accept());

        // edge not in the stream
        let phantom = MatchingCert::from_pairs(&[(0, 1)]);
        let tr = verify_matching_cert(6, &updates, &phantom, &SessionConfig::honest(9)).unwrap();
        assert!(!tr.verdict.is_accept());
    }

    #[test]
    fn vertex_cover_named_cases() {
        // star K_{1,4}: the center covers everything
        let star: Vec<StreamUpdate> = (1..5)
            .map(|i| StreamUpdate::new(0, i, None, 1).unwrap())
            .collect();
        let cov = VertexCoverCert { vertices: vec![0] };
        let tr = verify_vertex_cover(5, &star, &cov, &SessionConfig::honest(4)).unwrap();
        assert!(tr.verdict.is_accept());

        // path with 3 edges, one endpoint is not a cover
        let path: Vec<StreamUpdate> = (0..3)
            .map(|i| StreamUpdate::new(i, i + 1, None, 1).unwrap())
            .collect();
        let cov = VertexCoverCert { vertices: vec![0] };
        let tr = verify_vertex_cover(4, &path, &cov, &SessionConfig::honest(5)).unwrap();
        assert!(!tr.verdict.is_accept());

        // empty graph, empty cover
        let cov = VertexCoverCert { vertices: vec![] };
        let tr = verify_vertex_cover(4, &[], &cov, &SessionConfig::honest(6)).unwrap();
        assert!(tr.verdict.is_accept());
    }

    #[test]
    fn bipartite_adversaries_are_rejected() {
        let updates = k33();
        for strategy in [
            AdversaryStrategy::FakeMatchingEdge,
            AdversaryStrategy::SharedEndpoint,
            AdversaryStrategy::CoverMissingVertex,
        ] {
            let cfg = SessionConfig::adversarial(21, strategy);
            let tr = mcm_bipartite(6, &updates, &cfg).unwrap();
            assert!(!tr.verdict.is_accept(), "{strategy:?} was accepted");
        }
    }
}
