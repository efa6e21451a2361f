//! Approximate metric TSP verification: a near-minimum spanning tree plus
//! a minimum-weight perfect matching on its odd-degree vertices bounds the
//! optimal tour within a 3/2 + eps factor.
//!
//! The pipeline composes the earlier protocols. The tree is verified
//! structurally (spanning-forest battery with one tree), its weights are
//! pinned by a weighted subset check, and its near-optimality by the
//! component-count levels. A degree-annotated vertex replay extracts the
//! odd-degree set ODD as a fingerprint without storing it. The claimed
//! matching must touch exactly ODD, and its minimality is verified by
//! running the general-matching dual check on reflected weights
//! `W + 1 - w`, restricted to ODD by decrementing every slot incident to
//! the outside so that only ODD pairs can reach frequency 5.

use super::general::{DualCheck, DualTamper, DualUniverseParams, LaminarDualCert};
use super::{dual_search::find_duals, MatchingCert, MatchingCheck, MatchingTamper};
use crate::fingerprint::Fingerprint;
use crate::gstream::{bits_for, Graph, StreamError, StreamUpdate};
use crate::session::{
    session_rng, AdversaryStrategy, SessionConfig, Transcript, Value,
};
use crate::spanning::{
    check_forest, ForestCheck, ForestTamper, MaximalityKind, SpanningForestCert, TreeCert,
};

/// Exact MST as a rooted tree: Kruskal edge set, then a BFS orientation
/// from vertex 0.
fn mst_tree(graph: &Graph) -> Option<TreeCert> {
    let mut parent: Vec<usize> = (0..graph.n).collect();
    fn find(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    let mut edges = graph.edges.clone();
    edges.sort_unstable_by_key(|&(i, j, w)| (w, i, j));
    let mut tree_adj = vec![Vec::new(); graph.n];
    let mut picked = 0;
    for (i, j, _) in edges {
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        if ri != rj {
            parent[ri] = rj;
            tree_adj[i].push(j);
            tree_adj[j].push(i);
            picked += 1;
        }
    }
    if picked + 1 != graph.n {
        return None;
    }
    let mut seen = vec![false; graph.n];
    seen[0] = true;
    let mut queue = std::collections::VecDeque::from([0usize]);
    let mut tree_edges = Vec::new();
    while let Some(v) = queue.pop_front() {
        let mut nbrs = tree_adj[v].clone();
        nbrs.sort_unstable();
        for w in nbrs {
            if !seen[w] {
                seen[w] = true;
                tree_edges.push((v, w));
                queue.push_back(w);
            }
        }
    }
    Some(TreeCert {
        root: 0,
        edges: tree_edges,
    })
}

/// Minimum-weight perfect matching on a vertex subset, by subset DP.
fn min_perfect_matching(graph: &Graph, vertices: &[usize]) -> Option<Vec<(usize, usize)>> {
    let k = vertices.len();
    if k % 2 != 0 {
        return None;
    }
    if k == 0 {
        return Some(vec![]);
    }
    let full = 1usize << k;
    let inf = u64::MAX / 4;
    let mut dp = vec![inf; full];
    let mut choice = vec![(0usize, 0usize); full];
    dp[0] = 0;
    for mask in 0..full {
        if dp[mask] == inf {
            continue;
        }
        let a = (0..k).find(|&t| mask & (1 << t) == 0);
        let Some(a) = a else { continue };
        for b in (a + 1)..k {
            if mask & (1 << b) != 0 {
                continue;
            }
            let Some(w) = graph.weight(vertices[a], vertices[b]) else {
                continue;
            };
            let next = mask | (1 << a) | (1 << b);
            if dp[mask] + w < dp[next] {
                dp[next] = dp[mask] + w;
                choice[next] = (a, b);
            }
        }
    }
    if dp[full - 1] == inf {
        return None;
    }
    let mut mask = full - 1;
    let mut pairs = Vec::new();
    while mask != 0 {
        let (a, b) = choice[mask];
        pairs.push((vertices[a].min(vertices[b]), vertices[a].max(vertices[b])));
        mask &= !(1 << a);
        mask &= !(1 << b);
    }
    pairs.sort_unstable();
    Some(pairs)
}

/// Verified upper bound on the optimal metric tour: `w(T) + w(M)` for a
/// verified near-minimum spanning tree `T` and a verified minimum-weight
/// perfect matching `M` on its odd-degree vertices.
pub fn tsp_verify(
    n: usize,
    updates: &[StreamUpdate],
    epsilon: f64,
    cfg: &SessionConfig,
) -> Result<Transcript, StreamError> {
    let graph = Graph::from_updates(n, updates)?;
    if n < 3 {
        return Err(StreamError::Invalid("tour needs at least 3 vertices".into()));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if !graph.has_edge(i, j) {
                return Err(StreamError::Invalid("metric instance must be complete".into()));
            }
        }
    }
    let w_bound = graph.max_weight();
    let id_bits = bits_for(n);
    let w_bits = bits_for(w_bound as usize + 1);

    // --- honest prover data ---
    let tree = mst_tree(&graph).ok_or_else(|| StreamError::Invalid("disconnected".into()))?;
    let mut degree = vec![0usize; n];
    for &(a, b) in &tree.edges {
        degree[a] += 1;
        degree[b] += 1;
    }
    let odd: Vec<usize> = (0..n).filter(|&v| degree[v] % 2 == 1).collect();
    assert!(odd.len() % 2 == 0, "handshake parity");
    let matching_pairs = min_perfect_matching(&graph, &odd)
        .ok_or_else(|| StreamError::Invalid("no perfect matching on the odd set".into()))?;
    let mut m_cert = MatchingCert::from_weighted(&matching_pairs, &graph);

    // duals on the reflected weights, restricted to the odd set
    let reduced = Graph {
        n,
        edges: odd
            .iter()
            .enumerate()
            .flat_map(|(t, &a)| {
                odd[t + 1..].iter().map(move |&b| (a, b)).collect::<Vec<_>>()
            })
            .map(|(a, b)| (a, b, w_bound + 1 - graph.weight(a, b).unwrap()))
            .collect(),
    };
    let params = DualUniverseParams::for_graph(n, w_bound);
    let (_, reduced_pairs) = crate::oracles::oracle_mwm(&reduced);
    let duals = find_duals(
        &reduced,
        &reduced_pairs,
        params.claw_bound,
        params.depth_bound,
        params.w_bound,
    )
    .map(|(y, claws)| LaminarDualCert { y, claws })
    .ok_or_else(|| {
        StreamError::Invalid("no dual certificate within the declared claw bounds".into())
    })?;

    // --- adversary ---
    let mut m_tamper = MatchingTamper::honest(&m_cert);
    if cfg.adversary == Some(AdversaryStrategy::OddSetOutsider) {
        if let Some(outsider) = (0..n).find(|v| !odd.contains(v)) {
            let (a, b, _) = m_cert.edges[0];
            let other = if outsider == a { b } else { a };
            let (x, y) = (other.min(outsider), other.max(outsider));
            m_cert.edges[0] = (x, y, graph.weight(x, y).unwrap());
            m_cert.edges.sort_unstable();
            m_tamper = MatchingTamper::honest(&m_cert);
        }
    }

    // --- session ---
    let mut tr = Transcript::new("tsp", cfg.seed);
    let mut rng = session_rng(cfg.seed);
    let fp_vertex_base = Fingerprint::new(n as u64, &mut rng);

    // verifier state fed by the single input pass
    let mut tree_weight_check = MatchingCheck::new(n, Some(w_bound), &mut rng);
    let mut odd_matching = MatchingCheck::with_fp_base(
        n,
        Some(w_bound),
        fp_vertex_base.sibling(),
        &mut rng,
    );
    let mut dual = DualCheck::with_fp_base(params, fp_vertex_base.sibling(), &mut rng);
    for u in updates {
        let w = u.w.unwrap_or(1);
        tree_weight_check.absorb(u.i, u.j, w, u.delta as i64);
        odd_matching.absorb(u.i, u.j, w, u.delta as i64);
        dual.absorb_edge(u.i, u.j, w_bound + 1 - w, u.delta as i64);
    }
    tr.note_space(
        tree_weight_check.space_bits()
            + odd_matching.space_bits()
            + dual.space_bits()
            + 4 * fp_vertex_base.space_bits(),
    );

    // step 1: the spanning tree, structurally
    let forest = SpanningForestCert {
        trees: vec![tree.clone()],
    };
    let check = ForestCheck {
        label: "tree",
        n,
        stream: updates,
        cert: &forest,
        excluded: &[],
        mode: cfg.mode,
        maximality: MaximalityKind::Labeled { freq_hi: 1 },
        tamper: ForestTamper::default(),
    };
    if let Err((stage, reason)) = check_forest(&check, &mut rng, &mut tr) {
        tr.reject(&stage, &reason);
        return Ok(tr);
    }

    // ... and by weight: every tree edge with its claimed weight is a
    // stream edge, and a fingerprint ties endpoint multiplicities to the
    // degree annotations that follow
    let tree_weighted = MatchingCert {
        edges: {
            let mut e: Vec<(usize, usize, u64)> = tree
                .edges
                .iter()
                .map(|&(a, b)| {
                    let (a, b) = (a.min(b), a.max(b));
                    (a, b, graph.weight(a, b).unwrap())
                })
                .collect();
            e.sort_unstable();
            e
        },
    };
    let tree_weight: u64 = tree_weighted.weight();
    let mut fp_degrees = fp_vertex_base.sibling();
    let members: Vec<u64> = tree_weighted
        .edges
        .iter()
        .map(|&(a, b, w)| {
            fp_degrees.update(a as u64, 1).unwrap();
            fp_degrees.update(b as u64, 1).unwrap();
            tr.p2v("tree/cert/weighted-edge", 0, 2 * id_bits + w_bits);
            tree_weight_check
                .subset_vec
                .universe
                .grid
                .index_of(&[a as u64, b as u64, w])
        })
        .collect();
    {
        let mut sorted = members.clone();
        sorted.sort_unstable();
        let out = crate::sumcheck::subset_check(
            "tree/weights",
            &mut tree_weight_check.subset_vec,
            &sorted,
            crate::sumcheck::ProverTactic::Honest,
            &mut tr,
        )
        .map_err(|e| StreamError::Invalid(e.to_string()))?;
        if !out.accepted {
            tr.reject("tree/weights", "tree edge weight not in stream");
            return Ok(tr);
        }
    }

    // step 2: degree-annotated replay pins ODD
    let mut fp_annotated = fp_vertex_base.sibling();
    let mut fp_odd = fp_vertex_base.sibling();
    let mut odd_count = 0u64;
    for v in 0..n {
        tr.p2v("degrees/vertex", 0, id_bits + id_bits);
        fp_annotated.update(v as u64, degree[v] as i64).unwrap();
        if degree[v] % 2 == 1 {
            fp_odd.update(v as u64, 1).unwrap();
            odd_count += 1;
        }
    }
    if !fp_annotated.equals(&fp_degrees).unwrap() {
        tr.reject("degrees", "degree annotations disagree with the tree");
        return Ok(tr);
    }
    if odd_count % 2 != 0 {
        tr.reject("degrees", "odd-degree set has odd cardinality");
        return Ok(tr);
    }

    // step 3: the MST levels certify near-optimality of the tree weight
    let levels = crate::spanning::mst_levels(w_bound, epsilon);
    let mut cc_prev = n as f64;
    let mut mst_bound = 0.0f64;
    let labels: Vec<String> = (0..levels.len()).map(|i| format!("mst-lvl{i}")).collect();
    for (i, &threshold) in levels.iter().enumerate() {
        let stream_i: Vec<StreamUpdate> = updates
            .iter()
            .filter(|u| u.w.unwrap_or(1) as f64 <= threshold + 1e-9)
            .copied()
            .collect();
        let sub = Graph::from_updates(n, &stream_i)?;
        let level_cert = SpanningForestCert::build(&sub, &[]);
        let check = ForestCheck {
            label: &labels[i],
            n,
            stream: &stream_i,
            cert: &level_cert,
            excluded: &[],
            mode: cfg.mode,
            maximality: MaximalityKind::Labeled { freq_hi: 1 },
            tamper: ForestTamper::default(),
        };
        match check_forest(&check, &mut rng, &mut tr) {
            Ok(pass) => {
                let cc_i = pass.sizes.len() as f64;
                mst_bound += threshold * (cc_prev - cc_i);
                cc_prev = cc_i;
            }
            Err((stage, reason)) => {
                tr.reject(&stage, &reason);
                return Ok(tr);
            }
        }
    }
    if tree_weight as f64 > mst_bound + 1e-9 {
        tr.reject("mst", "claimed tree is heavier than the verified bound");
        return Ok(tr);
    }

    // steps 4-5: the odd-set matching is a matching over stream edges and
    // touches exactly ODD
    if let Err((stage, reason)) = odd_matching.verify("odd-matching", &m_cert, &m_tamper, &mut tr)
    {
        tr.reject(&stage, &reason);
        return Ok(tr);
    }
    if !odd_matching.fp_endpoints().equals(&fp_odd).unwrap() {
        tr.reject("odd-matching", "matched vertices do not comprise the odd set");
        return Ok(tr);
    }

    // steps 6-8: reflected-weight dual certificate, restricted to ODD
    let (y_sum, z_half) =
        match dual.process_certificate("dual", &duals, DualTamper::default(), &mut tr) {
            Ok(v) => v,
            Err((stage, reason)) => {
                tr.reject(&stage, &reason);
                return Ok(tr);
            }
        };
    // the prover replays ODD minus the claw participants, then all of
    // V - ODD; fingerprints confirm both partitions
    let participants = duals.participants_sorted();
    let mut fp_rest = fp_vertex_base.sibling();
    for &v in odd.iter().filter(|v| !participants.contains(v)) {
        tr.p2v("dual/odd-rest", 0, id_bits);
        fp_rest.update(v as u64, 1).unwrap();
    }
    if !fp_rest.merge(&dual.fp_claw_vertices).unwrap().equals(&fp_odd).unwrap() {
        tr.reject("dual", "dual certificate leaves the odd set");
        return Ok(tr);
    }
    let outside: Vec<usize> = (0..n).filter(|v| !odd.contains(v)).collect();
    let mut fp_outside = fp_vertex_base.sibling();
    for &v in &outside {
        tr.p2v("dual/outside", 0, id_bits);
        fp_outside.update(v as u64, 1).unwrap();
        dual.absorb_outside_decrement(v);
    }
    let mut fp_all = fp_vertex_base.sibling();
    for v in 0..n as u64 {
        fp_all.update(v, 1).unwrap();
    }
    if !fp_outside.merge(&fp_odd).unwrap().equals(&fp_all).unwrap() {
        tr.reject("dual", "claimed outside set does not complement the odd set");
        return Ok(tr);
    }

    // step 9: value equation on reflected weights
    let k = odd_count / 2;
    let reduced_weight = k * (w_bound + 1) - m_cert.weight();
    if y_sum + z_half != reduced_weight {
        tr.reject(
            "dual/value",
            &format!(
                "dual value {} does not meet the reflected matching weight {reduced_weight}",
                y_sum + z_half
            ),
        );
        return Ok(tr);
    }

    // step 10: every odd pair's constraint is satisfied
    let expected = odd_count * (odd_count - 1) / 2;
    if let Err((stage, reason)) = dual.finv5("dual", expected, -2, false, &mut tr) {
        tr.reject(&stage, &reason);
        return Ok(tr);
    }

    tr.accept(Value::Count(tree_weight + m_cert.weight()));
    Ok(tr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gstream::gen_metric_graph;
    use crate::oracles::oracle_tsp;

    #[test]
    fn collinear_points() {
        // 4 points on a line: optimal tour is twice the span
        let updates = gen_metric_graph(4, 12, 3);
        let g = Graph::from_updates(4, &updates).unwrap();
        let opt = oracle_tsp(&g);
        let tr = tsp_verify(4, &updates, 0.1, &SessionConfig::honest(1)).unwrap();
        let bound = tr.verdict.accepted_count().expect("accepts");
        assert!(opt <= bound && bound as f64 <= 1.6 * opt as f64);
    }

    #[test]
    fn random_metric_instances_stay_within_christofides() {
        let mut checked = 0;
        for seed in 0..10 {
            let n = 4 + (seed as usize % 4);
            let updates = gen_metric_graph(n, 3 * n as u64, seed + 50);
            let g = Graph::from_updates(n, &updates).unwrap();
            if g.max_weight() > 12 {
                continue;
            }
            let opt = oracle_tsp(&g);
            let tr = tsp_verify(n, &updates, 0.1, &SessionConfig::honest(seed)).unwrap();
            let bound = tr.verdict.accepted_count().unwrap_or_else(|| {
                panic!("seed {seed}: {:?}", tr.verdict)
            });
            assert!(
                opt <= bound && bound as f64 <= 1.6 * opt as f64 + 1e-9,
                "seed {seed}: opt {opt} bound {bound}"
            );
            checked += 1;
        }
        assert!(checked >= 3);
    }

    #[test]
    fn outsider_in_odd_matching_is_rejected() {
        let updates = gen_metric_graph(6, 18, 7);
        let cfg = SessionConfig::adversarial(9, AdversaryStrategy::OddSetOutsider);
        let tr = tsp_verify(6, &updates, 0.1, &cfg).unwrap();
        // the tamper only applies when some vertex is outside ODD
        let g = Graph::from_updates(6, &updates).unwrap();
        let tree = super::mst_tree(&g).unwrap();
        let mut deg = [0usize; 6];
        for &(a, b) in &tree.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        if deg.iter().any(|d| d % 2 == 0) {
            assert!(!tr.verdict.is_accept());
        }
    }
}
