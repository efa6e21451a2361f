//! Perfect completeness: honest sessions accept on every instance of a
//! large seeded corpus, and the transcript audit confirms the verifier's
//! randomness never travels ahead of the prover's rounds.

use graphsip::basic_protocols::{count_triangles, disjointness};
use graphsip::gstream::{gen_bipartite_graph, gen_disj_pair, gen_random_graph};
use graphsip::matching::mcm_bipartite;
use graphsip::session::SessionConfig;
use graphsip::spanning::count_components;

#[test]
fn honest_sessions_always_accept() {
    for seed in 0..500u64 {
        let n = 4 + (seed as usize % 9);
        let updates = gen_random_graph(n, 0.4, 1, seed);
        let tr = count_triangles(n, &updates, &SessionConfig::honest(seed)).unwrap();
        assert!(tr.verdict.is_accept(), "triangles seed {seed}");
        tr.audit_message_order().unwrap();

        let (xs, ys) = gen_disj_pair(16 + (seed as usize % 33), seed);
        let tr = disjointness(16 + (seed as usize % 33), &xs, &ys, &SessionConfig::honest(seed))
            .unwrap();
        assert!(tr.verdict.is_accept(), "disj seed {seed}");
        tr.audit_message_order().unwrap();

        let sparse = gen_random_graph(n, 0.2, 1, seed ^ 0xc0);
        let tr = count_components(n, &sparse, &SessionConfig::honest(seed)).unwrap();
        assert!(tr.verdict.is_accept(), "components seed {seed}");
        tr.audit_message_order().unwrap();

        let bip = gen_bipartite_graph(n, 0.4, 1, seed ^ 0xb1);
        let tr = mcm_bipartite(n, &bip, &SessionConfig::honest(seed)).unwrap();
        assert!(tr.verdict.is_accept(), "mcm seed {seed}");
        tr.audit_message_order().unwrap();
    }
}
