//! Exact maximum weight matching in a bipartite graph via flattened LP
//! duality: a satisfied dual constraint is a frequency-3 slot in a
//! universe indexed by (edge, weight, dual, dual), and optimality is one
//! inverse-frequency query.
//!
//! ```text
//! cargo run --example weighted_bipartite_matching
//! ```

use graphsip::gstream::{gen_bipartite_graph, Graph};
use graphsip::matching::mwm_bipartite;
use graphsip::oracles::oracle_mwm;
use graphsip::session::SessionConfig;

fn main() {
    let (n, w_bound, seed) = (8, 6, 11);
    let updates = gen_bipartite_graph(n, 0.6, w_bound, seed);
    let graph = Graph::from_updates(n, &updates).unwrap();
    println!(
        "weighted bipartite graph: n = {n}, {} edges, weights in 1..={w_bound}",
        graph.edges.len()
    );

    let tr = mwm_bipartite(n, &updates, w_bound, &SessionConfig::honest(seed)).unwrap();
    let (oracle_weight, oracle_matching) = oracle_mwm(&graph);
    println!("verdict: {:?}", tr.verdict);
    println!("oracle:  weight {oracle_weight} via {oracle_matching:?}");
    println!(
        "rounds = {}, prover->verifier = {} bits, verifier space = {} bits",
        tr.meter.rounds, tr.meter.comm_bits_p2v, tr.meter.verifier_space_bits
    );
}
