//! Exact maximum cardinality matching in a bipartite graph: the prover
//! sends a matching and a vertex cover of the same size; the verifier
//! checks the matching is real (subset + endpoint fingerprints) and the
//! cover leaves no edge at frequency 1.
//!
//! ```text
//! cargo run --example bipartite_matching
//! ```

use graphsip::gstream::{gen_bipartite_graph, Graph};
use graphsip::matching::mcm_bipartite;
use graphsip::oracles::oracle_mcm;
use graphsip::session::{AdversaryStrategy, SessionConfig};

fn main() {
    let (n, seed) = (12, 5);
    let updates = gen_bipartite_graph(n, 0.45, 1, seed);
    let graph = Graph::from_updates(n, &updates).unwrap();
    println!("bipartite graph: n = {n}, {} edges", graph.edges.len());

    let tr = mcm_bipartite(n, &updates, &SessionConfig::honest(seed)).unwrap();
    println!(
        "honest session: {:?} (oracle: {}), total communication = {} bits",
        tr.verdict,
        oracle_mcm(&graph).0,
        tr.meter.comm_bits_p2v + tr.meter.comm_bits_v2p
    );

    // a prover whose cover quietly swaps a vertex is caught by the
    // frequency-1 query
    let cfg = SessionConfig::adversarial(seed, AdversaryStrategy::CoverMissingVertex);
    let tr = mcm_bipartite(n, &updates, &cfg).unwrap();
    println!("tampered cover:  {:?}", tr.verdict);
}
