//! Verified triangle counting over a dynamic edge stream.
//!
//! ```text
//! cargo run --example triangles
//! ```

use graphsip::basic_protocols::count_triangles;
use graphsip::gstream::{gen_random_graph, Graph, Mode};
use graphsip::oracles::oracle_triangles;
use graphsip::session::SessionConfig;

fn main() {
    let (n, p, seed) = (10, 0.5, 7);
    let updates = gen_random_graph(n, p, 1, seed);
    let graph = Graph::from_updates(n, &updates).unwrap();
    println!(
        "random graph: n = {n}, {} edges, {} stream tokens",
        graph.edges.len(),
        updates.len()
    );

    for mode in [Mode::ConstRound(3), Mode::LogRound] {
        let cfg = SessionConfig::with_mode(seed, mode);
        let tr = count_triangles(n, &updates, &cfg).unwrap();
        println!(
            "{mode:?}: verdict = {:?}, rounds = {}, prover->verifier = {} bits, \
             verifier space = {} bits",
            tr.verdict, tr.meter.rounds, tr.meter.comm_bits_p2v, tr.meter.verifier_space_bits
        );
    }
    println!("brute-force count = {}", oracle_triangles(&graph));
}
