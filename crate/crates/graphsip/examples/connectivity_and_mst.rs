//! Connected components, approximate MST weight, and bipartiteness, all
//! through spanning-forest certificates.
//!
//! ```text
//! cargo run --example connectivity_and_mst
//! ```

use graphsip::gstream::{gen_random_graph, Graph, StreamUpdate};
use graphsip::oracles::{oracle_bipartite, oracle_components, oracle_mst};
use graphsip::session::{SessionConfig, Value, Verdict};
use graphsip::spanning::{bipartiteness, count_components, mst_approx, mst_levels};

fn main() {
    let (n, seed) = (14, 2);
    let sparse = gen_random_graph(n, 0.12, 1, seed);
    let graph = Graph::from_updates(n, &sparse).unwrap();
    let tr = count_components(n, &sparse, &SessionConfig::honest(seed)).unwrap();
    println!(
        "components: {:?} (union-find says {})",
        tr.verdict,
        oracle_components(&graph).len()
    );

    let weighted = gen_random_graph(n, 0.6, 9, seed + 1);
    let wgraph = Graph::from_updates(n, &weighted).unwrap();
    let eps = 0.1;
    let tr = mst_approx(n, &weighted, eps, &SessionConfig::honest(seed)).unwrap();
    match (&tr.verdict, oracle_mst(&wgraph)) {
        (Verdict::Accept(Value::Real(bound)), Some(opt)) => println!(
            "mst: verified bound {bound:.3} vs exact {opt} \
             ({} component protocols, one per weight level)",
            mst_levels(wgraph.max_weight(), eps).len()
        ),
        (other, opt) => println!("mst: {other:?} (oracle: {opt:?})"),
    }

    // an odd cycle's double cover is connected, so it fails the test
    let c5: Vec<StreamUpdate> = (0..5)
        .map(|i| StreamUpdate::new(i, (i + 1) % 5, None, 1).unwrap())
        .collect();
    let tr = bipartiteness(5, &c5, &SessionConfig::honest(seed)).unwrap();
    println!(
        "bipartiteness of C5: {:?} (2-coloring says {})",
        tr.verdict,
        oracle_bipartite(&Graph::from_updates(5, &c5).unwrap())
    );
}
