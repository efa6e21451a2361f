//! Verified 3/2 + eps approximation of the metric TSP: near-minimum
//! spanning tree plus minimum-weight perfect matching on its odd-degree
//! vertices, with the matching verified on reflected weights restricted
//! to the odd set.
//!
//! ```text
//! cargo run --example metric_tsp
//! ```

use graphsip::gstream::{gen_metric_band, Graph};
use graphsip::matching::tsp_verify;
use graphsip::oracles::oracle_tsp;
use graphsip::session::SessionConfig;

fn main() {
    let eps = 0.1;
    for seed in 0..4u64 {
        let n = 5 + (seed as usize % 3);
        let updates = gen_metric_band(n, 6, seed);
        let graph = Graph::from_updates(n, &updates).unwrap();
        let opt = oracle_tsp(&graph);
        let tr = tsp_verify(n, &updates, eps, &SessionConfig::honest(seed)).unwrap();
        match tr.verdict.accepted_count() {
            Some(bound) => println!(
                "n = {n}: verified tour bound {bound}, exact optimum {opt}, \
                 ratio {:.3} (guarantee {:.1})",
                bound as f64 / opt as f64,
                1.5 + eps
            ),
            None => println!("n = {n}: {:?}", tr.verdict),
        }
    }
}
