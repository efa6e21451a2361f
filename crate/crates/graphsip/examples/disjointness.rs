//! Set disjointness as a streaming interactive proof: both bit vectors
//! stream into one frequency sketch and the verifier checks that no index
//! reaches frequency 2.
//!
//! ```text
//! cargo run --example disjointness
//! ```

use graphsip::basic_protocols::disjointness;
use graphsip::gstream::gen_disj_pair;
use graphsip::oracles::oracle_disjoint;
use graphsip::session::SessionConfig;

fn main() {
    let n = 12;
    for seed in 0..4 {
        let (xs, ys) = gen_disj_pair(n, seed);
        let tr = disjointness(n, &xs, &ys, &SessionConfig::honest(seed)).unwrap();
        println!(
            "seed {seed}: |x| = {:2}, |y| = {:2} -> verdict {:?} (oracle says disjoint = {})",
            xs.len(),
            ys.len(),
            tr.verdict,
            oracle_disjoint(&xs, &ys)
        );
    }
}
