//! The cost anatomy of the sum-check core: log-round mode spends
//! ceil(log2 u) rounds of tiny polynomials, constant-round mode spends
//! gamma rounds of polynomials with about u^(1/gamma) coefficients. Either
//! way the traffic is exactly d * (deg(h) * (ell - 1) + 1) field elements.
//!
//! ```text
//! cargo run --example sumcheck_costs
//! ```

use graphsip::gstream::{DerivedVector, Mode, Universe};
use graphsip::session::{session_rng, Transcript};
use graphsip::sumcheck::{run_finv, FreqDomain, ProverTactic};

fn main() {
    println!("{:>6} {:>12} {:>7} {:>7} {:>12} {:>12}", "u", "mode", "ell", "rounds", "poly elems", "v2p elems");
    for u in [64u64, 256, 1024, 4096] {
        for mode in [Mode::LogRound, Mode::ConstRound(2), Mode::ConstRound(3)] {
            let mut rng = session_rng(u);
            let universe = Universe::flat("demo", u, mode).unwrap();
            let mut vec = DerivedVector::new(universe, &mut rng);
            for i in 0..u {
                vec.apply_tuple(&[i], (i % 3) as i64);
            }
            let claimed = vec.count_frequencies(&[2]);
            let mut tr = Transcript::new("demo", 0);
            let out = run_finv(
                "sc",
                &vec,
                &FreqDomain::window(0, 2),
                &[2],
                claimed,
                ProverTactic::Honest,
                &mut tr,
            )
            .unwrap();
            assert!(out.accepted);
            let grid = &vec.universe.grid;
            println!(
                "{u:>6} {:>12} {:>7} {:>7} {:>12} {:>12}",
                format!("{mode:?}"),
                grid.ell,
                out.rounds,
                tr.p2v_elems("sc/round-poly"),
                tr.count_messages(graphsip::session::Dir::V2P, "sc/challenge"),
            );
        }
    }
}
