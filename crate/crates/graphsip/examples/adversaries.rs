//! The adversary catalogue: each strategy targets one verifier check, and
//! each is caught in essentially every trial over fresh verifier
//! randomness.
//!
//! ```text
//! cargo run --example adversaries
//! ```

use graphsip::basic_protocols::count_triangles;
use graphsip::gstream::{gen_bipartite_graph, StreamUpdate};
use graphsip::matching::{mcm_bipartite, mwm_general};
use graphsip::session::{soundness_trial, AdversaryStrategy, SessionConfig};
use graphsip::spanning::count_components;

fn main() {
    let trials = 200;
    println!("{trials} trials per strategy, independent verifier randomness each time\n");

    let k5: Vec<StreamUpdate> = (0..5)
        .flat_map(|i| ((i + 1)..5).map(move |j| StreamUpdate::new(i, j, None, 1).unwrap()))
        .collect();
    for strategy in [
        AdversaryStrategy::WrongClaim,
        AdversaryStrategy::PerturbRoundPoly { round: 2, coeff: 1 },
    ] {
        let rate = soundness_trial(trials, 1, |seed| {
            count_triangles(5, &k5, &SessionConfig::adversarial(seed, strategy)).unwrap()
        });
        println!("triangles + {:<22} rejected {:.1}%", strategy.name(), rate * 100.0);
    }

    let k33 = gen_bipartite_graph(6, 1.1, 1, 0);
    for strategy in [
        AdversaryStrategy::FakeMatchingEdge,
        AdversaryStrategy::SharedEndpoint,
        AdversaryStrategy::CoverMissingVertex,
    ] {
        let rate = soundness_trial(trials, 2, |seed| {
            mcm_bipartite(6, &k33, &SessionConfig::adversarial(seed, strategy)).unwrap()
        });
        println!("matching  + {:<22} rejected {:.1}%", strategy.name(), rate * 100.0);
    }

    let mut two_comp: Vec<StreamUpdate> = (0..5)
        .map(|i| StreamUpdate::new(i, (i + 1) % 5, None, 1).unwrap())
        .collect();
    two_comp.push(StreamUpdate::new(5, 6, None, 1).unwrap());
    two_comp.push(StreamUpdate::new(6, 7, None, 1).unwrap());
    for strategy in [
        AdversaryStrategy::ForestCycle,
        AdversaryStrategy::DuplicateVertex,
        AdversaryStrategy::HiddenCrossEdge,
        AdversaryStrategy::FingerprintPerturb,
    ] {
        let rate = soundness_trial(trials, 3, |seed| {
            count_components(8, &two_comp, &SessionConfig::adversarial(seed, strategy)).unwrap()
        });
        println!("forest    + {:<22} rejected {:.1}%", strategy.name(), rate * 100.0);
    }

    let tri: Vec<StreamUpdate> = [(0, 1), (0, 2), (1, 2)]
        .iter()
        .map(|&(a, b)| StreamUpdate::new(a, b, Some(1), 1).unwrap())
        .collect();
    for strategy in [
        AdversaryStrategy::NonLaminarClaw,
        AdversaryStrategy::NonOddSet,
        AdversaryStrategy::WrongSigmaR,
    ] {
        let rate = soundness_trial(trials, 4, |seed| {
            mwm_general(4, &tri, 1, &SessionConfig::adversarial(seed, strategy)).unwrap()
        });
        println!("duals     + {:<22} rejected {:.1}%", strategy.name(), rate * 100.0);
    }
}
