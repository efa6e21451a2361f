//! Triangle counting and disjointness: the two warm-up protocols.

use crate::field::FieldElem;
use crate::gstream::{
    triangle_patterns, DerivedVector, Mode, StreamError, StreamUpdate, Universe,
};
use crate::session::{
    session_rng, AdversaryStrategy, SessionConfig, Transcript, Value,
};
use crate::sumcheck::{run_finv, FreqDomain, ProverTactic};

fn tactic_for(adversary: Option<AdversaryStrategy>) -> (ProverTactic, u64) {
    // (tactic, claim offset)
    match adversary {
        Some(AdversaryStrategy::WrongClaim) => (ProverTactic::Lie, 1),
        Some(AdversaryStrategy::PerturbRoundPoly { round, coeff }) => {
            (ProverTactic::Perturb { round, coeff }, 0)
        }
        _ => (ProverTactic::Honest, 0),
    }
}

/// Verified triangle count. The verifier sketches the ordered-triple
/// universe; each edge update touches the three slices of triples
/// containing it, and the count is the number of entries with final
/// frequency 3.
pub fn count_triangles(
    n: usize,
    updates: &[StreamUpdate],
    cfg: &SessionConfig,
) -> Result<Transcript, StreamError> {
    // validates multiplicities before any message flows
    let graph = crate::gstream::Graph::from_updates(n, updates)?;
    let mode = match cfg.mode {
        Mode::LogRound => Mode::LogRound,
        Mode::ConstRound(g) => Mode::ConstRound(g.max(3)),
    };
    let universe = Universe::triangles(n, mode)?;
    let mut tr = Transcript::new("triangles", cfg.seed);
    let mut rng = session_rng(cfg.seed);
    let mut vec = DerivedVector::new(universe, &mut rng);
    for u in updates {
        for p in triangle_patterns(n, u.i, u.j) {
            vec.apply(&p, u.delta as i64);
        }
    }
    tr.note_space(vec.sketch.space_bits());
    let _ = graph;

    let truth = vec.count_frequencies(&[3]);
    let (tactic, offset) = tactic_for(cfg.adversary);
    let claimed = truth + offset;
    let out = run_finv(
        "finv3",
        &vec,
        &FreqDomain::window(0, 3),
        &[3],
        claimed,
        tactic,
        &mut tr,
    )
    .expect("window covers target");
    if out.accepted {
        tr.accept(Value::Count(out.total.value()));
    } else {
        tr.reject(
            &format!("finv3 round {}", out.rounds),
            out.reason.as_deref().unwrap_or("sum-check rejected"),
        );
    }
    Ok(tr)
}

/// Verified disjointness of two bit vectors: stream both sides as +1
/// updates over `[n]` and check that no index reaches frequency 2.
pub fn disjointness(
    n: usize,
    xs: &[usize],
    ys: &[usize],
    cfg: &SessionConfig,
) -> Result<Transcript, StreamError> {
    for &v in xs.iter().chain(ys.iter()) {
        if v >= n {
            return Err(StreamError::VertexOutOfRange { id: v, n });
        }
    }
    let universe = Universe::flat("bits", n as u64, cfg.mode)?;
    let mut tr = Transcript::new("disjointness", cfg.seed);
    let mut rng = session_rng(cfg.seed);
    let mut vec = DerivedVector::new(universe, &mut rng);
    for &x in xs {
        vec.apply_tuple(&[x as u64], 1);
    }
    for &y in ys {
        vec.apply_tuple(&[y as u64], 1);
    }
    tr.note_space(vec.sketch.space_bits());

    let truth = vec.count_frequencies(&[2]);
    let (tactic, offset) = tactic_for(cfg.adversary);
    let claimed = truth + offset;
    let out = run_finv(
        "finv2",
        &vec,
        &FreqDomain::window(0, 2),
        &[2],
        claimed,
        tactic,
        &mut tr,
    )
    .expect("window covers target");
    if out.accepted {
        tr.accept(Value::Bool(out.total.is_zero()));
    } else {
        tr.reject(
            "finv2",
            out.reason.as_deref().unwrap_or("sum-check rejected"),
        );
    }
    let _ = FieldElem::ZERO;
    Ok(tr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gstream::{gen_disj_pair, gen_random_graph, Graph};
    use crate::oracles::{oracle_disjoint, oracle_triangles};
    use crate::session::SessionConfig;

    fn k_n(n: usize) -> Vec<StreamUpdate> {
        let mut updates = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                updates.push(StreamUpdate::new(i, j, None, 1).unwrap());
            }
        }
        updates
    }

    #[test]
    fn complete_graphs() {
        let tr = count_triangles(3, &k_n(3), &SessionConfig::honest(1)).unwrap();
        assert_eq!(tr.verdict.accepted_count(), Some(1));
        let tr = count_triangles(4, &k_n(4), &SessionConfig::honest(2)).unwrap();
        assert_eq!(tr.verdict.accepted_count(), Some(4));
        let tr = count_triangles(5, &[], &SessionConfig::honest(3)).unwrap();
        assert_eq!(tr.verdict.accepted_count(), Some(0));
    }

    #[test]
    fn triangles_match_oracle_in_both_modes() {
        for seed in 0..30 {
            let n = 5 + (seed as usize % 8);
            let updates = gen_random_graph(n, 0.5, 1, seed);
            let g = Graph::from_updates(n, &updates).unwrap();
            let want = oracle_triangles(&g);
            for mode in [Mode::LogRound, Mode::ConstRound(3)] {
                let cfg = SessionConfig::with_mode(seed, mode);
                let tr = count_triangles(n, &updates, &cfg).unwrap();
                assert_eq!(tr.verdict.accepted_count(), Some(want), "seed {seed}");
                assert!(tr.audit_message_order().is_ok());
            }
        }
    }

    #[test]
    fn triangle_adversaries_are_rejected() {
        let updates = k_n(6);
        for strategy in [
            AdversaryStrategy::WrongClaim,
            AdversaryStrategy::PerturbRoundPoly { round: 2, coeff: 1 },
        ] {
            let cfg = SessionConfig::adversarial(11, strategy);
            let tr = count_triangles(6, &updates, &cfg).unwrap();
            assert!(!tr.verdict.is_accept(), "{strategy:?}");
        }
    }

    #[test]
    fn disjointness_named_cases() {
        let cfg = SessionConfig::honest(5);
        let tr = disjointness(4, &[0, 2], &[1, 3], &cfg).unwrap();
        assert_eq!(
            tr.verdict,
            crate::session::Verdict::Accept(Value::Bool(true))
        );
        let tr = disjointness(4, &[0], &[0], &cfg).unwrap();
        assert_eq!(
            tr.verdict,
            crate::session::Verdict::Accept(Value::Bool(false))
        );
    }

    #[test]
    fn disjointness_matches_oracle() {
        for seed in 0..200 {
            let n = 8 + (seed as usize % 57);
            let (xs, ys) = gen_disj_pair(n, seed);
            let cfg = SessionConfig::honest(seed ^ 0xabc);
            let tr = disjointness(n, &xs, &ys, &cfg).unwrap();
            let want = oracle_disjoint(&xs, &ys);
            assert_eq!(
                tr.verdict,
                crate::session::Verdict::Accept(Value::Bool(want)),
                "seed {seed}"
            );
        }
    }
}
