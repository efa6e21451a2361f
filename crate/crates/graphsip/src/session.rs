//! Prover/verifier orchestration: transcripts, message accounting, the
//! adversary catalogue, and soundness trials.
//!
//! One session is strictly sequential: the verifier ingests the input
//! stream, the prover sends certificates and sum-check messages, and the
//! verifier's pre-drawn randomness is only ever transmitted at the round
//! boundaries the protocol prescribes. All verifier randomness flows from a
//! single seeded generator, so identical seeds give byte-identical
//! transcripts.

use crate::gstream::CostMeter;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

pub type SessionRng = ChaCha20Rng;

pub fn session_rng(seed: u64) -> SessionRng {
    ChaCha20Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dir {
    P2V,
    V2P,
}

/// One protocol message, with payload size accounting. The payload itself
/// is not retained; verdicts and meters capture everything tests need,
/// and the message list preserves ordering for the alternation audit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MsgRecord {
    pub dir: Dir,
    pub kind: String,
    pub field_elems: u64,
    pub bits: u64,
}

/// Final session outcome. `Accept` carries the verified value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Verdict {
    Accept(Value),
    Reject { stage: String, reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Value {
    Count(u64),
    Bool(bool),
    Real(f64),
}

impl Value {
    pub fn as_count(&self) -> Option<u64> {
        match self {
            Value::Count(c) => Some(*c),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_real(&self) -> Option<f64> {
        match self {
            Value::Real(r) => Some(*r),
            _ => None,
        }
    }
}

impl Verdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, Verdict::Accept(_))
    }

    pub fn accepted_count(&self) -> Option<u64> {
        match self {
            Verdict::Accept(v) => v.as_count(),
            _ => None,
        }
    }
}

/// Ordered message log plus verdict and cost meter for one session.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Transcript {
    pub protocol: String,
    pub seed: u64,
    pub messages: Vec<MsgRecord>,
    pub verdict: Verdict,
    pub meter: CostMeter,
}

impl Transcript {
    pub fn new(protocol: &str, seed: u64) -> Transcript {
        Transcript {
            protocol: protocol.to_string(),
            seed,
            messages: Vec::new(),
            verdict: Verdict::Reject {
                stage: "setup".into(),
                reason: "session did not complete".into(),
            },
            meter: CostMeter::default(),
        }
    }

    pub fn p2v(&mut self, kind: &str, field_elems: u64, bits: u64) {
        self.meter.comm_bits_p2v += bits;
        self.messages.push(MsgRecord {
            dir: Dir::P2V,
            kind: kind.to_string(),
            field_elems,
            bits,
        });
    }

    pub fn v2p(&mut self, kind: &str, field_elems: u64, bits: u64) {
        self.meter.comm_bits_v2p += bits;
        self.messages.push(MsgRecord {
            dir: Dir::V2P,
            kind: kind.to_string(),
            field_elems,
            bits,
        });
    }

    pub fn round(&mut self) {
        self.meter.rounds += 1;
    }

    pub fn note_space(&mut self, bits: u64) {
        self.meter.note_space(bits);
    }

    pub fn reject(&mut self, stage: &str, reason: &str) {
        self.verdict = Verdict::Reject {
            stage: stage.to_string(),
            reason: reason.to_string(),
        };
    }

    pub fn accept(&mut self, value: Value) {
        self.verdict = Verdict::Accept(value);
    }

    /// Total field elements in prover-to-verifier messages whose kind
    /// starts with `prefix`.
    pub fn p2v_elems(&self, prefix: &str) -> u64 {
        self.messages
            .iter()
            .filter(|m| m.dir == Dir::P2V && m.kind.starts_with(prefix))
            .map(|m| m.field_elems)
            .sum()
    }

    pub fn count_messages(&self, dir: Dir, prefix: &str) -> u64 {
        self.messages
            .iter()
            .filter(|m| m.dir == dir && m.kind.starts_with(prefix))
            .count() as u64
    }

    /// Field elements across every sum-check round polynomial in the
    /// session, regardless of instance label.
    pub fn total_round_poly_elems(&self) -> u64 {
        self.messages
            .iter()
            .filter(|m| m.dir == Dir::P2V && m.kind.ends_with("/round-poly"))
            .map(|m| m.field_elems)
            .sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcript serializes")
    }

    /// Message-order audit: within every sum-check instance, polynomials
    /// and challenges must strictly alternate starting from the prover, and
    /// no challenge may be transmitted before the preceding prover round is
    /// complete.
    pub fn audit_message_order(&self) -> Result<(), String> {
        use std::collections::HashMap;
        let mut per_instance: HashMap<&str, (u64, u64)> = HashMap::new();
        for m in &self.messages {
            let Some(slash) = m.kind.rfind('/') else {
                continue;
            };
            let (instance, tail) = m.kind.split_at(slash);
            let entry = per_instance.entry(instance).or_insert((0, 0));
            match tail {
                "/round-poly" => {
                    if entry.0 != entry.1 {
                        return Err(format!(
                            "{instance}: prover round {} sent before challenge {}",
                            entry.0 + 1,
                            entry.1
                        ));
                    }
                    entry.0 += 1;
                }
                "/challenge" => {
                    if entry.1 + 1 != entry.0 {
                        return Err(format!(
                            "{instance}: challenge {} transmitted before prover round {}",
                            entry.1 + 1,
                            entry.0 + 1
                        ));
                    }
                    entry.1 += 1;
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// The fixed catalogue of cheating strategies. Each one targets a distinct
/// verifier check; `soundness_trial` measures how often the verifier
/// catches it over independent randomness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AdversaryStrategy {
    /// Claim a wrong final value and back it with consistently shifted
    /// round polynomials; caught at the final sketch comparison.
    WrongClaim,
    /// Add 1 to one coefficient of one round polynomial, playing honestly
    /// otherwise.
    PerturbRoundPoly { round: usize, coeff: usize },
    /// Matching certificate contains an edge absent from the stream.
    FakeMatchingEdge,
    /// Two matching edges share an endpoint.
    SharedEndpoint,
    /// Vertex cover certificate omits one cover vertex.
    CoverMissingVertex,
    /// Spanning-forest certificate with an extra edge closing a cycle.
    ForestCycle,
    /// The same vertex claimed by two trees.
    DuplicateVertex,
    /// Certificate splits one true component in two, hiding the crossing
    /// edge.
    HiddenCrossEdge,
    /// Two claws of the laminar family share a vertex.
    NonLaminarClaw,
    /// A non-deepest boundary set of odd cardinality.
    NonOddSet,
    /// Cumulative claw weights decrease with depth.
    WrongSigmaR,
    /// One element of a replayed certificate stream is altered after
    /// fingerprinting.
    FingerprintPerturb,
    /// TSP: the odd-set matching touches a vertex outside ODD.
    OddSetOutsider,
}

impl AdversaryStrategy {
    pub fn parse(s: &str) -> Option<AdversaryStrategy> {
        use AdversaryStrategy::*;
        Some(match s {
            "wrong-claim" => WrongClaim,
            "perturb-round-poly" => PerturbRoundPoly { round: 2, coeff: 1 },
            "fake-matching-edge" => FakeMatchingEdge,
            "shared-endpoint" => SharedEndpoint,
            "cover-missing-vertex" => CoverMissingVertex,
            "forest-cycle" => ForestCycle,
            "duplicate-vertex" => DuplicateVertex,
            "hidden-cross-edge" => HiddenCrossEdge,
            "non-laminar-claw" => NonLaminarClaw,
            "non-odd-set" => NonOddSet,
            "wrong-sigma-r" => WrongSigmaR,
            "fingerprint-perturb" => FingerprintPerturb,
            "odd-set-outsider" => OddSetOutsider,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        use AdversaryStrategy::*;
        match self {
            WrongClaim => "wrong-claim",
            PerturbRoundPoly { .. } => "perturb-round-poly",
            FakeMatchingEdge => "fake-matching-edge",
            SharedEndpoint => "shared-endpoint",
            CoverMissingVertex => "cover-missing-vertex",
            ForestCycle => "forest-cycle",
            DuplicateVertex => "duplicate-vertex",
            HiddenCrossEdge => "hidden-cross-edge",
            NonLaminarClaw => "non-laminar-claw",
            NonOddSet => "non-odd-set",
            WrongSigmaR => "wrong-sigma-r",
            FingerprintPerturb => "fingerprint-perturb",
            OddSetOutsider => "odd-set-outsider",
        }
    }
}

use crate::gstream::Mode;

/// Per-session configuration: verifier seed, sum-check layout, and an
/// optional adversary.
#[derive(Clone, Copy, Debug)]
pub struct SessionConfig {
    pub seed: u64,
    pub mode: Mode,
    pub adversary: Option<AdversaryStrategy>,
}

impl SessionConfig {
    pub fn honest(seed: u64) -> SessionConfig {
        SessionConfig {
            seed,
            mode: Mode::LogRound,
            adversary: None,
        }
    }

    pub fn with_mode(seed: u64, mode: Mode) -> SessionConfig {
        SessionConfig {
            seed,
            mode,
            adversary: None,
        }
    }

    pub fn adversarial(seed: u64, strategy: AdversaryStrategy) -> SessionConfig {
        SessionConfig {
            seed,
            mode: Mode::LogRound,
            adversary: Some(strategy),
        }
    }
}

/// Runs `trials` independent sessions, redrawing all verifier randomness
/// each time, and returns the fraction that ended in rejection.
pub fn soundness_trial(
    trials: u64,
    base_seed: u64,
    mut run: impl FnMut(u64) -> Transcript,
) -> f64 {
    assert!(trials >= 1);
    let mut rejected = 0u64;
    for t in 0..trials {
        let tr = run(base_seed.wrapping_add(t).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        if !tr.verdict.is_accept() {
            rejected += 1;
        }
    }
    rejected as f64 / trials as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transcript_accounting_and_json_round_trip() {
        let mut tr = Transcript::new("demo", 7);
        tr.p2v("finv/claim", 1, 61);
        tr.p2v("finv/round-poly", 4, 244);
        tr.round();
        tr.v2p("finv/challenge", 1, 61);
        tr.p2v("finv/round-poly", 4, 244);
        tr.round();
        tr.accept(Value::Count(3));
        assert_eq!(tr.meter.comm_bits_p2v, 549);
        assert_eq!(tr.meter.comm_bits_v2p, 61);
        assert_eq!(tr.meter.rounds, 2);
        assert_eq!(tr.p2v_elems("finv/round-poly"), 8);
        assert!(tr.audit_message_order().is_ok());
        let json = tr.to_json();
        let back: Transcript = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_json(), json);
    }

    #[test]
    fn audit_catches_early_challenge() {
        let mut tr = Transcript::new("demo", 7);
        tr.p2v("s/round-poly", 4, 244);
        tr.v2p("s/challenge", 1, 61);
        tr.v2p("s/challenge", 1, 61);
        assert!(tr.audit_message_order().is_err());
    }

    #[test]
    fn strategy_names_round_trip() {
        for name in [
            "wrong-claim",
            "perturb-round-poly",
            "fake-matching-edge",
            "shared-endpoint",
            "cover-missing-vertex",
            "forest-cycle",
            "duplicate-vertex",
            "hidden-cross-edge",
            "non-laminar-claw",
            "non-odd-set",
            "wrong-sigma-r",
            "fingerprint-perturb",
            "odd-set-outsider",
        ] {
            let s = AdversaryStrategy::parse(name).unwrap();
            assert_eq!(s.name(), name);
        }
        assert!(AdversaryStrategy::parse("nope").is_none());
    }
}
