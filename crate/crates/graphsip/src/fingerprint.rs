//! Reed-Solomon multiset-equality fingerprints.
//!
//! A fingerprint is the evaluation of the frequency polynomial
//! `sum_i a_i * alpha^i` at a random `alpha` held by the verifier. Equal
//! multisets always produce equal fingerprints; unequal ones collide with
//! probability at most `max_index / p` over the choice of `alpha`. The
//! accumulator is linear in the frequency vector, so fingerprints of
//! disjoint streams merge by field addition.

use crate::field::{FieldElem, WORD_BITS};
use rand::RngCore;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FingerprintError {
    #[error("item {item} out of bounds (universe {max_index})")]
    ItemOutOfBounds { item: u64, max_index: u64 },
    #[error("fingerprints disagree on alpha or universe bound")]
    MismatchedBasis,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fingerprint {
    alpha: FieldElem,
    acc: FieldElem,
    max_index: u64,
}

impl Fingerprint {
    /// Draws a fresh evaluation point from the verifier's RNG. The point is
    /// session-internal and is never transmitted.
    pub fn new(max_index: u64, rng: &mut impl RngCore) -> Fingerprint {
        Fingerprint {
            alpha: FieldElem::random(rng),
            acc: FieldElem::ZERO,
            max_index,
        }
    }

    /// An empty fingerprint sharing this one's evaluation point, for
    /// accumulating a second stream that will later be compared or merged.
    pub fn sibling(&self) -> Fingerprint {
        Fingerprint {
            alpha: self.alpha,
            acc: FieldElem::ZERO,
            max_index: self.max_index,
        }
    }

    pub fn update(&mut self, item: u64, delta: i64) -> Result<(), FingerprintError> {
        if item >= self.max_index {
            return Err(FingerprintError::ItemOutOfBounds {
                item,
                max_index: self.max_index,
            });
        }
        self.acc += FieldElem::from_i64(delta) * self.alpha.pow(item);
        Ok(())
    }

    /// True iff the accumulators agree. Sound only when both sides were
    /// built over the same `alpha`.
    pub fn equals(&self, other: &Fingerprint) -> Result<bool, FingerprintError> {
        if self.alpha != other.alpha || self.max_index != other.max_index {
            return Err(FingerprintError::MismatchedBasis);
        }
        Ok(self.acc == other.acc)
    }

    /// Fingerprint of the union: accumulators add because the underlying
    /// frequency vectors add.
    pub fn merge(&self, other: &Fingerprint) -> Result<Fingerprint, FingerprintError> {
        if self.alpha != other.alpha || self.max_index != other.max_index {
            return Err(FingerprintError::MismatchedBasis);
        }
        Ok(Fingerprint {
            alpha: self.alpha,
            acc: self.acc + other.acc,
            max_index: self.max_index,
        })
    }

    pub fn accumulator(&self) -> FieldElem {
        self.acc
    }

    /// alpha, accumulator, and the universe bound.
    pub fn space_bits(&self) -> u64 {
        2 * WORD_BITS + 64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn insert_then_delete_returns_to_empty() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let mut f = Fingerprint::new(100, &mut rng);
        let empty = f.sibling();
        f.update(7, 1).unwrap();
        f.update(7, -1).unwrap();
        assert!(f.equals(&empty).unwrap());
        assert!(f.update(100, 1).is_err());
    }

    #[test]
    fn permuted_streams_agree() {
        let mut rng = ChaCha20Rng::seed_from_u64(12);
        for _ in 0..100 {
            let mut items: Vec<u64> = (0..20).map(|_| rng.next_u64() % 50).collect();
            let base = Fingerprint::new(50, &mut rng);
            let mut a = base.sibling();
            for &i in &items {
                a.update(i, 1).unwrap();
            }
            items.reverse();
            items.rotate_left(3);
            let mut b = base.sibling();
            for &i in &items {
                b.update(i, 1).unwrap();
            }
            assert!(a.equals(&b).unwrap());
        }
    }

    #[test]
    fn accumulator_matches_dense_polynomial_evaluation() {
        let mut rng = ChaCha20Rng::seed_from_u64(13);
        let u = 1000u64;
        let mut dense = vec![0i64; u as usize];
        let mut f = Fingerprint::new(u, &mut rng);
        for _ in 0..500 {
            let i = rng.next_u64() % u;
            let d = (rng.next_u64() % 5) as i64 - 2;
            dense[i as usize] += d;
            f.update(i, d).unwrap();
        }
        let mut expect = FieldElem::ZERO;
        for (i, &c) in dense.iter().enumerate() {
            expect += FieldElem::from_i64(c) * f.alpha.pow(i as u64);
        }
        assert_eq!(f.accumulator(), expect);
    }

    #[test]
    fn completeness_over_random_streams() {
        let mut rng = ChaCha20Rng::seed_from_u64(14);
        for _ in 0..10_000 {
            let base = Fingerprint::new(64, &mut rng);
            let mut a = base.sibling();
            let mut b = base.sibling();
            for _ in 0..8 {
                let i = rng.next_u64() % 64;
                a.update(i, 1).unwrap();
                b.update(i, 1).unwrap();
            }
            assert!(a.equals(&b).unwrap());
        }
    }

    #[test]
    fn soundness_on_single_coordinate_difference() {
        let mut rng = ChaCha20Rng::seed_from_u64(15);
        let mut collisions = 0;
        for _ in 0..1000 {
            let base = Fingerprint::new(1000, &mut rng);
            let mut a = base.sibling();
            let mut b = base.sibling();
            let coord = rng.next_u64() % 1000;
            a.update(coord, 1).unwrap();
            if a.equals(&b).unwrap() {
                collisions += 1;
            }
            b.update((coord + 1) % 1000, 1).unwrap();
        }
        assert_eq!(collisions, 0, "collision probability is ~2^-50 per trial");
    }

    #[test]
    fn merge_is_stream_concatenation() {
        let mut rng = ChaCha20Rng::seed_from_u64(16);
        let base = Fingerprint::new(200, &mut rng);
        let (mut a, mut b, mut whole) = (base.sibling(), base.sibling(), base.sibling());
        for i in [3u64, 19, 3, 44] {
            a.update(i, 1).unwrap();
            whole.update(i, 1).unwrap();
        }
        for i in [100u64, 19] {
            b.update(i, 1).unwrap();
            whole.update(i, 1).unwrap();
        }
        assert!(a.merge(&b).unwrap().equals(&whole).unwrap());
        assert!(a.merge(&base.sibling()).unwrap().equals(&a).unwrap());
        let other = Fingerprint::new(200, &mut rng);
        assert!(a.merge(&other).is_err());
        assert!(a.equals(&other).is_err());
    }
}
