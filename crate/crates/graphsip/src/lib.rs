#![allow(clippy::type_complexity)]
#![allow(clippy::needless_range_loop)]
#![allow(clippy::manual_is_multiple_of)]

//! Streaming interactive proofs for graph problems.
//!
//! A space-bounded verifier reads a dynamic stream of edge updates while an
//! untrusted prover holds the full input. After the stream, the two parties
//! exchange messages: the prover supplies certificates (matchings, vertex
//! covers, dual solutions, spanning forests) and answers sum-check queries;
//! the verifier holds only algebraic sketches of derived frequency vectors
//! and accepts or rejects. Honest provers are always accepted; cheating
//! provers are caught with overwhelming probability over the verifier's
//! randomness.
//!
//! The crate is organized around the protocol stack:
//!
//! - [`field`]: prime-field arithmetic, Lagrange basis evaluation, and the
//!   linear low-degree-extension sketch that is the verifier's entire
//!   stream state.
//! - [`fingerprint`]: Reed-Solomon multiset-equality fingerprints used for
//!   certificate replay checks.
//! - [`sumcheck`]: the interactive sum-check protocol in log-round and
//!   constant-round modes, plus the derived inverse-frequency and subset
//!   subprotocols.
//! - [`gstream`]: the dynamic graph stream model, derived-update rules, and
//!   cost accounting.
//! - [`session`]: prover/verifier orchestration, transcripts, and the
//!   adversary catalogue.
//! - [`basic_protocols`], [`matching`], [`spanning`]: the graph protocols
//!   themselves (triangle counting, disjointness, all four matching
//!   flavors, connectivity, approximate MST, bipartiteness, metric TSP).
//! - [`oracles`]: independent brute-force references used by tests and by
//!   the honest prover's certificate search.
//!
//! Run `cargo run -- --help` for the command-line harness, or look at the
//! `examples/` directory for one runnable program per capability.

pub mod basic_protocols;
pub mod certfile;
pub mod cli;
pub mod field;
pub mod fingerprint;
pub mod gstream;
pub mod matching;
pub mod oracles;
pub mod session;
pub mod spanning;
pub mod sumcheck;

pub use field::FieldElem;
pub use session::{SessionConfig, Transcript, Verdict};
