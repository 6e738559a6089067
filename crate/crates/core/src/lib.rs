//! Group testing where the set of potentially defective items is one
//! hyperedge of a known hypergraph.
//!
//! A test pools a subset of items and answers "yes" iff the pool meets
//! the defective edge. This crate provides:
//!
//! - the structural parameters of an input hypergraph and the dummy-vertex
//!   augmentation that uniformizes it ([`hypergraph`]);
//! - verification oracles deciding whether a binary test matrix is a
//!   separable code or a selector for the hypergraph ([`selector`]);
//! - closed-form size bounds and two matrix builders, an exact greedy
//!   cover and a randomized verify-and-retry sampler ([`construction`],
//!   [`bounds`]);
//! - executable non-adaptive, two-stage, and three-stage identification
//!   protocols with full transcripts ([`protocols`]).
//!
//! Everything is deterministic: builders under a fixed seed, greedy by
//! construction. All types are immutable after construction and safe to
//! share across threads; the only mutable state anywhere is the test
//! oracle's call counter, which is confined to a single protocol run.
//!
//! The crate is `no_std` (with `alloc`); file formats and the CLI live in
//! the companion `hgt-cli` crate.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod bitset;
pub mod bounds;
pub mod construction;
pub mod error;
pub mod hypergraph;
pub mod protocols;
pub mod selector;

pub use bitset::Bitset;
pub use bounds::{eval_selector_bound, eval_two_stage_bound, BoundReport};
pub use construction::{build, build_greedy, build_randomized, BuilderConfig, BuilderMode, CoverInstance};
pub use error::{Error, Result};
pub use hypergraph::{
    required_chi_pool, AugmentedHypergraph, Diagnostic, DiagnosticKind, Hypergraph, SSet, Severity,
};
pub use protocols::{
    decode_discard, respond, run_non_adaptive, run_three_stage, run_two_stage, ProtocolKind,
    ProtocolTranscript, Stage, TestOracle,
};
pub use selector::{count_identity_rows, is_p_selector, is_selector, is_separable, SelectorVerdict, TestMatrix, Witness};
