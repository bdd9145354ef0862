//! Exact solver for the questionnaire-design game between a receiver that
//! commits to a decoding map and strategic senders of unknown type.
//!
//! A sender of type `λ` observes a history `x ∈ 𝒳ⁿ`, picks a report, and the
//! receiver decodes it. The sender maximizes an averaged single-letter
//! utility; the receiver maximizes the prior-weighted worst-case number of
//! histories it decodes correctly. The crate provides:
//!
//! * [`model`]: alphabets, types, priors and exact utilities, plus the
//!   canonical enumeration of `𝒳ⁿ` ([`Horizon`]).
//! * [`graph`]: sender graphs, their unions and maximum independent sets.
//! * [`equilibrium`]: λ-partitions, the receiver objective, canonical
//!   strategies and exact/heuristic questionnaire search.
//! * [`gameplay`]: a brute-force account of sender best responses, used as an
//!   independent check of the partition formula.
//! * [`rate`]: the rate of information extraction and its bounds.
//!
//! Everything is `no_std` + `alloc`; file formats and the command line live in
//! the companion `screening` crate.
#![no_std]
#![deny(missing_docs)]

extern crate alloc;

pub mod equilibrium;
pub mod error;
pub mod gameplay;
pub mod graph;
pub mod model;
pub mod rate;
pub mod rational;

pub use error::{Error, Result};
pub use model::{Honesty, Horizon, Model, SenderTypeId, SeqId, Sequence};
pub use rational::Rational;

/// Size limits for the exponential parts of the solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budgets {
    /// Maximum number of sequences `|𝒳|ⁿ` that may be materialized.
    pub enumeration: usize,
    /// Maximum vertex count of a dense sender graph.
    pub graph: usize,
    /// Maximum vertex count for exact maximum independent set.
    pub mis: usize,
    /// Maximum `|𝒳|ⁿ` for exhaustive questionnaire search (`2^subset` sets).
    pub subset: usize,
    /// Maximum number of tied optimal questionnaires retained in a result.
    pub report_cap: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Self {
            enumeration: 1_000_000,
            graph: 4096,
            mis: 512,
            subset: 20,
            report_cap: 16,
        }
    }
}
