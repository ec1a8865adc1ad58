//! Cross-lingual in-context learning toolkit.
//!
//! The crate is organised around the life of an experiment:
//!
//! - [`corpus`] loads QA and classification datasets into parallel form.
//! - [`mtpipeline`] turns a source-language training set into parallel
//!   demonstration buckets via machine translation and round-trip BLEU
//!   quality estimation.
//! - [`promptkit`] renders demonstrations and queries with attribute-level
//!   language mixing (MONO, Out-CLT, In-CLT and its ablations).
//! - [`inference`] talks to a completion endpoint with an on-disk cache.
//! - [`metrics`] scores generated answers and aggregates over buckets.
//! - [`analysis`] computes transfer gaps and correlations.
//!
//! Numeric routines are generic over [`Scalar`]; the aliases below fix the
//! scalar to `f64`, which is what the rest of the tooling uses.

pub mod analysis;
pub mod concurrency;
pub mod corpus;
pub mod http;
pub mod inference;
pub mod lang;
pub mod metrics;
pub mod mtpipeline;
pub mod promptkit;
pub mod retry;
pub mod scalar;
pub mod text;

pub use lang::Lang;
pub use scalar::Scalar;

/// Scalar used by the concrete aliases.
pub type Real = f64;

pub type ScoreRecord = metrics::ScoreRecord<Real>;
pub type AggregateResult = metrics::AggregateResult<Real>;
pub type Summary = metrics::Summary<Real>;
pub type TransferGapRecord = analysis::TransferGapRecord<Real>;
pub type CorrelationReport = analysis::CorrelationReport<Real>;

/// Single-precision variants, mainly useful for memory-bound bulk scoring.
pub type ScoreRecordF32 = metrics::ScoreRecord<f32>;
pub type SummaryF32 = metrics::Summary<f32>;
