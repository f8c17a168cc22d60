//! Computational dramaturgy toolkit.
//!
//! The pipeline turns extracted play text into lexical statistics and affect
//! arcs measured in stage minutes (fixed 150-word windows):
//!
//! - [`corpus`]: cleaning, tokenization, sentence splitting, segmentation
//! - [`lexstats`]: type-token ratio, ranked frequencies, word-cloud layout
//! - [`affect`]: pluggable sentiment/emotion scorers, arcs, tension metrics
//! - [`bridge`]: line-delimited JSON client for external model scorers
//! - [`report`]: end-to-end analysis, caching, comparison and rendering

pub mod affect;
pub mod bridge;
pub mod corpus;
pub mod exec;
pub mod lexstats;
pub mod report;

pub use exec::Execution;
