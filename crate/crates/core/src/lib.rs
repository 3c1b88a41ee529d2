//! Indonesian AMR parsing from dependency-annotated sentences.
//!
//! The pipeline runs in three steps:
//!
//! 1. [`pairgen`] turns each dependency arc into a parent/child pair and drops
//!    pairs that involve determiners, prepositions or subordinate
//!    conjunctions.
//! 2. [`features`] describes every surviving pair and a [`classifier`] labels
//!    it with one of six AMR relations.
//! 3. [`constructor`] assembles the labeled pairs into an [`amr::AmrGraph`].
//!
//! [`metrics`] scores the output with SMATCH and pair F1, and [`pipeline`]
//! wires everything into the commands exposed by the `indoamr` binary.

pub mod amr;
pub mod classifier;
pub mod constructor;
pub mod error;
pub mod features;
pub mod ingest;
pub mod metrics;
pub mod pairgen;
pub mod pipeline;

pub use amr::{parse_penman, serialize_penman, AmrGraph, EdgeLabel};
pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/pairs.md")]
    mod pairs {}
    #[doc = include_str!("../../../book/src/features.md")]
    mod features {}
    #[doc = include_str!("../../../book/src/classifiers.md")]
    mod classifiers {}
    #[doc = include_str!("../../../book/src/construction.md")]
    mod construction {}
    #[doc = include_str!("../../../book/src/smatch.md")]
    mod smatch {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
