//! Harvesting, cleaning and analysis of Wikipedia *Articles for Deletion*
//! (AfD) discussions.
//!
//! The crate is organized along the data flow:
//!
//! - [`collector`] resolves a date, date range or URL into log pages and
//!   fetches them politely through an on-disk cache.
//! - [`parser`] splits log pages into discussions, canonicalizes outcome
//!   labels, cleans text, masks bold votes and segments sentences.
//! - [`dataset`] builds stratified, title-disjoint splits and statistics.
//! - [`classify`] offers one prediction interface over a native TF-IDF
//!   baseline, a remote inference endpoint, an LLM backend and lexicon scorers.
//! - [`pipeline`] runs the one-shot `analyze` flow and batch prediction.
//! - [`metrics`] computes evaluation reports and score/outcome correlations.
//! - [`fixtures`] serves bundled and synthetic log pages over local HTTP for
//!   offline runs.

pub mod classify;
pub mod collector;
pub mod dataset;
pub mod fixtures;
pub mod metrics;
pub mod parser;
pub mod pipeline;

pub use parser::{Discussion, OutcomeLabel};
