//! Clustering toolkit for weighted directed stochastic block models.
//!
//! The crate provides:
//! - graph/label primitives and block-statistic estimators,
//! - two Lloyd-style node-clustering algorithms (likelihood scores and
//!   profile distances) plus spectral, coordinate-ascent and variational
//!   baselines,
//! - label-disagreement metrics, a seeded Bernoulli-SBM simulator, a
//!   benchmark harness with CSV/SVG output, and an event-log ingestion
//!   pipeline that builds co-occurrence graphs and sweeps the class count.

pub mod baselines;
pub mod bench;
pub mod distances;
pub mod error;
pub mod estimators;
pub mod graph;
pub mod ingest;
pub mod likelihood;
pub mod lloyd;
pub mod metrics;
pub mod simulate;
pub mod svg;

pub use error::{Error, Result};
