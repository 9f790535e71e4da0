//! Component-incompatibility entropy for parallel clusters, and tools to
//! correlate it against published HPC benchmark results.
//!
//! * [`entropy`]: machine graphs, interaction values, machine and cluster
//!   entropy.
//! * [`stats`]: Pearson correlation, Student-t CDF, p-values and labels.
//! * [`dataset`]: bundled reference data and file ingestion.
//! * [`analysis`]: correlation runs, published-value audit, efficiency
//!   ratios, sensitivity sweeps.
//! * [`plot`], [`report`], [`reproduce`]: output.

pub mod analysis;
pub mod dataset;
pub mod entropy;
pub mod error;
pub mod plot;
pub mod report;
pub mod reproduce;
pub mod stats;

pub use error::{Error, ErrorKind, Result};
