//! Bias and overdispersion of class preferences in labeled graphs.
//!
//! The crate is organized by stage of an analysis:
//!
//! * [`graph`] and [`io`]: ingestion, preprocessing and class-degree sequences.
//! * [`stats`]: the homophily index, the binomial (Model I) fit with its
//!   goodness-of-fit test, Williams' quasi-likelihood overdispersion fit and
//!   the binomial null distribution of preferences.
//! * [`osbm`]: sampling from the overdispersed stochastic block model.
//! * [`classify`]: 1-hop and 2-hop relational classifiers.
//! * [`eval`]: labeling splits, AUC and the cross-validation harness.

pub mod classify;
pub mod error;
pub mod eval;
pub mod graph;
pub mod io;
pub mod osbm;
pub mod stats;

pub use error::{Error, Result};
pub use graph::{ClassDegreeSequence, ClassId, LabeledGraph, NodeId, Orientation};
