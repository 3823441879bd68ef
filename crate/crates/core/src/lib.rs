//! Mapping partitioned application graphs onto processor graphs.
//!
//! The building blocks are generic over the edge-weight scalar (`f32` or
//! `f64`); the aliases below fix it to `f64`, which is what the experiment
//! pipeline and the command-line tool use.

pub mod bisect;
pub mod commgraph;
pub mod error;
pub mod graph;
pub mod harness;
pub mod mappers;
pub mod metis;
pub mod metrics;
pub mod partition;
pub mod scalar;
pub mod seeds;
pub mod topology;

pub use error::{Error, Result};
pub use mappers::{map, Algorithm, Mapping};
pub use partition::Partition;
pub use scalar::Scalar;
pub use topology::{TopologyKind, TopologySpec};

pub type Graph = graph::Graph<f64>;
pub type ProcessorGraph = topology::ProcessorGraph<f64>;
pub type TimeMatrix = topology::TimeMatrix<f64>;
pub type MetricsReport = metrics::MetricsReport<f64>;
pub type QReport = metrics::QReport<f64>;

pub type Graph32 = graph::Graph<f32>;
pub type ProcessorGraph32 = topology::ProcessorGraph<f32>;
