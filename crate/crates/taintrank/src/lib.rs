//! Transaction graphs and taint propagation for Bitcoin-style transfer
//! records.
//!
//! The crate turns a log of transactions (each spending a set of input
//! addresses and paying a set of output addresses) into a weighted
//! directed graph between addresses, then scores every node by how much
//! "taint" flows to it from a chosen root node under several propagation
//! rules. It is organized as a pipeline:
//!
//! - [`ingest`] parses JSON transaction records and apportions each
//!   output's value across the inputs to produce address-to-address
//!   transfers, optionally merging co-spending addresses via [`cluster`].
//! - [`graph`] holds the immutable aggregated graph: nodes are addresses,
//!   an edge's weight is the total satoshi moved between its endpoints.
//! - [`taint`] computes per-node scores: flat reachability, value-weighted
//!   spread, hop-distance damping, their combinations, and a degree-ratio
//!   iteration.
//! - [`analysis`] summarizes graphs and score vectors (degree
//!   distributions, top-k tables, histograms).
//! - [`scenario`] generates synthetic transfer patterns with exact ground
//!   truth for evaluating the methods against each other.
//! - [`commands`] wires the pieces into the file-in/file-out operations
//!   the command-line binary exposes.
//!
//! All scoring is deterministic: results depend only on the graph, the
//! root, and the method parameters, never on iteration order of hash maps
//! or on threading. The `examples/` directory walks through each stage.

#![forbid(unsafe_code)]

pub mod analysis;
pub mod cluster;
pub mod commands;
pub mod graph;
pub mod ingest;
pub mod scenario;
pub mod taint;

pub use graph::{Edge, GraphBuilder, NodeId, TxGraph, ValueMode};
pub use taint::{TaintMethod, TaintScores};
