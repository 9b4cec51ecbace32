//! Exact inference for Bayesian networks carried out on multiplicative
//! proof-nets whose boxes hold conditional probability tables.
//!
//! The layers, bottom up: [`factors`] (tables and their algebra),
//! [`mll_graph`] (formulas, nets, correctness), [`rewrite`] (cut
//! elimination and expansions), [`cutnet`] (factorizations, cut typing,
//! sequentialization), [`semantics`] (interpretation, sampling), and the
//! Bayesian-network side in [`bn_bridge`] and [`dsep`].

pub mod bn_bridge;
pub mod cutnet;
pub mod dsep;
pub mod factors;
pub mod mll_graph;
pub mod random;
pub mod rewrite;
pub mod semantics;

pub use factors::{Assignment, CostCounters, Factor, FactorError, VarSpec};
pub use mll_graph::{Edge, EdgeId, Formula, NetError, Node, NodeId, NodeKind, ProofNet};
