//! Formulas, the typed-graph model of proof-nets, and the structural checks
//! run on it.

mod bayes;
pub mod correctness;
pub mod dot;
mod formula;
mod iso;
pub mod json;
mod net;

pub(crate) use bayes::contract_balanced;
pub use bayes::{artifact_closure, is_bayesian, jointree_check, polarized_dag, PolarizedDag};
pub use correctness::{check_correctness, check_correctness_exhaustive, check_correctness_switching, polarized_acyclic};
pub use formula::{Formula, ParseFormulaError};
pub use iso::{canonical_hash, is_isomorphic};
pub use net::{Edge, EdgeId, NetError, NetResult, Node, NodeId, NodeKind, ProofNet, Violation};
