use std::path::PathBuf;

use bpn_core::bn_bridge::BnError;
use bpn_core::cutnet::CutNetError;
use bpn_core::dsep::DsepError;
use bpn_core::mll_graph::json::JsonError;
use bpn_core::mll_graph::NetError;
use bpn_core::rewrite::RewriteError;
use bpn_core::semantics::SemanticsError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot access {}: {source}", .path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("mll_graph: {0}")]
    NetJson(#[from] JsonError),
    #[error("mll_graph: {0}")]
    Net(#[from] NetError),
    #[error("mll_graph: ill-typed net:\n{0}")]
    IllTyped(String),
    #[error("bn_bridge: {0}")]
    Bn(#[from] BnError),
    #[error("semantics: {0}")]
    Semantics(#[from] SemanticsError),
    #[error("cutnet: {0}")]
    CutNet(#[from] CutNetError),
    #[error("rewrite: {0}")]
    Rewrite(#[from] RewriteError),
    #[error("dsep: {0}")]
    Dsep(#[from] DsepError),
    #[error("cut-net file: {0}")]
    CutNetFile(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
