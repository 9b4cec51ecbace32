//! Reading inputs and writing artifacts.
//!
//! A cut-net file wraps a proof-net with its partition and root:
//!
//! ```json
//! {"net": {...}, "components": [[0, 1, 4], [2, 3]], "root": 0}
//! ```

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use bpn_core::bn_bridge::{bn_to_bpn, BayesianNetwork};
use bpn_core::cutnet::{partition_to_cutnet, RootedCutNet};
use bpn_core::factors::fmt_num;
use bpn_core::mll_graph::json;
use bpn_core::{NodeId, ProofNet};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};

pub fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// Writes to `out`, or to stdout when absent.
pub fn emit(out: Option<&PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => fs::write(p, format!("{text}\n")).map_err(|source| CliError::Io { path: p.clone(), source }),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

pub fn load_bn(path: &Path) -> CliResult<BayesianNetwork> {
    Ok(BayesianNetwork::from_json(&read(path)?)?)
}

/// A net that passes the typed-graph checks.
pub fn load_net(path: &Path) -> CliResult<ProofNet> {
    let net = json::from_json(&read(path)?)?;
    let violations = net.check_typed_graph();
    if !violations.is_empty() {
        let lines: Vec<String> = violations.iter().map(|v| format!("  {v}")).collect();
        return Err(CliError::IllTyped(lines.join("\n")));
    }
    Ok(net)
}

/// The net of `--bn` (translated for `query`) or of `--net`.
pub fn net_from(bn: Option<&PathBuf>, net: Option<&PathBuf>, query: &[String]) -> CliResult<ProofNet> {
    match (bn, net) {
        (Some(b), None) => Ok(bn_to_bpn(&load_bn(b)?, query)?),
        (None, Some(n)) => load_net(n),
        _ => Err(CliError::Usage("give exactly one of --bn and --net".to_string())),
    }
}

pub fn cutnet_to_json(rc: &RootedCutNet) -> String {
    let comps: Vec<Vec<usize>> = rc.cutnet().components().iter().map(|c| c.iter().map(|n| n.0).collect()).collect();
    let doc = json!({ "net": json::to_value(rc.net()), "components": comps, "root": rc.root() });
    serde_json::to_string_pretty(&doc).expect("serializable")
}

pub fn load_cutnet(path: &Path) -> CliResult<RootedCutNet> {
    let doc: Value = serde_json::from_str(&read(path)?).map_err(|e| CliError::CutNetFile(e.to_string()))?;
    let net_doc = doc.get("net").ok_or_else(|| CliError::CutNetFile("missing `net`".to_string()))?;
    let net = json::from_json(&net_doc.to_string())?;
    let violations = net.check_typed_graph();
    if !violations.is_empty() {
        let lines: Vec<String> = violations.iter().map(|v| format!("  {v}")).collect();
        return Err(CliError::IllTyped(lines.join("\n")));
    }
    let comps: Vec<Vec<usize>> = doc
        .get("components")
        .cloned()
        .map(serde_json::from_value)
        .transpose()
        .map_err(|e| CliError::CutNetFile(format!("`components`: {e}")))?
        .ok_or_else(|| CliError::CutNetFile("missing `components`".to_string()))?;
    let root = doc.get("root").and_then(Value::as_u64).unwrap_or(0) as usize;
    let parts: Vec<BTreeSet<NodeId>> = comps.into_iter().map(|c| c.into_iter().map(NodeId).collect()).collect();
    let cn = partition_to_cutnet(net, parts)?;
    Ok(RootedCutNet::new(cn, root)?)
}

/// A JSON number rounded to nine significant digits.
pub fn num(x: f64) -> Value {
    fmt_num(x).parse::<f64>().ok().and_then(serde_json::Number::from_f64).map_or(Value::Null, Value::Number)
}
