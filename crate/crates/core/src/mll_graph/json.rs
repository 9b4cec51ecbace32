//! JSON form of proof-nets.
//!
//! ```json
//! {"nodes": [{"id": 0, "kind": "box", "cpt": {"vars": [...], "table": [...]}}],
//!  "edges": [{"id": 7, "label": "X+", "from": 0, "to": 3}],
//!  "conclusions": [9, 12]}
//! ```
//!
//! Nodes may list their `premises` and `conclusions` explicitly. When they
//! do not, ports are rebuilt from the edge list: edges in id order, except
//! that tensor and par premises are ordered to match their conclusion label
//! and a box's main conclusion goes last.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::formula::Formula;
use super::net::{Edge, EdgeId, Node, NodeId, NodeKind, ProofNet};
use crate::factors::Factor;

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("malformed JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("{0}")]
    Content(String),
}

#[derive(Debug, Serialize, Deserialize)]
struct NetDoc {
    nodes: Vec<NodeDoc>,
    edges: Vec<EdgeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    conclusions: Option<Vec<usize>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct NodeDoc {
    id: usize,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cpt: Option<Factor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    premises: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    conclusions: Option<Vec<usize>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct EdgeDoc {
    id: usize,
    label: String,
    from: usize,
    #[serde(default)]
    to: Option<usize>,
}

pub fn to_json(net: &ProofNet) -> String {
    serde_json::to_string_pretty(&to_value(net)).expect("serializable")
}

pub fn to_value(net: &ProofNet) -> serde_json::Value {
    let doc = NetDoc {
        nodes: net
            .nodes()
            .map(|(id, n)| NodeDoc {
                id: id.0,
                kind: n.kind.as_str().to_string(),
                cpt: n.cpt.clone(),
                premises: Some(n.premises.iter().map(|e| e.0).collect()),
                conclusions: Some(n.conclusions.iter().map(|e| e.0).collect()),
            })
            .collect(),
        edges: net
            .edges()
            .map(|(id, e)| EdgeDoc { id: id.0, label: e.label.to_string(), from: e.from.0, to: e.to.map(|t| t.0) })
            .collect(),
        conclusions: Some(net.conclusions().iter().map(|e| e.0).collect()),
    };
    serde_json::to_value(doc).expect("serializable")
}

/// Reads a net. The result is not type-checked; run
/// [`ProofNet::check_typed_graph`] on it.
pub fn from_json(text: &str) -> Result<ProofNet, JsonError> {
    let doc: NetDoc = serde_json::from_str(text)?;
    let mut net = ProofNet::new();
    let mut labels = BTreeMap::new();
    for e in &doc.edges {
        let label: Formula = e.label.parse().map_err(|err| JsonError::Content(format!("edge {}: {err}", e.id)))?;
        if labels.insert(e.id, label.clone()).is_some() {
            return Err(JsonError::Content(format!("duplicate edge id {}", e.id)));
        }
        net.insert_raw_edge(EdgeId(e.id), Edge { label, from: NodeId(e.from), to: e.to.map(NodeId) });
    }
    for n in &doc.nodes {
        let kind: NodeKind = n.kind.parse().map_err(JsonError::Content)?;
        let id = NodeId(n.id);
        if net.node(id).is_some() {
            return Err(JsonError::Content(format!("duplicate node id {}", n.id)));
        }
        let premises = match &n.premises {
            Some(p) => p.iter().map(|e| EdgeId(*e)).collect(),
            None => derive_premises(&doc.edges, &labels, kind, n.id),
        };
        let conclusions = match &n.conclusions {
            Some(c) => c.iter().map(|e| EdgeId(*e)).collect(),
            None => derive_conclusions(&doc.edges, &labels, kind, n.id),
        };
        let cpt = match &n.cpt {
            Some(f) => Some(
                Factor::new(f.vars().to_vec(), f.table().to_vec())
                    .map_err(|err| JsonError::Content(format!("node {}: {err}", n.id)))?,
            ),
            None => None,
        };
        net.insert_raw_node(id, Node { kind, premises, conclusions, cpt });
    }
    let conclusions = match doc.conclusions {
        Some(c) => c.into_iter().map(EdgeId).collect(),
        None => doc.edges.iter().filter(|e| e.to.is_none()).map(|e| EdgeId(e.id)).collect(),
    };
    net.set_conclusions(conclusions);
    Ok(net)
}

fn derive_premises(edges: &[EdgeDoc], labels: &BTreeMap<usize, Formula>, kind: NodeKind, id: usize) -> Vec<EdgeId> {
    let mut ps: Vec<usize> = edges.iter().filter(|e| e.to == Some(id)).map(|e| e.id).collect();
    ps.sort_unstable();
    if matches!(kind, NodeKind::Tensor | NodeKind::Par) && ps.len() == 2 {
        let out = edges.iter().find(|e| e.from == id).and_then(|e| labels.get(&e.id));
        if let Some(Formula::Tensor(a, _) | Formula::Par(a, _)) = out {
            if labels[&ps[0]] != **a && labels[&ps[1]] == **a {
                ps.swap(0, 1);
            }
        }
    }
    ps.into_iter().map(EdgeId).collect()
}

fn derive_conclusions(edges: &[EdgeDoc], labels: &BTreeMap<usize, Formula>, kind: NodeKind, id: usize) -> Vec<EdgeId> {
    let mut cs: Vec<usize> = edges.iter().filter(|e| e.from == id).map(|e| e.id).collect();
    cs.sort_unstable();
    if kind == NodeKind::Box {
        cs.sort_by_key(|e| labels[e].is_positive_atom());
    }
    cs.into_iter().map(EdgeId).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factors::VarSpec;

    #[test]
    fn round_trip_preserves_the_net() {
        let mut n = ProofNet::new();
        let cpt = Factor::new(vec![VarSpec::binary("Y"), VarSpec::binary("X")], vec![0.3, 0.7, 0.6, 0.4]).unwrap();
        let (_, ins, _) = n.add_box(cpt, "X").unwrap();
        let (_, yp, _) = n.add_ax("Y");
        let (_, t) = n.add_tensor(yp, ins[0]).unwrap();
        let _ = t;
        let back = from_json(&to_json(&n)).unwrap();
        assert_eq!(back.check_typed_graph(), vec![]);
        assert_eq!(back.conclusions(), n.conclusions());
        assert!(crate::mll_graph::is_isomorphic(&back, &n));
    }

    #[test]
    fn ports_are_derived_when_omitted() {
        let text = r#"{
          "nodes": [{"id": 0, "kind": "ax"}, {"id": 1, "kind": "ax"}, {"id": 2, "kind": "tensor"}],
          "edges": [
            {"id": 0, "label": "A+", "from": 0},
            {"id": 1, "label": "A-", "from": 0, "to": 2},
            {"id": 2, "label": "B+", "from": 1, "to": 2},
            {"id": 3, "label": "B-", "from": 1},
            {"id": 4, "label": "(B+ * A-)", "from": 2}
          ],
          "conclusions": [0, 3, 4]
        }"#;
        let n = from_json(text).unwrap();
        assert_eq!(n.check_typed_graph(), vec![]);
        assert_eq!(n.node(NodeId(2)).unwrap().premises, vec![EdgeId(2), EdgeId(1)]);
    }

    #[test]
    fn bad_label_is_reported() {
        let text = r#"{"nodes": [], "edges": [{"id": 0, "label": "X", "from": 0}]}"#;
        assert!(matches!(from_json(text), Err(JsonError::Content(_))));
    }
}
