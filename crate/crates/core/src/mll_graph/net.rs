//! The proof-net graph: typed nodes joined by formula-labelled edges.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::formula::Formula;
use crate::factors::{Factor, PROB_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    Ax,
    Cut,
    Tensor,
    Par,
    One,
    Bot,
    Contraction,
    Weakening,
    Box,
}

impl NodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Ax => "ax",
            NodeKind::Cut => "cut",
            NodeKind::Tensor => "tensor",
            NodeKind::Par => "par",
            NodeKind::One => "one",
            NodeKind::Bot => "bot",
            NodeKind::Contraction => "contraction",
            NodeKind::Weakening => "weakening",
            NodeKind::Box => "box",
        }
    }

    /// Par and contraction nodes are the ones a switching may cut.
    pub fn is_switching(self) -> bool {
        matches!(self, NodeKind::Par | NodeKind::Contraction)
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NodeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "ax" => NodeKind::Ax,
            "cut" => NodeKind::Cut,
            "tensor" => NodeKind::Tensor,
            "par" => NodeKind::Par,
            "one" => NodeKind::One,
            "bot" => NodeKind::Bot,
            "contraction" | "c" => NodeKind::Contraction,
            "weakening" | "w" => NodeKind::Weakening,
            "box" => NodeKind::Box,
            other => return Err(format!("unknown node kind `{other}`")),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub kind: NodeKind,
    pub premises: Vec<EdgeId>,
    pub conclusions: Vec<EdgeId>,
    pub cpt: Option<Factor>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub label: Formula,
    pub from: NodeId,
    pub to: Option<NodeId>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("edge {0} is already the premise of a node")]
    EdgeNotPending(EdgeId),
    #[error("ill-typed net: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    IllTyped(Vec<Violation>),
    #[error("not a sub-net: {0}")]
    NotASubnet(String),
    #[error("net is not atomic")]
    NonAtomic,
    #[error("net is not correct")]
    Incorrect,
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("bad box: {0}")]
    BadBox(String),
}

/// One reason a graph fails the typing conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    MissingNode { edge: EdgeId, node: NodeId },
    PortMismatch { edge: EdgeId, detail: String },
    SharedPremise { edge: EdgeId },
    Arity { node: NodeId, kind: NodeKind, premises: usize, conclusions: usize },
    Label { node: NodeId, detail: String },
    Conclusions { detail: String },
    Box { node: NodeId, detail: String },
    ValueSets { name: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingNode { edge, node } => write!(f, "edge {edge} refers to missing node {node}"),
            Violation::PortMismatch { edge, detail } => write!(f, "edge {edge}: {detail}"),
            Violation::SharedPremise { edge } => write!(f, "edge {edge} is a premise of more than one node"),
            Violation::Arity { node, kind, premises, conclusions } => {
                write!(f, "{kind} node {node} has {premises} premises and {conclusions} conclusions")
            }
            Violation::Label { node, detail } => write!(f, "node {node}: {detail}"),
            Violation::Conclusions { detail } => write!(f, "conclusions: {detail}"),
            Violation::Box { node, detail } => write!(f, "box {node}: {detail}"),
            Violation::ValueSets { name } => write!(f, "name {name} carries different value lists"),
        }
    }
}

pub type NetResult<T> = Result<T, NetError>;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProofNet {
    nodes: BTreeMap<NodeId, Node>,
    edges: BTreeMap<EdgeId, Edge>,
    conclusions: Vec<EdgeId>,
    next_node: usize,
    next_edge: usize,
}

impl ProofNet {
    pub fn new() -> Self {
        ProofNet::default()
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(&id)
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges.get(&id)
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &Node)> {
        self.nodes.iter().map(|(k, v)| (*k, v))
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, &Edge)> {
        self.edges.iter().map(|(k, v)| (*k, v))
    }

    pub fn node_ids(&self) -> Vec<NodeId> {
        self.nodes.keys().copied().collect()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn conclusions(&self) -> &[EdgeId] {
        &self.conclusions
    }

    pub fn conclusion_labels(&self) -> Vec<&Formula> {
        self.conclusions.iter().map(|e| &self.edges[e].label).collect()
    }

    pub fn set_conclusions(&mut self, order: Vec<EdgeId>) {
        self.conclusions = order;
    }

    pub fn kind(&self, id: NodeId) -> Option<NodeKind> {
        self.nodes.get(&id).map(|n| n.kind)
    }

    pub fn label(&self, e: EdgeId) -> &Formula {
        &self.edges[&e].label
    }

    pub(crate) fn nodes_mut(&mut self) -> &mut BTreeMap<NodeId, Node> {
        &mut self.nodes
    }

    pub(crate) fn edges_mut(&mut self) -> &mut BTreeMap<EdgeId, Edge> {
        &mut self.edges
    }

    pub(crate) fn conclusions_mut(&mut self) -> &mut Vec<EdgeId> {
        &mut self.conclusions
    }

    pub fn fresh_node_id(&mut self) -> NodeId {
        let id = NodeId(self.next_node);
        self.next_node += 1;
        id
    }

    pub fn fresh_edge_id(&mut self) -> EdgeId {
        let id = EdgeId(self.next_edge);
        self.next_edge += 1;
        id
    }

    /// Inserts a node under a caller-chosen id without any consistency check.
    pub fn insert_raw_node(&mut self, id: NodeId, node: Node) {
        self.next_node = self.next_node.max(id.0 + 1);
        self.nodes.insert(id, node);
    }

    /// Inserts an edge under a caller-chosen id without any consistency check.
    pub fn insert_raw_edge(&mut self, id: EdgeId, edge: Edge) {
        self.next_edge = self.next_edge.max(id.0 + 1);
        self.edges.insert(id, edge);
    }

    pub(crate) fn remove_node(&mut self, id: NodeId) -> Option<Node> {
        self.nodes.remove(&id)
    }

    #[cfg(test)]
    pub(crate) fn remove_edge(&mut self, id: EdgeId) -> Option<Edge> {
        self.conclusions.retain(|c| *c != id);
        self.edges.remove(&id)
    }

    fn push_node(&mut self, kind: NodeKind, cpt: Option<Factor>) -> NodeId {
        let id = self.fresh_node_id();
        self.nodes.insert(id, Node { kind, premises: Vec::new(), conclusions: Vec::new(), cpt });
        id
    }

    pub(crate) fn push_conclusion(&mut self, node: NodeId, label: Formula) -> EdgeId {
        let e = self.fresh_edge_id();
        self.edges.insert(e, Edge { label, from: node, to: None });
        self.nodes.get_mut(&node).expect("node exists").conclusions.push(e);
        self.conclusions.push(e);
        e
    }

    fn attach(&mut self, e: EdgeId, node: NodeId) -> NetResult<()> {
        let edge = self.edges.get_mut(&e).ok_or(NetError::UnknownEdge(e))?;
        if edge.to.is_some() {
            return Err(NetError::EdgeNotPending(e));
        }
        edge.to = Some(node);
        self.nodes.get_mut(&node).ok_or(NetError::UnknownNode(node))?.premises.push(e);
        self.conclusions.retain(|c| *c != e);
        Ok(())
    }

    fn pending(&self, e: EdgeId) -> NetResult<&Edge> {
        let edge = self.edges.get(&e).ok_or(NetError::UnknownEdge(e))?;
        if edge.to.is_some() {
            return Err(NetError::EdgeNotPending(e));
        }
        Ok(edge)
    }

    /// Returns the node, its positive conclusion and its negative conclusion.
    pub fn add_ax(&mut self, name: &str) -> (NodeId, EdgeId, EdgeId) {
        let n = self.push_node(NodeKind::Ax, None);
        let p = self.push_conclusion(n, Formula::pos(name));
        let m = self.push_conclusion(n, Formula::neg(name));
        (n, p, m)
    }

    /// Adds a box whose inputs follow the CPT's variable order, main last.
    pub fn add_box(&mut self, cpt: Factor, main: &str) -> NetResult<(NodeId, Vec<EdgeId>, EdgeId)> {
        if !cpt.contains(main) {
            return Err(NetError::BadBox(format!("CPT does not mention `{main}`")));
        }
        let inputs: Vec<String> = cpt.names().filter(|n| *n != main).map(str::to_string).collect();
        let n = self.push_node(NodeKind::Box, Some(cpt));
        let ins = inputs.iter().map(|y| self.push_conclusion(n, Formula::neg(y.as_str()))).collect();
        let m = self.push_conclusion(n, Formula::pos(main));
        Ok((n, ins, m))
    }

    pub fn add_one(&mut self) -> (NodeId, EdgeId) {
        let n = self.push_node(NodeKind::One, None);
        (n, self.push_conclusion(n, Formula::One))
    }

    pub fn add_bot(&mut self) -> (NodeId, EdgeId) {
        let n = self.push_node(NodeKind::Bot, None);
        (n, self.push_conclusion(n, Formula::Bot))
    }

    pub fn add_weakening(&mut self, name: &str) -> (NodeId, EdgeId) {
        let n = self.push_node(NodeKind::Weakening, None);
        (n, self.push_conclusion(n, Formula::neg(name)))
    }

    pub fn add_cut(&mut self, a: EdgeId, b: EdgeId) -> NetResult<NodeId> {
        self.pending(a)?;
        self.pending(b)?;
        let n = self.push_node(NodeKind::Cut, None);
        self.attach(a, n)?;
        self.attach(b, n)?;
        Ok(n)
    }

    fn add_binary(&mut self, kind: NodeKind, a: EdgeId, b: EdgeId) -> NetResult<(NodeId, EdgeId)> {
        let la = self.pending(a)?.label.clone();
        let lb = self.pending(b)?.label.clone();
        let label = match kind {
            NodeKind::Tensor => Formula::tensor(la, lb),
            NodeKind::Par => Formula::par(la, lb),
            _ => la,
        };
        let n = self.push_node(kind, None);
        self.attach(a, n)?;
        self.attach(b, n)?;
        let c = self.push_conclusion(n, label);
        Ok((n, c))
    }

    pub fn add_tensor(&mut self, a: EdgeId, b: EdgeId) -> NetResult<(NodeId, EdgeId)> {
        self.add_binary(NodeKind::Tensor, a, b)
    }

    pub fn add_par(&mut self, a: EdgeId, b: EdgeId) -> NetResult<(NodeId, EdgeId)> {
        self.add_binary(NodeKind::Par, a, b)
    }

    pub fn add_contraction(&mut self, a: EdgeId, b: EdgeId) -> NetResult<(NodeId, EdgeId)> {
        self.add_binary(NodeKind::Contraction, a, b)
    }

    /// Box nodes in id order.
    pub fn boxes(&self) -> Vec<NodeId> {
        self.nodes.iter().filter(|(_, n)| n.kind == NodeKind::Box).map(|(k, _)| *k).collect()
    }

    /// The positive conclusion of a box.
    pub fn main_edge(&self, b: NodeId) -> Option<EdgeId> {
        let n = self.nodes.get(&b)?;
        if n.kind != NodeKind::Box {
            return None;
        }
        n.conclusions.iter().copied().find(|e| self.edges[e].label.is_positive_atom())
    }

    pub fn main_name(&self, b: NodeId) -> Option<&str> {
        self.main_edge(b).and_then(|e| self.edges[&e].label.atom_name())
    }

    /// Main names of all boxes, in box order (duplicates kept).
    pub fn main_names(&self) -> Vec<String> {
        self.boxes().iter().filter_map(|b| self.main_name(*b)).map(str::to_string).collect()
    }

    pub fn box_of(&self, name: &str) -> Option<NodeId> {
        self.boxes().into_iter().find(|b| self.main_name(*b) == Some(name))
    }

    /// Every atom name occurring on an edge or in a CPT.
    pub fn names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for e in self.edges.values() {
            out.extend(e.label.names());
        }
        for n in self.nodes.values() {
            if let Some(c) = &n.cpt {
                out.extend(c.name_set());
            }
        }
        out
    }

    pub fn conclusion_names(&self) -> BTreeSet<String> {
        self.conclusions.iter().flat_map(|e| self.edges[e].label.names()).collect()
    }

    /// Conclusion atom names in order of first occurrence.
    pub fn conclusion_name_order(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for e in &self.conclusions {
            for a in self.edges[e].label.atoms() {
                let n = a.atom_name().unwrap().to_string();
                if !out.contains(&n) {
                    out.push(n);
                }
            }
        }
        out
    }

    pub fn is_atomic(&self) -> bool {
        self.edges.values().all(|e| e.label.is_atomic())
    }

    pub fn is_positive(&self) -> bool {
        self.conclusions.iter().all(|e| self.edges[e].label.is_positive())
    }

    /// Names of the edges touching a node set (pending edges included).
    pub fn names_of_nodes(&self, nodes: &BTreeSet<NodeId>) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for n in nodes {
            let node = &self.nodes[n];
            for e in node.premises.iter().chain(&node.conclusions) {
                out.extend(self.edges[e].label.names());
            }
            if let Some(c) = &node.cpt {
                out.extend(c.name_set());
            }
        }
        out
    }

    /// Every typing violation: arities, labels, edge multiplicities, the
    /// pending-edge list, and box CPT shape.
    pub fn check_typed_graph(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut premise_count: BTreeMap<EdgeId, usize> = BTreeMap::new();
        let mut conclusion_count: BTreeMap<EdgeId, usize> = BTreeMap::new();
        for (id, n) in &self.nodes {
            for e in &n.premises {
                *premise_count.entry(*e).or_default() += 1;
                match self.edges.get(e) {
                    None => out.push(Violation::PortMismatch { edge: *e, detail: format!("listed by {id} but missing") }),
                    Some(edge) if edge.to != Some(*id) => out.push(Violation::PortMismatch {
                        edge: *e,
                        detail: format!("listed as premise of {id} but targets {:?}", edge.to),
                    }),
                    _ => {}
                }
            }
            for e in &n.conclusions {
                *conclusion_count.entry(*e).or_default() += 1;
                match self.edges.get(e) {
                    None => out.push(Violation::PortMismatch { edge: *e, detail: format!("listed by {id} but missing") }),
                    Some(edge) if edge.from != *id => out.push(Violation::PortMismatch {
                        edge: *e,
                        detail: format!("listed as conclusion of {id} but comes from {}", edge.from),
                    }),
                    _ => {}
                }
            }
        }
        for (eid, e) in &self.edges {
            if !self.nodes.contains_key(&e.from) {
                out.push(Violation::MissingNode { edge: *eid, node: e.from });
            }
            if let Some(t) = e.to {
                if !self.nodes.contains_key(&t) {
                    out.push(Violation::MissingNode { edge: *eid, node: t });
                }
            }
            if premise_count.get(eid).copied().unwrap_or(0) > 1 {
                out.push(Violation::SharedPremise { edge: *eid });
            }
            if conclusion_count.get(eid).copied().unwrap_or(0) != 1 {
                out.push(Violation::PortMismatch {
                    edge: *eid,
                    detail: "must be the conclusion of exactly one node".to_string(),
                });
            }
            if e.to.is_some() && premise_count.get(eid).copied().unwrap_or(0) == 0 {
                out.push(Violation::PortMismatch { edge: *eid, detail: "target does not list it".to_string() });
            }
        }
        let pending: BTreeSet<EdgeId> = self.edges.iter().filter(|(_, e)| e.to.is_none()).map(|(k, _)| *k).collect();
        let listed: BTreeSet<EdgeId> = self.conclusions.iter().copied().collect();
        if listed.len() != self.conclusions.len() {
            out.push(Violation::Conclusions { detail: "an edge is listed twice".to_string() });
        }
        if pending != listed {
            out.push(Violation::Conclusions {
                detail: format!("pending edges {:?} differ from listed conclusions {:?}", pending, listed),
            });
        }
        for (id, n) in &self.nodes {
            self.check_node(*id, n, &mut out);
        }
        let mut domains: BTreeMap<&str, &Vec<String>> = BTreeMap::new();
        for n in self.nodes.values() {
            if let Some(c) = &n.cpt {
                for v in c.vars() {
                    if let Some(prev) = domains.insert(&v.name, &v.values) {
                        if prev != &v.values {
                            out.push(Violation::ValueSets { name: v.name.clone() });
                        }
                    }
                }
            }
        }
        out
    }

    fn check_node(&self, id: NodeId, n: &Node, out: &mut Vec<Violation>) {
        let arity = |p: usize, c: usize| n.premises.len() == p && n.conclusions.len() == c;
        let bad_arity = || Violation::Arity {
            node: id,
            kind: n.kind,
            premises: n.premises.len(),
            conclusions: n.conclusions.len(),
        };
        let lab = |e: &EdgeId| self.edges.get(e).map(|x| &x.label);
        let label_err = |detail: String| Violation::Label { node: id, detail };
        if n.kind != NodeKind::Box && n.cpt.is_some() {
            out.push(label_err("only boxes carry a CPT".to_string()));
        }
        let ok_arity = match n.kind {
            NodeKind::Ax => arity(0, 2),
            NodeKind::Cut => arity(2, 0),
            NodeKind::Tensor | NodeKind::Par | NodeKind::Contraction => arity(2, 1),
            NodeKind::One | NodeKind::Bot | NodeKind::Weakening => arity(0, 1),
            NodeKind::Box => n.premises.is_empty() && !n.conclusions.is_empty(),
        };
        if !ok_arity {
            out.push(bad_arity());
            return;
        }
        let (Some(_), Some(_)) = (
            n.premises.iter().map(lab).collect::<Option<Vec<_>>>(),
            n.conclusions.iter().map(lab).collect::<Option<Vec<_>>>(),
        ) else {
            return;
        };
        let p: Vec<&Formula> = n.premises.iter().map(|e| lab(e).unwrap()).collect();
        let c: Vec<&Formula> = n.conclusions.iter().map(|e| lab(e).unwrap()).collect();
        match n.kind {
            NodeKind::Ax => {
                let ok = c[0].is_atomic() && c[1] == &c[0].negate();
                if !ok {
                    out.push(label_err(format!("axiom conclusions {} and {} are not dual atoms", c[0], c[1])));
                }
            }
            NodeKind::Cut => {
                if p[1] != &p[0].negate() {
                    out.push(label_err(format!("cut premises {} and {} are not dual", p[0], p[1])));
                }
            }
            NodeKind::Tensor => {
                if c[0] != &Formula::tensor(p[0].clone(), p[1].clone()) {
                    out.push(label_err(format!("tensor conclusion {} does not match premises", c[0])));
                }
            }
            NodeKind::Par => {
                if c[0] != &Formula::par(p[0].clone(), p[1].clone()) {
                    out.push(label_err(format!("par conclusion {} does not match premises", c[0])));
                }
            }
            NodeKind::Contraction => {
                let ok = p[0].is_negative_atom() && p[0] == p[1] && c[0] == p[0];
                if !ok {
                    out.push(label_err("contraction needs three equal negative atoms".to_string()));
                }
            }
            NodeKind::One => {
                if c[0] != &Formula::One {
                    out.push(label_err("one node must conclude 1".to_string()));
                }
            }
            NodeKind::Bot => {
                if c[0] != &Formula::Bot {
                    out.push(label_err("bot node must conclude bot".to_string()));
                }
            }
            NodeKind::Weakening => {
                if !c[0].is_negative_atom() {
                    out.push(label_err("weakening must conclude a negative atom".to_string()));
                }
            }
            NodeKind::Box => self.check_box(id, n, &c, out),
        }
    }

    fn check_box(&self, id: NodeId, n: &Node, c: &[&Formula], out: &mut Vec<Violation>) {
        let bad = |detail: String| Violation::Box { node: id, detail };
        let mains: Vec<&str> = c.iter().filter(|f| f.is_positive_atom()).filter_map(|f| f.atom_name()).collect();
        if mains.len() != 1 || c.iter().any(|f| !f.is_atomic()) {
            out.push(bad("needs atomic conclusions with exactly one positive atom".to_string()));
            return;
        }
        let main = mains[0];
        let inputs: Vec<&str> = c.iter().filter(|f| f.is_negative_atom()).filter_map(|f| f.atom_name()).collect();
        let input_set: BTreeSet<&str> = inputs.iter().copied().collect();
        if input_set.len() != inputs.len() || input_set.contains(main) {
            out.push(bad("input names must be distinct and differ from the main name".to_string()));
            return;
        }
        let Some(cpt) = &n.cpt else {
            out.push(bad("missing CPT".to_string()));
            return;
        };
        let mut expected: BTreeSet<String> = input_set.iter().map(|s| s.to_string()).collect();
        expected.insert(main.to_string());
        if cpt.name_set() != expected {
            out.push(bad(format!("CPT variables {:?} do not match conclusions {:?}", cpt.name_set(), expected)));
            return;
        }
        if !cpt.is_cpt_for(main, PROB_TOL) {
            out.push(bad(format!("CPT rows do not sum to 1 over {main}")));
        }
    }

    /// The induced net on `keep`; edges leaving the set become pending.
    ///
    /// Node and edge ids are preserved. Former conclusions keep their order
    /// and newly pending edges follow in id order.
    pub fn induced(&self, keep: &BTreeSet<NodeId>) -> NetResult<ProofNet> {
        let mut out = ProofNet { next_node: self.next_node, next_edge: self.next_edge, ..ProofNet::default() };
        for id in keep {
            let n = self.nodes.get(id).ok_or(NetError::UnknownNode(*id))?;
            out.nodes.insert(*id, n.clone());
        }
        let mut new_pending = Vec::new();
        for (eid, e) in &self.edges {
            let src_in = keep.contains(&e.from);
            let dst_in = e.to.is_some_and(|t| keep.contains(&t));
            if !src_in && dst_in {
                return Err(NetError::NotASubnet(format!("premise {eid} of {} comes from outside", e.to.unwrap())));
            }
            if src_in {
                let mut e2 = e.clone();
                if !dst_in {
                    e2.to = None;
                    if e.to.is_some() {
                        new_pending.push(*eid);
                    }
                }
                out.edges.insert(*eid, e2);
            }
        }
        out.conclusions = self.conclusions.iter().copied().filter(|c| out.edges.contains_key(c)).collect();
        out.conclusions.extend(new_pending);
        for n in out.nodes.values_mut() {
            let edges = &out.edges;
            n.premises.retain(|e| edges.contains_key(e));
        }
        Ok(out)
    }

    /// Like [`ProofNet::induced`] but also requires the result to be a typed,
    /// correct net.
    pub fn subnet(&self, keep: &BTreeSet<NodeId>) -> NetResult<ProofNet> {
        let sub = self.induced(keep)?;
        let v = sub.check_typed_graph();
        if !v.is_empty() {
            return Err(NetError::NotASubnet(v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")));
        }
        if !super::correctness::check_correctness(&sub)? {
            return Err(NetError::NotASubnet("induced graph has a switching cycle".to_string()));
        }
        Ok(sub)
    }

    /// Other endpoint of an edge as seen from `node`.
    pub fn neighbor(&self, e: EdgeId, node: NodeId) -> Option<NodeId> {
        let edge = &self.edges[&e];
        if edge.from == node {
            edge.to
        } else {
            Some(edge.from)
        }
    }

    /// All edges touching a node.
    pub fn incident(&self, node: NodeId) -> impl Iterator<Item = EdgeId> + '_ {
        let n = &self.nodes[&node];
        n.premises.iter().chain(&n.conclusions).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factors::VarSpec;

    #[test]
    fn lone_axiom_is_typed() {
        let mut n = ProofNet::new();
        n.add_ax("X");
        assert!(n.check_typed_graph().is_empty());
        assert_eq!(n.conclusion_labels(), vec![&Formula::pos("X"), &Formula::neg("X")]);
    }

    #[test]
    fn cut_on_different_atoms_is_a_label_violation() {
        let mut n = ProofNet::new();
        let (_, xp, _) = n.add_ax("X");
        let (_, _, ym) = n.add_ax("Y");
        n.add_cut(xp, ym).unwrap();
        let v = n.check_typed_graph();
        assert!(v.iter().any(|x| matches!(x, Violation::Label { .. })), "{v:?}");
    }

    #[test]
    fn edge_shared_by_two_nodes_is_reported() {
        let mut n = ProofNet::new();
        let (_, xp, xm) = n.add_ax("X");
        let c = n.add_cut(xp, xm).unwrap();
        let (w, _) = n.add_weakening("X");
        n.nodes_mut().get_mut(&w).unwrap().premises.push(xp);
        let v = n.check_typed_graph();
        assert!(v.iter().any(|x| matches!(x, Violation::SharedPremise { edge } if *edge == xp)), "{v:?}");
        assert!(n.node(c).is_some());
    }

    #[test]
    fn box_checks_row_normalization() {
        let y = VarSpec::binary("Y");
        let x = VarSpec::binary("X");
        let good = Factor::new(vec![y.clone(), x.clone()], vec![0.3, 0.7, 0.6, 0.4]).unwrap();
        let bad = Factor::new(vec![y, x], vec![0.3, 0.6, 0.6, 0.4]).unwrap();
        let mut n = ProofNet::new();
        n.add_box(good, "X").unwrap();
        assert!(n.check_typed_graph().is_empty());
        let mut m = ProofNet::new();
        m.add_box(bad, "X").unwrap();
        assert!(matches!(m.check_typed_graph()[0], Violation::Box { .. }));
    }

    #[test]
    fn induced_rejects_dangling_premise() {
        let mut n = ProofNet::new();
        let (a, ap, _) = n.add_ax("A");
        let (_, bp, _) = n.add_ax("B");
        let (t, _) = n.add_tensor(ap, bp).unwrap();
        let keep: BTreeSet<NodeId> = [t].into_iter().collect();
        assert!(matches!(n.induced(&keep), Err(NetError::NotASubnet(_))));
        let all: BTreeSet<NodeId> = n.node_ids().into_iter().collect();
        assert_eq!(n.subnet(&all).unwrap(), n);
        let just_a: BTreeSet<NodeId> = [a].into_iter().collect();
        let sub = n.subnet(&just_a).unwrap();
        assert_eq!(sub.conclusions().len(), 2);
    }
}
