//! Polarized order between boxes, recognition of Bayesian proof-nets, and
//! the jointree shape of atom-labelled edges.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::correctness::{check_correctness, polarized_arcs};
use super::formula::Formula;
use super::net::{EdgeId, NetError, NetResult, NodeId, NodeKind, ProofNet};
use crate::rewrite;

/// Boxes ordered by polarized paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarizedDag {
    pub vertices: Vec<NodeId>,
    /// Pairs joined by a polarized path that meets no other box.
    pub arcs: BTreeSet<(NodeId, NodeId)>,
}

impl PolarizedDag {
    /// Strict polarized order: a path of arcs from `a` to `b`.
    pub fn precedes(&self, a: NodeId, b: NodeId) -> bool {
        let mut seen = BTreeSet::new();
        let mut stack = vec![a];
        while let Some(v) = stack.pop() {
            for &(x, y) in self.arcs.range((v, NodeId(0))..=(v, NodeId(usize::MAX))) {
                debug_assert_eq!(x, v);
                if y == b {
                    return true;
                }
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        false
    }

    pub fn parents(&self, b: NodeId) -> Vec<NodeId> {
        self.arcs.iter().filter(|(_, y)| *y == b).map(|(x, _)| *x).collect()
    }

    /// Boxes listed so that every arc goes forward; ties by id.
    pub fn topological_order(&self) -> Vec<NodeId> {
        let mut indeg: BTreeMap<NodeId, usize> = self.vertices.iter().map(|v| (*v, 0)).collect();
        for (_, y) in &self.arcs {
            *indeg.get_mut(y).unwrap() += 1;
        }
        let mut ready: BTreeSet<NodeId> = indeg.iter().filter(|(_, d)| **d == 0).map(|(v, _)| *v).collect();
        let mut out = Vec::new();
        while let Some(v) = ready.pop_first() {
            out.push(v);
            for &(x, y) in &self.arcs {
                if x == v {
                    let d = indeg.get_mut(&y).unwrap();
                    *d -= 1;
                    if *d == 0 {
                        ready.insert(y);
                    }
                }
            }
        }
        out
    }
}

pub fn polarized_dag(net: &ProofNet) -> NetResult<PolarizedDag> {
    if !net.is_atomic() {
        return Err(NetError::NonAtomic);
    }
    if !check_correctness(net)? {
        return Err(NetError::Incorrect);
    }
    let mut out: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for (a, b) in polarized_arcs(net) {
        out.entry(a).or_default().push(b);
    }
    let vertices = net.boxes();
    let mut arcs = BTreeSet::new();
    for &b in &vertices {
        let mut seen = BTreeSet::new();
        let mut stack = out.get(&b).cloned().unwrap_or_default();
        while let Some(v) = stack.pop() {
            if !seen.insert(v) {
                continue;
            }
            if net.kind(v) == Some(NodeKind::Box) {
                arcs.insert((b, v));
            } else if let Some(next) = out.get(&v) {
                stack.extend(next.iter().copied());
            }
        }
    }
    Ok(PolarizedDag { vertices, arcs })
}

/// Main names distinct, correct, and either positive or embeddable into a
/// positive net (decided by the artifact closure of the atomic part).
pub fn is_bayesian(net: &ProofNet) -> NetResult<bool> {
    if !check_correctness(net)? {
        return Ok(false);
    }
    let mains = net.main_names();
    let distinct: BTreeSet<&String> = mains.iter().collect();
    if distinct.len() != mains.len() {
        return Ok(false);
    }
    if net.is_positive() {
        return Ok(true);
    }
    let atomic = if net.is_atomic() {
        net.clone()
    } else {
        let normal = rewrite::normalize(net, false);
        match rewrite::normal_form_decompose(&normal) {
            Ok(d) => d.atomic,
            Err(_) => return Ok(false),
        }
    };
    match artifact_closure(&atomic)? {
        Some(closed) => check_correctness(&closed),
        None => Ok(false),
    }
}

/// Nodes reachable from `start` through edges labelled by `name`.
fn name_component(net: &ProofNet, start: NodeId, name: &str) -> BTreeSet<NodeId> {
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for e in net.incident(v).collect::<Vec<_>>() {
            if net.label(e).atom_name() != Some(name) {
                continue;
            }
            if let Some(w) = net.neighbor(e, v) {
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
    }
    seen
}

/// For each name X with negative conclusions and a box b^X: contract the X−
/// conclusions and cut them against a pending X+ reachable from b^X through
/// X-edges. `None` when some such X has no such X+.
pub fn artifact_closure(net: &ProofNet) -> NetResult<Option<ProofNet>> {
    if !net.is_atomic() {
        return Err(NetError::NonAtomic);
    }
    let mut out = net.clone();
    let names: BTreeSet<String> = net
        .conclusions()
        .iter()
        .filter(|e| net.label(**e).is_negative_atom())
        .filter_map(|e| net.label(*e).atom_name().map(str::to_string))
        .collect();
    for x in names {
        let Some(bx) = net.box_of(&x) else { continue };
        let comp = name_component(net, bx, &x);
        let target = net
            .conclusions()
            .iter()
            .copied()
            .find(|e| net.label(*e) == &Formula::pos(x.as_str()) && comp.contains(&net.edge(*e).unwrap().from));
        let Some(target) = target else { return Ok(None) };
        let negs: Vec<EdgeId> =
            net.conclusions().iter().copied().filter(|e| net.label(*e) == &Formula::neg(x.as_str())).collect();
        let merged = contract_balanced(&mut out, &negs)?;
        out.add_cut(target, merged)?;
    }
    Ok(Some(out))
}

/// Joins pending edges with a balanced tree of contractions.
pub(crate) fn contract_balanced(net: &mut ProofNet, edges: &[EdgeId]) -> NetResult<EdgeId> {
    match edges.len() {
        0 => Err(NetError::PreconditionViolation("nothing to contract".to_string())),
        1 => Ok(edges[0]),
        n => {
            let (l, r) = edges.split_at(n / 2);
            let a = contract_balanced(net, l)?;
            let b = contract_balanced(net, r)?;
            Ok(net.add_contraction(a, b)?.1)
        }
    }
}

/// Whether, for every name X, the X-labelled edges form a tree directed
/// away from the main conclusion of b^X, and every name has a box.
pub fn jointree_check(net: &ProofNet) -> NetResult<bool> {
    if !net.is_atomic() || !net.is_positive() {
        return Err(NetError::PreconditionViolation("jointree check needs a positive atomic net".to_string()));
    }
    for x in net.names() {
        let Some(root) = net.box_of(&x) else { return Ok(false) };
        // vertices: nodes plus one virtual leaf per pending X edge
        let mut indeg: BTreeMap<Vertex, usize> = BTreeMap::new();
        let mut adj: BTreeMap<Vertex, Vec<Vertex>> = BTreeMap::new();
        let mut edge_count = 0;
        for (eid, e) in net.edges() {
            if e.label.atom_name() != Some(x.as_str()) {
                continue;
            }
            edge_count += 1;
            let src = Vertex::Node(e.from);
            let dst = match e.to {
                Some(t) => Vertex::Node(t),
                None => Vertex::Leaf(eid),
            };
            let (a, b) = if e.label.is_positive_atom() { (src, dst) } else { (dst, src) };
            *indeg.entry(b).or_default() += 1;
            indeg.entry(a).or_default();
            adj.entry(a).or_default().push(b);
            adj.entry(b).or_default().push(a);
        }
        let r = Vertex::Node(root);
        if indeg.get(&r).copied() != Some(0) || indeg.len() != edge_count + 1 {
            return Ok(false);
        }
        if indeg.iter().any(|(v, d)| *v != r && *d != 1) {
            return Ok(false);
        }
        let mut seen = BTreeSet::from([r]);
        let mut stack = vec![r];
        while let Some(v) = stack.pop() {
            for w in &adj[&v] {
                if seen.insert(*w) {
                    stack.push(*w);
                }
            }
        }
        if seen.len() != indeg.len() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Vertex {
    Node(NodeId),
    Leaf(EdgeId),
}
