//! Cut elimination, pruning, and the two expansions that undo single steps.
//!
//! Rules: ax/cut, ⊗/⅋, 1/⊥, contraction against weakening, and (only with
//! pruning on) a box whose main conclusion is cut against a weakening. Edge
//! ids that survive a step keep their id, so pending conclusions never change
//! identity.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::mll_graph::{check_correctness, Edge, EdgeId, Formula, NetError, Node, NodeId, NodeKind, ProofNet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RedexKind {
    AxCut,
    TensorPar,
    OneBot,
    ContractionWeakening,
    BoxWeakening,
}

impl RedexKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RedexKind::AxCut => "ax_cut",
            RedexKind::TensorPar => "tensor_par",
            RedexKind::OneBot => "one_bot",
            RedexKind::ContractionWeakening => "contraction_weakening",
            RedexKind::BoxWeakening => "box_weakening",
        }
    }
}

/// A rule occurrence. Node lists, by kind:
/// ax_cut `[ax, cut]`, tensor_par `[tensor, par, cut]`,
/// one_bot `[one, bot, cut]`, contraction_weakening `[c, w]`,
/// box_weakening `[box, w, cut]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Redex {
    pub kind: RedexKind,
    pub nodes: Vec<NodeId>,
}

impl fmt::Display for Redex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.nodes.iter().map(|n| n.to_string()).collect();
        write!(f, "{} {}", self.kind.as_str(), ids.join(" "))
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RewriteError {
    #[error("redex `{0}` does not match the net")]
    StaleRedex(Redex),
    #[error("edge {0} is not atomic")]
    NonAtomicEdge(EdgeId),
    #[error("expansion would break correctness")]
    WouldBreakCorrectness,
    #[error("net is not normal: {0}")]
    NotNormal(String),
    #[error("bad expansion site: {0}")]
    BadSite(String),
    #[error(transparent)]
    Net(#[from] NetError),
}

pub type RewriteResult<T> = Result<T, RewriteError>;

fn source(net: &ProofNet, e: EdgeId) -> NodeId {
    net.edge(e).expect("edge exists").from
}

fn kind(net: &ProofNet, n: NodeId) -> NodeKind {
    net.kind(n).expect("node exists")
}

fn match_cut(net: &ProofNet, cut: NodeId, pruning: bool) -> Option<Redex> {
    let node = net.node(cut)?;
    if node.kind != NodeKind::Cut || node.premises.len() != 2 {
        return None;
    }
    let (p, q) = (node.premises[0], node.premises[1]);
    let (sp, sq) = (source(net, p), source(net, q));
    let (kp, kq) = (kind(net, sp), kind(net, sq));
    let pick = |a: NodeKind, b: NodeKind| {
        if kp == a && kq == b {
            Some((sp, sq))
        } else if kp == b && kq == a {
            Some((sq, sp))
        } else {
            None
        }
    };
    if sp != sq {
        if kp == NodeKind::Ax {
            return Some(Redex { kind: RedexKind::AxCut, nodes: vec![sp, cut] });
        }
        if kq == NodeKind::Ax {
            return Some(Redex { kind: RedexKind::AxCut, nodes: vec![sq, cut] });
        }
    }
    if let Some((t, par)) = pick(NodeKind::Tensor, NodeKind::Par) {
        return Some(Redex { kind: RedexKind::TensorPar, nodes: vec![t, par, cut] });
    }
    if let Some((one, bot)) = pick(NodeKind::One, NodeKind::Bot) {
        return Some(Redex { kind: RedexKind::OneBot, nodes: vec![one, bot, cut] });
    }
    if pruning {
        if let Some((b, w)) = pick(NodeKind::Box, NodeKind::Weakening) {
            return Some(Redex { kind: RedexKind::BoxWeakening, nodes: vec![b, w, cut] });
        }
    }
    None
}

fn match_contraction(net: &ProofNet, c: NodeId) -> Option<Redex> {
    let node = net.node(c)?;
    if node.kind != NodeKind::Contraction || node.premises.len() != 2 {
        return None;
    }
    node.premises
        .iter()
        .map(|e| source(net, *e))
        .find(|s| kind(net, *s) == NodeKind::Weakening)
        .map(|w| Redex { kind: RedexKind::ContractionWeakening, nodes: vec![c, w] })
}

/// Every redex, in node-id order of the cut or contraction that anchors it.
pub fn find_redexes(net: &ProofNet, pruning: bool) -> Vec<Redex> {
    net.nodes()
        .filter_map(|(id, n)| match n.kind {
            NodeKind::Cut => match_cut(net, id, pruning),
            NodeKind::Contraction => match_contraction(net, id),
            _ => None,
        })
        .collect()
}

fn still_matches(net: &ProofNet, r: &Redex) -> bool {
    let found = match r.kind {
        RedexKind::ContractionWeakening => r.nodes.first().and_then(|c| {
            let node = net.node(*c)?;
            if node.kind != NodeKind::Contraction {
                return None;
            }
            let w = *r.nodes.get(1)?;
            node.premises.iter().any(|e| source(net, *e) == w && kind(net, w) == NodeKind::Weakening).then(|| r.clone())
        }),
        _ => r.nodes.last().and_then(|cut| match_cut(net, *cut, r.kind == RedexKind::BoxWeakening)),
    };
    match found {
        Some(f) if f.kind == r.kind => {
            let want: BTreeSet<NodeId> = r.nodes.iter().copied().collect();
            let got: BTreeSet<NodeId> = f.nodes.iter().copied().collect();
            // an ax cut against another ax may be named from either side
            want == got || (r.kind == RedexKind::AxCut && ax_cut_alternative(net, r))
        }
        _ => false,
    }
}

fn ax_cut_alternative(net: &ProofNet, r: &Redex) -> bool {
    let (ax, cut) = (r.nodes[0], r.nodes[1]);
    net.kind(ax) == Some(NodeKind::Ax)
        && net.node(cut).is_some_and(|c| {
            let s: Vec<NodeId> = c.premises.iter().map(|e| source(net, *e)).collect();
            s.contains(&ax) && s[0] != s[1]
        })
}

pub fn reduce_step(net: &ProofNet, r: &Redex) -> RewriteResult<ProofNet> {
    let mut out = net.clone();
    apply(&mut out, r)?;
    Ok(out)
}

/// Rewrites in place.
pub fn apply(net: &mut ProofNet, r: &Redex) -> RewriteResult<()> {
    if !still_matches(net, r) {
        return Err(RewriteError::StaleRedex(r.clone()));
    }
    match r.kind {
        RedexKind::AxCut => ax_cut(net, r.nodes[0], r.nodes[1]),
        RedexKind::TensorPar => tensor_par(net, r.nodes[0], r.nodes[1], r.nodes[2]),
        RedexKind::OneBot => one_bot(net, r.nodes[0], r.nodes[1], r.nodes[2]),
        RedexKind::ContractionWeakening => contraction_weakening(net, r.nodes[0], r.nodes[1]),
        RedexKind::BoxWeakening => box_weakening(net, r.nodes[0], r.nodes[1], r.nodes[2]),
    }
    Ok(())
}

/// Points `keep` at the node that produced `old`, in `old`'s port.
fn take_over_source(net: &mut ProofNet, keep: EdgeId, old: EdgeId) {
    let src = source(net, old);
    let node = net.nodes_mut().get_mut(&src).unwrap();
    let slot = node.conclusions.iter().position(|e| *e == old).unwrap();
    node.conclusions[slot] = keep;
    net.edges_mut().get_mut(&keep).unwrap().from = src;
    net.edges_mut().remove(&old);
}

fn ax_cut(net: &mut ProofNet, ax: NodeId, cut: NodeId) {
    let ax_node = net.node(ax).unwrap().clone();
    let cut_node = net.node(cut).unwrap().clone();
    let a = *cut_node.premises.iter().find(|e| source(net, **e) == ax).unwrap();
    let q = *cut_node.premises.iter().find(|e| **e != a).unwrap();
    let keep = *ax_node.conclusions.iter().find(|e| **e != a).unwrap();
    take_over_source(net, keep, q);
    net.edges_mut().remove(&a);
    net.remove_node(ax);
    net.remove_node(cut);
}

fn tensor_par(net: &mut ProofNet, t: NodeId, p: NodeId, cut: NodeId) {
    let tn = net.remove_node(t).unwrap();
    let pn = net.remove_node(p).unwrap();
    net.remove_node(cut);
    net.edges_mut().remove(&tn.conclusions[0]);
    net.edges_mut().remove(&pn.conclusions[0]);
    for i in 0..2 {
        let k = net.fresh_node_id();
        let (a, b) = (tn.premises[i], pn.premises[i]);
        net.insert_raw_node(k, Node { kind: NodeKind::Cut, premises: vec![a, b], conclusions: vec![], cpt: None });
        net.edges_mut().get_mut(&a).unwrap().to = Some(k);
        net.edges_mut().get_mut(&b).unwrap().to = Some(k);
    }
}

fn one_bot(net: &mut ProofNet, one: NodeId, bot: NodeId, cut: NodeId) {
    for n in [one, bot] {
        let node = net.remove_node(n).unwrap();
        net.edges_mut().remove(&node.conclusions[0]);
    }
    net.remove_node(cut);
}

fn contraction_weakening(net: &mut ProofNet, c: NodeId, w: NodeId) {
    let cn = net.node(c).unwrap().clone();
    let pw = *cn.premises.iter().find(|e| source(net, **e) == w).unwrap();
    let other = *cn.premises.iter().find(|e| **e != pw).unwrap();
    let keep = cn.conclusions[0];
    take_over_source(net, keep, other);
    net.edges_mut().remove(&pw);
    net.remove_node(w);
    net.remove_node(c);
}

fn box_weakening(net: &mut ProofNet, b: NodeId, w: NodeId, cut: NodeId) {
    let bn = net.remove_node(b).unwrap();
    let wn = net.remove_node(w).unwrap();
    net.remove_node(cut);
    net.edges_mut().remove(&wn.conclusions[0]);
    for e in bn.conclusions {
        if net.label(e).is_positive_atom() {
            net.edges_mut().remove(&e);
            continue;
        }
        let k = net.fresh_node_id();
        net.insert_raw_node(k, Node { kind: NodeKind::Weakening, premises: vec![], conclusions: vec![e], cpt: None });
        net.edges_mut().get_mut(&e).unwrap().from = k;
    }
}

/// Normalizes with the first redex each time.
pub fn normalize(net: &ProofNet, pruning: bool) -> ProofNet {
    normalize_with(net, pruning, |_| 0).0
}

/// Normalizes, letting `choose` pick which of the current redexes to fire.
/// Returns the normal form and the redexes fired, in order.
pub fn normalize_with(
    net: &ProofNet,
    pruning: bool,
    mut choose: impl FnMut(&[Redex]) -> usize,
) -> (ProofNet, Vec<Redex>) {
    let mut cur = net.clone();
    let mut trace = Vec::new();
    loop {
        let rs = find_redexes(&cur, pruning);
        if rs.is_empty() {
            return (cur, trace);
        }
        let r = rs[choose(&rs).min(rs.len() - 1)].clone();
        apply(&mut cur, &r).expect("freshly found redex applies");
        trace.push(r);
    }
}

/// Nodes that are not weakenings; every step lowers this count.
pub fn termination_measure(net: &ProofNet) -> usize {
    net.nodes().filter(|(_, n)| n.kind != NodeKind::Weakening).count()
}

/// Interposes a cut and an axiom on an atomic edge. Returns the new ax and cut.
///
/// The edge keeps its id and target but now leaves the axiom; a fresh edge
/// carries the old source into the cut.
pub fn ax_expand_in_place(net: &mut ProofNet, e: EdgeId) -> RewriteResult<(NodeId, NodeId)> {
    let edge = net.edge(e).ok_or(NetError::UnknownEdge(e))?.clone();
    if !edge.label.is_atomic() {
        return Err(RewriteError::NonAtomicEdge(e));
    }
    let ax = net.fresh_node_id();
    let cut = net.fresh_node_id();
    let head = reroute_head(net, e, cut);
    let dual = net.fresh_edge_id();
    net.edges_mut().insert(dual, Edge { label: edge.label.negate(), from: ax, to: Some(cut) });
    net.edges_mut().get_mut(&e).unwrap().from = ax;
    let ax_concl = if edge.label.is_positive_atom() { vec![e, dual] } else { vec![dual, e] };
    net.insert_raw_node(ax, Node { kind: NodeKind::Ax, premises: vec![], conclusions: ax_concl, cpt: None });
    net.insert_raw_node(cut, Node { kind: NodeKind::Cut, premises: vec![head, dual], conclusions: vec![], cpt: None });
    Ok((ax, cut))
}

/// Gives `e`'s source a fresh edge, with `e`'s label, ending in `cut`.
fn reroute_head(net: &mut ProofNet, e: EdgeId, cut: NodeId) -> EdgeId {
    let edge = net.edge(e).unwrap().clone();
    let head = net.fresh_edge_id();
    net.edges_mut().insert(head, Edge { label: edge.label, from: edge.from, to: Some(cut) });
    let src = net.nodes_mut().get_mut(&edge.from).unwrap();
    let slot = src.conclusions.iter().position(|c| *c == e).unwrap();
    src.conclusions[slot] = head;
    head
}

pub fn ax_expand(net: &ProofNet, e: EdgeId) -> RewriteResult<ProofNet> {
    let mut out = net.clone();
    ax_expand_in_place(&mut out, e)?;
    Ok(out)
}

/// Like [`ax_expand_in_place`] for any formula: the identity net on the
/// edge's label is synthesized from axioms, one/bot nodes, ⊗ and ⅋.
/// Returns the new cut.
pub fn expand_edge_in_place(net: &mut ProofNet, e: EdgeId) -> RewriteResult<NodeId> {
    let edge = net.edge(e).ok_or(NetError::UnknownEdge(e))?.clone();
    if edge.label.is_atomic() {
        return Ok(ax_expand_in_place(net, e)?.1);
    }
    let before: BTreeSet<EdgeId> = net.conclusions().iter().copied().collect();
    let (dual, same) = identity_net(net, &edge.label)?;
    net.conclusions_mut().retain(|c| before.contains(c));
    let cut = net.fresh_node_id();
    let head = reroute_head(net, e, cut);
    // `e` replaces the identity net's own copy of the formula
    let top = net.edge(same).unwrap().from;
    let node = net.nodes_mut().get_mut(&top).unwrap();
    let slot = node.conclusions.iter().position(|c| *c == same).unwrap();
    node.conclusions[slot] = e;
    net.edges_mut().remove(&same);
    net.edges_mut().get_mut(&e).unwrap().from = top;
    net.edges_mut().get_mut(&dual).unwrap().to = Some(cut);
    net.insert_raw_node(cut, Node { kind: NodeKind::Cut, premises: vec![head, dual], conclusions: vec![], cpt: None });
    Ok(cut)
}

/// Builds a cut-free net with pending conclusions `f⊥` and `f`.
fn identity_net(net: &mut ProofNet, f: &Formula) -> RewriteResult<(EdgeId, EdgeId)> {
    Ok(match f {
        Formula::Pos(x) => {
            let (_, p, m) = net.add_ax(x);
            (m, p)
        }
        Formula::Neg(x) => {
            let (_, p, m) = net.add_ax(x);
            (p, m)
        }
        Formula::One => (net.add_bot().1, net.add_one().1),
        Formula::Bot => (net.add_one().1, net.add_bot().1),
        Formula::Tensor(a, b) => {
            let (ad, a1) = identity_net(net, a)?;
            let (bd, b1) = identity_net(net, b)?;
            (net.add_par(ad, bd)?.1, net.add_tensor(a1, b1)?.1)
        }
        Formula::Par(a, b) => {
            let (ad, a1) = identity_net(net, a)?;
            let (bd, b1) = identity_net(net, b)?;
            (net.add_tensor(ad, bd)?.1, net.add_par(a1, b1)?.1)
        }
    })
}

/// Merges two cuts into one on a compound formula: ⅋ over `par_edges` (one
/// premise of each cut, in order) and ⊗ over the other two premises.
/// Returns the new net and its merged cut.
pub fn tensor_par_expand(
    net: &ProofNet,
    cut1: NodeId,
    cut2: NodeId,
    par_edges: (EdgeId, EdgeId),
) -> RewriteResult<(ProofNet, NodeId)> {
    let mut out = net.clone();
    let cut = tensor_par_expand_in_place(&mut out, cut1, cut2, par_edges)?;
    if !check_correctness(&out)? {
        return Err(RewriteError::WouldBreakCorrectness);
    }
    Ok((out, cut))
}

/// The unchecked form of [`tensor_par_expand`].
pub fn tensor_par_expand_in_place(
    net: &mut ProofNet,
    cut1: NodeId,
    cut2: NodeId,
    par_edges: (EdgeId, EdgeId),
) -> RewriteResult<NodeId> {
    let premises = |net: &ProofNet, c: NodeId| -> RewriteResult<Vec<EdgeId>> {
        match net.node(c) {
            Some(n) if n.kind == NodeKind::Cut => Ok(n.premises.clone()),
            _ => Err(RewriteError::BadSite(format!("{c} is not a cut"))),
        }
    };
    if cut1 == cut2 {
        return Err(RewriteError::BadSite("the two cuts must differ".to_string()));
    }
    let p1 = premises(net, cut1)?;
    let p2 = premises(net, cut2)?;
    let (b1, b2) = par_edges;
    if !p1.contains(&b1) || !p2.contains(&b2) {
        return Err(RewriteError::BadSite("par edges must be premises of the two cuts".to_string()));
    }
    let a1 = *p1.iter().find(|e| **e != b1).unwrap();
    let a2 = *p2.iter().find(|e| **e != b2).unwrap();
    for (c, ps) in [(cut1, &p1), (cut2, &p2)] {
        net.remove_node(c);
        for e in ps {
            net.edges_mut().get_mut(e).unwrap().to = None;
        }
    }
    let concl = net.conclusions_mut();
    concl.extend([a1, a2, b1, b2]);
    let (_, t) = net.add_tensor(a1, a2)?;
    let (_, p) = net.add_par(b1, b2)?;
    Ok(net.add_cut(t, p)?)
}

/// A normal net split into its atomic part and the syntax trees above it.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalDecomposition {
    /// Conclusions are the atomic subformulas of the original conclusions,
    /// left to right.
    pub atomic: ProofNet,
    /// The ⊗, ⅋, 1 and ⊥ nodes.
    pub forest: Vec<NodeId>,
}

pub fn normal_form_decompose(net: &ProofNet) -> RewriteResult<NormalDecomposition> {
    if let Some(r) = find_redexes(net, false).first() {
        return Err(RewriteError::NotNormal(format!("redex {r} remains")));
    }
    let forest: Vec<NodeId> = net
        .nodes()
        .filter(|(_, n)| matches!(n.kind, NodeKind::Tensor | NodeKind::Par | NodeKind::One | NodeKind::Bot))
        .map(|(id, _)| id)
        .collect();
    let forest_set: BTreeSet<NodeId> = forest.iter().copied().collect();
    let keep: BTreeSet<NodeId> = net.node_ids().into_iter().filter(|n| !forest_set.contains(n)).collect();
    let mut atomic = net.induced(&keep)?;
    let mut order = Vec::new();
    for c in net.conclusions() {
        atomic_leaves(net, *c, &forest_set, &mut order);
    }
    if order.len() != atomic.conclusions().len() || !atomic.is_atomic() {
        return Err(RewriteError::NotNormal("a compound edge lies outside the conclusion trees".to_string()));
    }
    atomic.set_conclusions(order);
    Ok(NormalDecomposition { atomic, forest })
}

fn atomic_leaves(net: &ProofNet, e: EdgeId, forest: &BTreeSet<NodeId>, out: &mut Vec<EdgeId>) {
    let src = source(net, e);
    if forest.contains(&src) {
        for p in net.node(src).unwrap().premises.clone() {
            atomic_leaves(net, p, forest, out);
        }
    } else {
        out.push(e);
    }
}

/// Whether a →R-normal net has the expected shape: every cut has atomic
/// premises and its positive premise comes from a box.
pub fn has_normal_shape(net: &ProofNet) -> bool {
    net.nodes().filter(|(_, n)| n.kind == NodeKind::Cut).all(|(_, n)| {
        n.premises.iter().all(|e| net.label(*e).is_atomic())
            && n.premises
                .iter()
                .filter(|e| net.label(**e).is_positive_atom())
                .all(|e| kind(net, source(net, *e)) == NodeKind::Box)
    })
}
