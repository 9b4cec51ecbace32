//! Variable elimination as iterated splitting.
//!
//! The current root component holds the factors still to be combined. For
//! each name X in the order, the part of the root touching X-edges becomes
//! a new component P, and the children whose boundary mentions X move under
//! P. Interpreting P then multiplies exactly the factors that mention X and
//! sums X out.

use std::collections::BTreeSet;

use super::{partition_to_cutnet, CutNetError, CutNetResult, RootedCutNet};
use crate::mll_graph::{self, EdgeId, NodeId, NodeKind, ProofNet};
use crate::rewrite;

struct State {
    net: ProofNet,
    comps: Vec<BTreeSet<NodeId>>,
    parent: Vec<Option<usize>>,
    seps: BTreeSet<NodeId>,
    root: usize,
}

impl State {
    fn owner(&self, n: NodeId) -> Option<usize> {
        self.comps.iter().position(|c| c.contains(&n))
    }

    fn source(&self, e: EdgeId) -> NodeId {
        self.net.edge(e).unwrap().from
    }

    /// Premise of a separating cut that comes from the root side, when the
    /// cut joins `child` to the root.
    fn root_side(&self, cut: NodeId, child: usize) -> Option<EdgeId> {
        let ps = &self.net.node(cut).unwrap().premises;
        let owners: Vec<Option<usize>> = ps.iter().map(|e| self.owner(self.source(*e))).collect();
        if owners.contains(&Some(child)) && owners.contains(&Some(self.root)) {
            ps.iter().copied().find(|e| self.owner(self.source(*e)) == Some(self.root))
        } else {
            None
        }
    }

    fn child_cuts(&self, child: usize) -> Vec<(NodeId, EdgeId)> {
        self.seps.iter().filter_map(|k| self.root_side(*k, child).map(|e| (*k, e))).collect()
    }

    fn mentions(&self, child: usize, x: &str) -> bool {
        self.child_cuts(child)
            .iter()
            .any(|(k, _)| self.net.node(*k).unwrap().premises.iter().any(|e| self.net.label(*e).names().contains(x)))
    }
}

/// Splits a positive atomic bpn following the elimination order. Names
/// that are neither in the order nor in the conclusions are summed at the
/// root.
pub fn ve_factorize<S: AsRef<str>>(n: &ProofNet, order: &[S]) -> CutNetResult<RootedCutNet> {
    if !n.is_atomic() || !n.is_positive() || !mll_graph::is_bayesian(n)? {
        return Err(CutNetError::Precondition("expected a positive atomic bpn".to_string()));
    }
    let names = n.names();
    let concl = n.conclusion_names();
    let mut seen = BTreeSet::new();
    for x in order {
        let x = x.as_ref();
        if !names.contains(x) {
            return Err(CutNetError::BadOrder(format!("`{x}` does not occur in the net")));
        }
        if concl.contains(x) {
            return Err(CutNetError::BadOrder(format!("`{x}` is a conclusion name")));
        }
        if !seen.insert(x) {
            return Err(CutNetError::BadOrder(format!("`{x}` is listed twice")));
        }
    }
    let all: BTreeSet<NodeId> = n.node_ids().into_iter().collect();
    let mut st = State { net: n.clone(), comps: vec![all], parent: vec![None], seps: BTreeSet::new(), root: 0 };
    for (i, x) in order.iter().enumerate() {
        eliminate(&mut st, x.as_ref(), i + 1 == order.len())?;
    }
    let root = st.root;
    let cn = partition_to_cutnet(st.net, st.comps)?;
    RootedCutNet::new(cn, root)
}

fn eliminate(st: &mut State, x: &str, last: bool) -> CutNetResult<()> {
    let root = st.comps[st.root].clone();
    let net = &st.net;
    let touches_x = |v: NodeId| net.incident(v).any(|e| net.label(e).atom_name() == Some(x));
    let mut p: BTreeSet<NodeId> = root.iter().copied().filter(|v| touches_x(*v)).collect();
    if p.is_empty() {
        return Ok(());
    }
    let children: Vec<usize> = (0..st.comps.len()).filter(|c| st.parent[*c] == Some(st.root)).collect();
    let (kids_x, kids_other): (Vec<usize>, Vec<usize>) = children.iter().partition(|c| st.mentions(**c, x));
    close_under_cuts(net, &root, &mut p);
    // absorb plumbing nodes while that lowers the number of cuts to add
    loop {
        let base = split_cost(st, &root, &p, &kids_x, &kids_other);
        let better = root
            .iter()
            .copied()
            .filter(|v| !p.contains(v))
            .filter(|v| matches!(net.kind(*v), Some(NodeKind::Contraction | NodeKind::Cut | NodeKind::Ax)))
            .find(|v| {
                let mut q = p.clone();
                q.insert(*v);
                close_under_cuts(net, &root, &mut q);
                split_cost(st, &root, &q, &kids_x, &kids_other) < base
            });
        match better {
            Some(v) => {
                p.insert(v);
                close_under_cuts(net, &root, &mut p);
            }
            None => break,
        }
    }
    let rest: BTreeSet<NodeId> = root.difference(&p).copied().collect();
    // a last split that would leave only plumbing in the root is skipped
    let boxes_left = rest.iter().any(|v| net.kind(*v) == Some(NodeKind::Box));
    if rest.is_empty() || (last && !boxes_left) {
        return Ok(());
    }
    let mut rest = rest;
    let pending: Vec<EdgeId> = net.conclusions().iter().copied().filter(|e| p.contains(&st.source(*e))).collect();
    let crossing: Vec<(EdgeId, NodeId, NodeId)> = net
        .edges()
        .filter_map(|(id, e)| {
            let t = e.to?;
            let a = p.contains(&e.from) && rest.contains(&t);
            let b = rest.contains(&e.from) && p.contains(&t);
            (a || b).then_some((id, e.from, t))
        })
        .collect();
    let mut kid_fixes: Vec<(EdgeId, bool)> = Vec::new();
    for k in &kids_x {
        for (_, e) in st.child_cuts(*k) {
            if rest.contains(&st.source(e)) {
                kid_fixes.push((e, true));
            }
        }
    }
    for k in &kids_other {
        for (_, e) in st.child_cuts(*k) {
            if p.contains(&st.source(e)) {
                kid_fixes.push((e, false));
            }
        }
    }
    // a piece with nothing linking it to the rest stays in the root
    if crossing.is_empty() && pending.is_empty() && kid_fixes.is_empty() {
        return Ok(());
    }
    for (e, from, to) in crossing {
        if p.contains(&to) {
            let (ax, cut) = rewrite::ax_expand_in_place(&mut st.net, e)?;
            p.insert(ax);
            st.seps.insert(cut);
            continue;
        }
        let tn = st.net.node(to).unwrap();
        let other_in_rest = tn.kind == NodeKind::Cut
            && tn.premises.iter().any(|q| *q != e && rest.contains(&st.net.edge(*q).unwrap().from));
        if other_in_rest {
            rest.remove(&to);
            st.seps.insert(to);
        } else {
            debug_assert!(p.contains(&from));
            let (ax, cut) = rewrite::ax_expand_in_place(&mut st.net, e)?;
            rest.insert(ax);
            st.seps.insert(cut);
        }
    }
    for e in pending {
        let (ax, cut) = rewrite::ax_expand_in_place(&mut st.net, e)?;
        rest.insert(ax);
        st.seps.insert(cut);
    }
    for (e, into_p) in kid_fixes {
        let (ax, cut) = rewrite::ax_expand_in_place(&mut st.net, e)?;
        if into_p {
            p.insert(ax);
        } else {
            rest.insert(ax);
        }
        st.seps.insert(cut);
    }
    let root_idx = st.root;
    st.comps[root_idx] = rest;
    st.comps.push(p);
    st.parent.push(Some(root_idx));
    let new_idx = st.comps.len() - 1;
    for k in kids_x {
        st.parent[k] = Some(new_idx);
    }
    Ok(())
}

/// Adds the cuts of `within` whose two premises both come from `p`.
fn close_under_cuts(net: &ProofNet, within: &BTreeSet<NodeId>, p: &mut BTreeSet<NodeId>) {
    loop {
        let add: Vec<NodeId> = within
            .iter()
            .copied()
            .filter(|v| !p.contains(v) && net.kind(*v) == Some(NodeKind::Cut))
            .filter(|v| net.node(*v).unwrap().premises.iter().all(|e| p.contains(&net.edge(*e).unwrap().from)))
            .collect();
        if add.is_empty() {
            return;
        }
        p.extend(add);
    }
}

/// Number of cuts the split of `root` into `p` and the rest would add.
fn split_cost(st: &State, root: &BTreeSet<NodeId>, p: &BTreeSet<NodeId>, kids_x: &[usize], kids_other: &[usize]) -> usize {
    let net = &st.net;
    let mut cost = 0;
    for (_, e) in net.edges() {
        match e.to {
            Some(t) if root.contains(&t) && root.contains(&e.from) => {
                if p.contains(&e.from) != p.contains(&t) {
                    cost += 1;
                }
            }
            None if p.contains(&e.from) => cost += 1,
            _ => {}
        }
    }
    for k in kids_x {
        cost += st.child_cuts(*k).iter().filter(|(_, e)| !p.contains(&st.source(*e))).count();
    }
    for k in kids_other {
        cost += st.child_cuts(*k).iter().filter(|(_, e)| p.contains(&st.source(*e))).count();
    }
    cost
}
