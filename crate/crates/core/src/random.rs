//! Random instances for property tests and the acceptance suite.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::bn_bridge::{bn_to_bpn, BayesianNetwork};
use crate::factors::{Factor, VarSpec};
use crate::mll_graph::{check_correctness, Edge, EdgeId, Node, NodeId, NodeKind, ProofNet};
use crate::rewrite;

/// A binary network over `V0..V{n-1}`; each variable draws up to
/// `max_parents` parents among the earlier ones. CPT entries are bounded
/// away from zero.
pub fn random_bn<R: Rng>(rng: &mut R, n: usize, max_parents: usize) -> BayesianNetwork {
    let names: Vec<String> = (0..n).map(|i| format!("V{i}")).collect();
    let vars: Vec<VarSpec> = names.iter().map(|x| VarSpec::binary(x.as_str())).collect();
    let mut cpts = Vec::new();
    for (i, x) in names.iter().enumerate() {
        let k = rng.gen_range(0..=max_parents.min(i));
        let mut parents: Vec<String> = names[..i].choose_multiple(rng, k).cloned().collect();
        parents.shuffle(rng);
        let mut table = Vec::new();
        for _ in 0..(1usize << parents.len()) {
            let p: f64 = rng.gen_range(0.05..0.95);
            table.extend([p, 1.0 - p]);
        }
        cpts.push((x.clone(), parents, table));
    }
    BayesianNetwork::new(vars, cpts).expect("generated network is valid")
}

/// A random subset of `names` in random order.
pub fn random_subset<R: Rng>(rng: &mut R, names: &[String]) -> Vec<String> {
    let mut out: Vec<String> = names.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
    out.shuffle(rng);
    out
}

/// A non-empty random subset.
pub fn random_nonempty_subset<R: Rng>(rng: &mut R, names: &[String]) -> Vec<String> {
    loop {
        let s = random_subset(rng, names);
        if !s.is_empty() || names.is_empty() {
            return s;
        }
    }
}

/// The non-conclusion names of a net, shuffled.
pub fn random_order<R: Rng>(rng: &mut R, net: &ProofNet) -> Vec<String> {
    let concl = net.conclusion_names();
    let mut order: Vec<String> = net.names().into_iter().filter(|n| !concl.contains(n)).collect();
    order.shuffle(rng);
    order
}

/// A random premise-closed node set (a candidate sub-net).
pub fn random_closed_subset<R: Rng>(rng: &mut R, net: &ProofNet, p: f64) -> BTreeSet<NodeId> {
    let mut keep: BTreeSet<NodeId> = net.node_ids().into_iter().filter(|_| rng.gen_bool(p)).collect();
    loop {
        let missing: Vec<NodeId> = keep
            .iter()
            .flat_map(|n| net.node(*n).unwrap().premises.iter().map(|e| net.edge(*e).unwrap().from))
            .filter(|s| !keep.contains(s))
            .collect();
        if missing.is_empty() {
            return keep;
        }
        keep.extend(missing);
    }
}

/// Inserts a contraction whose other premise is a fresh weakening on a
/// negative atomic edge; the inverse of the contraction/weakening step.
pub fn cw_expand(net: &mut ProofNet, e: EdgeId) -> Option<NodeId> {
    let edge = net.edge(e)?.clone();
    if !edge.label.is_negative_atom() {
        return None;
    }
    let name = edge.label.atom_name()?.to_string();
    let (_, w) = net.add_weakening(&name);
    let c = net.fresh_node_id();
    let out = net.fresh_edge_id();
    net.insert_raw_edge(out, Edge { label: edge.label.clone(), from: c, to: edge.to });
    match edge.to {
        Some(t) => {
            let node = net.nodes_mut().get_mut(&t).unwrap();
            let slot = node.premises.iter().position(|p| *p == e).unwrap();
            node.premises[slot] = out;
        }
        None => {
            let slot = net.conclusions().iter().position(|p| *p == e).unwrap();
            net.conclusions_mut()[slot] = out;
        }
    }
    net.edges_mut().get_mut(&e).unwrap().to = Some(c);
    net.edges_mut().get_mut(&w).unwrap().to = Some(c);
    net.conclusions_mut().retain(|x| *x != w);
    net.insert_raw_node(c, Node { kind: NodeKind::Contraction, premises: vec![e, w], conclusions: vec![out], cpt: None });
    Some(c)
}

/// A positive bpn with assorted redexes: ax-expansions, merged cuts,
/// contraction/weakening pairs, one/bot cuts and weakened sinks. Stays
/// within `max_nodes` nodes.
pub fn random_redex_net<R: Rng>(rng: &mut R, max_nodes: usize) -> ProofNet {
    loop {
        let size = rng.gen_range(2..=4);
        let bn = random_bn(rng, size, 2);
        let q = random_nonempty_subset(rng, &bn.names());
        let mut net = bn_to_bpn(&bn, &q).expect("valid query");
        if net.node_count() > max_nodes {
            continue;
        }
        for _ in 0..rng.gen_range(1..=8) {
            let mut next = net.clone();
            match rng.gen_range(0..4) {
                0 => {
                    let atoms: Vec<EdgeId> = next.edges().filter(|(_, e)| e.label.is_atomic()).map(|(id, _)| id).collect();
                    let e = *atoms.choose(rng).unwrap();
                    rewrite::ax_expand_in_place(&mut next, e).expect("atomic edge");
                }
                1 => {
                    let cuts: Vec<NodeId> =
                        next.nodes().filter(|(_, n)| n.kind == NodeKind::Cut).map(|(id, _)| id).collect();
                    if cuts.len() < 2 {
                        continue;
                    }
                    let pick: Vec<NodeId> = cuts.choose_multiple(rng, 2).copied().collect();
                    let p1 = next.node(pick[0]).unwrap().premises[rng.gen_range(0..2)];
                    let p2 = next.node(pick[1]).unwrap().premises[rng.gen_range(0..2)];
                    match rewrite::tensor_par_expand(&next, pick[0], pick[1], (p1, p2)) {
                        Ok((out, _)) => next = out,
                        Err(_) => continue,
                    }
                }
                2 => {
                    let negs: Vec<EdgeId> =
                        next.edges().filter(|(_, e)| e.label.is_negative_atom()).map(|(id, _)| id).collect();
                    if let Some(e) = negs.choose(rng) {
                        cw_expand(&mut next, *e);
                    }
                }
                _ => {
                    let (_, one) = next.add_one();
                    let (_, bot) = next.add_bot();
                    next.add_cut(one, bot).expect("pending edges");
                }
            }
            if next.node_count() <= max_nodes {
                net = next;
            }
        }
        return net;
    }
}

/// A correct, well-named atomic net built from boxes, axioms and
/// weakenings joined by random cuts and contractions. Many are not
/// Bayesian.
pub fn random_atomic_net<R: Rng>(rng: &mut R, max_boxes: usize) -> ProofNet {
    let k = rng.gen_range(1..=max_boxes);
    let names: Vec<String> = (0..k + 1).map(|i| format!("N{i}")).collect();
    let mut net = ProofNet::new();
    for main in names.iter().take(k) {
        let others: Vec<&String> = names.iter().filter(|n| *n != main).collect();
        let m = rng.gen_range(0..=2.min(others.len()));
        let mut vars: Vec<VarSpec> = others.choose_multiple(rng, m).map(|n| VarSpec::binary(n.as_str())).collect();
        vars.push(VarSpec::binary(main.as_str()));
        let len = 1usize << vars.len();
        let table: Vec<f64> = (0..len / 2).flat_map(|_| [0.5, 0.5]).collect();
        net.add_box(Factor::new(vars, table).unwrap(), main).unwrap();
    }
    for _ in 0..rng.gen_range(0..=2) {
        let n = names.choose(rng).unwrap();
        net.add_ax(n);
    }
    for _ in 0..rng.gen_range(0..=1) {
        let n = names.choose(rng).unwrap();
        net.add_weakening(n);
    }
    for _ in 0..rng.gen_range(0..=3 * k) {
        let concl = net.conclusions().to_vec();
        let Some(&a) = concl.choose(rng) else { break };
        let la = net.label(a).clone();
        let contract = la.is_negative_atom() && rng.gen_bool(0.3);
        let partners: Vec<EdgeId> = concl
            .iter()
            .copied()
            .filter(|b| *b != a)
            .filter(|b| if contract { net.label(*b) == &la } else { net.label(*b) == &la.negate() })
            .collect();
        let Some(&b) = partners.choose(rng) else { continue };
        let mut next = net.clone();
        if contract {
            next.add_contraction(a, b).unwrap();
        } else {
            next.add_cut(a, b).unwrap();
        }
        if check_correctness(&next).unwrap_or(false) {
            net = next;
        }
    }
    net
}

/// Whether an atomic net embeds into a positive proof-net, by search.
///
/// Each negative conclusion X− whose name has a box inside the net must,
/// in any positive extension, be fed from that box through a positive X+
/// conclusion of the net; the search tries every such choice, contracts
/// the X− conclusions sent to the same X+, cuts, and tests correctness.
/// Names without a box get a fresh one, which never closes a cycle.
/// `None` when the search space exceeds `limit` choices.
pub fn embeds_in_positive_net(net: &ProofNet, limit: usize) -> Option<bool> {
    let mains = net.main_names();
    if mains.iter().collect::<BTreeSet<_>>().len() != mains.len() || !check_correctness(net).ok()? {
        return Some(false);
    }
    let negs: Vec<EdgeId> = net
        .conclusions()
        .iter()
        .copied()
        .filter(|e| net.label(*e).atom_name().is_some_and(|x| net.label(*e).is_negative_atom() && net.box_of(x).is_some()))
        .collect();
    let options: Vec<Vec<EdgeId>> = negs
        .iter()
        .map(|e| {
            let want = net.label(*e).negate();
            net.conclusions().iter().copied().filter(|f| net.label(*f) == &want).collect()
        })
        .collect();
    let mut space: usize = 1;
    for o in &options {
        if o.is_empty() {
            return Some(false);
        }
        space = space.saturating_mul(o.len());
    }
    if space > limit {
        return None;
    }
    let mut choice = vec![0usize; negs.len()];
    loop {
        let mut out = net.clone();
        let mut groups: Vec<(EdgeId, Vec<EdgeId>)> = Vec::new();
        for (i, e) in negs.iter().enumerate() {
            let f = options[i][choice[i]];
            match groups.iter_mut().find(|(g, _)| *g == f) {
                Some((_, v)) => v.push(*e),
                None => groups.push((f, vec![*e])),
            }
        }
        let mut ok = true;
        for (f, es) in groups {
            let mut acc = es[0];
            for e in &es[1..] {
                acc = out.add_contraction(acc, *e).expect("pending").1;
            }
            if out.add_cut(f, acc).is_err() {
                ok = false;
            }
        }
        if ok && check_correctness(&out).unwrap_or(false) {
            return Some(true);
        }
        let mut i = 0;
        loop {
            if i == choice.len() {
                return Some(false);
            }
            choice[i] += 1;
            if choice[i] < options[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}
