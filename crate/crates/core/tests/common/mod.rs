//! Shared fixtures and brute-force oracles.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use bpn_core::bn_bridge::BayesianNetwork;
use bpn_core::{Assignment, Factor, NodeId, NodeKind, ProofNet};

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

/// The five-variable rain network: A → B, A → C, (B, C) → D, C → E.
pub fn rain() -> BayesianNetwork {
    BayesianNetwork::from_json(&std::fs::read_to_string(data_path("rain.json")).unwrap()).unwrap()
}

/// Every joint assignment of the network's variables.
pub fn assignments(b: &BayesianNetwork) -> Vec<Assignment> {
    let mut out = vec![Assignment::new()];
    for v in b.variables() {
        out = out
            .into_iter()
            .flat_map(|a| {
                v.values.iter().map(move |x| {
                    let mut a2 = a.clone();
                    a2.insert(v.name.clone(), x.clone());
                    a2
                })
            })
            .collect();
    }
    out
}

/// Σ over the variables outside `keep` of Π_X Pr(X | Pa(X)), enumerated
/// one full assignment at a time. Keys list `keep`'s values in order.
pub fn brute_marginal(b: &BayesianNetwork, keep: &[String]) -> BTreeMap<Vec<String>, f64> {
    let mut out = BTreeMap::new();
    for a in assignments(b) {
        let mut p = 1.0;
        for v in b.variables() {
            let cpt = b.cpt(&v.name).unwrap();
            p *= cpt.value(&a).unwrap();
        }
        let key: Vec<String> = keep.iter().map(|k| a.get(k).unwrap().to_string()).collect();
        *out.entry(key).or_insert(0.0) += p;
    }
    out
}

/// Largest gap between a factor and a brute-force marginal over `keep`.
pub fn gap(f: &Factor, oracle: &BTreeMap<Vec<String>, f64>, keep: &[String]) -> f64 {
    let names: BTreeSet<String> = f.name_set();
    assert_eq!(names, keep.iter().cloned().collect::<BTreeSet<_>>(), "variable sets differ");
    let mut worst: f64 = 0.0;
    for (key, p) in oracle {
        let a = Assignment::from_pairs(keep.iter().cloned().zip(key.iter().cloned()));
        worst = worst.max((f.value(&a).unwrap() - p).abs());
    }
    worst
}

/// Boxes by main name.
pub fn box_named(n: &ProofNet, x: &str) -> NodeId {
    n.box_of(x).unwrap_or_else(|| panic!("no box for {x}"))
}

/// Kinds and main names of a node set, for readable comparisons.
pub fn describe(n: &ProofNet, set: &BTreeSet<NodeId>) -> Vec<String> {
    let mut out: Vec<String> = set
        .iter()
        .map(|id| match n.kind(*id).unwrap() {
            NodeKind::Box => format!("b^{}", n.main_name(*id).unwrap()),
            k => {
                let node = n.node(*id).unwrap();
                let e = node.conclusions.first().or(node.premises.first()).unwrap();
                format!("{}_{}", k.as_str(), n.label(*e).atom_name().unwrap_or("?"))
            }
        })
        .collect();
    out.sort();
    out
}

/// A random bpn and a factorization of it along a random order.
pub fn random_factorization<R: rand::Rng>(
    rng: &mut R,
    nodes: std::ops::RangeInclusive<usize>,
) -> (BayesianNetwork, ProofNet, bpn_core::cutnet::RootedCutNet) {
    use bpn_core::bn_bridge::bn_to_bpn;
    use bpn_core::random::{random_bn, random_order, random_subset};
    let n = rng.gen_range(nodes);
    let b = random_bn(rng, n, 3);
    let q = random_subset(rng, &b.names());
    let net = bn_to_bpn(&b, &q).unwrap();
    let order = random_order(rng, &net);
    let rc = bpn_core::cutnet::ve_factorize(&net, &order).unwrap();
    (b, net, rc)
}

/// Fires only the ax-cut redexes anchored on `cuts`, until none is left.
pub fn reduce_ax_cuts_on(net: &ProofNet, cuts: &BTreeSet<NodeId>) -> ProofNet {
    use bpn_core::rewrite::{apply, find_redexes, RedexKind};
    let mut cur = net.clone();
    loop {
        let r = find_redexes(&cur, false)
            .into_iter()
            .find(|r| r.kind == RedexKind::AxCut && cuts.contains(r.nodes.last().unwrap()));
        match r {
            Some(r) => apply(&mut cur, &r).unwrap(),
            None => return cur,
        }
    }
}
