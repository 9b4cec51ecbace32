mod common;

use std::collections::{BTreeMap, BTreeSet};

use bpn_core::bn_bridge::{bn_to_bpn, BayesianNetwork};
use bpn_core::cutnet::{
    check_proof_tree, desequentialize, partition_to_cutnet, sequentialize, split, type_cuts, ve_factorize, width,
    CutNet, CutNetError, Rule,
};
use bpn_core::mll_graph::{check_correctness, is_isomorphic};
use bpn_core::random::{random_bn, random_closed_subset, random_redex_net, random_subset};
use bpn_core::rewrite::{apply, find_redexes, normalize, RedexKind};
use bpn_core::{Factor, ProofNet, VarSpec};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn prior(x: &str) -> Factor {
    Factor::new(vec![VarSpec::binary(x)], vec![0.5, 0.5]).unwrap()
}

fn uniform(vars: &[&str]) -> Factor {
    let vs: Vec<VarSpec> = vars.iter().map(|v| VarSpec::binary(*v)).collect();
    Factor::new(vs, vec![0.5; 1 << vars.len()]).unwrap()
}

fn chain_bn(k: usize) -> BayesianNetwork {
    let names: Vec<String> = (0..k).map(|i| format!("X{i}")).collect();
    let vars = names.iter().map(|n| VarSpec::binary(n.as_str())).collect();
    let cpts = names
        .iter()
        .enumerate()
        .map(|(i, n)| match i {
            0 => (n.clone(), vec![], vec![0.3, 0.7]),
            _ => (n.clone(), vec![names[i - 1].clone()], vec![0.9, 0.1, 0.2, 0.8]),
        })
        .collect();
    BayesianNetwork::new(vars, cpts).unwrap()
}

#[test]
fn whole_net_split_is_trivial() {
    let n = bn_to_bpn(&common::rain(), &["D"]).unwrap();
    let all: BTreeSet<_> = n.node_ids().into_iter().collect();
    let c = split(&n, &all).unwrap();
    assert_eq!(c.components().len(), 1);
    assert!(c.separating_cuts().is_empty());
}

#[test]
fn splitting_off_the_root_box_adds_one_cut() {
    let n = bn_to_bpn(&common::rain(), &["D"]).unwrap();
    let r = BTreeSet::from([common::box_named(&n, "A")]);
    let c = split(&n, &r).unwrap();
    assert_eq!(c.components().len(), 2);
    assert_eq!(c.separating_cuts().len(), 1);
    let k = c.separating_cuts()[0];
    assert_eq!(c.net().label(c.net().node(k).unwrap().premises[0]).atom_name(), Some("A"));
    let fresh: BTreeSet<_> = c.separating_cuts().iter().copied().filter(|k| n.node(*k).is_none()).collect();
    assert!(is_isomorphic(&common::reduce_ax_cuts_on(c.net(), &fresh), &n));
}

#[test]
fn a_boundary_of_three_edges_gives_three_cuts() {
    // b^X feeding two consumers plus a pending conclusion
    let mut n = ProofNet::new();
    let (bx, _, x) = n.add_box(prior("X"), "X").unwrap();
    let (_, a1p, a1n) = n.add_ax("X");
    let (_, a2p, a2n) = n.add_ax("X");
    let (_, c1) = n.add_contraction(a1n, a2n).unwrap();
    let (_, a3p, a3n) = n.add_ax("X");
    let (cc, c2) = n.add_contraction(c1, a3n).unwrap();
    n.add_cut(x, c2).unwrap();
    let (_, iy, _) = n.add_box(uniform(&["X", "Y"]), "Y").unwrap();
    let (_, iz, _) = n.add_box(uniform(&["X", "Z"]), "Z").unwrap();
    n.add_cut(a1p, iy[0]).unwrap();
    n.add_cut(a2p, iz[0]).unwrap();
    let _ = a3p;
    let cut_x = n.nodes().find(|(_, k)| k.premises.contains(&x)).unwrap().0;
    let ax_ids: Vec<_> = n.nodes().filter(|(_, k)| k.kind == bpn_core::NodeKind::Ax).map(|(id, _)| id).collect();
    let mut r = BTreeSet::from([bx, cc, cut_x]);
    r.extend(ax_ids);
    r.insert(n.edge(c1).unwrap().from);
    let c = split(&n, &r).unwrap();
    assert_eq!(c.separating_cuts().len(), 2);
    assert!(check_correctness(c.net()).unwrap());
}

fn triangle() -> (ProofNet, Vec<BTreeSet<bpn_core::NodeId>>, bpn_core::NodeId) {
    let mut n = ProofNet::new();
    let (bx, _, x) = n.add_box(prior("X"), "X").unwrap();
    let (a1, a1p, a1n) = n.add_ax("X");
    let (a2, a2p, a2n) = n.add_ax("X");
    let (c, out) = n.add_contraction(a1n, a2n).unwrap();
    let k = n.add_cut(x, out).unwrap();
    let (by, iy, y) = n.add_box(uniform(&["X", "Y"]), "Y").unwrap();
    let (bz, iz, _) = n.add_box(uniform(&["X", "Y", "Z"]), "Z").unwrap();
    n.add_cut(a1p, iy[0]).unwrap();
    n.add_cut(a2p, iz[0]).unwrap();
    let yz = n.add_cut(y, iz[1]).unwrap();
    let parts = vec![BTreeSet::from([bx, a1, a2, c, k]), BTreeSet::from([by]), BTreeSet::from([bz])];
    (n, parts, yz)
}

#[test]
fn a_cyclic_skeleton_is_rejected() {
    let (n, parts, _) = triangle();
    assert!(check_correctness(&n).unwrap());
    assert!(matches!(partition_to_cutnet(n, parts), Err(CutNetError::SkeletonNotTree)));
}

#[test]
fn the_same_net_in_two_parts_is_fine() {
    let (n, parts, yz) = triangle();
    let mut rest: BTreeSet<_> = parts[1].union(&parts[2]).copied().collect();
    rest.insert(yz);
    let merged = vec![parts[0].clone(), rest];
    let c = partition_to_cutnet(n, merged).unwrap();
    assert_eq!(c.separating_cuts().len(), 2);
    assert!(!c.is_proper());
}

#[test]
fn widths() {
    let mut n = ProofNet::new();
    n.add_box(uniform(&["X", "Y"]), "Y").unwrap();
    assert_eq!(CutNet::trivial(n).unwrap().width(), 1);
    let rain = bn_to_bpn(&common::rain(), &["D"]).unwrap();
    let names = rain.names().len();
    assert_eq!(width(&CutNet::trivial(rain).unwrap()), names - 1);
}

#[test]
fn empty_order_with_everything_queried() {
    let b = common::rain();
    let n = bn_to_bpn(&b, &b.names()).unwrap();
    let rc = ve_factorize(&n, &[] as &[&str]).unwrap();
    assert_eq!(rc.cutnet().components().len(), 1);
}

#[test]
fn bad_orders() {
    let n = bn_to_bpn(&common::rain(), &["D"]).unwrap();
    assert!(matches!(ve_factorize(&n, &["D"]), Err(CutNetError::BadOrder(_))));
    assert!(matches!(ve_factorize(&n, &["Q"]), Err(CutNetError::BadOrder(_))));
    assert!(matches!(ve_factorize(&n, &["A", "A"]), Err(CutNetError::BadOrder(_))));
}

#[test]
fn chains_in_topological_order_have_width_one() {
    for k in 2..=7 {
        let b = chain_bn(k);
        let last = format!("X{}", k - 1);
        let n = bn_to_bpn(&b, &[last.as_str()]).unwrap();
        let order: Vec<String> = (0..k - 1).map(|i| format!("X{i}")).collect();
        assert_eq!(ve_factorize(&n, &order).unwrap().width(), 1, "chain of {k}");
    }
}

#[test]
fn eliminating_a_chain_from_the_middle_is_wider() {
    let b = chain_bn(4);
    let n = bn_to_bpn(&b, &["X3"]).unwrap();
    assert_eq!(ve_factorize(&n, &["X1", "X0", "X2"]).unwrap().width(), 2);
}

#[test]
fn a_proper_cut_net_is_left_alone() {
    let n = bn_to_bpn(&common::rain(), &["D"]).unwrap();
    let c = CutNet::trivial(n).unwrap();
    let t = type_cuts(&c).unwrap();
    assert!(is_isomorphic(t.net(), c.net()));
    assert_eq!(t.components(), c.components());
}

#[test]
fn a_single_box_is_one_leaf() {
    let mut n = ProofNet::new();
    n.add_box(prior("X"), "X").unwrap();
    let t = sequentialize(&CutNet::trivial(n.clone()).unwrap()).unwrap();
    assert_eq!(t.rule_count(), 1);
    assert!(matches!(t.rule, Rule::Box { .. }));
    assert!(is_isomorphic(&desequentialize(&t).unwrap(), &n));
}

#[test]
fn improper_cut_nets_are_not_sequentialized() {
    let n = bn_to_bpn(&common::rain(), &["D"]).unwrap();
    let rc = ve_factorize(&n, &["A", "B", "C"]).unwrap();
    assert!(matches!(sequentialize(rc.cutnet()), Err(CutNetError::NotProper)));
}

#[test]
fn the_typed_example_renders_as_json() {
    let n = bn_to_bpn(&common::rain(), &["D"]).unwrap();
    let rc = ve_factorize(&n, &["A", "B", "C"]).unwrap();
    let t = sequentialize(&type_cuts(rc.cutnet()).unwrap()).unwrap();
    let v = t.to_json();
    assert_eq!(v["rule"], "cut");
    assert!(t.render().lines().next().unwrap().contains("⊢ D+"));
}

/// Size of the largest merged scope in a plain elimination over the CPT
/// scopes, including the final merge of what is left.
fn scope_elimination_width(net: &ProofNet, order: &[String]) -> usize {
    let mut scopes: Vec<BTreeSet<String>> =
        net.boxes().iter().map(|b| net.node(*b).unwrap().cpt.as_ref().unwrap().name_set()).collect();
    let mut widest = 0;
    for x in order {
        let (hit, keep): (Vec<_>, Vec<_>) = scopes.into_iter().partition(|s| s.contains(x));
        let merged: BTreeSet<String> = hit.into_iter().flatten().collect();
        widest = widest.max(merged.len());
        scopes = keep;
        scopes.push(merged.into_iter().filter(|n| n != x).collect());
    }
    widest.saturating_sub(1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn split_then_reduce_returns_the_net(seed in any::<u64>(), p in 0.1f64..0.9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_bn(&mut rng, 5, 2);
        let q = random_subset(&mut rng, &b.names());
        let n = bn_to_bpn(&b, &q).unwrap();
        let r = random_closed_subset(&mut rng, &n, p);
        let Ok(c) = split(&n, &r) else { return Ok(()) };
        let fresh: BTreeSet<_> = c.separating_cuts().iter().copied().filter(|k| n.node(*k).is_none()).collect();
        prop_assert!(is_isomorphic(&common::reduce_ax_cuts_on(c.net(), &fresh), &n));
    }

    #[test]
    fn skeletons_are_trees(seed in any::<u64>()) {
        let (_, _, rc) = common::random_factorization(&mut ChaCha8Rng::seed_from_u64(seed), 2..=7);
        let c = rc.cutnet();
        let k = c.components().len();
        let sk = c.skeleton();
        prop_assert_eq!(sk.len(), k - 1);
        // dropping any one adjacency leaves exactly two pieces
        for drop in sk.keys() {
            let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for (a, b) in sk.keys().filter(|e| *e != drop) {
                adj.entry(*a).or_default().push(*b);
                adj.entry(*b).or_default().push(*a);
            }
            let mut seen = vec![false; k];
            let mut pieces = 0;
            for s in 0..k {
                if seen[s] { continue; }
                pieces += 1;
                let mut stack = vec![s];
                seen[s] = true;
                while let Some(v) = stack.pop() {
                    for w in adj.get(&v).into_iter().flatten() {
                        if !seen[*w] { seen[*w] = true; stack.push(*w); }
                    }
                }
            }
            prop_assert_eq!(pieces, 2);
        }
    }

    #[test]
    fn factorization_width_is_bounded_by_plain_elimination(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_bn(&mut rng, 6, 2);
        let q = random_subset(&mut rng, &b.names());
        let n = bn_to_bpn(&b, &q).unwrap();
        let order = bpn_core::random::random_order(&mut rng, &n);
        let rc = ve_factorize(&n, &order).unwrap();
        let net = rc.net();
        let widest = rc.cutnet().components().iter().map(|part| {
            let mut names: BTreeSet<String> = BTreeSet::new();
            for (_, e) in net.edges() {
                if part.contains(&e.from) || e.to.is_some_and(|t| part.contains(&t)) {
                    names.extend(e.label.names());
                }
            }
            for id in part {
                if let Some(c) = &net.node(*id).unwrap().cpt {
                    names.extend(c.name_set());
                }
            }
            names.len()
        }).max().unwrap();
        prop_assert_eq!(rc.width(), widest.saturating_sub(1));
        let root_names = net.names_of_nodes(rc.component(rc.root())).len();
        prop_assert!(rc.width() <= scope_elimination_width(&n, &order).max(root_names.saturating_sub(1)));
    }

    #[test]
    fn typing_round_trips(seed in any::<u64>()) {
        let (_, _, rc) = common::random_factorization(&mut ChaCha8Rng::seed_from_u64(seed), 2..=7);
        let c = rc.cutnet();
        let t = type_cuts(c).unwrap();
        prop_assert!(t.is_proper());
        prop_assert!(t.skeleton().values().all(|v| v.len() == 1));
        prop_assert!(check_correctness(t.net()).unwrap());
        let mut back = t.net().clone();
        while let Some(r) = find_redexes(&back, false).into_iter().find(|r| r.kind == RedexKind::TensorPar) {
            apply(&mut back, &r).unwrap();
        }
        prop_assert!(is_isomorphic(&back, c.net()));
        prop_assert!(is_isomorphic(&normalize(t.net(), false), &normalize(c.net(), false)));
    }

    #[test]
    fn typed_factorizations_sequentialize(seed in any::<u64>()) {
        let (_, _, rc) = common::random_factorization(&mut ChaCha8Rng::seed_from_u64(seed), 2..=6);
        let t = type_cuts(rc.cutnet()).unwrap();
        let tree = sequentialize(&t).unwrap();
        check_proof_tree(&tree).unwrap();
        prop_assert!(is_isomorphic(&desequentialize(&tree).unwrap(), t.net()));
    }

    #[test]
    fn compound_nets_sequentialize(seed in any::<u64>()) {
        let n = random_redex_net(&mut ChaCha8Rng::seed_from_u64(seed), 30);
        let tree = sequentialize(&CutNet::trivial(n.clone()).unwrap()).unwrap();
        check_proof_tree(&tree).unwrap();
        prop_assert!(is_isomorphic(&desequentialize(&tree).unwrap(), &n));
    }
}
