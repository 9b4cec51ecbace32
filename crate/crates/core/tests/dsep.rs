mod common;

use bpn_core::bn_bridge::{bn_joint, bn_to_bpn, BayesianNetwork};
use bpn_core::dsep::{ci_oracle, disconnected, dsep_pipeline, CiQuery, DsepError};
use bpn_core::random::random_bn;
use bpn_core::rewrite::normalize;
use bpn_core::{ProofNet, VarSpec};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bn(vars: &[&str], cpts: Vec<(&str, Vec<&str>, Vec<f64>)>) -> BayesianNetwork {
    BayesianNetwork::new(
        vars.iter().map(|v| VarSpec::binary(*v)).collect(),
        cpts.into_iter()
            .map(|(c, ps, t)| (c.to_string(), ps.into_iter().map(str::to_string).collect(), t))
            .collect(),
    )
    .unwrap()
}

fn chain() -> BayesianNetwork {
    bn(
        &["A", "B", "C"],
        vec![
            ("A", vec![], vec![0.3, 0.7]),
            ("B", vec!["A"], vec![0.9, 0.1, 0.2, 0.8]),
            ("C", vec!["B"], vec![0.6, 0.4, 0.15, 0.85]),
        ],
    )
}

fn collider() -> BayesianNetwork {
    bn(
        &["A", "B", "C"],
        vec![
            ("A", vec![], vec![0.3, 0.7]),
            ("B", vec![], vec![0.55, 0.45]),
            ("C", vec!["A", "B"], vec![0.9, 0.1, 0.4, 0.6, 0.35, 0.65, 0.05, 0.95]),
        ],
    )
}

fn normal_net(b: &BayesianNetwork, q: &CiQuery) -> ProofNet {
    let names: Vec<String> = q.all().into_iter().collect();
    normalize(&bn_to_bpn(b, &names).unwrap(), true)
}

/// A random split of the names into x, y and z.
fn random_partition<R: Rng>(rng: &mut R, names: &[String]) -> CiQuery {
    let mut shuffled = names.to_vec();
    shuffled.shuffle(rng);
    let (mut x, mut y, mut z) = (Vec::new(), Vec::new(), Vec::new());
    for n in shuffled {
        match rng.gen_range(0..3) {
            0 => x.push(n),
            1 => y.push(n),
            _ => z.push(n),
        }
    }
    CiQuery::new(&x, &y, &z)
}

/// Whether every undirected path between an x-variable and a y-variable in
/// the moral ancestral graph passes through z: the classical criterion,
/// kept here only as a cross-check on tiny fixtures.
fn moral_separated(b: &BayesianNetwork, q: &CiQuery) -> bool {
    let mut keep: std::collections::BTreeSet<String> = q.all();
    loop {
        let more: Vec<String> =
            keep.iter().flat_map(|v| b.parents(v).unwrap().to_vec()).filter(|p| !keep.contains(p)).collect();
        if more.is_empty() {
            break;
        }
        keep.extend(more);
    }
    let mut adj: std::collections::BTreeMap<String, Vec<String>> = Default::default();
    let mut link = |a: &String, c: &String| {
        adj.entry(a.clone()).or_default().push(c.clone());
        adj.entry(c.clone()).or_default().push(a.clone());
    };
    for v in &keep {
        let ps = b.parents(v).unwrap();
        for p in ps {
            link(p, v);
        }
        for (i, p) in ps.iter().enumerate() {
            for r in &ps[i + 1..] {
                link(p, r);
            }
        }
    }
    let mut seen: std::collections::BTreeSet<String> = q.x.clone();
    let mut stack: Vec<String> = q.x.iter().cloned().collect();
    while let Some(v) = stack.pop() {
        if q.y.contains(&v) {
            return false;
        }
        for w in adj.get(&v).into_iter().flatten() {
            if !q.z.contains(w) && seen.insert(w.clone()) {
                stack.push(w.clone());
            }
        }
    }
    true
}

#[test]
fn chain_is_cut_by_its_middle() {
    let q = CiQuery::new(&["A"], &["C"], &["B"]);
    let (graphical, probabilistic) = dsep_pipeline(&chain(), &q).unwrap();
    assert!(graphical);
    assert!(probabilistic);
    assert!(moral_separated(&chain(), &q));
    let open = CiQuery::new(&["A"], &["B", "C"], &[]);
    assert!(!dsep_pipeline(&chain(), &open).unwrap().0);
}

#[test]
fn collider_cases() {
    let b = collider();
    let marginal = CiQuery::new(&["A"], &["B"], &[]);
    assert!(ci_oracle(&bn_joint(&b), &marginal, 1e-9).unwrap());
    let given_c = CiQuery::new(&["A"], &["B"], &["C"]);
    let (graphical, probabilistic) = dsep_pipeline(&b, &given_c).unwrap();
    assert!(!graphical);
    assert!(!probabilistic);
}

#[test]
fn empty_side_is_vacuously_disconnected() {
    let q = CiQuery::new(&[] as &[&str], &["A", "C"], &["B"]);
    assert!(disconnected(&normal_net(&chain(), &q), &q).unwrap());
    assert!(disconnected(&normal_net(&chain(), &q), &q.swapped()).unwrap());
}

#[test]
fn adjacent_boxes_stay_connected() {
    let q = CiQuery::new(&["A"], &["B"], &["C"]);
    assert!(!disconnected(&normal_net(&chain(), &q), &q).unwrap());
}

#[test]
fn rain_c_and_e_given_a() {
    let b = common::rain();
    let q = CiQuery::new(&["C"], &["E"], &["A"]);
    let (graphical, probabilistic) = dsep_pipeline(&b, &q).unwrap();
    assert!(!graphical || probabilistic);
    assert_eq!(probabilistic, ci_oracle(&bn_joint(&b), &q, 1e-9).unwrap());
}

#[test]
fn rejects_overlap_and_non_partition() {
    let q = CiQuery::new(&["A"], &["A"], &["B", "C"]);
    let net = normal_net(&chain(), &CiQuery::new(&["A"], &["B"], &["C"]));
    assert!(matches!(disconnected(&net, &q), Err(DsepError::NotAPartition(_))));
    let short = CiQuery::new(&["A"], &["C"], &[]);
    assert!(matches!(disconnected(&net, &short), Err(DsepError::NotAPartition(_))));
    let raw = bn_to_bpn(&chain(), &["A", "B", "C"]).unwrap();
    let mut with_redex = raw.clone();
    let e = with_redex.conclusions()[0];
    bpn_core::rewrite::ax_expand_in_place(&mut with_redex, e).unwrap();
    let full = CiQuery::new(&["A"], &["C"], &["B"]);
    assert!(matches!(disconnected(&with_redex, &full), Err(DsepError::NotNormal(_))));
}

#[test]
fn moral_graph_agrees_with_disconnection_on_fixtures() {
    for b in [chain(), collider(), common::rain()] {
        let names = b.names();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let q = random_partition(&mut rng, &names);
            let (graphical, _) = dsep_pipeline(&b, &q).unwrap();
            if graphical {
                assert!(moral_separated(&b, &q), "{q:?}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn disconnection_is_sound(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(3..=8);
        let b = random_bn(&mut rng, n, 3);
        let q = random_partition(&mut rng, &b.names());
        let (graphical, probabilistic) = dsep_pipeline(&b, &q).unwrap();
        prop_assert!(!graphical || probabilistic);
    }

    #[test]
    fn disconnection_is_symmetric(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..=7);
        let b = random_bn(&mut rng, n, 3);
        let q = random_partition(&mut rng, &b.names());
        let net = normal_net(&b, &q);
        prop_assert_eq!(disconnected(&net, &q).unwrap(), disconnected(&net, &q.swapped()).unwrap());
    }

    #[test]
    fn more_conditioning_only_removes_paths(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(3..=7);
        let b = random_bn(&mut rng, n, 3);
        let q = random_partition(&mut rng, &b.names());
        let net = normal_net(&b, &q);
        prop_assume!(disconnected(&net, &q).unwrap());
        // move names from x or y into z; the edge set to drop only grows
        let mut x: Vec<String> = q.x.iter().cloned().collect();
        let mut y: Vec<String> = q.y.iter().cloned().collect();
        let mut z: Vec<String> = q.z.iter().cloned().collect();
        if x.len() > 1 { z.push(x.pop().unwrap()); }
        if y.len() > 1 { z.push(y.pop().unwrap()); }
        prop_assert!(disconnected(&net, &CiQuery::new(&x, &y, &z)).unwrap());
    }
}
