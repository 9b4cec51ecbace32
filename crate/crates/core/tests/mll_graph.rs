mod common;

use bpn_core::bn_bridge::bn_to_bpn;
use bpn_core::mll_graph::{
    artifact_closure, check_correctness, check_correctness_exhaustive, check_correctness_switching, is_bayesian,
    jointree_check, polarized_dag, Formula,
};
use bpn_core::random::{embeds_in_positive_net, random_atomic_net, random_bn, random_redex_net, random_subset};
use bpn_core::{Factor, ProofNet, VarSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EMBED_LIMIT: usize = 1 << 16;

fn prior(x: &str) -> Factor {
    Factor::new(vec![VarSpec::binary(x)], vec![0.5, 0.5]).unwrap()
}

fn given(x: &str, parent: &str) -> Factor {
    Factor::new(vec![VarSpec::binary(parent), VarSpec::binary(x)], vec![0.5, 0.5, 0.5, 0.5]).unwrap()
}

#[test]
fn pending_negative_without_a_path_to_its_box_is_not_bayesian() {
    // b^X feeds b^Y, the lone pending X− has no positive X+ to close on
    let mut n = ProofNet::new();
    let (_, _, x) = n.add_box(prior("X"), "X").unwrap();
    let (_, ins, _) = n.add_box(given("Y", "X"), "Y").unwrap();
    n.add_cut(x, ins[0]).unwrap();
    n.add_box(given("Z", "X"), "Z").unwrap();
    assert!(check_correctness(&n).unwrap());
    assert_eq!(artifact_closure(&n).unwrap(), None);
    assert!(!is_bayesian(&n).unwrap());
    assert_eq!(embeds_in_positive_net(&n, EMBED_LIMIT), Some(false));
}

#[test]
fn pending_negative_with_a_path_is_bayesian() {
    // X+ and X− both pending; closing them turns the net positive
    let mut n = ProofNet::new();
    n.add_box(prior("X"), "X").unwrap();
    n.add_box(given("Y", "X"), "Y").unwrap();
    assert!(!n.is_positive());
    let closed = artifact_closure(&n).unwrap().unwrap();
    assert!(closed.is_positive());
    assert!(is_bayesian(&n).unwrap());
    assert_eq!(embeds_in_positive_net(&n, EMBED_LIMIT), Some(true));
}

#[test]
fn repeated_main_names_are_rejected() {
    let mut n = ProofNet::new();
    n.add_box(prior("X"), "X").unwrap();
    n.add_box(prior("X"), "X").unwrap();
    assert!(!is_bayesian(&n).unwrap());
}

#[test]
fn rain_net_has_the_jointree_property() {
    let b = common::rain();
    let n = bn_to_bpn(&b, &["D"]).unwrap();
    assert!(jointree_check(&n).unwrap());
    assert!(is_bayesian(&n).unwrap());
    let dag = polarized_dag(&n).unwrap();
    assert_eq!(dag.topological_order().len(), 5);
}

#[test]
fn compound_conclusion_labels() {
    let mut n = ProofNet::new();
    let (_, _, a) = n.add_box(prior("A"), "A").unwrap();
    let (_, _, b) = n.add_box(prior("B"), "B").unwrap();
    let (_, t) = n.add_tensor(a, b).unwrap();
    assert_eq!(n.label(t), &Formula::tensor(Formula::pos("A"), Formula::pos("B")));
    assert_eq!(n.label(t).to_string(), "(A+ * B+)");
    assert!(is_bayesian(&n).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn generated_bpns_are_jointrees(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let size = rng.gen_range(1..=8);
        let b = random_bn(&mut rng, size, 3);
        let q = random_subset(&mut rng, &b.names());
        let n = bn_to_bpn(&b, &q).unwrap();
        let mains = n.main_names();
        let distinct: std::collections::BTreeSet<&String> = mains.iter().collect();
        prop_assert_eq!(distinct.len(), mains.len());
        prop_assert_eq!(polarized_dag(&n).unwrap().topological_order().len(), n.boxes().len());
        prop_assert!(jointree_check(&n).unwrap());
        prop_assert!(is_bayesian(&n).unwrap());
    }

    #[test]
    fn artifact_test_matches_embedding_search(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = random_atomic_net(&mut rng, 12);
        let verdict = embeds_in_positive_net(&n, EMBED_LIMIT);
        prop_assume!(verdict.is_some());
        prop_assert_eq!(is_bayesian(&n).unwrap(), verdict.unwrap());
    }

    #[test]
    fn correctness_criteria_agree(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = random_redex_net(&mut rng, 14);
        let fast = check_correctness(&n).unwrap();
        prop_assert_eq!(fast, check_correctness_switching(&n).unwrap());
        if let Ok(slow) = check_correctness_exhaustive(&n) {
            prop_assert_eq!(fast, slow);
        }
    }
}
