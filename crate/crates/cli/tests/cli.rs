use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bpn_core::bn_bridge::{bn_joint, BayesianNetwork};
use bpn_core::random::random_bn;
use bpn_core::Assignment;
use rand::SeedableRng;
use serde_json::Value;
use tempfile::TempDir;

fn rain() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/rain.json")
}

fn bpn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bpn")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn json_table(o: &Output) -> Vec<f64> {
    let v: Value = serde_json::from_str(&stdout(o)).unwrap();
    v["table"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn posterior_matches_the_sliced_joint() {
    let o = bpn(&["query", "--bn", p(&rain()), "--target", "C", "--evidence", "D=t", "--format", "json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let got = json_table(&o);
    let b = BayesianNetwork::from_json(&std::fs::read_to_string(rain()).unwrap()).unwrap();
    let joint = bn_joint(&b);
    let mut num = [0.0; 2];
    for i in 0..joint.len() {
        let a = joint.assignment_at(i);
        if a.get("D") == Some("t") {
            num[if a.get("C") == Some("t") { 0 } else { 1 }] += joint.table()[i];
        }
    }
    let z = num[0] + num[1];
    for (g, n) in got.iter().zip(num) {
        assert!((g - n / z).abs() < 1e-8, "{got:?}");
    }
    let text = stdout(&bpn(&["query", "--bn", p(&rain()), "--target", "C", "--evidence", "D=t"]));
    assert_eq!(text, "C\nt\t0.736090226\nf\t0.263909774\n");
}

#[test]
fn naive_and_ve_queries_agree() {
    let dir = TempDir::new().unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for i in 0..8 {
        let b = random_bn(&mut rng, 5, 2);
        let path = dir.path().join(format!("bn{i}.json"));
        std::fs::write(&path, b.to_json()).unwrap();
        let args = ["query", "--bn", p(&path), "--target", "V3,V1", "--evidence", "V4=f", "--format", "json"];
        let naive = json_table(&bpn(&args));
        let mut ve_args = args.to_vec();
        ve_args.extend(["--method", "ve"]);
        let ve = json_table(&bpn(&ve_args));
        for (a, b) in naive.iter().zip(&ve) {
            assert!((a - b).abs() < 1e-8);
        }
    }
}

#[test]
fn ve_then_cost_report() {
    let dir = TempDir::new().unwrap();
    let cut = dir.path().join("ve.json");
    let o = bpn(&["ve", "--bn", p(&rain()), "--target", "D", "--order", "A,B,C", "--out", p(&cut)]);
    assert!(o.status.success());
    let report: Value = serde_json::from_str(&stdout(&bpn(&["cost-report", "--cutnet", p(&cut)]))).unwrap();
    assert_eq!(report["width"], 2);
    assert_eq!(report["max_intermediate"], 8);
    assert_eq!(report["components"], 3);
    let naive: Value = serde_json::from_str(&stdout(&bpn(&["cost-report", "--bn", p(&rain()), "--target", "D"]))).unwrap();
    assert_eq!(naive["width"], 4);
    assert_eq!(naive["max_intermediate"], 32);
}

#[test]
fn typed_cut_net_sequentializes() {
    let dir = TempDir::new().unwrap();
    let cut = dir.path().join("ve.json");
    let typed = dir.path().join("typed.json");
    bpn(&["ve", "--bn", p(&rain()), "--target", "D", "--order", "A,B,C", "--out", p(&cut)]);
    let untyped = bpn(&["sequentialize", "--cutnet", p(&cut)]);
    assert_eq!(untyped.status.code(), Some(1));
    assert!(bpn(&["type-cuts", "--cutnet", p(&cut), "--out", p(&typed)]).status.success());
    let text = stdout(&bpn(&["sequentialize", "--cutnet", p(&typed)]));
    assert!(text.starts_with("cut ⊢ D+"));
    assert!(text.contains("(B+ * C+)"));
    let o = bpn(&["sequentialize", "--cutnet", p(&typed), "--format", "json"]);
    let _: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let report: Value = serde_json::from_str(&stdout(&bpn(&["cost-report", "--cutnet", p(&typed)]))).unwrap();
    assert_eq!(report["components"], 3);
}

#[test]
fn dsep_exit_codes_follow_the_verdict() {
    let yes = bpn(&["dsep", "--bn", p(&rain()), "--x", "A", "--y", "E", "--z", "C", "--verify"]);
    assert_eq!(yes.status.code(), Some(0));
    assert_eq!(stdout(&yes), "disconnected: true\nindependent: true\n");
    let no = bpn(&["dsep", "--bn", p(&rain()), "--x", "C", "--y", "E", "--z", "A"]);
    assert_eq!(no.status.code(), Some(1));
    assert_eq!(stdout(&no), "disconnected: false\n");
}

#[test]
fn leftover_conclusions_go_to_z() {
    let dir = TempDir::new().unwrap();
    let net = dir.path().join("n.json");
    bpn(&["convert", "--bn", p(&rain()), "--query", "A,C,D,E", "--out", p(&net)]);
    let o = bpn(&["dsep", "--net", p(&net), "--x", "A", "--y", "E", "--z", "C"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
}

#[test]
fn convert_round_trips() {
    let dir = TempDir::new().unwrap();
    let net = dir.path().join("n.json");
    let back = dir.path().join("b.json");
    assert!(bpn(&["convert", "--bn", p(&rain()), "--query", "D", "--out", p(&net)]).status.success());
    assert!(bpn(&["convert", "--net", p(&net), "--out", p(&back)]).status.success());
    let a = BayesianNetwork::from_json(&std::fs::read_to_string(rain()).unwrap()).unwrap();
    let b = BayesianNetwork::from_json(&std::fs::read_to_string(back).unwrap()).unwrap();
    assert!(a.same_as(&b, 0.0));
    let o = bpn(&["check", "--net", p(&net)]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("bayesian: true"));
}

#[test]
fn ill_typed_nets_are_reported() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"nodes":[{"id":0,"kind":"tensor"}],"edges":[{"id":1,"label":"A+","from":0}]}"#).unwrap();
    let o = bpn(&["check", "--net", p(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("typed: false"));
    assert!(stdout(&o).lines().count() > 1);
    let o = bpn(&["normalize", "--net", p(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("mll_graph"));
}

#[test]
fn normalize_prunes_and_traces() {
    let dir = TempDir::new().unwrap();
    let net = dir.path().join("n.json");
    bpn(&["convert", "--bn", p(&rain()), "--query", "D", "--out", p(&net)]);
    let o = bpn(&["normalize", "--net", p(&net), "--prune", "--trace"]);
    assert!(o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.lines().next().unwrap().starts_with("box_weakening"));
    let pruned = bpn_core::mll_graph::json::from_json(&stdout(&o)).unwrap();
    assert_eq!(pruned.boxes().len(), 4);
}

#[test]
fn sampling_needs_a_seed_and_repeats_with_it() {
    let missing = bpn(&["sample", "--bn", p(&rain())]);
    assert_eq!(missing.status.code(), Some(2));
    let a = stdout(&bpn(&["sample", "--bn", p(&rain()), "--seed", "5", "--count", "20"]));
    let b = stdout(&bpn(&["sample", "--bn", p(&rain()), "--seed", "5", "--count", "20"]));
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 20);
    let row: Assignment = Assignment::from_pairs(a.lines().next().unwrap().split(',').map(|kv| {
        let (k, v) = kv.split_once('=').unwrap();
        (k.to_string(), v.to_string())
    }));
    assert_eq!(row.len(), 5);
}

#[test]
fn usage_errors_exit_with_two() {
    let bad_pair = bpn(&["query", "--bn", p(&rain()), "--target", "C", "--evidence", "D"]);
    assert_eq!(bad_pair.status.code(), Some(2));
    let both = bpn(&["query", "--bn", p(&rain()), "--net", p(&rain()), "--target", "C"]);
    assert_eq!(both.status.code(), Some(2));
    let order_without_ve = bpn(&["query", "--bn", p(&rain()), "--target", "C", "--order", "A"]);
    assert_eq!(order_without_ve.status.code(), Some(2));
}

#[test]
fn domain_errors_exit_with_one_and_name_the_module() {
    let o = bpn(&["query", "--bn", p(&rain()), "--target", "C", "--evidence", "D=maybe"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: semantics:"));
    let o = bpn(&["ve", "--bn", p(&rain()), "--target", "D", "--order", "D"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: cutnet:"));
}

#[test]
fn dot_export() {
    let o = bpn(&["export-dot", "--bn", p(&rain()), "--target", "D"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("digraph"));
    assert_eq!(text.matches("shape=box").count(), 5);
}
