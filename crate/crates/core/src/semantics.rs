//! Factor semantics of Bayesian proof-nets.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cutnet::RootedCutNet;
use crate::factors::{Assignment, CostCounters, Factor, FactorError, PROB_TOL};
use crate::mll_graph::{self, NetError, NodeId, ProofNet};
use crate::rewrite::{self, Redex};

#[derive(Debug, Error)]
pub enum SemanticsError {
    #[error("not a positive Bayesian proof-net")]
    NotBayesian,
    #[error("the net is not atomic")]
    NotAtomic,
    #[error("the evidence has probability zero")]
    ZeroEvidence,
    #[error("`{0}` is not a conclusion name")]
    UnknownName(String),
    #[error("`{0}` is both a target and observed")]
    Overlap(String),
    #[error(transparent)]
    Factor(#[from] FactorError),
    #[error(transparent)]
    Net(#[from] NetError),
}

pub type SemResult<T> = Result<T, SemanticsError>;

#[derive(Debug, Clone, PartialEq)]
pub struct Interpretation {
    /// Over the conclusion names, in conclusion order.
    pub factor: Factor,
    pub counters: CostCounters,
    /// Entries of the largest table built.
    pub max_intermediate: u64,
}

fn require_positive_bpn(net: &ProofNet) -> SemResult<()> {
    if net.is_positive() && mll_graph::is_bayesian(net)? {
        Ok(())
    } else {
        Err(SemanticsError::NotBayesian)
    }
}

fn box_cpts<'a>(net: &'a ProofNet, nodes: impl IntoIterator<Item = &'a NodeId>) -> Vec<&'a Factor> {
    nodes.into_iter().filter_map(|n| net.node(*n).and_then(|n| n.cpt.as_ref())).collect()
}

fn product(fs: &[&Factor], counters: &mut CostCounters) -> SemResult<Factor> {
    Ok(match fs {
        [] => Factor::trivial(),
        [f] => (*f).clone(),
        _ => Factor::product_many_counted(fs, counters)?,
    })
}

/// Keeps `keep` (where present) and sums out everything else.
fn marginal_onto(f: &Factor, keep: &BTreeSet<String>, counters: &mut CostCounters) -> SemResult<Factor> {
    let drop: Vec<String> = f.names().filter(|n| !keep.contains(*n)).map(str::to_string).collect();
    if drop.is_empty() {
        return Ok(f.clone());
    }
    Ok(f.sum_out_counted(&drop, counters)?)
}

fn finish(net: &ProofNet, f: Factor, mut counters: CostCounters) -> SemResult<Interpretation> {
    let order = net.conclusion_name_order();
    if let Some(missing) = order.iter().find(|n| !f.contains(n)) {
        return Err(SemanticsError::UnknownName(missing.clone()));
    }
    let aligned = f.names().eq(order.iter().map(String::as_str));
    let factor = if aligned { f } else { f.reorder(&order)? };
    if !aligned {
        counters.entries_written += factor.len() as u64;
    }
    counters.observe_table(factor.len());
    Ok(Interpretation { factor, max_intermediate: counters.max_live_table, counters })
}

/// Product of every box, then one sum over the names not in the conclusions.
pub fn interpret_naive(net: &ProofNet) -> SemResult<Interpretation> {
    require_positive_bpn(net)?;
    let mut counters = CostCounters::default();
    let ids = net.node_ids();
    let joint = product(&box_cpts(net, &ids), &mut counters)?;
    counters.observe_table(joint.len());
    let f = marginal_onto(&joint, &net.conclusion_names(), &mut counters)?;
    finish(net, f, counters)
}

/// Bottom-up over the skeleton tree: each component multiplies its boxes
/// with its children's results and sums out the names that do not reach
/// its parent or the net's conclusions.
pub fn interpret_rooted(c: &RootedCutNet) -> SemResult<Interpretation> {
    let net = c.net();
    require_positive_bpn(net)?;
    let mut counters = CostCounters::default();
    let f = eval_subtree(c, c.root(), &mut counters)?;
    finish(net, f, counters)
}

fn eval_subtree(c: &RootedCutNet, comp: usize, counters: &mut CostCounters) -> SemResult<Factor> {
    let net = c.net();
    let children: Vec<Factor> =
        c.children(comp).into_iter().map(|k| eval_subtree(c, k, counters)).collect::<SemResult<_>>()?;
    let mut fs = box_cpts(net, c.component(comp));
    fs.extend(children.iter());
    let local = product(&fs, counters)?;
    let boundary = subtree_boundary(c, comp);
    marginal_onto(&local, &boundary, counters)
}

/// Names on the cuts to the parent plus conclusion names produced inside
/// the subtree.
fn subtree_boundary(c: &RootedCutNet, comp: usize) -> BTreeSet<String> {
    let net = c.net();
    let mut out = BTreeSet::new();
    for cut in c.parent_cuts(comp) {
        for e in &net.node(cut).unwrap().premises {
            out.extend(net.label(*e).names());
        }
    }
    let inside = c.subtree_nodes(comp);
    for e in net.conclusions() {
        if inside.contains(&net.edge(*e).unwrap().from) {
            out.extend(net.label(*e).names());
        }
    }
    out
}

/// Pr(targets | evidence) from the net's conclusion marginal.
pub fn query<S: AsRef<str>>(net: &ProofNet, targets: &[S], evidence: &Assignment) -> SemResult<Factor> {
    let marginal = interpret_naive(net)?.factor;
    query_from(&marginal, targets, evidence)
}

/// Bayes rule on a joint over at least `targets` and the observed names:
/// the marginal on targets and evidence, sliced, over the evidence marginal.
pub fn query_from<S: AsRef<str>>(joint: &Factor, targets: &[S], evidence: &Assignment) -> SemResult<Factor> {
    let targets: Vec<&str> = targets.iter().map(AsRef::as_ref).collect();
    for n in targets.iter().copied().chain(evidence.names()) {
        if !joint.contains(n) {
            return Err(SemanticsError::UnknownName(n.to_string()));
        }
    }
    if let Some(t) = targets.iter().find(|t| evidence.contains(t)) {
        return Err(SemanticsError::Overlap(t.to_string()));
    }
    let keep: BTreeSet<String> = targets.iter().map(|t| t.to_string()).chain(evidence.names().map(str::to_string)).collect();
    let mut scratch = CostCounters::default();
    let both = marginal_onto(joint, &keep, &mut scratch)?;
    let sliced = both.restrict(evidence)?;
    let mass = sliced.total();
    if !(mass > 0.0) {
        return Err(SemanticsError::ZeroEvidence);
    }
    Ok(sliced.normalize()?.reorder(&targets)?)
}

/// Ancestral sampling over the polarized order of the boxes.
pub struct Sampler {
    steps: Vec<(String, Factor)>,
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(net: &ProofNet, seed: u64) -> SemResult<Self> {
        if !net.is_atomic() {
            return Err(SemanticsError::NotAtomic);
        }
        require_positive_bpn(net)?;
        let dag = mll_graph::polarized_dag(net)?;
        let steps = dag
            .topological_order()
            .into_iter()
            .map(|b| (net.main_name(b).unwrap().to_string(), net.node(b).unwrap().cpt.clone().unwrap()))
            .collect();
        Ok(Sampler { steps, rng: ChaCha8Rng::seed_from_u64(seed) })
    }

    /// One joint draw of every main name.
    pub fn sample(&mut self) -> SemResult<Assignment> {
        let mut a = Assignment::new();
        for (x, cpt) in &self.steps {
            let row = cpt.restrict(&a)?;
            let var = row.var(x).ok_or_else(|| SemanticsError::UnknownName(x.clone()))?;
            let u: f64 = self.rng.gen::<f64>() * row.total();
            let mut acc = 0.0;
            let mut pick = row.len() - 1;
            for (i, p) in row.table().iter().enumerate() {
                acc += p;
                if u < acc {
                    pick = i;
                    break;
                }
            }
            a.insert(x.clone(), var.values[pick].clone());
        }
        Ok(a)
    }
}

pub fn forward_sample(net: &ProofNet, seed: u64) -> SemResult<Assignment> {
    Sampler::new(net, seed)?.sample()
}

/// Replays `steps` from `net` and compares the interpretation after each
/// one with the first.
pub fn check_invariance(net: &ProofNet, steps: &[Redex]) -> bool {
    let Ok(base) = interpret_naive(net) else { return false };
    let mut cur = net.clone();
    for r in steps {
        if rewrite::apply(&mut cur, r).is_err() {
            return false;
        }
        match interpret_naive(&cur) {
            Ok(i) if i.factor.approx_eq(&base.factor, PROB_TOL) => {}
            _ => return false,
        }
    }
    true
}
