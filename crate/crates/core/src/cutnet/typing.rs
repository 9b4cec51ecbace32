//! Merging parallel cuts into one cut on a compound formula.
//!
//! Reductions preserve correctness, so every prefix of a merge sequence
//! that ends in a correct net is itself correct. The search below extends
//! correct prefixes depth first and backtracks on dead ends.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::{partition_to_cutnet, CutNet, CutNetError, CutNetResult};
use crate::mll_graph::{check_correctness, NodeId, ProofNet};
use crate::rewrite;

/// Correctness checks allowed before giving up.
const SEARCH_BUDGET: usize = 50_000;

type Pair = (usize, usize);

#[derive(Clone)]
struct State {
    net: ProofNet,
    comps: Vec<BTreeSet<NodeId>>,
    cuts: BTreeMap<Pair, Vec<NodeId>>,
}

/// Leaves at most one cut between each pair of adjacent components. The
/// ⅋ of each merge is tried first on the side closer to the skeleton
/// centre.
pub fn type_cuts(c: &CutNet) -> CutNetResult<CutNet> {
    if c.is_proper() {
        return Ok(c.clone());
    }
    let dist = distances(c, skeleton_centre(c));
    let start = State { net: c.net().clone(), comps: c.components().to_vec(), cuts: c.skeleton() };
    let mut budget = SEARCH_BUDGET;
    match search(start, &dist, &mut budget)? {
        Some(s) => partition_to_cutnet(s.net, s.comps),
        None => Err(CutNetError::NotCorrect),
    }
}

fn search(st: State, dist: &[usize], budget: &mut usize) -> CutNetResult<Option<State>> {
    let Some((&(a, b), cuts)) = st.cuts.iter().find(|(_, v)| v.len() > 1) else {
        return Ok(Some(st));
    };
    let preferred = if dist[b] < dist[a] { b } else { a };
    let other = if preferred == a { b } else { a };
    for i in 0..cuts.len() {
        for j in i + 1..cuts.len() {
            for par_side in [preferred, other] {
                if *budget == 0 {
                    return Ok(None);
                }
                *budget -= 1;
                let Some(next) = merge(&st, (a, b), cuts[i], cuts[j], par_side)? else { continue };
                if let Some(done) = search(next, dist, budget)? {
                    return Ok(Some(done));
                }
            }
        }
    }
    Ok(None)
}

/// One tensor/par expansion with the ⅋ in `par_side`; `None` when the
/// result is not correct.
fn merge(st: &State, pair: Pair, c1: NodeId, c2: NodeId, par_side: usize) -> CutNetResult<Option<State>> {
    let net = &st.net;
    let pick = |cut: NodeId| {
        let ps = &net.node(cut).unwrap().premises;
        *ps.iter().find(|e| st.comps[par_side].contains(&net.edge(**e).unwrap().from)).unwrap()
    };
    let mut out = net.clone();
    let k = rewrite::tensor_par_expand_in_place(&mut out, c1, c2, (pick(c1), pick(c2)))?;
    if !check_correctness(&out)? {
        return Ok(None);
    }
    let ps = out.node(k).unwrap().premises.clone();
    let tensor = out.edge(ps[0]).unwrap().from;
    let par = out.edge(ps[1]).unwrap().from;
    let tensor_side = if par_side == pair.0 { pair.1 } else { pair.0 };
    let mut next = State { net: out, comps: st.comps.clone(), cuts: st.cuts.clone() };
    next.comps[tensor_side].insert(tensor);
    next.comps[par_side].insert(par);
    let list = next.cuts.get_mut(&pair).unwrap();
    list.retain(|x| *x != c1 && *x != c2);
    list.insert(0, k);
    Ok(Some(next))
}

fn distances(c: &CutNet, from: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; c.components().len()];
    dist[from] = 0;
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        for w in c.neighbours(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// The component of least eccentricity, ties to the smaller index.
fn skeleton_centre(c: &CutNet) -> usize {
    (0..c.components().len())
        .min_by_key(|i| (distances(c, *i).into_iter().max().unwrap_or(0), *i))
        .unwrap_or(0)
}
