//! Cut-nets: a net partitioned into sub-nets joined by cuts whose skeleton
//! is a tree.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::mll_graph::{NetError, NodeId, NodeKind, ProofNet};
use crate::rewrite::{self, RewriteError};

mod sequent;
mod typing;
mod ve;

pub use sequent::{check_proof_tree, desequentialize, sequentialize, sequentialize_rooted, ProofTree, Rule};
pub use typing::type_cuts;
pub use ve::ve_factorize;

#[derive(Debug, Error)]
pub enum CutNetError {
    #[error("not a sub-net: {0}")]
    NotASubnet(String),
    #[error("the skeleton of the partition is not a tree")]
    SkeletonNotTree,
    #[error("bad partition: {0}")]
    BadPartition(String),
    #[error("bad elimination order: {0}")]
    BadOrder(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("some pair of components is joined by more than one cut")]
    NotProper,
    #[error("the net is not correct")]
    NotCorrect,
    #[error("no sequentialization found: {0}")]
    NotSequentializable(String),
    #[error("ill-formed proof tree: {0}")]
    IllFormed(String),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
}

pub type CutNetResult<T> = Result<T, CutNetError>;

#[derive(Debug, Clone)]
pub struct CutNet {
    net: ProofNet,
    components: Vec<BTreeSet<NodeId>>,
    separating_cuts: Vec<NodeId>,
    owner: BTreeMap<NodeId, usize>,
}

/// Validates a partition: every node outside the parts must be a cut
/// joining two different parts, each part must be a sub-net, and the
/// parts with the cuts between them must form a tree.
pub fn partition_to_cutnet(net: ProofNet, parts: Vec<BTreeSet<NodeId>>) -> CutNetResult<CutNet> {
    let mut owner = BTreeMap::new();
    for (i, p) in parts.iter().enumerate() {
        if p.is_empty() {
            return Err(CutNetError::BadPartition(format!("part {i} is empty")));
        }
        for n in p {
            if net.node(*n).is_none() {
                return Err(CutNetError::BadPartition(format!("{n} is not a node")));
            }
            if owner.insert(*n, i).is_some() {
                return Err(CutNetError::BadPartition(format!("{n} is in two parts")));
            }
        }
    }
    let mut separating_cuts = Vec::new();
    for (id, n) in net.nodes() {
        if owner.contains_key(&id) {
            continue;
        }
        if n.kind != NodeKind::Cut {
            return Err(CutNetError::BadPartition(format!("{id} is in no part")));
        }
        let ends: Vec<Option<usize>> =
            n.premises.iter().map(|e| owner.get(&net.edge(*e).unwrap().from).copied()).collect();
        match ends.as_slice() {
            [Some(a), Some(b)] if a != b => separating_cuts.push(id),
            _ => return Err(CutNetError::BadPartition(format!("cut {id} is in no part and does not separate"))),
        }
    }
    for p in &parts {
        net.subnet(p).map_err(|e| CutNetError::NotASubnet(e.to_string()))?;
    }
    let c = CutNet { net, components: parts, separating_cuts, owner };
    let pairs: BTreeSet<(usize, usize)> = c.separating_cuts.iter().map(|k| c.cut_ends(*k)).collect();
    if pairs.len() + 1 != c.components.len() || !c.skeleton_connected() {
        return Err(CutNetError::SkeletonNotTree);
    }
    Ok(c)
}

impl CutNet {
    /// The whole net as one component.
    pub fn trivial(net: ProofNet) -> CutNetResult<CutNet> {
        let all: BTreeSet<NodeId> = net.node_ids().into_iter().collect();
        partition_to_cutnet(net, vec![all])
    }

    pub fn net(&self) -> &ProofNet {
        &self.net
    }

    pub fn components(&self) -> &[BTreeSet<NodeId>] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &BTreeSet<NodeId> {
        &self.components[i]
    }

    pub fn separating_cuts(&self) -> &[NodeId] {
        &self.separating_cuts
    }

    pub fn component_of(&self, n: NodeId) -> Option<usize> {
        self.owner.get(&n).copied()
    }

    /// Components of the two premises of a separating cut, smaller first.
    pub fn cut_ends(&self, cut: NodeId) -> (usize, usize) {
        let n = self.net.node(cut).unwrap();
        let a = self.owner[&self.net.edge(n.premises[0]).unwrap().from];
        let b = self.owner[&self.net.edge(n.premises[1]).unwrap().from];
        (a.min(b), a.max(b))
    }

    /// Cuts between each adjacent pair, in id order.
    pub fn skeleton(&self) -> BTreeMap<(usize, usize), Vec<NodeId>> {
        let mut out: BTreeMap<(usize, usize), Vec<NodeId>> = BTreeMap::new();
        for k in &self.separating_cuts {
            out.entry(self.cut_ends(*k)).or_default().push(*k);
        }
        out
    }

    pub fn neighbours(&self, i: usize) -> Vec<usize> {
        let mut out: BTreeSet<usize> = BTreeSet::new();
        for (a, b) in self.skeleton().keys() {
            if *a == i {
                out.insert(*b);
            } else if *b == i {
                out.insert(*a);
            }
        }
        out.into_iter().collect()
    }

    fn skeleton_connected(&self) -> bool {
        let mut seen = BTreeSet::from([0]);
        let mut stack = vec![0];
        while let Some(v) = stack.pop() {
            for w in self.neighbours(v) {
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen.len() == self.components.len()
    }

    /// At most one cut between any two components.
    pub fn is_proper(&self) -> bool {
        self.skeleton().values().all(|cs| cs.len() <= 1)
    }

    /// Largest number of names met by a component, minus one.
    pub fn width(&self) -> usize {
        width(self)
    }

    pub fn into_net(self) -> ProofNet {
        self.net
    }
}

pub fn width(c: &CutNet) -> usize {
    c.components.iter().map(|p| c.net.names_of_nodes(p).len()).max().unwrap_or(0).saturating_sub(1)
}

/// A cut-net with a chosen root component.
#[derive(Debug, Clone)]
pub struct RootedCutNet {
    cutnet: CutNet,
    root: usize,
    parent: Vec<Option<usize>>,
}

impl RootedCutNet {
    pub fn new(cutnet: CutNet, root: usize) -> CutNetResult<Self> {
        if root >= cutnet.components.len() {
            return Err(CutNetError::Precondition(format!("no component {root}")));
        }
        let mut parent = vec![None; cutnet.components.len()];
        let mut seen = BTreeSet::from([root]);
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            for w in cutnet.neighbours(v) {
                if seen.insert(w) {
                    parent[w] = Some(v);
                    stack.push(w);
                }
            }
        }
        Ok(RootedCutNet { cutnet, root, parent })
    }

    pub fn cutnet(&self) -> &CutNet {
        &self.cutnet
    }

    pub fn net(&self) -> &ProofNet {
        &self.cutnet.net
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn component(&self, i: usize) -> &BTreeSet<NodeId> {
        &self.cutnet.components[i]
    }

    pub fn parent(&self, i: usize) -> Option<usize> {
        self.parent[i]
    }

    /// Children ordered by the smallest cut joining them to `i`.
    pub fn children(&self, i: usize) -> Vec<usize> {
        let mut kids: Vec<(NodeId, usize)> = (0..self.parent.len())
            .filter(|k| self.parent[*k] == Some(i))
            .map(|k| (*self.parent_cuts(k).first().unwrap(), k))
            .collect();
        kids.sort();
        kids.into_iter().map(|(_, k)| k).collect()
    }

    /// The cuts between `i` and its parent.
    pub fn parent_cuts(&self, i: usize) -> Vec<NodeId> {
        match self.parent[i] {
            None => Vec::new(),
            Some(p) => self.cutnet.skeleton().remove(&(i.min(p), i.max(p))).unwrap_or_default(),
        }
    }

    /// Nodes of every component in the subtree under `i`.
    pub fn subtree_nodes(&self, i: usize) -> BTreeSet<NodeId> {
        let mut out = self.cutnet.components[i].clone();
        for k in self.children(i) {
            out.extend(self.subtree_nodes(k));
        }
        out
    }

    pub fn reroot(&self, root: usize) -> CutNetResult<RootedCutNet> {
        RootedCutNet::new(self.cutnet.clone(), root)
    }

    pub fn width(&self) -> usize {
        width(&self.cutnet)
    }

    pub fn into_cutnet(self) -> CutNet {
        self.cutnet
    }
}

/// Detaches the atomic sub-net `r`: every edge from `r` to the rest is
/// ax-expanded so that a cut separates the two, unless it already ends in
/// a cut whose other premise comes from the rest.
pub fn split(net: &ProofNet, r: &BTreeSet<NodeId>) -> CutNetResult<CutNet> {
    let sub = net.subnet(r).map_err(|e| CutNetError::NotASubnet(e.to_string()))?;
    if !sub.is_atomic() {
        return Err(CutNetError::NotASubnet("the part is not atomic".to_string()));
    }
    let mut out = net.clone();
    let mut seps = BTreeSet::new();
    let leaving: Vec<_> = net
        .edges()
        .filter(|(_, e)| r.contains(&e.from) && e.to.is_some_and(|t| !r.contains(&t)))
        .map(|(id, e)| (id, e.to.unwrap()))
        .collect();
    for (e, t) in leaving {
        let tn = net.node(t).unwrap();
        let absorbed = tn.kind == NodeKind::Cut
            && tn.premises.iter().all(|p| *p == e || !r.contains(&net.edge(*p).unwrap().from));
        if absorbed {
            seps.insert(t);
        } else {
            let (_, cut) = rewrite::ax_expand_in_place(&mut out, e)?;
            seps.insert(cut);
        }
    }
    let rest: BTreeSet<NodeId> =
        out.node_ids().into_iter().filter(|n| !r.contains(n) && !seps.contains(n)).collect();
    let mut parts = vec![r.clone()];
    if !rest.is_empty() {
        parts.push(rest);
    }
    partition_to_cutnet(out, parts)
}
