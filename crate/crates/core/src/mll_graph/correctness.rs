//! Switching-cycle correctness.
//!
//! A net is correct when no switching (one premise dropped at every par and
//! contraction node) leaves a cycle. Pending edges never close a cycle and
//! are ignored.

use std::collections::{BTreeMap, BTreeSet};

use super::net::{NetError, NetResult, NodeId, ProofNet};

/// Largest number of switching nodes the exhaustive check accepts.
pub const EXHAUSTIVE_LIMIT: usize = 20;

pub fn check_correctness(net: &ProofNet) -> NetResult<bool> {
    typed(net)?;
    if net.is_atomic() {
        Ok(polarized_acyclic(net))
    } else {
        Ok(switching_acyclic(&PairedGraph::of(net)))
    }
}

/// The general check, whatever the net's labels.
pub fn check_correctness_switching(net: &ProofNet) -> NetResult<bool> {
    typed(net)?;
    Ok(switching_acyclic(&PairedGraph::of(net)))
}

/// Tries every switching.
pub fn check_correctness_exhaustive(net: &ProofNet) -> NetResult<bool> {
    typed(net)?;
    let g = PairedGraph::of(net);
    if g.pairs.len() > EXHAUSTIVE_LIMIT {
        return Err(NetError::PreconditionViolation(format!(
            "{} switching nodes exceed the exhaustive limit of {EXHAUSTIVE_LIMIT}",
            g.pairs.len()
        )));
    }
    let paired: BTreeSet<usize> = g.pairs.iter().flat_map(|p| [p.0, p.1]).collect();
    for mask in 0u32..(1u32 << g.pairs.len()) {
        let mut uf = UnionFind::new(g.n);
        for (i, &(a, b)) in g.edges.iter().enumerate() {
            if !paired.contains(&i) && !uf.union(a, b) {
                return Ok(false);
            }
        }
        for (k, p) in g.pairs.iter().enumerate() {
            let e = if mask >> k & 1 == 0 { p.0 } else { p.1 };
            let (a, b) = g.edges[e];
            if !uf.union(a, b) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Acyclicity of the polarity orientation: positive edges point from source
/// to target, negative edges the other way. Meaningful on atomic nets.
pub fn polarized_acyclic(net: &ProofNet) -> bool {
    let mut indeg: BTreeMap<NodeId, usize> = net.nodes().map(|(id, _)| (id, 0)).collect();
    let mut out: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for (a, b) in polarized_arcs(net) {
        *indeg.get_mut(&b).unwrap() += 1;
        out.entry(a).or_default().push(b);
    }
    let mut stack: Vec<NodeId> = indeg.iter().filter(|(_, d)| **d == 0).map(|(k, _)| *k).collect();
    let mut seen = 0;
    while let Some(v) = stack.pop() {
        seen += 1;
        for w in out.get(&v).into_iter().flatten() {
            let d = indeg.get_mut(w).unwrap();
            *d -= 1;
            if *d == 0 {
                stack.push(*w);
            }
        }
    }
    seen == indeg.len()
}

/// Arcs of the polarity orientation over non-pending atomic edges.
pub(crate) fn polarized_arcs(net: &ProofNet) -> Vec<(NodeId, NodeId)> {
    net.edges()
        .filter_map(|(_, e)| {
            let to = e.to?;
            if e.label.is_positive_atom() {
                Some((e.from, to))
            } else if e.label.is_negative_atom() {
                Some((to, e.from))
            } else {
                None
            }
        })
        .collect()
}

fn typed(net: &ProofNet) -> NetResult<()> {
    let v = net.check_typed_graph();
    if v.is_empty() {
        Ok(())
    } else {
        Err(NetError::IllTyped(v))
    }
}

struct PairedGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    /// Edge indices of the two premises, and the switching vertex.
    pairs: Vec<(usize, usize, usize)>,
}

impl PairedGraph {
    fn of(net: &ProofNet) -> PairedGraph {
        let index: BTreeMap<NodeId, usize> = net.nodes().enumerate().map(|(i, (id, _))| (id, i)).collect();
        let mut edges = Vec::new();
        let mut edge_ix = BTreeMap::new();
        for (eid, e) in net.edges() {
            if let Some(t) = e.to {
                edge_ix.insert(eid, edges.len());
                edges.push((index[&e.from], index[&t]));
            }
        }
        let pairs = net
            .nodes()
            .filter(|(_, n)| n.kind.is_switching())
            .map(|(id, n)| (edge_ix[&n.premises[0]], edge_ix[&n.premises[1]], index[&id]))
            .collect();
        PairedGraph { n: index.len(), edges, pairs }
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// False when `a` and `b` were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

/// Contraction-based check.
///
/// Clusters are sets of vertices known to be connected by a tree in every
/// switching. The rewriting rules merge along unpaired edges and along pairs
/// whose two edges reach the same cluster, and drop pendant clusters and
/// switching clusters that only hold their own pair. Whatever resists the
/// rules is settled by a backtracking search over the remaining pairs.
fn switching_acyclic(g: &PairedGraph) -> bool {
    let m = g.edges.len();
    let mut uf = UnionFind::new(g.n);
    let mut alive = vec![true; m];
    // pair index owning each edge, if that pair still constrains it
    let mut owner: Vec<Option<usize>> = vec![None; m];
    for (k, p) in g.pairs.iter().enumerate() {
        owner[p.0] = Some(k);
        owner[p.1] = Some(k);
    }
    loop {
        let mut changed = false;
        for e in 0..m {
            if !alive[e] {
                continue;
            }
            let (a, b) = g.edges[e];
            let (ra, rb) = (uf.find(a), uf.find(b));
            if ra == rb {
                return false;
            }
            if owner[e].is_none() {
                uf.union(ra, rb);
                alive[e] = false;
                changed = true;
            }
        }
        for &(e1, e2, s) in &g.pairs {
            if !(alive[e1] && alive[e2] && owner[e1].is_some()) {
                continue;
            }
            let rs = uf.find(s);
            let o1 = other_end(g, &mut uf, e1, rs);
            let o2 = other_end(g, &mut uf, e2, rs);
            if o1 == rs || o2 == rs {
                return false;
            }
            if o1 == o2 {
                uf.union(rs, o1);
                alive[e1] = false;
                alive[e2] = false;
                changed = true;
            }
        }
        let mut incident: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for e in (0..m).filter(|e| alive[*e]) {
            let (a, b) = g.edges[e];
            incident.entry(uf.find(a)).or_default().push(e);
            incident.entry(uf.find(b)).or_default().push(e);
        }
        for (c, es) in &incident {
            if es.iter().any(|e| !alive[*e]) {
                continue;
            }
            if es.len() == 1 {
                drop_edge(es[0], &mut alive, &mut owner, g);
                changed = true;
            } else if es.len() == 2 {
                if let (Some(k1), Some(k2)) = (owner[es[0]], owner[es[1]]) {
                    let s = g.pairs[k1].2;
                    if k1 == k2 && uf.find(s) == *c {
                        alive[es[0]] = false;
                        alive[es[1]] = false;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let rest: Vec<(usize, usize, usize)> = g
        .pairs
        .iter()
        .copied()
        .filter(|&(e1, e2, _)| alive[e1] && alive[e2] && owner[e1].is_some())
        .collect();
    if rest.is_empty() {
        return true;
    }
    let mut roots = uf;
    let residual: Vec<Choice> = rest
        .iter()
        .map(|&(e1, e2, _)| {
            let (a, b) = g.edges[e1];
            let (c, d) = g.edges[e2];
            ((roots.find(a), roots.find(b)), (roots.find(c), roots.find(d)))
        })
        .collect();
    search(&residual, 0, &mut UnionFind::new(g.n))
}

fn other_end(g: &PairedGraph, uf: &mut UnionFind, e: usize, rs: usize) -> usize {
    let (a, b) = g.edges[e];
    let (ra, rb) = (uf.find(a), uf.find(b));
    if ra == rs {
        rb
    } else {
        ra
    }
}

/// Removes an edge; its partner, if any, stops being switched.
fn drop_edge(e: usize, alive: &mut [bool], owner: &mut [Option<usize>], g: &PairedGraph) {
    alive[e] = false;
    if let Some(k) = owner[e] {
        let (e1, e2, _) = g.pairs[k];
        owner[e1] = None;
        owner[e2] = None;
    }
}

/// Two alternative edges, as endpoint pairs.
type Choice = ((usize, usize), (usize, usize));

/// True when every choice of one edge per pair stays acyclic.
fn search(pairs: &[Choice], i: usize, uf: &mut UnionFind) -> bool {
    if i == pairs.len() {
        return true;
    }
    for (a, b) in [pairs[i].0, pairs[i].1] {
        let saved = uf.parent.clone();
        if !uf.union(a, b) || !search(pairs, i + 1, uf) {
            return false;
        }
        uf.parent = saved;
    }
    true
}
