//! Net isomorphism with conclusion order fixed.
//!
//! Maximal trees of contraction nodes collapse to one vertex, so nets that
//! differ only in how a contraction tree is associated compare equal.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet};
use std::hash::{Hash, Hasher};

use super::net::{EdgeId, NodeId, NodeKind, ProofNet};

struct Shape {
    labels: Vec<String>,
    /// Directed labelled edges, as (source vertex, target vertex, label).
    arcs: Vec<(usize, usize, String)>,
}

fn shape(net: &ProofNet) -> Shape {
    // union contraction nodes joined by contraction-to-contraction edges
    let ids: Vec<NodeId> = net.node_ids();
    let pos: BTreeMap<NodeId, usize> = ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
    let mut parent: Vec<usize> = (0..ids.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let internal = |e: EdgeId| {
        let edge = net.edge(e).unwrap();
        net.kind(edge.from) == Some(NodeKind::Contraction)
            && edge.to.is_some_and(|t| net.kind(t) == Some(NodeKind::Contraction))
    };
    for (eid, e) in net.edges() {
        if internal(eid) {
            let (a, b) = (find(&mut parent, pos[&e.from]), find(&mut parent, pos[&e.to.unwrap()]));
            parent[a] = b;
        }
    }
    let mut vertex_of = vec![usize::MAX; ids.len()];
    let mut labels = Vec::new();
    for i in 0..ids.len() {
        let r = find(&mut parent, i);
        if vertex_of[r] == usize::MAX {
            vertex_of[r] = labels.len();
            labels.push(node_label(net, ids[r]));
        }
        vertex_of[i] = vertex_of[r];
    }
    let mut concl_vertex = BTreeMap::new();
    for (i, e) in net.conclusions().iter().enumerate() {
        concl_vertex.insert(*e, labels.len());
        labels.push(format!("concl#{i}"));
    }
    let mut arcs = Vec::new();
    for (eid, e) in net.edges() {
        if internal(eid) {
            continue;
        }
        let src = vertex_of[pos[&e.from]];
        let (dst, port) = match e.to {
            Some(t) => {
                let n = net.node(t).unwrap();
                let port = match n.kind {
                    NodeKind::Tensor | NodeKind::Par => {
                        format!("@{}", n.premises.iter().position(|p| *p == eid).unwrap())
                    }
                    _ => String::new(),
                };
                (vertex_of[pos[&t]], port)
            }
            None => (concl_vertex.get(&eid).copied().unwrap_or(usize::MAX), String::new()),
        };
        if dst == usize::MAX {
            continue;
        }
        arcs.push((src, dst, format!("{}{}", e.label, port)));
    }
    Shape { labels, arcs }
}

fn node_label(net: &ProofNet, id: NodeId) -> String {
    let n = net.node(id).unwrap();
    match &n.cpt {
        Some(cpt) => {
            let mut names: Vec<&str> = cpt.names().collect();
            names.sort_unstable();
            let sorted = cpt.reorder(&names).expect("own names");
            let vars: Vec<String> = sorted.vars().iter().map(|v| format!("{}{:?}", v.name, v.values)).collect();
            let bits: Vec<String> = sorted.table().iter().map(|x| format!("{:x}", x.to_bits())).collect();
            format!("box[{}][{}]", vars.join(","), bits.join(","))
        }
        None => n.kind.as_str().to_string(),
    }
}

fn h<T: Hash>(t: &T) -> u64 {
    let mut s = DefaultHasher::new();
    t.hash(&mut s);
    s.finish()
}

/// Weisfeiler-Lehman colours, refined until the partition stops splitting.
fn refine(s: &Shape) -> Vec<u64> {
    let n = s.labels.len();
    let mut colour: Vec<u64> = s.labels.iter().map(h).collect();
    let mut classes = colour.iter().collect::<BTreeSet<_>>().len();
    for _ in 0..=n {
        let mut sig: Vec<Vec<(u8, u64, u64)>> = vec![Vec::new(); n];
        for (a, b, l) in &s.arcs {
            let lh = h(l);
            sig[*a].push((0, lh, colour[*b]));
            sig[*b].push((1, lh, colour[*a]));
        }
        let next: Vec<u64> = (0..n)
            .map(|v| {
                sig[v].sort_unstable();
                h(&(colour[v], &sig[v]))
            })
            .collect();
        let c = next.iter().collect::<BTreeSet<_>>().len();
        colour = next;
        if c == classes {
            break;
        }
        classes = c;
    }
    colour
}

/// A hash invariant under isomorphism.
pub fn canonical_hash(net: &ProofNet) -> u64 {
    let s = shape(net);
    let mut colours = refine(&s);
    colours.sort_unstable();
    h(&(colours, s.arcs.len()))
}

pub fn is_isomorphic(a: &ProofNet, b: &ProofNet) -> bool {
    let (sa, sb) = (shape(a), shape(b));
    if sa.labels.len() != sb.labels.len() || sa.arcs.len() != sb.arcs.len() {
        return false;
    }
    let (ca, cb) = (refine(&sa), refine(&sb));
    let mut xa = ca.clone();
    let mut xb = cb.clone();
    xa.sort_unstable();
    xb.sort_unstable();
    if xa != xb {
        return false;
    }
    let (adj_a, adj_b) = (adj(&sa), adj(&sb));
    let mut neighbours_a: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); sa.labels.len()];
    for (x, y, _) in &sa.arcs {
        neighbours_a[*x].insert(*y);
        neighbours_a[*y].insert(*x);
    }
    // visit vertices so that each one after the first touches a visited one
    let mut order = Vec::new();
    let mut seen = vec![false; sa.labels.len()];
    let mut by_rarity: Vec<usize> = (0..sa.labels.len()).collect();
    by_rarity.sort_by_key(|v| (ca.iter().filter(|c| **c == ca[*v]).count(), *v));
    for start in by_rarity {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for w in &neighbours_a[v] {
                if !seen[*w] {
                    seen[*w] = true;
                    queue.push_back(*w);
                }
            }
        }
    }
    let ctx = Matcher { ca: &ca, cb: &cb, adj_a: &adj_a, adj_b: &adj_b, order: &order };
    let mut map = vec![usize::MAX; ca.len()];
    let mut used = vec![false; cb.len()];
    ctx.extend(0, &mut map, &mut used)
}

fn adj(s: &Shape) -> BTreeMap<(usize, usize), Vec<&str>> {
    let mut m: BTreeMap<(usize, usize), Vec<&str>> = BTreeMap::new();
    for (x, y, l) in &s.arcs {
        m.entry((*x, *y)).or_default().push(l.as_str());
    }
    for v in m.values_mut() {
        v.sort_unstable();
    }
    m
}

fn arcs_between<'a>(m: &'a BTreeMap<(usize, usize), Vec<&'a str>>, k: (usize, usize)) -> &'a [&'a str] {
    m.get(&k).map(Vec::as_slice).unwrap_or(&[])
}

struct Matcher<'a> {
    ca: &'a [u64],
    cb: &'a [u64],
    adj_a: &'a BTreeMap<(usize, usize), Vec<&'a str>>,
    adj_b: &'a BTreeMap<(usize, usize), Vec<&'a str>>,
    order: &'a [usize],
}

impl Matcher<'_> {
    fn extend(&self, k: usize, map: &mut [usize], used: &mut [bool]) -> bool {
        if k == self.order.len() {
            return true;
        }
        let v = self.order[k];
        for w in 0..self.cb.len() {
            if used[w] || self.cb[w] != self.ca[v] {
                continue;
            }
            map[v] = w;
            if self.consistent(v, map) {
                used[w] = true;
                if self.extend(k + 1, map, used) {
                    return true;
                }
                used[w] = false;
            }
            map[v] = usize::MAX;
        }
        false
    }

    fn consistent(&self, v: usize, map: &[usize]) -> bool {
        for (u, &mu) in map.iter().enumerate() {
            if mu == usize::MAX {
                continue;
            }
            let (mv, mu2) = (map[v], mu);
            if arcs_between(self.adj_a, (v, u)) != arcs_between(self.adj_b, (mv, mu2)) || arcs_between(self.adj_a, (u, v)) != arcs_between(self.adj_b, (mu2, mv))
            {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renumbered_nets_are_isomorphic() {
        let mut a = ProofNet::new();
        let (_, p, _) = a.add_ax("X");
        let (_, _, m) = a.add_ax("X");
        a.add_cut(p, m).unwrap();
        let mut b = ProofNet::new();
        b.add_weakening("Q");
        let (_, p2, _) = b.add_ax("X");
        let (_, _, m2) = b.add_ax("X");
        b.add_cut(m2, p2).unwrap();
        let qw = b.conclusions()[0];
        let qnode = b.edge(qw).unwrap().from;
        b.remove_edge(qw);
        b.remove_node(qnode);
        assert!(is_isomorphic(&a, &b));
        assert_eq!(canonical_hash(&a), canonical_hash(&b));
    }

    #[test]
    fn conclusion_order_matters() {
        let mut a = ProofNet::new();
        a.add_ax("X");
        let mut b = a.clone();
        let c = b.conclusions().to_vec();
        b.set_conclusions(vec![c[1], c[0]]);
        assert!(!is_isomorphic(&a, &b));
    }

    #[test]
    fn contraction_trees_compare_up_to_association() {
        let build = |left: bool| {
            let mut n = ProofNet::new();
            let ws: Vec<_> = (0..3).map(|_| n.add_weakening("X").1).collect();
            if left {
                let (_, c) = n.add_contraction(ws[0], ws[1]).unwrap();
                n.add_contraction(c, ws[2]).unwrap();
            } else {
                let (_, c) = n.add_contraction(ws[1], ws[2]).unwrap();
                n.add_contraction(ws[0], c).unwrap();
            }
            n
        };
        assert!(is_isomorphic(&build(true), &build(false)));
    }
}
