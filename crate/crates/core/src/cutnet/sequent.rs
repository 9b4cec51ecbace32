//! Sequent-calculus proof trees for nets, and back.
//!
//! Rules keep the node and edge ids of the net they come from, so that
//! de-sequentializing rebuilds the same graph.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use super::{CutNet, CutNetError, CutNetResult, RootedCutNet};
use crate::factors::Factor;
use crate::mll_graph::{check_correctness, Edge, EdgeId, Formula, Node, NodeId, NodeKind, ProofNet};

#[derive(Debug, Clone, PartialEq)]
pub enum Rule {
    Box { node: NodeId, cpt: Factor },
    Ax { node: NodeId },
    One { node: NodeId },
    /// With no premise when the node is alone.
    Bot { node: NodeId, out: EdgeId },
    /// With no premise when the node is alone.
    Weakening { node: NodeId, out: EdgeId },
    Contraction { node: NodeId, left: EdgeId, right: EdgeId, out: EdgeId },
    Tensor { node: NodeId, left: EdgeId, right: EdgeId, out: EdgeId },
    Par { node: NodeId, left: EdgeId, right: EdgeId, out: EdgeId },
    Cut { node: NodeId, left: EdgeId, right: EdgeId },
    Mix,
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::Box { .. } => "box",
            Rule::Ax { .. } => "ax",
            Rule::One { .. } => "one",
            Rule::Bot { .. } => "bot",
            Rule::Weakening { .. } => "w",
            Rule::Contraction { .. } => "c",
            Rule::Tensor { .. } => "tensor",
            Rule::Par { .. } => "par",
            Rule::Cut { .. } => "cut",
            Rule::Mix => "mix",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProofTree {
    pub rule: Rule,
    /// The conclusion sequent, one entry per formula occurrence.
    pub conclusion: Vec<(EdgeId, Formula)>,
    pub premises: Vec<ProofTree>,
    /// Set on the topmost rule of each component's own derivation.
    pub component: Option<usize>,
}

impl ProofTree {
    pub fn rule_count(&self) -> usize {
        1 + self.premises.iter().map(ProofTree::rule_count).sum::<usize>()
    }

    /// The cuts joining components, with each component's derivation shown
    /// as π1, π2, … in left-to-right order.
    pub fn outline(&self) -> String {
        let mut n = 0;
        self.outline_into(&mut n)
    }

    fn outline_into(&self, n: &mut usize) -> String {
        if self.component.is_some() {
            *n += 1;
            return format!("π{n}");
        }
        match &self.rule {
            Rule::Cut { left, .. } => {
                let f = self.premises[0].formula_of(*left).map(|f| f.to_string()).unwrap_or_default();
                let l = self.premises[0].outline_into(n);
                let r = self.premises[1].outline_into(n);
                format!("cut({f}){{{l}, {r}}}")
            }
            r => {
                let inner: Vec<String> = self.premises.iter().map(|p| p.outline_into(n)).collect();
                format!("{}{{{}}}", r.name(), inner.join(", "))
            }
        }
    }

    fn formula_of(&self, e: EdgeId) -> Option<&Formula> {
        self.conclusion.iter().find(|(id, _)| *id == e).map(|(_, f)| f)
    }

    /// Indented rule list, conclusion sequents after `⊢`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(0, &mut out);
        out
    }

    fn render_into(&self, depth: usize, out: &mut String) {
        let seq: Vec<String> = self.conclusion.iter().map(|(_, f)| f.to_string()).collect();
        let _ = writeln!(out, "{}{} ⊢ {}", "  ".repeat(depth), self.rule.name(), seq.join(", "));
        for p in &self.premises {
            p.render_into(depth + 1, out);
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let seq: Vec<serde_json::Value> =
            self.conclusion.iter().map(|(e, f)| serde_json::json!({"edge": e.0, "formula": f.to_string()})).collect();
        serde_json::json!({
            "rule": self.rule.name(),
            "conclusion": seq,
            "premises": self.premises.iter().map(ProofTree::to_json).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for ProofTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Roots the derivation at the component producing the first conclusion
/// (component 0 when there is none).
pub fn sequentialize(c: &CutNet) -> CutNetResult<ProofTree> {
    let root = c
        .net()
        .conclusions()
        .first()
        .and_then(|e| c.component_of(c.net().edge(*e).unwrap().from))
        .unwrap_or(0);
    sequentialize_rooted(&RootedCutNet::new(c.clone(), root)?)
}

/// Each component is sequentialized on its own; the components are then
/// joined by cut rules along the skeleton, children before parents.
pub fn sequentialize_rooted(rc: &RootedCutNet) -> CutNetResult<ProofTree> {
    if !rc.cutnet().is_proper() {
        return Err(CutNetError::NotProper);
    }
    let net = rc.net();
    if !check_correctness(net)? {
        return Err(CutNetError::NotCorrect);
    }
    let s = Sequentializer { net };
    let mut tree = s.subtree(rc, rc.root())?;
    let order: BTreeMap<EdgeId, usize> = net.conclusions().iter().enumerate().map(|(i, e)| (*e, i)).collect();
    tree.conclusion.sort_by_key(|(e, _)| order.get(e).copied().unwrap_or(usize::MAX));
    Ok(tree)
}

struct Sequentializer<'a> {
    net: &'a ProofNet,
}

impl Sequentializer<'_> {
    fn subtree(&self, rc: &RootedCutNet, comp: usize) -> CutNetResult<ProofTree> {
        let mut acc = self.seq(rc.component(comp))?;
        acc.component = Some(comp);
        for k in rc.children(comp) {
            let cut = rc.parent_cuts(k)[0];
            let left = self.subtree(rc, k)?;
            let ps = &self.net.node(cut).unwrap().premises;
            let (l, r) = if left.formula_of(ps[0]).is_some() { (ps[0], ps[1]) } else { (ps[1], ps[0]) };
            acc = self.join(Rule::Cut { node: cut, left: l, right: r }, vec![left, acc], &[l, r], None);
        }
        Ok(acc)
    }

    /// Builds a rule whose conclusion is the premises' sequents minus
    /// `consumed`, plus `out`.
    fn join(&self, rule: Rule, premises: Vec<ProofTree>, consumed: &[EdgeId], out: Option<EdgeId>) -> ProofTree {
        let mut conclusion: Vec<(EdgeId, Formula)> = premises
            .iter()
            .flat_map(|p| p.conclusion.iter().cloned())
            .filter(|(e, _)| !consumed.contains(e))
            .collect();
        if let Some(o) = out {
            conclusion.push((o, self.net.label(o).clone()));
        }
        conclusion.sort_by_key(|(e, _)| *e);
        ProofTree { rule, conclusion, premises, component: None }
    }

    fn sequent(&self, s: &BTreeSet<NodeId>) -> Vec<(EdgeId, Formula)> {
        let mut out: Vec<(EdgeId, Formula)> = self
            .net
            .edges()
            .filter(|(_, e)| s.contains(&e.from) && !e.to.is_some_and(|t| s.contains(&t)))
            .map(|(id, e)| (id, e.label.clone()))
            .collect();
        out.sort_by_key(|(e, _)| *e);
        out
    }

    fn leaf(&self, v: NodeId) -> CutNetResult<ProofTree> {
        let n = self.net.node(v).unwrap();
        let rule = match n.kind {
            NodeKind::Box => Rule::Box { node: v, cpt: n.cpt.clone().unwrap() },
            NodeKind::Ax => Rule::Ax { node: v },
            NodeKind::One => Rule::One { node: v },
            NodeKind::Bot => Rule::Bot { node: v, out: n.conclusions[0] },
            NodeKind::Weakening => Rule::Weakening { node: v, out: n.conclusions[0] },
            k => return Err(CutNetError::NotSequentializable(format!("{v} ({k}) cannot stand alone"))),
        };
        let conclusion = n.conclusions.iter().map(|e| (*e, self.net.label(*e).clone())).collect();
        Ok(ProofTree { rule, conclusion, premises: Vec::new(), component: None })
    }

    fn out_is_terminal(&self, v: NodeId, s: &BTreeSet<NodeId>) -> bool {
        self.net.node(v).unwrap().conclusions.iter().all(|e| !self.net.edge(*e).unwrap().to.is_some_and(|t| s.contains(&t)))
    }

    fn seq(&self, s: &BTreeSet<NodeId>) -> CutNetResult<ProofTree> {
        let t = self.seq_inner(s)?;
        debug_assert_eq!(sorted(&t.conclusion), self.sequent(s));
        Ok(t)
    }

    fn seq_inner(&self, s: &BTreeSet<NodeId>) -> CutNetResult<ProofTree> {
        if s.len() == 1 {
            return self.leaf(*s.first().unwrap());
        }
        for &v in s {
            let n = self.net.node(v).unwrap();
            if !matches!(n.kind, NodeKind::Par | NodeKind::Contraction | NodeKind::Bot | NodeKind::Weakening)
                || !self.out_is_terminal(v, s)
            {
                continue;
            }
            let mut rest = s.clone();
            rest.remove(&v);
            let below = vec![self.seq(&rest)?];
            let out = n.conclusions[0];
            return Ok(match n.kind {
                NodeKind::Par => {
                    self.join(Rule::Par { node: v, left: n.premises[0], right: n.premises[1], out }, below, &n.premises, Some(out))
                }
                NodeKind::Contraction => self.join(
                    Rule::Contraction { node: v, left: n.premises[0], right: n.premises[1], out },
                    below,
                    &n.premises,
                    Some(out),
                ),
                NodeKind::Bot => self.join(Rule::Bot { node: v, out }, below, &[], Some(out)),
                _ => self.join(Rule::Weakening { node: v, out }, below, &[], Some(out)),
            });
        }
        let parts = self.connected_parts(s);
        if parts.len() > 1 {
            let first = parts[0].clone();
            let rest: BTreeSet<NodeId> = s.difference(&first).copied().collect();
            let below = vec![self.seq(&first)?, self.seq(&rest)?];
            return Ok(self.join(Rule::Mix, below, &[], None));
        }
        for &v in s {
            let n = self.net.node(v).unwrap();
            let splittable = match n.kind {
                NodeKind::Tensor => self.out_is_terminal(v, s),
                NodeKind::Cut => true,
                _ => false,
            };
            if !splittable {
                continue;
            }
            let mut rest = s.clone();
            rest.remove(&v);
            let l_src = self.net.edge(n.premises[0]).unwrap().from;
            let r_src = self.net.edge(n.premises[1]).unwrap().from;
            let left = self.reach(&rest, l_src);
            if left.contains(&r_src) {
                continue;
            }
            let right: BTreeSet<NodeId> = rest.difference(&left).copied().collect();
            let below = vec![self.seq(&left)?, self.seq(&right)?];
            let (l, r) = (n.premises[0], n.premises[1]);
            return Ok(if n.kind == NodeKind::Cut {
                self.join(Rule::Cut { node: v, left: l, right: r }, below, &n.premises, None)
            } else {
                let out = n.conclusions[0];
                self.join(Rule::Tensor { node: v, left: l, right: r, out }, below, &n.premises, Some(out))
            });
        }
        Err(CutNetError::NotSequentializable(format!("no splitting node among {} nodes", s.len())))
    }

    fn reach(&self, s: &BTreeSet<NodeId>, start: NodeId) -> BTreeSet<NodeId> {
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for e in self.net.incident(v) {
                if let Some(w) = self.net.neighbor(e, v) {
                    if s.contains(&w) && seen.insert(w) {
                        stack.push(w);
                    }
                }
            }
        }
        seen
    }

    /// Connected pieces of `s`, the one holding the smallest node first.
    fn connected_parts(&self, s: &BTreeSet<NodeId>) -> Vec<BTreeSet<NodeId>> {
        let mut left = s.clone();
        let mut out = Vec::new();
        while let Some(&v) = left.first() {
            let part = self.reach(s, v);
            left.retain(|n| !part.contains(n));
            out.push(part);
        }
        out
    }
}

fn sorted(seq: &[(EdgeId, Formula)]) -> Vec<(EdgeId, Formula)> {
    let mut v = seq.to_vec();
    v.sort();
    v
}

fn take(seq: &mut Vec<(EdgeId, Formula)>, e: EdgeId) -> Result<Formula, String> {
    match seq.iter().position(|(id, _)| *id == e) {
        Some(i) => Ok(seq.remove(i).1),
        None => Err(format!("{e} is not in the premise sequent")),
    }
}

/// Checks every rule instance: premise and conclusion sequents must match
/// the rule's shape.
pub fn check_proof_tree(t: &ProofTree) -> CutNetResult<()> {
    check_rule(t).map_err(CutNetError::IllFormed)?;
    t.premises.iter().try_for_each(check_proof_tree)
}

fn check_rule(t: &ProofTree) -> Result<(), String> {
    let name = t.rule.name();
    let arity = t.premises.len();
    let mut p: Vec<Vec<(EdgeId, Formula)>> = t.premises.iter().map(|p| p.conclusion.clone()).collect();
    let mut expect: Vec<(EdgeId, Formula)> = Vec::new();
    let concl_formula = |e: EdgeId| t.conclusion.iter().find(|(id, _)| *id == e).map(|(_, f)| f.clone());
    match &t.rule {
        Rule::Box { cpt, .. } => {
            if arity != 0 {
                return Err("box has premises".into());
            }
            let pos: Vec<&Formula> = t.conclusion.iter().map(|(_, f)| f).filter(|f| f.is_positive_atom()).collect();
            let names: BTreeSet<String> = t.conclusion.iter().filter_map(|(_, f)| f.atom_name().map(str::to_string)).collect();
            if pos.len() != 1 || !t.conclusion.iter().all(|(_, f)| f.is_atomic()) || names != cpt.name_set() {
                return Err("box conclusions do not match its CPT".into());
            }
            return Ok(());
        }
        Rule::Ax { .. } => {
            let ok = arity == 0 && t.conclusion.len() == 2 && t.conclusion[0].1.is_atomic() && t.conclusion[0].1.negate() == t.conclusion[1].1;
            return if ok { Ok(()) } else { Err("ax needs two dual atoms".into()) };
        }
        Rule::One { .. } => {
            let ok = arity == 0 && t.conclusion.len() == 1 && t.conclusion[0].1 == Formula::One;
            return if ok { Ok(()) } else { Err("one rule needs ⊢ 1".into()) };
        }
        Rule::Bot { out, .. } | Rule::Weakening { out, .. } => {
            let f = concl_formula(*out).ok_or("missing principal formula")?;
            let good = if matches!(t.rule, Rule::Bot { .. }) { f == Formula::Bot } else { f.is_negative_atom() };
            if !good || arity > 1 {
                return Err(format!("bad {name} formula"));
            }
            if arity == 1 {
                expect = p.pop().unwrap();
            }
            expect.push((*out, f));
        }
        Rule::Contraction { left, right, out, .. } | Rule::Tensor { left, right, out, .. } | Rule::Par { left, right, out, .. } => {
            let f = concl_formula(*out).ok_or("missing principal formula")?;
            let (a, b) = match (&t.rule, arity) {
                (Rule::Tensor { .. }, 2) => (take(&mut p[0], *left)?, take(&mut p[1], *right)?),
                (Rule::Tensor { .. }, _) => return Err("tensor needs two premises".into()),
                (_, 1) => (take(&mut p[0], *left)?, take(&mut p[0], *right)?),
                _ => return Err(format!("{name} needs one premise")),
            };
            let want = match t.rule {
                Rule::Tensor { .. } => Formula::tensor(a, b),
                Rule::Par { .. } => Formula::par(a, b),
                _ if a == b && a.is_negative_atom() => a,
                _ => return Err("contraction of different formulas".into()),
            };
            if want != f {
                return Err(format!("{name} concludes {f}, expected {want}"));
            }
            expect = p.concat();
            expect.push((*out, f));
        }
        Rule::Cut { left, right, .. } => {
            if arity != 2 {
                return Err("cut needs two premises".into());
            }
            let a = take(&mut p[0], *left)?;
            let b = take(&mut p[1], *right)?;
            if a.negate() != b {
                return Err(format!("cut on {a} and {b}"));
            }
            expect = p.concat();
        }
        Rule::Mix => {
            if arity != 2 {
                return Err("mix needs two premises".into());
            }
            expect = p.concat();
        }
    }
    if sorted(&expect) != sorted(&t.conclusion) {
        return Err(format!("{name}: conclusion sequent does not follow from the premises"));
    }
    Ok(())
}

/// Rebuilds the net a proof tree denotes, with the tree's ids. Conclusions
/// follow the root sequent.
pub fn desequentialize(t: &ProofTree) -> CutNetResult<ProofNet> {
    check_proof_tree(t)?;
    let mut nodes: BTreeMap<NodeId, Node> = BTreeMap::new();
    let mut edges: BTreeMap<EdgeId, Edge> = BTreeMap::new();
    collect(t, &mut nodes, &mut edges)?;
    let mut net = ProofNet::new();
    for (id, e) in edges {
        net.insert_raw_edge(id, e);
    }
    for (id, n) in nodes {
        net.insert_raw_node(id, n);
    }
    net.set_conclusions(t.conclusion.iter().map(|(e, _)| *e).collect());
    Ok(net)
}

/// Inputs in CPT order, then the main conclusion.
fn box_ports(t: &ProofTree, cpt: &Factor) -> Vec<EdgeId> {
    let mut ports: Vec<(usize, EdgeId)> = t
        .conclusion
        .iter()
        .map(|(e, f)| {
            let at = cpt.names().position(|n| Some(n) == f.atom_name()).unwrap_or(usize::MAX);
            (if f.is_positive_atom() { usize::MAX } else { at }, *e)
        })
        .collect();
    ports.sort();
    ports.into_iter().map(|(_, e)| e).collect()
}

fn collect(t: &ProofTree, nodes: &mut BTreeMap<NodeId, Node>, edges: &mut BTreeMap<EdgeId, Edge>) -> CutNetResult<()> {
    for p in &t.premises {
        collect(p, nodes, edges)?;
    }
    let label = |e: EdgeId| t.conclusion.iter().find(|(id, _)| *id == e).map(|(_, f)| f.clone()).unwrap();
    let mut attach = |e: EdgeId, to: NodeId| -> CutNetResult<()> {
        let edge = edges.get_mut(&e).ok_or_else(|| CutNetError::IllFormed(format!("{e} consumed before it is made")))?;
        edge.to = Some(to);
        Ok(())
    };
    let (node, kind, premises, conclusions, cpt) = match &t.rule {
        Rule::Mix => return Ok(()),
        Rule::Box { node, cpt } => (*node, NodeKind::Box, vec![], box_ports(t, cpt), Some(cpt.clone())),
        Rule::Ax { node } => (*node, NodeKind::Ax, vec![], t.conclusion.iter().map(|(e, _)| *e).collect(), None),
        Rule::One { node } => (*node, NodeKind::One, vec![], t.conclusion.iter().map(|(e, _)| *e).collect(), None),
        Rule::Bot { node, out } => (*node, NodeKind::Bot, vec![], vec![*out], None),
        Rule::Weakening { node, out } => (*node, NodeKind::Weakening, vec![], vec![*out], None),
        Rule::Contraction { node, left, right, out } => (*node, NodeKind::Contraction, vec![*left, *right], vec![*out], None),
        Rule::Tensor { node, left, right, out } => (*node, NodeKind::Tensor, vec![*left, *right], vec![*out], None),
        Rule::Par { node, left, right, out } => (*node, NodeKind::Par, vec![*left, *right], vec![*out], None),
        Rule::Cut { node, left, right } => (*node, NodeKind::Cut, vec![*left, *right], vec![], None),
    };
    for e in &premises {
        attach(*e, node)?;
    }
    for e in &conclusions {
        edges.insert(*e, Edge { label: label(*e), from: node, to: None });
    }
    if nodes.insert(node, Node { kind, premises, conclusions, cpt }).is_some() {
        return Err(CutNetError::IllFormed(format!("{node} introduced twice")));
    }
    Ok(())
}
