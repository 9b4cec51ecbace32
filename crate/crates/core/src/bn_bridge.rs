//! Bayesian networks and their translation to and from proof-nets.
//!
//! BN JSON:
//!
//! ```json
//! {"variables": [{"name": "A", "values": ["t", "f"]}],
//!  "cpts": [{"child": "A", "parents": [], "table": [0.2, 0.8]}]}
//! ```
//!
//! A table is indexed by the parents in listed order, most significant
//! first, then the child.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::factors::{Factor, FactorError, VarSpec, PROB_TOL};
use crate::mll_graph::{self, contract_balanced, EdgeId, NetError, ProofNet};
use crate::rewrite::{self, RewriteError};

#[derive(Debug, Error)]
pub enum BnError {
    #[error("unknown variable `{0}`")]
    UnknownName(String),
    #[error("variable `{0}` is declared twice")]
    DuplicateName(String),
    #[error("the parent relation has a cycle through `{0}`")]
    Cyclic(String),
    #[error("bad CPT for `{0}`: {1}")]
    BadCpt(String, String),
    #[error("not a positive Bayesian proof-net: {0}")]
    NotBayesian(String),
    #[error(transparent)]
    Factor(#[from] FactorError),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type BnResult<T> = Result<T, BnError>;

#[derive(Debug, Clone, PartialEq)]
pub struct BayesianNetwork {
    variables: Vec<VarSpec>,
    parents: BTreeMap<String, Vec<String>>,
    /// Over the parents in order, then the child.
    cpts: BTreeMap<String, Factor>,
}

#[derive(Debug, Serialize, Deserialize)]
struct BnDoc {
    variables: Vec<VarSpec>,
    cpts: Vec<CptDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CptDoc {
    child: String,
    #[serde(default)]
    parents: Vec<String>,
    table: Vec<f64>,
}

impl BayesianNetwork {
    /// Builds and validates a network. `cpts` maps each child to its parent
    /// list and table.
    pub fn new(variables: Vec<VarSpec>, cpts: Vec<(String, Vec<String>, Vec<f64>)>) -> BnResult<Self> {
        let mut by_name = BTreeMap::new();
        for v in &variables {
            v.validate()?;
            if by_name.insert(v.name.clone(), v.clone()).is_some() {
                return Err(BnError::DuplicateName(v.name.clone()));
            }
        }
        let mut parents = BTreeMap::new();
        let mut tables = BTreeMap::new();
        for (child, pa, table) in cpts {
            let spec = by_name.get(&child).ok_or_else(|| BnError::UnknownName(child.clone()))?;
            let mut vars = Vec::new();
            for p in &pa {
                vars.push(by_name.get(p).ok_or_else(|| BnError::UnknownName(p.clone()))?.clone());
            }
            vars.push(spec.clone());
            let f = Factor::new(vars, table).map_err(|e| BnError::BadCpt(child.clone(), e.to_string()))?;
            if !f.is_cpt_for(&child, PROB_TOL) {
                return Err(BnError::BadCpt(child.clone(), "rows do not sum to 1".to_string()));
            }
            if tables.insert(child.clone(), f).is_some() {
                return Err(BnError::BadCpt(child, "given twice".to_string()));
            }
            parents.insert(child, pa);
        }
        if let Some(v) = variables.iter().find(|v| !tables.contains_key(&v.name)) {
            return Err(BnError::BadCpt(v.name.clone(), "missing".to_string()));
        }
        let bn = BayesianNetwork { variables, parents, cpts: tables };
        bn.topological_order()?;
        Ok(bn)
    }

    pub fn from_json(text: &str) -> BnResult<Self> {
        let doc: BnDoc = serde_json::from_str(text)?;
        BayesianNetwork::new(doc.variables, doc.cpts.into_iter().map(|c| (c.child, c.parents, c.table)).collect())
    }

    pub fn to_json(&self) -> String {
        let doc = BnDoc {
            variables: self.variables.clone(),
            cpts: self
                .variables
                .iter()
                .map(|v| CptDoc {
                    child: v.name.clone(),
                    parents: self.parents[&v.name].clone(),
                    table: self.cpts[&v.name].table().to_vec(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("serializable")
    }

    pub fn variables(&self) -> &[VarSpec] {
        &self.variables
    }

    pub fn names(&self) -> Vec<String> {
        self.variables.iter().map(|v| v.name.clone()).collect()
    }

    pub fn parents(&self, name: &str) -> Option<&[String]> {
        self.parents.get(name).map(Vec::as_slice)
    }

    pub fn cpt(&self, name: &str) -> Option<&Factor> {
        self.cpts.get(name)
    }

    pub fn children(&self, name: &str) -> Vec<String> {
        self.variables
            .iter()
            .filter(|v| self.parents[&v.name].iter().any(|p| p == name))
            .map(|v| v.name.clone())
            .collect()
    }

    /// Arcs parent → child.
    pub fn dag(&self) -> BTreeSet<(String, String)> {
        self.parents.iter().flat_map(|(c, ps)| ps.iter().map(move |p| (p.clone(), c.clone()))).collect()
    }

    /// Variables listed parents first; ties by declaration order.
    pub fn topological_order(&self) -> BnResult<Vec<String>> {
        let mut done: BTreeSet<String> = BTreeSet::new();
        let mut out = Vec::new();
        while out.len() < self.variables.len() {
            let next = self
                .variables
                .iter()
                .find(|v| !done.contains(&v.name) && self.parents[&v.name].iter().all(|p| done.contains(p)));
            match next {
                Some(v) => {
                    done.insert(v.name.clone());
                    out.push(v.name.clone());
                }
                None => {
                    let stuck = self.variables.iter().find(|v| !done.contains(&v.name)).unwrap();
                    return Err(BnError::Cyclic(stuck.name.clone()));
                }
            }
        }
        Ok(out)
    }

    /// Same variables, parent sets and CPTs (up to `tol`).
    pub fn same_as(&self, other: &BayesianNetwork, tol: f64) -> bool {
        let mine: BTreeSet<&VarSpec> = self.variables.iter().collect();
        let theirs: BTreeSet<&VarSpec> = other.variables.iter().collect();
        mine == theirs
            && self.dag() == other.dag()
            && self.cpts.iter().all(|(k, f)| other.cpts.get(k).is_some_and(|g| f.approx_eq(g, tol)))
    }
}

/// One box per variable; each variable's output is cut against its
/// consumers (children's inputs and, if queried, a conclusion), through a
/// balanced contraction tree when there are several, or against a
/// weakening when there are none. Conclusions follow `query`.
pub fn bn_to_bpn<S: AsRef<str>>(b: &BayesianNetwork, query: &[S]) -> BnResult<ProofNet> {
    let mut q: Vec<String> = Vec::new();
    for name in query {
        let name = name.as_ref();
        if b.cpt(name).is_none() {
            return Err(BnError::UnknownName(name.to_string()));
        }
        if !q.iter().any(|x| x == name) {
            q.push(name.to_string());
        }
    }
    let order = b.topological_order()?;
    let mut net = ProofNet::new();
    let mut mains: BTreeMap<String, EdgeId> = BTreeMap::new();
    let mut inputs: BTreeMap<String, Vec<EdgeId>> = BTreeMap::new();
    for x in &order {
        let (_, ins, main) = net.add_box(b.cpts[x].clone(), x)?;
        for (p, e) in b.parents[x].iter().zip(ins) {
            inputs.entry(p.clone()).or_default().push(e);
        }
        mains.insert(x.clone(), main);
    }
    let mut outputs: BTreeMap<String, EdgeId> = BTreeMap::new();
    for x in &order {
        let main = mains[x];
        let mut consumers = inputs.remove(x).unwrap_or_default();
        let queried = q.contains(x);
        match (consumers.len(), queried) {
            (0, false) => {
                let (_, w) = net.add_weakening(x);
                net.add_cut(main, w)?;
            }
            (0, true) => {
                outputs.insert(x.clone(), main);
            }
            _ => {
                if queried {
                    let (_, pos, neg) = net.add_ax(x);
                    consumers.push(neg);
                    outputs.insert(x.clone(), pos);
                }
                let merged = contract_balanced(&mut net, &consumers)?;
                net.add_cut(main, merged)?;
            }
        }
    }
    net.set_conclusions(q.iter().map(|x| outputs[x]).collect());
    Ok(net)
}

/// Reads the network off the boxes of the normal form.
pub fn bpn_to_bn(n: &ProofNet) -> BnResult<BayesianNetwork> {
    if !n.is_positive() || !mll_graph::is_bayesian(n)? {
        return Err(BnError::NotBayesian("the net is not a positive bpn".to_string()));
    }
    let normal = rewrite::normalize(n, false);
    let atomic = rewrite::normal_form_decompose(&normal)?.atomic;
    let dag = mll_graph::polarized_dag(&atomic)?;
    let mut variables = Vec::new();
    let mut cpts = Vec::new();
    for b in dag.topological_order() {
        let x = atomic.main_name(b).expect("box has a main").to_string();
        let cpt = atomic.node(b).unwrap().cpt.clone().expect("box has a CPT");
        let parents: Vec<String> = cpt.names().filter(|v| *v != x).map(str::to_string).collect();
        let from_dag: BTreeSet<String> =
            dag.parents(b).iter().filter_map(|p| atomic.main_name(*p)).map(str::to_string).collect();
        if from_dag != parents.iter().cloned().collect::<BTreeSet<_>>() {
            return Err(BnError::NotBayesian(format!("inputs of the box for `{x}` do not match its polarized parents")));
        }
        let mut order = parents.clone();
        order.push(x.clone());
        let cpt = cpt.reorder(&order)?;
        variables.push(cpt.var(&x).unwrap().clone());
        cpts.push((x, parents, cpt.table().to_vec()));
    }
    BayesianNetwork::new(variables, cpts)
}

/// Product of all CPTs, over the variables in declaration order.
pub fn bn_joint(b: &BayesianNetwork) -> Factor {
    let fs: Vec<&Factor> = b.cpts.values().collect();
    let joint = if fs.is_empty() { Factor::trivial() } else { Factor::product_many(&fs).expect("consistent domains") };
    joint.reorder(&b.names()).expect("all variables present")
}

/// The polarized DAG of an atomic net with boxes named by their main
/// names.
pub fn net_dag_by_name(n: &ProofNet) -> BnResult<BTreeSet<(String, String)>> {
    let dag = mll_graph::polarized_dag(n)?;
    Ok(dag
        .arcs
        .iter()
        .map(|(a, b)| (n.main_name(*a).unwrap().to_string(), n.main_name(*b).unwrap().to_string()))
        .collect())
}
