//! Conditional independence read off a normal net by disconnection, and a
//! brute-force probabilistic check to compare against.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::bn_bridge::{self, BayesianNetwork, BnError};
use crate::factors::{Factor, FactorError, PROB_TOL};
use crate::mll_graph::{NodeId, ProofNet};
use crate::rewrite;

#[derive(Debug, Error)]
pub enum DsepError {
    #[error("the net is not normal: {0}")]
    NotNormal(String),
    #[error("x, y and z must partition the conclusion names: {0}")]
    NotAPartition(String),
    #[error(transparent)]
    Bn(#[from] BnError),
    #[error(transparent)]
    Factor(#[from] FactorError),
}

/// Three pairwise-disjoint name sets: is x independent of y given z?
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CiQuery {
    pub x: BTreeSet<String>,
    pub y: BTreeSet<String>,
    pub z: BTreeSet<String>,
}

impl CiQuery {
    pub fn new<S: AsRef<str>>(x: &[S], y: &[S], z: &[S]) -> Self {
        let set = |v: &[S]| v.iter().map(|s| s.as_ref().to_string()).collect();
        CiQuery { x: set(x), y: set(y), z: set(z) }
    }

    fn disjoint(&self) -> Option<String> {
        let mut seen = BTreeSet::new();
        self.x.iter().chain(&self.y).chain(&self.z).find(|n| !seen.insert(*n)).cloned()
    }

    pub fn all(&self) -> BTreeSet<String> {
        self.x.iter().chain(&self.y).chain(&self.z).cloned().collect()
    }

    pub fn swapped(&self) -> CiQuery {
        CiQuery { x: self.y.clone(), y: self.x.clone(), z: self.z.clone() }
    }
}

/// Drops every edge labelled by a name of z from the atomic part and asks
/// whether some box of x still reaches a box of y, ignoring directions.
pub fn disconnected(m: &ProofNet, q: &CiQuery) -> Result<bool, DsepError> {
    if let Some(r) = rewrite::find_redexes(m, true).first() {
        return Err(DsepError::NotNormal(format!("redex {r} remains")));
    }
    if !m.is_positive() {
        return Err(DsepError::NotNormal("the net has a negative conclusion".to_string()));
    }
    if let Some(n) = q.disjoint() {
        return Err(DsepError::NotAPartition(format!("`{n}` is listed twice")));
    }
    if q.all() != m.conclusion_names() {
        return Err(DsepError::NotAPartition("the union differs from the conclusion names".to_string()));
    }
    let atomic = rewrite::normal_form_decompose(m).map_err(|e| DsepError::NotNormal(e.to_string()))?.atomic;
    let mut adj: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for (_, e) in atomic.edges() {
        let Some(t) = e.to else { continue };
        if e.label.atom_name().is_some_and(|n| q.z.contains(n)) {
            continue;
        }
        adj.entry(e.from).or_default().push(t);
        adj.entry(t).or_default().push(e.from);
    }
    let targets: BTreeSet<NodeId> = q.y.iter().filter_map(|n| atomic.box_of(n)).collect();
    let mut seen: BTreeSet<NodeId> = q.x.iter().filter_map(|n| atomic.box_of(n)).collect();
    let mut stack: Vec<NodeId> = seen.iter().copied().collect();
    while let Some(v) = stack.pop() {
        if targets.contains(&v) {
            return Ok(false);
        }
        for w in adj.get(&v).into_iter().flatten() {
            if seen.insert(*w) {
                stack.push(*w);
            }
        }
    }
    Ok(true)
}

/// Whether Pr(x, y | z) = Pr(x | z) Pr(y | z) within `tol` wherever
/// Pr(z) > 0.
pub fn ci_oracle(joint: &Factor, q: &CiQuery, tol: f64) -> Result<bool, DsepError> {
    let marg = |keep: &BTreeSet<String>| -> Result<Factor, FactorError> {
        let drop: Vec<String> = joint.names().filter(|n| !keep.contains(*n)).map(str::to_string).collect();
        joint.sum_out(&drop)
    };
    let xz: BTreeSet<String> = q.x.union(&q.z).cloned().collect();
    let yz: BTreeSet<String> = q.y.union(&q.z).cloned().collect();
    let pxyz = marg(&q.all())?;
    let (pxz, pyz, pz) = (marg(&xz)?, marg(&yz)?, marg(&q.z)?);
    for i in 0..pxyz.len() {
        let a = pxyz.assignment_at(i);
        let z = pz.value(&a.project(&pz.names().collect::<Vec<_>>())?)?;
        if !(z > 0.0) {
            continue;
        }
        let xy = pxyz.table()[i] / z;
        let x = pxz.value(&a.project(&pxz.names().collect::<Vec<_>>())?)? / z;
        let y = pyz.value(&a.project(&pyz.names().collect::<Vec<_>>())?)? / z;
        if (xy - x * y).abs() > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Graphical and probabilistic verdicts for the same question.
pub fn dsep_pipeline(b: &BayesianNetwork, q: &CiQuery) -> Result<(bool, bool), DsepError> {
    if let Some(n) = q.disjoint() {
        return Err(DsepError::NotAPartition(format!("`{n}` is listed twice")));
    }
    let query: Vec<String> = q.x.iter().chain(&q.y).chain(&q.z).cloned().collect();
    let net = bn_bridge::bn_to_bpn(b, &query)?;
    let normal = rewrite::normalize(&net, true);
    let graphical = disconnected(&normal, q)?;
    let probabilistic = ci_oracle(&bn_bridge::bn_joint(b), q, PROB_TOL)?;
    Ok((graphical, probabilistic))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factors::VarSpec;

    #[test]
    fn product_is_independent_and_copy_is_not() {
        let vars = vec![VarSpec::binary("X"), VarSpec::binary("Y")];
        let q = CiQuery::new(&["X"], &["Y"], &[]);
        let prod = Factor::new(vars.clone(), vec![0.06, 0.14, 0.24, 0.56]).unwrap();
        assert!(ci_oracle(&prod, &q, 1e-9).unwrap());
        let copy = Factor::new(vars, vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!(!ci_oracle(&copy, &q, 1e-9).unwrap());
    }
}
