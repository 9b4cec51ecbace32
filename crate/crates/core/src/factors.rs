//! Dense factor tables over finite-valued variables.
//!
//! Tables are row-major: the first listed variable is the most significant
//! digit and values are enumerated in declared order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance for probability identities.
pub const PROB_TOL: f64 = 1e-9;
/// Relative tolerance for purely algebraic identities.
pub const ALG_REL_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FactorError {
    #[error("table has {got} entries but the variables require {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("entry {index} is {value}, entries must be finite and nonnegative")]
    NegativeEntry { index: usize, value: f64 },
    #[error("variable `{0}` is listed twice")]
    DuplicateVariable(String),
    #[error("unknown variable `{0}`")]
    UnknownName(String),
    #[error("variable `{0}` occurs with different value lists")]
    ValueSetMismatch(String),
    #[error("value `{value}` is not in the domain of `{name}`")]
    UnknownValue { name: String, value: String },
    #[error("variable `{0}` has an empty or repeated value list")]
    BadDomain(String),
    #[error("assignment does not bind `{0}`")]
    Unbound(String),
    #[error("factor has zero total mass")]
    ZeroMass,
}

pub type Result<T> = std::result::Result<T, FactorError>;

/// A named variable together with its ordered value labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VarSpec {
    pub name: String,
    pub values: Vec<String>,
}

impl VarSpec {
    pub fn new(name: impl Into<String>, values: &[&str]) -> Self {
        VarSpec { name: name.into(), values: values.iter().map(|v| v.to_string()).collect() }
    }

    /// A variable over `["t", "f"]`.
    pub fn binary(name: impl Into<String>) -> Self {
        VarSpec::new(name, &["t", "f"])
    }

    pub fn card(&self) -> usize {
        self.values.len()
    }

    pub fn index_of(&self, value: &str) -> Option<usize> {
        self.values.iter().position(|v| v == value)
    }

    pub fn validate(&self) -> Result<()> {
        let distinct: BTreeSet<&String> = self.values.iter().collect();
        if self.values.is_empty() || distinct.len() != self.values.len() {
            return Err(FactorError::BadDomain(self.name.clone()));
        }
        Ok(())
    }
}

/// A partial map from variable names to value labels.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Assignment(BTreeMap<String, String>);

impl Assignment {
    pub fn new() -> Self {
        Assignment(BTreeMap::new())
    }

    pub fn from_pairs<I, K, V>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (K, V)>,
        K: Into<String>,
        V: Into<String>,
    {
        Assignment(pairs.into_iter().map(|(k, v)| (k.into(), v.into())).collect())
    }

    pub fn insert(&mut self, name: impl Into<String>, value: impl Into<String>) {
        self.0.insert(name.into(), value.into());
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.0.get(name).map(String::as_str)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Restriction of the assignment to `names`.
    pub fn project<S: AsRef<str>>(&self, names: &[S]) -> Result<Assignment> {
        let mut out = BTreeMap::new();
        for n in names {
            let n = n.as_ref();
            let v = self.0.get(n).ok_or_else(|| FactorError::UnknownName(n.to_string()))?;
            out.insert(n.to_string(), v.clone());
        }
        Ok(Assignment(out))
    }

    /// Two assignments are compatible when they agree on every common name.
    pub fn compatible(&self, other: &Assignment) -> bool {
        self.0.iter().all(|(k, v)| other.0.get(k).is_none_or(|w| w == v))
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Work accounting for one evaluation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostCounters {
    pub entries_written: u64,
    pub multiplications: u64,
    pub additions: u64,
    pub max_live_table: u64,
}

impl CostCounters {
    pub fn observe_table(&mut self, len: usize) {
        self.max_live_table = self.max_live_table.max(len as u64);
    }

    /// Sum of the three work counters.
    pub fn total_work(&self) -> u64 {
        self.entries_written + self.multiplications + self.additions
    }

    pub fn merge(&mut self, other: &CostCounters) {
        self.entries_written += other.entries_written;
        self.multiplications += other.multiplications;
        self.additions += other.additions;
        self.max_live_table = self.max_live_table.max(other.max_live_table);
    }
}

/// A nonnegative table indexed by joint assignments of `vars`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Factor {
    vars: Vec<VarSpec>,
    table: Vec<f64>,
}

fn table_len(vars: &[VarSpec]) -> usize {
    vars.iter().map(VarSpec::card).product()
}

fn check_vars(vars: &[VarSpec]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for v in vars {
        v.validate()?;
        if !seen.insert(v.name.as_str()) {
            return Err(FactorError::DuplicateVariable(v.name.clone()));
        }
    }
    Ok(())
}

/// Steps a mixed-radix counter and keeps several linear offsets in sync.
struct Odometer {
    dims: Vec<usize>,
    idx: Vec<usize>,
}

impl Odometer {
    fn new(dims: Vec<usize>) -> Self {
        let idx = vec![0; dims.len()];
        Odometer { dims, idx }
    }

    fn step(&mut self, offsets: &mut [usize], strides: &[Vec<usize>]) {
        let mut d = self.dims.len();
        while d > 0 {
            d -= 1;
            self.idx[d] += 1;
            for (off, s) in offsets.iter_mut().zip(strides) {
                *off += s[d];
            }
            if self.idx[d] < self.dims[d] {
                return;
            }
            for (off, s) in offsets.iter_mut().zip(strides) {
                *off -= s[d] * self.dims[d];
            }
            self.idx[d] = 0;
        }
    }
}

impl Factor {
    pub fn new(vars: Vec<VarSpec>, table: Vec<f64>) -> Result<Factor> {
        check_vars(&vars)?;
        let expected = table_len(&vars);
        if table.len() != expected {
            return Err(FactorError::LengthMismatch { expected, got: table.len() });
        }
        if let Some((index, &value)) = table.iter().enumerate().find(|(_, x)| !(x.is_finite() && **x >= 0.0)) {
            return Err(FactorError::NegativeEntry { index, value });
        }
        Ok(Factor { vars, table })
    }

    pub fn new_counted(vars: Vec<VarSpec>, table: Vec<f64>, counters: &mut CostCounters) -> Result<Factor> {
        let f = Factor::new(vars, table)?;
        counters.entries_written += f.table.len() as u64;
        counters.observe_table(f.table.len());
        Ok(f)
    }

    /// The factor sending every tuple of `vars` to 1.
    pub fn unit(vars: Vec<VarSpec>) -> Result<Factor> {
        check_vars(&vars)?;
        let n = table_len(&vars);
        Ok(Factor { vars, table: vec![1.0; n] })
    }

    /// The unit over no variables.
    pub fn trivial() -> Factor {
        Factor { vars: Vec::new(), table: vec![1.0] }
    }

    pub fn scalar(x: f64) -> Result<Factor> {
        Factor::new(Vec::new(), vec![x])
    }

    pub fn vars(&self) -> &[VarSpec] {
        &self.vars
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.vars.iter().map(|v| v.name.as_str())
    }

    pub fn name_set(&self) -> BTreeSet<String> {
        self.vars.iter().map(|v| v.name.clone()).collect()
    }

    pub fn var(&self, name: &str) -> Option<&VarSpec> {
        self.vars.iter().find(|v| v.name == name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.var(name).is_some()
    }

    fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.vars.len()];
        for i in (0..self.vars.len().saturating_sub(1)).rev() {
            s[i] = s[i + 1] * self.vars[i + 1].card();
        }
        s
    }

    fn stride_of(&self, name: &str) -> Option<usize> {
        let pos = self.vars.iter().position(|v| v.name == name)?;
        Some(self.strides()[pos])
    }

    pub fn total(&self) -> f64 {
        self.table.iter().sum()
    }

    /// Table position of a full assignment of this factor's variables.
    pub fn index_of(&self, a: &Assignment) -> Result<usize> {
        let strides = self.strides();
        let mut idx = 0;
        for (v, s) in self.vars.iter().zip(strides) {
            let val = a.get(&v.name).ok_or_else(|| FactorError::Unbound(v.name.clone()))?;
            let k = v
                .index_of(val)
                .ok_or_else(|| FactorError::UnknownValue { name: v.name.clone(), value: val.to_string() })?;
            idx += k * s;
        }
        Ok(idx)
    }

    pub fn value(&self, a: &Assignment) -> Result<f64> {
        Ok(self.table[self.index_of(a)?])
    }

    /// The assignment corresponding to a table position.
    pub fn assignment_at(&self, mut idx: usize) -> Assignment {
        let mut out = Assignment::new();
        for (v, s) in self.vars.iter().zip(self.strides()) {
            out.insert(v.name.clone(), v.values[idx / s].clone());
            idx %= s;
        }
        out
    }

    pub fn sum_out<S: AsRef<str>>(&self, z: &[S]) -> Result<Factor> {
        self.sum_out_counted(z, &mut CostCounters::default())
    }

    pub fn sum_out_counted<S: AsRef<str>>(&self, z: &[S], counters: &mut CostCounters) -> Result<Factor> {
        let mut drop = BTreeSet::new();
        for n in z {
            let n = n.as_ref();
            if !self.contains(n) {
                return Err(FactorError::UnknownName(n.to_string()));
            }
            drop.insert(n.to_string());
        }
        let keep: Vec<VarSpec> = self.vars.iter().filter(|v| !drop.contains(&v.name)).cloned().collect();
        let zcard: usize = self.vars.iter().filter(|v| drop.contains(&v.name)).map(VarSpec::card).product();
        let mut out = Factor { vars: keep, table: Vec::new() };
        let out_len = table_len(&out.vars);
        let out_strides = out.strides();
        let mut rs = Vec::with_capacity(self.vars.len());
        let mut k = 0;
        for v in &self.vars {
            if drop.contains(&v.name) {
                rs.push(0);
            } else {
                rs.push(out_strides[k]);
                k += 1;
            }
        }
        let mut acc = vec![0.0; out_len];
        let strides = vec![rs];
        let mut off = [0usize];
        let mut odo = Odometer::new(self.vars.iter().map(VarSpec::card).collect());
        for &x in &self.table {
            acc[off[0]] += x;
            odo.step(&mut off, &strides);
        }
        out.table = acc;
        counters.additions += ((zcard - 1) * out_len) as u64;
        counters.entries_written += out_len as u64;
        counters.observe_table(out_len);
        Ok(out)
    }

    pub fn product(&self, other: &Factor) -> Result<Factor> {
        Factor::product_many(&[self, other])
    }

    pub fn product_counted(&self, other: &Factor, counters: &mut CostCounters) -> Result<Factor> {
        Factor::product_many_counted(&[self, other], counters)
    }

    pub fn product_many(fs: &[&Factor]) -> Result<Factor> {
        Factor::product_many_counted(fs, &mut CostCounters::default())
    }

    /// n-ary product computed in one sweep over the result index space.
    ///
    /// Result variables appear in order of first occurrence across `fs`.
    pub fn product_many_counted(fs: &[&Factor], counters: &mut CostCounters) -> Result<Factor> {
        let mut vars: Vec<VarSpec> = Vec::new();
        for f in fs {
            for v in &f.vars {
                match vars.iter().find(|w| w.name == v.name) {
                    Some(w) if w.values != v.values => return Err(FactorError::ValueSetMismatch(v.name.clone())),
                    Some(_) => {}
                    None => vars.push(v.clone()),
                }
            }
        }
        let size = table_len(&vars);
        let strides: Vec<Vec<usize>> = fs
            .iter()
            .map(|f| vars.iter().map(|v| f.stride_of(&v.name).unwrap_or(0)).collect())
            .collect();
        let mut offs = vec![0usize; fs.len()];
        let mut odo = Odometer::new(vars.iter().map(VarSpec::card).collect());
        let mut table = Vec::with_capacity(size);
        for _ in 0..size {
            let mut p = 1.0;
            for (f, &o) in fs.iter().zip(&offs) {
                p *= f.table[o];
            }
            table.push(p);
            odo.step(&mut offs, &strides);
        }
        counters.multiplications += (fs.len().saturating_sub(1) * size) as u64;
        counters.entries_written += size as u64;
        counters.observe_table(size);
        Ok(Factor { vars, table })
    }

    pub fn normalize(&self) -> Result<Factor> {
        let t = self.total();
        if !(t > 0.0) || !t.is_finite() {
            return Err(FactorError::ZeroMass);
        }
        Ok(Factor { vars: self.vars.clone(), table: self.table.iter().map(|x| x / t).collect() })
    }

    /// The same function with its variables listed in `order`.
    pub fn reorder<S: AsRef<str>>(&self, order: &[S]) -> Result<Factor> {
        let mut vars = Vec::with_capacity(order.len());
        for n in order {
            let v = self.var(n.as_ref()).ok_or_else(|| FactorError::UnknownName(n.as_ref().to_string()))?;
            vars.push(v.clone());
        }
        check_vars(&vars)?;
        if vars.len() != self.vars.len() {
            let missing = self.vars.iter().find(|v| !vars.iter().any(|w| w.name == v.name)).unwrap();
            return Err(FactorError::UnknownName(missing.name.clone()));
        }
        let src: Vec<usize> = vars.iter().map(|v| self.stride_of(&v.name).unwrap()).collect();
        let strides = vec![src];
        let mut off = [0usize];
        let mut odo = Odometer::new(vars.iter().map(VarSpec::card).collect());
        let n = self.table.len();
        let mut table = Vec::with_capacity(n);
        for _ in 0..n {
            table.push(self.table[off[0]]);
            odo.step(&mut off, &strides);
        }
        Ok(Factor { vars, table })
    }

    /// Slice at the bindings of `a` that concern this factor.
    pub fn restrict(&self, a: &Assignment) -> Result<Factor> {
        let mut fixed = 0usize;
        let strides = self.strides();
        let mut keep = Vec::new();
        let mut keep_strides = Vec::new();
        for (v, s) in self.vars.iter().zip(&strides) {
            match a.get(&v.name) {
                Some(val) => {
                    let k = v
                        .index_of(val)
                        .ok_or_else(|| FactorError::UnknownValue { name: v.name.clone(), value: val.to_string() })?;
                    fixed += k * s;
                }
                None => {
                    keep.push(v.clone());
                    keep_strides.push(*s);
                }
            }
        }
        let n = table_len(&keep);
        let st = vec![keep_strides];
        let mut off = [fixed];
        let mut odo = Odometer::new(keep.iter().map(VarSpec::card).collect());
        let mut table = Vec::with_capacity(n);
        for _ in 0..n {
            table.push(self.table[off[0]]);
            odo.step(&mut off, &st);
        }
        Ok(Factor { vars: keep, table })
    }

    /// True when every row (fixed values of the other variables) sums to 1.
    pub fn is_cpt_for(&self, child: &str, tol: f64) -> bool {
        match self.sum_out(&[child]) {
            Ok(rows) => rows.table.iter().all(|x| (x - 1.0).abs() <= tol),
            Err(_) => false,
        }
    }

    /// Largest entrywise difference after aligning variable orders; `None`
    /// when the variable sets differ.
    pub fn max_abs_diff(&self, other: &Factor) -> Option<f64> {
        if self.name_set() != other.name_set() {
            return None;
        }
        let names: Vec<&str> = self.names().collect();
        let o = other.reorder(&names).ok()?;
        if o.vars != self.vars {
            return None;
        }
        Some(self.table.iter().zip(&o.table).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }

    pub fn approx_eq(&self, other: &Factor, tol: f64) -> bool {
        self.max_abs_diff(other).is_some_and(|d| d <= tol)
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.vars.is_empty() {
            return writeln!(f, "() {}", fmt_num(self.table[0]));
        }
        let header: Vec<&str> = self.names().collect();
        writeln!(f, "{}", header.join("\t"))?;
        for (i, x) in self.table.iter().enumerate() {
            let a = self.assignment_at(i);
            let row: Vec<&str> = self.vars.iter().map(|v| a.get(&v.name).unwrap()).collect();
            writeln!(f, "{}\t{}", row.join("\t"), fmt_num(*x))?;
        }
        Ok(())
    }
}

/// Nine significant digits, trailing zeros trimmed.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let digits = 9 - 1 - x.abs().log10().floor() as i32;
    if (0..=17).contains(&digits) {
        let s = format!("{:.*}", digits as usize, x);
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{:.8e}", x)
    }
}
