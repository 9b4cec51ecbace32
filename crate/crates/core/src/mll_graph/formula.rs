//! MLL formulas over named atoms.
//!
//! Text syntax: `X+`, `X-`, `1`, `bot`, `(F * G)` for tensor and `(F | G)`
//! for par.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Pos(String),
    Neg(String),
    One,
    Bot,
    Tensor(Box<Formula>, Box<Formula>),
    Par(Box<Formula>, Box<Formula>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot parse formula `{input}` at byte {pos}: {reason}")]
pub struct ParseFormulaError {
    pub input: String,
    pub pos: usize,
    pub reason: &'static str,
}

impl Formula {
    pub fn pos(name: impl Into<String>) -> Formula {
        Formula::Pos(name.into())
    }

    pub fn neg(name: impl Into<String>) -> Formula {
        Formula::Neg(name.into())
    }

    pub fn tensor(a: Formula, b: Formula) -> Formula {
        Formula::Tensor(Box::new(a), Box::new(b))
    }

    pub fn par(a: Formula, b: Formula) -> Formula {
        Formula::Par(Box::new(a), Box::new(b))
    }

    /// De Morgan dual.
    pub fn negate(&self) -> Formula {
        match self {
            Formula::Pos(x) => Formula::Neg(x.clone()),
            Formula::Neg(x) => Formula::Pos(x.clone()),
            Formula::One => Formula::Bot,
            Formula::Bot => Formula::One,
            Formula::Tensor(a, b) => Formula::par(a.negate(), b.negate()),
            Formula::Par(a, b) => Formula::tensor(a.negate(), b.negate()),
        }
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Formula::Pos(_) | Formula::Neg(_))
    }

    pub fn atom_name(&self) -> Option<&str> {
        match self {
            Formula::Pos(x) | Formula::Neg(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_positive_atom(&self) -> bool {
        matches!(self, Formula::Pos(_))
    }

    pub fn is_negative_atom(&self) -> bool {
        matches!(self, Formula::Neg(_))
    }

    /// Atomic subformulas, left to right.
    pub fn atoms(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a Formula>) {
        match self {
            Formula::Pos(_) | Formula::Neg(_) => out.push(self),
            Formula::One | Formula::Bot => {}
            Formula::Tensor(a, b) | Formula::Par(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// True when no negative atom occurs.
    pub fn is_positive(&self) -> bool {
        self.atoms().iter().all(|a| a.is_positive_atom())
    }

    pub fn names(&self) -> BTreeSet<String> {
        self.atoms().iter().filter_map(|a| a.atom_name()).map(str::to_string).collect()
    }

    /// Number of connectives and units.
    pub fn connective_count(&self) -> usize {
        match self {
            Formula::Pos(_) | Formula::Neg(_) => 0,
            Formula::One | Formula::Bot => 1,
            Formula::Tensor(a, b) | Formula::Par(a, b) => 1 + a.connective_count() + b.connective_count(),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Pos(x) => write!(f, "{x}+"),
            Formula::Neg(x) => write!(f, "{x}-"),
            Formula::One => write!(f, "1"),
            Formula::Bot => write!(f, "bot"),
            Formula::Tensor(a, b) => write!(f, "({a} * {b})"),
            Formula::Par(a, b) => write!(f, "({a} | {b})"),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, reason: &'static str) -> ParseFormulaError {
        ParseFormulaError { input: self.src.to_string(), pos: self.pos, reason }
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.src[self.pos..].chars().next().unwrap().len_utf8();
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn formula(&mut self) -> Result<Formula, ParseFormulaError> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let a = self.formula()?;
                self.skip_ws();
                let op = self.peek().ok_or_else(|| self.err("expected `*` or `|`"))?;
                if op != '*' && op != '|' {
                    return Err(self.err("expected `*` or `|`"));
                }
                self.pos += 1;
                let b = self.formula()?;
                self.skip_ws();
                if self.peek() != Some(')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(if op == '*' { Formula::tensor(a, b) } else { Formula::par(a, b) })
            }
            Some(c) if c.is_alphanumeric() || c == '_' => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_alphanumeric() || c == '_' || c == '.') {
                    self.pos += self.peek().unwrap().len_utf8();
                }
                let word = &self.src[start..self.pos];
                match self.peek() {
                    Some('+') => {
                        self.pos += 1;
                        Ok(Formula::Pos(word.to_string()))
                    }
                    Some('-') => {
                        self.pos += 1;
                        Ok(Formula::Neg(word.to_string()))
                    }
                    _ if word == "1" => Ok(Formula::One),
                    _ if word == "bot" => Ok(Formula::Bot),
                    _ => Err(self.err("atom needs a polarity suffix")),
                }
            }
            _ => Err(self.err("unexpected character")),
        }
    }
}

impl FromStr for Formula {
    type Err = ParseFormulaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser { src: s, pos: 0 };
        let f = p.formula()?;
        p.skip_ws();
        if p.pos != s.len() {
            return Err(p.err("trailing input"));
        }
        Ok(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_formula() -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![
            "[A-E]".prop_map(Formula::Pos),
            "[A-E]".prop_map(Formula::Neg),
            Just(Formula::One),
            Just(Formula::Bot),
        ];
        leaf.prop_recursive(4, 16, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::tensor(a, b)),
                (inner.clone(), inner).prop_map(|(a, b)| Formula::par(a, b)),
            ]
        })
    }

    #[test]
    fn negation_examples() {
        assert_eq!(Formula::pos("X").negate(), Formula::neg("X"));
        let a = Formula::pos("A");
        let b = Formula::neg("B");
        assert_eq!(Formula::tensor(a.clone(), b.clone()).negate(), Formula::par(a.negate(), b.negate()));
    }

    #[test]
    fn parse_examples() {
        let f: Formula = "(C+ | D+)".parse().unwrap();
        assert_eq!(f, Formula::par(Formula::pos("C"), Formula::pos("D")));
        assert_eq!("bot".parse::<Formula>().unwrap(), Formula::Bot);
        assert_eq!("1".parse::<Formula>().unwrap(), Formula::One);
        assert!("X".parse::<Formula>().is_err());
        assert!("(X+ * Y-".parse::<Formula>().is_err());
    }

    proptest! {
        #[test]
        fn negation_is_involutive(f in arb_formula()) {
            prop_assert_eq!(f.negate().negate(), f);
        }

        #[test]
        fn display_round_trips(f in arb_formula()) {
            prop_assert_eq!(f.to_string().parse::<Formula>().unwrap(), f);
        }
    }
}
