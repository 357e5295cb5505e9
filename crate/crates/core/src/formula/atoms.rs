use crate::coding::Fnv;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Debug;
use std::hash::Hash;

pub const EQ: usize = 0;
pub const NEQ: usize = 1;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

/// A relational vocabulary. Positions 0 and 1 always hold `=` and `!=`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Vocabulary {
    symbols: Vec<Symbol>,
}

impl Vocabulary {
    /// Builds `{=, !=} ∪ extra`. Names must be identifiers, unique, arity ≥ 1.
    pub fn new(extra: impl IntoIterator<Item = (String, usize)>) -> Result<Self> {
        let mut symbols = vec![
            Symbol { name: "=".into(), arity: 2 },
            Symbol { name: "!=".into(), arity: 2 },
        ];
        for (name, arity) in extra {
            if arity == 0 {
                return Err(Error::Vocabulary(format!("{name} has arity 0")));
            }
            let ident = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
                && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !ident || is_reserved(&name) {
                return Err(Error::Vocabulary(format!("bad symbol name `{name}`")));
            }
            if symbols.iter().any(|s| s.name == name) {
                return Err(Error::Vocabulary(format!("duplicate symbol `{name}`")));
            }
            symbols.push(Symbol { name, arity });
        }
        Ok(Vocabulary { symbols })
    }

    /// `{=, !=, Le}`, the vocabulary of (non-strict) linear orders.
    pub fn linear_order() -> Self {
        Vocabulary::new([("Le".to_string(), 2)]).expect("static vocabulary")
    }

    /// Just `{=, !=}`.
    pub fn equality() -> Self {
        Vocabulary::new([]).expect("static vocabulary")
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn arity(&self, sym: usize) -> Option<usize> {
        self.symbols.get(sym).map(|s| s.arity)
    }

    pub fn name(&self, sym: usize) -> &str {
        &self.symbols[sym].name
    }

    pub fn lookup(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    /// Index of the order symbol `Le`, if present.
    pub fn le(&self) -> Option<usize> {
        self.lookup("Le")
    }
}

impl<'de> Deserialize<'de> for Vocabulary {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            symbols: Vec<Symbol>,
        }
        let raw = Raw::deserialize(d)?;
        let extra = raw
            .symbols
            .into_iter()
            .filter(|s| s.name != "=" && s.name != "!=")
            .map(|s| (s.name, s.arity));
        Vocabulary::new(extra).map_err(serde::de::Error::custom)
    }
}

pub(crate) fn is_reserved(name: &str) -> bool {
    matches!(name, "EX" | "ALL" | "OR" | "AND" | "TRUE" | "FALSE" | "D" | "in" | "gen")
        || (name.starts_with('x') && name.len() > 1 && name[1..].chars().all(|c| c.is_ascii_digit()))
}

/// A variable `x_i` or a universe element substituted for one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Term {
    Var(u32),
    Const(u64),
}

/// Atomic τ-formula `R(t_1, …, t_k)`; never negated.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TAtom {
    pub sym: usize,
    pub args: Vec<Term>,
}

impl TAtom {
    pub fn new(sym: usize, vars: &[u32]) -> Self {
        TAtom {
            sym,
            args: vars.iter().map(|&v| Term::Var(v)).collect(),
        }
    }

    pub fn eq(a: u32, b: u32) -> Self {
        TAtom::new(EQ, &[a, b])
    }

    pub fn neq(a: u32, b: u32) -> Self {
        TAtom::new(NEQ, &[a, b])
    }

    /// Variable indices in argument order (constants skipped).
    pub fn var_indices(&self) -> Vec<u32> {
        self.args
            .iter()
            .filter_map(|t| match t {
                Term::Var(v) => Some(*v),
                Term::Const(_) => None,
            })
            .collect()
    }

    pub fn check(&self, vocab: &Vocabulary) -> Result<()> {
        match vocab.arity(self.sym) {
            Some(a) if a == self.args.len() => Ok(()),
            Some(a) => Err(Error::MalformedFormula(format!(
                "symbol {} takes {a} arguments, got {}",
                vocab.name(self.sym),
                self.args.len()
            ))),
            None => Err(Error::MalformedFormula(format!("unknown symbol index {}", self.sym))),
        }
    }
}

/// Atoms of quantifier-free formulas over a set variable: `⊤`, `⊥`, `D(n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum NAtom {
    Top,
    Bot,
    D(u64),
}

pub trait AtomLike: Clone + Eq + Ord + Hash + Debug + Send + Sync + 'static {
    fn collect_vars(&self, out: &mut Vec<u32>);
    fn substitute(&self, map: &BTreeMap<u32, u64>) -> Self;
    fn hash_into(&self, h: &mut Fnv);
}

impl AtomLike for TAtom {
    fn collect_vars(&self, out: &mut Vec<u32>) {
        out.extend(self.var_indices());
    }

    fn substitute(&self, map: &BTreeMap<u32, u64>) -> Self {
        TAtom {
            sym: self.sym,
            args: self
                .args
                .iter()
                .map(|t| match t {
                    Term::Var(v) => map.get(v).map_or(*t, |&c| Term::Const(c)),
                    c => *c,
                })
                .collect(),
        }
    }

    fn hash_into(&self, h: &mut Fnv) {
        h.write_u64(self.sym as u64);
        for t in &self.args {
            match t {
                Term::Var(v) => {
                    h.write(b"v");
                    h.write_u64(*v as u64)
                }
                Term::Const(c) => {
                    h.write(b"c");
                    h.write_u64(*c)
                }
            }
        }
    }
}

impl AtomLike for NAtom {
    fn collect_vars(&self, _out: &mut Vec<u32>) {}

    fn substitute(&self, _map: &BTreeMap<u32, u64>) -> Self {
        *self
    }

    fn hash_into(&self, h: &mut Fnv) {
        match self {
            NAtom::Top => h.write(b"T"),
            NAtom::Bot => h.write(b"F"),
            NAtom::D(n) => {
                h.write(b"D");
                h.write_u64(*n)
            }
        }
    }
}
