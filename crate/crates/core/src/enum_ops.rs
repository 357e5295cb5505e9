//! Enumeration operators: c.e. sets of pairs `(D_v, m)` acting on subsets of ω
//! by `Γ(X) = {m : (v, m) ∈ Γ, D_v ⊆ X}`.

use crate::coding::{pair, unpair, FiniteSet};
use crate::error::{Error, Result};
use crate::family::{Budget, Family, Stream, Tri};
use crate::formula::{TAtom, Term, Vocabulary, EQ, NEQ};
use crate::nformula::SetOracle;
use crate::structures::{AtomCodec, Catalog};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

pub type PreimageFn = Arc<dyn Fn(u64) -> Vec<FiniteSet> + Send + Sync>;

/// Which catalog construction an operator realizes, when known.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OpKind {
    Identity,
    Tilde,
}

#[derive(Clone)]
pub struct EnumerationOperator {
    pub label: String,
    pub pairs: Family<(FiniteSet, u64)>,
    /// Exact `{D_v : (v, m) ∈ Γ}` for each output `m`, when the operator
    /// can compute it; otherwise `θ`-substitution scans `pairs`.
    pub preimage: Option<PreimageFn>,
    pub source: Option<Vocabulary>,
    pub target: Option<Vocabulary>,
    pub sanitized: bool,
    pub kind: Option<OpKind>,
}

impl fmt::Debug for EnumerationOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EnumerationOperator({})", self.label)
    }
}

/// An output of `apply` with the finite set that witnessed it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Output {
    pub atom: u64,
    pub witness: FiniteSet,
}

impl EnumerationOperator {
    pub fn finite(pairs: Vec<(FiniteSet, u64)>) -> Self {
        let table: Arc<BTreeMap<u64, Vec<FiniteSet>>> = Arc::new(pairs.iter().fold(BTreeMap::new(), |mut m, (v, x)| {
            m.entry(*x).or_insert_with(Vec::new).push(v.clone());
            m
        }));
        EnumerationOperator {
            label: "finite".into(),
            pairs: Family::Finite(pairs),
            preimage: Some(Arc::new(move |m| table.get(&m).cloned().unwrap_or_default())),
            source: None,
            target: None,
            sanitized: false,
            kind: None,
        }
    }

    /// `{({n}, n) : n ∈ ω}` over one vocabulary.
    pub fn identity(vocab: Vocabulary) -> Self {
        EnumerationOperator {
            label: "identity".into(),
            pairs: Family::Stream(Stream::new("identity", |p| Some((FiniteSet::from_iter([p as u64]), p as u64)))),
            preimage: Some(Arc::new(|m| vec![FiniteSet::from_iter([m])])),
            source: Some(vocab.clone()),
            target: Some(vocab),
            sanitized: false,
            kind: Some(OpKind::Identity),
        }
    }

    /// Maps the diagram of a linear order `A` to that of `tilde(A)`, where
    /// element `pair(c, r)` is the `r`-th copy of `c`.
    pub fn tilde() -> Self {
        let codec = AtomCodec::linear_order();
        let le = codec.vocabulary().le().unwrap();
        let c1 = codec.clone();
        let pairs = Stream::new("tilde", move |p| {
            let (i, j) = unpair(p as u64);
            let (r, s) = unpair(j);
            let a = c1.decode(i);
            let v = a.var_indices();
            let (c, d) = (v[0] as u64, v[1] as u64);
            let out = match a.sym {
                EQ if c == d => {
                    let sym = if r == s { EQ } else { NEQ };
                    c1.encode_ground(sym, &[pair(c, r), pair(c, s)])
                }
                NEQ if c != d => c1.encode_ground(NEQ, &[pair(c, r), pair(d, s)]),
                sym if sym == le => c1.encode_ground(le, &[pair(c, r), pair(d, s)]),
                _ => return None,
            };
            out.ok().map(|o| (FiniteSet::from_iter([i]), o))
        });
        let c2 = codec.clone();
        let preimage = move |m: u64| {
            let b = c2.decode(m);
            let v = b.var_indices();
            let (e, f) = (v[0] as u64, v[1] as u64);
            let ((c, r), (d, s)) = (unpair(e), unpair(f));
            let src = match b.sym {
                EQ if e == f => c2.encode_ground(EQ, &[c, c]),
                NEQ if e != f && c == d && r != s => c2.encode_ground(EQ, &[c, c]),
                NEQ if c != d => c2.encode_ground(NEQ, &[c, d]),
                sym if sym == le => c2.encode_ground(le, &[c, d]),
                _ => return vec![],
            };
            src.map(|n| vec![FiniteSet::from_iter([n])]).unwrap_or_default()
        };
        EnumerationOperator {
            label: "tilde".into(),
            pairs: Family::Stream(pairs),
            preimage: Some(Arc::new(preimage)),
            source: Some(Vocabulary::linear_order()),
            target: Some(Vocabulary::linear_order()),
            sanitized: false,
            kind: Some(OpKind::Tilde),
        }
    }

    /// The structure `apply(sanitize(self), D_A)` for a catalog order `A`.
    pub fn image_catalog(&self, a: &Catalog) -> Result<Catalog> {
        let base = match self.kind {
            Some(OpKind::Identity) => a.clone(),
            Some(OpKind::Tilde) => a.clone().tilde(),
            None => return Err(Error::UnsupportedCatalog(format!("image of {a} under {}", self.label))),
        };
        Ok(match base.base() {
            Catalog::Omega | Catalog::OmegaStar => base,
            _ => base.pad(),
        })
    }
}

/// Enumerates `Γ(X)` over the first `budget` pairs, each output with the
/// first witness found.
pub fn apply(g: &EnumerationOperator, x: &SetOracle, budget: u64) -> Vec<Output> {
    let mut b = Budget::new(budget);
    let mut seen: BTreeMap<u64, FiniteSet> = BTreeMap::new();
    let mut pos = 0;
    while b.charge() {
        let Some((v, m)) = g.pairs.get(pos) else {
            if g.pairs.is_finite() && pos >= g.pairs.as_finite().unwrap().len() {
                break;
            }
            pos += 1;
            continue;
        };
        pos += 1;
        if seen.contains_key(&m) {
            continue;
        }
        let mut inner = Budget::new(budget);
        if v.iter().all(|n| member(x, n, &mut inner) == Tri::True) {
            seen.insert(m, v);
        }
    }
    seen.into_iter().map(|(atom, witness)| Output { atom, witness }).collect()
}

fn member(x: &SetOracle, n: u64, budget: &mut Budget) -> Tri {
    use crate::formula::{Formula, NAtom};
    crate::nformula::eval_n(&Formula::conj(vec![NAtom::D(n)]), x, budget.remaining().max(1))
}

/// Atoms the sanitization removes: `x_i ≠ x_i` and `x_i = x_j` with `i ≠ j`.
fn is_filtered(a: &TAtom) -> bool {
    match (a.sym, a.args.as_slice()) {
        (NEQ, [x, y]) => x == y,
        (EQ, [x, y]) => x != y,
        _ => false,
    }
}

fn is_reflexive_eq(a: &TAtom) -> Option<u64> {
    match (a.sym, a.args.as_slice()) {
        (EQ, [Term::Var(x), Term::Var(y)]) if x == y => Some(*x as u64),
        _ => None,
    }
}

/// Drops pairs emitting `x_i ≠ x_i` or `x_i = x_j` (`i ≠ j`) and adds
/// `(∅, x_n = x_n)` for every `n`. Pairs are interleaved: even positions
/// scan the original operator, odd positions inject the equalities.
pub fn sanitize(g: &EnumerationOperator) -> Result<EnumerationOperator> {
    let target = g.target.clone().ok_or(Error::Vocabulary("sanitize needs a target vocabulary".into()))?;
    let codec = AtomCodec::shared(&target);
    let c1 = codec.clone();
    let orig = g.pairs.clone();
    let pairs = Stream::new(format!("san({})", g.label), move |p| {
        if p % 2 == 1 {
            let n = (p / 2) as u32;
            return c1.encode(&TAtom::eq(n, n)).ok().map(|m| (FiniteSet::empty(), m));
        }
        let (v, m) = orig.get(p / 2)?;
        (!is_filtered(&c1.decode(m))).then_some((v, m))
    });
    let preimage = g.preimage.clone().map(|pre| {
        let c2 = codec.clone();
        Arc::new(move |m: u64| {
            let a = c2.decode(m);
            if is_filtered(&a) {
                return vec![];
            }
            let mut out = pre(m);
            if is_reflexive_eq(&a).is_some() && !out.contains(&FiniteSet::empty()) {
                out.push(FiniteSet::empty());
            }
            out
        }) as PreimageFn
    });
    Ok(EnumerationOperator {
        label: format!("san({})", g.label),
        pairs: Family::Stream(pairs),
        preimage,
        source: g.source.clone(),
        target: Some(target),
        sanitized: true,
        kind: g.kind,
    })
}

/// JSON operator file: explicit pairs and/or a built-in generator.
#[derive(Serialize, Deserialize)]
pub struct OperatorFile {
    #[serde(default)]
    pub pairs: Vec<(FiniteSet, u64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<OpKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<Vocabulary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Vocabulary>,
    #[serde(default)]
    pub sanitized: bool,
}

impl OperatorFile {
    pub fn into_operator(self) -> Result<EnumerationOperator> {
        let mut op = match (self.generator, self.pairs.is_empty()) {
            (Some(OpKind::Identity), true) => {
                EnumerationOperator::identity(self.source.clone().unwrap_or_else(Vocabulary::linear_order))
            }
            (Some(OpKind::Tilde), true) => EnumerationOperator::tilde(),
            (None, _) => EnumerationOperator::finite(self.pairs),
            (Some(_), false) => return Err(Error::Io("give either pairs or a generator".into())),
        };
        if self.source.is_some() {
            op.source = self.source;
        }
        if self.target.is_some() {
            op.target = self.target;
        }
        op.sanitized |= self.sanitized;
        Ok(op)
    }
}

pub fn load_operator(path: &str) -> Result<EnumerationOperator> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str::<OperatorFile>(&text)?.into_operator()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::{diagram_bit, Structure};

    fn atoms(out: &[Output]) -> Vec<u64> {
        out.iter().map(|o| o.atom).collect()
    }

    #[test]
    fn apply_examples() {
        let g = EnumerationOperator::finite(vec![([1, 3].into_iter().collect(), 7)]);
        assert_eq!(atoms(&apply(&g, &SetOracle::finite([1, 3, 5]), 10)), vec![7]);
        assert!(apply(&g, &SetOracle::finite([1, 5]), 10).is_empty());
        let id = EnumerationOperator::identity(Vocabulary::linear_order());
        assert_eq!(atoms(&apply(&id, &SetOracle::finite([2, 4, 40]), 10)), vec![2, 4]);
    }

    #[test]
    fn sanitize_examples() {
        let codec = AtomCodec::linear_order();
        let bad = codec.encode(&TAtom::neq(3, 3)).unwrap();
        let bad2 = codec.encode(&TAtom::eq(1, 2)).unwrap();
        let good = codec.encode(&TAtom::new(2, &[1, 2])).unwrap();
        let mut g = EnumerationOperator::finite(vec![
            (FiniteSet::empty(), bad),
            (FiniteSet::empty(), bad2),
            (FiniteSet::empty(), good),
        ]);
        g.target = Some(Vocabulary::linear_order());
        let s = sanitize(&g).unwrap();
        let out = atoms(&apply(&s, &SetOracle::finite([]), 200));
        assert!(!out.contains(&bad) && !out.contains(&bad2));
        assert!(out.contains(&good));
        for n in 0..50 {
            assert!(out.contains(&codec.encode(&TAtom::eq(n, n)).unwrap()));
        }
        assert_eq!((s.preimage.as_ref().unwrap())(bad), vec![]);
        let ss = sanitize(&s).unwrap();
        let cap = codec.encode(&TAtom::eq(49, 49)).unwrap();
        let below = |o: Vec<u64>| o.into_iter().filter(|&m| m <= cap).collect::<Vec<_>>();
        assert_eq!(
            below(atoms(&apply(&ss, &SetOracle::finite([]), 400))),
            below(atoms(&apply(&s, &SetOracle::finite([]), 200)))
        );
    }

    #[test]
    fn tilde_operator_matches_tilde_diagram() {
        let codec = AtomCodec::linear_order();
        let op = EnumerationOperator::tilde();
        let c = Catalog::Fin(3);
        let input = SetOracle::Decidable({
            let codec = codec.clone();
            Arc::new(move |n| diagram_bit(&Catalog::Fin(3), &codec, n))
        });
        let out = atoms(&apply(&op, &input, 20_000));
        let t = c.clone().tilde();
        for n in 0..300 {
            assert_eq!(out.contains(&n), diagram_bit(&t, &codec, n), "atom {n}");
        }
        // preimage agrees with the enumerated pairs
        let pre = op.preimage.clone().unwrap();
        for p in 0..2000 {
            if let Some((v, m)) = op.pairs.get(p) {
                assert!(pre(m).contains(&v));
            }
        }
        assert_eq!(op.image_catalog(&c).unwrap().to_string(), "pad(tilde(fin(3)))");
        assert!(t.size().is_none());
    }

    #[test]
    fn operator_file() {
        let f: OperatorFile = serde_json::from_str(r#"{"pairs": [[[1,3], 7], [10, 2]]}"#).unwrap();
        let op = f.into_operator().unwrap();
        assert_eq!(op.pairs.as_finite().unwrap()[1].0, [1, 3].into_iter().collect());
        let g: OperatorFile = serde_json::from_str(r#"{"generator": "tilde"}"#).unwrap();
        assert_eq!(g.into_operator().unwrap().kind, Some(OpKind::Tilde));
    }
}
