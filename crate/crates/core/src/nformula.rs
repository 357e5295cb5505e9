//! Quantifier-free formulas over a set variable `D` and effective Borel codes.

use crate::coding::FiniteSet;
use crate::error::{Error, Result};
use crate::family::{Budget, Family, Tri};
use crate::formula::{Body, Clause, ClauseBody, Formula, NAtom, NFormula, Tag};
use serde_json::{json, Value};
use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

/// Rejects bound variables anywhere in the finite part (and in the first
/// members of streams).
pub fn validate_n(f: &NFormula) -> Result<()> {
    f.classify()?;
    fn go(f: &NFormula) -> Result<()> {
        if let Some(fam) = f.family() {
            let members = match fam {
                Family::Finite(cs) => cs.clone(),
                Family::Stream(_) => fam.prefix(4),
            };
            for c in members {
                if let Some(v) = c.bound.first() {
                    return Err(Error::MalformedFormula(format!("N-formula binds x{v}")));
                }
                if let ClauseBody::Pair(s, p) = &c.body {
                    go(s)?;
                    go(p)?;
                }
            }
        }
        Ok(())
    }
    go(f)
}

/// A subset of ω as seen by an evaluator.
#[derive(Clone)]
pub enum SetOracle {
    /// `n ∈ X` iff `(n ∈ flipped) != default`.
    Point { flipped: BTreeSet<u64>, default: bool },
    /// Exact membership test.
    Decidable(Arc<dyn Fn(u64) -> bool + Send + Sync>),
    /// Enumeration of the members; membership is searched under budget.
    Enumerated(Arc<dyn Fn(usize) -> Option<u64> + Send + Sync>),
}

impl SetOracle {
    pub fn finite(members: impl IntoIterator<Item = u64>) -> Self {
        SetOracle::Point {
            flipped: members.into_iter().collect(),
            default: false,
        }
    }

    pub fn cofinite(missing: impl IntoIterator<Item = u64>) -> Self {
        SetOracle::Point {
            flipped: missing.into_iter().collect(),
            default: true,
        }
    }

    fn member(&self, n: u64, budget: &mut Budget) -> Tri {
        match self {
            SetOracle::Point { flipped, default } => Tri::from_bool(flipped.contains(&n) != *default),
            SetOracle::Decidable(f) => Tri::from_bool(f(n)),
            SetOracle::Enumerated(e) => {
                let mut p = 0;
                while budget.charge() {
                    if e(p) == Some(n) {
                        return Tri::True;
                    }
                    p += 1;
                }
                Tri::Unknown
            }
        }
    }
}

fn and(a: Tri, b: Tri) -> Tri {
    match (a, b) {
        (Tri::False, _) | (_, Tri::False) => Tri::False,
        (Tri::True, Tri::True) => Tri::True,
        _ => Tri::Unknown,
    }
}

fn or(a: Tri, b: Tri) -> Tri {
    and(a.not(), b.not()).not()
}

/// Three-valued truth of `f` in `(ℕ, X)`. Only stream positions and
/// enumerated lookups cost budget, so formulas with finite families are
/// decided exactly against a `Point` or `Decidable` oracle.
///
/// Against an `Enumerated` oracle the search runs in stages: stage `s`
/// trusts the first `s` enumerated members and visits `s` positions of each
/// stream, with `s` doubling until the value is decided or the budget is spent.
pub fn eval_n(f: &NFormula, x: &SetOracle, budget: u64) -> Tri {
    let mut budget = Budget::new(budget);
    let SetOracle::Enumerated(e) = x else {
        return eval(f, &Ctx { look: Lookup::Oracle(x), limit: None }, &mut budget);
    };
    let mut known = HashSet::new();
    let mut listed = 0;
    let mut stage = 1;
    loop {
        while listed < stage {
            if !budget.charge() {
                return Tri::Unknown;
            }
            known.extend(e(listed));
            listed += 1;
        }
        let ctx = Ctx {
            look: Lookup::Known(&known),
            limit: Some(stage),
        };
        let v = eval(f, &ctx, &mut budget);
        if v.is_decided() || budget.remaining() == 0 {
            return v;
        }
        stage *= 2;
    }
}

enum Lookup<'a> {
    Oracle(&'a SetOracle),
    /// Members listed so far; anything else is unknown.
    Known(&'a HashSet<u64>),
}

struct Ctx<'a> {
    look: Lookup<'a>,
    limit: Option<usize>,
}

fn atom(a: &NAtom, ctx: &Ctx, budget: &mut Budget) -> Tri {
    match (a, &ctx.look) {
        (NAtom::Top, _) => Tri::True,
        (NAtom::Bot, _) => Tri::False,
        (NAtom::D(n), Lookup::Oracle(x)) => x.member(*n, budget),
        (NAtom::D(n), Lookup::Known(k)) => {
            if k.contains(n) {
                Tri::True
            } else {
                Tri::Unknown
            }
        }
    }
}

fn eval_atoms(tag: Tag, atoms: &[NAtom], x: &Ctx, budget: &mut Budget) -> Tri {
    match tag {
        Tag::Sigma => atoms.iter().fold(Tri::True, |acc, a| {
            if acc == Tri::False {
                acc
            } else {
                and(acc, atom(a, x, budget))
            }
        }),
        Tag::Pi => atoms.iter().fold(Tri::False, |acc, a| {
            if acc == Tri::True {
                acc
            } else {
                or(acc, atom(a, x, budget).not())
            }
        }),
    }
}

fn eval_clause(tag: Tag, c: &Clause<NAtom>, x: &Ctx, budget: &mut Budget) -> Tri {
    match &c.body {
        ClauseBody::Base(atoms) => eval_atoms(tag, atoms, x, budget),
        ClauseBody::Pair(s, p) => {
            let a = eval(s, x, budget);
            let unit = if tag == Tag::Sigma { Tri::False } else { Tri::True };
            if a == unit {
                return a;
            }
            let b = eval(p, x, budget);
            if tag == Tag::Sigma {
                and(a, b)
            } else {
                or(a, b)
            }
        }
    }
}

fn eval(f: &NFormula, x: &Ctx, budget: &mut Budget) -> Tri {
    let tag = f.tag();
    // the value that settles a join: a true disjunct or a false conjunct
    let decisive = if tag == Tag::Sigma { Tri::True } else { Tri::False };
    match f.body() {
        Body::Atoms(atoms) => eval_atoms(tag, atoms, x, budget),
        Body::Join(Family::Finite(cs)) => {
            let mut acc = decisive.not();
            for c in cs {
                let v = eval_clause(tag, c, x, budget);
                if v == decisive {
                    return v;
                }
                if v == Tri::Unknown {
                    acc = Tri::Unknown;
                }
            }
            acc
        }
        Body::Join(Family::Stream(s)) => {
            let mut p = 0;
            while x.limit.is_none_or(|l| p < l) && budget.charge() {
                if let Some(c) = s.get(p) {
                    if eval_clause(tag, &c, x, budget) == decisive {
                        return decisive;
                    }
                }
                p += 1;
            }
            Tri::Unknown
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum BorelBody {
    /// `⋃_i ⋂_{n ∈ S_i} O_n`.
    Open(Family<FiniteSet>),
    /// `⋃_i B_i \ B'_i`.
    Diff(Family<(BorelCode, BorelCode)>),
}

/// Effective Borel code of a Σ-class set.
#[derive(Clone, Debug, PartialEq)]
pub struct BorelCode {
    pub level: u32,
    pub body: BorelBody,
}

/// A code together with a top-level complement flag (Π-classes).
#[derive(Clone, Debug, PartialEq)]
pub struct SignedCode {
    pub complement: bool,
    pub code: BorelCode,
}

impl BorelCode {
    pub fn validate(&self) -> Result<()> {
        match &self.body {
            BorelBody::Open(_) if self.level == 1 => Ok(()),
            BorelBody::Open(_) => Err(Error::MalformedCode("open code above level 1".into())),
            BorelBody::Diff(_) if self.level < 2 => Err(Error::MalformedCode("difference code at level 1".into())),
            BorelBody::Diff(fam) => {
                for (b, c) in fam.prefix(4) {
                    if b.level >= self.level || c.level >= self.level {
                        return Err(Error::MalformedCode(format!(
                            "sublevels ({}, {}) not below {}",
                            b.level, c.level, self.level
                        )));
                    }
                    b.validate()?;
                    c.validate()?;
                }
                Ok(())
            }
        }
    }

    pub fn to_json(&self) -> Result<Value> {
        match &self.body {
            BorelBody::Open(Family::Finite(sets)) => Ok(json!({ "level": self.level, "open": sets })),
            BorelBody::Diff(Family::Finite(ps)) => {
                let parts = ps
                    .iter()
                    .map(|(b, c)| Ok(json!([b.to_json()?, c.to_json()?])))
                    .collect::<Result<Vec<_>>>()?;
                Ok(json!({ "level": self.level, "diff": parts }))
            }
            _ => Err(Error::InfiniteFamily),
        }
    }

    pub fn from_json(v: &Value) -> Result<BorelCode> {
        let bad = |m: &str| Error::MalformedCode(m.to_string());
        let level = v.get("level").and_then(Value::as_u64).ok_or_else(|| bad("missing level"))? as u32;
        let code = if let Some(open) = v.get("open") {
            let sets: Vec<FiniteSet> = serde_json::from_value(open.clone()).map_err(|e| bad(&e.to_string()))?;
            BorelCode {
                level,
                body: BorelBody::Open(Family::Finite(sets)),
            }
        } else if let Some(Value::Array(parts)) = v.get("diff") {
            let ps = parts
                .iter()
                .map(|p| match p.as_array().map(Vec::as_slice) {
                    Some([b, c]) => Ok((BorelCode::from_json(b)?, BorelCode::from_json(c)?)),
                    _ => Err(bad("diff members are pairs")),
                })
                .collect::<Result<Vec<_>>>()?;
            BorelCode {
                level,
                body: BorelBody::Diff(Family::Finite(ps)),
            }
        } else {
            return Err(bad("need `open` or `diff`"));
        };
        code.validate()?;
        Ok(code)
    }
}

impl SignedCode {
    pub fn to_json(&self) -> Result<Value> {
        Ok(json!({ "complement": self.complement, "code": self.code.to_json()? }))
    }

    pub fn from_json(v: &Value) -> Result<SignedCode> {
        let complement = v.get("complement").and_then(Value::as_bool).unwrap_or(false);
        let code = BorelCode::from_json(v.get("code").ok_or(Error::MalformedCode("missing code".into()))?)?;
        Ok(SignedCode { complement, code })
    }
}

/// `None` when the conjunction contains `⊥`.
fn conj_set(atoms: &[NAtom]) -> Option<FiniteSet> {
    let mut out = BTreeSet::new();
    for a in atoms {
        match a {
            NAtom::Top => {}
            NAtom::Bot => return None,
            NAtom::D(n) => {
                out.insert(*n);
            }
        }
    }
    Some(out.into_iter().collect())
}

fn sigma_code(f: &NFormula) -> BorelCode {
    match f.body() {
        Body::Atoms(atoms) => BorelCode {
            level: 1,
            body: BorelBody::Open(Family::Finite(conj_set(atoms).into_iter().collect())),
        },
        Body::Join(fam) if f.level() == 1 => {
            let label = stream_label(fam, "open");
            BorelCode {
                level: 1,
                body: BorelBody::Open(fam.filter_map(label, |c: Clause<NAtom>| match &c.body {
                    ClauseBody::Base(atoms) => conj_set(atoms),
                    ClauseBody::Pair(..) => None,
                })),
            }
        }
        Body::Join(fam) => {
            let label = stream_label(fam, "diff");
            BorelCode {
                level: f.level(),
                body: BorelBody::Diff(fam.filter_map(label, |c: Clause<NAtom>| match &c.body {
                    ClauseBody::Pair(s, p) => Some((sigma_code(s), sigma_code(&p.dual()))),
                    ClauseBody::Base(_) => None,
                })),
            }
        }
    }
}

fn stream_label<T: Clone + Send + Sync + 'static>(fam: &Family<T>, kind: &str) -> String {
    match fam {
        Family::Stream(s) => format!("{kind}({})", s.label()),
        Family::Finite(_) => String::new(),
    }
}

/// The set `Mod(f)` as a code; Π-formulas become the complement of the code
/// of their dual.
pub fn nformula_to_borel(f: &NFormula) -> Result<SignedCode> {
    validate_n(f)?;
    Ok(match f.tag() {
        Tag::Sigma => SignedCode {
            complement: false,
            code: sigma_code(f),
        },
        Tag::Pi => SignedCode {
            complement: true,
            code: sigma_code(&f.dual()),
        },
    })
}

fn code_formula(b: &BorelCode) -> NFormula {
    match &b.body {
        BorelBody::Open(fam) => {
            let label = stream_label(fam, "phi");
            Formula::join_family(
                Tag::Sigma,
                1,
                fam.map(label, |s: FiniteSet| Clause::base(vec![], s.iter().map(NAtom::D).collect())),
            )
        }
        BorelBody::Diff(fam) => {
            let label = stream_label(fam, "phi");
            Formula::join_family(
                Tag::Sigma,
                b.level,
                fam.map(label, |(b, c): (BorelCode, BorelCode)| {
                    Clause::pair(vec![], code_formula(&b), code_formula(&c).dual())
                }),
            )
        }
    }
}

pub fn borel_to_nformula(b: &SignedCode) -> Result<NFormula> {
    b.code.validate()?;
    let f = code_formula(&b.code);
    Ok(if b.complement { f.dual() } else { f })
}

/// Direct membership of a finitely described point in a code with finite
/// families, by recursion on the set operations.
pub fn borel_member(b: &SignedCode, x: &BTreeSet<u64>, default: bool) -> Result<bool> {
    fn has(n: u64, x: &BTreeSet<u64>, default: bool) -> bool {
        x.contains(&n) != default
    }
    fn go(b: &BorelCode, x: &BTreeSet<u64>, default: bool) -> Result<bool> {
        match &b.body {
            BorelBody::Open(Family::Finite(sets)) => Ok(sets.iter().any(|s| s.iter().all(|n| has(n, x, default)))),
            BorelBody::Diff(Family::Finite(ps)) => {
                for (p, q) in ps {
                    if go(p, x, default)? && !go(q, x, default)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            _ => Err(Error::InfiniteFamily),
        }
    }
    Ok(go(&b.code, x, default)? != b.complement)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::syntax::{parse, Registry};
    use crate::formula::Vocabulary;

    fn nf(s: &str) -> NFormula {
        parse(s, &Vocabulary::equality(), Some(&Registry::with_builtins())).unwrap()
    }

    #[test]
    fn atoms() {
        let x = SetOracle::finite([3]);
        assert_eq!(eval_n(&nf("D(3)"), &x, 1), Tri::True);
        assert_eq!(eval_n(&nf("D(3)").neg().unwrap(), &x, 1), Tri::False);
        assert_eq!(eval_n(&nf("~D(4)"), &x, 1), Tri::True);
    }

    #[test]
    fn stream_join_cannot_be_refuted() {
        let f = nf("OR[i in gen:diag]");
        let empty = SetOracle::finite([]);
        for b in [1, 10, 1000] {
            assert_eq!(eval_n(&f, &empty, b), Tri::Unknown);
        }
        // independent check: no finite prefix of the family has a true disjunct
        for p in 0..1000 {
            let c = f.family().unwrap().get(p).unwrap();
            assert_eq!(c.body, ClauseBody::Base(vec![NAtom::D(p as u64)]));
        }
        assert_eq!(eval_n(&f, &SetOracle::finite([7]), 8), Tri::True);
        assert_eq!(eval_n(&f, &SetOracle::finite([7]), 7), Tri::Unknown);
        assert_eq!(eval_n(&f.neg().unwrap(), &SetOracle::finite([7]), 8), Tri::False);
    }

    #[test]
    fn enumerated_oracle_is_semidecidable() {
        let evens = SetOracle::Enumerated(Arc::new(|p| Some(2 * p as u64)));
        assert_eq!(eval_n(&nf("D(4)"), &evens, 10), Tri::True);
        assert_eq!(eval_n(&nf("D(3)"), &evens, 10), Tri::Unknown);
        assert_eq!(eval_n(&nf("~D(4)"), &evens, 10), Tri::False);
    }

    #[test]
    fn borel_examples() {
        let c = nformula_to_borel(&nf("D(2) & D(5)")).unwrap();
        assert_eq!(c.code.level, 1);
        assert_eq!(c.code.body, BorelBody::Open(Family::Finite(vec![[2, 5].into_iter().collect()])));
        let bot = nformula_to_borel(&nf("FALSE")).unwrap();
        assert_eq!(bot.code.body, BorelBody::Open(Family::Finite(vec![])));
        let two = nformula_to_borel(&nf("OR[i in {(D(1)) & (~D(2)), (D(3)) & (~D(4))}]")).unwrap();
        assert_eq!(two.code.level, 2);
        let x: BTreeSet<u64> = [3].into();
        assert!(borel_member(&two, &x, false).unwrap());
        assert!(!borel_member(&two, &[3, 4].into(), false).unwrap());
    }

    #[test]
    fn borel_to_formula_examples() {
        let c = SignedCode {
            complement: false,
            code: BorelCode {
                level: 1,
                body: BorelBody::Open(Family::Finite(vec![FiniteSet::from_code(1)])),
            },
        };
        let f = borel_to_nformula(&c).unwrap();
        assert_eq!(f, Formula::join(Tag::Sigma, vec![Clause::base(vec![], vec![NAtom::D(0)])]));
        let empty = SignedCode {
            complement: false,
            code: BorelCode {
                level: 1,
                body: BorelBody::Open(Family::Finite(vec![])),
            },
        };
        let g = borel_to_nformula(&empty).unwrap();
        assert_eq!(eval_n(&g, &SetOracle::cofinite([]), 1), Tri::False);
        let bad = BorelCode {
            level: 2,
            body: BorelBody::Diff(Family::Finite(vec![(c.code.clone(), c.code.clone().tilt(2))])),
        };
        assert!(matches!(bad.validate(), Err(Error::MalformedCode(_))));
    }

    impl BorelCode {
        fn tilt(mut self, level: u32) -> Self {
            self.level = level;
            self
        }
    }

    #[test]
    fn json_roundtrip() {
        let c = nformula_to_borel(&nf("AND[i in {ALL x0 . ~D(1) | ~D(2)}]"));
        assert!(c.is_err(), "bound variables are rejected");
        let c = nformula_to_borel(&nf("AND[i in {(OR[i in {D(1)}]) | (~D(2)), (D(0)) | (~D(3))}]")).unwrap();
        let v = c.to_json().unwrap();
        assert_eq!(SignedCode::from_json(&v).unwrap(), c);
    }
}
