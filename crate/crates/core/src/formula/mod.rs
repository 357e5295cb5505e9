//! Normal-form positive infinitary formulas at finite levels.
//!
//! A formula is either a finite list of atoms (level 0: a conjunction for
//! `Sigma`, a disjunction of negated atoms for `Pi`) or a join over an index
//! family of clauses. A clause binds a tuple of variables and carries either
//! a level-0 atom list (level 1) or a pair `(σ, π)` of a Σ-part and a Π-part
//! of lower level (level ≥ 2). `Sigma` joins read `⋁ ∃x̄ (σ ∧ π)`, `Pi`
//! joins read `⋀ ∀x̄ (σ ∨ π)`.

mod atoms;
pub mod syntax;

pub use atoms::{AtomLike, NAtom, Symbol, TAtom, Term, Vocabulary, EQ, NEQ};

use crate::coding::Fnv;
use crate::error::{Error, Result};
use crate::family::{Family, Stream};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Tag {
    Sigma,
    Pi,
}

impl Tag {
    pub fn dual(self) -> Tag {
        match self {
            Tag::Sigma => Tag::Pi,
            Tag::Pi => Tag::Sigma,
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tag::Sigma => "Sigma",
            Tag::Pi => "Pi",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ClauseBody<A> {
    Base(Vec<A>),
    Pair(Arc<Formula<A>>, Arc<Formula<A>>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Clause<A> {
    pub bound: Vec<u32>,
    pub body: ClauseBody<A>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Body<A> {
    Atoms(Vec<A>),
    Join(Family<Clause<A>>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Formula<A> {
    tag: Tag,
    level: u32,
    body: Body<A>,
}

pub type TFormula = Formula<TAtom>;
pub type NFormula = Formula<NAtom>;

impl<A: AtomLike> Clause<A> {
    pub fn base(bound: Vec<u32>, atoms: Vec<A>) -> Self {
        Clause {
            bound,
            body: ClauseBody::Base(atoms),
        }
    }

    pub fn pair(bound: Vec<u32>, sigma: Formula<A>, pi: Formula<A>) -> Self {
        Clause {
            bound,
            body: ClauseBody::Pair(Arc::new(sigma), Arc::new(pi)),
        }
    }

    /// Least level of a join node having this clause as a member.
    pub fn level(&self) -> u32 {
        match &self.body {
            ClauseBody::Base(_) => 1,
            ClauseBody::Pair(s, p) => 2.max(1 + s.level.max(p.level)),
        }
    }

    /// The clause of the dual join: `∃x̄(σ ∧ π)` becomes `∀x̄(neg π ∨ neg σ)`.
    pub fn dual(&self) -> Clause<A> {
        let body = match &self.body {
            ClauseBody::Base(atoms) => ClauseBody::Base(atoms.clone()),
            ClauseBody::Pair(s, p) => ClauseBody::Pair(Arc::new(p.dual()), Arc::new(s.dual())),
        };
        Clause {
            bound: self.bound.clone(),
            body,
        }
    }

    fn substitute_inner(&self, map: &BTreeMap<u32, u64>) -> Clause<A> {
        let mut inner = map.clone();
        for v in &self.bound {
            inner.remove(v);
        }
        let body = match &self.body {
            ClauseBody::Base(atoms) => ClauseBody::Base(atoms.iter().map(|a| a.substitute(&inner)).collect()),
            ClauseBody::Pair(s, p) => ClauseBody::Pair(
                Arc::new(s.substitute_inner(&inner)),
                Arc::new(p.substitute_inner(&inner)),
            ),
        };
        Clause {
            bound: self.bound.clone(),
            body,
        }
    }

    fn collect_free(&self, out: &mut BTreeSet<u32>) {
        let mut inner = BTreeSet::new();
        match &self.body {
            ClauseBody::Base(atoms) => {
                let mut vs = Vec::new();
                atoms.iter().for_each(|a| a.collect_vars(&mut vs));
                inner.extend(vs);
            }
            ClauseBody::Pair(s, p) => {
                s.collect_free(&mut inner);
                p.collect_free(&mut inner);
            }
        }
        out.extend(inner.into_iter().filter(|v| !self.bound.contains(v)));
    }

    fn hash_into(&self, h: &mut Fnv) {
        h.write(b"[");
        for v in &self.bound {
            h.write_u64(*v as u64);
        }
        match &self.body {
            ClauseBody::Base(atoms) => {
                h.write(b"B");
                atoms.iter().for_each(|a| a.hash_into(h));
            }
            ClauseBody::Pair(s, p) => {
                h.write(b"P");
                s.hash_into(h);
                p.hash_into(h);
            }
        }
        h.write(b"]");
    }

    fn canonical(&self) -> Clause<A> {
        let body = match &self.body {
            ClauseBody::Base(atoms) => {
                let mut atoms = atoms.clone();
                atoms.sort();
                ClauseBody::Base(atoms)
            }
            ClauseBody::Pair(s, p) => ClauseBody::Pair(Arc::new(s.canonicalize()), Arc::new(p.canonicalize())),
        };
        Clause {
            bound: self.bound.clone(),
            body,
        }
    }
}

impl<A: AtomLike> Formula<A> {
    /// `Σ^p_0`: finite conjunction of atoms.
    pub fn conj(atoms: Vec<A>) -> Self {
        Formula {
            tag: Tag::Sigma,
            level: 0,
            body: Body::Atoms(atoms),
        }
    }

    /// `Π^p_0`: finite disjunction of the negations of `atoms`.
    pub fn disj_neg(atoms: Vec<A>) -> Self {
        Formula {
            tag: Tag::Pi,
            level: 0,
            body: Body::Atoms(atoms),
        }
    }

    pub fn atoms(tag: Tag, atoms: Vec<A>) -> Self {
        Formula {
            tag,
            level: 0,
            body: Body::Atoms(atoms),
        }
    }

    /// Join over a finite family; the level is computed from the members.
    pub fn join(tag: Tag, clauses: Vec<Clause<A>>) -> Self {
        let level = clauses.iter().map(Clause::level).max().unwrap_or(1);
        Formula {
            tag,
            level,
            body: Body::Join(Family::Finite(clauses)),
        }
    }

    /// Join over a stream; the level must be declared.
    pub fn join_stream(tag: Tag, level: u32, stream: Stream<Clause<A>>) -> Self {
        assert!(level >= 1, "a join has level at least 1");
        Formula {
            tag,
            level,
            body: Body::Join(Family::Stream(stream)),
        }
    }

    pub fn join_family(tag: Tag, level: u32, family: Family<Clause<A>>) -> Self {
        match family {
            Family::Finite(v) => Formula::join(tag, v),
            Family::Stream(s) => Formula::join_stream(tag, level, s),
        }
    }

    /// `⋁ ∃x̄ σ` with a single disjunct.
    pub fn exists(bound: Vec<u32>, sigma0: Vec<A>) -> Self {
        Formula::join(Tag::Sigma, vec![Clause::base(bound, sigma0)])
    }

    pub fn tag(&self) -> Tag {
        self.tag
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn body(&self) -> &Body<A> {
        &self.body
    }

    pub fn family(&self) -> Option<&Family<Clause<A>>> {
        match &self.body {
            Body::Join(f) => Some(f),
            Body::Atoms(_) => None,
        }
    }

    /// Validates strict normal form and returns the least `(tag, level)`
    /// matching the shape. Stream families report their declared level
    /// after spot-checking their first members.
    pub fn classify(&self) -> Result<(Tag, u32)> {
        match &self.body {
            Body::Atoms(_) => Ok((self.tag, 0)),
            Body::Join(Family::Finite(clauses)) => {
                let mut base = false;
                let mut pair = false;
                let mut level = 1;
                for c in clauses {
                    check_clause(c, None)?;
                    match c.body {
                        ClauseBody::Base(_) => base = true,
                        ClauseBody::Pair(..) => pair = true,
                    }
                    level = level.max(c.level());
                }
                if base && pair {
                    return Err(Error::MalformedFormula(
                        "join mixes level-1 and higher-level members".into(),
                    ));
                }
                Ok((self.tag, level))
            }
            Body::Join(Family::Stream(s)) => {
                for p in 0..4 {
                    if let Some(c) = s.get(p) {
                        check_clause(&c, Some(self.level))?;
                    }
                }
                Ok((self.tag, self.level))
            }
        }
    }

    /// The De Morgan dual, node for node. Streams are dualized lazily and
    /// dualizing twice returns the original stream.
    pub fn neg(&self) -> Result<Formula<A>> {
        self.classify()?;
        Ok(self.dual())
    }

    pub(crate) fn dual(&self) -> Formula<A> {
        let body = match &self.body {
            Body::Atoms(a) => Body::Atoms(a.clone()),
            Body::Join(fam) => Body::Join(fam.dualize(|c: Clause<A>| c.dual())),
        };
        Formula {
            tag: self.tag.dual(),
            level: self.level,
            body,
        }
    }

    /// Free variables of the finite part of the formula.
    pub fn free_vars(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<u32>) {
        match &self.body {
            Body::Atoms(atoms) => {
                let mut vs = Vec::new();
                atoms.iter().for_each(|a| a.collect_vars(&mut vs));
                out.extend(vs);
            }
            Body::Join(Family::Finite(cs)) => cs.iter().for_each(|c| c.collect_free(out)),
            Body::Join(Family::Stream(_)) => {}
        }
    }

    /// Replaces free variables by universe elements. Bound variables shadow
    /// the assignment inside their clause.
    pub fn substitute(&self, assignment: &BTreeMap<u32, u64>) -> Result<Formula<A>> {
        if let Some(v) = self.free_vars().into_iter().find(|v| !assignment.contains_key(v)) {
            return Err(Error::UnboundVariable(v));
        }
        Ok(self.substitute_inner(assignment))
    }

    pub(crate) fn substitute_inner(&self, map: &BTreeMap<u32, u64>) -> Formula<A> {
        if map.is_empty() {
            return self.clone();
        }
        let body = match &self.body {
            Body::Atoms(atoms) => Body::Atoms(atoms.iter().map(|a| a.substitute(map)).collect()),
            Body::Join(fam) => {
                let label = match fam {
                    Family::Stream(s) => {
                        let mut h = Fnv::new();
                        for (k, v) in map {
                            h.write_u64(*k as u64);
                            h.write_u64(*v);
                        }
                        format!("{}.sub{:08x}", s.label(), h.finish() as u32)
                    }
                    Family::Finite(_) => String::new(),
                };
                let map = map.clone();
                Body::Join(fam.map(label, move |c: Clause<A>| c.substitute_inner(&map)))
            }
        };
        Formula {
            tag: self.tag,
            level: self.level,
            body,
        }
    }

    /// Structural fingerprint; streams contribute their labels.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Fnv::new();
        self.hash_into(&mut h);
        h.finish()
    }

    fn hash_into(&self, h: &mut Fnv) {
        h.write(match self.tag {
            Tag::Sigma => b"S",
            Tag::Pi => b"P",
        });
        h.write_u64(self.level as u64);
        match &self.body {
            Body::Atoms(atoms) => {
                h.write(b"(");
                atoms.iter().for_each(|a| a.hash_into(h));
                h.write(b")");
            }
            Body::Join(Family::Finite(cs)) => {
                h.write(b"{");
                cs.iter().for_each(|c| c.hash_into(h));
                h.write(b"}");
            }
            Body::Join(Family::Stream(s)) => {
                h.write(b"g");
                h.write(s.label().as_bytes());
            }
        }
    }

    /// Sorts atom lists and finite families into canonical order.
    pub fn canonicalize(&self) -> Formula<A> {
        let body = match &self.body {
            Body::Atoms(atoms) => {
                let mut atoms = atoms.clone();
                atoms.sort();
                Body::Atoms(atoms)
            }
            Body::Join(Family::Finite(cs)) => {
                let mut cs: Vec<_> = cs.iter().map(Clause::canonical).collect();
                cs.sort_by(cmp_clause);
                Body::Join(Family::Finite(cs))
            }
            Body::Join(s) => Body::Join(s.clone()),
        };
        Formula {
            tag: self.tag,
            level: self.level,
            body,
        }
    }

    /// Quantifier depth of the finite part; `None` if a stream is reached.
    pub fn quantifier_depth(&self) -> Option<usize> {
        match &self.body {
            Body::Atoms(_) => Some(0),
            Body::Join(Family::Finite(cs)) => cs.iter().try_fold(0, |acc, c| {
                let inner = match &c.body {
                    ClauseBody::Base(_) => 0,
                    ClauseBody::Pair(s, p) => s.quantifier_depth()?.max(p.quantifier_depth()?),
                };
                Some(acc.max(c.bound.len() + inner))
            }),
            Body::Join(Family::Stream(_)) => None,
        }
    }

    /// True if every family reachable from the root is finite.
    pub fn is_finitary(&self) -> bool {
        self.quantifier_depth().is_some()
    }
}

fn check_clause<A: AtomLike>(c: &Clause<A>, level: Option<u32>) -> Result<()> {
    let mut seen = BTreeSet::new();
    if !c.bound.iter().all(|v| seen.insert(*v)) {
        return Err(Error::MalformedFormula("repeated variable in a bound tuple".into()));
    }
    match &c.body {
        ClauseBody::Base(_) => {
            if matches!(level, Some(l) if l != 1) {
                return Err(Error::MalformedFormula("level-1 member under a higher join".into()));
            }
        }
        ClauseBody::Pair(s, p) => {
            if s.tag != Tag::Sigma || p.tag != Tag::Pi {
                return Err(Error::MalformedFormula(
                    "pair members need a Sigma part and a Pi part".into(),
                ));
            }
            let (_, ls) = s.classify()?;
            let (_, lp) = p.classify()?;
            if let Some(l) = level {
                if l < 2 || ls >= l || lp >= l {
                    return Err(Error::MalformedFormula(format!(
                        "member levels ({ls}, {lp}) not below join level {l}"
                    )));
                }
            }
        }
    }
    Ok(())
}

fn cmp_formula<A: AtomLike>(a: &Formula<A>, b: &Formula<A>) -> Ordering {
    a.tag
        .cmp(&b.tag)
        .then(a.level.cmp(&b.level))
        .then_with(|| match (&a.body, &b.body) {
            (Body::Atoms(x), Body::Atoms(y)) => x.cmp(y),
            (Body::Atoms(_), _) => Ordering::Less,
            (_, Body::Atoms(_)) => Ordering::Greater,
            (Body::Join(Family::Finite(x)), Body::Join(Family::Finite(y))) => {
                for (c, d) in x.iter().zip(y) {
                    let o = cmp_clause(c, d);
                    if o != Ordering::Equal {
                        return o;
                    }
                }
                x.len().cmp(&y.len())
            }
            (Body::Join(Family::Finite(_)), _) => Ordering::Less,
            (_, Body::Join(Family::Finite(_))) => Ordering::Greater,
            (Body::Join(Family::Stream(x)), Body::Join(Family::Stream(y))) => x.label().cmp(y.label()),
        })
}

fn cmp_clause<A: AtomLike>(a: &Clause<A>, b: &Clause<A>) -> Ordering {
    a.bound.cmp(&b.bound).then_with(|| match (&a.body, &b.body) {
        (ClauseBody::Base(x), ClauseBody::Base(y)) => x.cmp(y),
        (ClauseBody::Base(_), _) => Ordering::Less,
        (_, ClauseBody::Base(_)) => Ordering::Greater,
        (ClauseBody::Pair(s, p), ClauseBody::Pair(t, q)) => cmp_formula(s, t).then_with(|| cmp_formula(p, q)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn le(a: u32, b: u32) -> TAtom {
        TAtom::new(2, &[a, b])
    }

    #[test]
    fn classify_levels() {
        let s0 = TFormula::conj(vec![le(0, 1), TAtom::eq(0, 1)]);
        assert_eq!(s0.classify().unwrap(), (Tag::Sigma, 0));
        let s1 = TFormula::exists(vec![0], vec![TAtom::eq(0, 0)]);
        assert_eq!(s1.classify().unwrap(), (Tag::Sigma, 1));
        let p1 = TFormula::exists(vec![1], vec![le(0, 1)]).neg().unwrap();
        let p2 = TFormula::join(Tag::Pi, vec![Clause::pair(vec![0], s1.clone(), p1)]);
        assert_eq!(p2.classify().unwrap(), (Tag::Pi, 2));
    }

    #[test]
    fn classify_rejects_mixed_and_misplaced_parts() {
        let s1 = TFormula::exists(vec![0], vec![TAtom::eq(0, 0)]);
        let bad = TFormula::join(Tag::Sigma, vec![Clause::pair(vec![], s1.clone(), s1.clone())]);
        assert!(matches!(bad.classify(), Err(Error::MalformedFormula(_))));
        let mixed = TFormula::join(
            Tag::Sigma,
            vec![
                Clause::base(vec![], vec![]),
                Clause::pair(vec![], s1.clone(), s1.neg().unwrap()),
            ],
        );
        assert!(mixed.classify().is_err());
        let dup = TFormula::exists(vec![0, 0], vec![]);
        assert!(dup.classify().is_err());
    }

    #[test]
    fn neg_of_sigma0_is_pi0_over_same_atoms() {
        let s0 = TFormula::conj(vec![le(0, 1), TAtom::eq(0, 1)]);
        let n = s0.neg().unwrap();
        assert_eq!(n.classify().unwrap(), (Tag::Pi, 0));
        assert_eq!(n.body(), s0.body());
        assert_eq!(n.neg().unwrap(), s0);
    }

    #[test]
    fn substitute_respects_binding() {
        let f = TFormula::exists(vec![1], vec![le(0, 1)]);
        let mut m = BTreeMap::new();
        m.insert(0, 3);
        m.insert(1, 9);
        let g = f.substitute(&m).unwrap();
        let c = &g.family().unwrap().as_finite().unwrap()[0];
        assert_eq!(
            c.body,
            ClauseBody::Base(vec![TAtom {
                sym: 2,
                args: vec![Term::Const(3), Term::Var(1)]
            }])
        );
        assert_eq!(g.classify().unwrap(), f.classify().unwrap());
        assert!(matches!(f.substitute(&BTreeMap::new()), Err(Error::UnboundVariable(0))));
    }

    #[test]
    fn stream_neg_roundtrip_is_identical() {
        let s = Stream::new("chain", |p| Some(Clause::base(vec![], vec![NAtom::D(p as u64)])));
        let f = NFormula::join_stream(Tag::Sigma, 1, s);
        let n = f.neg().unwrap();
        assert_eq!(n.tag(), Tag::Pi);
        assert_eq!(n.neg().unwrap(), f);
    }
}
