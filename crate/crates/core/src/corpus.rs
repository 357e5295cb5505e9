//! Seeded generators of normal-form formulas, N-formulas and sentences.

use crate::formula::syntax::parse;
use crate::formula::{Clause, Formula, NAtom, NFormula, TAtom, TFormula, Tag, Vocabulary};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Size limits for generated formulas.
#[derive(Clone, Copy, Debug)]
pub struct Shape {
    /// Members per join, at least 1.
    pub width: usize,
    /// Atoms per conjunction.
    pub atoms: usize,
    /// Variables bound by one clause.
    pub bound: usize,
    /// Variables bound along any branch, counting the enclosing scope.
    pub depth: usize,
}

impl Shape {
    pub const SMALL: Shape = Shape {
        width: 3,
        atoms: 3,
        bound: 2,
        depth: 4,
    };
}

trait AtomGen {
    type Atom: crate::formula::AtomLike;
    fn atom(&self, rng: &mut ChaCha8Rng, scope: u32) -> Option<Self::Atom>;
    fn quantifies(&self) -> bool;
}

struct TGen;

impl AtomGen for TGen {
    type Atom = TAtom;

    fn atom(&self, rng: &mut ChaCha8Rng, scope: u32) -> Option<TAtom> {
        if scope == 0 {
            return None;
        }
        let sym = rng.gen_range(0..3);
        let (a, b) = (rng.gen_range(0..scope), rng.gen_range(0..scope));
        Some(TAtom::new(sym, &[a, b]))
    }

    fn quantifies(&self) -> bool {
        true
    }
}

struct NGen {
    support: u64,
}

impl AtomGen for NGen {
    type Atom = NAtom;

    fn atom(&self, rng: &mut ChaCha8Rng, _scope: u32) -> Option<NAtom> {
        Some(match rng.gen_range(0..10) {
            0 => NAtom::Top,
            1 => NAtom::Bot,
            _ => NAtom::D(rng.gen_range(0..self.support)),
        })
    }

    fn quantifies(&self) -> bool {
        false
    }
}

fn atoms<G: AtomGen>(g: &G, rng: &mut ChaCha8Rng, scope: u32, shape: &Shape) -> Vec<G::Atom> {
    let n = rng.gen_range(0..=shape.atoms);
    let set: BTreeSet<G::Atom> = (0..n).filter_map(|_| g.atom(rng, scope)).collect();
    set.into_iter().collect()
}

fn bound<G: AtomGen>(g: &G, rng: &mut ChaCha8Rng, scope: u32, shape: &Shape) -> Vec<u32> {
    if !g.quantifies() {
        return vec![];
    }
    let room = shape.depth.saturating_sub(scope as usize).min(shape.bound);
    let b = rng.gen_range(0..=room) as u32;
    (scope..scope + b).collect()
}

fn formula<G: AtomGen>(g: &G, rng: &mut ChaCha8Rng, tag: Tag, level: u32, scope: u32, shape: &Shape) -> Formula<G::Atom> {
    if level == 0 {
        return Formula::atoms(tag, atoms(g, rng, scope, shape));
    }
    let width = rng.gen_range(1..=shape.width);
    let mut clauses = Vec::with_capacity(width);
    for i in 0..width {
        let vars = bound(g, rng, scope, shape);
        let inner = scope + vars.len() as u32;
        let clause = if level == 1 {
            Clause::base(vars, atoms(g, rng, inner, shape))
        } else {
            // the first member carries the full level on one side
            let top_sigma = rng.gen_bool(0.5);
            let mut lv = || rng.gen_range(0..level);
            let (ls, lp) = match (i, top_sigma) {
                (0, true) => (level - 1, lv()),
                (0, false) => (lv(), level - 1),
                _ => (lv(), lv()),
            };
            let s = formula(g, rng, Tag::Sigma, ls, inner, shape);
            let p = formula(g, rng, Tag::Pi, lp, inner, shape);
            Clause::pair(vars, s, p)
        };
        clauses.push(clause);
    }
    Formula::join(tag, clauses)
}

/// Random τ-formula over the order vocabulary with free variables among
/// `x_0 … x_{scope-1}`.
pub fn random_tformula(rng: &mut ChaCha8Rng, tag: Tag, level: u32, scope: u32, shape: &Shape) -> TFormula {
    formula(&TGen, rng, tag, level, scope, shape)
}

/// Random finite N-formula with atoms `⊤`, `⊥`, `D(n)` for `n < support`.
pub fn random_nformula(rng: &mut ChaCha8Rng, tag: Tag, level: u32, support: u64, shape: &Shape) -> NFormula {
    formula(&NGen { support }, rng, tag, level, 0, shape)
}

fn random_tag(rng: &mut ChaCha8Rng) -> Tag {
    if rng.gen_bool(0.5) {
        Tag::Sigma
    } else {
        Tag::Pi
    }
}

/// `n` formulas of levels `0..=max_level`, both tags, free variables among
/// `x_0, x_1`.
pub fn formula_corpus(seed: u64, n: usize, max_level: u32) -> Vec<TFormula> {
    let mut r = rng(seed);
    (0..n)
        .map(|_| {
            let tag = random_tag(&mut r);
            let level = r.gen_range(0..=max_level);
            random_tformula(&mut r, tag, level, 2, &Shape::SMALL)
        })
        .collect()
}

/// `n` finite N-formulas of levels `0..=max_level` over `D(0) … D(support-1)`.
pub fn nformula_corpus(seed: u64, n: usize, max_level: u32, support: u64) -> Vec<NFormula> {
    let mut r = rng(seed);
    (0..n)
        .map(|_| {
            let tag = random_tag(&mut r);
            let level = r.gen_range(0..=max_level);
            random_nformula(&mut r, tag, level, support, &Shape::SMALL)
        })
        .collect()
}

/// Sentences over the order vocabulary used as fixed points of the corpus.
pub const LANDMARKS: [&str; 8] = [
    // a least element
    "OR[i in {EX x0 . ((&)) & (AND[i in {ALL x1 . ~x0 != x1 | ~Le(x1,x0)}])}]",
    // a greatest element
    "OR[i in {EX x0 . ((&)) & (AND[i in {ALL x1 . ~x0 != x1 | ~Le(x0,x1)}])}]",
    // no least element
    "AND[i in {ALL x0 . (OR[i in {EX x1 . Le(x1,x0) & x1 != x0}]) | (AND[i in {ALL x1 . ~x0 = x0}])}]",
    // no greatest element
    "AND[i in {ALL x0 . (OR[i in {EX x1 . Le(x0,x1) & x1 != x0}]) | (AND[i in {ALL x1 . ~x0 = x0}])}]",
    "OR[i in {EX x0 x1 . Le(x0,x1) & x0 != x1}]",
    "AND[i in {ALL x0 x1 . ~Le(x0,x1) | ~Le(x1,x0) | ~x0 != x1}]",
    "OR[i in {EX x0 . x0 = x0}]",
    "AND[i in {ALL x0 . ~x0 != x0}]",
];

/// Level-≤2 sentences of quantifier depth ≤ 2 over the order vocabulary:
/// the landmarks followed by seeded random sentences, `n` in total.
pub fn sentence_corpus(seed: u64, n: usize) -> Vec<TFormula> {
    let v = Vocabulary::linear_order();
    let mut out: Vec<TFormula> = LANDMARKS
        .iter()
        .take(n)
        .map(|s| parse(s, &v, None).expect("landmark sentence parses"))
        .collect();
    let shape = Shape {
        width: 2,
        atoms: 2,
        bound: 2,
        depth: 2,
    };
    let mut r = rng(seed);
    while out.len() < n {
        let tag = random_tag(&mut r);
        let level = r.gen_range(1..=2);
        out.push(random_tformula(&mut r, tag, level, 0, &shape));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpora_are_deterministic_and_classified() {
        let a = formula_corpus(3, 40, 3);
        let b = formula_corpus(3, 40, 3);
        assert_eq!(a, b);
        for f in &a {
            let (tag, level) = f.classify().unwrap();
            assert_eq!((tag, level), (f.tag(), f.level()));
        }
        assert!(a.iter().any(|f| f.level() == 3));
        for f in nformula_corpus(5, 40, 2, 20) {
            f.classify().unwrap();
        }
    }

    #[test]
    fn sentences_are_closed() {
        let s = sentence_corpus(0, 30);
        assert_eq!(s.len(), 30);
        for f in &s {
            assert!(f.free_vars().is_empty());
            assert!(f.level() <= 2);
            assert!(f.quantifier_depth().unwrap() <= 2);
        }
    }
}
