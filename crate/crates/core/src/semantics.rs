//! Truth of τ-formulas: exact on finite structures, exact by cutoff on the
//! catalog orders, truncated for formulas with stream families, and
//! three-valued against enumerated diagrams.

use crate::error::{Error, Result};
use crate::family::{Family, Stream, Tri};
use crate::formula::{Body, Clause, ClauseBody, TAtom, TFormula, Tag, Term, EQ, NEQ};
use crate::nformula::{eval_n, SetOracle};
use crate::pullback::sentence_to_nformula;
use crate::structures::{AtomCodec, Catalog, DiagramStream, Structure};
use std::collections::{BTreeMap, BTreeSet};

/// How quantifiers and stream families are cut down to finite searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cutoff {
    /// Multiplier on the fresh elements a quantifier may choose beyond the
    /// current parameters.
    pub scale: u64,
    /// `Some(w)`: every quantifier gets `w` fresh elements regardless of the
    /// remaining depth (needed once streams hide the depth).
    pub window: Option<u64>,
    /// `Some(v)`: on infinite universes, block streams extend the current
    /// condition by at most `v` elements, and a member is only tried at
    /// lengths it does not overflow; `None` rejects them.
    pub conditions: Option<usize>,
    /// `Some(k)`: streams without block structure are cut after `k`
    /// members; `None` rejects them.
    pub streams: Option<usize>,
}

impl Cutoff {
    pub fn exact(scale: u64) -> Self {
        Cutoff {
            scale,
            window: None,
            conditions: None,
            streams: None,
        }
    }

    pub fn truncated(window: u64, conditions: usize, streams: usize) -> Self {
        Cutoff {
            scale: 1,
            window: Some(window),
            conditions: Some(conditions),
            streams: Some(streams),
        }
    }

    /// Window, scale and stream prefix doubled; condition length plus one,
    /// since the cost of a search is exponential in it.
    pub fn grown(self) -> Self {
        Cutoff {
            scale: self.scale * 2,
            window: self.window.map(|w| w * 2),
            conditions: self.conditions.map(|v| v + 1),
            streams: self.streams.map(|k| k * 2),
        }
    }
}

enum Universe<'a> {
    Finite(&'a dyn Structure, u64),
    Catalog(&'a Catalog),
}

struct Evaluator<'a> {
    universe: Universe<'a>,
    cut: Cutoff,
}

pub type Env = BTreeMap<u32, u64>;

/// The finite stand-in for the universe of `c` seen by a quantifier with
/// parameters `params` and `d` quantifiers still to go (this one included).
pub fn cutoff_range(c: &Catalog, params: &BTreeSet<u64>, d: u64, scale: u64) -> Vec<u64> {
    let fresh = d * scale;
    match c {
        Catalog::Omega | Catalog::OmegaStar => {
            let top = params.iter().max().copied().unwrap_or(0) + fresh + 1;
            (0..=top).collect()
        }
        Catalog::Fin(m) => (0..*m).collect(),
        Catalog::Order(t) => (0..t.size().unwrap()).collect(),
        Catalog::Tilde(s) => {
            let classes: BTreeSet<u64> = params.iter().map(|&e| crate::coding::unpair(e).0).collect();
            let top_rank = params.iter().map(|&e| crate::coding::unpair(e).1).max().unwrap_or(0) + fresh + 1;
            let mut out = Vec::new();
            for c in cutoff_range(s, &classes, d, scale) {
                if s.is_real(c) {
                    out.extend((0..=top_rank).map(|r| crate::coding::pair(c, r)));
                }
            }
            out.sort_unstable();
            out
        }
        Catalog::Pad(s) => {
            let mut out: BTreeSet<u64> = cutoff_range(s, params, d, scale).into_iter().collect();
            out.extend(params.iter().copied());
            if has_ghosts(s) {
                let mut need = fresh;
                let mut e = 0;
                while need > 0 {
                    if !s.is_real(e) && !params.contains(&e) {
                        out.insert(e);
                        need -= 1;
                    }
                    e += 1;
                }
            }
            out.into_iter().collect()
        }
    }
}

/// The clause forcing emits for a conjunction mentioning a position beyond
/// a condition of length `m`.
fn is_overflow(c: &Clause<TAtom>, m: u32) -> bool {
    match &c.body {
        ClauseBody::Base(atoms) => {
            c.bound.contains(&m)
                && c.bound.contains(&(m + 1))
                && atoms.contains(&TAtom::neq(m, m + 1))
                && atoms.contains(&TAtom::eq(m, m + 1))
        }
        ClauseBody::Pair(..) => false,
    }
}

/// Whether member `c` of a block at condition length `m` only mentions
/// positions below `m`: every part has a member that is not an overflow,
/// looking at the first `probe` members of each family.
fn settled(c: &Clause<TAtom>, m: u32, probe: usize) -> bool {
    match &c.body {
        ClauseBody::Base(_) => !is_overflow(c, m),
        ClauseBody::Pair(s, p) => settled_formula(s, m, probe) && settled_formula(p, m, probe),
    }
}

fn settled_formula(f: &TFormula, m: u32, probe: usize) -> bool {
    let Some(fam) = f.family() else {
        return true;
    };
    let fam = match fam {
        Family::Stream(s) => match s.blocks() {
            Some(b) => (b.block)(0),
            None => fam.clone(),
        },
        Family::Finite(_) => fam.clone(),
    };
    let members = fam.prefix(probe);
    members.is_empty() || members.iter().any(|c| settled(c, m, probe))
}

/// A conjunction containing `t = u` and `t ≠ u`, or `t ≠ t`.
fn contradictory(atoms: &[TAtom]) -> bool {
    atoms.iter().any(|a| {
        a.sym == NEQ && (a.args[0] == a.args[1] || atoms.iter().any(|b| b.sym == EQ && same_pair(&a.args, &b.args)))
    })
}

fn same_pair(a: &[Term], b: &[Term]) -> bool {
    (a[0] == b[0] && a[1] == b[1]) || (a[0] == b[1] && a[1] == b[0])
}

/// Whether every cutoff range of `c` consists of real elements drawn from
/// an infinite supply.
fn infinitely_many_reals(c: &Catalog) -> bool {
    match c {
        Catalog::Omega | Catalog::OmegaStar | Catalog::Tilde(_) => true,
        Catalog::Fin(_) | Catalog::Order(_) | Catalog::Pad(_) => false,
    }
}

/// Drops bound variables that occur only in `≠` atoms, together with those
/// atoms: with infinitely many real elements they can always be chosen.
fn drop_free_choices(bound: &[u32], atoms: &[TAtom]) -> (Vec<u32>, Vec<TAtom>) {
    let pinned: BTreeSet<u32> = atoms.iter().filter(|a| a.sym != NEQ).flat_map(|a| a.var_indices()).collect();
    let free: BTreeSet<u32> = bound.iter().copied().filter(|v| !pinned.contains(v)).collect();
    let bound = bound.iter().copied().filter(|v| !free.contains(v)).collect();
    let atoms = atoms
        .iter()
        .filter(|a| !a.var_indices().iter().any(|v| free.contains(v)))
        .cloned()
        .collect();
    (bound, atoms)
}

fn has_ghosts(c: &Catalog) -> bool {
    matches!(c.base(), Catalog::Fin(_) | Catalog::Order(_))
}

impl<'a> Evaluator<'a> {
    fn structure(&self) -> &dyn Structure {
        match self.universe {
            Universe::Finite(s, _) => s,
            Universe::Catalog(c) => c,
        }
    }

    fn finite_size(&self) -> Option<u64> {
        match self.universe {
            Universe::Finite(_, n) => Some(n),
            Universe::Catalog(c) => c.size(),
        }
    }

    fn range(&self, env: &Env, depth: u64) -> Vec<u64> {
        match self.universe {
            Universe::Finite(_, n) => (0..n).collect(),
            Universe::Catalog(c) => {
                let params: BTreeSet<u64> = env.values().copied().collect();
                match self.cut.window {
                    Some(w) => cutoff_range(c, &params, w, 1),
                    None => cutoff_range(c, &params, depth, self.cut.scale),
                }
            }
        }
    }

    fn atom(&self, a: &TAtom, env: &Env) -> Result<bool> {
        let mut args = Vec::with_capacity(a.args.len());
        for t in &a.args {
            args.push(match t {
                Term::Var(v) => *env.get(v).ok_or(Error::UnboundVariable(*v))?,
                Term::Const(c) => *c,
            });
        }
        if let Some(n) = self.finite_size() {
            if args.iter().any(|&e| e >= n) {
                return Ok(false);
            }
        }
        Ok(self.structure().holds(a.sym, &args))
    }

    fn atoms(&self, tag: Tag, atoms: &[TAtom], env: &Env) -> Result<bool> {
        match tag {
            Tag::Sigma => {
                for a in atoms {
                    if !self.atom(a, env)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Tag::Pi => {
                for a in atoms {
                    if !self.atom(a, env)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }

    fn formula(&self, f: &TFormula, env: &mut Env) -> Result<bool> {
        match f.body() {
            Body::Atoms(atoms) => self.atoms(f.tag(), atoms, env),
            Body::Join(fam) => self.family(f.tag(), fam, env),
        }
    }

    /// `⋁` (Σ) or `⋀` (Π) over the members of `fam`.
    fn family(&self, tag: Tag, fam: &Family<Clause<TAtom>>, env: &mut Env) -> Result<bool> {
        let decisive = tag == Tag::Sigma;
        match fam {
            Family::Finite(cs) => {
                for c in cs {
                    if self.clause(tag, c, env)? == decisive {
                        return Ok(decisive);
                    }
                }
                Ok(!decisive)
            }
            Family::Stream(s) => self.stream(tag, s, env),
        }
    }

    fn stream(&self, tag: Tag, s: &Stream<Clause<TAtom>>, env: &mut Env) -> Result<bool> {
        let decisive = tag == Tag::Sigma;
        if let Some(b) = s.blocks() {
            let decided = |k: usize, env: &mut Env| -> Result<bool> { Ok(self.family(tag, &(b.block)(k), env)? == decisive) };
            if let Some(n) = self.finite_size() {
                // longer tuples are never injective
                for k in 0..=(n as usize).saturating_sub(b.base_arity) {
                    if decided(k, env)? {
                        return Ok(decisive);
                    }
                }
                return Ok(!decisive);
            }
            let (Some(max), Some(positions)) = (self.cut.conditions, self.cut.streams) else {
                return Err(Error::InfiniteFamily);
            };
            // each member is tried at the blocks where it is settled
            let blocks: Vec<Family<Clause<TAtom>>> = (0..=max).map(|k| (b.block)(k)).collect();
            let mut present = 0;
            for p in 0..positions * positions {
                if present == positions {
                    break;
                }
                let mut seen = false;
                for (k, block) in blocks.iter().enumerate() {
                    let Some(c) = block.get(p) else { continue };
                    seen = true;
                    if settled(&c, (b.base_arity + k) as u32, positions) && self.clause(tag, &c, env)? == decisive {
                        return Ok(decisive);
                    }
                }
                if seen {
                    present += 1;
                }
            }
            return Ok(!decisive);
        }
        // flattened streams leave gaps, so the cut counts members present,
        // scanning at most `k²` positions
        let k = self.cut.streams.ok_or(Error::InfiniteFamily)?;
        let mut present = 0;
        for p in 0..k * k {
            if present == k {
                break;
            }
            if let Some(c) = s.get(p) {
                present += 1;
                if self.clause(tag, &c, env)? == decisive {
                    return Ok(decisive);
                }
            }
        }
        Ok(!decisive)
    }

    fn clause(&self, tag: Tag, c: &Clause<TAtom>, env: &mut Env) -> Result<bool> {
        let body_depth = match (&c.body, self.cut.window, &self.universe) {
            (_, Some(_), _) | (_, _, Universe::Finite(..)) => 0,
            (ClauseBody::Base(_), ..) => 0,
            (ClauseBody::Pair(s, p), ..) => match (s.quantifier_depth(), p.quantifier_depth()) {
                (Some(a), Some(b)) => a.max(b) as u64,
                _ if matches!(self.universe, Universe::Catalog(c) if c.size().is_some()) => 0,
                _ => return Err(Error::InfiniteFamily),
            },
        };
        if let ClauseBody::Base(atoms) = &c.body {
            // Σ: ∃x̄ ⋀ atoms; Π: ∀x̄ ⋁ ¬atoms = ¬∃x̄ ⋀ atoms
            return Ok(self.satisfiable(&c.bound, atoms, env)? == (tag == Tag::Sigma));
        }
        self.quantify(tag, c, 0, body_depth, env)
    }

    /// Whether some assignment of `bound` makes every atom true.
    fn satisfiable(&self, bound: &[u32], atoms: &[TAtom], env: &mut Env) -> Result<bool> {
        if contradictory(atoms) {
            return Ok(false);
        }
        let (bound, atoms) = match self.universe {
            Universe::Catalog(c) if infinitely_many_reals(c) => drop_free_choices(bound, atoms),
            _ => (bound.to_vec(), atoms.to_vec()),
        };
        // atoms checked as soon as their last bound variable is assigned
        let mut ready: Vec<Vec<&TAtom>> = vec![Vec::new(); bound.len() + 1];
        for a in &atoms {
            let last = a
                .var_indices()
                .iter()
                .filter_map(|v| bound.iter().position(|b| b == v))
                .max()
                .map_or(0, |i| i + 1);
            ready[last].push(a);
        }
        let saved: Vec<Option<u64>> = bound.iter().map(|v| env.remove(v)).collect();
        let out = self.search(&bound, &ready, 0, env);
        for (v, old) in bound.iter().zip(saved) {
            env.remove(v);
            if let Some(old) = old {
                env.insert(*v, old);
            }
        }
        out
    }

    fn search(&self, bound: &[u32], ready: &[Vec<&TAtom>], i: usize, env: &mut Env) -> Result<bool> {
        for a in &ready[i] {
            if !self.atom(a, env)? {
                return Ok(false);
            }
        }
        if i == bound.len() {
            return Ok(true);
        }
        for e in self.range(env, (bound.len() - i) as u64) {
            env.insert(bound[i], e);
            if self.search(bound, ready, i + 1, env)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn quantify(&self, tag: Tag, c: &Clause<TAtom>, i: usize, body_depth: u64, env: &mut Env) -> Result<bool> {
        if i == c.bound.len() {
            return match &c.body {
                ClauseBody::Base(atoms) => self.atoms(tag, atoms, env),
                ClauseBody::Pair(s, p) => {
                    let a = self.formula(s, env)?;
                    match tag {
                        Tag::Sigma => Ok(a && self.formula(p, env)?),
                        Tag::Pi => Ok(a || self.formula(p, env)?),
                    }
                }
            };
        }
        let v = c.bound[i];
        let saved = env.remove(&v);
        let depth = (c.bound.len() - i) as u64 + body_depth;
        let decisive = tag == Tag::Sigma;
        let mut result = !decisive;
        for e in self.range(env, depth) {
            env.insert(v, e);
            if self.quantify(tag, c, i + 1, body_depth, env)? == decisive {
                result = decisive;
                break;
            }
        }
        env.remove(&v);
        if let Some(old) = saved {
            env.insert(v, old);
        }
        Ok(result)
    }
}

fn check_assignment(f: &TFormula, assignment: &Env) -> Result<()> {
    match f.free_vars().into_iter().find(|v| !assignment.contains_key(v)) {
        Some(v) => Err(Error::UnboundVariable(v)),
        None => Ok(()),
    }
}

/// Classical satisfaction on a finite structure. Block streams collapse to
/// the blocks that still carry injective tuples; other streams are rejected.
pub fn evaluate_finite(a: &dyn Structure, f: &TFormula, assignment: &Env) -> Result<bool> {
    let n = a.size().ok_or(Error::InfiniteUniverse)?;
    check_assignment(f, assignment)?;
    let ev = Evaluator {
        universe: Universe::Finite(a, n),
        cut: Cutoff::exact(1),
    };
    ev.formula(f, &mut assignment.clone())
}

/// Satisfaction in a catalog order, quantifiers ranging over
/// [`cutoff_range`]. Formulas must have finite families.
pub fn evaluate_catalog(c: &Catalog, f: &TFormula, assignment: &Env, scale: u64) -> Result<bool> {
    check_assignment(f, assignment)?;
    let ev = Evaluator {
        universe: Universe::Catalog(c),
        cut: Cutoff::exact(scale),
    };
    ev.formula(f, &mut assignment.clone())
}

/// Catalog evaluation at scale 1, checked against scales 2 and 3.
pub fn evaluate_catalog_stable(c: &Catalog, f: &TFormula) -> Result<(bool, bool)> {
    let env = Env::new();
    let a = evaluate_catalog(c, f, &env, 1)?;
    let stable = evaluate_catalog(c, f, &env, 2)? == a && evaluate_catalog(c, f, &env, 3)? == a;
    Ok((a, stable))
}

/// Evaluation with every cutoff fixed by `cut`; exact on finite universes
/// for all families except unhinted streams, which are truncated.
pub fn evaluate_truncated(c: &Catalog, f: &TFormula, assignment: &Env, cut: Cutoff) -> Result<bool> {
    check_assignment(f, assignment)?;
    let ev = Evaluator {
        universe: Universe::Catalog(c),
        cut,
    };
    ev.formula(f, &mut assignment.clone())
}

/// Result of the growing-cutoff oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Growing {
    pub value: bool,
    pub window: u64,
    pub conditions: usize,
    pub streams: usize,
    /// The value at these cutoffs equals the value at the grown cutoffs.
    pub stable: bool,
}

/// Evaluates at `start` and its growths until two consecutive results
/// agree or `rounds` growths are spent.
pub fn evaluate_growing(c: &Catalog, f: &TFormula, start: Cutoff, rounds: usize) -> Result<Growing> {
    let env = Env::new();
    let mut cut = start;
    let mut prev = evaluate_truncated(c, f, &env, cut)?;
    let mut stable = false;
    for _ in 0..rounds {
        let next = evaluate_truncated(c, f, &env, cut.grown())?;
        if next == prev {
            stable = true;
            break;
        }
        cut = cut.grown();
        prev = next;
    }
    Ok(Growing {
        value: prev,
        window: cut.window.unwrap_or(0),
        conditions: cut.conditions.unwrap_or(0),
        streams: cut.streams.unwrap_or(0),
        stable,
    })
}

/// A structure to search for witnesses in.
#[derive(Clone, Copy)]
pub enum Model<'a> {
    Finite(&'a dyn Structure),
    /// A catalog order at a cutoff scale.
    Catalog(&'a Catalog, u64),
}

impl Model<'_> {
    pub fn evaluate(&self, f: &TFormula, env: &Env) -> Result<bool> {
        match *self {
            Model::Finite(a) => evaluate_finite(a, f, env),
            Model::Catalog(c, scale) => evaluate_catalog(c, f, env, scale),
        }
    }

    fn range(&self, env: &Env, depth: u64) -> Result<Vec<u64>> {
        match *self {
            Model::Finite(a) => Ok((0..a.size().ok_or(Error::InfiniteUniverse)?).collect()),
            Model::Catalog(c, scale) => Ok(cutoff_range(c, &env.values().copied().collect(), depth, scale)),
        }
    }
}

/// The member of a finite top-level join that decides a sentence, with
/// values for its bound variables: a witness of a true Σ sentence or a
/// counterexample to a false Π sentence.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Witness {
    pub member: usize,
    pub assignment: Env,
}

pub fn witness(m: Model<'_>, f: &TFormula) -> Result<Option<Witness>> {
    let decisive = f.tag() == Tag::Sigma;
    let Some(Family::Finite(members)) = f.family() else {
        return Ok(None);
    };
    if m.evaluate(f, &Env::new())? != decisive {
        return Ok(None);
    }
    for (i, c) in members.iter().enumerate() {
        if m.evaluate(&crate::formula::Formula::join(f.tag(), vec![c.clone()]), &Env::new())? != decisive {
            continue;
        }
        let open = crate::formula::Formula::join(
            f.tag(),
            vec![Clause {
                bound: vec![],
                body: c.body.clone(),
            }],
        );
        let body_depth = match &c.body {
            ClauseBody::Base(_) => 0,
            ClauseBody::Pair(s, p) => s.quantifier_depth().unwrap_or(0).max(p.quantifier_depth().unwrap_or(0)) as u64,
        };
        let mut env = Env::new();
        if assign(m, &open, &c.bound, body_depth, decisive, &mut env)? {
            return Ok(Some(Witness { member: i, assignment: env }));
        }
    }
    Ok(None)
}

fn assign(m: Model<'_>, open: &TFormula, bound: &[u32], body_depth: u64, decisive: bool, env: &mut Env) -> Result<bool> {
    let Some((&v, rest)) = bound.split_first() else {
        return Ok(m.evaluate(open, env)? == decisive);
    };
    for e in m.range(env, bound.len() as u64 + body_depth)? {
        env.insert(v, e);
        if assign(m, open, rest, body_depth, decisive, env)? {
            return Ok(true);
        }
    }
    env.remove(&v);
    Ok(false)
}

/// Three-valued truth of a sentence in a structure known by an enumeration
/// of its diagram: compile to an N-formula and search under budget.
pub fn evaluate_budgeted(a: &DiagramStream, f: &TFormula, budget: u64) -> Result<Tri> {
    let codec = AtomCodec::shared(&a.vocab);
    let n = sentence_to_nformula(f, &codec)?;
    Ok(eval_n(&n, &SetOracle::Enumerated(a.codes.clone()), budget))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::syntax::parse;
    use crate::formula::Vocabulary;
    use crate::structures::Table;
    use std::sync::Arc;

    fn tf(s: &str) -> TFormula {
        parse(s, &Vocabulary::linear_order(), None).unwrap()
    }

    const PHI0: &str = "OR[i in {EX x0 . ((&)) & (AND[i in {ALL x1 . ~x0 != x1 | ~Le(x1,x0)}])}]";
    const PHI1: &str = "OR[i in {EX x0 . ((&)) & (AND[i in {ALL x1 . ~x0 != x1 | ~Le(x0,x1)}])}]";

    #[test]
    fn finite_examples() {
        let f = tf("OR[i in {EX x0 x1 . Le(x0,x1) & x0 != x1}]");
        let env = Env::new();
        assert!(evaluate_finite(&Table::linear_order(&[0, 1]), &f, &env).unwrap());
        assert!(!evaluate_finite(&Table::linear_order(&[0]), &f, &env).unwrap());
        let force_top = tf("OR[i in {EX x0 . x0 = x0}]");
        for n in 1..4 {
            assert!(evaluate_finite(&Table::linear_order(&(0..n).collect::<Vec<_>>()), &force_top, &env).unwrap());
        }
        let open = tf("Le(x0,x1)");
        assert_eq!(evaluate_finite(&Table::linear_order(&[0, 1]), &open, &env), Err(Error::UnboundVariable(0)));
    }

    #[test]
    fn separation_table() {
        let (p0, p1) = (tf(PHI0), tf(PHI1));
        let env = Env::new();
        assert!(evaluate_catalog(&Catalog::Omega, &p0, &env, 1).unwrap());
        assert!(!evaluate_catalog(&Catalog::Omega, &p1, &env, 1).unwrap());
        assert!(!evaluate_catalog(&Catalog::OmegaStar, &p0, &env, 1).unwrap());
        assert!(evaluate_catalog(&Catalog::OmegaStar, &p1, &env, 1).unwrap());
        for c in [Catalog::Omega.tilde(), Catalog::OmegaStar.tilde()] {
            let (v, stable) = evaluate_catalog_stable(&c, &p0).unwrap();
            assert!(!v && stable);
            let g = evaluate_growing(&c, &p0, Cutoff::truncated(2, 2, 4), 3).unwrap();
            assert!(!g.value && g.stable);
        }
    }

    #[test]
    fn witnesses() {
        let w = witness(Model::Catalog(&Catalog::Omega, 1), &tf(PHI0)).unwrap().unwrap();
        assert_eq!(w, Witness { member: 0, assignment: [(0, 0)].into() });
        assert_eq!(witness(Model::Catalog(&Catalog::OmegaStar, 1), &tf(PHI0)).unwrap(), None);
        let t = Table::linear_order(&[2, 0, 1]);
        let w = witness(Model::Finite(&t), &tf(PHI1)).unwrap().unwrap();
        assert_eq!(w.assignment[&0], 1);
        // a counterexample to a false Π sentence
        let p = tf("AND[i in {ALL x0 x1 . ~Le(x0,x1) | ~x0 != x1}]");
        let w = witness(Model::Finite(&t), &p).unwrap().unwrap();
        assert!(t.holds(2, &[w.assignment[&0], w.assignment[&1]]));
    }

    #[test]
    fn table_and_catalog_agree() {
        let fs = [
            PHI0,
            PHI1,
            "OR[i in {EX x0 x1 . Le(x0,x1) & x0 != x1}]",
            "AND[i in {ALL x0 x1 . ~Le(x0,x1) | ~Le(x1,x0) | ~x0 != x1}]",
        ];
        for m in 1..5u64 {
            let t = Table::linear_order(&(0..m).collect::<Vec<_>>());
            for s in fs {
                let f = tf(s);
                assert_eq!(
                    evaluate_finite(&t, &f, &Env::new()).unwrap(),
                    evaluate_catalog(&Catalog::Fin(m), &f, &Env::new(), 1).unwrap()
                );
            }
        }
    }

    #[test]
    fn positive_upward_preservation() {
        let v = Vocabulary::linear_order();
        let a = Table::new(v.clone(), 2, [("Le".to_string(), vec![vec![0, 0]])].into()).unwrap();
        let b = Table::new(v, 2, [("Le".to_string(), vec![vec![0, 0], vec![0, 1]])].into()).unwrap();
        let f = tf("OR[i in {EX x0 . Le(x0,x0)}, {EX x0 x1 . Le(x0,x1) & x0 != x1}]".replace("}, {", ", ").as_str());
        assert!(evaluate_finite(&a, &f, &Env::new()).unwrap());
        assert!(evaluate_finite(&b, &f, &Env::new()).unwrap());
    }

    #[test]
    fn budgeted_examples() {
        let omega = DiagramStream::by_name("omega").unwrap();
        let s1 = tf("OR[i in {EX x0 x1 . Le(x0,x1) & x0 != x1}]");
        assert_eq!(evaluate_budgeted(&omega, &s1, 10_000).unwrap(), Tri::True);
        let p1 = tf("AND[i in {ALL x0 x1 . ~Le(x0,x1)}]");
        assert_eq!(evaluate_budgeted(&omega, &p1, 10_000).unwrap(), Tri::False);
        let hard = tf("AND[i in {ALL x0 . ~x0 != x0}]");
        let small = evaluate_budgeted(&omega, &hard, 50).unwrap();
        assert_eq!(small, Tri::Unknown);
        let _ = Arc::new(0);
    }
}
