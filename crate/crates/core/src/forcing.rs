//! The forcing relation for N-formulas over a structure, generic enumerations
//! of finite structures, and the `Force` transform into τ-formulas.

use crate::coding::{decode_tuple, unpair, Fnv};
use crate::error::{Error, Result};
use crate::family::{Budget, Family, Stream, Tri};
use crate::formula::{Body, Clause, ClauseBody, Formula, NAtom, NFormula, TAtom, TFormula, Tag};
use crate::nformula::{eval_n, SetOracle};
use crate::structures::{AtomCodec, Structure};
use serde::Serialize;
use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

/// Injective finite sequence of universe elements.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Condition(Vec<u64>);

impl Condition {
    pub fn new(entries: Vec<u64>) -> Result<Self> {
        let set: BTreeSet<_> = entries.iter().collect();
        if set.len() != entries.len() {
            return Err(Error::InvalidCondition(format!("{entries:?} repeats an element")));
        }
        Ok(Condition(entries))
    }

    pub fn empty() -> Self {
        Condition(Vec::new())
    }

    pub fn entries(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn extends(&self, other: &Condition) -> bool {
        self.0.starts_with(&other.0)
    }

    fn push(&self, e: u64) -> Option<Condition> {
        if self.0.contains(&e) {
            return None;
        }
        let mut v = self.0.clone();
        v.push(e);
        Some(Condition(v))
    }
}

/// Every injective extension of `p` (including `p`) inside `{0..size-1}`,
/// shortest first, lexicographic within a length.
pub fn extensions(p: &Condition, size: u64) -> Vec<Condition> {
    let mut out = vec![p.clone()];
    let mut frontier = vec![p.clone()];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for q in &frontier {
            for e in 0..size {
                if let Some(r) = q.push(e) {
                    next.push(r);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// All injective sequences over `{0..size-1}`.
pub fn all_conditions(size: u64) -> Vec<Condition> {
    extensions(&Condition::empty(), size)
}

/// Forcing over a fixed structure.
pub struct Forcer<'a> {
    structure: &'a dyn Structure,
    codec: &'a AtomCodec,
}

impl<'a> Forcer<'a> {
    pub fn new(structure: &'a dyn Structure, codec: &'a AtomCodec) -> Self {
        Forcer { structure, codec }
    }

    /// `p ⊩ D(n)`: the atom holds under `x_i ↦ p_i`; atoms with a variable
    /// outside the condition are not forced.
    pub fn forces_atom(&self, p: &Condition, a: &NAtom) -> bool {
        match a {
            NAtom::Top => true,
            NAtom::Bot => false,
            NAtom::D(n) => {
                let atom = self.codec.decode(*n);
                let mut args = Vec::with_capacity(atom.args.len());
                for v in atom.var_indices() {
                    match p.0.get(v as usize) {
                        Some(&e) => args.push(e),
                        None => return false,
                    }
                }
                self.structure.holds(atom.sym, &args)
            }
        }
    }

    /// Exact forcing on a finite structure for formulas with finite families.
    pub fn forces(&self, p: &Condition, f: &NFormula) -> Result<bool> {
        let size = self.structure.size().ok_or(Error::InfiniteUniverse)?;
        if p.0.iter().any(|&e| e >= size) {
            return Err(Error::InvalidCondition(format!("{:?} leaves the universe", p.0)));
        }
        self.forces_in(p, f, size)
    }

    fn forces_in(&self, p: &Condition, f: &NFormula, size: u64) -> Result<bool> {
        if f.tag() == Tag::Pi {
            let g = f.dual();
            for q in extensions(p, size) {
                if self.forces_in(&q, &g, size)? {
                    return Ok(false);
                }
            }
            return Ok(true);
        }
        match f.body() {
            Body::Atoms(atoms) => Ok(atoms.iter().all(|a| self.forces_atom(p, a))),
            Body::Join(Family::Finite(cs)) => {
                for c in cs {
                    let ok = match &c.body {
                        ClauseBody::Base(atoms) => atoms.iter().all(|a| self.forces_atom(p, a)),
                        ClauseBody::Pair(s, t) => self.forces_in(p, s, size)? && self.forces_in(p, t, size)?,
                    };
                    if ok {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Body::Join(Family::Stream(_)) => Err(Error::InfiniteFamily),
        }
    }

    /// Semi-decision of `p ⊩ f` on any decidable structure: `True` means
    /// forced, `False` means not forced. Σ-joins confirm by a forced member,
    /// Π-formulas are refuted by an extension forcing the dual. Extensions
    /// and stream positions are charged to the budget.
    pub fn forces_budgeted(&self, p: &Condition, f: &NFormula, budget: u64) -> Tri {
        self.fb(p, f, &mut Budget::new(budget))
    }

    fn fb(&self, p: &Condition, f: &NFormula, budget: &mut Budget) -> Tri {
        if f.tag() == Tag::Pi {
            let g = f.dual();
            let size = self.structure.size();
            let mut undecided = false;
            let mut code = 0u64;
            loop {
                if !budget.charge() {
                    return Tri::Unknown;
                }
                let q = match size {
                    Some(k) => match nth_extension(p, k, code) {
                        Some(q) => Some(q),
                        None => {
                            return if undecided { Tri::Unknown } else { Tri::True };
                        }
                    },
                    None => coded_extension(p, code),
                };
                code += 1;
                if let Some(q) = q {
                    match self.fb(&q, &g, budget) {
                        Tri::True => return Tri::False,
                        Tri::Unknown => undecided = true,
                        Tri::False => {}
                    }
                }
            }
        }
        let clause = |c: &Clause<NAtom>, budget: &mut Budget| match &c.body {
            ClauseBody::Base(atoms) => Tri::from_bool(atoms.iter().all(|a| self.forces_atom(p, a))),
            ClauseBody::Pair(s, t) => match self.fb(p, s, budget) {
                Tri::False => Tri::False,
                a => match (a, self.fb(p, t, budget)) {
                    (_, Tri::False) => Tri::False,
                    (Tri::True, Tri::True) => Tri::True,
                    _ => Tri::Unknown,
                },
            },
        };
        match f.body() {
            Body::Atoms(atoms) => Tri::from_bool(atoms.iter().all(|a| self.forces_atom(p, a))),
            Body::Join(Family::Finite(cs)) => {
                let mut acc = Tri::False;
                for c in cs {
                    match clause(c, budget) {
                        Tri::True => return Tri::True,
                        Tri::Unknown => acc = Tri::Unknown,
                        Tri::False => {}
                    }
                }
                acc
            }
            Body::Join(Family::Stream(s)) => {
                let mut pos = 0;
                while budget.charge() {
                    if let Some(c) = s.get(pos) {
                        if clause(&c, budget) == Tri::True {
                            return Tri::True;
                        }
                    }
                    pos += 1;
                }
                Tri::Unknown
            }
        }
    }
}

/// The `code`-th injective extension of `p` inside `{0..k-1}`, in the order
/// of [`extensions`].
fn nth_extension(p: &Condition, k: u64, code: u64) -> Option<Condition> {
    thread_local! {
        static CACHE: std::cell::RefCell<HashMap<(Vec<u64>, u64), Arc<Vec<Condition>>>> = Default::default();
    }
    let all = CACHE.with(|c| {
        c.borrow_mut()
            .entry((p.0.clone(), k))
            .or_insert_with(|| Arc::new(extensions(p, k)))
            .clone()
    });
    all.get(code as usize).cloned()
}

/// Extension of `p` by the tuple coded by `code` (length then tuple code),
/// or `None` if it is not injective.
fn coded_extension(p: &Condition, code: u64) -> Option<Condition> {
    let (len, t) = unpair(code);
    let tail = decode_tuple(t, len as usize)?;
    let mut q = p.clone();
    for e in tail {
        q = q.push(e)?;
    }
    Some(q)
}

#[derive(Clone, Debug, Serialize)]
pub struct Decision {
    pub formula: usize,
    pub stage: usize,
    /// `true` if the stage forces the formula, `false` if it forces its negation.
    pub forced: bool,
}

/// Stages of a generic enumeration of a finite structure for a finite family.
#[derive(Clone, Debug, Serialize)]
pub struct GenericEnumeration {
    pub stages: Vec<Condition>,
    pub decisions: Vec<Decision>,
}

impl GenericEnumeration {
    /// The completed bijection `g`, `g(i) = stages.last()[i]`.
    pub fn bijection(&self) -> &[u64] {
        self.stages.last().map_or(&[], |s| s.entries())
    }

    /// `D_G` for `G = g^{-1}(A)`: atom `n` holds under `x_i ↦ g(i)`.
    pub fn pulled_diagram(&self, a: Arc<dyn Structure>, codec: Arc<AtomCodec>) -> SetOracle {
        let g = Condition(self.bijection().to_vec());
        SetOracle::Decidable(Arc::new(move |n| Forcer::new(&*a, &codec).forces_atom(&g, &NAtom::D(n))))
    }
}

/// Builds `p = p_0 ⊆ p_1 ⊆ …` where stage `2n+1` decides family member `n`
/// by the least deciding extension and stage `2n+2` adds the least missing
/// element; the last stage completes the bijection.
pub fn build_generic(
    a: &dyn Structure,
    codec: &AtomCodec,
    seed: &Condition,
    family: &[NFormula],
) -> Result<GenericEnumeration> {
    let size = a.size().ok_or(Error::InfiniteUniverse)?;
    let forcer = Forcer::new(a, codec);
    let mut cur = seed.clone();
    forcer.forces(&cur, &Formula::conj(vec![]))?;
    let mut stages = vec![cur.clone()];
    let mut decisions = Vec::new();
    let add_least = |cur: &Condition| (0..size).find_map(|e| cur.push(e)).unwrap_or_else(|| cur.clone());
    for (i, f) in family.iter().enumerate() {
        let g = f.neg()?;
        let mut found = None;
        for q in extensions(&cur, size) {
            if forcer.forces(&q, f)? {
                found = Some((q, true));
                break;
            }
            if forcer.forces(&q, &g)? {
                found = Some((q, false));
                break;
            }
        }
        let (q, forced) = found.expect("density: some extension decides the formula");
        cur = q;
        stages.push(cur.clone());
        decisions.push(Decision {
            formula: i,
            stage: stages.len() - 1,
            forced,
        });
        cur = add_least(&cur);
        stages.push(cur.clone());
    }
    while (cur.len() as u64) < size {
        cur = add_least(&cur);
        stages.push(cur.clone());
    }
    Ok(GenericEnumeration { stages, decisions })
}

/// Checks forcing-equals-truth on the target family: `(ℕ, D_G) ⊨ φ` iff
/// some stage forces `φ`.
pub fn forcing_equals_truth(
    a: Arc<dyn Structure>,
    codec: Arc<AtomCodec>,
    g: &GenericEnumeration,
    family: &[NFormula],
) -> Result<bool> {
    let d = g.pulled_diagram(a.clone(), codec.clone());
    let forcer = Forcer::new(&*a, &codec);
    for f in family {
        let truth = eval_n(f, &d, 1);
        let mut forced = false;
        for s in &g.stages {
            if forcer.forces(s, f)? {
                forced = true;
                break;
            }
        }
        if truth != Tri::from_bool(forced) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Which injectivity guards `Force_{D(n)}` carries.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum GuardMode {
    /// `u_i ≠ u_j` for all `i ≠ j` below `min(n, m)`.
    #[default]
    Literal,
    /// Only for variables occurring in the atom.
    Occurring,
}

#[derive(Clone, Debug)]
pub struct ForceConfig {
    pub guards: GuardMode,
    pub codec: Arc<AtomCodec>,
}

impl ForceConfig {
    pub fn new(codec: Arc<AtomCodec>) -> Self {
        ForceConfig {
            guards: GuardMode::Literal,
            codec,
        }
    }
}

/// `Force_f(x_0, …, x_{m-1})`. The result depends only on `f` and `m`.
pub fn force_transform(f: &NFormula, m: u32, cfg: &ForceConfig) -> Result<TFormula> {
    f.classify()?;
    Ok(force(f, m, cfg))
}

fn force_label(f: &NFormula, m: u32, cfg: &ForceConfig) -> String {
    let mut h = Fnv::new();
    h.write_u64(f.fingerprint());
    h.write_u64(m as u64);
    h.write(if cfg.guards == GuardMode::Literal { b"L" } else { b"O" });
    format!("force.{:016x}", h.finish())
}

/// One Σ-clause `∃x̄ ⋀ …` equivalent to forcing the conjunction `atoms`.
/// A position `>= m` gives `∃x_m x_{m+1} (x_m ≠ x_{m+1} ∧ x_m = x_{m+1})`,
/// kept apart from `⊥` (`∃x_m x_m ≠ x_m`) so evaluators can tell a
/// condition that is too short from a false one.
fn force_conj(atoms: &[NAtom], m: u32, cfg: &ForceConfig) -> Clause<TAtom> {
    let mut top = false;
    let mut bot = false;
    let mut overflow = false;
    let mut out = Vec::new();
    for a in atoms {
        match a {
            NAtom::Top => top = true,
            NAtom::Bot => bot = true,
            NAtom::D(n) => {
                let atom = cfg.codec.decode(*n);
                let vars = atom.var_indices();
                if vars.iter().any(|&v| v >= m) {
                    overflow = true;
                    continue;
                }
                match cfg.guards {
                    GuardMode::Literal => {
                        let k = (*n).min(m as u64) as u32;
                        for i in 0..k {
                            for j in 0..k {
                                if i != j {
                                    out.push(TAtom::neq(i, j));
                                }
                            }
                        }
                    }
                    GuardMode::Occurring => {
                        for &i in &vars {
                            for &j in &vars {
                                if i != j {
                                    out.push(TAtom::neq(i, j));
                                }
                            }
                        }
                    }
                }
                out.push(atom);
            }
        }
    }
    let bound = if overflow {
        out.push(TAtom::neq(m, m + 1));
        out.push(TAtom::eq(m, m + 1));
        vec![m, m + 1]
    } else if bot {
        out.push(TAtom::neq(m, m));
        vec![m]
    } else if top {
        out.push(TAtom::eq(m, m));
        vec![m]
    } else {
        vec![]
    };
    out.sort();
    out.dedup();
    Clause::base(bound, out)
}

fn force(f: &NFormula, m: u32, cfg: &ForceConfig) -> TFormula {
    if f.tag() == Tag::Pi {
        return force_pi(f, m, cfg);
    }
    match f.body() {
        Body::Atoms(atoms) => Formula::join(Tag::Sigma, vec![force_conj(atoms, m, cfg)]),
        Body::Join(fam) => {
            let label = force_label(f, m, cfg);
            let cfg2 = cfg.clone();
            let mapped = fam.map(label, move |c: Clause<NAtom>| match &c.body {
                ClauseBody::Base(atoms) => force_conj(atoms, m, &cfg2),
                ClauseBody::Pair(s, p) => {
                    Clause::pair(vec![], with_guard(&force(s, m, &cfg2), m), force(p, m, &cfg2))
                }
            });
            Formula::join_family(Tag::Sigma, f.level().max(1), mapped)
        }
    }
}

/// Conjoins `u_i ≠ u_j` (`i ≠ j < m`) to every level-1 member of the
/// Σ-formula `f`. Without it a `⊤`-like Σ-part makes `Force` true at
/// non-injective tuples, which the Π-case quantifies over.
fn with_guard(f: &TFormula, m: u32) -> TFormula {
    if m < 2 {
        return f.clone();
    }
    let Some(fam) = f.family() else {
        return f.clone();
    };
    let label = match fam {
        Family::Stream(s) => format!("{}.inj", s.label()),
        Family::Finite(_) => String::new(),
    };
    let mapped = fam.map(label, move |c: Clause<TAtom>| match &c.body {
        ClauseBody::Base(atoms) => {
            let mut atoms = atoms.clone();
            for i in 0..m {
                for j in 0..m {
                    if i != j {
                        atoms.push(TAtom::neq(i, j));
                    }
                }
            }
            atoms.sort();
            atoms.dedup();
            Clause::base(c.bound.clone(), atoms)
        }
        ClauseBody::Pair(s, p) => Clause::pair(c.bound.clone(), with_guard(s, m), (**p).clone()),
    });
    Formula::join_family(f.tag(), f.level(), mapped)
}

/// `⋀_k ∀x_m … x_{m+k-1} neg(Force_{neg f}(x_0, …, x_{m+k-1}))`, flattened
/// into one Π-join whose block `k` holds the clauses of the `k`-th conjunct.
fn force_pi(f: &NFormula, m: u32, cfg: &ForceConfig) -> TFormula {
    let g = Arc::new(f.dual());
    let label = force_label(f, m, cfg);
    let cfg2 = cfg.clone();
    let cache: Arc<Mutex<HashMap<usize, Family<Clause<TAtom>>>>> = Default::default();
    let block = move |k: usize| {
        if let Some(b) = cache.lock().unwrap().get(&k) {
            return b.clone();
        }
        let inner = force(&g, m + k as u32, &cfg2).dual();
        let prefix: Vec<u32> = (m..m + k as u32).collect();
        let fam = inner.family().expect("Force yields a join").clone();
        let lbl = match &fam {
            Family::Stream(s) => format!("{}#{k}", s.label()),
            Family::Finite(_) => String::new(),
        };
        let b = fam.map(lbl, move |c: Clause<TAtom>| {
            let mut bound = prefix.clone();
            bound.extend(c.bound.iter().copied());
            Clause { bound, body: c.body }
        });
        cache.lock().unwrap().insert(k, b.clone());
        b
    };
    let s = Stream::from_blocks(format!("~{label}"), m as usize, block);
    // label the Π-stream as the dual of the Σ-side label
    Formula::join_stream(Tag::Pi, f.level().max(1), s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::syntax::{parse, print};
    use crate::formula::Vocabulary;
    use crate::structures::Table;

    fn lo() -> Arc<AtomCodec> {
        AtomCodec::linear_order()
    }

    fn nf(s: &str) -> NFormula {
        parse(s, &Vocabulary::equality(), None).unwrap()
    }

    fn d(c: &AtomCodec, a: TAtom) -> String {
        format!("D({})", c.encode(&a).unwrap())
    }

    #[test]
    fn atom1() {
        let t = Table::linear_order(&[0, 1]);
        let c = lo();
        let fc = Forcer::new(&t, &c);
        for p in all_conditions(2) {
            assert!(fc.forces(&p, &nf("TRUE")).unwrap());
            assert!(!fc.forces(&p, &nf("FALSE")).unwrap());
        }
    }

    #[test]
    fn atom2_remaps_through_condition() {
        let t = Table::linear_order(&[0, 1]);
        let c = lo();
        let fc = Forcer::new(&t, &c);
        let f = nf(&d(&c, TAtom::new(2, &[1, 0])));
        let p = Condition::new(vec![1, 0]).unwrap();
        assert!(fc.forces(&p, &f).unwrap());
        assert!(!fc.forces(&Condition::new(vec![0, 1]).unwrap(), &f).unwrap());
        assert!(!fc.forces(&Condition::new(vec![1]).unwrap(), &f).unwrap());
    }

    #[test]
    fn vacuous_pi() {
        let t = Table::linear_order(&[0, 1]);
        let c = lo();
        let f = nf("AND[i in {}]");
        assert!(Forcer::new(&t, &c).forces(&Condition::empty(), &f).unwrap());
    }

    #[test]
    fn errors() {
        let c = lo();
        let fc = Forcer::new(&crate::structures::Catalog::Omega, &c);
        assert_eq!(fc.forces(&Condition::empty(), &nf("TRUE")), Err(Error::InfiniteUniverse));
        assert!(Condition::new(vec![1, 1]).is_err());
    }

    #[test]
    fn budgeted() {
        let c = lo();
        let omega = crate::structures::Catalog::Omega;
        let fc = Forcer::new(&omega, &c);
        let f = nf(&format!("OR[i in {{{}}}]", d(&c, TAtom::eq(0, 0))));
        assert_eq!(fc.forces_budgeted(&Condition::empty(), &f, 1), Tri::False);
        let f = nf(&format!("~{}", d(&c, TAtom::eq(0, 0))));
        // ⟨⟩ ⊮ ¬D(x0=x0): the extension (0) forces x0 = x0
        assert_eq!(fc.forces_budgeted(&Condition::empty(), &f, 100), Tri::False);
        assert_eq!(fc.forces_budgeted(&Condition::empty(), &f, 1), Tri::Unknown);
        let g = nf("AND[i in {}]");
        assert_eq!(fc.forces_budgeted(&Condition::empty(), &g, 50), Tri::Unknown);
        let fin = crate::structures::Catalog::Fin(2);
        let ff = Forcer::new(&fin, &c);
        assert_eq!(ff.forces_budgeted(&Condition::empty(), &g, 50), Tri::True);
    }

    #[test]
    fn generic_decides_stage() {
        let t = Arc::new(Table::linear_order(&[2, 0, 1]));
        let c = lo();
        let f = nf(&d(&c, TAtom::new(2, &[1, 0])));
        let g = build_generic(&*t, &c, &Condition::empty(), std::slice::from_ref(&f)).unwrap();
        assert_eq!(g.decisions.len(), 1);
        let s = &g.stages[g.decisions[0].stage];
        let fc = Forcer::new(&*t, &c);
        let decided = fc.forces(s, &f).unwrap() || fc.forces(s, &f.neg().unwrap()).unwrap();
        assert!(decided);
        let mut b = g.bijection().to_vec();
        b.sort();
        assert_eq!(b, vec![0, 1, 2]);
        assert!(forcing_equals_truth(t, c, &g, &[f]).unwrap());
    }

    #[test]
    fn force_atoms() {
        let c = lo();
        let cfg = ForceConfig::new(c.clone());
        let v = Vocabulary::linear_order();
        let top = force_transform(&nf("TRUE"), 0, &cfg).unwrap();
        assert_eq!(print(&top, &v), "OR[i in {EX x0 . x0 = x0}]");
        let bot = force_transform(&nf("FALSE"), 2, &cfg).unwrap();
        assert_eq!(print(&bot, &v), "OR[i in {EX x2 . x2 != x2}]");
        let n = c.encode(&TAtom::new(2, &[1, 0])).unwrap();
        let f = force_transform(&nf(&format!("D({n})")), 2, &cfg).unwrap();
        assert_eq!(print(&f, &v), "OR[i in {x0 != x1 & x1 != x0 & Le(x1,x0)}]");
        let f = force_transform(&nf(&format!("D({n})")), 1, &cfg).unwrap();
        assert_eq!(print(&f, &v), "OR[i in {EX x1 x2 . x1 = x2 & x1 != x2}]");
    }

    #[test]
    fn force_pi_blocks() {
        let c = lo();
        let cfg = ForceConfig::new(c.clone());
        let f = force_transform(&nf("~D(0)"), 0, &cfg).unwrap();
        assert_eq!(f.classify().unwrap(), (Tag::Pi, 1));
        let Some(Family::Stream(s)) = f.family() else { panic!() };
        let b = s.blocks().unwrap();
        let block1 = (b.block)(1).as_finite().unwrap().to_vec();
        // k = 1: ∀x0 ¬(x0 = x0)
        assert_eq!(block1, vec![Clause::base(vec![0], vec![TAtom::eq(0, 0)])]);
    }
}
