//! The acceptance suite: ten checks, each with a time limit.

use crate::coding::FiniteSet;
use crate::corpus::{formula_corpus, nformula_corpus, random_tformula, rng, sentence_corpus, Shape};
use crate::enum_ops::{apply, sanitize, EnumerationOperator};
use crate::error::Result;
use crate::family::Tri;
use crate::forcing::{all_conditions, build_generic, extensions, force_transform, forcing_equals_truth, Condition, ForceConfig, Forcer};
use crate::formula::syntax::print;
use crate::formula::{NFormula, Tag, Vocabulary};
use crate::linorder::{check_transfer, random_tuple, separation, sigma2_agreement, type_match};
use crate::nformula::{borel_member, eval_n, nformula_to_borel, SetOracle};
use crate::pullback::pullback;
use crate::semantics::{evaluate_catalog_stable, evaluate_finite, evaluate_growing, Cutoff};
use crate::structures::{diagram_bit, AtomCodec, Catalog, Structure, Table};
use rand::Rng;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;
use std::time::{Duration, Instant};

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed_ms: u128,
    pub limit_ms: u128,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {:<28} {:>8} ms (limit {} ms)  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed_ms,
            self.limit_ms,
            self.detail
        )
    }
}

/// Outcome of a check body: pass flag and a one-line summary.
type Outcome = Result<(bool, String)>;

pub struct Criterion {
    pub id: u32,
    pub name: &'static str,
    pub limit: Duration,
    check: fn() -> Outcome,
}

impl Criterion {
    pub fn run(&self) -> CriterionResult {
        let t = Instant::now();
        let out = (self.check)();
        let elapsed = t.elapsed();
        let (ok, detail) = match out {
            Ok(x) => x,
            Err(e) => (false, format!("error: {e}")),
        };
        let in_time = elapsed <= self.limit;
        CriterionResult {
            id: self.id,
            name: self.name,
            passed: ok && in_time,
            detail: if in_time { detail } else { format!("{detail}; over time") },
            elapsed_ms: elapsed.as_millis(),
            limit_ms: self.limit.as_millis(),
        }
    }
}

const fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

pub const CRITERIA: [Criterion; 10] = [
    Criterion { id: 1, name: "neg involution", limit: secs(5), check: neg_involution },
    Criterion { id: 2, name: "borel round trip", limit: secs(30), check: borel_round_trip },
    Criterion { id: 3, name: "force oracle equivalence", limit: secs(120), check: force_oracle },
    Criterion { id: 4, name: "forcing properties", limit: secs(120), check: forcing_properties },
    Criterion { id: 5, name: "operator laws", limit: secs(60), check: operator_laws },
    Criterion { id: 6, name: "pullback end-to-end", limit: secs(300), check: pullback_end_to_end },
    Criterion { id: 7, name: "separation truth table", limit: secs(1), check: truth_table },
    Criterion { id: 8, name: "sigma2 agreement", limit: secs(120), check: agreement },
    Criterion { id: 9, name: "type matcher", limit: secs(60), check: matcher },
    Criterion { id: 10, name: "level bookkeeping", limit: secs(10), check: levels },
];

pub fn run_all() -> Vec<CriterionResult> {
    CRITERIA.iter().map(Criterion::run).collect()
}

pub fn run_one(id: u32) -> Option<CriterionResult> {
    CRITERIA.iter().find(|c| c.id == id).map(Criterion::run)
}

fn verdict(failures: usize, total: usize, what: &str) -> Outcome {
    Ok((failures == 0, format!("{failures} failures in {total} {what}")))
}

fn neg_involution() -> Outcome {
    let v = Vocabulary::linear_order();
    let fs = formula_corpus(1, 1000, 3);
    let mut bad = 0;
    for f in &fs {
        let back = f.neg()?.neg()?;
        if print(&back, &v) != print(f, &v) || back != *f {
            bad += 1;
        }
    }
    verdict(bad, fs.len(), "formulas")
}

fn borel_round_trip() -> Outcome {
    const SUPPORT: u64 = 16;
    let fs = nformula_corpus(2, 500, 3, SUPPORT);
    let mut r = rng(2);
    let points: Vec<(BTreeSet<u64>, bool)> = (0..200)
        .map(|_| {
            let set = (0..SUPPORT + 4).filter(|_| r.gen_bool(0.5)).collect();
            (set, r.gen_bool(0.3))
        })
        .collect();
    let mut bad = 0;
    for f in &fs {
        let code = nformula_to_borel(f)?;
        for (set, default) in &points {
            let x = SetOracle::Point {
                flipped: set.clone(),
                default: *default,
            };
            let got = eval_n(f, &x, 1);
            if got != Tri::from_bool(borel_member(&code, set, *default)?) {
                bad += 1;
            }
        }
    }
    verdict(bad, fs.len() * points.len(), "formula-point pairs")
}

fn orders_up_to(n: usize) -> Vec<Table> {
    (1..=n).flat_map(Table::all_linear_orders).collect()
}

/// Level ≤ 2 N-formulas over the atoms of variables below 4.
fn forcing_corpus(seed: u64, n: usize) -> Vec<NFormula> {
    let codec = AtomCodec::linear_order();
    let support = codec.count_le(4).min(64) as u64;
    nformula_corpus(seed, n, 2, support)
}

fn env_of(p: &Condition) -> BTreeMap<u32, u64> {
    p.entries().iter().enumerate().map(|(i, &e)| (i as u32, e)).collect()
}

fn force_oracle() -> Outcome {
    let codec = AtomCodec::linear_order();
    let cfg = ForceConfig::new(codec.clone());
    let fs = forcing_corpus(3, 50);
    let mut bad = 0;
    let mut total = 0;
    for t in orders_up_to(4) {
        let forcer = Forcer::new(&t, &codec);
        let conds = all_conditions(t.size().unwrap());
        for f in &fs {
            let mut by_len: BTreeMap<usize, _> = BTreeMap::new();
            for p in &conds {
                let g = match by_len.get(&p.len()) {
                    Some(g) => g,
                    None => by_len.entry(p.len()).or_insert(force_transform(f, p.len() as u32, &cfg)?),
                };
                total += 1;
                if forcer.forces(p, f)? != evaluate_finite(&t, g, &env_of(p))? {
                    bad += 1;
                }
            }
        }
    }
    verdict(bad, total, "order-condition-formula triples")
}

fn forcing_properties() -> Outcome {
    let codec = AtomCodec::linear_order();
    let fs = forcing_corpus(4, 50);
    let (mut ext, mut cons, mut dens, mut total) = (0, 0, 0, 0);
    for t in orders_up_to(4) {
        let n = t.size().unwrap();
        let forcer = Forcer::new(&t, &codec);
        let conds = all_conditions(n);
        for f in &fs {
            let g = f.neg()?;
            let mut yes = BTreeMap::new();
            let mut no = BTreeMap::new();
            for p in &conds {
                yes.insert(p.clone(), forcer.forces(p, f)?);
                no.insert(p.clone(), forcer.forces(p, &g)?);
            }
            for p in &conds {
                total += 1;
                let above = extensions(p, n);
                if yes[p] && above.iter().any(|q| !yes[q]) {
                    ext += 1;
                }
                if yes[p] && no[p] {
                    cons += 1;
                }
                if !above.iter().any(|q| yes[q] || no[q]) {
                    dens += 1;
                }
            }
        }
    }
    // generic enumerations for the corpus, from several starting conditions
    let mut generic_bad = 0;
    let mut generic_total = 0;
    let family: Vec<NFormula> = fs.iter().take(12).cloned().collect();
    for t in orders_up_to(3).into_iter().chain(Table::all_linear_orders(4).into_iter().step_by(5)) {
        let n = t.size().unwrap();
        let t = Arc::new(t);
        for seed in all_conditions(n).into_iter().filter(|p| p.len() <= 1) {
            let g = build_generic(&*t, &codec, &seed, &family)?;
            generic_total += 1;
            if !forcing_equals_truth(t.clone(), codec.clone(), &g, &family)? {
                generic_bad += 1;
            }
        }
    }
    let bad = ext + cons + dens + generic_bad;
    Ok((
        bad == 0,
        format!(
            "extension {ext}, consistency {cons}, density {dens} failures in {total} cases; \
             {generic_bad} failures in {generic_total} generic enumerations"
        ),
    ))
}

fn random_operator(r: &mut rand_chacha::ChaCha8Rng) -> EnumerationOperator {
    let n = r.gen_range(1..=8);
    let pairs = (0..n)
        .map(|_| {
            let k = r.gen_range(0..=3);
            let v: FiniteSet = (0..k).map(|_| r.gen_range(0..12)).collect();
            (v, r.gen_range(0..40))
        })
        .collect();
    let mut g = EnumerationOperator::finite(pairs);
    g.source = Some(Vocabulary::linear_order());
    g.target = Some(Vocabulary::linear_order());
    g
}

fn atoms_of(g: &EnumerationOperator, x: &SetOracle, budget: u64) -> BTreeSet<u64> {
    apply(g, x, budget).into_iter().map(|o| o.atom).collect()
}

fn operator_laws() -> Outcome {
    let mut r = rng(5);
    let (mut mono, mut compact, mut idem) = (0, 0, 0);
    for _ in 0..200 {
        let g = random_operator(&mut r);
        let x: BTreeSet<u64> = (0..12).filter(|_| r.gen_bool(0.4)).collect();
        let y: BTreeSet<u64> = x.iter().copied().chain((0..12).filter(|_| r.gen_bool(0.4))).collect();
        let gx = apply(&g, &SetOracle::finite(x.iter().copied()), 100);
        let gy = apply(&g, &SetOracle::finite(y.iter().copied()), 100);
        let ys: BTreeSet<u64> = gy.iter().map(|o| o.atom).collect();
        if gx.iter().any(|o| !ys.contains(&o.atom)) {
            mono += 1;
        }
        for o in &gy {
            let w = o.witness.iter().collect::<BTreeSet<_>>();
            if !w.is_subset(&y) || !atoms_of(&g, &SetOracle::finite(w), 100).contains(&o.atom) {
                compact += 1;
            }
        }
        // sanitize twice equals sanitize once, below a common horizon
        let s1 = sanitize(&g)?;
        let s2 = sanitize(&s1)?;
        let cap = 200;
        let below = |s: BTreeSet<u64>| s.into_iter().filter(|&m| m < cap).collect::<BTreeSet<_>>();
        let ox = SetOracle::finite(x.iter().copied());
        if below(atoms_of(&s1, &ox, 4 * cap)) != below(atoms_of(&s2, &ox, 8 * cap)) {
            idem += 1;
        }
    }
    // the tilde operator against the tilde structure
    let codec = AtomCodec::linear_order();
    let op = EnumerationOperator::tilde();
    let mut tilde_bad = 0;
    let cats = [
        Catalog::Fin(1),
        Catalog::Fin(2),
        Catalog::Fin(3),
        Catalog::Fin(4),
        Catalog::Fin(5),
        Catalog::Omega,
        Catalog::OmegaStar,
    ];
    for c in &cats {
        let input = SetOracle::Decidable({
            let (c, codec) = (c.clone(), codec.clone());
            Arc::new(move |n| diagram_bit(&c, &codec, n))
        });
        let out = atoms_of(&op, &input, 60_000);
        let t = c.clone().tilde();
        tilde_bad += (0..500).filter(|&n| out.contains(&n) != diagram_bit(&t, &codec, n)).count();
    }
    let bad = mono + compact + idem + tilde_bad;
    Ok((
        bad == 0,
        format!(
            "monotonicity {mono}, compactness {compact}, sanitize {idem} failures in 200 instances; \
             {tilde_bad} tilde atom mismatches in {}",
            500 * cats.len()
        ),
    ))
}

fn pullback_end_to_end() -> Outcome {
    let v = Vocabulary::linear_order();
    let ops = [EnumerationOperator::identity(v), EnumerationOperator::tilde()];
    let cats = [
        Catalog::Fin(1),
        Catalog::Fin(2),
        Catalog::Fin(3),
        Catalog::Fin(4),
        Catalog::Fin(5),
        Catalog::Omega,
        Catalog::OmegaStar,
    ];
    let sentences = sentence_corpus(0, 30);
    let (mut bad, mut unstable, mut total) = (0, 0, 0);
    for s in &sentences {
        for g in &ops {
            let pb = pullback(g, s)?.sentence;
            for a in &cats {
                total += 1;
                let lhs = evaluate_growing(a, &pb, Cutoff::truncated(2, 2, 8), 2)?;
                let (rhs, rhs_stable) = evaluate_catalog_stable(&g.image_catalog(a)?, s)?;
                if a.size().is_none() && !(lhs.stable && rhs_stable) {
                    unstable += 1;
                }
                if lhs.value != rhs {
                    bad += 1;
                }
            }
        }
    }
    Ok((
        bad == 0 && unstable == 0,
        format!("{bad} mismatches, {unstable} unstable in {total} sentence-operator-structure triples"),
    ))
}

fn truth_table() -> Outcome {
    let got = separation()?;
    let want = [[true, false], [false, true]];
    Ok((got == want, format!("omega: {:?}, omega_star: {:?}", got[0], got[1])))
}

fn agreement() -> Outcome {
    let rep = sigma2_agreement(200, 7)?;
    Ok((
        rep.passed(),
        format!(
            "{} disagreements and {} unstable on tilde orders; {} control disagreements",
            rep.tilde.disagreements, rep.tilde.unstable, rep.control.disagreements
        ),
    ))
}

/// Atomic type of a tuple of `tilde(A)` computed from classes and ranks
/// directly, without the structure.
fn pair_type(le: impl Fn(u64, u64) -> bool, t: &[(u64, u64)]) -> Vec<(bool, bool)> {
    t.iter().flat_map(|a| t.iter().map(move |b| (a, b))).map(|(a, b)| (le(a.0, b.0), a == b)).collect()
}

fn matcher() -> Outcome {
    let mut r = rng(9);
    let tuples: Vec<Vec<(u64, u64)>> = (0..500).map(|_| random_tuple(&mut r, 5, 6)).collect();
    let mut type_bad = 0;
    for t in &tuples {
        let m = type_match(&Catalog::Omega, t, &Catalog::OmegaStar)?;
        if pair_type(|a, b| a <= b, t) != pair_type(|a, b| a >= b, &m) {
            type_bad += 1;
        }
    }
    let shape = Shape {
        width: 3,
        atoms: 3,
        bound: 2,
        depth: 7,
    };
    let mut transfer_bad = 0;
    let mut witnessed = 0;
    for i in 0..100 {
        let group = &tuples[5 * i..5 * i + 5];
        // the formula's free variables are covered by every tuple of its group
        let scope = group.iter().map(Vec::len).min().unwrap_or(0);
        let f = random_tformula(&mut r, Tag::Sigma, 1, scope as u32, &shape);
        for t in group {
            let c = check_transfer(&Catalog::Omega, &t[..scope], &Catalog::OmegaStar, &f)?;
            witnessed += c.transferred.is_some() as usize;
            if !c.ok() {
                transfer_bad += 1;
            }
        }
    }
    Ok((
        type_bad + transfer_bad == 0,
        format!("{type_bad} type failures in 500 tuples; {transfer_bad} transfer failures in 500 checks ({witnessed} with witnesses)"),
    ))
}

fn levels() -> Outcome {
    let codec = AtomCodec::linear_order();
    let cfg = ForceConfig::new(codec);
    let (mut bad, mut total) = (0, 0);
    for f in nformula_corpus(10, 200, 3, 40).iter().filter(|f| f.level() >= 2) {
        for m in 0..3 {
            total += 1;
            if force_transform(f, m, &cfg)?.classify()? != (f.tag(), f.level()) {
                bad += 1;
            }
        }
    }
    let v = Vocabulary::linear_order();
    let ops = [EnumerationOperator::identity(v), EnumerationOperator::tilde()];
    for s in sentence_corpus(0, 30).iter().filter(|s| s.level() >= 2) {
        for g in &ops {
            let res = pullback(g, s)?;
            for st in &res.stages {
                total += 1;
                if (st.tag, st.level) != (s.tag(), s.level()) {
                    bad += 1;
                }
            }
        }
    }
    verdict(bad, total, "classifications")
}
