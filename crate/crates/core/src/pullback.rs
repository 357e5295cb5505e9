//! Pulling sentences back along enumeration operators: compile a sentence
//! over the target vocabulary to an N-formula, substitute each `D(n)` by the
//! operator's preimage of `n`, and force the result at the empty condition.

use crate::coding::{decode_tuple, unpair, Fnv};
use crate::enum_ops::{sanitize, EnumerationOperator, OpKind};
use crate::error::{Error, Result};
use crate::family::{Family, Stream};
use crate::forcing::{force_transform, ForceConfig};
use crate::formula::{Body, Clause, ClauseBody, Formula, NAtom, NFormula, TAtom, TFormula, Tag, Term};
use crate::structures::AtomCodec;
use serde::Serialize;
use std::collections::BTreeMap;
use std::sync::Arc;

type Env = BTreeMap<u32, u64>;

/// Replaces `∃x̄` by a join over all tuples of ω and ground atoms by their
/// diagram atoms `D(n)`. Tuples are flattened into stream positions.
pub fn sentence_to_nformula(s: &TFormula, codec: &Arc<AtomCodec>) -> Result<NFormula> {
    if let Some(v) = s.free_vars().into_iter().next() {
        return Err(Error::FreeVariable(v));
    }
    s.classify()?;
    let out = compile(s, &Env::new(), codec)?;
    spot_check(s, codec)?;
    Ok(out)
}

fn compile_atoms(atoms: &[TAtom], env: &Env, codec: &AtomCodec) -> Result<Vec<NAtom>> {
    atoms
        .iter()
        .map(|a| {
            let mut elems = Vec::with_capacity(a.args.len());
            for t in &a.args {
                elems.push(match t {
                    Term::Var(v) => *env.get(v).ok_or(Error::FreeVariable(*v))?,
                    Term::Const(c) => *c,
                });
            }
            codec.encode_ground(a.sym, &elems).map(NAtom::D)
        })
        .collect()
}

fn compile(f: &TFormula, env: &Env, codec: &Arc<AtomCodec>) -> Result<NFormula> {
    match f.body() {
        Body::Atoms(atoms) => Ok(Formula::atoms(f.tag(), compile_atoms(atoms, env, codec)?)),
        Body::Join(fam) => {
            let closed = match fam {
                Family::Finite(cs) => cs.iter().all(|c| c.bound.is_empty()),
                Family::Stream(_) => false,
            };
            if closed {
                let cs = fam.as_finite().unwrap();
                let out = cs.iter().map(|c| compile_clause(c, env, codec)).collect::<Result<Vec<_>>>()?;
                return Ok(Formula::join(f.tag(), out));
            }
            let mut h = Fnv::new();
            h.write_u64(f.fingerprint());
            for (k, v) in env {
                h.write_u64(*k as u64);
                h.write_u64(*v);
            }
            let label = format!("compile.{:016x}", h.finish());
            let fam = fam.clone();
            let env = env.clone();
            let codec = codec.clone();
            let member = move |p: usize| {
                let (i, t) = match &fam {
                    Family::Finite(cs) => (p % cs.len().max(1), (p / cs.len().max(1)) as u64),
                    Family::Stream(_) => {
                        let (i, t) = unpair(p as u64);
                        (i as usize, t)
                    }
                };
                let c = fam.get(i)?;
                let tuple = decode_tuple(t, c.bound.len())?;
                let mut env = env.clone();
                env.extend(c.bound.iter().copied().zip(tuple));
                // members that cannot be compiled are dropped
                compile_clause(&c, &env, &codec).ok()
            };
            Ok(Formula::join_stream(f.tag(), f.level().max(1), Stream::new(label, member)))
        }
    }
}

fn compile_clause(c: &Clause<TAtom>, env: &Env, codec: &Arc<AtomCodec>) -> Result<Clause<NAtom>> {
    Ok(match &c.body {
        ClauseBody::Base(atoms) => Clause::base(vec![], compile_atoms(atoms, env, codec)?),
        ClauseBody::Pair(s, p) => Clause::pair(vec![], compile(s, env, codec)?, compile(p, env, codec)?),
    })
}

/// Free variables hidden inside stream members only surface lazily; check
/// the first members of every stream reachable through finite families.
fn spot_check(f: &TFormula, codec: &Arc<AtomCodec>) -> Result<()> {
    fn go(f: &TFormula, bound: &mut Vec<u32>, codec: &Arc<AtomCodec>) -> Result<()> {
        match f.body() {
            Body::Atoms(atoms) => {
                for a in atoms {
                    if let Some(v) = a.var_indices().into_iter().find(|v| !bound.contains(v)) {
                        return Err(Error::FreeVariable(v));
                    }
                }
                Ok(())
            }
            Body::Join(fam) => {
                for c in fam.prefix(4) {
                    let n = bound.len();
                    bound.extend(c.bound.iter().copied());
                    match &c.body {
                        ClauseBody::Base(atoms) => go(&Formula::conj(atoms.clone()), bound, codec)?,
                        ClauseBody::Pair(s, p) => {
                            go(s, bound, codec)?;
                            go(p, bound, codec)?;
                        }
                    }
                    bound.truncate(n);
                }
                Ok(())
            }
        }
    }
    go(f, &mut Vec::new(), codec)
}

/// Alternatives `{⋀_{m ∈ D_v} D(m) : (v, n) ∈ Γ}` for one atom.
fn theta_atom(a: NAtom, g: &EnumerationOperator) -> Family<Vec<NAtom>> {
    let n = match a {
        NAtom::D(n) => n,
        other => return Family::Finite(vec![vec![other]]),
    };
    let conj = |v: crate::coding::FiniteSet| -> Vec<NAtom> {
        if v.is_empty() {
            vec![NAtom::Top]
        } else {
            v.iter().map(NAtom::D).collect()
        }
    };
    match &g.preimage {
        Some(pre) => Family::Finite(pre(n).into_iter().map(conj).collect()),
        None => g
            .pairs
            .filter_map(format!("theta.{}.{n}", g.label), move |(v, m)| (m == n).then(|| conj(v))),
    }
}

/// Distributes a conjunction of atoms over the alternatives of each atom.
fn theta_conj(atoms: &[NAtom], g: &EnumerationOperator, label: &str) -> Family<Vec<NAtom>> {
    let alts: Vec<Family<Vec<NAtom>>> = atoms.iter().map(|a| theta_atom(*a, g)).collect();
    if alts.iter().all(Family::is_finite) {
        let mut out: Vec<Vec<NAtom>> = vec![vec![]];
        for alt in &alts {
            let choices = alt.as_finite().unwrap();
            out = out
                .iter()
                .flat_map(|pre| {
                    choices.iter().map(move |c| {
                        let mut v = pre.clone();
                        v.extend(c.iter().copied());
                        v
                    })
                })
                .collect();
        }
        return Family::Finite(out);
    }
    let k = alts.len();
    Family::Stream(Stream::new(label, move |p| {
        let idx = decode_tuple(p as u64, k)?;
        let mut out = Vec::new();
        for (alt, i) in alts.iter().zip(idx) {
            out.extend(alt.get(i as usize)?);
        }
        Some(out)
    }))
}

fn theta_label(f: &NFormula, g: &EnumerationOperator) -> String {
    let mut h = Fnv::new();
    h.write_u64(f.fingerprint());
    h.write(g.label.as_bytes());
    format!("theta.{:016x}", h.finish())
}

/// `θ`-substitution: every `D(n)` becomes `⋁_{(v, n) ∈ Γ} ⋀_{m ∈ D_v} D(m)`.
/// Level-0 formulas become level-1 joins; higher levels are preserved.
pub fn theta_substitute(f: &NFormula, g: &EnumerationOperator) -> Result<NFormula> {
    if !g.sanitized {
        return Err(Error::UnsanitizedOperator);
    }
    f.classify()?;
    Ok(theta(f, &Arc::new(g.clone())))
}

fn theta(f: &NFormula, g: &Arc<EnumerationOperator>) -> NFormula {
    if f.tag() == Tag::Pi {
        return theta(&f.dual(), g).dual();
    }
    let label = theta_label(f, g);
    match f.body() {
        Body::Atoms(atoms) => {
            if atoms.iter().all(|a| !matches!(a, NAtom::D(_))) {
                return f.clone();
            }
            let fam = theta_conj(atoms, g, &label);
            Formula::join_family(Tag::Sigma, 1, fam.map(label, |alt| Clause::base(vec![], alt)))
        }
        Body::Join(fam) => {
            let g2 = g.clone();
            let lbl = label.clone();
            let mapped = fam.map(format!("{label}.m"), move |c: Clause<NAtom>| match &c.body {
                ClauseBody::Base(atoms) => theta_conj(atoms, &g2, &format!("{lbl}.c")).map(String::new(), |alt| Clause::base(vec![], alt)),
                ClauseBody::Pair(s, p) => Family::Finite(vec![Clause::pair(vec![], theta(s, &g2), theta(p, &g2))]),
            });
            Formula::join_family(Tag::Sigma, f.level().max(1), flatten(mapped, &label))
        }
    }
}

fn flatten<T: Clone + Send + Sync + 'static>(fams: Family<Family<T>>, label: &str) -> Family<T> {
    match &fams {
        Family::Finite(v) if v.iter().all(Family::is_finite) => {
            Family::Finite(v.iter().flat_map(|f| f.as_finite().unwrap().to_vec()).collect())
        }
        _ => Family::Stream(Stream::new(label, move |p| {
            let (i, j) = unpair(p as u64);
            fams.get(i as usize)?.get(j as usize)
        })),
    }
}

/// One step of the pipeline as recorded in a [`PullbackResult`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Stage {
    pub name: &'static str,
    pub tag: Tag,
    pub level: u32,
}

#[derive(Clone, Debug)]
pub struct PullbackResult {
    pub sentence: TFormula,
    /// The class of source structures on which the equivalence is claimed.
    pub class: String,
    pub stages: Vec<Stage>,
}

fn stage(name: &'static str, f: &Formula<impl crate::formula::AtomLike>) -> Result<Stage> {
    let (tag, level) = f.classify()?;
    Ok(Stage {
        name,
        tag,
        level: level.max(f.level()),
    })
}

/// Pulls a sentence over the operator's target vocabulary back to one over
/// its source vocabulary: `A ⊨ result` iff `Γ(D_A) ⊨ s` for `A` in the
/// declared class. Unsanitized operators are sanitized first.
pub fn pullback(g: &EnumerationOperator, s: &TFormula) -> Result<PullbackResult> {
    let target = g.target.clone().ok_or(Error::Vocabulary("operator has no target vocabulary".into()))?;
    let source = g.source.clone().ok_or(Error::Vocabulary("operator has no source vocabulary".into()))?;
    let g = if g.sanitized { g.clone() } else { sanitize(g)? };
    let mut stages = vec![stage("input", s)?];
    let n = sentence_to_nformula(s, &AtomCodec::shared(&target))?;
    stages.push(stage("diagram", &n)?);
    let t = theta_substitute(&n, &g)?;
    stages.push(stage("theta", &t)?);
    let cfg = ForceConfig::new(AtomCodec::shared(&source));
    // Σ sentences go through their negation: the empty condition forces no
    // Σ formula that mentions a diagram atom.
    let out = match t.tag() {
        Tag::Pi => force_transform(&t, 0, &cfg)?,
        Tag::Sigma => force_transform(&t.dual(), 0, &cfg)?.dual(),
    };
    stages.push(stage("force", &out)?);
    let class = match g.kind {
        Some(OpKind::Identity) => "all structures of the source vocabulary",
        Some(OpKind::Tilde) => "linear orders",
        None => "structures on which the operator is an isomorphism-invariant embedding",
    };
    Ok(PullbackResult {
        sentence: out,
        class: class.into(),
        stages,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding::FiniteSet;
    use crate::family::Tri;
    use crate::formula::syntax::{parse, print};
    use crate::formula::Vocabulary;
    use crate::nformula::{eval_n, SetOracle};

    fn tf(s: &str) -> TFormula {
        parse(s, &Vocabulary::linear_order(), None).unwrap()
    }

    #[test]
    fn compile_single_atom() {
        let c = AtomCodec::linear_order();
        let n = sentence_to_nformula(&tf("OR[i in {EX x0 . x0 = x0}]"), &c).unwrap();
        let fam = n.family().unwrap();
        for a in 0..5u64 {
            let cl = fam.get(a as usize).unwrap();
            let want = c.encode_ground(0, &[a, a]).unwrap();
            assert_eq!(cl.body, ClauseBody::Base(vec![NAtom::D(want)]));
        }
        assert_eq!(n.classify().unwrap(), (Tag::Sigma, 1));
    }

    #[test]
    fn compile_phi0_shape() {
        let c = AtomCodec::linear_order();
        let phi0 = tf("OR[i in {EX x0 . ((&)) & (AND[i in {ALL x1 . ~x0 != x1 | ~Le(x1,x0)}])}]");
        let n = sentence_to_nformula(&phi0, &c).unwrap();
        assert_eq!(n.classify().unwrap(), (Tag::Sigma, 2));
        let ClauseBody::Pair(_, pi) = n.family().unwrap().get(3).unwrap().body else {
            panic!("level-2 member")
        };
        let ClauseBody::Base(atoms) = pi.family().unwrap().get(5).unwrap().body else {
            panic!("level-1 member")
        };
        let le = c.vocabulary().le().unwrap();
        let mut want = vec![
            NAtom::D(c.encode_ground(1, &[3, 5]).unwrap()),
            NAtom::D(c.encode_ground(le, &[5, 3]).unwrap()),
        ];
        want.sort();
        let mut got = atoms.clone();
        got.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn free_variables_rejected() {
        let c = AtomCodec::linear_order();
        assert_eq!(sentence_to_nformula(&tf("Le(x0,x1)"), &c), Err(Error::FreeVariable(0)));
        assert_eq!(
            sentence_to_nformula(&tf("OR[i in {EX x0 . Le(x0,x3)}]"), &c),
            Err(Error::FreeVariable(3))
        );
    }

    #[test]
    fn theta_examples() {
        let mut g = EnumerationOperator::finite(vec![(FiniteSet::from_iter([1, 3]), 7)]);
        assert_eq!(theta_substitute(&Formula::conj(vec![NAtom::D(7)]), &g), Err(Error::UnsanitizedOperator));
        g.sanitized = true;
        let out = theta_substitute(&Formula::conj(vec![NAtom::D(7)]), &g).unwrap();
        assert_eq!(print(&out, &Vocabulary::equality()), "OR[i in {D(1) & D(3)}]");
        let top = Formula::conj(vec![NAtom::Top]);
        assert_eq!(theta_substitute(&top, &g).unwrap(), top);
    }

    #[test]
    fn theta_identity_is_semantic_identity() {
        let v = Vocabulary::linear_order();
        let g = sanitize(&EnumerationOperator::identity(v.clone())).unwrap();
        let c = AtomCodec::linear_order();
        let le = v.le().unwrap();
        let atoms: Vec<u64> = [TAtom::new(le, &[0, 1]), TAtom::new(le, &[1, 0]), TAtom::neq(0, 1), TAtom::neq(1, 0)]
            .iter()
            .map(|a| c.encode(a).unwrap())
            .collect();
        let eqs: Vec<u64> = (0..3).map(|i| c.encode(&TAtom::eq(i, i)).unwrap()).collect();
        let [a, b, n, m] = atoms[..] else { unreachable!() };
        let fs = [
            format!("OR[i in {{D({a}) & D({n}), D({b})}}]"),
            format!("AND[i in {{~D({a}) | ~D({m})}}]"),
            format!("OR[i in {{(D({b}) & D({})) & (AND[i in {{~D({n})}}])}}]", eqs[1]),
        ];
        for s in &fs {
            let f: NFormula = parse(s, &Vocabulary::equality(), None).unwrap();
            let t = theta_substitute(&f, &g).unwrap();
            for bits in 0u64..16 {
                // sanitized images always contain the reflexive equalities
                let members = (0..4).filter(|i| bits >> i & 1 == 1).map(|i| atoms[i]).chain(eqs.iter().copied());
                let x = SetOracle::finite(members);
                assert_eq!(eval_n(&f, &x, 1000), eval_n(&t, &x, 1000), "{s} at {bits:b}");
            }
        }
    }

    #[test]
    fn levels_are_tracked() {
        let g = EnumerationOperator::tilde();
        let phi0 = tf("OR[i in {EX x0 . ((&)) & (AND[i in {ALL x1 . ~x0 != x1 | ~Le(x1,x0)}])}]");
        let r = pullback(&g, &phi0).unwrap();
        for st in &r.stages {
            assert_eq!((st.tag, st.level), (Tag::Sigma, 2), "{}", st.name);
        }
        assert_eq!(r.class, "linear orders");
        let _ = Tri::Unknown;
    }
}
