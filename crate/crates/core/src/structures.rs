//! Structures, the Gödel numbering of atomic formulas, and atomic diagrams.

use crate::coding::{pair128, seq_code, unpair};
use crate::error::{Error, Result};
use crate::formula::{TAtom, Term, Vocabulary, EQ, NEQ};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

/// Numbering of the atomic formulas of a vocabulary: atoms are sorted by
/// `(maxvar, pair(sym, seq_code(vars)))`.
pub struct AtomCodec {
    vocab: Vocabulary,
    groups: Mutex<HashMap<u32, Arc<Vec<(u128, TAtom)>>>>,
}

impl fmt::Debug for AtomCodec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AtomCodec").field("vocab", &self.vocab).finish()
    }
}

fn canonical_code(a: &TAtom) -> u128 {
    let vars: Vec<u64> = a.var_indices().iter().map(|&v| v as u64).collect();
    pair128(a.sym as u128, seq_code(&vars))
}

impl AtomCodec {
    pub fn new(vocab: Vocabulary) -> Self {
        AtomCodec {
            vocab,
            groups: Mutex::new(HashMap::new()),
        }
    }

    /// Process-wide codec for `vocab`, so the group tables are built once.
    pub fn shared(vocab: &Vocabulary) -> Arc<AtomCodec> {
        static ALL: OnceLock<Mutex<HashMap<Vocabulary, Arc<AtomCodec>>>> = OnceLock::new();
        ALL.get_or_init(Default::default)
            .lock()
            .unwrap()
            .entry(vocab.clone())
            .or_insert_with(|| Arc::new(AtomCodec::new(vocab.clone())))
            .clone()
    }

    /// Shared codec for `{=, !=, Le}`.
    pub fn linear_order() -> Arc<AtomCodec> {
        AtomCodec::shared(&Vocabulary::linear_order())
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    /// Number of atoms whose variables all lie in `{x_0..x_m}`.
    pub fn count_le(&self, m: u32) -> u128 {
        self.vocab
            .symbols()
            .iter()
            .map(|s| (m as u128 + 1).saturating_pow(s.arity as u32))
            .fold(0u128, |a, b| a.saturating_add(b))
    }

    fn count_below(&self, m: u32) -> u128 {
        if m == 0 {
            0
        } else {
            self.count_le(m - 1)
        }
    }

    /// Atoms of maxvar exactly `m`, sorted by canonical code.
    fn group(&self, m: u32) -> Arc<Vec<(u128, TAtom)>> {
        if let Some(g) = self.groups.lock().unwrap().get(&m) {
            return g.clone();
        }
        let mut out = Vec::new();
        for (sym, s) in self.vocab.symbols().iter().enumerate() {
            // the first occurrence of m is at position `first`
            for first in 0..s.arity {
                let bounds: Vec<u32> = (0..s.arity)
                    .map(|i| match i.cmp(&first) {
                        std::cmp::Ordering::Less => m,
                        std::cmp::Ordering::Equal => 1,
                        std::cmp::Ordering::Greater => m + 1,
                    })
                    .collect();
                if bounds.contains(&0) {
                    continue;
                }
                let mut digits = vec![0u32; s.arity];
                loop {
                    let vars: Vec<u32> = (0..s.arity).map(|i| if i == first { m } else { digits[i] }).collect();
                    let a = TAtom::new(sym, &vars);
                    out.push((canonical_code(&a), a));
                    let mut i = 0;
                    while i < digits.len() && digits[i] + 1 >= bounds[i] {
                        digits[i] = 0;
                        i += 1;
                    }
                    if i == digits.len() {
                        break;
                    }
                    digits[i] += 1;
                }
            }
        }
        out.sort_by_key(|(c, _)| *c);
        let g = Arc::new(out);
        self.groups.lock().unwrap().insert(m, g.clone());
        g
    }

    pub fn encode(&self, a: &TAtom) -> Result<u64> {
        a.check(&self.vocab)?;
        if a.args.iter().any(|t| matches!(t, Term::Const(_))) {
            return Err(Error::MalformedFormula("ground atoms have no index".into()));
        }
        let m = a.var_indices().into_iter().max().unwrap_or(0);
        let g = self.group(m);
        let code = canonical_code(a);
        let rank = g.binary_search_by_key(&code, |(c, _)| *c).expect("atom belongs to its group");
        u64::try_from(self.count_below(m) + rank as u128)
            .map_err(|_| Error::MalformedFormula("atom index exceeds 64 bits".into()))
    }

    pub fn decode(&self, n: u64) -> TAtom {
        let n = n as u128;
        // least m with count_le(m) > n
        let (mut lo, mut hi) = (0u32, 1u32);
        while self.count_le(hi) <= n {
            hi *= 2;
        }
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if self.count_le(mid) > n {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let g = self.group(lo);
        g[(n - self.count_below(lo)) as usize].1.clone()
    }

    pub fn encode_ground(&self, sym: usize, elems: &[u64]) -> Result<u64> {
        let vars: Vec<u32> = elems
            .iter()
            .map(|&e| u32::try_from(e).map_err(|_| Error::MalformedFormula("element too large".into())))
            .collect::<Result<_>>()?;
        self.encode(&TAtom::new(sym, &vars))
    }
}

/// Relational structure with universe ω or a finite initial segment of it.
pub trait Structure: Send + Sync {
    fn vocabulary(&self) -> &Vocabulary;
    /// `Some(k)` for universe `{0..k-1}`, `None` for ω.
    fn size(&self) -> Option<u64>;
    /// Truth of `R(args)`; callers only pass elements of the universe.
    fn holds(&self, sym: usize, args: &[u64]) -> bool;
}

/// Finite structure given by explicit relation tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    vocab: Vocabulary,
    size: u64,
    relations: Vec<BTreeSet<Vec<u64>>>,
}

impl Table {
    pub fn new(vocab: Vocabulary, size: u64, relations: BTreeMap<String, Vec<Vec<u64>>>) -> Result<Self> {
        let mut rels = vec![BTreeSet::new(); vocab.len()];
        for (name, tuples) in relations {
            let sym = vocab
                .lookup(&name)
                .filter(|&s| s > NEQ)
                .ok_or_else(|| Error::Vocabulary(format!("no relation `{name}`")))?;
            for t in tuples {
                if t.len() != vocab.arity(sym).unwrap() || t.iter().any(|&e| e >= size) {
                    return Err(Error::Vocabulary(format!("bad tuple {t:?} for `{name}`")));
                }
                rels[sym].insert(t);
            }
        }
        Ok(Table {
            vocab,
            size,
            relations: rels,
        })
    }

    /// The order in which `perm[i]` is the `i`-th element.
    pub fn linear_order(perm: &[u64]) -> Table {
        let n = perm.len();
        let mut pos = vec![0; n];
        for (i, &e) in perm.iter().enumerate() {
            pos[e as usize] = i;
        }
        let mut le = BTreeSet::new();
        for a in 0..n as u64 {
            for b in 0..n as u64 {
                if pos[a as usize] <= pos[b as usize] {
                    le.insert(vec![a, b]);
                }
            }
        }
        let vocab = Vocabulary::linear_order();
        let mut relations = vec![BTreeSet::new(); vocab.len()];
        relations[vocab.le().unwrap()] = le;
        Table {
            vocab,
            size: n as u64,
            relations,
        }
    }

    /// Every linear order on `{0..n-1}`, one per permutation.
    pub fn all_linear_orders(n: usize) -> Vec<Table> {
        permutations(n).iter().map(|p| Table::linear_order(p)).collect()
    }

    pub fn relation(&self, sym: usize) -> &BTreeSet<Vec<u64>> {
        &self.relations[sym]
    }

    /// Checks that `Le` is a reflexive, antisymmetric, transitive, total order.
    pub fn check_linear_order(&self) -> Result<()> {
        let le = self.vocab.le().ok_or_else(|| Error::NotALinearOrder("no Le symbol".into()))?;
        if self.vocab.len() != 3 {
            return Err(Error::NotALinearOrder("vocabulary is not {=, !=, Le}".into()));
        }
        let r = &self.relations[le];
        let h = |a: u64, b: u64| r.contains(&vec![a, b]);
        let n = self.size;
        for a in 0..n {
            for b in 0..n {
                if !(h(a, b) || h(b, a)) {
                    return Err(Error::NotALinearOrder(format!("{a} and {b} incomparable")));
                }
                if a != b && h(a, b) && h(b, a) {
                    return Err(Error::NotALinearOrder(format!("{a} and {b} not antisymmetric")));
                }
                for c in 0..n {
                    if h(a, b) && h(b, c) && !h(a, c) {
                        return Err(Error::NotALinearOrder("not transitive".into()));
                    }
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn permutations(n: usize) -> Vec<Vec<u64>> {
    fn go(cur: &mut Vec<u64>, used: &mut Vec<bool>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i as u64);
                go(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn equality(sym: usize, args: &[u64], real: impl Fn(u64) -> bool) -> Option<bool> {
    match sym {
        EQ => Some(args[0] == args[1] && real(args[0])),
        NEQ => Some(args[0] != args[1] && real(args[0]) && real(args[1])),
        _ => None,
    }
}

impl Structure for Table {
    fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    fn size(&self) -> Option<u64> {
        Some(self.size)
    }

    fn holds(&self, sym: usize, args: &[u64]) -> bool {
        if args.iter().any(|&e| e >= self.size) {
            return false;
        }
        equality(sym, args, |_| true).unwrap_or_else(|| self.relations[sym].contains(args))
    }
}

/// Linear orders named by order type, plus the tilde and padding wrappers.
///
/// `tilde(S)` has elements `pair(c, r)`, ordered by class `c` in `S`. If `S`
/// is finite, elements whose class lies outside `S` satisfy no atom.
/// `pad(S)` additionally makes `x = x` true of every element of ω; this is
/// the image of `S` under a sanitized operator that adds nothing else.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Catalog {
    Omega,
    OmegaStar,
    Fin(u64),
    Order(Arc<Table>),
    Tilde(Box<Catalog>),
    Pad(Box<Catalog>),
}

impl Catalog {
    pub fn tilde(self) -> Catalog {
        Catalog::Tilde(Box::new(self))
    }

    pub fn pad(self) -> Catalog {
        Catalog::Pad(Box::new(self))
    }

    /// Whether `e` is an element of the structure proper (not a padding element).
    pub fn is_real(&self, e: u64) -> bool {
        match self {
            Catalog::Omega | Catalog::OmegaStar => true,
            Catalog::Fin(m) => e < *m,
            Catalog::Order(t) => e < t.size,
            Catalog::Tilde(s) => s.is_real(unpair(e).0),
            Catalog::Pad(s) => s.is_real(e),
        }
    }

    /// Order between real elements.
    pub fn le(&self, a: u64, b: u64) -> bool {
        match self {
            Catalog::Omega | Catalog::Fin(_) => a <= b,
            Catalog::OmegaStar => a >= b,
            Catalog::Order(t) => t.relations[2].contains(&vec![a, b]),
            Catalog::Tilde(s) => s.le(unpair(a).0, unpair(b).0),
            Catalog::Pad(s) => s.le(a, b),
        }
    }

    /// The innermost order type under the wrappers.
    pub fn base(&self) -> &Catalog {
        match self {
            Catalog::Tilde(s) | Catalog::Pad(s) => s.base(),
            c => c,
        }
    }

    pub fn is_padded(&self) -> bool {
        matches!(self, Catalog::Pad(_))
    }
}

impl Structure for Catalog {
    fn vocabulary(&self) -> &Vocabulary {
        static LO: OnceLock<Vocabulary> = OnceLock::new();
        LO.get_or_init(Vocabulary::linear_order)
    }

    fn size(&self) -> Option<u64> {
        match self {
            Catalog::Fin(m) => Some(*m),
            Catalog::Order(t) => Some(t.size),
            _ => None,
        }
    }

    fn holds(&self, sym: usize, args: &[u64]) -> bool {
        if let Catalog::Pad(s) = self {
            if sym == EQ && args[0] == args[1] {
                return true;
            }
            return s.holds(sym, args);
        }
        if !args.iter().all(|&e| self.is_real(e)) {
            return false;
        }
        equality(sym, args, |_| true).unwrap_or_else(|| self.le(args[0], args[1]))
    }
}

impl fmt::Display for Catalog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Catalog::Omega => write!(f, "omega"),
            Catalog::OmegaStar => write!(f, "omega_star"),
            Catalog::Fin(m) => write!(f, "fin({m})"),
            Catalog::Order(t) => write!(f, "order({})", t.size),
            Catalog::Tilde(s) => write!(f, "tilde({s})"),
            Catalog::Pad(s) => write!(f, "pad({s})"),
        }
    }
}

impl FromStr for Catalog {
    type Err = Error;

    fn from_str(s: &str) -> Result<Catalog> {
        let s = s.trim();
        let inner = |pre: &str| s.strip_prefix(pre).and_then(|r| r.strip_suffix(')'));
        match s {
            "omega" => Ok(Catalog::Omega),
            "omega_star" => Ok(Catalog::OmegaStar),
            _ => {
                if let Some(m) = inner("fin(") {
                    m.trim()
                        .parse()
                        .map(Catalog::Fin)
                        .map_err(|_| Error::UnsupportedCatalog(s.into()))
                } else if let Some(r) = inner("tilde(") {
                    Ok(r.parse::<Catalog>()?.tilde())
                } else if let Some(r) = inner("pad(") {
                    Ok(r.parse::<Catalog>()?.pad())
                } else {
                    Err(Error::UnsupportedCatalog(s.into()))
                }
            }
        }
    }
}

/// Structure known only through an enumeration of the codes of its true atoms.
#[derive(Clone)]
pub struct DiagramStream {
    pub label: String,
    pub vocab: Vocabulary,
    pub codes: Arc<dyn Fn(usize) -> Option<u64> + Send + Sync>,
}

impl fmt::Debug for DiagramStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiagramStream({})", self.label)
    }
}

impl DiagramStream {
    /// Enumerates the true atoms of a decidable structure in index order.
    pub fn of(label: impl Into<String>, s: Arc<dyn Structure>) -> DiagramStream {
        let codec = AtomCodec::shared(s.vocabulary());
        DiagramStream {
            label: label.into(),
            vocab: s.vocabulary().clone(),
            codes: Arc::new(move |p| {
                let n = p as u64;
                diagram_bit(&*s, &codec, n).then_some(n)
            }),
        }
    }

    /// Built-in generators: catalog tags enumerated as streams.
    pub fn by_name(name: &str) -> Result<DiagramStream> {
        let c: Catalog = name.parse().map_err(|_| Error::UnknownGenerator(name.into()))?;
        Ok(DiagramStream::of(name, Arc::new(c)))
    }
}

#[derive(Clone, Debug)]
pub enum Presentation {
    Table(Arc<Table>),
    Catalog(Catalog),
    Stream(DiagramStream),
}

impl Presentation {
    pub fn vocabulary(&self) -> &Vocabulary {
        match self {
            Presentation::Table(t) => &t.vocab,
            Presentation::Catalog(c) => c.vocabulary(),
            Presentation::Stream(s) => &s.vocab,
        }
    }

    pub fn as_structure(&self) -> Option<&dyn Structure> {
        match self {
            Presentation::Table(t) => Some(&**t),
            Presentation::Catalog(c) => Some(c),
            Presentation::Stream(_) => None,
        }
    }
}

/// `D_A(n)`: truth of atom `n` under `x_i ↦ i`.
pub fn diagram_bit(s: &dyn Structure, codec: &AtomCodec, n: u64) -> bool {
    let a = codec.decode(n);
    let args: Vec<u64> = a.var_indices().iter().map(|&v| v as u64).collect();
    if let Some(k) = s.size() {
        if args.iter().any(|&e| e >= k) {
            return false;
        }
    }
    s.holds(a.sym, &args)
}

pub fn diagram(p: &Presentation, codec: &AtomCodec, n: u64) -> Result<bool> {
    match p.as_structure() {
        Some(s) => Ok(diagram_bit(s, codec, n)),
        None => Err(Error::UndecidablePresentation),
    }
}

/// The first `len` diagram bits as a `0`/`1` string.
pub fn diagram_bits(p: &Presentation, codec: &AtomCodec, len: u64) -> Result<String> {
    (0..len)
        .map(|n| diagram(p, codec, n).map(|b| if b { '1' } else { '0' }))
        .collect()
}

pub fn tilde(p: &Presentation) -> Result<Presentation> {
    match p {
        Presentation::Catalog(Catalog::Pad(_)) => Err(Error::NotALinearOrder("padded structure".into())),
        Presentation::Catalog(c) => Ok(Presentation::Catalog(c.clone().tilde())),
        Presentation::Table(t) => {
            t.check_linear_order()?;
            Ok(Presentation::Catalog(Catalog::Order(t.clone()).tilde()))
        }
        Presentation::Stream(_) => Err(Error::UndecidablePresentation),
    }
}

/// `A ⪯ B`: every relation of `A` is contained in that of `B`.
pub fn substructure_leq(a: &Table, b: &Table) -> Result<bool> {
    if a.vocab != b.vocab || a.size != b.size {
        return Err(Error::VocabularyMismatch);
    }
    Ok(a.relations.iter().zip(&b.relations).all(|(r, s)| r.is_subset(s)))
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum UniverseFile {
    Omega,
    Finite(u64),
}

/// JSON structure file.
#[derive(Serialize, Deserialize)]
pub struct StructureFile {
    pub vocabulary: Vocabulary,
    universe: UniverseFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<BTreeMap<String, Vec<Vec<u64>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub catalog: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
}

impl StructureFile {
    pub fn into_presentation(self) -> Result<Presentation> {
        match (self.table, self.catalog, self.generator) {
            (Some(t), None, None) => match self.universe {
                UniverseFile::Finite(k) => Ok(Presentation::Table(Arc::new(Table::new(self.vocabulary, k, t)?))),
                UniverseFile::Omega => Err(Error::InfiniteUniverse),
            },
            (None, Some(c), None) => {
                if self.vocabulary != Vocabulary::linear_order() {
                    return Err(Error::VocabularyMismatch);
                }
                Ok(Presentation::Catalog(c.parse()?))
            }
            (None, None, Some(g)) => {
                let s = DiagramStream::by_name(&g)?;
                if s.vocab != self.vocabulary {
                    return Err(Error::VocabularyMismatch);
                }
                Ok(Presentation::Stream(s))
            }
            _ => Err(Error::Io("structure file needs exactly one of table, catalog, generator".into())),
        }
    }

    pub fn from_table(t: &Table) -> StructureFile {
        let table = (2..t.vocab.len())
            .map(|s| (t.vocab.name(s).to_string(), t.relations[s].iter().cloned().collect()))
            .collect();
        StructureFile {
            vocabulary: t.vocab.clone(),
            universe: UniverseFile::Finite(t.size),
            table: Some(table),
            catalog: None,
            generator: None,
        }
    }
}

/// Reads a structure from a catalog tag (`omega`, `tilde(fin(3))`, …) or a
/// JSON file path.
pub fn load_structure(spec: &str) -> Result<Presentation> {
    if let Ok(c) = spec.parse::<Catalog>() {
        return Ok(Presentation::Catalog(c));
    }
    let text = std::fs::read_to_string(spec)?;
    let file: StructureFile = serde_json::from_str(&text)?;
    file.into_presentation()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn le(a: u32, b: u32) -> TAtom {
        TAtom::new(2, &[a, b])
    }

    #[test]
    fn first_atoms() {
        let c = AtomCodec::linear_order();
        assert_eq!(c.decode(0), TAtom::eq(0, 0));
        assert_eq!(c.decode(1), TAtom::neq(0, 0));
        assert_eq!(c.decode(2), le(0, 0));
        assert_eq!(c.count_le(0), 3);
        assert_eq!(c.count_le(1), 12);
    }

    #[test]
    fn group_order_by_code() {
        // maxvar-1 atoms sorted by pair(sym, seq_code(vars)); independent recomputation
        let c = AtomCodec::linear_order();
        let mut atoms: Vec<TAtom> = (3..12).map(|n| c.decode(n)).collect();
        let codes: Vec<u128> = atoms.iter().map(canonical_code).collect();
        let mut sorted = codes.clone();
        sorted.sort();
        assert_eq!(codes, sorted);
        atoms.sort();
        atoms.dedup();
        assert_eq!(atoms.len(), 9);
    }

    #[test]
    fn bijection_and_maxvar_bound() {
        let c = AtomCodec::linear_order();
        for n in 0..10_000u64 {
            let a = c.decode(n);
            assert_eq!(c.encode(&a).unwrap(), n);
            let m = a.var_indices().into_iter().max().unwrap() as u64;
            assert!(m <= n);
            assert!(n == 0 || m < n);
        }
    }

    #[test]
    fn catalog_diagrams() {
        let c = AtomCodec::linear_order();
        let n = c.encode(&le(2, 5)).unwrap();
        let omega = Presentation::Catalog(Catalog::Omega);
        let star = Presentation::Catalog(Catalog::OmegaStar);
        assert!(diagram(&omega, &c, n).unwrap());
        assert!(!diagram(&star, &c, n).unwrap());
        let fin2 = Presentation::Catalog(Catalog::Fin(2));
        let eq03 = c.encode(&TAtom::eq(0, 3)).unwrap();
        assert!(!diagram(&fin2, &c, eq03).unwrap());
        let table = Presentation::Table(Arc::new(Table::linear_order(&[0, 1])));
        for n in 0..200 {
            assert_eq!(diagram(&fin2, &c, n).unwrap(), diagram(&table, &c, n).unwrap());
        }
    }

    #[test]
    fn tilde_classes() {
        use crate::coding::pair;
        let t = Catalog::Omega.tilde();
        assert!(t.holds(2, &[pair(0, 5), pair(0, 9)]));
        assert!(t.holds(2, &[pair(0, 9), pair(0, 5)]));
        assert!(t.holds(2, &[pair(0, 3), pair(1, 7)]));
        assert!(!t.holds(2, &[pair(1, 7), pair(0, 3)]));
        let s = Catalog::OmegaStar.tilde();
        assert!(s.holds(2, &[pair(1, 7), pair(0, 3)]));
    }

    #[test]
    fn tilde_quotient_is_isomorphic() {
        use crate::coding::pair;
        for m in 1..=6u64 {
            let t = Catalog::Fin(m).tilde();
            let elems: Vec<u64> = (0..m).flat_map(|c| (0..3).map(move |r| pair(c, r))).collect();
            // quotient by mutual Le, then compare the induced order to fin(m)
            let mut classes: Vec<Vec<u64>> = Vec::new();
            for &e in &elems {
                match classes.iter_mut().find(|k| t.holds(2, &[k[0], e]) && t.holds(2, &[e, k[0]])) {
                    Some(k) => k.push(e),
                    None => classes.push(vec![e]),
                }
            }
            assert_eq!(classes.len() as u64, m);
            classes.sort_by_key(|k| (0..m).filter(|&c| t.holds(2, &[pair(c, 0), k[0]])).count());
            for (i, k) in classes.iter().enumerate() {
                for (j, l) in classes.iter().enumerate() {
                    assert_eq!(t.holds(2, &[k[0], l[0]]), i <= j);
                }
            }
            assert!(!t.holds(EQ, &[pair(m, 0), pair(m, 0)]));
        }
    }

    #[test]
    fn substructure_order() {
        let v = Vocabulary::linear_order();
        let mk = |t: Vec<Vec<u64>>| Table::new(v.clone(), 2, [("Le".to_string(), t)].into()).unwrap();
        let a = mk(vec![vec![0, 0]]);
        let b = mk(vec![vec![0, 0], vec![0, 1]]);
        assert!(substructure_leq(&a, &a).unwrap());
        assert!(substructure_leq(&a, &b).unwrap());
        assert!(!substructure_leq(&b, &a).unwrap());
        let c = AtomCodec::linear_order();
        let (pa, pb) = (Presentation::Table(Arc::new(a)), Presentation::Table(Arc::new(b)));
        for n in 0..100 {
            assert!(diagram(&pa, &c, n).unwrap() <= diagram(&pb, &c, n).unwrap());
        }
        let other = Table::new(Vocabulary::equality(), 2, BTreeMap::new()).unwrap();
        assert_eq!(substructure_leq(&other, &mk(vec![])), Err(Error::VocabularyMismatch));
    }

    #[test]
    fn catalog_tags_parse() {
        for tag in ["omega", "omega_star", "fin(3)", "tilde(omega_star)", "pad(tilde(fin(2)))"] {
            assert_eq!(tag.parse::<Catalog>().unwrap().to_string(), tag);
        }
        assert!("tilde(zeta)".parse::<Catalog>().is_err());
    }

    #[test]
    fn linear_order_check() {
        assert_eq!(Table::all_linear_orders(3).len(), 6);
        Table::all_linear_orders(3).iter().for_each(|t| t.check_linear_order().unwrap());
        let v = Vocabulary::linear_order();
        let bad = Table::new(v, 2, [("Le".to_string(), vec![vec![0, 0], vec![1, 1]])].into()).unwrap();
        assert!(matches!(
            tilde(&Presentation::Table(Arc::new(bad))),
            Err(Error::NotALinearOrder(_))
        ));
    }

    #[test]
    fn structure_file_roundtrip() {
        let t = Table::linear_order(&[1, 0]);
        let json = serde_json::to_string(&StructureFile::from_table(&t)).unwrap();
        let back: StructureFile = serde_json::from_str(&json).unwrap();
        match back.into_presentation().unwrap() {
            Presentation::Table(u) => assert_eq!(*u, t),
            _ => panic!(),
        }
    }
}
