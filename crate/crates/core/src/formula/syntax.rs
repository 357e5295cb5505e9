//! Canonical text grammar.
//!
//! ```text
//! formula := join | sigma0 | pi0
//! join    := ("OR" | "AND") "[" "i" "in" family "]"
//! family  := "{" [member ("," member)*] "}" | "gen:" ["~"] label
//! member  := ["EX" vars "." | "ALL" vars "."] (atoms | "(" formula ")" ("&" | "|") "(" formula ")")
//! sigma0  := "(&)" | atom ("&" atom)*
//! pi0     := "(|)" | "~" atom ("|" "~" atom)*
//! atom    := R "(" term ("," term)* ")" | term "=" term | term "!=" term
//!          | "D(" nat ")" | "TRUE" | "FALSE"
//! term    := "x" nat | "@" nat
//! ```
//!
//! Printing sorts finite families and atom lists, so `print` is canonical.

use super::{AtomLike, Body, Clause, ClauseBody, Formula, NAtom, TAtom, Tag, Term, Vocabulary, EQ, NEQ};
use crate::error::{Error, Result};
use crate::family::{Family, Stream};
use std::collections::BTreeMap;
use std::fmt::Write;

/// Atom types that have a concrete syntax.
pub trait AtomSyntax: AtomLike {
    fn write_atom(&self, vocab: &Vocabulary, out: &mut String);
    fn parse_atom(p: &mut Parser<'_>, vocab: &Vocabulary) -> Result<Self>;
}

fn write_term(t: &Term, out: &mut String) {
    match t {
        Term::Var(v) => write!(out, "x{v}").unwrap(),
        Term::Const(c) => write!(out, "@{c}").unwrap(),
    }
}

impl AtomSyntax for TAtom {
    fn write_atom(&self, vocab: &Vocabulary, out: &mut String) {
        match self.sym {
            EQ | NEQ if self.args.len() == 2 => {
                write_term(&self.args[0], out);
                out.push_str(if self.sym == EQ { " = " } else { " != " });
                write_term(&self.args[1], out);
            }
            _ => {
                out.push_str(vocab.name(self.sym));
                out.push('(');
                for (i, t) in self.args.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    write_term(t, out);
                }
                out.push(')');
            }
        }
    }

    fn parse_atom(p: &mut Parser<'_>, vocab: &Vocabulary) -> Result<Self> {
        p.skip_ws();
        if p.peek_term() {
            let a = p.term()?;
            p.skip_ws();
            let sym = if p.eat("!=") {
                NEQ
            } else if p.eat("=") {
                EQ
            } else {
                return Err(p.err("expected `=` or `!=`"));
            };
            let b = p.term()?;
            return Ok(TAtom { sym, args: vec![a, b] });
        }
        let start = p.pos;
        let name = p.ident().ok_or_else(|| p.err("expected an atom"))?;
        let sym = vocab.lookup(&name).filter(|&s| s > NEQ).ok_or(Error::Parse {
            pos: start,
            msg: format!("unknown relation symbol `{name}`"),
        })?;
        p.expect("(")?;
        let mut args = vec![p.term()?];
        while p.eat(",") {
            args.push(p.term()?);
        }
        p.expect(")")?;
        let atom = TAtom { sym, args };
        atom.check(vocab).map_err(|e| Error::Parse {
            pos: start,
            msg: e.to_string(),
        })?;
        Ok(atom)
    }
}

impl AtomSyntax for NAtom {
    fn write_atom(&self, _vocab: &Vocabulary, out: &mut String) {
        match self {
            NAtom::Top => out.push_str("TRUE"),
            NAtom::Bot => out.push_str("FALSE"),
            NAtom::D(n) => write!(out, "D({n})").unwrap(),
        }
    }

    fn parse_atom(p: &mut Parser<'_>, _vocab: &Vocabulary) -> Result<Self> {
        p.skip_ws();
        match p.ident().as_deref() {
            Some("TRUE") => Ok(NAtom::Top),
            Some("FALSE") => Ok(NAtom::Bot),
            Some("D") => {
                p.expect("(")?;
                let n = p.nat()?;
                p.expect(")")?;
                Ok(NAtom::D(n))
            }
            _ => Err(p.err("expected TRUE, FALSE or D(n)")),
        }
    }
}

/// Named stream families available to the parser.
pub struct Registry<A> {
    entries: BTreeMap<String, (Tag, u32, Stream<Clause<A>>)>,
}

impl<A> Default for Registry<A> {
    fn default() -> Self {
        Registry {
            entries: BTreeMap::new(),
        }
    }
}

impl<A: AtomLike> Registry<A> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers the family of the join `f`; the stream keeps its own label.
    pub fn insert(&mut self, f: &Formula<A>) -> Result<()> {
        match f.family() {
            Some(Family::Stream(s)) => {
                let name = s.label().trim_start_matches('~').to_string();
                let (tag, s) = if s.label().starts_with('~') {
                    (f.tag().dual(), s.dualize(|c: Clause<A>| c.dual()))
                } else {
                    (f.tag(), s.clone())
                };
                self.entries.insert(name, (tag, f.level(), s));
                Ok(())
            }
            _ => Err(Error::MalformedFormula("only stream joins can be registered".into())),
        }
    }

    pub fn get(&self, name: &str) -> Option<Formula<A>> {
        let (base, dual) = match name.strip_prefix('~') {
            Some(b) => (b, true),
            None => (name, false),
        };
        let (tag, level, s) = self.entries.get(base)?;
        let f = Formula::join_stream(*tag, *level, s.clone());
        Some(if dual { f.dual() } else { f })
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

impl Registry<NAtom> {
    /// Registry holding `diag = OR[i in ω] D(i)`.
    pub fn with_builtins() -> Self {
        let mut r = Registry::new();
        let s = Stream::new("diag", |p| Some(Clause::base(vec![], vec![NAtom::D(p as u64)])));
        r.insert(&Formula::join_stream(Tag::Sigma, 1, s)).expect("stream join");
        r
    }
}

pub fn print<A: AtomSyntax>(f: &Formula<A>, vocab: &Vocabulary) -> String {
    let mut out = String::new();
    write_formula(&f.canonicalize(), vocab, &mut out);
    out
}

fn write_atoms<A: AtomSyntax>(tag: Tag, atoms: &[A], vocab: &Vocabulary, out: &mut String) {
    if atoms.is_empty() {
        out.push_str(match tag {
            Tag::Sigma => "(&)",
            Tag::Pi => "(|)",
        });
        return;
    }
    for (i, a) in atoms.iter().enumerate() {
        if i > 0 {
            out.push_str(match tag {
                Tag::Sigma => " & ",
                Tag::Pi => " | ",
            });
        }
        if tag == Tag::Pi {
            out.push('~');
        }
        a.write_atom(vocab, out);
    }
}

fn write_formula<A: AtomSyntax>(f: &Formula<A>, vocab: &Vocabulary, out: &mut String) {
    match f.body() {
        Body::Atoms(atoms) => write_atoms(f.tag(), atoms, vocab, out),
        Body::Join(fam) => {
            out.push_str(match f.tag() {
                Tag::Sigma => "OR[i in ",
                Tag::Pi => "AND[i in ",
            });
            match fam {
                Family::Stream(s) => write!(out, "gen:{}", s.label()).unwrap(),
                Family::Finite(cs) => {
                    out.push('{');
                    for (i, c) in cs.iter().enumerate() {
                        if i > 0 {
                            out.push_str(", ");
                        }
                        write_clause(f.tag(), c, vocab, out);
                    }
                    out.push('}');
                }
            }
            out.push(']');
        }
    }
}

fn write_clause<A: AtomSyntax>(tag: Tag, c: &Clause<A>, vocab: &Vocabulary, out: &mut String) {
    if !c.bound.is_empty() {
        out.push_str(match tag {
            Tag::Sigma => "EX",
            Tag::Pi => "ALL",
        });
        for v in &c.bound {
            write!(out, " x{v}").unwrap();
        }
        out.push_str(" . ");
    }
    match &c.body {
        ClauseBody::Base(atoms) => write_atoms(tag, atoms, vocab, out),
        ClauseBody::Pair(s, p) => {
            out.push('(');
            write_formula(s, vocab, out);
            out.push_str(match tag {
                Tag::Sigma => ") & (",
                Tag::Pi => ") | (",
            });
            write_formula(p, vocab, out);
            out.push(')');
        }
    }
}

pub fn parse<A: AtomSyntax>(src: &str, vocab: &Vocabulary, registry: Option<&Registry<A>>) -> Result<Formula<A>> {
    let mut p = Parser { src, pos: 0 };
    let f = p.formula(vocab, registry)?;
    p.skip_ws();
    if p.pos != src.len() {
        return Err(p.err("trailing input"));
    }
    f.classify()?;
    Ok(f)
}

/// Recursive-descent cursor over the source text.
pub struct Parser<'s> {
    src: &'s str,
    pos: usize,
}

impl<'s> Parser<'s> {
    fn rest(&self) -> &'s str {
        &self.src[self.pos..]
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        let r = self.rest();
        self.pos += r.len() - r.trim_start().len();
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{s}`")))
        }
    }

    fn peek(&mut self, s: &str) -> bool {
        self.skip_ws();
        self.rest().starts_with(s)
    }

    /// Consumes the keyword `kw` if it is not a prefix of a longer identifier.
    fn keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        let r = self.rest();
        let boundary = r[kw.len().min(r.len())..]
            .chars()
            .next()
            .map_or(true, |c| !(c.is_ascii_alphanumeric() || c == '_'));
        if r.starts_with(kw) && boundary {
            self.pos += kw.len();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let r = self.rest();
        if !r.starts_with(|c: char| c.is_ascii_alphabetic()) {
            return None;
        }
        let len = r.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_')).unwrap_or(r.len());
        self.pos += len;
        Some(r[..len].to_string())
    }

    fn nat(&mut self) -> Result<u64> {
        self.skip_ws();
        let r = self.rest();
        let len = r.find(|c: char| !c.is_ascii_digit()).unwrap_or(r.len());
        if len == 0 {
            return Err(self.err("expected a number"));
        }
        let n = r[..len].parse().map_err(|_| self.err("number out of range"))?;
        self.pos += len;
        Ok(n)
    }

    fn peek_term(&mut self) -> bool {
        self.skip_ws();
        let r = self.rest();
        r.starts_with('@') || (r.starts_with('x') && r[1..].starts_with(|c: char| c.is_ascii_digit()))
    }

    fn var(&mut self) -> Result<u32> {
        self.skip_ws();
        let r = self.rest();
        if !(r.starts_with('x') && r[1..].starts_with(|c: char| c.is_ascii_digit())) {
            return Err(self.err("expected a variable"));
        }
        self.pos += 1;
        let n = self.nat()?;
        u32::try_from(n).map_err(|_| self.err("variable index out of range"))
    }

    fn term(&mut self) -> Result<Term> {
        if self.eat("@") {
            Ok(Term::Const(self.nat()?))
        } else {
            Ok(Term::Var(self.var()?))
        }
    }

    fn formula<A: AtomSyntax>(&mut self, vocab: &Vocabulary, reg: Option<&Registry<A>>) -> Result<Formula<A>> {
        if self.keyword("OR") {
            self.join(Tag::Sigma, vocab, reg)
        } else if self.keyword("AND") {
            self.join(Tag::Pi, vocab, reg)
        } else {
            let tag = if self.peek("~") || self.peek("(|)") {
                Tag::Pi
            } else {
                Tag::Sigma
            };
            Ok(Formula::atoms(tag, self.atoms(tag, vocab)?))
        }
    }

    fn atoms<A: AtomSyntax>(&mut self, tag: Tag, vocab: &Vocabulary) -> Result<Vec<A>> {
        let (empty, sep) = match tag {
            Tag::Sigma => ("(&)", "&"),
            Tag::Pi => ("(|)", "|"),
        };
        if self.eat(empty) {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        loop {
            if tag == Tag::Pi {
                self.expect("~")?;
            }
            out.push(A::parse_atom(self, vocab)?);
            if !self.eat(sep) {
                return Ok(out);
            }
        }
    }

    fn join<A: AtomSyntax>(&mut self, tag: Tag, vocab: &Vocabulary, reg: Option<&Registry<A>>) -> Result<Formula<A>> {
        self.expect("[")?;
        if !(self.keyword("i") && self.keyword("in")) {
            return Err(self.err("expected `i in`"));
        }
        let f = if self.eat("gen:") {
            let r = self.rest();
            let len = r.find(|c: char| c.is_whitespace() || "]},)".contains(c)).unwrap_or(r.len());
            let name = &r[..len];
            let start = self.pos;
            self.pos += len;
            let f = reg
                .and_then(|r| r.get(name))
                .ok_or_else(|| Error::UnknownGenerator(name.to_string()))?;
            if f.tag() != tag {
                return Err(Error::Parse {
                    pos: start,
                    msg: format!("generator `{name}` has the wrong polarity"),
                });
            }
            f
        } else {
            self.expect("{")?;
            let mut clauses = Vec::new();
            if !self.eat("}") {
                loop {
                    clauses.push(self.clause(tag, vocab, reg)?);
                    if self.eat("}") {
                        break;
                    }
                    self.expect(",")?;
                }
            }
            Formula::join(tag, clauses)
        };
        self.expect("]")?;
        Ok(f)
    }

    fn clause<A: AtomSyntax>(&mut self, tag: Tag, vocab: &Vocabulary, reg: Option<&Registry<A>>) -> Result<Clause<A>> {
        let q = match tag {
            Tag::Sigma => "EX",
            Tag::Pi => "ALL",
        };
        let mut bound = Vec::new();
        if self.keyword(q) {
            while !self.eat(".") {
                bound.push(self.var()?);
            }
            if bound.is_empty() {
                return Err(self.err("empty quantifier block"));
            }
        }
        if self.peek("(") && !self.peek("(&)") && !self.peek("(|)") {
            self.expect("(")?;
            let s = self.formula(vocab, reg)?;
            self.expect(")")?;
            self.expect(match tag {
                Tag::Sigma => "&",
                Tag::Pi => "|",
            })?;
            self.expect("(")?;
            let p = self.formula(vocab, reg)?;
            self.expect(")")?;
            Ok(Clause::pair(bound, s, p))
        } else {
            Ok(Clause::base(bound, self.atoms(tag, vocab)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lo() -> Vocabulary {
        Vocabulary::linear_order()
    }

    #[test]
    fn roundtrip_phi0() {
        let src = "OR[i in {EX x0 . ((&)) & (AND[i in {ALL x1 . ~x0 != x1 | ~Le(x1,x0)}])}]";
        let f: Formula<TAtom> = parse(src, &lo(), None).unwrap();
        assert_eq!(f.classify().unwrap(), (Tag::Sigma, 2));
        assert_eq!(print(&f, &lo()), src);
    }

    #[test]
    fn atoms_and_constants() {
        let f: Formula<TAtom> = parse("Le(@3,@5) & x0 = x1", &lo(), None).unwrap();
        assert_eq!(print(&f, &lo()), "x0 = x1 & Le(@3,@5)");
        let g: Formula<TAtom> = parse("(|)", &lo(), None).unwrap();
        assert_eq!(g.classify().unwrap(), (Tag::Pi, 0));
    }

    #[test]
    fn parse_errors() {
        let v = lo();
        assert!(matches!(parse::<TAtom>("Foo(x0)", &v, None), Err(Error::Parse { .. })));
        assert!(matches!(parse::<TAtom>("Le(x0)", &v, None), Err(Error::Parse { .. })));
        assert!(matches!(parse::<TAtom>("x0 = x1 junk", &v, None), Err(Error::Parse { .. })));
        assert!(matches!(
            parse::<TAtom>("OR[i in gen:nope]", &v, None),
            Err(Error::UnknownGenerator(_))
        ));
        assert!(parse::<TAtom>("OR[i in {(x0 = x0) & (x0 = x0)}]", &v, None).is_err());
    }

    #[test]
    fn generators_and_duals() {
        let reg = Registry::with_builtins();
        let v = Vocabulary::equality();
        let f: Formula<NAtom> = parse("OR[i in gen:diag]", &v, Some(&reg)).unwrap();
        let n = f.neg().unwrap();
        assert_eq!(print(&n, &v), "AND[i in gen:~diag]");
        let back: Formula<NAtom> = parse("AND[i in gen:~diag]", &v, Some(&reg)).unwrap();
        assert_eq!(back, n);
        assert_eq!(back.neg().unwrap(), f);
    }

    #[test]
    fn n_atoms() {
        let v = Vocabulary::equality();
        let f: Formula<NAtom> = parse("OR[i in {D(2) & D(5), TRUE}]", &v, None).unwrap();
        assert_eq!(print(&f, &v), "OR[i in {TRUE, D(2) & D(5)}]");
    }
}
