//! Finitely presented groups on generators `r0, r1, …`.
//!
//! Text format:
//!
//! ```text
//! presentation := "gens" INT ";" relator ("," relator)*
//! relator      := term+
//! term         := atom ("^" INT)?
//! atom         := "r" INT | "(" term+ ")"
//! ```
//!
//! A negative power is accepted when every generator under it is declared
//! involutory by a relator `ri^2`; the inverse is then the reversed word.

use std::fmt;

use crate::error::{Error, Result};

/// A positive word in the generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pow(&self, k: usize) -> Word {
        Word(self.0.repeat(k))
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    /// The word with every generator `i` replaced by `map[i]`.
    pub fn relabel(&self, map: &[usize]) -> Word {
        Word(self.0.iter().map(|&i| map[i]).collect())
    }

    /// Shortest `u` and largest `k` with `self = u^k`.
    pub fn root(&self) -> (Word, usize) {
        let n = self.0.len();
        for p in 1..=n {
            if n.is_multiple_of(p) && (p..n).all(|i| self.0[i] == self.0[i - p]) {
                return (Word(self.0[..p].to_vec()), n / p);
            }
        }
        (self.clone(), 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub ngens: usize,
    pub relators: Vec<Word>,
}

impl Presentation {
    pub fn new(ngens: usize, relators: Vec<Word>) -> Result<Self> {
        for w in &relators {
            if w.is_empty() {
                return Err(Error::InvalidParameter("empty relator".into()));
            }
            if let Some(&i) = w.0.iter().find(|&&i| i >= ngens) {
                return Err(Error::GeneratorOutOfRange { index: i, ngens });
            }
        }
        Ok(Presentation { ngens, relators })
    }

    /// Generators with a relator `ri^2`.
    pub fn involutory(&self) -> Vec<bool> {
        let mut inv = vec![false; self.ngens];
        for w in &self.relators {
            if let [a, b] = w.0[..] {
                if a == b {
                    inv[a] = true;
                }
            }
        }
        inv
    }

    pub fn push(&mut self, w: Word) {
        self.relators.push(w);
    }

    /// Generators renumbered `ri ↦ r(n−1−i)`.
    pub fn reversed_generators(&self) -> Presentation {
        let map: Vec<usize> = (0..self.ngens).rev().collect();
        Presentation {
            ngens: self.ngens,
            relators: self.relators.iter().map(|w| w.relabel(&map)).collect(),
        }
    }

    /// Relators as a set up to the natural symmetries of an involutory
    /// relator: cyclic rotation and inversion (reversal).
    pub fn canonical_relators(&self) -> Vec<Word> {
        let mut out: Vec<Word> = self
            .relators
            .iter()
            .map(|w| {
                let n = w.len();
                let mut best = w.clone();
                for v in [w.clone(), w.reversed()] {
                    for s in 0..n {
                        let rot = Word(v.0[s..].iter().chain(&v.0[..s]).copied().collect());
                        best = best.min(rot);
                    }
                }
                best
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Only involutory generators, and every relator other than the squares
    /// is cyclically reduced (no letter next to itself, wrapping around).
    pub fn has_coxeter_shape(&self) -> bool {
        self.involutory().iter().all(|&b| b)
            && self.relators.iter().all(|w| {
                let n = w.len();
                n == 2 && w.0[0] == w.0[1] || (0..n).all(|i| w.0[i] != w.0[(i + 1) % n])
            })
    }
}

fn render_word(w: &Word, out: &mut String) {
    let (root, k) = w.root();
    let body: Vec<String> = root.0.iter().map(|i| format!("r{i}")).collect();
    if k == 1 {
        out.push_str(&body.join(" "));
    } else if root.len() == 1 {
        out.push_str(&format!("{}^{k}", body[0]));
    } else {
        out.push_str(&format!("({})^{k}", body.join(" ")));
    }
}

impl fmt::Display for Presentation {
    /// Canonical text; periodic relators are written as powers.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = format!("gens {};", self.ngens);
        for (i, w) in self.relators.iter().enumerate() {
            s.push_str(if i == 0 { " " } else { ", " });
            render_word(w, &mut s);
        }
        f.write_str(&s)
    }
}

pub fn render(p: &Presentation) -> String {
    p.to_string()
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Gens,
    Gen(usize),
    Int(i64),
    Semi,
    Comma,
    Caret,
    Minus,
    LParen,
    RParen,
}

#[derive(Clone, Copy, Debug)]
struct Pos {
    line: usize,
    column: usize,
}

fn err(pos: Pos, message: impl Into<String>) -> Error {
    Error::Parse {
        line: pos.line,
        column: pos.column,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<(Vec<(Tok, Pos)>, Pos)> {
    let mut toks = Vec::new();
    let mut chars = text.chars().peekable();
    let mut pos = Pos { line: 1, column: 1 };
    let advance = |c: char, pos: &mut Pos| {
        if c == '\n' {
            pos.line += 1;
            pos.column = 1;
        } else {
            pos.column += 1;
        }
    };
    while let Some(&c) = chars.peek() {
        let start = pos;
        if c.is_whitespace() {
            chars.next();
            advance(c, &mut pos);
            continue;
        }
        let read_int = |chars: &mut std::iter::Peekable<std::str::Chars>, pos: &mut Pos| -> Result<i64> {
            let mut digits = String::new();
            while let Some(&d) = chars.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                digits.push(d);
                chars.next();
                pos.column += 1;
            }
            digits.parse().map_err(|_| err(start, "expected an integer"))
        };
        let tok = match c {
            ';' | ',' | '^' | '-' | '(' | ')' => {
                chars.next();
                advance(c, &mut pos);
                match c {
                    ';' => Tok::Semi,
                    ',' => Tok::Comma,
                    '^' => Tok::Caret,
                    '-' => Tok::Minus,
                    '(' => Tok::LParen,
                    _ => Tok::RParen,
                }
            }
            d if d.is_ascii_digit() => Tok::Int(read_int(&mut chars, &mut pos)?),
            'r' => {
                chars.next();
                advance(c, &mut pos);
                if !chars.peek().is_some_and(|d| d.is_ascii_digit()) {
                    return Err(err(start, "expected a generator index after 'r'"));
                }
                Tok::Gen(read_int(&mut chars, &mut pos)? as usize)
            }
            c if c.is_ascii_alphabetic() => {
                let mut ident = String::new();
                while let Some(&d) = chars.peek() {
                    if !d.is_ascii_alphanumeric() {
                        break;
                    }
                    ident.push(d);
                    chars.next();
                    pos.column += 1;
                }
                if ident != "gens" {
                    return Err(err(start, format!("unexpected identifier '{ident}'")));
                }
                Tok::Gens
            }
            other => return Err(err(start, format!("unexpected character '{other}'"))),
        };
        toks.push((tok, start));
    }
    Ok((toks, pos))
}

/// Relator syntax tree before involutory inverses are resolved.
#[derive(Debug)]
enum Term {
    Gen(usize, Pos),
    Group(Vec<(Term, i64)>),
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    end: Pos,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.at).map_or(self.end, |(_, p)| *p)
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&want) {
            self.at += 1;
            Ok(())
        } else {
            Err(err(self.pos(), format!("expected {what}")))
        }
    }

    fn terms(&mut self) -> Result<Vec<(Term, i64)>> {
        let mut out = Vec::new();
        loop {
            let atom = match self.peek() {
                Some(&Tok::Gen(i)) => {
                    let p = self.pos();
                    self.at += 1;
                    Term::Gen(i, p)
                }
                Some(Tok::LParen) => {
                    self.at += 1;
                    let inner = self.terms()?;
                    self.expect(Tok::RParen, "')'")?;
                    Term::Group(inner)
                }
                _ => break,
            };
            let mut power = 1;
            if self.peek() == Some(&Tok::Caret) {
                self.at += 1;
                let neg = self.peek() == Some(&Tok::Minus);
                if neg {
                    self.at += 1;
                }
                let p = self.pos();
                match self.peek() {
                    Some(&Tok::Int(k)) if k >= 1 => {
                        self.at += 1;
                        power = if neg { -k } else { k };
                    }
                    Some(Tok::Int(_)) => return Err(err(p, "powers must be nonzero")),
                    _ => return Err(err(p, "expected an exponent")),
                }
            }
            out.push((atom, power));
        }
        if out.is_empty() {
            return Err(err(self.pos(), "expected a generator or '('"));
        }
        Ok(out)
    }
}

fn check_gens(terms: &[(Term, i64)], ngens: usize) -> Result<()> {
    for (t, _) in terms {
        match t {
            Term::Gen(i, p) if *i >= ngens => {
                return Err(err(*p, format!("generator r{i} out of range for {ngens} generators")))
            }
            Term::Group(inner) => check_gens(inner, ngens)?,
            _ => {}
        }
    }
    Ok(())
}

fn expand(terms: &[(Term, i64)], involutory: &[bool], inverted: bool, out: &mut Vec<usize>) -> Result<()> {
    let mut seq: Vec<&(Term, i64)> = terms.iter().collect();
    if inverted {
        seq.reverse();
    }
    for (t, k) in seq {
        let inv = inverted ^ (*k < 0);
        for _ in 0..k.unsigned_abs() {
            match t {
                Term::Gen(i, p) => {
                    if inv && !involutory[*i] {
                        return Err(err(*p, format!("inverse of r{i} needs a relator r{i}^2")));
                    }
                    out.push(*i);
                }
                Term::Group(inner) => expand(inner, involutory, inv, out)?,
            }
        }
    }
    Ok(())
}

pub fn parse(text: &str) -> Result<Presentation> {
    let (toks, end) = lex(text)?;
    let mut p = Parser { toks, at: 0, end };
    p.expect(Tok::Gens, "'gens'")?;
    let ngens = match p.peek() {
        Some(&Tok::Int(n)) => {
            p.at += 1;
            n as usize
        }
        _ => return Err(err(p.pos(), "expected the number of generators")),
    };
    p.expect(Tok::Semi, "';'")?;
    let mut trees = vec![p.terms()?];
    while p.peek() == Some(&Tok::Comma) {
        p.at += 1;
        trees.push(p.terms()?);
    }
    if p.at < p.toks.len() {
        return Err(err(p.pos(), "expected ',' or end of input"));
    }
    for t in &trees {
        check_gens(t, ngens)?;
    }

    // Involutory generators are those with a literal `ri^2` or `ri ri` relator.
    let mut involutory = vec![false; ngens];
    for t in &trees {
        let mut flat = Vec::new();
        if expand(t, &vec![true; ngens], false, &mut flat).is_ok() {
            if let [a, b] = flat[..] {
                if a == b && t.iter().all(|(_, k)| *k > 0) {
                    involutory[a] = true;
                }
            }
        }
    }
    let mut relators = Vec::with_capacity(trees.len());
    for t in &trees {
        let mut flat = Vec::new();
        expand(t, &involutory, false, &mut flat)?;
        relators.push(Word(flat));
    }
    Presentation::new(ngens, relators)
}

/// The string Coxeter group with the given branch orders.
pub fn string_coxeter(orders: &[u32]) -> Result<Presentation> {
    if let Some(&o) = orders.iter().find(|&&o| o < 2) {
        return Err(Error::InvalidParameter(format!("branch order {o} is below 2")));
    }
    let n = orders.len() + 1;
    let mut rels: Vec<Word> = (0..n).map(|i| Word(vec![i, i])).collect();
    for (i, &m) in orders.iter().enumerate() {
        rels.push(Word(vec![i, i + 1]).pow(m as usize));
    }
    for i in 0..n {
        for j in i + 2..n {
            rels.push(Word(vec![i, j]).pow(2));
        }
    }
    Presentation::new(n, rels)
}

/// Appends `(r0 r1 r2)^facet_k` and `(r1 r2 r3)^vf_k`.
pub fn with_petrie(mut pres: Presentation, facet_k: Option<u32>, vf_k: Option<u32>) -> Result<Presentation> {
    if pres.ngens < 3 || (vf_k.is_some() && pres.ngens < 4) {
        return Err(Error::InvalidParameter(format!(
            "not enough generators ({}) for the requested Petrie relators",
            pres.ngens
        )));
    }
    if let Some(k) = facet_k {
        pres.push(Word(vec![0, 1, 2]).pow(k as usize));
    }
    if let Some(k) = vf_k {
        pres.push(Word(vec![1, 2, 3]).pow(k as usize));
    }
    Ok(pres)
}

/// A regular map `{m,n}_k` used as a facet or vertex-figure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MapSymbol {
    pub m: u32,
    pub n: u32,
    pub k: u32,
}

impl MapSymbol {
    pub const fn new(m: u32, n: u32, k: u32) -> Self {
        MapSymbol { m, n, k }
    }

    pub fn dual(self) -> Self {
        MapSymbol {
            m: self.n,
            n: self.m,
            k: self.k,
        }
    }
}

impl fmt::Display for MapSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}_{}", self.m, self.n, self.k)
    }
}

/// The universal group with the given facet and vertex-figure: string
/// Coxeter relators of type `{m, n, m'}` and the two Petrie relators.
pub fn amalgam(facet: MapSymbol, vertex_figure: MapSymbol) -> Result<Presentation> {
    if facet.n != vertex_figure.m {
        return Err(Error::InvalidParameter(format!(
            "facet {facet} does not fit vertex-figure {vertex_figure}"
        )));
    }
    with_petrie(
        string_coxeter(&[facet.m, facet.n, vertex_figure.n])?,
        Some(facet.k),
        Some(vertex_figure.k),
    )
}

/// The rows of the rank-4 amalgam table: facet, vertex-figure, group order.
pub const TABLE1: [(MapSymbol, MapSymbol, u64); 10] = [
    (MapSymbol::new(5, 5, 3), MapSymbol::new(5, 5, 3), 1),
    (MapSymbol::new(5, 5, 3), MapSymbol::new(5, 3, 5), 1),
    (MapSymbol::new(5, 3, 5), MapSymbol::new(3, 5, 5), 3420),
    (MapSymbol::new(5, 3, 5), MapSymbol::new(3, 4, 3), 60),
    (MapSymbol::new(5, 3, 5), MapSymbol::new(3, 3, 4), 1),
    (MapSymbol::new(4, 3, 3), MapSymbol::new(3, 4, 3), 96),
    (MapSymbol::new(4, 3, 3), MapSymbol::new(3, 3, 4), 24),
    (MapSymbol::new(3, 5, 5), MapSymbol::new(5, 3, 5), 660),
    (MapSymbol::new(3, 4, 3), MapSymbol::new(4, 3, 3), 1),
    (MapSymbol::new(3, 3, 4), MapSymbol::new(3, 3, 4), 120),
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_s3() {
        let p = parse("gens 2; r0^2, r1^2, (r0 r1)^3").unwrap();
        assert_eq!(p.ngens, 2);
        let lens: Vec<usize> = p.relators.iter().map(Word::len).collect();
        assert_eq!(lens, vec![2, 2, 6]);
    }

    #[test]
    fn petrie_relator_length() {
        let p = parse("gens 4;\n r0^2, r1^2, r2^2, r3^2,\n (r0 r1 r2)^5").unwrap();
        assert_eq!(p.relators[4].len(), 15);
    }

    #[test]
    fn errors_carry_positions() {
        match parse("gens 4; r0^2,\n  r9") {
            Err(Error::Parse { line: 2, column: 3, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match parse("gens 2; r0 ^") {
            Err(Error::Parse {
                line: 1, column: 13, ..
            }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse("gens 2; r0^0").is_err());
        assert!(parse("gens 2; r0,").is_err());
        assert!(parse("gens 2; r0 r1 )").is_err());
        assert!(parse("group 2; r0").is_err());
        assert!(parse("").is_err());
    }

    #[test]
    fn inverses_need_involutions() {
        let p = parse("gens 2; r0^2, r1^2, (r0 r1)^-3").unwrap();
        assert_eq!(p.relators[2], Word(vec![1, 0, 1, 0, 1, 0]));
        assert!(parse("gens 2; r0^3, r0^-1 r1").is_err());
        let q = parse("gens 2; r0^3, r1^2, r1^-1 r0").unwrap();
        assert_eq!(q.relators[2], Word(vec![1, 0]));
    }

    #[test]
    fn nested_groups_expand() {
        let p = parse("gens 3; ((r0 r1)^2 r2)^2").unwrap();
        assert_eq!(p.relators[0], Word(vec![0, 1, 0, 1, 2, 0, 1, 0, 1, 2]));
    }

    #[test]
    fn render_round_trips() {
        for p in [
            string_coxeter(&[3, 5, 3]).unwrap(),
            amalgam(MapSymbol::new(5, 3, 5), MapSymbol::new(3, 5, 5)).unwrap(),
            parse("gens 3; r0 r1 r2 r0, ((r0 r1)^2 r2)^2").unwrap(),
        ] {
            assert_eq!(parse(&render(&p)).unwrap(), p);
        }
        assert_eq!(
            render(&string_coxeter(&[3, 3]).unwrap()),
            "gens 3; r0^2, r1^2, r2^2, (r0 r1)^3, (r1 r2)^3, (r0 r2)^2"
        );
    }

    #[test]
    fn string_coxeter_shape() {
        let p = string_coxeter(&[3, 5, 3]).unwrap();
        assert_eq!(p.ngens, 4);
        assert_eq!(p.relators.len(), 10);
        assert!(p.has_coxeter_shape());
        let q = string_coxeter(&[5, 3, 5]).unwrap();
        assert_eq!(q.reversed_generators().canonical_relators(), q.canonical_relators());
        assert!(string_coxeter(&[1, 3]).is_err());
    }

    #[test]
    fn amalgam_duality() {
        for (f, v, _) in TABLE1 {
            let a = amalgam(f, v).unwrap();
            assert!(a.has_coxeter_shape());
            let b = amalgam(v.dual(), f.dual()).unwrap().reversed_generators();
            assert_eq!(a.canonical_relators(), b.canonical_relators());
        }
        assert!(amalgam(MapSymbol::new(5, 3, 5), MapSymbol::new(5, 3, 5)).is_err());
    }

    #[test]
    fn with_petrie_needs_generators() {
        assert!(with_petrie(string_coxeter(&[3, 3]).unwrap(), Some(4), Some(4)).is_err());
        let p = with_petrie(string_coxeter(&[3, 5, 3]).unwrap(), None, Some(5)).unwrap();
        assert_eq!(p.relators.last().unwrap(), &Word(vec![1, 2, 3]).pow(5));
    }
}
