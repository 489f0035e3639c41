//! Surface syntax of the value-passing calculus (and the basic calculus),
//! and the bijection with ADT terms.

use crate::adt::{Sym, Term};
use std::collections::BTreeSet;
use std::fmt;

#[derive(
    Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize,
)]
pub enum Calculus {
    ValuePassing,
    Basic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    pub names: Vec<Sym>,
    pub channels: Vec<Sym>,
    pub fresh: Sym,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AlphabetError {
    #[error("identifier {0} is both a name and a channel")]
    Overlap(String),
    #[error("bad alphabet spec: {0}")]
    Spec(String),
}

impl Alphabet {
    pub fn new(names: &[&str], channels: &[&str]) -> Result<Alphabet, AlphabetError> {
        Self::from_syms(
            names.iter().map(|s| Sym::new(s)).collect(),
            channels.iter().map(|s| Sym::new(s)).collect(),
        )
    }

    pub fn from_syms(names: Vec<Sym>, channels: Vec<Sym>) -> Result<Alphabet, AlphabetError> {
        if let Some(n) = names.iter().find(|n| channels.contains(n)) {
            return Err(AlphabetError::Overlap(n.to_string()));
        }
        let mut names_sorted = names;
        names_sorted.dedup();
        let fresh = first_unused(&names_sorted, &channels);
        Ok(Alphabet {
            names: names_sorted,
            channels,
            fresh,
        })
    }

    /// Parses `names=a,b,u channels=c,d`.
    pub fn parse(spec: &str) -> Result<Alphabet, AlphabetError> {
        let mut names = None;
        let mut chans = None;
        for part in spec.split_whitespace() {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| AlphabetError::Spec(part.into()))?;
            let list: Vec<Sym> = v
                .split(',')
                .filter(|s| !s.is_empty())
                .map(Sym::new)
                .collect();
            match k {
                "names" => names = Some(list),
                "channels" => chans = Some(list),
                _ => return Err(AlphabetError::Spec(k.into())),
            }
        }
        let d = Alphabet::default();
        Alphabet::from_syms(names.unwrap_or(d.names), chans.unwrap_or(d.channels))
    }

    pub fn is_name(&self, s: Sym) -> bool {
        self.names.contains(&s)
    }

    pub fn is_channel(&self, s: Sym) -> bool {
        self.channels.contains(&s)
    }

    /// Names plus the reserved fresh name.
    pub fn names_and_fresh(&self) -> Vec<Sym> {
        let mut v = self.names.clone();
        v.push(self.fresh);
        v
    }

    /// Position used for deterministic ordering of names.
    pub fn name_rank(&self, s: Sym) -> usize {
        self.names
            .iter()
            .position(|&n| n == s)
            .unwrap_or(if s == self.fresh {
                self.names.len()
            } else {
                usize::MAX
            })
    }

    pub fn channel_rank(&self, s: Sym) -> usize {
        self.channels
            .iter()
            .position(|&n| n == s)
            .unwrap_or(usize::MAX)
    }
}

impl Default for Alphabet {
    fn default() -> Self {
        Alphabet::new(&["a", "b", "u"], &["c", "d"]).unwrap()
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let j = |v: &[Sym]| v.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(",");
        write!(f, "names={} channels={}", j(&self.names), j(&self.channels))
    }
}

/// First of `z, z1, z2, ...` not used as a name or channel.
fn first_unused(names: &[Sym], chans: &[Sym]) -> Sym {
    let used = |s: &str| names.iter().chain(chans).any(|n| n.as_str() == s);
    if !used("z") {
        return Sym::new("z");
    }
    (1..)
        .map(|i| format!("z{i}"))
        .find(|s| !used(s))
        .map(|s| Sym::new(&s))
        .unwrap()
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Process {
    Nil,
    Tau(Box<Process>),
    Input(Sym, Sym, Box<Process>),
    Output(Sym, Sym, Box<Process>),
    /// Basic calculus prefix `x.P`.
    Act(Sym, Box<Process>),
    Sum(Box<Process>, Box<Process>),
    Compo(Box<Process>, Box<Process>),
    Rec,
}

use Process::*;

impl Process {
    pub fn tau(p: Process) -> Process {
        Tau(Box::new(p))
    }
    pub fn input(c: &str, x: &str, p: Process) -> Process {
        Input(Sym::new(c), Sym::new(x), Box::new(p))
    }
    pub fn output(c: &str, x: &str, p: Process) -> Process {
        Output(Sym::new(c), Sym::new(x), Box::new(p))
    }
    pub fn act(x: &str, p: Process) -> Process {
        Act(Sym::new(x), Box::new(p))
    }
    pub fn sum(p: Process, q: Process) -> Process {
        Sum(Box::new(p), Box::new(q))
    }
    pub fn compo(p: Process, q: Process) -> Process {
        Compo(Box::new(p), Box::new(q))
    }

    pub fn calculus(&self) -> Calculus {
        let mut basic = false;
        self.visit(&mut |p| basic |= matches!(p, Act(..)));
        if basic {
            Calculus::Basic
        } else {
            Calculus::ValuePassing
        }
    }

    fn visit(&self, f: &mut impl FnMut(&Process)) {
        f(self);
        match self {
            Nil | Rec => {}
            Tau(p) | Input(_, _, p) | Output(_, _, p) | Act(_, p) => p.visit(f),
            Sum(p, q) | Compo(p, q) => {
                p.visit(f);
                q.visit(f);
            }
        }
    }

    pub fn contains_rec(&self) -> bool {
        let mut r = false;
        self.visit(&mut |p| r |= matches!(p, Rec));
        r
    }

    /// True when `rp` occurs without a prefix in front of it.
    pub fn has_unguarded_rec(&self) -> bool {
        match self {
            Rec => true,
            Nil | Tau(_) | Input(..) | Output(..) | Act(..) => false,
            Sum(p, q) | Compo(p, q) => p.has_unguarded_rec() || q.has_unguarded_rec(),
        }
    }

    /// Every identifier appearing in name position (free or bound).
    pub fn all_names(&self) -> BTreeSet<Sym> {
        let mut s = BTreeSet::new();
        self.visit(&mut |p| match p {
            Input(_, x, _) | Output(_, x, _) | Act(x, _) => {
                s.insert(*x);
            }
            _ => {}
        });
        s
    }

    pub fn all_channels(&self) -> BTreeSet<Sym> {
        let mut s = BTreeSet::new();
        self.visit(&mut |p| {
            if let Input(c, _, _) | Output(c, _, _) = p {
                s.insert(*c);
            }
        });
        s
    }

    pub fn prefix_depth(&self) -> usize {
        match self {
            Nil | Rec => 0,
            Tau(p) | Input(_, _, p) | Output(_, _, p) | Act(_, p) => 1 + p.prefix_depth(),
            Sum(p, q) | Compo(p, q) => p.prefix_depth().max(q.prefix_depth()),
        }
    }
}

/// Standard free names: an input binds its object in the continuation.
pub fn free_names(p: &Process) -> BTreeSet<Sym> {
    match p {
        Nil | Rec => BTreeSet::new(),
        Tau(q) => free_names(q),
        Input(_, x, q) => {
            let mut s = free_names(q);
            s.remove(x);
            s
        }
        Output(_, x, q) | Act(x, q) => {
            let mut s = free_names(q);
            s.insert(*x);
            s
        }
        Sum(a, b) | Compo(a, b) => {
            let mut s = free_names(a);
            s.extend(free_names(b));
            s
        }
    }
}

/// Substitution mirroring the subst axiom group: an input binding `old`
/// shadows, every other constructor descends, and capture is not avoided.
pub fn substitute(p: &Process, old: Sym, new: Sym) -> Process {
    let r = |q: &Process| Box::new(substitute(q, old, new));
    match p {
        Nil | Rec => p.clone(),
        Tau(q) => Tau(r(q)),
        Input(c, x, _) if *x == old => p.clone(),
        Input(c, x, q) => Input(*c, *x, r(q)),
        Output(c, x, q) => Output(*c, if *x == old { new } else { *x }, r(q)),
        Act(x, q) => Act(if *x == old { new } else { *x }, r(q)),
        Sum(a, b) => Sum(r(a), r(b)),
        Compo(a, b) => Compo(r(a), r(b)),
    }
}

/// Applies a simultaneous name map (used for open bisimulation).
pub fn apply_sigma(p: &Process, sigma: &dyn Fn(Sym) -> Sym) -> Process {
    let r = |q: &Process| Box::new(apply_sigma(q, sigma));
    match p {
        Nil | Rec => p.clone(),
        Tau(q) => Tau(r(q)),
        Input(c, x, q) => Input(*c, *x, Box::new(apply_sigma_bound(q, sigma, *x))),
        Output(c, x, q) => Output(*c, sigma(*x), r(q)),
        Act(x, q) => Act(sigma(*x), r(q)),
        Sum(a, b) => Sum(r(a), r(b)),
        Compo(a, b) => Compo(r(a), r(b)),
    }
}

fn apply_sigma_bound(p: &Process, sigma: &dyn Fn(Sym) -> Sym, bound: Sym) -> Process {
    apply_sigma(p, &|s| if s == bound { s } else { sigma(s) })
}

/// Single recursive definition `rp =def body`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct DefEnv {
    pub body: Option<Process>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}, column {col}: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("line {line}, column {col}: {ident} is not in the alphabet")]
    UnknownIdent {
        line: usize,
        col: usize,
        ident: String,
    },
    #[error("rp used without a definition")]
    MissingDefinition,
    #[error("recursive definition is unguarded")]
    Unguarded,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Dot,
    Bang,
    Query,
    Plus,
    Bar,
    LParen,
    RParen,
}

fn lex(src: &str, line0: usize) -> Result<Vec<(Tok, usize, usize)>, ParseError> {
    let mut out = Vec::new();
    for (li, line) in src.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let pos = (line0 + li, i + 1);
            let single = match c {
                '.' => Some(Tok::Dot),
                '!' => Some(Tok::Bang),
                '?' => Some(Tok::Query),
                '+' => Some(Tok::Plus),
                '|' => Some(Tok::Bar),
                '(' => Some(Tok::LParen),
                ')' => Some(Tok::RParen),
                _ => None,
            };
            if let Some(t) = single {
                out.push((t, pos.0, pos.1));
                i += 1;
            } else if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_alphanumeric() || c == '_' {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'')
                {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), pos.0, pos.1));
            } else {
                return Err(ParseError::Syntax {
                    line: pos.0,
                    col: pos.1,
                    msg: format!("unexpected character {c:?}"),
                });
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    calculus: Calculus,
    alphabet: &'a Alphabet,
    allow_rec: bool,
    used_rec: bool,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .or(self.toks.last())
            .map_or((1, 1), |t| (t.1, t.2))
    }

    fn err(&self, msg: &str) -> ParseError {
        let (line, col) = self.here();
        ParseError::Syntax {
            line,
            col,
            msg: msg.to_owned(),
        }
    }

    fn expect(&mut self, t: Tok) -> Result<(), ParseError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected {t:?}")))
        }
    }

    /// sum := par ('+' par)*, built right-nested
    fn sum(&mut self) -> Result<Process, ParseError> {
        let mut items = vec![self.par()?];
        while self.peek() == Some(&Tok::Plus) {
            self.pos += 1;
            items.push(self.par()?);
        }
        let mut acc = items.pop().unwrap();
        while let Some(p) = items.pop() {
            acc = Process::sum(p, acc);
        }
        Ok(acc)
    }

    /// par := prefix ('|' prefix)*, left-nested
    fn par(&mut self) -> Result<Process, ParseError> {
        let mut acc = self.prefix()?;
        while self.peek() == Some(&Tok::Bar) {
            self.pos += 1;
            let rhs = self.prefix()?;
            acc = Process::compo(acc, rhs);
        }
        Ok(acc)
    }

    fn ident_sym(&self, s: &str, want_channel: bool) -> Result<Sym, ParseError> {
        let sym = Sym::new(s);
        let ok = if want_channel {
            self.alphabet.is_channel(sym)
        } else {
            self.alphabet.is_name(sym)
        };
        if ok {
            Ok(sym)
        } else {
            let (line, col) = self.here();
            Err(ParseError::UnknownIdent {
                line,
                col,
                ident: s.to_owned(),
            })
        }
    }

    fn prefix(&mut self) -> Result<Process, ParseError> {
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let p = self.sum()?;
                self.expect(Tok::RParen)?;
                Ok(p)
            }
            Some(Tok::Ident(id)) => match id.as_str() {
                "nil" => {
                    self.pos += 1;
                    Ok(Nil)
                }
                "rp" => {
                    if !self.allow_rec {
                        return Err(ParseError::MissingDefinition);
                    }
                    self.pos += 1;
                    self.used_rec = true;
                    Ok(Rec)
                }
                "tau" if self.calculus == Calculus::ValuePassing => {
                    self.pos += 1;
                    self.expect(Tok::Dot)?;
                    Ok(Process::tau(self.prefix()?))
                }
                _ => {
                    self.pos += 1;
                    match (self.calculus, self.peek()) {
                        (Calculus::ValuePassing, Some(Tok::Bang | Tok::Query)) => {
                            let out = self.peek() == Some(&Tok::Bang);
                            let c = self.ident_sym(&id, true)?;
                            self.pos += 1;
                            let x = match self.peek().cloned() {
                                Some(Tok::Ident(x)) => self.ident_sym(&x, false)?,
                                _ => return Err(self.err("expected a name")),
                            };
                            self.pos += 1;
                            self.expect(Tok::Dot)?;
                            let k = Box::new(self.prefix()?);
                            Ok(if out { Output(c, x, k) } else { Input(c, x, k) })
                        }
                        (Calculus::Basic, Some(Tok::Dot)) => {
                            let x = self.ident_sym(&id, false)?;
                            self.pos += 1;
                            Ok(Act(x, Box::new(self.prefix()?)))
                        }
                        _ => Err(self.err("expected a prefix")),
                    }
                }
            },
            _ => Err(self.err("expected a process")),
        }
    }
}

fn parse_expr(
    src: &str,
    line0: usize,
    calculus: Calculus,
    alphabet: &Alphabet,
    allow_rec: bool,
) -> Result<(Process, bool), ParseError> {
    let toks = lex(src, line0)?;
    let mut p = Parser {
        toks,
        pos: 0,
        calculus,
        alphabet,
        allow_rec,
        used_rec: false,
    };
    let proc_ = p.sum()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok((proc_, p.used_rec))
}

/// Parses an optional `def rp = <P>` first line followed by one process.
pub fn parse_process(
    text: &str,
    calculus: Calculus,
    alphabet: &Alphabet,
) -> Result<(Process, DefEnv), ParseError> {
    let trimmed = text.trim_start();
    let skipped = text[..text.len() - trimmed.len()].matches('\n').count();
    let mut env = DefEnv::default();
    let mut rest = trimmed;
    let mut line0 = 1 + skipped;
    if let Some(after) = trimmed.strip_prefix("def ") {
        let (first, tail) = after.split_once('\n').unwrap_or((after, ""));
        let body_src = first
            .trim()
            .strip_prefix("rp")
            .map(str::trim_start)
            .and_then(|s| s.strip_prefix('='));
        let body_src = body_src.ok_or(ParseError::Syntax {
            line: line0,
            col: 1,
            msg: "expected 'def rp = <process>'".into(),
        })?;
        let (body, _) = parse_expr(body_src, line0, calculus, alphabet, true)?;
        if body.has_unguarded_rec() {
            return Err(ParseError::Unguarded);
        }
        env.body = Some(body);
        rest = tail;
        line0 += 1;
    }
    let (p, _) = parse_expr(rest, line0, calculus, alphabet, env.body.is_some())?;
    Ok((p, env))
}

/// Parses a single process without a definition line.
pub fn parse(text: &str, calculus: Calculus, alphabet: &Alphabet) -> Result<Process, ParseError> {
    parse_process(text, calculus, alphabet).map(|(p, _)| p)
}

// Printer: sums print right-nested without parentheses, compositions
// left-nested; anything else gets parentheses so parse(print(p)) = p.
fn fmt_sum(p: &Process, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match p {
        Sum(a, b) => {
            if matches!(**a, Sum(..)) {
                write!(f, "(")?;
                fmt_sum(a, f)?;
                write!(f, ")")?;
            } else {
                fmt_par(a, f)?;
            }
            write!(f, " + ")?;
            fmt_sum(b, f)
        }
        _ => fmt_par(p, f),
    }
}

fn fmt_par(p: &Process, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match p {
        Compo(a, b) => {
            fmt_par(a, f)?;
            write!(f, " | ")?;
            fmt_prefix(b, f)
        }
        _ => fmt_prefix(p, f),
    }
}

fn fmt_prefix(p: &Process, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match p {
        Nil => write!(f, "nil"),
        Rec => write!(f, "rp"),
        Tau(q) => {
            write!(f, "tau.")?;
            fmt_prefix(q, f)
        }
        Input(c, x, q) => {
            write!(f, "{c}?{x}.")?;
            fmt_prefix(q, f)
        }
        Output(c, x, q) => {
            write!(f, "{c}!{x}.")?;
            fmt_prefix(q, f)
        }
        Act(x, q) => {
            write!(f, "{x}.")?;
            fmt_prefix(q, f)
        }
        Sum(..) | Compo(..) => {
            write!(f, "(")?;
            fmt_sum(p, f)?;
            write!(f, ")")
        }
    }
}

impl fmt::Display for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_sum(self, f)
    }
}

impl fmt::Debug for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Renders a process with its definition line, parseable by [`parse_process`].
pub fn print_with_env(p: &Process, env: &DefEnv) -> String {
    match &env.body {
        Some(b) => format!("def rp = {b}\n{p}"),
        None => p.to_string(),
    }
}

/// Process to constructor term.
pub fn encode(p: &Process) -> Term {
    let c = |s: Sym| Term::constant(s);
    match p {
        Nil => Term::op("nil", vec![]),
        Rec => Term::op("rp", vec![]),
        Tau(q) => Term::op("tau", vec![encode(q)]),
        Input(ch, x, q) => Term::op("i-proc", vec![c(*ch), c(*x), encode(q)]),
        Output(ch, x, q) => Term::op("o-proc", vec![c(*ch), c(*x), encode(q)]),
        Act(x, q) => Term::op("pre", vec![c(*x), encode(q)]),
        Sum(a, b) => Term::op("sum", vec![encode(a), encode(b)]),
        Compo(a, b) => Term::op("compo", vec![encode(a), encode(b)]),
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DecodeError {
    #[error("{0} is not a process constructor")]
    NotConstructor(String),
    #[error("malformed {0} application")]
    Malformed(String),
}

/// Inverse of [`encode`].
pub fn decode(t: &Term) -> Result<Process, DecodeError> {
    let op = t
        .head_op()
        .ok_or_else(|| DecodeError::NotConstructor(t.to_string()))?;
    let a = t.args();
    let atom = |i: usize| -> Result<Sym, DecodeError> {
        a[i].head_op()
            .filter(|_| a[i].args().is_empty())
            .ok_or_else(|| DecodeError::Malformed(op.to_string()))
    };
    let arity = |n: usize| {
        if a.len() == n {
            Ok(())
        } else {
            Err(DecodeError::Malformed(op.to_string()))
        }
    };
    match op.as_str() {
        "nil" => arity(0).map(|_| Nil),
        "rp" => arity(0).map(|_| Rec),
        "tau" => {
            arity(1)?;
            Ok(Process::tau(decode(&a[0])?))
        }
        "i-proc" => {
            arity(3)?;
            Ok(Input(atom(0)?, atom(1)?, Box::new(decode(&a[2])?)))
        }
        "o-proc" => {
            arity(3)?;
            Ok(Output(atom(0)?, atom(1)?, Box::new(decode(&a[2])?)))
        }
        "pre" => {
            arity(2)?;
            Ok(Act(atom(0)?, Box::new(decode(&a[1])?)))
        }
        "sum" => {
            arity(2)?;
            Ok(Process::sum(decode(&a[0])?, decode(&a[1])?))
        }
        "compo" => {
            arity(2)?;
            Ok(Process::compo(decode(&a[0])?, decode(&a[1])?))
        }
        other => Err(DecodeError::NotConstructor(other.to_owned())),
    }
}
