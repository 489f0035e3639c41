use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock, RwLock};

/// Interned identifier. Comparison by `Ord` follows the spelling so that
/// every ordered container iterates in a stable, human-readable order.
#[derive(Clone, Copy)]
pub struct Sym(&'static str);

fn interner() -> &'static RwLock<HashMap<&'static str, ()>> {
    static CELL: OnceLock<RwLock<HashMap<&'static str, ()>>> = OnceLock::new();
    CELL.get_or_init(Default::default)
}

impl Sym {
    pub fn new(s: &str) -> Sym {
        if let Some((&k, _)) = interner().read().unwrap().get_key_value(s) {
            return Sym(k);
        }
        let mut w = interner().write().unwrap();
        if let Some((&k, _)) = w.get_key_value(s) {
            return Sym(k);
        }
        let leaked: &'static str = Box::leak(s.to_owned().into_boxed_str());
        w.insert(leaked, ());
        Sym(leaked)
    }

    pub fn as_str(self) -> &'static str {
        self.0
    }
}

// interned, so the address identifies the spelling
impl PartialEq for Sym {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.0, other.0)
    }
}

impl Eq for Sym {}

impl Hash for Sym {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_usize(self.0.as_ptr() as usize);
    }
}

impl PartialOrd for Sym {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Sym {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        if std::ptr::eq(self.0, other.0) {
            return std::cmp::Ordering::Equal;
        }
        self.0.cmp(other.0)
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Debug for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl From<&str> for Sym {
    fn from(s: &str) -> Self {
        Sym::new(s)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Head {
    Op(Sym),
    /// Variable name and its sort.
    Var(Sym, Sym),
}

struct Node {
    head: Head,
    args: Vec<Term>,
    hash: u64,
}

/// Immutable shared term with a cached structural hash.
#[derive(Clone)]
pub struct Term(Arc<Node>);

impl Term {
    pub fn app(op: Sym, args: Vec<Term>) -> Term {
        let head = Head::Op(op);
        let hash = node_hash(&head, &args);
        Term(Arc::new(Node { head, args, hash }))
    }

    pub fn constant(op: Sym) -> Term {
        Term::app(op, Vec::new())
    }

    pub fn var(name: Sym, sort: Sym) -> Term {
        let head = Head::Var(name, sort);
        let hash = node_hash(&head, &[]);
        Term(Arc::new(Node {
            head,
            args: Vec::new(),
            hash,
        }))
    }

    /// Shorthand used throughout tests: `Term::op("nil", vec![])`.
    pub fn op(name: &str, args: Vec<Term>) -> Term {
        Term::app(Sym::new(name), args)
    }

    pub fn head(&self) -> Head {
        self.0.head
    }

    pub fn head_op(&self) -> Option<Sym> {
        match self.0.head {
            Head::Op(s) => Some(s),
            Head::Var(..) => None,
        }
    }

    pub fn is_op(&self, name: &str) -> bool {
        self.head_op().is_some_and(|s| s.as_str() == name)
    }

    pub fn args(&self) -> &[Term] {
        &self.0.args
    }

    pub fn arg(&self, i: usize) -> &Term {
        &self.0.args[i]
    }

    pub fn is_var(&self) -> bool {
        matches!(self.0.head, Head::Var(..))
    }

    pub fn is_ground(&self) -> bool {
        !self.is_var() && self.args().iter().all(Term::is_ground)
    }

    pub fn with_args(&self, args: Vec<Term>) -> Term {
        match self.0.head {
            Head::Op(s) => Term::app(s, args),
            Head::Var(..) => self.clone(),
        }
    }

    pub fn size(&self) -> usize {
        1 + self.args().iter().map(Term::size).sum::<usize>()
    }

    pub fn ptr_eq(&self, other: &Term) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn subterm(&self, path: &[usize]) -> Option<&Term> {
        let mut t = self;
        for &i in path {
            t = t.args().get(i)?;
        }
        Some(t)
    }

    pub fn replace_at(&self, path: &[usize], new: Term) -> Term {
        match path.split_first() {
            None => new,
            Some((&i, rest)) => {
                let mut args = self.args().to_vec();
                args[i] = args[i].replace_at(rest, new);
                self.with_args(args)
            }
        }
    }

    /// Visits every operation symbol in the term.
    pub fn for_each_op(&self, f: &mut impl FnMut(Sym)) {
        if let Head::Op(s) = self.0.head {
            f(s);
        }
        for a in self.args() {
            a.for_each_op(f);
        }
    }

    pub fn contains_op(&self, op: Sym) -> bool {
        let mut found = false;
        self.for_each_op(&mut |s| found |= s == op);
        found
    }
}

fn node_hash(head: &Head, args: &[Term]) -> u64 {
    let mut h = rustc_hash::FxHasher::default();
    head.hash(&mut h);
    for a in args {
        h.write_u64(a.0.hash);
    }
    h.finish()
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        self.0.hash == other.0.hash && self.0.head == other.0.head && self.0.args == other.0.args
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Term {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return std::cmp::Ordering::Equal;
        }
        let name = |h: &Head| match *h {
            Head::Op(s) | Head::Var(s, _) => s,
        };
        name(&self.0.head)
            .cmp(&name(&other.0.head))
            .then_with(|| self.0.head.cmp(&other.0.head))
            .then_with(|| self.0.args.cmp(&other.0.args))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.head {
            Head::Op(s) | Head::Var(s, _) => write!(f, "{s}")?,
        }
        if !self.args().is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args().iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Untyped parse tree; resolved against a signature afterwards.
#[derive(Clone, Debug, PartialEq)]
pub struct RawTerm {
    pub name: String,
    pub args: Vec<RawTerm>,
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("term syntax error at offset {offset}: {msg}")]
pub struct TermSyntaxError {
    pub offset: usize,
    pub msg: String,
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '\''
}

/// Parses `f(a, g(b))`, bare constants and the unit `()`.
pub fn parse_raw(text: &str) -> Result<RawTerm, TermSyntaxError> {
    let mut p = RawParser {
        s: text.as_bytes(),
        pos: 0,
    };
    let t = p.term()?;
    p.ws();
    if p.pos != p.s.len() {
        return Err(p.err("trailing input"));
    }
    Ok(t)
}

struct RawParser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl RawParser<'_> {
    fn ws(&mut self) {
        while self.pos < self.s.len() && (self.s[self.pos] as char).is_whitespace() {
            self.pos += 1;
        }
    }

    fn err(&self, msg: &str) -> TermSyntaxError {
        TermSyntaxError {
            offset: self.pos,
            msg: msg.to_owned(),
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.ws();
        self.s.get(self.pos).map(|&b| b as char)
    }

    fn term(&mut self) -> Result<RawTerm, TermSyntaxError> {
        let start = {
            self.ws();
            self.pos
        };
        if self.peek() == Some('(') {
            self.pos += 1;
            if self.peek() == Some(')') {
                self.pos += 1;
                return Ok(RawTerm {
                    name: "()".into(),
                    args: vec![],
                    offset: start,
                });
            }
            return Err(self.err("expected ')' for unit"));
        }
        let begin = self.pos;
        while self.pos < self.s.len() && is_ident_char(self.s[self.pos] as char) {
            self.pos += 1;
        }
        if begin == self.pos {
            return Err(self.err("expected identifier"));
        }
        let name = std::str::from_utf8(&self.s[begin..self.pos])
            .unwrap()
            .to_owned();
        let mut args = Vec::new();
        if self.peek() == Some('(') {
            // `f()` would be ambiguous with the unit; require arguments
            self.pos += 1;
            loop {
                args.push(self.term()?);
                match self.peek() {
                    Some(',') => self.pos += 1,
                    Some(')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.err("expected ',' or ')'")),
                }
            }
        }
        Ok(RawTerm {
            name,
            args,
            offset: start,
        })
    }
}
