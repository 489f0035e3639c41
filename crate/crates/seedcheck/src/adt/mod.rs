//! Sorts, operations, layered signatures and terms.

mod layer;
mod term;

pub use layer::{parse_layer, AxiomDecl, Domain, LayerError, LayerSpec, OpSpec};
pub use term::{parse_raw, Head, RawTerm, Sym, Term, TermSyntaxError};

use indexmap::IndexMap;
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OpDecl {
    pub name: Sym,
    pub arg_sorts: Vec<Sym>,
    pub result_sort: Sym,
    pub hidden: bool,
    pub private_flag: bool,
}

impl OpDecl {
    pub fn arity(&self) -> usize {
        self.arg_sorts.len()
    }
}

impl fmt::Display for OpDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kw = match (self.private_flag, self.hidden) {
            (false, false) => "op",
            (true, false) => "private op",
            (false, true) => "hop",
            (true, true) => "private hop",
        };
        let args: Vec<_> = self.arg_sorts.iter().map(|s| s.as_str()).collect();
        write!(
            f,
            "{kw} {}: {} -> {}",
            self.name,
            args.join(", "),
            self.result_sort
        )
    }
}

/// Built-in side condition `free(proc, name) = expect`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Guard {
    pub process: Term,
    pub name: Term,
    pub expect: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Axiom {
    pub id: String,
    pub lhs: Term,
    pub rhs: Term,
    pub guard: Option<Guard>,
}

impl Axiom {
    /// Content without the id, used for set comparison of signatures.
    pub fn content(&self) -> String {
        match &self.guard {
            Some(g) => format!(
                "if free({}, {}) = {} then {} = {}",
                g.process, g.name, g.expect, self.lhs, self.rhs
            ),
            None => format!("{} = {}", self.lhs, self.rhs),
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.id, self.content())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SortError {
    #[error("unknown operation {op} at {path:?}")]
    UnknownOp { op: String, path: Vec<usize> },
    #[error("{op} expects {expected} arguments, got {got} at {path:?}")]
    Arity {
        op: String,
        expected: usize,
        got: usize,
        path: Vec<usize>,
    },
    #[error("sort mismatch at {path:?}: expected {expected}, found {found}")]
    Mismatch {
        expected: String,
        found: String,
        path: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Legality {
    Ok,
    Illegal {
        /// Path of the private application.
        path: Vec<usize>,
        private_op: Sym,
        /// The higher-layer op found below it.
        offending_op: Sym,
    },
}

/// Flattened view of a layer chain.
#[derive(Clone, Debug, Default)]
pub struct Signature {
    pub name: String,
    pub sorts: BTreeSet<Sym>,
    pub ops: IndexMap<Sym, OpDecl>,
    pub axioms: Vec<Axiom>,
    pub origin_layer_of_op: BTreeMap<Sym, String>,
    /// Ancestor chain, root first.
    pub chain: Vec<String>,
    pub vars: BTreeSet<Sym>,
    pub observe: BTreeMap<Sym, Vec<Option<Domain>>>,
    pub reset: Option<Sym>,
    pub seed: Option<Sym>,
    rules: rustc_hash::FxHashMap<Sym, Vec<usize>>,
}

impl Signature {
    pub fn op(&self, name: Sym) -> Option<&OpDecl> {
        self.ops.get(&name)
    }

    pub fn sort(name: &str) -> Sym {
        Sym::new(name)
    }

    /// Axiom indices whose lhs is headed by `op`, in declaration order.
    pub fn rules_for(&self, op: Sym) -> &[usize] {
        self.rules.get(&op).map(Vec::as_slice).unwrap_or(&[])
    }

    /// An op is a constructor iff no axiom lhs is headed by it.
    pub fn is_constructor(&self, op: Sym) -> bool {
        !self.rules.contains_key(&op)
    }

    pub(crate) fn reindex(&mut self) {
        self.rules.clear();
        for (i, ax) in self.axioms.iter().enumerate() {
            if let Some(h) = ax.lhs.head_op() {
                self.rules.entry(h).or_default().push(i);
            }
        }
    }

    /// Declares extra literal constants (alphabet names and channels).
    /// Already-declared constants of the same sort are accepted as is.
    pub fn add_literal(&mut self, name: Sym, sort: Sym) -> Result<(), LayerError> {
        if !self.sorts.contains(&sort) {
            return Err(LayerError::UnknownSort {
                layer: self.name.clone(),
                sort: sort.to_string(),
            });
        }
        if let Some(d) = self.ops.get(&name) {
            if d.arity() == 0 && d.result_sort == sort {
                return Ok(());
            }
            return Err(LayerError::Conflict {
                layer: self.name.clone(),
                op: name.to_string(),
            });
        }
        self.ops.insert(
            name,
            OpDecl {
                name,
                arg_sorts: vec![],
                result_sort: sort,
                hidden: false,
                private_flag: false,
            },
        );
        self.origin_layer_of_op.insert(name, "<alphabet>".into());
        Ok(())
    }

    fn layer_depth(&self, layer: &str) -> usize {
        self.chain.iter().position(|l| l == layer).unwrap_or(0)
    }

    /// Resolves a parsed ground term: every identifier must be a declared op.
    pub fn resolve(&self, raw: &RawTerm) -> Result<Term, LayerError> {
        let sym = Sym::new(&raw.name);
        if self.ops.get(&sym).is_none() {
            return Err(LayerError::Term {
                layer: self.name.clone(),
                msg: format!("unknown operation {}", raw.name),
            });
        }
        let args = raw
            .args
            .iter()
            .map(|a| self.resolve(a))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Term::app(sym, args))
    }

    /// Like [`Self::resolve`], but bare identifiers found in `binds` stand
    /// for the bound terms.
    pub fn resolve_with(&self, raw: &RawTerm, binds: &[(Sym, Term)]) -> Result<Term, LayerError> {
        if raw.args.is_empty() {
            if let Some((_, t)) = binds.iter().find(|(n, _)| n.as_str() == raw.name) {
                return Ok(t.clone());
            }
        }
        let sym = Sym::new(&raw.name);
        if self.ops.get(&sym).is_none() {
            return Err(LayerError::Term {
                layer: self.name.clone(),
                msg: format!("unknown operation {}", raw.name),
            });
        }
        let args = raw
            .args
            .iter()
            .map(|a| self.resolve_with(a, binds))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Term::app(sym, args))
    }

    /// Parses and sort-checks a term whose bare identifiers may be bound.
    pub fn parse_term_with(&self, text: &str, binds: &[(Sym, Term)]) -> Result<Term, LayerError> {
        let raw = parse_raw(text).map_err(|e| LayerError::Term {
            layer: self.name.clone(),
            msg: e.to_string(),
        })?;
        let t = self.resolve_with(&raw, binds)?;
        well_sorted(&t, self).map_err(|e| LayerError::Term {
            layer: self.name.clone(),
            msg: e.to_string(),
        })?;
        Ok(t)
    }

    /// Parses and sort-checks a ground term.
    pub fn parse_term(&self, text: &str) -> Result<Term, LayerError> {
        let raw = parse_raw(text).map_err(|e| LayerError::Term {
            layer: self.name.clone(),
            msg: e.to_string(),
        })?;
        let t = self.resolve(&raw)?;
        well_sorted(&t, self).map_err(|e| LayerError::Term {
            layer: self.name.clone(),
            msg: e.to_string(),
        })?;
        Ok(t)
    }

    /// Stable textual summary used for identity comparison of signatures.
    pub fn canonical_form(&self) -> String {
        let mut out = String::new();
        for s in &self.sorts {
            out += &format!("sort {s}\n");
        }
        let ops: BTreeSet<String> = self.ops.values().map(|o| o.to_string()).collect();
        for o in ops {
            out += &o;
            out.push('\n');
        }
        let axioms: BTreeSet<String> = self.axioms.iter().map(Axiom::content).collect();
        for a in axioms {
            out += &format!("axiom {a}\n");
        }
        for (op, doms) in &self.observe {
            let d: Vec<String> = doms
                .iter()
                .map(|d| d.map_or("_".into(), |d| d.to_string()))
                .collect();
            out += &format!("observe {op}({})\n", d.join(", "));
        }
        if let Some(r) = self.reset {
            out += &format!("reset {r}\n");
        }
        if let Some(s) = self.seed {
            out += &format!("seed {s}\n");
        }
        out
    }
}

/// Sort of `term`, or the first offending subterm.
pub fn well_sorted(term: &Term, sig: &Signature) -> Result<Sym, SortError> {
    fn go(t: &Term, sig: &Signature, path: &mut Vec<usize>) -> Result<Sym, SortError> {
        let op = match t.head() {
            Head::Var(_, sort) => return Ok(sort),
            Head::Op(op) => op,
        };
        let decl = sig.op(op).ok_or_else(|| SortError::UnknownOp {
            op: op.to_string(),
            path: path.clone(),
        })?;
        if decl.arity() != t.args().len() {
            return Err(SortError::Arity {
                op: op.to_string(),
                expected: decl.arity(),
                got: t.args().len(),
                path: path.clone(),
            });
        }
        for (i, (a, want)) in t.args().iter().zip(&decl.arg_sorts).enumerate() {
            path.push(i);
            let got = go(a, sig, path)?;
            if got != *want {
                return Err(SortError::Mismatch {
                    expected: want.to_string(),
                    found: got.to_string(),
                    path: path.clone(),
                });
            }
            path.pop();
        }
        Ok(decl.result_sort)
    }
    go(term, sig, &mut Vec::new())
}

/// A private op of layer L may not take arguments built with ops introduced
/// strictly above L.
pub fn check_private_legality(term: &Term, sig: &Signature) -> Legality {
    fn max_above(t: &Term, sig: &Signature, level: usize) -> Option<Sym> {
        if let Some(op) = t.head_op() {
            if let Some(origin) = sig.origin_layer_of_op.get(&op) {
                if sig.layer_depth(origin) > level {
                    return Some(op);
                }
            }
        }
        t.args().iter().find_map(|a| max_above(a, sig, level))
    }
    fn go(t: &Term, sig: &Signature, path: &mut Vec<usize>) -> Legality {
        if let Some(op) = t.head_op() {
            if sig.op(op).is_some_and(|d| d.private_flag) {
                let level = sig
                    .origin_layer_of_op
                    .get(&op)
                    .map_or(0, |l| sig.layer_depth(l));
                for a in t.args() {
                    if let Some(bad) = max_above(a, sig, level) {
                        return Legality::Illegal {
                            path: path.clone(),
                            private_op: op,
                            offending_op: bad,
                        };
                    }
                }
            }
        }
        for (i, a) in t.args().iter().enumerate() {
            path.push(i);
            let r = go(a, sig, path);
            if r != Legality::Ok {
                return r;
            }
            path.pop();
        }
        Legality::Ok
    }
    go(term, sig, &mut Vec::new())
}

/// Names occurring free in a process term. Inputs bind their object.
pub fn term_free_names(t: &Term, sig: &Signature) -> HashSet<Term> {
    let mut out = HashSet::new();
    collect_free(t, sig, &mut out);
    out
}

fn collect_free(t: &Term, sig: &Signature, out: &mut HashSet<Term>) {
    let name_sort = Sym::new("name");
    let Some(op) = t.head_op() else { return };
    if op.as_str() == "i-proc" && t.args().len() == 3 {
        let mut inner = HashSet::new();
        collect_free(&t.args()[2], sig, &mut inner);
        inner.remove(&t.args()[1]);
        out.extend(inner);
        return;
    }
    let Some(decl) = sig.op(op) else { return };
    if decl.arity() == 0 && decl.result_sort == name_sort {
        out.insert(t.clone());
        return;
    }
    for a in t.args() {
        collect_free(a, sig, out);
    }
}

pub type Library = BTreeMap<String, LayerSpec>;

/// Flattens `name` and all its ancestors into one signature.
pub fn flatten_layer(name: &str, library: &Library) -> Result<Signature, LayerError> {
    let mut seen = Vec::new();
    flatten_rec(name, library, &mut seen)
}

fn flatten_rec(
    name: &str,
    library: &Library,
    seen: &mut Vec<String>,
) -> Result<Signature, LayerError> {
    if seen.iter().any(|s| s == name) {
        return Err(LayerError::Cycle(name.to_owned()));
    }
    let spec = library
        .get(name)
        .ok_or_else(|| LayerError::UnknownLayer(name.to_owned()))?;
    seen.push(name.to_owned());
    let base = match &spec.parent {
        Some(p) => flatten_rec(p, library, seen)?,
        None => Signature::default(),
    };
    seen.pop();
    apply_layer(base, spec)
}

/// Applies one layer's removals and then its additions to a flattened parent.
pub fn apply_layer(mut sig: Signature, spec: &LayerSpec) -> Result<Signature, LayerError> {
    let lname = spec.name.clone();
    sig.name = lname.clone();
    sig.chain.push(lname.clone());

    for s in &spec.removed_sorts {
        let sym = Sym::new(s);
        if !sig.sorts.remove(&sym) {
            return Err(LayerError::MissingRemoval {
                layer: lname,
                what: format!("sort {s}"),
            });
        }
    }
    for o in &spec.removed_ops {
        let sym = Sym::new(o);
        if sig.ops.shift_remove(&sym).is_none() {
            return Err(LayerError::MissingRemoval {
                layer: lname,
                what: format!("op {o}"),
            });
        }
        sig.origin_layer_of_op.remove(&sym);
        sig.observe.remove(&sym);
        sig.axioms
            .retain(|a| !a.lhs.contains_op(sym) && !a.rhs.contains_op(sym));
    }
    for id in &spec.removed_axioms {
        let before = sig.axioms.len();
        sig.axioms.retain(|a| &a.id != id);
        if sig.axioms.len() == before {
            return Err(LayerError::MissingRemoval {
                layer: lname,
                what: format!("axiom {id}"),
            });
        }
    }

    for s in &spec.added_sorts {
        sig.sorts.insert(Sym::new(s));
    }
    for v in &spec.vars {
        sig.vars.insert(Sym::new(v));
    }
    for o in &spec.added_ops {
        let decl = OpDecl {
            name: Sym::new(&o.name),
            arg_sorts: o.arg_sorts.iter().map(|s| Sym::new(s)).collect(),
            result_sort: Sym::new(&o.result_sort),
            hidden: o.hidden,
            private_flag: o.private_flag,
        };
        for s in decl
            .arg_sorts
            .iter()
            .chain(std::iter::once(&decl.result_sort))
        {
            if !sig.sorts.contains(s) {
                return Err(LayerError::UnknownSort {
                    layer: lname,
                    sort: s.to_string(),
                });
            }
        }
        match sig.ops.get(&decl.name) {
            Some(existing) if *existing == decl => continue,
            Some(_) => {
                return Err(LayerError::Conflict {
                    layer: lname,
                    op: o.name.clone(),
                })
            }
            None => {
                sig.origin_layer_of_op.insert(decl.name, lname.clone());
                sig.ops.insert(decl.name, decl);
            }
        }
    }
    for (op, doms) in &spec.observe {
        let sym = Sym::new(op);
        let decl = sig.op(sym).ok_or_else(|| LayerError::Term {
            layer: lname.clone(),
            msg: format!("observe on unknown op {op}"),
        })?;
        if decl.arity() != doms.len() {
            return Err(LayerError::Term {
                layer: lname,
                msg: format!("observe {op}: arity mismatch"),
            });
        }
        sig.observe.insert(sym, doms.clone());
    }
    if let Some(r) = &spec.reset {
        sig.reset = Some(Sym::new(r));
    }
    if let Some(s) = &spec.seed {
        sig.seed = Some(Sym::new(s));
    }
    for decl in &spec.added_axioms {
        let ax = layer::resolve_axiom(decl, &sig)?;
        if sig.axioms.iter().any(|a| a.content() == ax.content()) {
            continue;
        }
        if sig.axioms.iter().any(|a| a.id == ax.id) {
            return Err(LayerError::DuplicateAxiom {
                layer: lname,
                id: ax.id,
            });
        }
        sig.axioms.push(ax);
    }
    sig.reindex();
    Ok(sig)
}
