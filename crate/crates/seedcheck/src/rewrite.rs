//! Oriented equational rewriting over a flattened signature.

use crate::adt::{term_free_names, Axiom, Head, Signature, Sym, Term};
use std::fmt;

pub const DEFAULT_FUEL: u64 = 10_000;

/// Variable bindings of a match, in binding order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Subst(Vec<(Sym, Term)>);

impl Subst {
    pub fn new() -> Subst {
        Subst(Vec::new())
    }

    pub fn get(&self, v: &Sym) -> Option<&Term> {
        self.0.iter().find(|(k, _)| k == v).map(|(_, t)| t)
    }

    pub fn insert(&mut self, v: Sym, t: Term) {
        match self.0.iter_mut().find(|(k, _)| *k == v) {
            Some(slot) => slot.1 = t,
            None => self.0.push((v, t)),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Sym, &Term)> {
        self.0.iter().map(|(k, t)| (k, t))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RewriteError {
    #[error("fuel exhausted after {steps} steps (likely divergence)")]
    FuelExhausted { steps: u64, last: Term },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RewriteStep {
    pub position: Vec<usize>,
    pub axiom_id: String,
    pub substitution: Subst,
    pub before: Term,
    pub after: Term,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RewriteChain {
    pub start: Term,
    pub steps: Vec<RewriteStep>,
    pub result: Term,
}

impl RewriteChain {
    /// Replays each step from its recorded position and substitution.
    pub fn replay(&self, sig: &Signature) -> bool {
        let mut cur = self.start.clone();
        for st in &self.steps {
            if st.before != cur {
                return false;
            }
            let Some(ax) = sig.axioms.iter().find(|a| a.id == st.axiom_id) else {
                return false;
            };
            let Some(sub) = cur.subterm(&st.position) else {
                return false;
            };
            if instantiate(&ax.lhs, &st.substitution) != *sub {
                return false;
            }
            cur = cur.replace_at(&st.position, instantiate(&ax.rhs, &st.substitution));
            if cur != st.after {
                return false;
            }
        }
        cur == self.result
    }

    /// The terms of the chain, start first.
    pub fn lines(&self) -> Vec<Term> {
        let mut v = vec![self.start.clone()];
        v.extend(self.steps.iter().map(|s| s.after.clone()));
        v
    }

    /// Derivation-style view: the start, the term before each step whose
    /// redex has the sort of the whole term, and the result. Steps on
    /// subterms of other sorts are folded into the next line.
    pub fn grouped_lines(&self, sig: &Signature) -> Vec<Term> {
        let root_sort = crate::adt::well_sorted(&self.start, sig).ok();
        let mut v = vec![self.start.clone()];
        for st in &self.steps {
            let redex_sort = st
                .before
                .subterm(&st.position)
                .and_then(|t| crate::adt::well_sorted(t, sig).ok());
            if redex_sort == root_sort && v.last() != Some(&st.before) {
                v.push(st.before.clone());
            }
        }
        if v.last() != Some(&self.result) {
            v.push(self.result.clone());
        }
        v
    }
}

impl fmt::Display for RewriteChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "  {}", self.start)?;
        for s in &self.steps {
            writeln!(f, "= {}    [{}]", s.after, s.axiom_id)?;
        }
        Ok(())
    }
}

/// First-order matching; repeated variables must bind equal subterms.
pub fn match_term(pattern: &Term, subject: &Term) -> Option<Subst> {
    let mut s = Subst::new();
    match_into(pattern, subject, &mut s).then_some(s)
}

fn match_into(p: &Term, t: &Term, s: &mut Subst) -> bool {
    match p.head() {
        Head::Var(v, _) => match s.get(&v) {
            Some(bound) => bound == t,
            None => {
                s.insert(v, t.clone());
                true
            }
        },
        Head::Op(op) => {
            t.head_op() == Some(op)
                && p.args().len() == t.args().len()
                && p.args()
                    .iter()
                    .zip(t.args())
                    .all(|(a, b)| match_into(a, b, s))
        }
    }
}

pub fn instantiate(t: &Term, s: &Subst) -> Term {
    match t.head() {
        Head::Var(v, _) => s.get(&v).cloned().unwrap_or_else(|| t.clone()),
        Head::Op(_) if t.args().is_empty() => t.clone(),
        Head::Op(_) => t.with_args(t.args().iter().map(|a| instantiate(a, s)).collect()),
    }
}

fn guard_ok(ax: &Axiom, s: &Subst, sig: &Signature) -> bool {
    match &ax.guard {
        None => true,
        Some(g) => {
            let proc_ = instantiate(&g.process, s);
            let name = instantiate(&g.name, s);
            term_free_names(&proc_, sig).contains(&name) == g.expect
        }
    }
}

/// First axiom (declaration order) applicable at the root of `t`.
pub fn root_redex<'a>(t: &Term, sig: &'a Signature) -> Option<(&'a Axiom, Subst)> {
    let op = t.head_op()?;
    for &i in sig.rules_for(op) {
        let ax = &sig.axioms[i];
        if let Some(s) = match_term(&ax.lhs, t) {
            if guard_ok(ax, &s, sig) {
                return Some((ax, s));
            }
        }
    }
    None
}

/// Every single-step rewrite at every position with every axiom.
pub fn rewrite_step(t: &Term, sig: &Signature) -> Vec<RewriteStep> {
    let mut out = Vec::new();
    let mut path = Vec::new();
    all_steps(t, t, sig, &mut path, &mut out);
    out
}

fn all_steps(
    root: &Term,
    t: &Term,
    sig: &Signature,
    path: &mut Vec<usize>,
    out: &mut Vec<RewriteStep>,
) {
    if let Some(op) = t.head_op() {
        for &i in sig.rules_for(op) {
            let ax = &sig.axioms[i];
            if let Some(s) = match_term(&ax.lhs, t) {
                if guard_ok(ax, &s, sig) {
                    let after = root.replace_at(path, instantiate(&ax.rhs, &s));
                    out.push(RewriteStep {
                        position: path.clone(),
                        axiom_id: ax.id.clone(),
                        substitution: s,
                        before: root.clone(),
                        after,
                    });
                }
            }
        }
    }
    for (i, a) in t.args().iter().enumerate() {
        path.push(i);
        all_steps(root, a, sig, path, out);
        path.pop();
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    LeftmostInnermost,
    LeftmostOutermost,
}

fn find_redex<'a>(
    t: &Term,
    sig: &'a Signature,
    strat: Strategy,
    path: &mut Vec<usize>,
) -> Option<(Vec<usize>, &'a Axiom, Subst)> {
    if strat == Strategy::LeftmostOutermost {
        if let Some((ax, s)) = root_redex(t, sig) {
            return Some((path.clone(), ax, s));
        }
    }
    for (i, a) in t.args().iter().enumerate() {
        path.push(i);
        let r = find_redex(a, sig, strat, path);
        path.pop();
        if r.is_some() {
            return r;
        }
    }
    if strat == Strategy::LeftmostInnermost {
        if let Some((ax, s)) = root_redex(t, sig) {
            return Some((path.clone(), ax, s));
        }
    }
    None
}

/// Normalizes step by step, recording every rewrite.
pub fn normalize_with(
    t: &Term,
    sig: &Signature,
    fuel: u64,
    strat: Strategy,
) -> Result<RewriteChain, RewriteError> {
    let mut cur = t.clone();
    let mut steps = Vec::new();
    while let Some((pos, ax, s)) = find_redex(&cur, sig, strat, &mut Vec::new()) {
        if steps.len() as u64 >= fuel {
            return Err(RewriteError::FuelExhausted {
                steps: fuel,
                last: cur,
            });
        }
        let after = cur.replace_at(&pos, instantiate(&ax.rhs, &s));
        steps.push(RewriteStep {
            position: pos,
            axiom_id: ax.id.clone(),
            substitution: s,
            before: cur,
            after: after.clone(),
        });
        cur = after;
    }
    Ok(RewriteChain {
        start: t.clone(),
        steps,
        result: cur,
    })
}

pub fn normalize(t: &Term, sig: &Signature, fuel: u64) -> Result<RewriteChain, RewriteError> {
    normalize_with(t, sig, fuel, Strategy::LeftmostInnermost)
}

/// Innermost normal form without recording; same strategy as [`normalize`].
pub fn normal_form(t: &Term, sig: &Signature, fuel: u64) -> Result<Term, RewriteError> {
    let mut budget = fuel;
    nf(t, sig, &mut budget).map_err(|last| RewriteError::FuelExhausted { steps: fuel, last })
}

/// Normal form of a term whose arguments are already normal.
pub fn normal_form_root(t: &Term, sig: &Signature, fuel: u64) -> Result<Term, RewriteError> {
    let mut budget = fuel;
    reduce_root(t.clone(), sig, &mut budget)
        .map_err(|last| RewriteError::FuelExhausted { steps: fuel, last })
}

fn nf(t: &Term, sig: &Signature, fuel: &mut u64) -> Result<Term, Term> {
    if t.args().is_empty() {
        return reduce_root(t.clone(), sig, fuel);
    }
    let mut changed = false;
    let mut args = Vec::with_capacity(t.args().len());
    for a in t.args() {
        let n = nf(a, sig, fuel)?;
        changed |= !n.ptr_eq(a);
        args.push(n);
    }
    let t = if changed {
        t.with_args(args)
    } else {
        t.clone()
    };
    reduce_root(t, sig, fuel)
}

/// `t` has normal arguments; rewrite at the root until it is stuck.
fn reduce_root(t: Term, sig: &Signature, fuel: &mut u64) -> Result<Term, Term> {
    match root_redex(&t, sig) {
        None => Ok(t),
        Some((ax, s)) => {
            if *fuel == 0 {
                return Err(t);
            }
            *fuel -= 1;
            build(&ax.rhs, &s, sig, fuel)
        }
    }
}

/// Instantiates a rhs bottom-up; substituted subterms are already normal.
fn build(rhs: &Term, s: &Subst, sig: &Signature, fuel: &mut u64) -> Result<Term, Term> {
    match rhs.head() {
        Head::Var(v, _) => Ok(s.get(&v).cloned().expect("rhs variable bound by lhs")),
        Head::Op(_) => {
            let args = rhs
                .args()
                .iter()
                .map(|a| build(a, s, sig, fuel))
                .collect::<Result<Vec<_>, _>>()?;
            reduce_root(rhs.with_args(args), sig, fuel)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Definedness {
    Defined,
    Undefined,
    Indeterminate,
}

/// Defined iff the normal form is built from constructors only.
pub fn is_defined(t: &Term, sig: &Signature, fuel: u64) -> Definedness {
    match normal_form(t, sig, fuel) {
        Err(_) => Definedness::Indeterminate,
        Ok(n) if is_constructor_term(&n, sig) => Definedness::Defined,
        Ok(_) => Definedness::Undefined,
    }
}

pub fn is_constructor_term(t: &Term, sig: &Signature) -> bool {
    match t.head() {
        Head::Var(..) => false,
        Head::Op(op) => {
            sig.is_constructor(op) && t.args().iter().all(|a| is_constructor_term(a, sig))
        }
    }
}

/// Normal form if defined, `None` if undefined, error if fuel ran out.
pub fn defined_value(t: &Term, sig: &Signature, fuel: u64) -> Result<Option<Term>, RewriteError> {
    let n = normal_form(t, sig, fuel)?;
    Ok(is_constructor_term(&n, sig).then_some(n))
}
