//! Early and late transition relations, barbs and state-space exploration.

use crate::adt::Sym;
use crate::process::{free_names, substitute, Alphabet, DefEnv, Process};
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

pub const DEFAULT_STATE_LIMIT: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Semantics {
    Early,
    Late,
}

/// Transition labels. The derived order is the tie-break order for
/// distinguishers (Tau first, then inputs, then outputs).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    Tau,
    /// Basic calculus action.
    Act(Sym),
    In(Sym, Sym),
    BoundIn(Sym, Sym),
    Out(Sym, Sym),
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Tau => write!(f, "tau"),
            Action::Act(x) => write!(f, "{x}"),
            Action::In(c, x) => write!(f, "{c}?{x}"),
            Action::BoundIn(c, x) => write!(f, "{c}({x})"),
            Action::Out(c, x) => write!(f, "{c}!{x}"),
        }
    }
}

impl fmt::Debug for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BarbDir {
    In,
    Out,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Barb {
    pub dir: BarbDir,
    pub channel: Sym,
}

impl fmt::Display for Barb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.dir {
            BarbDir::In => write!(f, "in@{}", self.channel),
            BarbDir::Out => write!(f, "out@{}", self.channel),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LtsError {
    #[error("rp used without a definition")]
    MissingDefinition,
    #[error("state limit {0} exceeded")]
    Overflow(usize),
}

/// Late transitions: inputs carry their bound placeholder, freshened to
/// the reserved name when it clashes with the parallel context.
pub fn late_transitions(
    p: &Process,
    env: &DefEnv,
    alpha: &Alphabet,
) -> Result<Vec<(Action, Process)>, LtsError> {
    let mut out = Vec::new();
    late_into(p, env, Some(alpha), &mut out, 0)?;
    Ok(out)
}

/// Like [`late_transitions`] but never renames placeholders; used when the
/// input is instantiated immediately.
fn raw_transitions(p: &Process, env: &DefEnv) -> Result<Vec<(Action, Process)>, LtsError> {
    let mut out = Vec::new();
    late_into(p, env, None, &mut out, 0)?;
    Ok(out)
}

fn late_into(
    p: &Process,
    env: &DefEnv,
    alpha: Option<&Alphabet>,
    out: &mut Vec<(Action, Process)>,
    depth: usize,
) -> Result<(), LtsError> {
    match p {
        Process::Nil => {}
        Process::Tau(q) => out.push((Action::Tau, (**q).clone())),
        Process::Act(x, q) => out.push((Action::Act(*x), (**q).clone())),
        Process::Output(c, x, q) => out.push((Action::Out(*c, *x), (**q).clone())),
        Process::Input(c, x, q) => out.push((Action::BoundIn(*c, *x), (**q).clone())),
        Process::Rec => {
            let body = env.body.as_ref().ok_or(LtsError::MissingDefinition)?;
            // guardedness is checked at load; the depth bound is a safety net
            if depth > 64 {
                return Err(LtsError::MissingDefinition);
            }
            late_into(body, env, alpha, out, depth + 1)?;
        }
        Process::Sum(a, b) => {
            late_into(a, env, alpha, out, depth)?;
            late_into(b, env, alpha, out, depth)?;
        }
        Process::Compo(a, b) => {
            let mut la = Vec::new();
            late_into(a, env, alpha, &mut la, depth)?;
            let mut lb = Vec::new();
            late_into(b, env, alpha, &mut lb, depth)?;
            let fb = free_names(b);
            let fa = free_names(a);
            for (act, a2) in &la {
                out.push(freshen(*act, a2.clone(), &fb, alpha, |x| {
                    Process::compo(x, (**b).clone())
                }));
            }
            for (act, b2) in &lb {
                out.push(freshen(*act, b2.clone(), &fa, alpha, |x| {
                    Process::compo((**a).clone(), x)
                }));
            }
            // communication instantiates the receiver's placeholder directly
            for (x, a2) in &la {
                for (y, b2) in &lb {
                    match (x, y) {
                        (Action::Out(c, v), Action::BoundIn(c2, u)) if c == c2 => {
                            out.push((
                                Action::Tau,
                                Process::compo(a2.clone(), substitute(b2, *u, *v)),
                            ));
                        }
                        (Action::BoundIn(c, u), Action::Out(c2, v)) if c == c2 => {
                            out.push((
                                Action::Tau,
                                Process::compo(substitute(a2, *u, *v), b2.clone()),
                            ));
                        }
                        _ => {}
                    }
                }
            }
        }
    }
    Ok(())
}

fn freshen(
    act: Action,
    cont: Process,
    other_fn: &BTreeSet<Sym>,
    alpha: Option<&Alphabet>,
    wrap: impl Fn(Process) -> Process,
) -> (Action, Process) {
    match (act, alpha) {
        (Action::BoundIn(c, u), Some(alpha)) if other_fn.contains(&u) && u != alpha.fresh => (
            Action::BoundIn(c, alpha.fresh),
            wrap(substitute(&cont, u, alpha.fresh)),
        ),
        _ => (act, wrap(cont)),
    }
}

/// Instantiates a late input continuation with a received name.
pub fn instantiate_input(cont: &Process, placeholder: Sym, name: Sym) -> Process {
    substitute(cont, placeholder, name)
}

/// Early (or late) transitions with deterministic ordering.
pub fn transitions(
    p: &Process,
    env: &DefEnv,
    sem: Semantics,
    alpha: &Alphabet,
) -> Result<Vec<(Action, Process)>, LtsError> {
    let mut out = match sem {
        Semantics::Late => late_transitions(p, env, alpha)?,
        Semantics::Early => {
            let mut v = Vec::new();
            // instantiate after freshening so the context keeps its free names
            for (a, q) in late_transitions(p, env, alpha)? {
                match a {
                    Action::BoundIn(c, u) => {
                        for &n in &alpha.names {
                            v.push((Action::In(c, n), substitute(&q, u, n)));
                        }
                    }
                    _ => v.push((a, q)),
                }
            }
            v
        }
    };
    out.sort();
    out.dedup();
    Ok(out)
}

/// Inputs of a single given name (ground semantics).
pub fn inputs_of(
    p: &Process,
    env: &DefEnv,
    alpha: &Alphabet,
    name: Sym,
) -> Result<Vec<(Action, Process)>, LtsError> {
    let mut v: Vec<_> = late_transitions(p, env, alpha)?
        .into_iter()
        .map(|(a, q)| match a {
            Action::BoundIn(c, u) => (Action::In(c, name), substitute(&q, u, name)),
            _ => (a, q),
        })
        .collect();
    v.sort();
    v.dedup();
    Ok(v)
}

pub fn barbs(p: &Process, env: &DefEnv) -> Result<BTreeSet<Barb>, LtsError> {
    let mut s = BTreeSet::new();
    barbs_into(p, env, &mut s, 0)?;
    Ok(s)
}

fn barbs_into(
    p: &Process,
    env: &DefEnv,
    s: &mut BTreeSet<Barb>,
    depth: usize,
) -> Result<(), LtsError> {
    match p {
        Process::Input(c, _, _) => {
            s.insert(Barb {
                dir: BarbDir::In,
                channel: *c,
            });
        }
        Process::Output(c, _, _) => {
            s.insert(Barb {
                dir: BarbDir::Out,
                channel: *c,
            });
        }
        Process::Sum(a, b) | Process::Compo(a, b) => {
            barbs_into(a, env, s, depth)?;
            barbs_into(b, env, s, depth)?;
        }
        Process::Rec => {
            let body = env.body.as_ref().ok_or(LtsError::MissingDefinition)?;
            if depth <= 64 {
                barbs_into(body, env, s, depth + 1)?;
            }
        }
        Process::Nil | Process::Tau(_) | Process::Act(..) => {}
    }
    Ok(())
}

pub fn tau_successors(
    p: &Process,
    env: &DefEnv,
    alpha: &Alphabet,
) -> Result<Vec<Process>, LtsError> {
    let _ = alpha;
    let mut v: Vec<Process> = raw_transitions(p, env)?
        .into_iter()
        .filter(|(a, _)| *a == Action::Tau)
        .map(|(_, q)| q)
        .collect();
    v.sort();
    v.dedup();
    Ok(v)
}

/// States reachable by zero or more tau steps.
pub fn tau_closure(
    p: &Process,
    env: &DefEnv,
    alpha: &Alphabet,
    limit: usize,
) -> Result<BTreeSet<Process>, LtsError> {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([p.clone()]);
    seen.insert(p.clone());
    while let Some(s) = queue.pop_front() {
        for q in tau_successors(&s, env, alpha)? {
            if seen.insert(q.clone()) {
                if seen.len() > limit {
                    return Err(LtsError::Overflow(limit));
                }
                queue.push_back(q);
            }
        }
    }
    Ok(seen)
}

/// `*a` weak transitions; for Tau this is the tau closure itself.
pub fn weak_transitions(
    p: &Process,
    env: &DefEnv,
    sem: Semantics,
    alpha: &Alphabet,
    a: Action,
    limit: usize,
) -> Result<BTreeSet<Process>, LtsError> {
    let pre = tau_closure(p, env, alpha, limit)?;
    if a == Action::Tau {
        return Ok(pre);
    }
    let mut out = BTreeSet::new();
    for s in pre {
        for (b, q) in transitions(&s, env, sem, alpha)? {
            if b == a {
                out.insert(q);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateSpace {
    pub states: Vec<Process>,
    pub transitions: Vec<(usize, Action, usize)>,
    pub truncated: bool,
}

impl StateSpace {
    pub fn index_of(&self, p: &Process) -> Option<usize> {
        self.states.iter().position(|s| s == p)
    }
}

/// Breadth-first exploration; sets `truncated` instead of failing.
pub fn reachable(
    p: &Process,
    env: &DefEnv,
    sem: Semantics,
    alpha: &Alphabet,
    limit: usize,
) -> Result<StateSpace, LtsError> {
    let mut index: HashMap<Process, usize> = HashMap::new();
    let mut states = vec![p.clone()];
    index.insert(p.clone(), 0);
    let mut trans = Vec::new();
    let mut truncated = false;
    let mut i = 0;
    while i < states.len() {
        let s = states[i].clone();
        for (a, q) in transitions(&s, env, sem, alpha)? {
            let j = match index.get(&q) {
                Some(&j) => j,
                None => {
                    if states.len() >= limit {
                        truncated = true;
                        continue;
                    }
                    states.push(q.clone());
                    index.insert(q, states.len() - 1);
                    states.len() - 1
                }
            };
            trans.push((i, a, j));
        }
        i += 1;
    }
    Ok(StateSpace {
        states,
        transitions: trans,
        truncated,
    })
}
