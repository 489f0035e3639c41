//! Seed algebras: seeds, hidden extensions, non-hidden closures and the
//! two isomorphism checks over them.
//!
//! States are canonical terms: the normal form of a closure element, put
//! back through the layer's reset op when that is defined, with the trace
//! component of the seed constructor erased. Everything a check does is
//! driven by the flattened signature; nothing here knows which kind of
//! equivalence a layer encodes.

use crate::adt::{Domain, LayerError, Signature, Sym, Term};
use crate::library;
use crate::oracle::BisimKind;
use crate::process::{encode, Alphabet, DefEnv, Process};
use crate::rewrite::{
    is_constructor_term, normal_form, normal_form_root, RewriteError, DEFAULT_FUEL,
};
use rustc_hash::FxHashMap;
use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeedConfig {
    pub extension_limit: usize,
    pub pair_limit: usize,
    pub fuel: u64,
}

impl Default for SeedConfig {
    fn default() -> Self {
        SeedConfig {
            extension_limit: 10_000,
            pair_limit: 100_000,
            fuel: DEFAULT_FUEL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SeedError {
    #[error(transparent)]
    Layer(#[from] LayerError),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error("hidden extension exceeds {0} elements")]
    ExtensionOverflow(usize),
    #[error("pair table exceeds {0} pairs")]
    PairOverflow(usize),
    #[error("seed {0} is not defined")]
    UndefinedSeed(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum SeedKind {
    /// Initial configuration `tconf(p, p, ())` or a bare process.
    Initial,
    /// A configuration reached from an initial one.
    Reached,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Seed {
    pub term: Term,
    pub kind: SeedKind,
    pub origin: String,
}

/// The seed of a process: `tconf(p, body, ())` for layers with a seed
/// constructor (`body` is the recursion body, or `p` itself), otherwise
/// the encoded process.
pub fn make_seed(p: &Process, env: &DefEnv, sig: &Signature) -> Result<Seed, SeedError> {
    let term = encode(p);
    let term = match sig.seed {
        Some(cons) => {
            let origin = env.body.as_ref().map_or_else(|| term.clone(), encode);
            Term::app(cons, vec![term, origin, Term::op("()", vec![])])
        }
        None => term,
    };
    crate::adt::well_sorted(&term, sig).map_err(|e| LayerError::Term {
        layer: sig.name.clone(),
        msg: e.to_string(),
    })?;
    Ok(Seed {
        term,
        kind: SeedKind::Initial,
        origin: p.to_string(),
    })
}

/// Non-hidden transition op applied with literal arguments.
#[derive(
    Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize,
)]
pub struct Key {
    pub op: String,
    pub literals: Vec<String>,
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.literals.is_empty() {
            write!(f, "{}", self.op)
        } else {
            write!(f, "{}({})", self.op, self.literals.join(","))
        }
    }
}

/// An operation with one element-sort position and literal positions.
#[derive(Clone, Debug)]
struct OpShape {
    op: Sym,
    elem_pos: usize,
    arity: usize,
    /// (position, candidate literals)
    lits: Vec<(usize, Vec<Sym>)>,
}

impl OpShape {
    fn literal_choices(&self) -> Vec<Vec<Sym>> {
        let mut out = vec![Vec::new()];
        for (_, cands) in &self.lits {
            out = out
                .into_iter()
                .flat_map(|pre| {
                    cands.iter().map(move |c| {
                        let mut v = pre.clone();
                        v.push(*c);
                        v
                    })
                })
                .collect();
        }
        out
    }

    fn build(&self, elem: &Term, lits: &[Sym]) -> Term {
        let mut args = Vec::with_capacity(self.arity);
        let mut li = 0;
        for i in 0..self.arity {
            if i == self.elem_pos {
                args.push(elem.clone());
            } else {
                args.push(Term::constant(lits[li]));
                li += 1;
            }
        }
        Term::app(self.op, args)
    }

    fn key(&self, lits: &[Sym]) -> Key {
        Key {
            op: self.op.to_string(),
            literals: lits.iter().map(|s| s.to_string()).collect(),
        }
    }
}

fn domain_values(d: Domain, alpha: &Alphabet) -> Vec<Sym> {
    match d {
        Domain::Channels => alpha.channels.clone(),
        Domain::Names => alpha.names.clone(),
        Domain::Fresh => vec![alpha.fresh],
        Domain::NamesAndFresh => alpha.names_and_fresh(),
    }
}

fn shapes(sig: &Signature, alpha: &Alphabet, elem: Sym, hidden: bool) -> Vec<OpShape> {
    let name = Sym::new("name");
    let chan = Sym::new("chan");
    let mut out = Vec::new();
    for d in sig.ops.values() {
        if d.hidden != hidden || d.private_flag || d.result_sort != elem {
            continue;
        }
        let elem_positions: Vec<usize> =
            (0..d.arity()).filter(|&i| d.arg_sorts[i] == elem).collect();
        if elem_positions.len() != 1 {
            continue;
        }
        let observed = sig.observe.get(&d.name);
        let mut lits = Vec::new();
        let mut ok = true;
        for (i, s) in d.arg_sorts.iter().enumerate() {
            if i == elem_positions[0] {
                continue;
            }
            let dom = match observed.and_then(|o| o[i]) {
                Some(dom) => Some(dom),
                None if *s == chan => Some(Domain::Channels),
                None if *s == name => Some(Domain::Names),
                None => None,
            };
            match dom {
                Some(dom) => lits.push((i, domain_values(dom, alpha))),
                None => ok = false,
            }
        }
        if ok {
            out.push(OpShape {
                op: d.name,
                elem_pos: elem_positions[0],
                arity: d.arity(),
                lits,
            });
        }
    }
    out
}

/// Move set of one state: keys in order, each with its nonempty closure.
pub type Moves = Vec<(Key, BTreeSet<Term>)>;

/// Seed-algebra engine for one flattened layer and alphabet.
pub struct SeedAlgebra<'s> {
    pub sig: &'s Signature,
    pub alpha: Alphabet,
    pub cfg: SeedConfig,
    pub elem_sort: Sym,
    hops: Vec<OpShape>,
    ops: Vec<OpShape>,
    ext_cache: FxHashMap<Term, Arc<BTreeSet<Term>>>,
    move_cache: FxHashMap<Term, Arc<Moves>>,
    app_cache: RefCell<FxHashMap<Term, Option<Term>>>,
}

impl<'s> SeedAlgebra<'s> {
    pub fn new(sig: &'s Signature, alpha: &Alphabet, elem_sort: Sym, cfg: SeedConfig) -> Self {
        SeedAlgebra {
            sig,
            alpha: alpha.clone(),
            cfg,
            elem_sort,
            hops: shapes(sig, alpha, elem_sort, true),
            ops: shapes(sig, alpha, elem_sort, false),
            ext_cache: FxHashMap::default(),
            move_cache: FxHashMap::default(),
            app_cache: RefCell::default(),
        }
    }

    /// Engine whose element sort is the sort of `seed`.
    pub fn for_seed(
        sig: &'s Signature,
        alpha: &Alphabet,
        seed: &Seed,
        cfg: SeedConfig,
    ) -> Result<Self, SeedError> {
        let sort = crate::adt::well_sorted(&seed.term, sig).map_err(|e| LayerError::Term {
            layer: sig.name.clone(),
            msg: e.to_string(),
        })?;
        Ok(Self::new(sig, alpha, sort, cfg))
    }

    /// (states with computed moves, extension elements seen, applications evaluated)
    pub fn work(&self) -> (usize, usize, usize) {
        (
            self.move_cache.len(),
            self.ext_cache.values().map(|e| e.len()).sum(),
            self.app_cache.borrow().len(),
        )
    }

    pub fn hidden_ops(&self) -> Vec<Sym> {
        self.hops.iter().map(|s| s.op).collect()
    }

    pub fn transition_ops(&self) -> Vec<Sym> {
        self.ops.iter().map(|s| s.op).collect()
    }

    /// Normal form if defined.
    pub fn defined(&self, t: &Term) -> Result<Option<Term>, SeedError> {
        let n = normal_form(t, self.sig, self.cfg.fuel)?;
        Ok(is_constructor_term(&n, self.sig).then_some(n))
    }

    /// Like [`Self::defined`] for an application over normal arguments.
    fn defined_app(&self, t: &Term) -> Result<Option<Term>, SeedError> {
        if let Some(v) = self.app_cache.borrow().get(t) {
            return Ok(v.clone());
        }
        let n = normal_form_root(t, self.sig, self.cfg.fuel)?;
        let v = is_constructor_term(&n, self.sig).then_some(n);
        self.app_cache.borrow_mut().insert(t.clone(), v.clone());
        Ok(v)
    }

    /// State form of a closure element.
    pub fn canonical(&self, t: &Term) -> Result<Term, SeedError> {
        let mut cur = t.clone();
        if let Some(reset) = self.sig.reset {
            if let Some(r) = self.defined_app(&Term::app(reset, vec![cur.clone()]))? {
                cur = r;
            }
        }
        Ok(self.erase_trace(&cur))
    }

    fn erase_trace(&self, t: &Term) -> Term {
        let Some(cons) = self.sig.seed else {
            return t.clone();
        };
        if t.head_op() != Some(cons) {
            return t.clone();
        }
        let trace = Sym::new("trace");
        let decl = self.sig.op(cons).expect("seed constructor declared");
        let args = t
            .args()
            .iter()
            .zip(&decl.arg_sorts)
            .map(|(a, s)| {
                if *s == trace {
                    Term::op("()", vec![])
                } else {
                    a.clone()
                }
            })
            .collect();
        t.with_args(args)
    }

    /// Least set containing `base` and closed under defined hidden ops.
    pub fn hidden_extension(&mut self, base: &[Term]) -> Result<BTreeSet<Term>, SeedError> {
        let mut out = BTreeSet::new();
        for b in base {
            out.extend(self.extension_of(b)?.iter().cloned());
        }
        Ok(out)
    }

    fn extension_of(&mut self, b: &Term) -> Result<Arc<BTreeSet<Term>>, SeedError> {
        if let Some(e) = self.ext_cache.get(b) {
            return Ok(e.clone());
        }
        let mut seen = BTreeSet::from([b.clone()]);
        let mut queue = VecDeque::from([b.clone()]);
        while let Some(x) = queue.pop_front() {
            for h in &self.hops {
                for lits in h.literal_choices() {
                    if let Some(y) = self.defined_app(&h.build(&x, &lits))? {
                        if seen.insert(y.clone()) {
                            if seen.len() > self.cfg.extension_limit {
                                return Err(SeedError::ExtensionOverflow(self.cfg.extension_limit));
                            }
                            queue.push_back(y);
                        }
                    }
                }
            }
        }
        let e = Arc::new(seen);
        self.ext_cache.insert(b.clone(), e.clone());
        Ok(e)
    }

    /// Defined applications of `op` over the given argument sets, in state
    /// form. Empty means the closure does not exist.
    pub fn non_hidden_closure(
        &self,
        op: Sym,
        args: &[BTreeSet<Term>],
    ) -> Result<BTreeSet<Term>, SeedError> {
        let mut combos: Vec<Vec<Term>> = vec![Vec::new()];
        for a in args {
            combos = combos
                .into_iter()
                .flat_map(|pre| {
                    a.iter().map(move |x| {
                        let mut v = pre.clone();
                        v.push(x.clone());
                        v
                    })
                })
                .collect();
        }
        let mut out = BTreeSet::new();
        for c in combos {
            if let Some(v) = self.defined(&Term::app(op, c))? {
                out.insert(self.canonical(&v)?);
            }
        }
        Ok(out)
    }

    fn closure_over(
        &self,
        shape: &OpShape,
        ext: &BTreeSet<Term>,
        lits: &[Sym],
    ) -> Result<BTreeSet<Term>, SeedError> {
        let mut out = BTreeSet::new();
        for e in ext {
            if let Some(v) = self.defined_app(&shape.build(e, lits))? {
                out.insert(self.canonical(&v)?);
            }
        }
        Ok(out)
    }

    /// Every nonempty closure reachable in one transition op from `state`.
    pub fn closure_moves(&mut self, state: &Term) -> Result<Arc<Moves>, SeedError> {
        if let Some(m) = self.move_cache.get(state) {
            return Ok(m.clone());
        }
        let ext = self.extension_of(state)?;
        let mut moves = Vec::new();
        for shape in &self.ops {
            for lits in shape.literal_choices() {
                let c = self.closure_over(shape, &ext, &lits)?;
                if !c.is_empty() {
                    moves.push((shape.key(&lits), c));
                }
            }
        }
        moves.sort_by(|a, b| a.0.cmp(&b.0));
        let m = Arc::new(moves);
        self.move_cache.insert(state.clone(), m.clone());
        Ok(m)
    }

    /// Moves of a set of states: the closure over the union of extensions.
    pub fn set_moves(
        &mut self,
        states: &BTreeSet<Term>,
    ) -> Result<BTreeMap<Key, BTreeSet<Term>>, SeedError> {
        let mut out: BTreeMap<Key, BTreeSet<Term>> = BTreeMap::new();
        for s in states {
            for (k, c) in self.closure_moves(s)?.iter() {
                out.entry(k.clone()).or_default().extend(c.iter().cloned());
            }
        }
        Ok(out)
    }

    /// Renders a key as an application over bracketed arguments.
    fn key_expr(&self, key: &Key, arg: &str) -> String {
        let shape = self.ops.iter().find(|s| s.op.as_str() == key.op);
        let Some(shape) = shape else {
            return format!("{key}([{arg}])");
        };
        let mut parts = Vec::new();
        let mut li = 0;
        for i in 0..shape.arity {
            if i == shape.elem_pos {
                parts.push(format!("[{arg}]"));
            } else {
                parts.push(format!("[{}]", key.literals[li]));
                li += 1;
            }
        }
        format!("{}({})", key.op, parts.join(","))
    }

    /// Closure tree to `depth`, one line per closure:
    /// `act([a],[q]) = {pre(b,nil)}`.
    pub fn closure_tree(
        &mut self,
        root: &Term,
        label: &str,
        depth: usize,
    ) -> Result<Vec<String>, SeedError> {
        let mut lines = Vec::new();
        let mut frontier = vec![(label.to_owned(), BTreeSet::from([root.clone()]))];
        for _ in 0..depth {
            let mut next = Vec::new();
            for (expr, set) in frontier {
                for (k, c) in self.set_moves(&set)? {
                    let e = self.key_expr(&k, &expr);
                    let elems: Vec<String> = c.iter().map(compact).collect();
                    lines.push(format!("{e} = {{{}}}", elems.join(", ")));
                    next.push((e, c));
                }
            }
            frontier = next;
        }
        Ok(lines)
    }
}

/// Term text without spaces after commas.
pub fn compact(t: &Term) -> String {
    t.to_string().replace(", ", ",")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Side {
    Left,
    Right,
}

/// A pair that is not deeply isomorphic, with the key path reaching it.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct FailingPair {
    pub path: Vec<Key>,
    pub left: String,
    pub right: String,
}

/// One round of a distinguishing play on closures.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SeedRound {
    pub attacker: Side,
    pub key: Key,
    pub attacker_element: Option<String>,
    pub responses: Vec<String>,
    pub chosen: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct DeepResult {
    pub equivalent: bool,
    pub states: usize,
    pub pairs: usize,
    /// Surviving pairs when equivalent.
    pub corresponding: Vec<(String, String)>,
    /// Dead pairs with their key paths, shallowest first.
    pub failing: Vec<FailingPair>,
    pub distinguisher: Vec<SeedRound>,
}

struct Attack {
    side: Side,
    key: Key,
    element: Option<Term>,
    responses: Vec<usize>,
}

/// Greatest fixpoint over pairs of states: a pair survives iff both sides
/// have the same keys and every closure element on one side has a
/// surviving partner in the matching closure on the other.
pub fn deep_iso(alg: &mut SeedAlgebra, a: &Term, b: &Term) -> Result<DeepResult, SeedError> {
    let mut pairs: Vec<(Term, Term)> = vec![(a.clone(), b.clone())];
    let mut index: FxHashMap<(Term, Term), usize> = FxHashMap::default();
    index.insert((a.clone(), b.clone()), 0);
    let mut parent: Vec<Option<(usize, Key)>> = vec![None];
    let mut attacks: Vec<Vec<Attack>> = Vec::new();
    let mut states: BTreeSet<Term> = BTreeSet::new();
    let mut i = 0;
    while i < pairs.len() {
        let (x, y) = pairs[i].clone();
        states.insert(x.clone());
        states.insert(y.clone());
        let mx = alg.closure_moves(&x)?;
        let my = alg.closure_moves(&y)?;
        let bx: BTreeMap<&Key, &BTreeSet<Term>> = mx.iter().map(|(k, c)| (k, c)).collect();
        let by: BTreeMap<&Key, &BTreeSet<Term>> = my.iter().map(|(k, c)| (k, c)).collect();
        let empty = BTreeSet::new();
        let mut list = Vec::new();
        let keys: BTreeSet<&Key> = bx.keys().chain(by.keys()).copied().collect();
        for k in keys {
            let cx = bx.get(k).copied().unwrap_or(&empty);
            let cy = by.get(k).copied().unwrap_or(&empty);
            if cx.is_empty() || cy.is_empty() {
                let side = if cx.is_empty() {
                    Side::Right
                } else {
                    Side::Left
                };
                list.push(Attack {
                    side,
                    key: k.clone(),
                    element: None,
                    responses: vec![],
                });
                continue;
            }
            for (side, att, def) in [(Side::Left, cx, cy), (Side::Right, cy, cx)] {
                for e in att {
                    let mut resp = Vec::new();
                    for r in def {
                        let key = if side == Side::Left {
                            (e.clone(), r.clone())
                        } else {
                            (r.clone(), e.clone())
                        };
                        let id = match index.get(&key) {
                            Some(&id) => id,
                            None => {
                                if pairs.len() >= alg.cfg.pair_limit {
                                    return Err(SeedError::PairOverflow(alg.cfg.pair_limit));
                                }
                                pairs.push(key.clone());
                                parent.push(Some((i, k.clone())));
                                index.insert(key, pairs.len() - 1);
                                pairs.len() - 1
                            }
                        };
                        resp.push(id);
                    }
                    list.push(Attack {
                        side,
                        key: k.clone(),
                        element: Some(e.clone()),
                        responses: resp,
                    });
                }
            }
        }
        attacks.push(list);
        i += 1;
    }
    let n = pairs.len();
    let mut alive = vec![true; n];
    let mut level = vec![usize::MAX; n];
    let mut round = 0;
    loop {
        round += 1;
        let killed: Vec<usize> = (0..n)
            .filter(|&i| {
                alive[i]
                    && attacks[i]
                        .iter()
                        .any(|at| at.responses.iter().all(|&r| !alive[r]))
            })
            .collect();
        if killed.is_empty() {
            break;
        }
        for i in killed {
            alive[i] = false;
            level[i] = round;
        }
    }
    let path_of = |mut i: usize| {
        let mut p = Vec::new();
        while let Some((par, k)) = &parent[i] {
            p.push(k.clone());
            i = *par;
        }
        p.reverse();
        p
    };
    let mut failing: Vec<FailingPair> = (0..n)
        .filter(|&i| !alive[i])
        .map(|i| FailingPair {
            path: path_of(i),
            left: compact(&pairs[i].0),
            right: compact(&pairs[i].1),
        })
        .collect();
    failing.sort_by(|x, y| {
        (x.path.len(), &x.path, &x.left, &x.right).cmp(&(y.path.len(), &y.path, &y.left, &y.right))
    });
    let corresponding = if alive[0] {
        let mut v: Vec<(String, String)> = (0..n)
            .filter(|&i| alive[i])
            .map(|i| (compact(&pairs[i].0), compact(&pairs[i].1)))
            .collect();
        v.sort();
        v
    } else {
        Vec::new()
    };
    let distinguisher = if alive[0] {
        Vec::new()
    } else {
        distinguish(&pairs, &attacks, &level)
    };
    Ok(DeepResult {
        equivalent: alive[0],
        states: states.len(),
        pairs: n,
        corresponding,
        failing,
        distinguisher,
    })
}

fn distinguish(pairs: &[(Term, Term)], attacks: &[Vec<Attack>], level: &[usize]) -> Vec<SeedRound> {
    let mut out = Vec::new();
    let mut cur = 0;
    loop {
        let lvl = level[cur];
        let best = attacks[cur]
            .iter()
            .filter(|at| at.responses.iter().all(|&r| level[r] < lvl))
            .min_by(|x, y| {
                let mx = x.responses.iter().map(|&r| level[r]).max();
                let my = y.responses.iter().map(|&r| level[r]).max();
                (mx, &x.key, x.side as u8, &x.element).cmp(&(my, &y.key, y.side as u8, &y.element))
            })
            .expect("dead pair has a winning attack");
        let def_of = |pid: usize| {
            if best.side == Side::Left {
                &pairs[pid].1
            } else {
                &pairs[pid].0
            }
        };
        let next = best.responses.iter().copied().max_by(|&x, &y| {
            level[x]
                .cmp(&level[y])
                .then_with(|| def_of(y).cmp(def_of(x)))
        });
        out.push(SeedRound {
            attacker: best.side,
            key: best.key.clone(),
            attacker_element: best.element.as_ref().map(compact),
            responses: best.responses.iter().map(|&r| compact(def_of(r))).collect(),
            chosen: next.map(|r| compact(def_of(r))),
        });
        match next {
            Some(r) => cur = r,
            None => break,
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct RoughResult {
    pub equivalent: bool,
    pub pairs: usize,
    /// Shortest key sequence available on exactly one side.
    pub distinguishing_path: Vec<Key>,
}

/// Equality of the closure-key trees of two seeds, decided by a joint
/// subset construction over closures.
pub fn rough_seed_iso(alg: &mut SeedAlgebra, a: &Term, b: &Term) -> Result<RoughResult, SeedError> {
    type Node = (BTreeSet<Term>, BTreeSet<Term>);
    let root: Node = (BTreeSet::from([a.clone()]), BTreeSet::from([b.clone()]));
    let mut seen: HashMap<Node, ()> = HashMap::new();
    let mut queue: VecDeque<(Node, Vec<Key>)> = VecDeque::from([(root.clone(), Vec::new())]);
    seen.insert(root, ());
    while let Some(((x, y), path)) = queue.pop_front() {
        let mx = alg.set_moves(&x)?;
        let my = alg.set_moves(&y)?;
        let keys: BTreeSet<&Key> = mx.keys().chain(my.keys()).collect();
        for k in keys {
            let mut p = path.clone();
            p.push(k.clone());
            let (Some(cx), Some(cy)) = (mx.get(k), my.get(k)) else {
                return Ok(RoughResult {
                    equivalent: false,
                    pairs: seen.len(),
                    distinguishing_path: p,
                });
            };
            let node = (cx.clone(), cy.clone());
            if !seen.contains_key(&node) {
                if seen.len() >= alg.cfg.pair_limit {
                    return Err(SeedError::PairOverflow(alg.cfg.pair_limit));
                }
                seen.insert(node.clone(), ());
                queue.push_back((node, p));
            }
        }
    }
    Ok(RoughResult {
        equivalent: true,
        pairs: seen.len(),
        distinguishing_path: Vec::new(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SeedVerdict {
    pub kind: BisimKind,
    pub layer: String,
    pub equivalent: bool,
    pub states: usize,
    pub pairs: usize,
    pub failing: Vec<FailingPair>,
    pub distinguisher: Vec<SeedRound>,
    pub distinguishing_path: Vec<Key>,
}

/// Decides `kind` on the seed side: deep isomorphism in the kind's layer,
/// or rough seed isomorphism in the strong early layer for traces.
pub fn seed_check(
    kind: BisimKind,
    p: &Process,
    q: &Process,
    env: &DefEnv,
    alpha: &Alphabet,
    cfg: SeedConfig,
) -> Result<SeedVerdict, SeedError> {
    let sig = library::get_layer(library::kind_of_layer(kind), alpha)?;
    seed_check_in(&sig, kind, p, q, env, alpha, cfg)
}

/// [`seed_check`] against an already flattened layer for `kind`.
pub fn seed_check_in(
    sig: &Signature,
    kind: BisimKind,
    p: &Process,
    q: &Process,
    env: &DefEnv,
    alpha: &Alphabet,
    cfg: SeedConfig,
) -> Result<SeedVerdict, SeedError> {
    let layer = library::kind_of_layer(kind);
    let sa = make_seed(p, env, sig)?;
    let sb = make_seed(q, env, sig)?;
    let mut alg = SeedAlgebra::for_seed(sig, alpha, &sa, cfg)?;
    for s in [&sa, &sb] {
        if alg.defined(&s.term)?.is_none() {
            return Err(SeedError::UndefinedSeed(s.term.to_string()));
        }
    }
    if kind == BisimKind::TRACE {
        let r = rough_seed_iso(&mut alg, &sa.term, &sb.term)?;
        return Ok(SeedVerdict {
            kind,
            layer: layer.into(),
            equivalent: r.equivalent,
            states: alg.move_cache.len(),
            pairs: r.pairs,
            failing: Vec::new(),
            distinguisher: Vec::new(),
            distinguishing_path: r.distinguishing_path,
        });
    }
    let r = deep_iso(&mut alg, &sa.term, &sb.term)?;
    Ok(SeedVerdict {
        kind,
        layer: layer.into(),
        equivalent: r.equivalent,
        states: r.states,
        pairs: r.pairs,
        failing: r.failing,
        distinguisher: r.distinguisher,
        distinguishing_path: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::{parse_process, Calculus};

    fn vp(src: &str, alpha: &Alphabet) -> (Process, DefEnv) {
        parse_process(src, Calculus::ValuePassing, alpha).unwrap()
    }

    #[test]
    fn nil_seed() {
        let alpha = Alphabet::default();
        let sig = library::get_layer("Process-Trans", &alpha).unwrap();
        let s = make_seed(&Process::Nil, &DefEnv::default(), &sig).unwrap();
        assert_eq!(s.term.to_string(), "tconf(nil, nil, ())");
        let mut alg = SeedAlgebra::for_seed(&sig, &alpha, &s, SeedConfig::default()).unwrap();
        assert!(alg.closure_moves(&s.term).unwrap().is_empty());
    }

    #[test]
    fn simple_early_pair() {
        let alpha = Alphabet::default();
        let (p, env) = vp("c?u.d!a.nil + d!a.c?u.nil", &alpha);
        let (q, _) = vp("c?u.nil | d!a.nil", &alpha);
        let v = seed_check(BisimKind::SEB, &p, &q, &env, &alpha, SeedConfig::default()).unwrap();
        assert!(v.equivalent, "{v:?}");
    }
}
