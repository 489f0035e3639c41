//! Relational ground truth: the ten bisimulations and trace equivalence,
//! each decided as a greatest fixpoint over reachable state pairs.

use crate::adt::Sym;
use crate::lts::{self, Action, Barb, LtsError, Semantics};
use crate::process::{apply_sigma, free_names, substitute, Alphabet, DefEnv, Process};
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

#[derive(
    Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize,
)]
pub enum BisimKind {
    WBB,
    SBB,
    WGB,
    WEB,
    WLB,
    WOB,
    SGB,
    SEB,
    SLB,
    SOB,
    TRACE,
}

impl BisimKind {
    pub const BISIMS: [BisimKind; 10] = [
        BisimKind::WBB,
        BisimKind::SBB,
        BisimKind::WGB,
        BisimKind::WEB,
        BisimKind::WLB,
        BisimKind::WOB,
        BisimKind::SGB,
        BisimKind::SEB,
        BisimKind::SLB,
        BisimKind::SOB,
    ];

    pub fn is_weak(self) -> bool {
        matches!(
            self,
            BisimKind::WBB | BisimKind::WGB | BisimKind::WEB | BisimKind::WLB | BisimKind::WOB
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            BisimKind::WBB => "WBB",
            BisimKind::SBB => "SBB",
            BisimKind::WGB => "WGB",
            BisimKind::WEB => "WEB",
            BisimKind::WLB => "WLB",
            BisimKind::WOB => "WOB",
            BisimKind::SGB => "SGB",
            BisimKind::SEB => "SEB",
            BisimKind::SLB => "SLB",
            BisimKind::SOB => "SOB",
            BisimKind::TRACE => "TRACE",
        }
    }

    fn family(self) -> Family {
        match self {
            BisimKind::WBB | BisimKind::SBB => Family::Barbed,
            BisimKind::WGB | BisimKind::SGB => Family::Ground,
            BisimKind::WEB | BisimKind::SEB | BisimKind::TRACE => Family::Early,
            BisimKind::WLB | BisimKind::SLB => Family::Late,
            BisimKind::WOB | BisimKind::SOB => Family::Open,
        }
    }
}

impl fmt::Display for BisimKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("unknown bisimulation kind {0}")]
pub struct UnknownKind(pub String);

impl FromStr for BisimKind {
    type Err = UnknownKind;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let up = s.to_ascii_uppercase();
        BisimKind::BISIMS
            .iter()
            .chain(std::iter::once(&BisimKind::TRACE))
            .copied()
            .find(|k| k.name() == up)
            .ok_or_else(|| UnknownKind(s.to_owned()))
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Family {
    Barbed,
    Ground,
    Early,
    Late,
    Open,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error(transparent)]
    Lts(#[from] LtsError),
    #[error("state space truncated at {0} states")]
    Truncated(usize),
    #[error("fresh name {0} occurs free in the processes")]
    FreshClash(String),
}

/// Tunables for a check.
#[derive(Clone, Copy, Debug)]
pub struct OracleConfig {
    pub state_limit: usize,
    /// Weak visible moves answered by `*a*` instead of `*a` (only used to
    /// confirm that both formulations agree).
    pub trailing_taus: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            state_limit: lts::DEFAULT_STATE_LIMIT,
            trailing_taus: false,
        }
    }
}

/// Game labels; the derived order is the distinguisher tie-break.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Label {
    Tau,
    Act(Sym),
    In(Sym, Sym),
    BoundIn(Sym),
    Inst(Sym),
    Out(Sym, Sym),
    Barb(Barb),
    Subst(Vec<(Sym, Sym)>),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Tau => write!(f, "tau"),
            Label::Act(x) => write!(f, "{x}"),
            Label::In(c, x) => write!(f, "{c}?{x}"),
            Label::BoundIn(c) => write!(f, "{c}(_)"),
            Label::Inst(a) => write!(f, "inst {a}"),
            Label::Out(c, x) => write!(f, "{c}!{x}"),
            Label::Barb(b) => write!(f, "barb {b}"),
            Label::Subst(s) => {
                let parts: Vec<String> = s.iter().map(|(x, y)| format!("{y}/{x}")).collect();
                write!(f, "subst [{}]", parts.join(","))
            }
        }
    }
}

impl Label {
    fn from_action(a: Action) -> Label {
        match a {
            Action::Tau => Label::Tau,
            Action::Act(x) => Label::Act(x),
            Action::In(c, x) => Label::In(c, x),
            Action::BoundIn(c, _) => Label::BoundIn(c),
            Action::Out(c, x) => Label::Out(c, x),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GState {
    Proc(Process),
    /// Late input awaiting instantiation of the placeholder.
    Bound(Process, Sym),
    /// Target of an observation with no continuation.
    Sink,
}

impl fmt::Display for GState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GState::Proc(p) => write!(f, "{p}"),
            GState::Bound(p, x) => write!(f, "\\{x}. {p}"),
            GState::Sink => write!(f, "*"),
        }
    }
}

impl fmt::Debug for GState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Side {
    Left,
    Right,
}

/// One round of a distinguishing game.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Round {
    pub attacker: Side,
    pub label: String,
    pub attacker_target: String,
    /// All defender answers; empty on the final round.
    pub responses: Vec<String>,
    pub chosen: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Stats {
    pub states: usize,
    pub pairs: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Verdict {
    pub kind: BisimKind,
    pub equivalent: bool,
    pub witness: Vec<(String, String)>,
    pub distinguisher: Vec<Round>,
    pub stats: Stats,
}

struct Game<'a> {
    kind: BisimKind,
    env: &'a DefEnv,
    alpha: &'a Alphabet,
    cfg: OracleConfig,
    sigmas: Vec<Vec<(Sym, Sym)>>,
    moves: HashMap<GState, Vec<(Label, GState)>>,
    taus: HashMap<Process, Vec<Process>>,
}

/// All non-identity maps names -> names, as (from, to) lists.
pub fn all_substitutions(alpha: &Alphabet) -> Vec<Vec<(Sym, Sym)>> {
    let n = alpha.names.len();
    let mut out = Vec::new();
    let total = n.pow(n as u32);
    for code in 0..total {
        let mut c = code;
        let mut map = Vec::new();
        for i in 0..n {
            let j = c % n;
            c /= n;
            map.push((alpha.names[i], alpha.names[j]));
        }
        if map.iter().any(|(x, y)| x != y) {
            out.push(map.into_iter().filter(|(x, y)| x != y).collect());
        }
    }
    out
}

pub fn apply_map(p: &Process, map: &[(Sym, Sym)]) -> Process {
    apply_sigma(p, &|s| {
        map.iter().find(|(x, _)| *x == s).map_or(s, |(_, y)| *y)
    })
}

impl<'a> Game<'a> {
    fn new(kind: BisimKind, env: &'a DefEnv, alpha: &'a Alphabet, cfg: OracleConfig) -> Self {
        let sigmas = if kind.family() == Family::Open {
            all_substitutions(alpha)
        } else {
            Vec::new()
        };
        Game {
            kind,
            env,
            alpha,
            cfg,
            sigmas,
            moves: HashMap::new(),
            taus: HashMap::new(),
        }
    }

    fn strong_steps(&self, p: &Process) -> Result<Vec<(Label, GState)>, OracleError> {
        let mut v = Vec::new();
        match self.kind.family() {
            Family::Barbed => {
                for (a, q) in lts::transitions(p, self.env, Semantics::Early, self.alpha)? {
                    if matches!(a, Action::Tau | Action::Act(_)) {
                        v.push((Label::from_action(a), GState::Proc(q)));
                    }
                }
                for b in lts::barbs(p, self.env)? {
                    v.push((Label::Barb(b), GState::Sink));
                }
            }
            Family::Ground => {
                for (a, q) in lts::inputs_of(p, self.env, self.alpha, self.alpha.fresh)? {
                    v.push((Label::from_action(a), GState::Proc(q)));
                }
            }
            Family::Early | Family::Open => {
                for (a, q) in lts::transitions(p, self.env, Semantics::Early, self.alpha)? {
                    v.push((Label::from_action(a), GState::Proc(q)));
                }
                for s in &self.sigmas {
                    v.push((Label::Subst(s.clone()), GState::Proc(apply_map(p, s))));
                }
            }
            Family::Late => {
                for (a, q) in lts::transitions(p, self.env, Semantics::Late, self.alpha)? {
                    match a {
                        Action::BoundIn(c, x) => v.push((Label::BoundIn(c), GState::Bound(q, x))),
                        _ => v.push((Label::from_action(a), GState::Proc(q))),
                    }
                }
            }
        }
        v.sort();
        v.dedup();
        Ok(v)
    }

    fn moves_of(&mut self, s: &GState) -> Result<Vec<(Label, GState)>, OracleError> {
        if let Some(m) = self.moves.get(s) {
            return Ok(m.clone());
        }
        let m = match s {
            GState::Sink => Vec::new(),
            GState::Bound(p, x) => self
                .alpha
                .names
                .iter()
                .map(|&a| (Label::Inst(a), GState::Proc(substitute(p, *x, a))))
                .collect(),
            GState::Proc(p) => self.strong_steps(p)?,
        };
        if self.moves.len() >= self.cfg.state_limit {
            return Err(OracleError::Truncated(self.cfg.state_limit));
        }
        self.moves.insert(s.clone(), m.clone());
        Ok(m)
    }

    fn tau_closure(&mut self, p: &Process) -> Result<Vec<Process>, OracleError> {
        if let Some(c) = self.taus.get(p) {
            return Ok(c.clone());
        }
        let set =
            lts::tau_closure(p, self.env, self.alpha, self.cfg.state_limit).map_err(
                |e| match e {
                    LtsError::Overflow(n) => OracleError::Truncated(n),
                    e => OracleError::Lts(e),
                },
            )?;
        let v: Vec<Process> = set.into_iter().collect();
        self.taus.insert(p.clone(), v.clone());
        Ok(v)
    }

    /// Defender answers from `t` to an attack labelled `l`.
    fn responses(&mut self, t: &GState, l: &Label) -> Result<Vec<GState>, OracleError> {
        let strong = |this: &mut Self, s: &GState| -> Result<Vec<GState>, OracleError> {
            Ok(this
                .moves_of(s)?
                .into_iter()
                .filter(|(m, _)| m == l)
                .map(|(_, x)| x)
                .collect())
        };
        let p = match t {
            GState::Proc(p) if self.kind.is_weak() => p.clone(),
            _ => return strong(self, t),
        };
        let mut out = BTreeSet::new();
        match l {
            Label::Subst(_) => return strong(self, t),
            Label::Tau => {
                for q in self.tau_closure(&p)? {
                    out.insert(GState::Proc(q));
                }
            }
            _ => {
                for q in self.tau_closure(&p)? {
                    for r in strong(self, &GState::Proc(q))? {
                        match (&r, self.cfg.trailing_taus) {
                            (GState::Proc(rp), true) => {
                                for r2 in self.tau_closure(rp)? {
                                    out.insert(GState::Proc(r2));
                                }
                            }
                            _ => {
                                out.insert(r);
                            }
                        }
                    }
                }
            }
        }
        Ok(out.into_iter().collect())
    }
}

struct Attack {
    side: Side,
    label: Label,
    target: usize,
    responses: Vec<usize>,
}

/// Result of a bisimulation game with typed states, for re-validation.
pub struct GameResult {
    pub kind: BisimKind,
    pub equivalent: bool,
    pub states: Vec<GState>,
    pub pairs: Vec<(usize, usize)>,
    pub alive: Vec<bool>,
    level: Vec<usize>,
    attacks: Vec<Vec<Attack>>,
}

fn intern(states: &mut Vec<GState>, index: &mut HashMap<GState, usize>, s: GState) -> usize {
    if let Some(&i) = index.get(&s) {
        return i;
    }
    states.push(s.clone());
    index.insert(s, states.len() - 1);
    states.len() - 1
}

pub fn play(
    kind: BisimKind,
    p: &Process,
    q: &Process,
    env: &DefEnv,
    alpha: &Alphabet,
    cfg: OracleConfig,
) -> Result<GameResult, OracleError> {
    assert!(
        kind != BisimKind::TRACE,
        "trace equivalence is decided by check_trace"
    );
    if matches!(kind, BisimKind::WGB | BisimKind::SGB) {
        let mut fns = free_names(p);
        fns.extend(free_names(q));
        if let Some(b) = &env.body {
            fns.extend(free_names(b));
        }
        if fns.contains(&alpha.fresh) {
            return Err(OracleError::FreshClash(alpha.fresh.to_string()));
        }
    }
    let mut g = Game::new(kind, env, alpha, cfg);
    let mut states = Vec::new();
    let mut sindex = HashMap::new();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut pindex: HashMap<(usize, usize), usize> = HashMap::new();
    let mut attacks: Vec<Vec<Attack>> = Vec::new();
    let root = (
        intern(&mut states, &mut sindex, GState::Proc(p.clone())),
        intern(&mut states, &mut sindex, GState::Proc(q.clone())),
    );
    pairs.push(root);
    pindex.insert(root, 0);
    let pair_limit = cfg.state_limit.saturating_mul(100);
    let mut i = 0;
    while i < pairs.len() {
        let (a, b) = pairs[i];
        let mut list = Vec::new();
        for side in [Side::Left, Side::Right] {
            let (att, def) = if side == Side::Left { (a, b) } else { (b, a) };
            let att_state = states[att].clone();
            let def_state = states[def].clone();
            for (label, tgt) in g.moves_of(&att_state)? {
                let tgt_id = intern(&mut states, &mut sindex, tgt);
                let mut resp = Vec::new();
                for r in g.responses(&def_state, &label)? {
                    let rid = intern(&mut states, &mut sindex, r);
                    let key = if side == Side::Left {
                        (tgt_id, rid)
                    } else {
                        (rid, tgt_id)
                    };
                    let pid = match pindex.get(&key) {
                        Some(&x) => x,
                        None => {
                            if pairs.len() >= pair_limit {
                                return Err(OracleError::Truncated(cfg.state_limit));
                            }
                            pairs.push(key);
                            pindex.insert(key, pairs.len() - 1);
                            pairs.len() - 1
                        }
                    };
                    resp.push(pid);
                }
                list.push(Attack {
                    side,
                    label,
                    target: tgt_id,
                    responses: resp,
                });
            }
        }
        attacks.push(list);
        i += 1;
        if states.len() > cfg.state_limit {
            return Err(OracleError::Truncated(cfg.state_limit));
        }
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
    Ok(GameResult {
        kind,
        equivalent: alive[0],
        states,
        pairs,
        alive,
        level,
        attacks,
    })
}

impl GameResult {
    pub fn surviving_pairs(&self) -> Vec<(&GState, &GState)> {
        (0..self.pairs.len())
            .filter(|&i| self.alive[i])
            .map(|i| (&self.states[self.pairs[i].0], &self.states[self.pairs[i].1]))
            .collect()
    }

    /// Shortest winning strategy for the attacker, resolved against the
    /// most resilient defender answer at each round.
    pub fn distinguisher(&self) -> Vec<Round> {
        let mut out = Vec::new();
        if self.equivalent {
            return out;
        }
        let mut cur = 0;
        loop {
            let lvl = self.level[cur];
            let mut best: Option<&Attack> = None;
            for at in &self.attacks[cur] {
                if at.responses.iter().all(|&r| self.level[r] < lvl) {
                    let better = match best {
                        None => true,
                        Some(b) => {
                            (
                                at.responses.iter().map(|&r| self.level[r]).max(),
                                &at.label,
                                at.side as u8,
                                &self.states[at.target],
                            ) < (
                                b.responses.iter().map(|&r| self.level[r]).max(),
                                &b.label,
                                b.side as u8,
                                &self.states[b.target],
                            )
                        }
                    };
                    if better {
                        best = Some(at);
                    }
                }
            }
            let at = best.expect("dead pair has a winning attack");
            let def_of = |pid: usize| {
                let (l, r) = self.pairs[pid];
                if at.side == Side::Left {
                    r
                } else {
                    l
                }
            };
            let responses: Vec<String> = at
                .responses
                .iter()
                .map(|&r| self.states[def_of(r)].to_string())
                .collect();
            let next = at.responses.iter().copied().max_by(|&x, &y| {
                self.level[x]
                    .cmp(&self.level[y])
                    .then_with(|| self.states[def_of(y)].cmp(&self.states[def_of(x)]))
            });
            out.push(Round {
                attacker: at.side,
                label: at.label.to_string(),
                attacker_target: self.states[at.target].to_string(),
                responses,
                chosen: next.map(|r| self.states[def_of(r)].to_string()),
            });
            match next {
                Some(r) => cur = r,
                None => break,
            }
        }
        out
    }

    pub fn verdict(&self) -> Verdict {
        let mut witness: Vec<(String, String)> = self
            .surviving_pairs()
            .into_iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        witness.sort();
        if !self.equivalent {
            witness.clear();
        }
        Verdict {
            kind: self.kind,
            equivalent: self.equivalent,
            witness,
            distinguisher: self.distinguisher(),
            stats: Stats {
                states: self.states.len(),
                pairs: self.pairs.len(),
            },
        }
    }
}

/// Re-checks that the surviving pairs form a relation closed under the
/// kind's transfer conditions, recomputing moves from scratch.
pub fn validate_witness(
    res: &GameResult,
    env: &DefEnv,
    alpha: &Alphabet,
    cfg: OracleConfig,
) -> Result<bool, OracleError> {
    let mut g = Game::new(res.kind, env, alpha, cfg);
    let rel: BTreeSet<(&GState, &GState)> = res.surviving_pairs().into_iter().collect();
    for &(a, b) in &rel {
        for (att, def, left) in [(a, b, true), (b, a, false)] {
            for (label, tgt) in g.moves_of(att)? {
                let ok = g.responses(def, &label)?.iter().any(|r| {
                    let key = if left { (&tgt, r) } else { (r, &tgt) };
                    rel.contains(&key)
                });
                if !ok {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Replays a distinguisher from (p, q) and checks the final round leaves
/// the defender without an answer.
pub fn validate_distinguisher(
    kind: BisimKind,
    rounds: &[Round],
    p: &Process,
    q: &Process,
    env: &DefEnv,
    alpha: &Alphabet,
    cfg: OracleConfig,
) -> Result<bool, OracleError> {
    let mut g = Game::new(kind, env, alpha, cfg);
    let (mut l, mut r) = (GState::Proc(p.clone()), GState::Proc(q.clone()));
    for (i, round) in rounds.iter().enumerate() {
        let (att, def) = if round.attacker == Side::Left {
            (&l, &r)
        } else {
            (&r, &l)
        };
        let Some((label, tgt)) = g.moves_of(att)?.into_iter().find(|(lab, t)| {
            lab.to_string() == round.label && t.to_string() == round.attacker_target
        }) else {
            return Ok(false);
        };
        let resp = g.responses(def, &label)?;
        let resp_s: Vec<String> = resp.iter().map(|s| s.to_string()).collect();
        if resp_s != round.responses {
            return Ok(false);
        }
        let last = i + 1 == rounds.len();
        match (&round.chosen, last) {
            (None, true) => return Ok(resp.is_empty()),
            (Some(c), false) => {
                let Some(next) = resp.into_iter().find(|s| s.to_string() == *c) else {
                    return Ok(false);
                };
                if round.attacker == Side::Left {
                    (l, r) = (tgt, next);
                } else {
                    (l, r) = (next, tgt);
                }
            }
            _ => return Ok(false),
        }
    }
    Ok(false)
}

pub fn check(
    kind: BisimKind,
    p: &Process,
    q: &Process,
    env: &DefEnv,
    alpha: &Alphabet,
    cfg: OracleConfig,
) -> Result<Verdict, OracleError> {
    if kind == BisimKind::TRACE {
        return check_trace(p, q, env, alpha, cfg);
    }
    Ok(play(kind, p, q, env, alpha, cfg)?.verdict())
}

/// Strong trace equivalence (tau visible) by joint subset construction.
pub fn check_trace(
    p: &Process,
    q: &Process,
    env: &DefEnv,
    alpha: &Alphabet,
    cfg: OracleConfig,
) -> Result<Verdict, OracleError> {
    let mut cache: HashMap<Process, Vec<(Action, Process)>> = HashMap::new();
    let mut step =
        |set: &BTreeSet<Process>| -> Result<BTreeMap<Action, BTreeSet<Process>>, OracleError> {
            let mut m: BTreeMap<Action, BTreeSet<Process>> = BTreeMap::new();
            for s in set {
                if !cache.contains_key(s) {
                    if cache.len() >= cfg.state_limit {
                        return Err(OracleError::Truncated(cfg.state_limit));
                    }
                    cache.insert(
                        s.clone(),
                        lts::transitions(s, env, Semantics::Early, alpha)?,
                    );
                }
                for (a, t) in &cache[s] {
                    m.entry(*a).or_default().insert(t.clone());
                }
            }
            Ok(m)
        };
    let start = (BTreeSet::from([p.clone()]), BTreeSet::from([q.clone()]));
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([(start, Vec::<Action>::new())]);
    while let Some(((x, y), path)) = queue.pop_front() {
        let mx = step(&x)?;
        let my = step(&y)?;
        let kx: BTreeSet<_> = mx.keys().copied().collect();
        let ky: BTreeSet<_> = my.keys().copied().collect();
        if kx != ky {
            let (side, act) = match kx.difference(&ky).next() {
                Some(a) => (Side::Left, *a),
                None => (Side::Right, *ky.difference(&kx).next().unwrap()),
            };
            let mut rounds: Vec<Round> = path
                .iter()
                .map(|a| Round {
                    attacker: Side::Left,
                    label: a.to_string(),
                    attacker_target: String::new(),
                    responses: vec![],
                    chosen: None,
                })
                .collect();
            rounds.push(Round {
                attacker: side,
                label: act.to_string(),
                attacker_target: String::new(),
                responses: vec![],
                chosen: None,
            });
            return Ok(Verdict {
                kind: BisimKind::TRACE,
                equivalent: false,
                witness: vec![],
                distinguisher: rounds,
                stats: Stats {
                    states: cache.len(),
                    pairs: seen.len(),
                },
            });
        }
        for (a, nx) in mx {
            let ny = my[&a].clone();
            let key = (nx, ny);
            if seen.insert(key.clone()) {
                let mut path2 = path.clone();
                path2.push(a);
                queue.push_back((key, path2));
            }
        }
    }
    let fmt_set = |s: &BTreeSet<Process>| {
        format!(
            "{{{}}}",
            s.iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join("; ")
        )
    };
    let witness = seen.iter().map(|(x, y)| (fmt_set(x), fmt_set(y))).collect();
    Ok(Verdict {
        kind: BisimKind::TRACE,
        equivalent: true,
        witness,
        distinguisher: vec![],
        stats: Stats {
            states: cache.len(),
            pairs: seen.len(),
        },
    })
}

/// Every kind on one pair, with violations of the hierarchy edges.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct HierarchyReport {
    pub verdicts: BTreeMap<BisimKind, bool>,
    /// Edges (weaker, stronger) where the stronger holds but the weaker fails.
    pub violations: Vec<(BisimKind, BisimKind)>,
}

pub fn hierarchy_report(
    p: &Process,
    q: &Process,
    env: &DefEnv,
    alpha: &Alphabet,
    cfg: OracleConfig,
) -> Result<HierarchyReport, OracleError> {
    let mut verdicts = BTreeMap::new();
    for k in BisimKind::BISIMS
        .iter()
        .chain(std::iter::once(&BisimKind::TRACE))
    {
        verdicts.insert(*k, check(*k, p, q, env, alpha, cfg)?.equivalent);
    }
    let violations = hierarchy_violations(&verdicts);
    Ok(HierarchyReport {
        verdicts,
        violations,
    })
}

pub fn hierarchy_violations(verdicts: &BTreeMap<BisimKind, bool>) -> Vec<(BisimKind, BisimKind)> {
    crate::library::hierarchy()
        .edges
        .iter()
        .filter(|(w, s)| verdicts.get(s) == Some(&true) && verdicts.get(w) == Some(&false))
        .copied()
        .collect()
}
