//! Seeded process-pair generator and the cross-method runner.

use crate::adt::{Signature, Sym};
use crate::library;
use crate::oracle::{self, BisimKind, OracleConfig, OracleError};
use crate::process::{parse_process, substitute, Alphabet, Calculus, DefEnv, Process};
use crate::seed::{self, SeedConfig, SeedError};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, HashMap};

#[derive(Clone, Debug)]
pub struct CorpusConfig {
    pub pairs: usize,
    pub max_depth: usize,
    /// Upper bound on prefixes per process.
    pub max_prefixes: usize,
    pub seed_value: u64,
    /// Chance that a pair shares a guarded recursive definition.
    pub recursion_rate: f64,
    pub alphabet: Alphabet,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            pairs: 500,
            max_depth: 4,
            max_prefixes: 5,
            seed_value: 1,
            recursion_rate: 0.2,
            alphabet: Alphabet::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub label: String,
    pub p: Process,
    pub q: Process,
    pub env: DefEnv,
    pub alpha: Alphabet,
    pub calculus: Calculus,
    /// Outcomes the entry is known to have.
    pub expected: BTreeMap<BisimKind, bool>,
}

impl CorpusEntry {
    fn named(
        label: &str,
        alpha: &str,
        calculus: Calculus,
        p: &str,
        q: &str,
        expected: &[(BisimKind, bool)],
    ) -> CorpusEntry {
        let alpha = Alphabet::parse(alpha).expect("valid alphabet");
        let (p, env) = parse_process(p, calculus, &alpha).expect("valid process");
        let (q, _) = parse_process(q, calculus, &alpha).expect("valid process");
        CorpusEntry {
            label: label.into(),
            p,
            q,
            env,
            alpha,
            calculus,
            expected: expected.iter().copied().collect(),
        }
    }

    /// Kinds this entry is checked under.
    pub fn kinds(&self) -> Vec<BisimKind> {
        match self.calculus {
            Calculus::Basic => vec![BisimKind::SEB, BisimKind::TRACE],
            Calculus::ValuePassing => BisimKind::BISIMS
                .iter()
                .copied()
                .chain([BisimKind::TRACE])
                .collect(),
        }
    }
}

/// Layer deciding `kind` for a calculus; basic-calculus pairs live in Trans.
pub fn layer_for(kind: BisimKind, calculus: Calculus) -> &'static str {
    match calculus {
        Calculus::Basic => "Trans",
        Calculus::ValuePassing => library::kind_of_layer(kind),
    }
}

/// The worked example pairs with their stated outcomes.
pub fn named_pairs() -> Vec<CorpusEntry> {
    use BisimKind::*;
    let vp = Calculus::ValuePassing;
    vec![
        CorpusEntry::named(
            "sum-vs-interleaving-basic",
            "names=a,b channels=c",
            Calculus::Basic,
            "a.b.nil + b.a.nil + a.b.nil",
            "a.nil | b.nil",
            &[(TRACE, true), (SEB, true)],
        ),
        CorpusEntry::named(
            "input-output-interleaving",
            "names=a,b,u channels=c,d",
            vp,
            "c?u.d!a.nil + d!a.c?u.nil",
            "c?u.nil | d!a.nil",
            &[(SEB, true), (TRACE, true)],
        ),
        CorpusEntry::named(
            "late-choice",
            "names=a,b,u channels=c,d",
            vp,
            "c!u.d!a.nil + c!u.d!b.nil",
            "c!u.(d!a.nil + d!b.nil)",
            &[(TRACE, true), (SEB, false)],
        ),
        CorpusEntry::named(
            "silent-step-before-communication",
            "names=a,y,z channels=c",
            vp,
            "tau.(c!z.nil | c?y.nil)",
            "c!z.nil | c?y.nil",
            &[(WBB, true)],
        ),
        CorpusEntry::named(
            "silent-choice",
            "names=a channels=x,y",
            vp,
            "tau.x!a.nil + y!a.nil",
            "x!a.nil + y!a.nil",
            &[(WBB, false)],
        ),
        CorpusEntry::named(
            "double-silent-step",
            "names=a channels=c",
            vp,
            "tau.tau.nil",
            "tau.tau.nil",
            &[(SBB, true)],
        ),
        CorpusEntry::named(
            "silent-prefix-output",
            "names=a channels=x",
            vp,
            "tau.x!a.nil",
            "x!a.nil",
            &[(WGB, true)],
        ),
        CorpusEntry::named(
            "nil-vs-nil-sum",
            "names=a,b,u channels=c,d",
            vp,
            "nil",
            "nil + nil",
            &BisimKind::BISIMS.map(|k| (k, true)),
        ),
    ]
}

struct Gen<'a> {
    rng: ChaCha8Rng,
    cfg: &'a CorpusConfig,
}

impl Gen<'_> {
    fn name(&mut self) -> Sym {
        *self.cfg.alphabet.names.choose(&mut self.rng).unwrap()
    }

    fn chan(&mut self) -> Sym {
        *self.cfg.alphabet.channels.choose(&mut self.rng).unwrap()
    }

    /// Random process; `rec` allows rp under at least one prefix, and
    /// `par` allows parallel composition.
    fn process(&mut self, depth: usize, budget: &mut usize, rec: bool, par: bool) -> Process {
        if depth == 0 || *budget == 0 {
            return if rec && self.rng.gen_bool(0.3) {
                Process::Rec
            } else {
                Process::Nil
            };
        }
        match self.rng.gen_range(0..10) {
            0 => Process::Nil,
            1 if rec => Process::Rec,
            2 | 3 => {
                let a = self.process(depth, budget, rec, par);
                let b = self.process(depth, budget, rec, par);
                Process::sum(a, b)
            }
            4 if par => {
                let a = self.process(depth, budget, rec, false);
                let b = self.process(depth, budget, rec, false);
                Process::compo(a, b)
            }
            _ => {
                *budget -= 1;
                self.prefix(depth, budget, rec, par)
            }
        }
    }

    fn prefix(&mut self, depth: usize, budget: &mut usize, rec: bool, par: bool) -> Process {
        let kind = self.rng.gen_range(0..5);
        let c = self.chan();
        let x = self.name();
        let cont = self.process(depth - 1, budget, rec, par);
        match kind {
            0 => Process::tau(cont),
            1 | 2 => Process::Input(c, x, Box::new(cont)),
            _ => Process::Output(c, x, Box::new(cont)),
        }
    }

    /// Body of a guarded definition: rp only under a prefix, never under `|`.
    fn body(&mut self) -> Process {
        let mut budget = 3;
        let p = self.prefix(2, &mut budget, true, false);
        if self.rng.gen_bool(0.5) {
            let mut budget = 2;
            Process::sum(p, self.prefix(2, &mut budget, true, false))
        } else {
            p
        }
    }

    fn fresh(&mut self, rec: bool) -> Process {
        let mut budget = self.cfg.max_prefixes;
        self.process(self.cfg.max_depth, &mut budget, rec, true)
    }
}

/// Behaviour-preserving or near-miss rewrites of a random subterm.
fn mutate(p: &Process, rng: &mut ChaCha8Rng, alpha: &Alphabet, preserving: bool) -> Process {
    let n = size(p);
    let target = rng.gen_range(0..n);
    let mut counter = 0;
    let op = |q: &Process, rng: &mut ChaCha8Rng| -> Process {
        if preserving {
            match (rng.gen_range(0..6), q) {
                (0, Process::Sum(a, b)) => Process::Sum(b.clone(), a.clone()),
                (1, Process::Compo(a, b)) => Process::Compo(b.clone(), a.clone()),
                (2, _) => Process::sum(q.clone(), Process::Nil),
                (3, _) => Process::sum(q.clone(), q.clone()),
                (4, _) => Process::tau(q.clone()),
                (_, Process::Input(c, x, k)) => {
                    let y = *alpha.names.choose(rng).unwrap();
                    if crate::process::free_names(k).contains(&y) && y != *x {
                        q.clone()
                    } else {
                        Process::Input(*c, y, Box::new(substitute(k, *x, y)))
                    }
                }
                _ => Process::tau(q.clone()),
            }
        } else {
            match (rng.gen_range(0..4), q) {
                (0, Process::Output(c, _, k)) => {
                    Process::Output(*c, *alpha.names.choose(rng).unwrap(), k.clone())
                }
                (1, Process::Sum(a, _)) => (**a).clone(),
                (2, Process::Input(_, x, k)) => {
                    Process::Input(*alpha.channels.choose(rng).unwrap(), *x, k.clone())
                }
                (_, Process::Tau(k)) => (**k).clone(),
                _ => Process::sum(
                    q.clone(),
                    Process::Output(
                        *alpha.channels.choose(rng).unwrap(),
                        *alpha.names.choose(rng).unwrap(),
                        Box::new(Process::Nil),
                    ),
                ),
            }
        }
    };
    rewrite_at(p, target, &mut counter, &mut |q| op(q, rng))
}

fn size(p: &Process) -> usize {
    match p {
        Process::Nil | Process::Rec => 1,
        Process::Tau(k)
        | Process::Input(_, _, k)
        | Process::Output(_, _, k)
        | Process::Act(_, k) => 1 + size(k),
        Process::Sum(a, b) | Process::Compo(a, b) => 1 + size(a) + size(b),
    }
}

fn rewrite_at(
    p: &Process,
    target: usize,
    counter: &mut usize,
    f: &mut dyn FnMut(&Process) -> Process,
) -> Process {
    let here = *counter;
    *counter += 1;
    if here == target {
        return f(p);
    }
    let mut go = |k: &Process| rewrite_at(k, target, counter, f);
    match p {
        Process::Nil | Process::Rec => p.clone(),
        Process::Tau(k) => Process::tau(go(k)),
        Process::Input(c, x, k) => Process::Input(*c, *x, Box::new(go(k))),
        Process::Output(c, x, k) => Process::Output(*c, *x, Box::new(go(k))),
        Process::Act(x, k) => Process::Act(*x, Box::new(go(k))),
        Process::Sum(a, b) => {
            let a = go(a);
            Process::sum(a, go(b))
        }
        Process::Compo(a, b) => {
            let a = go(a);
            Process::compo(a, go(b))
        }
    }
}

/// Deterministic corpus for the configuration; pairs are a mix of
/// independent draws, behaviour-preserving rewrites and near misses.
pub fn generate(cfg: &CorpusConfig) -> Vec<CorpusEntry> {
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(cfg.seed_value),
        cfg,
    };
    let mut out = Vec::with_capacity(cfg.pairs);
    for i in 0..cfg.pairs {
        let rec = g.rng.gen_bool(cfg.recursion_rate);
        let env = DefEnv {
            body: rec.then(|| g.body()),
        };
        let p = g.fresh(rec);
        let q = match i % 4 {
            0 => g.fresh(rec),
            k => {
                let preserving = k != 3;
                (0..8)
                    .map(|_| mutate(&p, &mut g.rng, &cfg.alphabet, preserving))
                    .find(|q| q.prefix_depth() <= cfg.max_depth)
                    .unwrap_or_else(|| Process::sum(p.clone(), Process::Nil))
            }
        };
        out.push(CorpusEntry {
            label: format!("gen-{i}"),
            p,
            q,
            env,
            alpha: cfg.alphabet.clone(),
            calculus: Calculus::ValuePassing,
            expected: BTreeMap::new(),
        });
    }
    out
}

/// Every process of a corpus, each with its definition.
pub fn states(entries: &[CorpusEntry]) -> Vec<(Process, DefEnv)> {
    let mut v = Vec::new();
    for e in entries {
        v.push((e.p.clone(), e.env.clone()));
        v.push((e.q.clone(), e.env.clone()));
    }
    v
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Outcome {
    Equivalent,
    NotEquivalent,
    Overflow(String),
    Error(String),
}

impl Outcome {
    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Outcome::Equivalent => Some(true),
            Outcome::NotEquivalent => Some(false),
            _ => None,
        }
    }

    fn from_bool(b: bool) -> Outcome {
        if b {
            Outcome::Equivalent
        } else {
            Outcome::NotEquivalent
        }
    }
}

impl From<OracleError> for Outcome {
    fn from(e: OracleError) -> Outcome {
        match e {
            OracleError::Truncated(_) | OracleError::Lts(crate::lts::LtsError::Overflow(_)) => {
                Outcome::Overflow(e.to_string())
            }
            _ => Outcome::Error(e.to_string()),
        }
    }
}

impl From<SeedError> for Outcome {
    fn from(e: SeedError) -> Outcome {
        match e {
            SeedError::ExtensionOverflow(_)
            | SeedError::PairOverflow(_)
            | SeedError::Rewrite(crate::rewrite::RewriteError::FuelExhausted { .. }) => {
                Outcome::Overflow(e.to_string())
            }
            _ => Outcome::Error(e.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct KindOutcome {
    pub kind: BisimKind,
    pub oracle: Outcome,
    pub seed: Outcome,
}

impl KindOutcome {
    /// Both methods finished and differ.
    pub fn disagrees(&self) -> bool {
        matches!((self.oracle.as_bool(), self.seed.as_bool()), (Some(a), Some(b)) if a != b)
    }

    pub fn skipped(&self) -> bool {
        self.oracle.as_bool().is_none() || self.seed.as_bool().is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct EntryOutcome {
    pub label: String,
    pub p: String,
    pub q: String,
    pub kinds: Vec<KindOutcome>,
    /// Expected outcomes that were contradicted.
    pub unexpected: Vec<BisimKind>,
}

/// Flattened layers per (layer, alphabet), built once per runner.
#[derive(Default)]
pub struct LayerCache {
    sigs: HashMap<(String, String), Signature>,
}

impl LayerCache {
    pub fn get(&mut self, layer: &str, alpha: &Alphabet) -> Result<&Signature, SeedError> {
        let key = (layer.to_owned(), alpha.to_string());
        if !self.sigs.contains_key(&key) {
            let sig = library::get_layer(layer, alpha)?;
            self.sigs.insert(key.clone(), sig);
        }
        Ok(&self.sigs[&key])
    }
}

pub fn oracle_outcome(kind: BisimKind, e: &CorpusEntry, cfg: OracleConfig) -> Outcome {
    match oracle::check(kind, &e.p, &e.q, &e.env, &e.alpha, cfg) {
        Ok(v) => Outcome::from_bool(v.equivalent),
        Err(err) => err.into(),
    }
}

pub fn seed_outcome(
    kind: BisimKind,
    e: &CorpusEntry,
    cache: &mut LayerCache,
    cfg: SeedConfig,
) -> Outcome {
    let sig = match cache.get(layer_for(kind, e.calculus), &e.alpha) {
        Ok(s) => s,
        Err(err) => return err.into(),
    };
    match seed::seed_check_in(sig, kind, &e.p, &e.q, &e.env, &e.alpha, cfg) {
        Ok(v) => Outcome::from_bool(v.equivalent),
        Err(err) => err.into(),
    }
}

pub fn run_entry(
    e: &CorpusEntry,
    cache: &mut LayerCache,
    ocfg: OracleConfig,
    scfg: SeedConfig,
) -> EntryOutcome {
    let kinds: Vec<KindOutcome> = e
        .kinds()
        .into_iter()
        .map(|kind| KindOutcome {
            kind,
            oracle: oracle_outcome(kind, e, ocfg),
            seed: seed_outcome(kind, e, cache, scfg),
        })
        .collect();
    let unexpected = e
        .expected
        .iter()
        .filter(|(k, want)| {
            kinds.iter().any(|o| {
                o.kind == **k
                    && (o.oracle.as_bool() != Some(**want) || o.seed.as_bool() != Some(**want))
            })
        })
        .map(|(k, _)| *k)
        .collect();
    EntryOutcome {
        label: e.label.clone(),
        p: e.p.to_string(),
        q: e.q.to_string(),
        kinds,
        unexpected,
    }
}

/// Runs entries on worker threads; results come back in input order.
pub fn run_all(entries: &[CorpusEntry], ocfg: OracleConfig, scfg: SeedConfig) -> Vec<EntryOutcome> {
    let workers = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(entries.len().max(1));
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut results: Vec<Option<EntryOutcome>> = vec![None; entries.len()];
    let collected = std::sync::Mutex::new(Vec::new());
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| {
                let mut cache = LayerCache::default();
                let mut local = Vec::new();
                loop {
                    let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                    if i >= entries.len() {
                        break;
                    }
                    local.push((i, run_entry(&entries[i], &mut cache, ocfg, scfg)));
                }
                collected.lock().unwrap().extend(local);
            });
        }
    });
    for (i, r) in collected.into_inner().unwrap() {
        results[i] = Some(r);
    }
    results
        .into_iter()
        .map(|r| r.expect("every entry ran"))
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct KindTally {
    pub equivalent: usize,
    pub not_equivalent: usize,
    pub disagreements: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Summary {
    pub entries: usize,
    pub per_kind: BTreeMap<BisimKind, KindTally>,
    pub disagreements: Vec<(String, BisimKind)>,
    pub hierarchy_violations: Vec<(String, BisimKind, BisimKind)>,
    pub unexpected: Vec<(String, BisimKind)>,
}

impl Summary {
    pub fn of(outcomes: &[EntryOutcome]) -> Summary {
        let mut s = Summary {
            entries: outcomes.len(),
            ..Summary::default()
        };
        for o in outcomes {
            let mut verdicts = BTreeMap::new();
            for k in &o.kinds {
                let t = s.per_kind.entry(k.kind).or_default();
                if k.skipped() {
                    t.skipped += 1;
                    continue;
                }
                if k.disagrees() {
                    t.disagreements += 1;
                    s.disagreements.push((o.label.clone(), k.kind));
                } else if k.oracle == Outcome::Equivalent {
                    t.equivalent += 1;
                } else {
                    t.not_equivalent += 1;
                }
                if let Some(v) = k.oracle.as_bool() {
                    verdicts.insert(k.kind, v);
                }
            }
            for (w, st) in oracle::hierarchy_violations(&verdicts) {
                s.hierarchy_violations.push((o.label.clone(), w, st));
            }
            for k in &o.unexpected {
                s.unexpected.push((o.label.clone(), *k));
            }
        }
        s
    }

    pub fn clean(&self) -> bool {
        self.disagreements.is_empty()
            && self.hierarchy_violations.is_empty()
            && self.unexpected.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic() {
        let cfg = CorpusConfig {
            pairs: 40,
            ..CorpusConfig::default()
        };
        let a: Vec<String> = generate(&cfg)
            .iter()
            .map(|e| format!("{} ~ {}", e.p, e.q))
            .collect();
        let b: Vec<String> = generate(&cfg)
            .iter()
            .map(|e| format!("{} ~ {}", e.p, e.q))
            .collect();
        assert_eq!(a, b);
    }

    #[test]
    fn generated_processes_respect_bounds() {
        let cfg = CorpusConfig {
            pairs: 200,
            ..CorpusConfig::default()
        };
        for e in generate(&cfg) {
            for p in [&e.p, &e.q] {
                assert!(p.prefix_depth() <= cfg.max_depth, "{p}");
                assert!(p.all_channels().len() <= 2);
                assert!(p.all_names().len() <= 3);
            }
            if let Some(b) = &e.env.body {
                assert!(!b.has_unguarded_rec());
            }
        }
    }
}
