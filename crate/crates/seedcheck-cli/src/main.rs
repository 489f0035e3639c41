//! `seedcheck`: decide process equivalences by bisimulation games and by
//! seed algebras, and inspect the structures behind both.

use clap::{Args, Parser, Subcommand, ValueEnum};
use seedcheck::adt::{Signature, Sym, Term};
use seedcheck::corpus::{self, CorpusConfig, Summary};
use seedcheck::library;
use seedcheck::lts::{self, Semantics};
use seedcheck::oracle::{BisimKind, OracleConfig};
use seedcheck::process::{parse_process, Alphabet, Calculus, DefEnv, Process};
use seedcheck::report::{self, Method};
use seedcheck::rewrite::{self, Strategy};
use seedcheck::seed::{self, SeedAlgebra, SeedConfig};
use std::process::ExitCode;

const INPUT_ERROR: u8 = 4;

#[derive(Parser)]
#[command(
    name = "seedcheck",
    version,
    about = "Process equivalence by bisimulation games and seed algebras"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// Alphabet, e.g. "names=a,b,u channels=c,d".
    #[arg(long, global = true, default_value = "names=a,b,u channels=c,d")]
    alphabet: String,
    #[arg(long, global = true, default_value_t = lts::DEFAULT_STATE_LIMIT)]
    state_limit: usize,
    /// Rewrite steps allowed per normalization.
    #[arg(long, global = true, default_value_t = rewrite::DEFAULT_FUEL)]
    fuel: u64,
    #[arg(long, global = true, value_enum, default_value_t = SemArg::Early)]
    semantics: SemArg,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Random seed value for corpus generation.
    #[arg(long, global = true, default_value_t = 1)]
    seed_value: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum SemArg {
    Early,
    Late,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Clone, Copy, ValueEnum)]
enum CalcArg {
    Auto,
    Value,
    Basic,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide one kind on a pair of processes.
    Check {
        /// Files holding a process (optionally preceded by `def rp = ...`).
        files: Vec<String>,
        /// Inline process text; give two, or combine with files.
        #[arg(short = 'e', long = "expr")]
        exprs: Vec<String>,
        #[arg(long, default_value = "seb")]
        kind: String,
        #[arg(long, default_value = "both")]
        method: String,
        #[arg(long, value_enum, default_value_t = CalcArg::Auto)]
        calculus: CalcArg,
        /// Include wall-clock timings in the report.
        #[arg(long)]
        timing: bool,
    },
    /// Generate pairs and run every kind by both methods.
    Corpus {
        #[arg(long, default_value_t = 500)]
        pairs: usize,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long, default_value_t = 5)]
        max_prefixes: usize,
        #[arg(long, default_value_t = 0.2)]
        recursion_rate: f64,
        /// Leave out the worked example pairs.
        #[arg(long)]
        no_named: bool,
        /// Print one line per pair.
        #[arg(long)]
        verbose: bool,
    },
    /// Print the reachable transition system of a process.
    Lts {
        files: Vec<String>,
        #[arg(short = 'e', long = "expr")]
        exprs: Vec<String>,
        #[arg(long, value_enum, default_value_t = CalcArg::Auto)]
        calculus: CalcArg,
    },
    /// Print the hidden extension and closure tree of a seed.
    Closures {
        files: Vec<String>,
        #[arg(short = 'e', long = "expr")]
        exprs: Vec<String>,
        #[arg(long, default_value = "process-trans")]
        adt: String,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        /// Name used for the seed in closure expressions.
        #[arg(long, default_value = "q")]
        label: String,
    },
    /// Normalize a term and print its derivation.
    Rewrite {
        term: String,
        #[arg(long, default_value = "process-trans")]
        adt: String,
        /// `name=term`, substituted before rewriting and shown folded.
        #[arg(long)]
        bind: Vec<String>,
        #[arg(long, value_enum, default_value_t = StratArg::Innermost)]
        strategy: StratArg,
        /// Print every step with its axiom.
        #[arg(long)]
        full: bool,
    },
    /// List, print or self-check the bundled layers.
    Adt {
        /// Layer to print in flattened canonical form.
        name: Option<String>,
        /// Run self-checks and layer identity checks.
        #[arg(long)]
        check: bool,
    },
    /// Print the hierarchy graph, or every kind on a pair.
    Hierarchy {
        files: Vec<String>,
        #[arg(short = 'e', long = "expr")]
        exprs: Vec<String>,
        #[arg(long, default_value = "oracle")]
        method: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StratArg {
    Innermost,
    Outermost,
}

#[derive(Debug)]
struct Fail(u8, String);

impl<E: std::fmt::Display> From<E> for Fail {
    fn from(e: E) -> Fail {
        Fail(INPUT_ERROR, e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { INPUT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Fail> {
    let c = cli.common;
    let alpha = Alphabet::parse(&c.alphabet)?;
    let ocfg = OracleConfig {
        state_limit: c.state_limit,
        ..OracleConfig::default()
    };
    let scfg = SeedConfig {
        fuel: c.fuel,
        ..SeedConfig::default()
    };
    match cli.cmd {
        Cmd::Check {
            files,
            exprs,
            kind,
            method,
            calculus,
            timing,
        } => {
            let kind: BisimKind = kind.parse()?;
            let method: Method = method.parse().map_err(|e: String| Fail(INPUT_ERROR, e))?;
            let (procs, env, calc) = read_processes(&files, &exprs, &alpha, calculus, 2)?;
            if calc == Calculus::Basic && !matches!(kind, BisimKind::SEB | BisimKind::TRACE) {
                return Err(Fail(
                    INPUT_ERROR,
                    "basic-calculus processes support only --kind seb or trace".into(),
                ));
            }
            let r = report::run_check(
                kind, &procs[0], &procs[1], &env, &alpha, calc, method, ocfg, scfg, timing,
            );
            emit(c.format, &r.to_text(), &r.to_machine());
            Ok(r.exit_code as u8)
        }
        Cmd::Corpus {
            pairs,
            depth,
            max_prefixes,
            recursion_rate,
            no_named,
            verbose,
        } => {
            let cfg = CorpusConfig {
                pairs,
                max_depth: depth,
                max_prefixes,
                seed_value: c.seed_value,
                recursion_rate,
                alphabet: alpha,
            };
            let mut entries = if no_named {
                Vec::new()
            } else {
                corpus::named_pairs()
            };
            entries.extend(corpus::generate(&cfg));
            let outcomes = corpus::run_all(&entries, ocfg, scfg);
            let summary = Summary::of(&outcomes);
            let mut text = String::new();
            if verbose {
                for o in &outcomes {
                    let marks: Vec<String> = o
                        .kinds
                        .iter()
                        .map(|k| {
                            let m = match (k.oracle.as_bool(), k.disagrees()) {
                                (_, true) => "!",
                                (Some(true), _) => "=",
                                (Some(false), _) => "x",
                                (None, _) => "?",
                            };
                            format!("{}{m}", k.kind)
                        })
                        .collect();
                    text += &format!("{}: {} ~ {}  {}\n", o.label, o.p, o.q, marks.join(" "));
                }
            }
            text += &format!("pairs: {}\n", summary.entries);
            for (k, t) in &summary.per_kind {
                text += &format!(
                    "{k:<5} equivalent {:>4}  not {:>4}  disagree {:>3}  skipped {:>3}\n",
                    t.equivalent, t.not_equivalent, t.disagreements, t.skipped
                );
            }
            for (l, k) in &summary.disagreements {
                text += &format!("DISAGREE {l} {k}\n");
            }
            for (l, w, s) in &summary.hierarchy_violations {
                text += &format!("HIERARCHY {l} {s} holds but {w} fails\n");
            }
            for (l, k) in &summary.unexpected {
                text += &format!("UNEXPECTED {l} {k}\n");
            }
            text += &format!("clean: {}\n", summary.clean());
            emit(c.format, &text, &serde_json::to_string_pretty(&summary)?);
            Ok(if !summary.disagreements.is_empty() {
                2
            } else if summary.clean() {
                0
            } else {
                1
            })
        }
        Cmd::Lts {
            files,
            exprs,
            calculus,
        } => {
            let (procs, env, _) = read_processes(&files, &exprs, &alpha, calculus, 1)?;
            let sem = match c.semantics {
                SemArg::Early => Semantics::Early,
                SemArg::Late => Semantics::Late,
            };
            let space = lts::reachable(&procs[0], &env, sem, &alpha, c.state_limit)?;
            let mut text = String::new();
            for (i, s) in space.states.iter().enumerate() {
                text += &format!("{i}: {s}\n");
            }
            for (i, a, j) in &space.transitions {
                text += &format!("{i} --{a}--> {j}\n");
            }
            if space.truncated {
                text += "truncated\n";
            }
            let machine = serde_json::json!({
                "states": space.states.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
                "transitions": space.transitions.iter().map(|(i, a, j)| (i, a.to_string(), j)).collect::<Vec<_>>(),
                "truncated": space.truncated,
            });
            emit(c.format, &text, &serde_json::to_string_pretty(&machine)?);
            Ok(if space.truncated { 3 } else { 0 })
        }
        Cmd::Closures {
            files,
            exprs,
            adt,
            depth,
            label,
        } => {
            let sig = library::get_layer(&adt, &alpha)?;
            let calc = if sig.op(Sym::new("pre")).is_some() {
                CalcArg::Basic
            } else {
                CalcArg::Value
            };
            let (procs, env, _) = read_processes(&files, &exprs, &alpha, calc, 1)?;
            let s = seed::make_seed(&procs[0], &env, &sig)?;
            let mut alg = SeedAlgebra::for_seed(&sig, &alpha, &s, scfg)?;
            let ext = alg
                .hidden_extension(std::slice::from_ref(&s.term))
                .map_err(overflow)?;
            let tree = alg.closure_tree(&s.term, &label, depth).map_err(overflow)?;
            let mut text = format!(
                "seed: {}\n[{label}] = {{{}}}\n",
                seed::compact(&s.term),
                ext.iter().map(seed::compact).collect::<Vec<_>>().join(", ")
            );
            for l in &tree {
                text += l;
                text.push('\n');
            }
            let machine = serde_json::json!({
                "seed": seed::compact(&s.term),
                "extension": ext.iter().map(seed::compact).collect::<Vec<_>>(),
                "closures": tree,
            });
            emit(c.format, &text, &serde_json::to_string_pretty(&machine)?);
            Ok(0)
        }
        Cmd::Rewrite {
            term,
            adt,
            bind,
            strategy,
            full,
        } => {
            let sig = library::get_layer(&adt, &alpha)?;
            let mut binds = Vec::new();
            for b in &bind {
                let (name, value) = b.split_once('=').ok_or_else(|| {
                    Fail(INPUT_ERROR, format!("--bind expects name=term, got {b:?}"))
                })?;
                let value = sig.parse_term_with(value.trim(), &binds)?;
                binds.push((Sym::new(name.trim()), value));
            }
            let t = sig.parse_term_with(&term, &binds)?;
            let strat = match strategy {
                StratArg::Innermost => Strategy::LeftmostInnermost,
                StratArg::Outermost => Strategy::LeftmostOutermost,
            };
            let chain = rewrite::normalize_with(&t, &sig, c.fuel, strat)
                .map_err(|e| Fail(3, e.to_string()))?;
            let mut lines: Vec<String> = Vec::new();
            if !binds.is_empty() {
                // the input as typed, bound names shown folded
                let named: Vec<(Sym, Term)> = binds
                    .iter()
                    .map(|(n, v)| {
                        (
                            *n,
                            Term::var(*n, seedcheck::adt::well_sorted(v, &sig).unwrap_or(*n)),
                        )
                    })
                    .collect();
                lines.push(sig.parse_term_with(&term, &named)?.to_string());
            }
            if full {
                lines.push(fold(&chain.start, &binds, &sig).to_string());
                for st in &chain.steps {
                    lines.push(format!(
                        "{}    [{}]",
                        fold(&st.after, &binds, &sig),
                        st.axiom_id
                    ));
                }
            } else {
                lines.extend(
                    chain
                        .grouped_lines(&sig)
                        .iter()
                        .map(|l| fold(l, &binds, &sig).to_string()),
                );
            }
            let text: String = lines
                .iter()
                .enumerate()
                .map(|(i, l)| format!("{}{l}\n", if i == 0 { "  " } else { "= " }))
                .collect();
            let machine = serde_json::json!({
                "lines": lines,
                "steps": chain.steps.iter().map(|s| serde_json::json!({"axiom": s.axiom_id, "position": s.position, "after": s.after.to_string()})).collect::<Vec<_>>(),
                "result": chain.result.to_string(),
                "defined": rewrite::is_constructor_term(&chain.result, &sig),
            });
            emit(c.format, &text, &serde_json::to_string_pretty(&machine)?);
            Ok(0)
        }
        Cmd::Adt { name, check } => {
            let mut text = String::new();
            let mut ok = true;
            if let Some(n) = &name {
                text += &library::get_layer(n, &alpha)?.canonical_form();
            } else if !check {
                for n in library::layer_names() {
                    text += n;
                    text.push('\n');
                }
            }
            if check {
                for s in library::self_checks() {
                    ok &= s.problems.is_empty();
                    text += &format!(
                        "self-check {}: {}\n",
                        s.layer,
                        if s.problems.is_empty() {
                            "ok".into()
                        } else {
                            s.problems.join("; ")
                        }
                    );
                }
                for i in library::layer_identity_checks()? {
                    ok &= i.identical;
                    text += &format!(
                        "identity {} = {}: {}\n",
                        i.direct,
                        i.alternative,
                        if i.identical { "identical" } else { "differs" }
                    );
                    for d in &i.differences {
                        text += &format!("  {d}\n");
                    }
                }
            }
            let machine = serde_json::json!({ "text": text, "ok": ok });
            emit(c.format, &text, &serde_json::to_string_pretty(&machine)?);
            Ok(if ok { 0 } else { 1 })
        }
        Cmd::Hierarchy {
            files,
            exprs,
            method,
        } => {
            let g = library::hierarchy();
            if files.is_empty() && exprs.is_empty() {
                let mut text = format!(
                    "nodes: {}\n",
                    g.nodes
                        .iter()
                        .map(|k| k.name())
                        .collect::<Vec<_>>()
                        .join(" ")
                );
                text += &format!("edges: {}\n", g.edges.len());
                for (w, s) in &g.edges {
                    text += &format!("{w} <- {s}\n");
                }
                emit(c.format, &text, &serde_json::to_string_pretty(&g)?);
                return Ok(0);
            }
            let method: Method = method.parse().map_err(|e: String| Fail(INPUT_ERROR, e))?;
            let (procs, env, calc) = read_processes(&files, &exprs, &alpha, CalcArg::Value, 2)?;
            let mut text = String::new();
            let mut verdicts = std::collections::BTreeMap::new();
            let mut code = 0;
            for k in BisimKind::BISIMS.iter().chain([&BisimKind::TRACE]) {
                let r = report::run_check(
                    *k, &procs[0], &procs[1], &env, &alpha, calc, method, ocfg, scfg, false,
                );
                let first = r.oracle.as_ref().or(r.seed.as_ref()).expect("a method ran");
                if let Some(v) = first.outcome.as_bool() {
                    verdicts.insert(*k, v);
                }
                if r.exit_code >= 2 {
                    code = code.max(r.exit_code as u8);
                }
                let verdict = match first.outcome.as_bool() {
                    Some(true) => "equivalent",
                    Some(false) => "not equivalent",
                    None => "unknown",
                };
                let agree = match r.agreement {
                    Some(true) => "  (methods agree)",
                    Some(false) => "  (METHODS DISAGREE)",
                    None => "",
                };
                text += &format!("{:<5} {verdict}{agree}\n", k.name());
            }
            let violations = seedcheck::oracle::hierarchy_violations(&verdicts);
            for (w, s) in &violations {
                text += &format!("violation: {s} holds but {w} fails\n");
            }
            let machine = serde_json::json!({ "verdicts": verdicts, "violations": violations });
            emit(c.format, &text, &serde_json::to_string_pretty(&machine)?);
            Ok(if !violations.is_empty() {
                code.max(1)
            } else {
                code
            })
        }
    }
}

fn overflow(e: seed::SeedError) -> Fail {
    match e {
        seed::SeedError::ExtensionOverflow(_)
        | seed::SeedError::PairOverflow(_)
        | seed::SeedError::Rewrite(_) => Fail(3, e.to_string()),
        _ => Fail(INPUT_ERROR, e.to_string()),
    }
}

fn emit(format: Format, text: &str, machine: &str) {
    match format {
        Format::Text => print!("{text}"),
        Format::Machine => println!("{machine}"),
    }
}

/// Reads `want` processes from files then inline texts. A definition
/// line may appear in any source; all definitions must agree.
fn read_processes(
    files: &[String],
    exprs: &[String],
    alpha: &Alphabet,
    calc: CalcArg,
    want: usize,
) -> Result<(Vec<Process>, DefEnv, Calculus), Fail> {
    let mut sources = Vec::new();
    for f in files {
        sources
            .push(std::fs::read_to_string(f).map_err(|e| Fail(INPUT_ERROR, format!("{f}: {e}")))?);
    }
    sources.extend(exprs.iter().cloned());
    if sources.len() != want {
        return Err(Fail(
            INPUT_ERROR,
            format!("expected {want} process(es), got {}", sources.len()),
        ));
    }
    let calculi: &[Calculus] = match calc {
        CalcArg::Value => &[Calculus::ValuePassing],
        CalcArg::Basic => &[Calculus::Basic],
        CalcArg::Auto => &[Calculus::ValuePassing, Calculus::Basic],
    };
    let mut first_err = None;
    for &cal in calculi {
        // a definition given once applies to every process
        let shared = sources
            .iter()
            .find(|s| s.trim_start().starts_with("def "))
            .and_then(|s| s.trim_start().lines().next());
        let parsed: Result<Vec<(Process, DefEnv)>, _> = sources
            .iter()
            .map(|s| match shared {
                Some(d) if !s.trim_start().starts_with("def ") => {
                    parse_process(&format!("{d}\n{s}"), cal, alpha)
                }
                _ => parse_process(s, cal, alpha),
            })
            .collect();
        match parsed {
            Ok(v) => {
                let env = v[0].1.clone();
                if v.iter().any(|(_, e)| *e != env) {
                    return Err(Fail(
                        INPUT_ERROR,
                        "processes carry different definitions of rp".into(),
                    ));
                }
                return Ok((v.into_iter().map(|(p, _)| p).collect(), env, cal));
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    Err(Fail(
        INPUT_ERROR,
        first_err.expect("at least one calculus tried").to_string(),
    ))
}

/// Shows a bound value by its name where it sits as the origin of a
/// seed configuration.
fn fold(t: &Term, binds: &[(Sym, Term)], sig: &Signature) -> Term {
    if binds.is_empty() || t.args().is_empty() {
        return t.clone();
    }
    let is_seed = sig.seed.is_some() && t.head_op() == sig.seed;
    let args = t
        .args()
        .iter()
        .enumerate()
        .map(|(i, a)| match binds.iter().find(|(_, v)| v == a) {
            Some((n, v)) if is_seed && i == 1 => {
                Term::var(*n, seedcheck::adt::well_sorted(v, sig).unwrap_or(*n))
            }
            _ => fold(a, binds, sig),
        })
        .collect();
    t.with_args(args)
}
