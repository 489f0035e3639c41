//! Check reports: one document per run, emitted as text or JSON.

use crate::corpus::{layer_for, Outcome};
use crate::library;
use crate::oracle::{self, BisimKind, OracleConfig, Round};
use crate::process::{print_with_env, Alphabet, Calculus, DefEnv, Process};
use crate::seed::{self, SeedConfig, SeedRound};
use std::fmt::Write as _;
use std::time::Instant;

pub const SCHEMA: &str = "seedcheck-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Oracle,
    Seed,
    Both,
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "oracle" => Ok(Method::Oracle),
            "seed" => Ok(Method::Seed),
            "both" => Ok(Method::Both),
            _ => Err(format!("unknown method {s:?} (oracle, seed, both)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Inputs {
    pub p: String,
    pub q: String,
    pub alphabet: String,
    pub kind: BisimKind,
    pub method: Method,
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct MethodResult {
    pub outcome: Outcome,
    /// Layer the seed side ran in; empty for the oracle.
    pub layer: String,
    pub states: usize,
    pub pairs: usize,
    /// Corresponding pairs when equivalent (oracle: the bisimulation).
    pub witness: Vec<(String, String)>,
    /// One line per round of a distinguishing play.
    pub distinguisher: Vec<String>,
    /// Seed side: failing pairs as `path | left | right`.
    pub failing: Vec<String>,
    pub millis: Option<u64>,
}

impl MethodResult {
    fn failed(outcome: Outcome, layer: &str) -> MethodResult {
        MethodResult {
            outcome,
            layer: layer.into(),
            states: 0,
            pairs: 0,
            witness: vec![],
            distinguisher: vec![],
            failing: vec![],
            millis: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Report {
    pub schema: String,
    pub inputs: Inputs,
    pub oracle: Option<MethodResult>,
    pub seed: Option<MethodResult>,
    /// Set when both methods ran to a verdict.
    pub agreement: Option<bool>,
    pub exit_code: i32,
}

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("malformed report: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema {0:?}")]
    Schema(String),
}

pub fn render_round(r: &Round) -> String {
    let side = match r.attacker {
        oracle::Side::Left => "left",
        oracle::Side::Right => "right",
    };
    let mut s = format!("{side} plays {}", r.label);
    if !r.attacker_target.is_empty() {
        let _ = write!(s, " to {}", r.attacker_target);
    }
    if r.responses.is_empty() {
        s.push_str("; no answer");
    } else {
        let _ = write!(s, "; answers {{{}}}", r.responses.join("; "));
        if let Some(c) = &r.chosen {
            let _ = write!(s, "; continue with {c}");
        }
    }
    s
}

pub fn render_seed_round(r: &SeedRound) -> String {
    let side = match r.attacker {
        seed::Side::Left => "left",
        seed::Side::Right => "right",
    };
    let mut s = format!("{side} closure {}", r.key);
    if let Some(e) = &r.attacker_element {
        let _ = write!(s, " contains {e}");
    }
    if r.responses.is_empty() {
        s.push_str("; no answer");
    } else {
        let _ = write!(s, "; answers {{{}}}", r.responses.join("; "));
        if let Some(c) = &r.chosen {
            let _ = write!(s, "; continue with {c}");
        }
    }
    s
}

/// Runs the requested method(s). `timing` adds wall-clock milliseconds,
/// which makes reports nondeterministic.
#[allow(clippy::too_many_arguments)]
pub fn run_check(
    kind: BisimKind,
    p: &Process,
    q: &Process,
    env: &DefEnv,
    alpha: &Alphabet,
    calculus: Calculus,
    method: Method,
    ocfg: OracleConfig,
    scfg: SeedConfig,
    timing: bool,
) -> Report {
    let inputs = Inputs {
        p: print_with_env(p, env),
        q: q.to_string(),
        alphabet: alpha.to_string(),
        kind,
        method,
    };
    let oracle = (method != Method::Seed).then(|| {
        let t = Instant::now();
        let mut r = match oracle::check(kind, p, q, env, alpha, ocfg) {
            Ok(v) => MethodResult {
                outcome: if v.equivalent {
                    Outcome::Equivalent
                } else {
                    Outcome::NotEquivalent
                },
                layer: String::new(),
                states: v.stats.states,
                pairs: v.stats.pairs,
                witness: v.witness,
                distinguisher: v.distinguisher.iter().map(render_round).collect(),
                failing: vec![],
                millis: None,
            },
            Err(e) => MethodResult::failed(e.into(), ""),
        };
        r.millis = timing.then(|| t.elapsed().as_millis() as u64);
        r
    });
    let seed = (method != Method::Oracle).then(|| {
        let t = Instant::now();
        let layer = layer_for(kind, calculus);
        let res = library::get_layer(layer, alpha)
            .map_err(seed::SeedError::from)
            .and_then(|sig| seed::seed_check_in(&sig, kind, p, q, env, alpha, scfg));
        let mut r = match res {
            Ok(v) => MethodResult {
                outcome: if v.equivalent {
                    Outcome::Equivalent
                } else {
                    Outcome::NotEquivalent
                },
                layer: layer.into(),
                states: v.states,
                pairs: v.pairs,
                witness: vec![],
                distinguisher: if v.distinguishing_path.is_empty() {
                    v.distinguisher.iter().map(render_seed_round).collect()
                } else {
                    v.distinguishing_path
                        .iter()
                        .map(|k| k.to_string())
                        .collect()
                },
                failing: v
                    .failing
                    .iter()
                    .map(|f| {
                        let path: Vec<String> = f.path.iter().map(|k| k.to_string()).collect();
                        format!("[{}] | {} | {}", path.join(" "), f.left, f.right)
                    })
                    .collect(),
                millis: None,
            },
            Err(e) => MethodResult::failed(e.into(), layer),
        };
        r.millis = timing.then(|| t.elapsed().as_millis() as u64);
        r
    });
    let mut report = Report {
        schema: SCHEMA.into(),
        inputs,
        oracle,
        seed,
        agreement: None,
        exit_code: 0,
    };
    report.agreement = match (
        report.oracle.as_ref().and_then(|r| r.outcome.as_bool()),
        report.seed.as_ref().and_then(|r| r.outcome.as_bool()),
    ) {
        (Some(a), Some(b)) => Some(a == b),
        _ => None,
    };
    report.exit_code = report.compute_exit_code();
    report
}

impl Report {
    /// 0 equivalent, 1 not equivalent, 2 methods disagree, 3 overflow,
    /// 4 input error.
    pub fn compute_exit_code(&self) -> i32 {
        if self.agreement == Some(false) {
            return 2;
        }
        let results: Vec<&MethodResult> = self.oracle.iter().chain(self.seed.iter()).collect();
        if results
            .iter()
            .any(|r| matches!(r.outcome, Outcome::Error(_)))
        {
            return 4;
        }
        if results
            .iter()
            .any(|r| matches!(r.outcome, Outcome::Overflow(_)))
        {
            return 3;
        }
        match results.first().and_then(|r| r.outcome.as_bool()) {
            Some(true) => 0,
            _ => 1,
        }
    }

    pub fn to_machine(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_machine(text: &str) -> Result<Report, ReportError> {
        let r: Report = serde_json::from_str(text)?;
        if r.schema != SCHEMA {
            return Err(ReportError::Schema(r.schema));
        }
        Ok(r)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let i = &self.inputs;
        let _ = writeln!(s, "kind: {}", i.kind);
        let _ = writeln!(s, "alphabet: {}", i.alphabet);
        for (k, v) in [("p", &i.p), ("q", &i.q)] {
            let _ = writeln!(s, "{k}: {}", v.replace('\n', "\n   "));
        }
        for (name, r) in [("oracle", &self.oracle), ("seed", &self.seed)] {
            let Some(r) = r else { continue };
            let verdict = match &r.outcome {
                Outcome::Equivalent => "equivalent".to_string(),
                Outcome::NotEquivalent => "not equivalent".to_string(),
                Outcome::Overflow(m) => format!("overflow ({m})"),
                Outcome::Error(m) => format!("error ({m})"),
            };
            let _ = write!(s, "{name}: {verdict}");
            if !r.layer.is_empty() {
                let _ = write!(s, " in {}", r.layer);
            }
            let _ = write!(s, ", {} states, {} pairs", r.states, r.pairs);
            if let Some(ms) = r.millis {
                let _ = write!(s, ", {ms} ms");
            }
            s.push('\n');
            for d in &r.distinguisher {
                let _ = writeln!(s, "  {d}");
            }
            for f in r.failing.iter().take(8) {
                let _ = writeln!(s, "  failing {f}");
            }
        }
        if let Some(a) = self.agreement {
            let _ = writeln!(s, "agreement: {a}");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::parse_process;

    fn report(kind: BisimKind, p: &str, q: &str) -> Report {
        let alpha = Alphabet::default();
        let (p, env) = parse_process(p, Calculus::ValuePassing, &alpha).unwrap();
        let (q, _) = parse_process(q, Calculus::ValuePassing, &alpha).unwrap();
        run_check(
            kind,
            &p,
            &q,
            &env,
            &alpha,
            Calculus::ValuePassing,
            Method::Both,
            OracleConfig::default(),
            SeedConfig::default(),
            false,
        )
    }

    #[test]
    fn exit_codes_follow_verdicts() {
        let r = report(
            BisimKind::SEB,
            "c?u.d!a.nil + d!a.c?u.nil",
            "c?u.nil | d!a.nil",
        );
        assert_eq!((r.exit_code, r.agreement), (0, Some(true)));
        let r = report(
            BisimKind::SEB,
            "c!u.d!a.nil + c!u.d!b.nil",
            "c!u.(d!a.nil + d!b.nil)",
        );
        assert_eq!((r.exit_code, r.agreement), (1, Some(true)));
    }

    #[test]
    fn machine_form_round_trips() {
        let r = report(BisimKind::WEB, "tau.c!a.nil", "c!a.nil + c!b.nil");
        assert_eq!(Report::from_machine(&r.to_machine()).unwrap(), r);
    }

    #[test]
    fn disagreement_wins_over_other_codes() {
        let mut r = report(BisimKind::SBB, "nil", "nil");
        r.seed.as_mut().unwrap().outcome = Outcome::NotEquivalent;
        r.agreement = Some(false);
        assert_eq!(r.compute_exit_code(), 2);
    }
}
