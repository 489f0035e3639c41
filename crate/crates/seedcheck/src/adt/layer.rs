//! Line-oriented layer file format.
//!
//! ```text
//! layer Trans
//! parent Cons
//! hop left: proc -> proc
//! vars x, y, z, p
//! axiom l1: left(sum(x, y)) = x
//! ```

use super::term::{parse_raw, RawTerm};
use super::{Axiom, Guard, Head, Signature, Sym, Term};
use std::collections::HashMap;
use std::fmt;

/// Where the literal arguments of an observable op range.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Domain {
    Channels,
    Names,
    Fresh,
    NamesAndFresh,
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Domain::Channels => "channels",
            Domain::Names => "names",
            Domain::Fresh => "fresh",
            Domain::NamesAndFresh => "names+fresh",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpSpec {
    pub name: String,
    pub arg_sorts: Vec<String>,
    pub result_sort: String,
    pub hidden: bool,
    pub private_flag: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomDecl {
    pub id: String,
    /// `lhs = rhs`, optionally prefixed by `if free(p, n) = false then`.
    pub text: String,
    pub line: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LayerSpec {
    pub name: String,
    pub parent: Option<String>,
    pub added_sorts: Vec<String>,
    pub removed_sorts: Vec<String>,
    pub added_ops: Vec<OpSpec>,
    pub removed_ops: Vec<String>,
    pub added_axioms: Vec<AxiomDecl>,
    pub removed_axioms: Vec<String>,
    pub vars: Vec<String>,
    pub observe: Vec<(String, Vec<Option<Domain>>)>,
    pub reset: Option<String>,
    pub seed: Option<String>,
}

impl LayerSpec {
    /// The same additions and removals placed on a different parent.
    pub fn rebased(&self, name: &str, parent: &str) -> LayerSpec {
        LayerSpec {
            name: name.to_owned(),
            parent: Some(parent.to_owned()),
            ..self.clone()
        }
    }

    /// Concatenates the deltas of two layers (self first).
    pub fn merged(&self, other: &LayerSpec) -> LayerSpec {
        let mut out = self.clone();
        out.added_sorts.extend(other.added_sorts.iter().cloned());
        out.removed_sorts
            .extend(other.removed_sorts.iter().cloned());
        out.added_ops.extend(other.added_ops.iter().cloned());
        out.removed_ops.extend(other.removed_ops.iter().cloned());
        out.added_axioms.extend(other.added_axioms.iter().cloned());
        out.removed_axioms
            .extend(other.removed_axioms.iter().cloned());
        out.vars.extend(other.vars.iter().cloned());
        out.observe.extend(other.observe.iter().cloned());
        if other.reset.is_some() {
            out.reset = other.reset.clone();
        }
        if other.seed.is_some() {
            out.seed = other.seed.clone();
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LayerError {
    #[error("unknown layer {0}")]
    UnknownLayer(String),
    #[error("layer cycle through {0}")]
    Cycle(String),
    #[error("{layer}: cannot remove nonexistent {what}")]
    MissingRemoval { layer: String, what: String },
    #[error("{layer}: conflicting declaration of {op}")]
    Conflict { layer: String, op: String },
    #[error("{layer}: unknown sort {sort}")]
    UnknownSort { layer: String, sort: String },
    #[error("{layer}: duplicate axiom id {id}")]
    DuplicateAxiom { layer: String, id: String },
    #[error("{layer} line {line}: {msg}")]
    Syntax {
        layer: String,
        line: usize,
        msg: String,
    },
    #[error("{layer}: {msg}")]
    Term { layer: String, msg: String },
}

fn split_list(s: &str) -> Vec<String> {
    s.split(',')
        .map(|x| x.trim().to_owned())
        .filter(|x| !x.is_empty())
        .collect()
}

pub fn parse_layer(text: &str) -> Result<LayerSpec, LayerError> {
    let mut spec = LayerSpec::default();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.split(" #").next().unwrap().trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let syntax = |msg: &str| LayerError::Syntax {
            layer: spec.name.clone(),
            line: line_no,
            msg: msg.to_owned(),
        };
        let (removal, body) = match line.strip_prefix("- ") {
            Some(rest) => (true, rest.trim()),
            None => (false, line),
        };
        let (kw, rest) = body.split_once(' ').unwrap_or((body, ""));
        let rest = rest.trim();
        match (removal, kw) {
            (false, "layer") => spec.name = rest.to_owned(),
            (false, "parent") => spec.parent = Some(rest.to_owned()),
            (false, "sort") => spec.added_sorts.extend(split_list(rest)),
            (true, "sort") => spec.removed_sorts.extend(split_list(rest)),
            (true, "op") | (true, "hop") => spec.removed_ops.extend(split_list(rest)),
            (true, "axiom") => spec.removed_axioms.extend(split_list(rest)),
            (false, "vars") => spec.vars.extend(split_list(rest)),
            (false, "reset") => spec.reset = Some(rest.to_owned()),
            (false, "seed") => spec.seed = Some(rest.to_owned()),
            (false, "observe") => {
                let open = rest
                    .find('(')
                    .ok_or_else(|| syntax("observe needs op(...)"))?;
                let op = rest[..open].trim().to_owned();
                let inner = rest[open + 1..]
                    .trim_end()
                    .strip_suffix(')')
                    .ok_or_else(|| syntax("missing ')'"))?;
                let mut doms = Vec::new();
                for d in split_list(inner) {
                    doms.push(match d.as_str() {
                        "_" => None,
                        "channels" => Some(Domain::Channels),
                        "names" => Some(Domain::Names),
                        "fresh" => Some(Domain::Fresh),
                        "names+fresh" => Some(Domain::NamesAndFresh),
                        other => return Err(syntax(&format!("unknown domain {other}"))),
                    });
                }
                spec.observe.push((op, doms));
            }
            (false, "op") | (false, "hop") | (false, "private") => {
                let (private_flag, kw2, rest2) = if kw == "private" {
                    let (k, r) = rest
                        .split_once(' ')
                        .ok_or_else(|| syntax("private needs op or hop"))?;
                    (true, k, r.trim())
                } else {
                    (false, kw, rest)
                };
                let hidden = match kw2 {
                    "op" => false,
                    "hop" => true,
                    _ => return Err(syntax("expected op or hop")),
                };
                // names may contain `()`, so split at the last ':' before '->'
                let arrow = rest2.find("->").ok_or_else(|| syntax("missing '->'"))?;
                let colon = rest2[..arrow]
                    .rfind(':')
                    .ok_or_else(|| syntax("missing ':'"))?;
                let names = split_list(&rest2[..colon]);
                let args = split_list(&rest2[colon + 1..arrow]);
                let result = rest2[arrow + 2..].trim().to_owned();
                if names.is_empty() || result.is_empty() {
                    return Err(syntax("empty op declaration"));
                }
                for n in names {
                    spec.added_ops.push(OpSpec {
                        name: n,
                        arg_sorts: args.clone(),
                        result_sort: result.clone(),
                        hidden,
                        private_flag,
                    });
                }
            }
            (false, "axiom") => {
                let (id, eq) = rest
                    .split_once(':')
                    .ok_or_else(|| syntax("axiom needs 'id:'"))?;
                spec.added_axioms.push(AxiomDecl {
                    id: id.trim().to_owned(),
                    text: eq.trim().to_owned(),
                    line: line_no,
                });
            }
            _ => return Err(syntax(&format!("unknown directive {kw}"))),
        }
    }
    if spec.name.is_empty() {
        return Err(LayerError::Syntax {
            layer: String::new(),
            line: 0,
            msg: "missing layer name".into(),
        });
    }
    Ok(spec)
}

/// Resolves an axiom against the signature it is added to, inferring
/// variable sorts from their lhs positions.
pub(crate) fn resolve_axiom(decl: &AxiomDecl, sig: &Signature) -> Result<Axiom, LayerError> {
    let err = |msg: String| LayerError::Syntax {
        layer: sig.name.clone(),
        line: decl.line,
        msg: format!("axiom {}: {msg}", decl.id),
    };
    let (guard_src, eq_src) = match decl.text.strip_prefix("if ") {
        Some(rest) => {
            let (g, e) = rest
                .split_once(" then ")
                .ok_or_else(|| err("guard needs 'then'".into()))?;
            (Some(g.trim()), e.trim())
        }
        None => (None, decl.text.as_str()),
    };
    let (l, r) = eq_src
        .split_once(" = ")
        .ok_or_else(|| err("expected 'lhs = rhs'".into()))?;
    let lraw = parse_raw(l).map_err(|e| err(e.to_string()))?;
    let rraw = parse_raw(r).map_err(|e| err(e.to_string()))?;
    let mut env: HashMap<String, Sym> = HashMap::new();
    let lhs = typed(&lraw, None, sig, &mut env, true).map_err(err)?;
    if lhs.is_var() {
        return Err(err("lhs must be an application".into()));
    }
    let lhs_sort = super::well_sorted(&lhs, sig).map_err(|e| err(e.to_string()))?;
    let rhs = typed(&rraw, Some(lhs_sort), sig, &mut env, false).map_err(err)?;
    let rhs_sort = super::well_sorted(&rhs, sig).map_err(|e| err(e.to_string()))?;
    if lhs_sort != rhs_sort {
        return Err(err(format!(
            "lhs sort {lhs_sort} differs from rhs sort {rhs_sort}"
        )));
    }
    let guard = match guard_src {
        None => None,
        Some(g) => {
            let (call, val) = g
                .split_once('=')
                .ok_or_else(|| err("guard needs '= false'".into()))?;
            let expect = match val.trim() {
                "false" => false,
                "true" => true,
                v => return Err(err(format!("bad guard value {v}"))),
            };
            let craw = parse_raw(call.trim()).map_err(|e| err(e.to_string()))?;
            if craw.name != "free" || craw.args.len() != 2 {
                return Err(err("only free(process, name) guards are supported".into()));
            }
            let process =
                typed(&craw.args[0], Some(Sym::new("proc")), sig, &mut env, false).map_err(err)?;
            let name =
                typed(&craw.args[1], Some(Sym::new("name")), sig, &mut env, false).map_err(err)?;
            Some(Guard {
                process,
                name,
                expect,
            })
        }
    };
    Ok(Axiom {
        id: decl.id.clone(),
        lhs,
        rhs,
        guard,
    })
}

fn typed(
    raw: &RawTerm,
    expected: Option<Sym>,
    sig: &Signature,
    env: &mut HashMap<String, Sym>,
    binding: bool,
) -> Result<Term, String> {
    let sym = Sym::new(&raw.name);
    if raw.args.is_empty() && sig.vars.contains(&sym) {
        let sort = match (env.get(&raw.name), expected) {
            (Some(&s), Some(e)) if s != e => {
                return Err(format!("variable {} used at sorts {s} and {e}", raw.name))
            }
            (Some(&s), _) => s,
            (None, Some(e)) if binding => {
                env.insert(raw.name.clone(), e);
                e
            }
            (None, _) if !binding => {
                return Err(format!("variable {} does not occur in the lhs", raw.name))
            }
            (None, None) => return Err(format!("cannot infer sort of {}", raw.name)),
            (None, Some(_)) => unreachable!(),
        };
        return Ok(Term::var(sym, sort));
    }
    let decl = sig
        .op(sym)
        .ok_or_else(|| format!("unknown operation {}", raw.name))?;
    if decl.arity() != raw.args.len() {
        return Err(format!("{} expects {} arguments", raw.name, decl.arity()));
    }
    let arg_sorts = decl.arg_sorts.clone();
    let mut args = Vec::new();
    for (a, s) in raw.args.iter().zip(arg_sorts) {
        args.push(typed(a, Some(s), sig, env, binding)?);
    }
    let t = Term::app(sym, args);
    debug_assert!(matches!(t.head(), Head::Op(_)));
    Ok(t)
}
