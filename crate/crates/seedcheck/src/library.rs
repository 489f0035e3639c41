//! Bundled layer catalog, the bisimulation hierarchy and layer identities.

use crate::adt::{
    apply_layer, flatten_layer, parse_layer, LayerError, LayerSpec, Library, Signature, Sym,
};
use crate::oracle::BisimKind;
use crate::process::Alphabet;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

const SOURCES: &[&str] = &[
    include_str!("../layers/simple-construct.layer"),
    include_str!("../layers/simple-process-algebra.layer"),
    include_str!("../layers/first.layer"),
    include_str!("../layers/second.layer"),
    include_str!("../layers/water-fire.layer"),
    include_str!("../layers/cons.layer"),
    include_str!("../layers/trans.layer"),
    include_str!("../layers/trans-example.layer"),
    include_str!("../layers/process-cons.layer"),
    include_str!("../layers/process-trans.layer"),
    include_str!("../layers/wbb.layer"),
    include_str!("../layers/sbb.layer"),
    include_str!("../layers/wgb-prime.layer"),
    include_str!("../layers/web.layer"),
    include_str!("../layers/wlb.layer"),
    include_str!("../layers/wob.layer"),
    include_str!("../layers/sgb.layer"),
    include_str!("../layers/seb.layer"),
    include_str!("../layers/slb.layer"),
    include_str!("../layers/sob.layer"),
];

/// The bundled layers, parsed once.
pub fn catalog() -> &'static Library {
    static CATALOG: OnceLock<Library> = OnceLock::new();
    CATALOG.get_or_init(|| {
        SOURCES
            .iter()
            .map(|src| {
                let spec = parse_layer(src).expect("bundled layer parses");
                (spec.name.clone(), spec)
            })
            .collect()
    })
}

pub fn layer_names() -> Vec<&'static str> {
    catalog().keys().map(String::as_str).collect()
}

/// Catalog key for a case-insensitive name; `WGB` also finds `WGB'`.
pub fn resolve_name(name: &str) -> Option<&'static str> {
    let lib = catalog();
    lib.keys()
        .find(|k| k.eq_ignore_ascii_case(name))
        .or_else(|| {
            lib.keys().find(|k| {
                k.trim_end_matches('\'')
                    .eq_ignore_ascii_case(name.trim_end_matches('\''))
            })
        })
        .or_else(|| {
            lib.keys()
                .find(|k| k.replace('\'', "-prime").eq_ignore_ascii_case(name))
        })
        .map(String::as_str)
}

/// Flattened layer with the alphabet's names and channels declared as
/// constants wherever the layer has the matching sort.
pub fn get_layer(name: &str, alpha: &Alphabet) -> Result<Signature, LayerError> {
    let key = resolve_name(name).ok_or_else(|| LayerError::UnknownLayer(name.to_owned()))?;
    let mut sig = flatten_layer(key, catalog())?;
    add_alphabet(&mut sig, alpha)?;
    Ok(sig)
}

fn add_alphabet(sig: &mut Signature, alpha: &Alphabet) -> Result<(), LayerError> {
    let name = Sym::new("name");
    let chan = Sym::new("chan");
    if sig.sorts.contains(&name) {
        for &n in alpha.names.iter().chain(std::iter::once(&alpha.fresh)) {
            sig.add_literal(n, name)?;
        }
    }
    if sig.sorts.contains(&chan) {
        for &c in &alpha.channels {
            sig.add_literal(c, chan)?;
        }
    }
    Ok(())
}

/// Layer whose seed algebras decide `kind`.
pub fn kind_of_layer(kind: BisimKind) -> &'static str {
    match kind {
        BisimKind::WBB => "WBB",
        BisimKind::SBB => "SBB",
        BisimKind::WGB => "WGB'",
        BisimKind::WEB => "WEB",
        BisimKind::WLB => "WLB",
        BisimKind::WOB => "WOB",
        BisimKind::SGB => "SGB",
        BisimKind::SEB => "SEB",
        BisimKind::SLB => "SLB",
        BisimKind::SOB => "SOB",
        BisimKind::TRACE => "Process-Trans",
    }
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct HierarchyGraph {
    pub nodes: Vec<BisimKind>,
    /// (weaker, stronger)
    pub edges: Vec<(BisimKind, BisimKind)>,
}

impl HierarchyGraph {
    pub fn is_acyclic(&self) -> bool {
        let mut indeg: BTreeMap<BisimKind, usize> = self.nodes.iter().map(|n| (*n, 0)).collect();
        for (_, s) in &self.edges {
            *indeg.get_mut(s).unwrap() += 1;
        }
        let mut ready: Vec<_> = indeg
            .iter()
            .filter(|(_, d)| **d == 0)
            .map(|(n, _)| *n)
            .collect();
        let mut seen = 0;
        while let Some(n) = ready.pop() {
            seen += 1;
            for (w, s) in &self.edges {
                if *w == n {
                    let d = indeg.get_mut(s).unwrap();
                    *d -= 1;
                    if *d == 0 {
                        ready.push(*s);
                    }
                }
            }
        }
        seen == self.nodes.len()
    }

    pub fn sources(&self) -> Vec<BisimKind> {
        self.nodes
            .iter()
            .copied()
            .filter(|n| !self.edges.iter().any(|(_, s)| s == n))
            .collect()
    }

    pub fn sinks(&self) -> Vec<BisimKind> {
        self.nodes
            .iter()
            .copied()
            .filter(|n| !self.edges.iter().any(|(w, _)| w == n))
            .collect()
    }

    /// Kinds reachable from `k` along edges, `k` excluded.
    pub fn stronger_than(&self, k: BisimKind) -> BTreeSet<BisimKind> {
        let mut out = BTreeSet::new();
        let mut stack = vec![k];
        while let Some(n) = stack.pop() {
            for (w, s) in &self.edges {
                if *w == n && out.insert(*s) {
                    stack.push(*s);
                }
            }
        }
        out
    }
}

pub fn hierarchy() -> HierarchyGraph {
    use BisimKind::*;
    HierarchyGraph {
        nodes: BisimKind::BISIMS.to_vec(),
        edges: vec![
            (WBB, SBB),
            (WBB, WGB),
            (WGB, WEB),
            (WEB, WLB),
            (WLB, WOB),
            (WGB, SGB),
            (SBB, SGB),
            (WEB, SEB),
            (SGB, SEB),
            (WLB, SLB),
            (SEB, SLB),
            (WOB, SOB),
            (SLB, SOB),
        ],
    }
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct IdentityCheck {
    pub direct: String,
    pub alternative: String,
    pub identical: bool,
    /// Lines present in only one of the two canonical forms.
    pub differences: Vec<String>,
}

/// The delta a layer adds on top of its parent, under a new name.
fn delta(name: &str) -> LayerSpec {
    catalog()[name].clone()
}

fn diff(a: &str, b: &str) -> Vec<String> {
    let la: BTreeSet<&str> = a.lines().collect();
    let lb: BTreeSet<&str> = b.lines().collect();
    la.symmetric_difference(&lb)
        .map(|s| {
            if la.contains(s) {
                format!("- {s}")
            } else {
                format!("+ {s}")
            }
        })
        .collect()
}

fn compare(direct: &str, alt_name: &str, alt: &Signature) -> Result<IdentityCheck, LayerError> {
    let d = flatten_layer(direct, catalog())?.canonical_form();
    let a = alt.canonical_form();
    let differences = diff(&d, &a);
    Ok(IdentityCheck {
        direct: direct.into(),
        alternative: alt_name.into(),
        identical: differences.is_empty(),
        differences,
    })
}

/// Builds the alternative strong layers and one built from `perturb`.
fn alternatives(
    perturb: Option<&dyn Fn(&mut LayerSpec)>,
) -> Result<Vec<(String, String, Signature)>, LayerError> {
    let lib = catalog();
    let sbb = flatten_layer("SBB", lib)?;
    // the strong layer's own delta: add t-h-act, drop h-or-no
    let mut wgb = delta("WGB'").rebased("SGB'", "SBB");
    if let Some(f) = perturb {
        f(&mut wgb);
    }
    let sgb_alt = apply_layer(sbb, &wgb)?;
    let seb_alt = apply_layer(
        flatten_layer("SGB", lib)?,
        &delta("WEB").rebased("SEB'", "SGB"),
    )?;
    let slb_alt = apply_layer(
        flatten_layer("SEB", lib)?,
        &delta("WLB").rebased("SLB'", "SEB"),
    )?;
    let sob_alt = apply_layer(
        flatten_layer("SLB", lib)?,
        &delta("WOB").rebased("SOB'", "SLB"),
    )?;
    Ok(vec![
        ("SGB".into(), "SGB'".into(), sgb_alt),
        ("SEB".into(), "SEB'".into(), seb_alt),
        ("SLB".into(), "SLB'".into(), slb_alt),
        ("SOB".into(), "SOB'".into(), sob_alt),
    ])
}

/// Each strong layer built two ways must flatten to the same signature.
pub fn layer_identity_checks() -> Result<Vec<IdentityCheck>, LayerError> {
    alternatives(None)?
        .iter()
        .map(|(d, n, s)| compare(d, n, s))
        .collect()
}

/// Negative control: SGB' with one extra axiom.
pub fn perturbed_identity_check() -> Result<IdentityCheck, LayerError> {
    let perturb = |spec: &mut LayerSpec| {
        spec.added_axioms.push(crate::adt::AxiomDecl {
            id: "perturbed".into(),
            text: "output(o-proc(c, x, p), c, y) = p".into(),
            line: 0,
        });
    };
    let alts = alternatives(Some(&perturb))?;
    let (d, n, s) = &alts[0];
    compare(d, n, s)
}

/// Non-hidden ptrace operations each kind layer must offer.
pub fn expected_inventory(kind: BisimKind) -> BTreeSet<&'static str> {
    use BisimKind::*;
    let mut v: Vec<&str> = vec!["t-barb-i", "t-barb-o", "t-or-no"];
    if !matches!(kind, WBB | SBB) {
        v.extend(["tinput", "toutput"]);
    }
    if matches!(kind, WLB | WOB | SLB | SOB) {
        v.extend(["tinput1", "tinput2"]);
    }
    if matches!(kind, WOB | SOB) {
        v.push("tsubst");
    }
    if !kind.is_weak() {
        v.push("t-h-act");
    }
    if kind == TRACE {
        return ["tinput", "toutput", "t-h-act"].into_iter().collect();
    }
    v.into_iter().collect()
}

/// Non-hidden ops of a signature that return a ptrace from a ptrace.
pub fn ptrace_inventory(sig: &Signature) -> BTreeSet<String> {
    let ptrace = Sym::new("ptrace");
    sig.ops
        .values()
        .filter(|o| !o.hidden && o.result_sort == ptrace && o.arg_sorts.first() == Some(&ptrace))
        .map(|o| o.name.to_string())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SelfCheck {
    pub layer: String,
    pub problems: Vec<String>,
}

/// Flattening, declaration and inventory checks for every bundled layer.
pub fn self_checks() -> Vec<SelfCheck> {
    let lib = catalog();
    let mut out = Vec::new();
    for name in lib.keys() {
        let mut problems = Vec::new();
        match flatten_layer(name, lib) {
            Err(e) => problems.push(format!("does not flatten: {e}")),
            Ok(sig) => {
                for ax in &sig.axioms {
                    let mut ops = Vec::new();
                    ax.lhs.for_each_op(&mut |o| ops.push(o));
                    ax.rhs.for_each_op(&mut |o| ops.push(o));
                    for o in ops {
                        if sig.op(o).is_none() {
                            problems.push(format!("axiom {} uses undeclared {o}", ax.id));
                        }
                    }
                    if let Err(e) = crate::adt::well_sorted(&ax.lhs, &sig) {
                        problems.push(format!("axiom {}: {e}", ax.id));
                    }
                    if let Err(e) = crate::adt::well_sorted(&ax.rhs, &sig) {
                        problems.push(format!("axiom {}: {e}", ax.id));
                    }
                }
                for op in sig.observe.keys() {
                    if sig.op(*op).is_some_and(|d| d.hidden) {
                        problems.push(format!("observed op {op} is hidden"));
                    }
                }
            }
        }
        out.push(SelfCheck {
            layer: name.clone(),
            problems,
        });
    }
    for kind in BisimKind::BISIMS
        .iter()
        .chain(std::iter::once(&BisimKind::TRACE))
    {
        let layer = kind_of_layer(*kind);
        if let Ok(sig) = flatten_layer(layer, lib) {
            let have = ptrace_inventory(&sig);
            let want: BTreeSet<String> = expected_inventory(*kind)
                .into_iter()
                .map(String::from)
                .collect();
            if have != want {
                let entry = out.iter_mut().find(|c| c.layer == layer).unwrap();
                entry
                    .problems
                    .push(format!("{kind}: inventory {have:?} differs from {want:?}"));
            }
        }
    }
    out
}
