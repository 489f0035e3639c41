mod common;

use proptest::prelude::*;
use seedcheck::adt::{Signature, Sym, Term};
use seedcheck::corpus::layer_for;
use seedcheck::library::{get_layer, kind_of_layer};
use seedcheck::oracle::BisimKind;
use seedcheck::process::{encode, parse_process, Alphabet, Calculus, DefEnv, Process};
use seedcheck::rewrite::{normal_form, DEFAULT_FUEL};
use seedcheck::seed::*;
use std::collections::BTreeSet;

fn cfg() -> SeedConfig {
    SeedConfig::default()
}

fn seeds(
    sig: &Signature,
    alpha: &Alphabet,
    calc: Calculus,
    p: &str,
    q: &str,
) -> (Term, Term, DefEnv) {
    let (p, env) = parse_process(p, calc, alpha).unwrap();
    let (q, _) = parse_process(q, calc, alpha).unwrap();
    (
        make_seed(&p, &env, sig).unwrap().term,
        make_seed(&q, &env, sig).unwrap().term,
        env,
    )
}

fn strings(set: &BTreeSet<Term>) -> BTreeSet<String> {
    set.iter().map(|t| t.to_string()).collect()
}

fn trans_q() -> (Alphabet, Signature, Term, Term) {
    let alpha = Alphabet::parse("names=a,b channels=c").unwrap();
    let sig = get_layer("Trans", &alpha).unwrap();
    let (q, q2, _) = seeds(
        &sig,
        &alpha,
        Calculus::Basic,
        "a.b.nil + b.a.nil + a.b.nil",
        "a.nil | b.nil",
    );
    (alpha, sig, q, q2)
}

#[test]
fn seed_shapes() {
    let alpha = Alphabet::default();
    let sig = get_layer("Process-Trans", &alpha).unwrap();
    let (p, env) = common::vp("c?u.d!a.nil + d!a.c?u.nil");
    let s = make_seed(&p, &env, &sig).unwrap();
    let pt = encode(&p);
    assert_eq!(
        s.term,
        Term::op("tconf", vec![pt.clone(), pt, Term::op("()", vec![])])
    );
    assert_eq!(s.kind, SeedKind::Initial);
    assert_eq!(
        make_seed(&Process::Nil, &env, &sig)
            .unwrap()
            .term
            .to_string(),
        "tconf(nil, nil, ())"
    );
    let (_, _, _, q2) = trans_q();
    assert_eq!(q2.to_string(), "compo(pre(a, nil), pre(b, nil))");
}

#[test]
fn extension_of_nested_sum() {
    let (alpha, sig, q, _) = trans_q();
    let mut alg = SeedAlgebra::new(&sig, &alpha, Sym::new("proc"), cfg());
    let ext = alg.hidden_extension(std::slice::from_ref(&q)).unwrap();
    let want: BTreeSet<String> = [
        q.to_string(),
        "pre(a, pre(b, nil))".into(),
        "sum(pre(b, pre(a, nil)), pre(a, pre(b, nil)))".into(),
        "pre(b, pre(a, nil))".into(),
    ]
    .into_iter()
    .collect();
    assert_eq!(strings(&ext), want);
    let nil = Term::op("nil", vec![]);
    assert_eq!(
        strings(&alg.hidden_extension(std::slice::from_ref(&nil)).unwrap()),
        strings(&[nil].into_iter().collect())
    );
}

#[test]
fn act_closure_collapses_equal_results() {
    let (alpha, sig, q, q2) = trans_q();
    let mut alg = SeedAlgebra::new(&sig, &alpha, Sym::new("proc"), cfg());
    let ext = alg.hidden_extension(std::slice::from_ref(&q)).unwrap();
    let a: BTreeSet<Term> = [Term::op("a", vec![])].into_iter().collect();
    let closure = alg.non_hidden_closure(Sym::new("act"), &[a, ext]).unwrap();
    assert_eq!(
        strings(&closure),
        ["pre(b, nil)".to_string()].into_iter().collect()
    );
    assert!(alg
        .non_hidden_closure(Sym::new("act"), &[BTreeSet::new(), BTreeSet::new()])
        .unwrap()
        .is_empty());
    let tree = alg.closure_tree(&q, "q", 2).unwrap();
    assert!(
        tree.contains(&"act([a],[q]) = {pre(b,nil)}".to_string()),
        "{tree:?}"
    );
    assert!(rough_seed_iso(&mut alg, &q, &q2).unwrap().equivalent);
    assert!(deep_iso(&mut alg, &q, &q2).unwrap().equivalent);
}

#[test]
fn moves_of_interleaving_seed() {
    let alpha = Alphabet::default();
    let sig = get_layer("Process-Trans", &alpha).unwrap();
    let (p, q, _) = seeds(
        &sig,
        &alpha,
        Calculus::ValuePassing,
        "c?u.d!a.nil + d!a.c?u.nil",
        "c?u.nil | d!a.nil",
    );
    let mut alg = SeedAlgebra::new(&sig, &alpha, Sym::new("ptrace"), cfg());
    let keys: Vec<String> = alg
        .closure_moves(&p)
        .unwrap()
        .iter()
        .map(|(k, _)| k.to_string())
        .collect();
    assert_eq!(
        keys,
        ["tinput(c,a)", "tinput(c,b)", "tinput(c,u)", "toutput(d,a)"]
    );
    assert!(deep_iso(&mut alg, &p, &q).unwrap().equivalent);
    assert!(deep_iso(&mut alg, &p, &p).unwrap().equivalent);
    assert!(rough_seed_iso(&mut alg, &p, &p).unwrap().equivalent);
}

#[test]
fn nil_seed_only_idles() {
    let alpha = Alphabet::default();
    let sig = get_layer("SEB", &alpha).unwrap();
    let mut alg = SeedAlgebra::new(&sig, &alpha, Sym::new("ptrace"), cfg());
    let nil = make_seed(&Process::Nil, &DefEnv::default(), &sig)
        .unwrap()
        .term;
    let moves = alg.closure_moves(&nil).unwrap();
    let keys: Vec<String> = moves.iter().map(|(k, _)| k.to_string()).collect();
    assert_eq!(keys, ["t-or-no"]);
    assert_eq!(moves[0].1.len(), 1);
}

#[test]
fn late_choice_fails_after_first_output() {
    let alpha = Alphabet::default();
    let sig = get_layer("Process-Trans", &alpha).unwrap();
    let (p, q, _) = seeds(
        &sig,
        &alpha,
        Calculus::ValuePassing,
        "c!u.d!a.nil + c!u.d!b.nil",
        "c!u.(d!a.nil + d!b.nil)",
    );
    let mut alg = SeedAlgebra::new(&sig, &alpha, Sym::new("ptrace"), cfg());
    assert!(rough_seed_iso(&mut alg, &p, &q).unwrap().equivalent);
    let r = deep_iso(&mut alg, &p, &q).unwrap();
    assert!(!r.equivalent);
    let after: BTreeSet<(String, String)> = r
        .failing
        .iter()
        .filter(|f| f.path.len() == 1 && f.path[0].to_string() == "toutput(c,u)")
        .map(|f| (f.left.clone(), f.right.clone()))
        .collect();
    let pp = "sum(o-proc(c,u,o-proc(d,a,nil)),o-proc(c,u,o-proc(d,b,nil)))";
    let q1 = "tconf(sum(o-proc(d,a,nil),o-proc(d,b,nil)),o-proc(c,u,sum(o-proc(d,a,nil),o-proc(d,b,nil))),())";
    let want: BTreeSet<(String, String)> = [
        (format!("tconf(o-proc(d,a,nil),{pp},())"), q1.to_string()),
        (format!("tconf(o-proc(d,b,nil),{pp},())"), q1.to_string()),
    ]
    .into_iter()
    .collect();
    assert_eq!(after, want);
    // q1 can output b on d; the left element reached by d!a cannot
    let p1 = make_seed(
        &common::vp("c!u.d!a.nil + c!u.d!b.nil").0,
        &DefEnv::default(),
        &sig,
    )
    .unwrap()
    .term;
    let p1 = Term::op(
        "toutput",
        vec![
            Term::op("tleft", vec![p1]),
            Term::op("c", vec![]),
            Term::op("u", vec![]),
        ],
    );
    let p1 = normal_form(
        &sig.parse_term(&p1.to_string()).unwrap(),
        &sig,
        DEFAULT_FUEL,
    )
    .unwrap();
    let keys: Vec<String> = alg
        .closure_moves(&p1)
        .unwrap()
        .iter()
        .map(|(k, _)| k.to_string())
        .collect();
    assert_eq!(keys, ["toutput(d,a)"]);
}

#[test]
fn silent_prefix_has_one_fresh_pair() {
    let alpha = Alphabet::parse("names=a channels=x").unwrap();
    let sig = get_layer("WGB'", &alpha).unwrap();
    let (p, q, _) = seeds(
        &sig,
        &alpha,
        Calculus::ValuePassing,
        "tau.x!a.nil",
        "x!a.nil",
    );
    let mut alg = SeedAlgebra::new(&sig, &alpha, Sym::new("ptrace"), cfg());
    let r = deep_iso(&mut alg, &p, &q).unwrap();
    assert!(r.equivalent);
    let moves = alg.closure_moves(&p).unwrap();
    let silent = &moves.iter().find(|(k, _)| k.op == "t-or-no").unwrap().1;
    let seed = compact(&p);
    // pairs inside the silent closure other than the seed's own zero-step pair
    let inside: Vec<&(String, String)> = r
        .corresponding
        .iter()
        .filter(|(l, _)| *l != seed && silent.iter().any(|t| compact(t) == *l))
        .collect();
    assert_eq!(
        inside,
        [&(
            "tconf(o-proc(x,a,nil),tau(o-proc(x,a,nil)),())".to_string(),
            "tconf(o-proc(x,a,nil),o-proc(x,a,nil),())".to_string()
        )]
    );
}

#[test]
fn barbed_layer_moves() {
    let alpha = Alphabet::parse("names=a,y,z1 channels=c").unwrap();
    let sig = get_layer("WBB", &alpha).unwrap();
    let (q, _, _) = seeds(
        &sig,
        &alpha,
        Calculus::ValuePassing,
        "c!z1.nil | c?y.nil",
        "nil",
    );
    let mut alg = SeedAlgebra::new(&sig, &alpha, Sym::new("ptrace"), cfg());
    let keys: BTreeSet<String> = alg
        .closure_moves(&q)
        .unwrap()
        .iter()
        .map(|(k, _)| k.to_string())
        .collect();
    for k in ["t-barb-i(c)", "t-barb-o(c)", "t-or-no"] {
        assert!(keys.contains(k), "{keys:?}");
    }
    let ext = alg.hidden_extension(std::slice::from_ref(&q)).unwrap();
    let heads: BTreeSet<String> = ext
        .iter()
        .map(|t| t.arg(0).head_op().unwrap().to_string())
        .collect();
    assert!(
        heads.contains("compol") && heads.contains("compor"),
        "{heads:?}"
    );
}

#[test]
fn overflow_is_reported() {
    let alpha = Alphabet::default();
    let sig = get_layer("Process-Trans", &alpha).unwrap();
    let (p, q, _) = seeds(
        &sig,
        &alpha,
        Calculus::ValuePassing,
        "c?u.d!a.nil + d!a.c?u.nil",
        "c?u.nil | d!a.nil",
    );
    let tight = SeedConfig {
        pair_limit: 1,
        ..cfg()
    };
    let mut alg = SeedAlgebra::new(&sig, &alpha, Sym::new("ptrace"), tight);
    assert!(matches!(
        deep_iso(&mut alg, &p, &q),
        Err(SeedError::PairOverflow(_))
    ));
}

fn algebra_for(e: &seedcheck::corpus::CorpusEntry, kind: BisimKind) -> Signature {
    get_layer(layer_for(kind, e.calculus), &e.alpha).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn extensions_are_idempotent_and_defined(e in common::entries()) {
        for kind in [BisimKind::SEB, BisimKind::WBB, BisimKind::WGB] {
            let sig = algebra_for(&e, kind);
            let s = make_seed(&e.p, &e.env, &sig).unwrap();
            let mut alg = SeedAlgebra::for_seed(&sig, &e.alpha, &s, cfg()).unwrap();
            let ext = alg.hidden_extension(std::slice::from_ref(&s.term)).unwrap();
            let base: Vec<Term> = ext.iter().cloned().collect();
            prop_assert_eq!(&alg.hidden_extension(&base).unwrap(), &ext);
            for t in &ext {
                prop_assert!(alg.defined(t).unwrap().is_some(), "{} undefined", t);
            }
            for (_, closure) in alg.closure_moves(&s.term).unwrap().iter() {
                prop_assert!(!closure.is_empty());
                for t in closure {
                    prop_assert!(alg.defined(t).unwrap().is_some(), "{} undefined", t);
                }
            }
        }
    }

    #[test]
    fn deep_implies_rough(e in common::entries()) {
        let sig = get_layer("Process-Trans", &e.alpha).unwrap();
        let a = make_seed(&e.p, &e.env, &sig).unwrap();
        let b = make_seed(&e.q, &e.env, &sig).unwrap();
        let mut alg = SeedAlgebra::for_seed(&sig, &e.alpha, &a, cfg()).unwrap();
        let deep = deep_iso(&mut alg, &a.term, &b.term).unwrap().equivalent;
        let rough = rough_seed_iso(&mut alg, &a.term, &b.term).unwrap().equivalent;
        prop_assert!(!deep || rough);
    }

    #[test]
    fn rough_iso_is_an_equivalence(e in common::entries()) {
        let sig = get_layer("Process-Trans", &e.alpha).unwrap();
        let r = Process::sum(e.q.clone(), Process::Nil);
        let a = make_seed(&e.p, &e.env, &sig).unwrap();
        let b = make_seed(&e.q, &e.env, &sig).unwrap();
        let c = make_seed(&r, &e.env, &sig).unwrap();
        let mut alg = SeedAlgebra::for_seed(&sig, &e.alpha, &a, cfg()).unwrap();
        let mut iso = |x: &Term, y: &Term| rough_seed_iso(&mut alg, x, y).unwrap().equivalent;
        prop_assert!(iso(&a.term, &a.term));
        prop_assert_eq!(iso(&a.term, &b.term), iso(&b.term, &a.term));
        let (ab, bc, ac) = (iso(&a.term, &b.term), iso(&b.term, &c.term), iso(&a.term, &c.term));
        prop_assert!(bc);
        prop_assert!(!(ab && bc) || ac);
    }

    #[test]
    fn strong_moves_mirror_transitions(e in common::entries()) {
        prop_assume!(e.env.body.is_none());
        let sig = get_layer(kind_of_layer(BisimKind::SEB), &e.alpha).unwrap();
        let s = make_seed(&e.p, &e.env, &sig).unwrap();
        let mut alg = SeedAlgebra::for_seed(&sig, &e.alpha, &s, cfg()).unwrap();
        let keys: BTreeSet<String> = alg
            .closure_moves(&s.term)
            .unwrap()
            .iter()
            .map(|(k, _)| k.to_string())
            .filter(|k| k.starts_with("tinput") || k.starts_with("toutput"))
            .collect();
        let want: BTreeSet<String> = seedcheck::lts::transitions(&e.p, &e.env, seedcheck::lts::Semantics::Early, &e.alpha)
            .unwrap()
            .into_iter()
            .filter_map(|(a, _)| match a {
                seedcheck::lts::Action::In(c, x) => Some(format!("tinput({c},{x})")),
                seedcheck::lts::Action::Out(c, x) => Some(format!("toutput({c},{x})")),
                _ => None,
            })
            .collect();
        prop_assert_eq!(keys, want);
    }
}
