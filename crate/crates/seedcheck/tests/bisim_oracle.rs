mod common;

use common::{vp, vp_in};
use proptest::prelude::*;
use seedcheck::lts::{transitions, Action, Semantics};
use seedcheck::oracle::*;
use seedcheck::process::{Alphabet, DefEnv, Process};
use std::collections::{BTreeMap, BTreeSet};

fn cfg() -> OracleConfig {
    OracleConfig::default()
}

fn holds(kind: BisimKind, p: &str, q: &str) -> bool {
    let (p, env) = vp(p);
    let (q, _) = vp(q);
    check(kind, &p, &q, &env, &Alphabet::default(), cfg())
        .unwrap()
        .equivalent
}

fn holds_in(kind: BisimKind, alpha: &str, p: &str, q: &str) -> bool {
    let (alpha, p, env) = vp_in(alpha, p);
    let (_, q, _) = vp_in(&alpha.to_string(), q);
    check(kind, &p, &q, &env, &alpha, cfg()).unwrap().equivalent
}

#[test]
fn interleaving_is_strongly_bisimilar() {
    assert!(holds(
        BisimKind::SEB,
        "c?u.d!a.nil + d!a.c?u.nil",
        "c?u.nil | d!a.nil"
    ));
}

#[test]
fn late_choice_distinguisher() {
    let (p, env) = vp("c!u.d!a.nil + c!u.d!b.nil");
    let (q, _) = vp("c!u.(d!a.nil + d!b.nil)");
    let alpha = Alphabet::default();
    let v = check(BisimKind::SEB, &p, &q, &env, &alpha, cfg()).unwrap();
    assert!(!v.equivalent);
    let labels: Vec<&str> = v.distinguisher.iter().map(|r| r.label.as_str()).collect();
    assert_eq!(labels, ["c!u", "d!b"]);
    assert_eq!(v.distinguisher[0].attacker, Side::Left);
    assert_eq!(v.distinguisher[1].attacker, Side::Right);
    assert!(v.distinguisher[1].responses.is_empty());
    assert!(validate_distinguisher(
        BisimKind::SEB,
        &v.distinguisher,
        &p,
        &q,
        &env,
        &alpha,
        cfg()
    )
    .unwrap());
    assert!(check_trace(&p, &q, &env, &alpha, cfg()).unwrap().equivalent);
}

#[test]
fn barbed_examples() {
    assert!(holds_in(
        BisimKind::WBB,
        "names=a,y,z channels=c",
        "tau.(c!z.nil | c?y.nil)",
        "c!z.nil | c?y.nil"
    ));
    assert!(!holds_in(
        BisimKind::WBB,
        "names=a channels=x,y",
        "tau.x!a.nil + y!a.nil",
        "x!a.nil + y!a.nil"
    ));
    assert!(holds_in(
        BisimKind::SBB,
        "names=a channels=c",
        "tau.tau.nil",
        "tau.tau.nil"
    ));
    assert!(holds_in(
        BisimKind::WGB,
        "names=a channels=x",
        "tau.x!a.nil",
        "x!a.nil"
    ));
}

#[test]
fn nil_and_nil_sum_agree_everywhere() {
    for k in BisimKind::BISIMS.iter().chain([&BisimKind::TRACE]) {
        assert!(holds(*k, "nil", "nil + nil"), "{k}");
    }
    let alpha = Alphabet::parse("names=a,b channels=c").unwrap();
    let a =
        seedcheck::process::parse("a.nil", seedcheck::process::Calculus::Basic, &alpha).unwrap();
    let b =
        seedcheck::process::parse("b.nil", seedcheck::process::Calculus::Basic, &alpha).unwrap();
    assert!(
        !check_trace(&a, &b, &DefEnv::default(), &alpha, cfg())
            .unwrap()
            .equivalent
    );
}

#[test]
fn hierarchy_reports() {
    let alpha = Alphabet::default();
    let (p, env) = vp("nil");
    let (q, _) = vp("nil + nil");
    let r = hierarchy_report(&p, &q, &env, &alpha, cfg()).unwrap();
    assert!(r.verdicts.values().all(|v| *v));
    assert!(r.violations.is_empty());
    let (p, env) = vp("c!u.d!a.nil + c!u.d!b.nil");
    let (q, _) = vp("c!u.(d!a.nil + d!b.nil)");
    let r = hierarchy_report(&p, &q, &env, &alpha, cfg()).unwrap();
    assert!(r.verdicts[&BisimKind::TRACE]);
    // barbs only see channels, so both barbed kinds accept the pair
    assert!(r.verdicts[&BisimKind::SBB] && r.verdicts[&BisimKind::WBB]);
    for k in [
        BisimKind::SGB,
        BisimKind::SEB,
        BisimKind::SLB,
        BisimKind::SOB,
    ] {
        assert!(!r.verdicts[&k], "{k}");
    }
    assert!(r.violations.is_empty());
}

#[test]
fn ground_kinds_need_a_fresh_name() {
    let alpha = Alphabet::default();
    let (p, env) = vp("c?u.nil");
    let v = check(BisimKind::WGB, &p, &p, &env, &alpha, cfg()).unwrap();
    assert!(v.equivalent);
}

/// Every finite trace of a recursion-free process, by exhaustive search.
fn traces(p: &Process, env: &DefEnv, alpha: &Alphabet) -> BTreeSet<Vec<Action>> {
    let mut out = BTreeSet::new();
    let mut stack = vec![(p.clone(), Vec::new())];
    while let Some((s, tr)) = stack.pop() {
        for (a, t) in transitions(&s, env, Semantics::Early, alpha).unwrap() {
            let mut tr2: Vec<Action> = tr.clone();
            tr2.push(a);
            stack.push((t, tr2));
        }
        out.insert(tr);
    }
    out
}

fn all_kinds() -> Vec<BisimKind> {
    BisimKind::BISIMS
        .iter()
        .copied()
        .chain([BisimKind::TRACE])
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn trace_check_matches_exhaustive_traces(e in common::entries()) {
        prop_assume!(e.env.body.is_none());
        let want = traces(&e.p, &e.env, &e.alpha) == traces(&e.q, &e.env, &e.alpha);
        prop_assert_eq!(check_trace(&e.p, &e.q, &e.env, &e.alpha, cfg()).unwrap().equivalent, want);
    }

    #[test]
    fn kinds_are_reflexive_and_symmetric(e in common::entries()) {
        for k in all_kinds() {
            prop_assert!(check(k, &e.p, &e.p, &e.env, &e.alpha, cfg()).unwrap().equivalent, "{} not reflexive", k);
            let pq = check(k, &e.p, &e.q, &e.env, &e.alpha, cfg()).unwrap().equivalent;
            let qp = check(k, &e.q, &e.p, &e.env, &e.alpha, cfg()).unwrap().equivalent;
            prop_assert_eq!(pq, qp, "{} not symmetric", k);
        }
    }

    #[test]
    fn kinds_are_transitive(e in common::entries()) {
        let r = Process::sum(e.q.clone(), Process::Nil);
        for k in all_kinds() {
            let pq = check(k, &e.p, &e.q, &e.env, &e.alpha, cfg()).unwrap().equivalent;
            let qr = check(k, &e.q, &r, &e.env, &e.alpha, cfg()).unwrap().equivalent;
            let pr = check(k, &e.p, &r, &e.env, &e.alpha, cfg()).unwrap().equivalent;
            prop_assert!(qr, "{} misses the nil summand", k);
            prop_assert!(!(pq && qr) || pr, "{} not transitive", k);
        }
    }

    #[test]
    fn witnesses_and_distinguishers_revalidate(e in common::entries()) {
        for k in BisimKind::BISIMS {
            let res = play(k, &e.p, &e.q, &e.env, &e.alpha, cfg()).unwrap();
            prop_assert!(validate_witness(&res, &e.env, &e.alpha, cfg()).unwrap(), "{} witness", k);
            let v = res.verdict();
            if !v.equivalent {
                prop_assert!(validate_distinguisher(k, &v.distinguisher, &e.p, &e.q, &e.env, &e.alpha, cfg()).unwrap(), "{} distinguisher", k);
            }
        }
    }

    #[test]
    fn verdicts_respect_the_hierarchy(e in common::entries()) {
        let mut verdicts = BTreeMap::new();
        for k in all_kinds() {
            verdicts.insert(k, check(k, &e.p, &e.q, &e.env, &e.alpha, cfg()).unwrap().equivalent);
        }
        prop_assert!(hierarchy_violations(&verdicts).is_empty());
        prop_assert!(!verdicts[&BisimKind::SEB] || verdicts[&BisimKind::TRACE]);
    }
}
