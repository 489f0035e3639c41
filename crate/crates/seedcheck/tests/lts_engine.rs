mod common;

use common::{vp, vp_in};
use proptest::prelude::*;
use seedcheck::adt::Sym;
use seedcheck::lts::*;
use seedcheck::process::{Alphabet, DefEnv, Process};
use std::collections::BTreeSet;

const LIMIT: usize = DEFAULT_STATE_LIMIT;

fn early(p: &Process, env: &DefEnv, alpha: &Alphabet) -> Vec<(Action, Process)> {
    transitions(p, env, Semantics::Early, alpha).unwrap()
}

fn barb_strings(p: &Process, env: &DefEnv) -> Vec<String> {
    barbs(p, env)
        .unwrap()
        .iter()
        .map(|b| b.to_string())
        .collect()
}

#[test]
fn single_prefix_moves() {
    let alpha = Alphabet::default();
    let (p, env) = vp("c!a.d!b.nil");
    assert_eq!(
        early(&p, &env, &alpha),
        vec![(Action::Out(Sym::new("c"), Sym::new("a")), vp("d!b.nil").0)]
    );
    assert!(early(&Process::Nil, &env, &alpha).is_empty());
}

#[test]
fn early_input_ranges_over_names() {
    let alpha = Alphabet::default();
    let (p, env) = vp("c?u.nil");
    let got: BTreeSet<String> = early(&p, &env, &alpha)
        .iter()
        .map(|(a, q)| format!("{a} {q}"))
        .collect();
    let want: BTreeSet<String> = ["a", "b", "u"]
        .iter()
        .map(|n| format!("{} nil", Action::In(Sym::new("c"), Sym::new(n))))
        .collect();
    assert_eq!(got, want);
}

#[test]
fn late_input_is_bound() {
    let alpha = Alphabet::default();
    let (p, env) = vp("c?u.d!u.nil");
    let t = transitions(&p, &env, Semantics::Late, &alpha).unwrap();
    assert_eq!(
        t,
        vec![(
            Action::BoundIn(Sym::new("c"), Sym::new("u")),
            vp("d!u.nil").0
        )]
    );
}

#[test]
fn barbs_of_examples() {
    let (_, p, env) = vp_in("names=a,y,z channels=c", "c!z.nil | c?y.nil");
    assert_eq!(barb_strings(&p, &env), ["in@c", "out@c"]);
    assert!(barb_strings(&Process::Nil, &env).is_empty());
    let (_, p, env) = vp_in("names=a channels=x,y", "tau.x!a.nil + y!a.nil");
    assert_eq!(barb_strings(&p, &env), ["out@y"]);
}

#[test]
fn tau_closures() {
    let (alpha, p, env) = vp_in("names=a channels=c", "tau.tau.nil");
    let got = tau_closure(&p, &env, &alpha, LIMIT).unwrap();
    assert_eq!(
        got,
        [
            p.clone(),
            vp_in("names=a channels=c", "tau.nil").1,
            Process::Nil
        ]
        .into_iter()
        .collect()
    );
    assert_eq!(
        tau_closure(&Process::Nil, &env, &alpha, LIMIT)
            .unwrap()
            .len(),
        1
    );
    let (alpha, p, env) = vp_in("names=a,y,z channels=c", "c!z.nil | c?y.nil");
    let nn = Process::compo(Process::Nil, Process::Nil);
    assert!(tau_closure(&p, &env, &alpha, LIMIT).unwrap().contains(&nn));
}

#[test]
fn weak_moves() {
    let (alpha, p, env) = vp_in("names=a channels=x", "tau.x!a.nil");
    let out = Action::Out(Sym::new("x"), Sym::new("a"));
    let nil: BTreeSet<Process> = [Process::Nil].into_iter().collect();
    assert_eq!(
        weak_transitions(&p, &env, Semantics::Early, &alpha, out, LIMIT).unwrap(),
        nil
    );
    assert_eq!(
        weak_transitions(
            &Process::Nil,
            &env,
            Semantics::Early,
            &alpha,
            Action::Tau,
            LIMIT
        )
        .unwrap(),
        nil
    );
    let (_, q, _) = vp_in("names=a channels=x", "x!a.nil");
    assert_eq!(
        weak_transitions(&q, &env, Semantics::Early, &alpha, out, LIMIT).unwrap(),
        nil
    );
}

#[test]
fn reachable_spaces() {
    let alpha = Alphabet::default();
    let (p, env) = vp("d!a.nil");
    let s = reachable(&p, &env, Semantics::Early, &alpha, LIMIT).unwrap();
    assert_eq!(
        (s.states.len(), s.transitions.len(), s.truncated),
        (2, 1, false)
    );
    let (p, env) = vp("def rp = d!a.rp + d!b.rp\nrp");
    let s = reachable(&p, &env, Semantics::Early, &alpha, LIMIT).unwrap();
    assert_eq!((s.states.len(), s.transitions.len()), (1, 2));
    // P, d!a.nil, d!b.nil and nil; nil is reached twice
    let (p, env) = vp("c!u.d!a.nil + c!u.d!b.nil");
    let s = reachable(&p, &env, Semantics::Early, &alpha, LIMIT).unwrap();
    assert_eq!(s.states.len(), 4);
    let s = reachable(&p, &env, Semantics::Early, &alpha, 2).unwrap();
    assert!(s.truncated);
}

#[test]
fn missing_definition_is_an_error() {
    let alpha = Alphabet::default();
    assert!(matches!(
        transitions(&Process::Rec, &DefEnv::default(), Semantics::Early, &alpha),
        Err(LtsError::MissingDefinition)
    ));
}

/// States of a corpus entry, as an independent sample of processes.
fn states_of(e: &seedcheck::corpus::CorpusEntry) -> Vec<Process> {
    let mut out = Vec::new();
    for p in [&e.p, &e.q] {
        out.extend(
            reachable(p, &e.env, Semantics::Early, &e.alpha, LIMIT)
                .unwrap()
                .states,
        );
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn input_fans_out_over_names(e in common::entries()) {
        for p in states_of(&e) {
            if let Process::Input(c, x, k) = &p {
                let t = early(&p, &e.env, &e.alpha);
                prop_assert_eq!(t.len(), e.alpha.names.len());
                for (n, (a, q)) in e.alpha.names.iter().zip(&t) {
                    prop_assert_eq!(a, &Action::In(*c, *n));
                    prop_assert_eq!(q, &seedcheck::process::substitute(k, *x, *n));
                }
            }
        }
    }

    #[test]
    fn communication_is_symmetric(e in common::entries()) {
        for p in states_of(&e) {
            if let Process::Compo(a, b) = &p {
                let flipped = Process::Compo(b.clone(), a.clone());
                let count = |q: &Process| early(q, &e.env, &e.alpha).iter().filter(|(a, _)| *a == Action::Tau).count();
                prop_assert_eq!(count(&p), count(&flipped));
            }
        }
    }

    #[test]
    fn tau_closure_is_a_closure_operator(e in common::entries()) {
        for p in states_of(&e) {
            let c = tau_closure(&p, &e.env, &e.alpha, LIMIT).unwrap();
            prop_assert!(c.contains(&p));
            let mut again = BTreeSet::new();
            for q in &c {
                let cq = tau_closure(q, &e.env, &e.alpha, LIMIT).unwrap();
                prop_assert!(cq.is_subset(&c));
                again.extend(cq);
            }
            prop_assert_eq!(again, c);
        }
    }

    #[test]
    fn weak_moves_are_closure_then_step(e in common::entries()) {
        for p in states_of(&e) {
            let c = tau_closure(&p, &e.env, &e.alpha, LIMIT).unwrap();
            let mut labels = BTreeSet::new();
            for q in &c {
                labels.extend(early(q, &e.env, &e.alpha).into_iter().map(|(a, _)| a).filter(|a| *a != Action::Tau));
            }
            for a in labels {
                let mut want = BTreeSet::new();
                for q in &c {
                    want.extend(early(q, &e.env, &e.alpha).into_iter().filter(|(b, _)| *b == a).map(|(_, r)| r));
                }
                prop_assert_eq!(weak_transitions(&p, &e.env, Semantics::Early, &e.alpha, a, LIMIT).unwrap(), want);
            }
        }
    }

    #[test]
    fn barbs_match_transitions(e in common::entries()) {
        for p in states_of(&e) {
            let mut want = BTreeSet::new();
            for (a, _) in early(&p, &e.env, &e.alpha) {
                match a {
                    Action::In(c, _) => { want.insert(Barb { dir: BarbDir::In, channel: c }); }
                    Action::Out(c, _) => { want.insert(Barb { dir: BarbDir::Out, channel: c }); }
                    _ => {}
                }
            }
            prop_assert_eq!(barbs(&p, &e.env).unwrap(), want);
        }
    }

    #[test]
    fn late_and_early_inputs_agree_after_instantiation(e in common::entries()) {
        for p in states_of(&e) {
            for (a, q) in transitions(&p, &e.env, Semantics::Late, &e.alpha).unwrap() {
                if let Action::BoundIn(c, u) = a {
                    for n in &e.alpha.names {
                        let inst = instantiate_input(&q, u, *n);
                        let ok = early(&p, &e.env, &e.alpha).into_iter().any(|(b, r)| b == Action::In(c, *n) && r == inst);
                        prop_assert!(ok, "{} --{}({})--> {}", p, c, n, inst);
                    }
                }
            }
        }
    }
}
