use proptest::prelude::*;
use seedcheck::adt::*;
use seedcheck::library::*;
use seedcheck::oracle::BisimKind;
use seedcheck::process::Alphabet;

fn flat(name: &str) -> Signature {
    flatten_layer(name, catalog()).unwrap()
}

#[test]
fn parses_a_small_layer() {
    let spec = parse_layer(
        "layer Tiny\nsort s\nop z: -> s\nop f: s -> s\n# comment\naxiom f1: f(z) = z\n",
    )
    .unwrap();
    assert_eq!(spec.name, "Tiny");
    let mut lib = Library::new();
    lib.insert("Tiny".into(), spec);
    let sig = flatten_layer("Tiny", &lib).unwrap();
    assert_eq!(sig.axioms.len(), 1);
    assert_eq!(sig.op(Sym::new("f")).unwrap().arity(), 1);
}

#[test]
fn layer_errors() {
    assert!(matches!(
        parse_layer("layer X\nbogus line\n"),
        Err(LayerError::Syntax { line: 2, .. })
    ));
    assert!(matches!(
        flatten_layer("Nowhere", catalog()),
        Err(LayerError::UnknownLayer(_))
    ));
    let mut lib = Library::new();
    lib.insert("A".into(), parse_layer("layer A\nparent B\n").unwrap());
    lib.insert("B".into(), parse_layer("layer B\nparent A\n").unwrap());
    assert!(matches!(
        flatten_layer("A", &lib),
        Err(LayerError::Cycle(_))
    ));
    let mut lib = Library::new();
    lib.insert(
        "A".into(),
        parse_layer("layer A\nsort s\n- op g: s -> s\n").unwrap(),
    );
    assert!(matches!(
        flatten_layer("A", &lib),
        Err(LayerError::MissingRemoval { .. })
    ));
}

#[test]
fn sorts_are_checked() {
    let sig = flat("Water-Fire");
    assert_eq!(
        well_sorted(&sig.parse_term("drink(drink(drop))").unwrap(), &sig).unwrap(),
        Sym::new("water")
    );
    let bad = Term::op("drink", vec![Term::op("spark", vec![])]);
    assert!(
        matches!(well_sorted(&bad, &sig), Err(SortError::Mismatch { path, .. }) if path == [0])
    );
    let bad = Term::op("light", vec![]);
    assert!(matches!(
        well_sorted(&bad, &sig),
        Err(SortError::Arity {
            expected: 1,
            got: 0,
            ..
        })
    ));
    assert!(sig.axioms.is_empty());
}

#[test]
fn private_ops_reject_higher_arguments() {
    let sig = flat("Second");
    assert_eq!(
        check_private_legality(&sig.parse_term("exp(exp(a))").unwrap(), &sig),
        Legality::Ok
    );
    match check_private_legality(&sig.parse_term("exp(add(c, d))").unwrap(), &sig) {
        Legality::Illegal {
            path,
            private_op,
            offending_op,
        } => {
            assert!(path.is_empty());
            assert_eq!((private_op.as_str(), offending_op.as_str()), ("exp", "add"));
        }
        Legality::Ok => panic!("accepted"),
    }
}

#[test]
fn catalog_contents() {
    let names = layer_names();
    assert_eq!(names.len(), 20);
    for n in [
        "Simple-Construct",
        "Process-Trans",
        "WGB'",
        "SOB",
        "Water-Fire",
    ] {
        assert!(names.contains(&n), "{n}");
    }
    assert_eq!(resolve_name("wgb"), Some("WGB'"));
    assert_eq!(resolve_name("process-trans"), Some("Process-Trans"));
    assert_eq!(resolve_name("nope"), None);
    assert!(flat("Cons").axioms.is_empty());
    let pt = flat("Process-Trans");
    assert!(pt
        .axioms
        .iter()
        .any(|a| a.lhs.head_op() == Some(Sym::new("tinput"))));
    let sbb = flat("SBB");
    assert!(sbb.op(Sym::new("h-or-no")).is_none());
    assert!(sbb.op(Sym::new("t-h-act")).is_some());
    assert!(get_layer("Process-Trans", &Alphabet::default())
        .unwrap()
        .op(Sym::new("u"))
        .is_some());
}

#[test]
fn every_kind_has_a_layer_with_the_expected_operations() {
    for k in BisimKind::BISIMS.iter().chain([&BisimKind::TRACE]) {
        let sig = flat(kind_of_layer(*k));
        let have = ptrace_inventory(&sig);
        let want: std::collections::BTreeSet<String> = expected_inventory(*k)
            .into_iter()
            .map(String::from)
            .collect();
        assert_eq!(have, want, "{k}");
    }
}

#[test]
fn strong_layers_built_two_ways_coincide() {
    let checks = layer_identity_checks().unwrap();
    assert_eq!(checks.len(), 4);
    for c in &checks {
        assert!(
            c.identical,
            "{} vs {}: {:?}",
            c.direct, c.alternative, c.differences
        );
    }
    let bad = perturbed_identity_check().unwrap();
    assert!(!bad.identical);
    assert_eq!(bad.differences.len(), 1);
}

#[test]
fn bundled_layers_pass_self_checks() {
    for c in self_checks() {
        assert!(c.problems.is_empty(), "{}: {:?}", c.layer, c.problems);
    }
}

#[test]
fn hierarchy_shape() {
    let h = hierarchy();
    assert_eq!((h.nodes.len(), h.edges.len()), (10, 13));
    assert!(h.is_acyclic());
    assert_eq!(h.sources(), [BisimKind::WBB]);
    assert_eq!(h.sinks(), [BisimKind::SOB]);
    assert!(h.edges.contains(&(BisimKind::WBB, BisimKind::SBB)));
    assert_eq!(h.stronger_than(BisimKind::WBB).len(), 9);
    assert!(h.stronger_than(BisimKind::SOB).is_empty());
}

fn water_term() -> impl Strategy<Value = Term> {
    let leaf = Just(Term::op("drop", vec![]));
    leaf.prop_recursive(6, 8, 1, |inner| {
        inner.prop_map(|t| Term::op("drink", vec![t]))
    })
}

proptest! {
    #[test]
    fn term_printing_roundtrips(t in water_term()) {
        let sig = flat("Water-Fire");
        prop_assert_eq!(sig.parse_term(&t.to_string()).unwrap(), t.clone());
        prop_assert_eq!(well_sorted(&t, &sig).unwrap(), Sym::new("water"));
    }
}
