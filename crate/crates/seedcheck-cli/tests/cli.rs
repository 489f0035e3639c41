use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seedcheck"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const INTERLEAVED: [&str; 2] = ["c?u.d!a.nil + d!a.c?u.nil", "c?u.nil | d!a.nil"];
const LATE_CHOICE: [&str; 2] = ["c!u.d!a.nil + c!u.d!b.nil", "c!u.(d!a.nil + d!b.nil)"];

#[test]
fn exit_codes() {
    let o = run(&["check", "-e", INTERLEAVED[0], "-e", INTERLEAVED[1]]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("agreement: true"));
    let o = run(&[
        "check",
        "--kind",
        "seb",
        "-e",
        LATE_CHOICE[0],
        "-e",
        LATE_CHOICE[1],
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("right plays d!b to nil; no answer"));
    assert_eq!(
        run(&["check", "-e", "c!z.nil", "-e", "nil"]).status.code(),
        Some(4)
    );
    assert_eq!(
        run(&["check", "--kind", "bogus", "-e", "nil", "-e", "nil"])
            .status
            .code(),
        Some(4)
    );
    assert_eq!(
        run(&[
            "check",
            "--kind",
            "trace",
            "-e",
            LATE_CHOICE[0],
            "-e",
            LATE_CHOICE[1]
        ])
        .status
        .code(),
        Some(0)
    );
}

#[test]
fn tight_state_limit_overflows() {
    let o = run(&[
        "--state-limit",
        "1",
        "check",
        "-e",
        INTERLEAVED[0],
        "-e",
        INTERLEAVED[1],
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
}

#[test]
fn hierarchy_graph() {
    let o = run(&["hierarchy"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("nodes: WBB SBB WGB WEB WLB WOB SGB SEB SLB SOB\nedges: 13\n"));
    assert_eq!(out.lines().filter(|l| l.contains(" <- ")).count(), 13);
}

#[test]
fn rewrite_prints_grouped_chain() {
    let o = run(&[
        "rewrite",
        "--adt",
        "trans-example",
        "--alphabet",
        "names=a,b,c channels=d",
        "act(b, left(right(sum(pre(a, p), compo(pre(b, q), pre(c, r))))))",
    ]);
    assert!(o.status.success());
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[4], "= compol(q, pre(c, r))");
}

#[test]
fn closures_of_a_basic_sum() {
    let o = run(&[
        "closures",
        "--adt",
        "trans",
        "--alphabet",
        "names=a,b channels=c",
        "-e",
        "a.b.nil + b.a.nil + a.b.nil",
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("act([a],[q]) = {pre(b,nil)}"));
    assert!(out.contains("act([b],[act([a],[q])]) = {nil}"));
}

#[test]
fn machine_reports_are_deterministic_and_parse_back() {
    let args = [
        "check",
        "--format",
        "machine",
        "-e",
        LATE_CHOICE[0],
        "-e",
        LATE_CHOICE[1],
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let r = seedcheck::report::Report::from_machine(&stdout(&a)).unwrap();
    assert_eq!(r.exit_code, 1);
    assert_eq!(r.agreement, Some(true));
    assert_eq!(r.to_machine(), stdout(&a).trim_end());
}

#[test]
fn small_corpus_is_clean() {
    let o = run(&["corpus", "--pairs", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("clean: true"));
}
