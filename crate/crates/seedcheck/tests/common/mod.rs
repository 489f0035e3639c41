#![allow(dead_code)]

use proptest::prelude::*;
use seedcheck::corpus::{generate, CorpusConfig, CorpusEntry};
use seedcheck::process::{parse_process, Alphabet, Calculus, DefEnv, Process};

pub fn vp(text: &str) -> (Process, DefEnv) {
    parse_process(text, Calculus::ValuePassing, &Alphabet::default()).unwrap()
}

pub fn vp_in(alpha: &str, text: &str) -> (Alphabet, Process, DefEnv) {
    let alpha = Alphabet::parse(alpha).unwrap();
    let (p, env) = parse_process(text, Calculus::ValuePassing, &alpha).unwrap();
    (alpha, p, env)
}

/// One generated pair per seed value; every fourth is an independent pair.
pub fn entry(seed_value: u64) -> CorpusEntry {
    let cfg = CorpusConfig {
        pairs: 4,
        seed_value,
        ..CorpusConfig::default()
    };
    let mut v = generate(&cfg);
    v.swap_remove((seed_value % 4) as usize)
}

pub fn entries() -> impl Strategy<Value = CorpusEntry> {
    (0u64..100_000).prop_map(entry)
}
