#![allow(dead_code)]

use std::sync::Arc;

use clausegym::agent::{self, EpisodeOutcome, FeatureConfig, QModel};
use clausegym::corpus::gen_chain;
use clausegym::env::{EnvConfig, NativeEnv, ProblemLibrary};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Ground atoms used by random clause sets, so that resolution has to unify
/// compound terms as well as bare propositions.
pub const GROUND_ATOMS: [&str; 4] = ["p", "q(a)", "r(a,f(b))", "s(g(a,b))"];

/// Clause as (atom index, polarity) pairs.
pub type GroundClause = Vec<(usize, bool)>;

pub fn random_ground_set(rng: &mut impl Rng) -> Vec<GroundClause> {
    let atoms = rng.gen_range(1..=GROUND_ATOMS.len());
    let clauses = rng.gen_range(1..=4);
    (0..clauses)
        .map(|_| {
            let len = rng.gen_range(1..=3);
            (0..len).map(|_| (rng.gen_range(0..atoms), rng.gen_bool(0.5))).collect()
        })
        .collect()
}

pub fn ground_set_text(set: &[GroundClause]) -> String {
    set.iter()
        .enumerate()
        .map(|(i, c)| {
            let lits: Vec<String> =
                c.iter().map(|&(a, pos)| format!("{}{}", if pos { "" } else { "~" }, GROUND_ATOMS[a])).collect();
            format!("cnf(g{i}, axiom, {}).\n", lits.join(" | "))
        })
        .collect()
}

/// Brute force over every assignment of the atoms that occur.
pub fn truth_table_unsat(set: &[GroundClause]) -> bool {
    let n = GROUND_ATOMS.len();
    !(0u32..1 << n).any(|v| set.iter().all(|c| c.iter().any(|&(a, pos)| (v >> a & 1 == 1) == pos)))
}

pub fn library(problems: &[(String, String)]) -> Arc<ProblemLibrary> {
    let mut lib = ProblemLibrary::new();
    for (id, text) in problems {
        lib.insert(id.clone(), text.clone());
    }
    Arc::new(lib)
}

pub fn env(problems: &[(String, String)], step_limit: usize, max_clauses: usize, seed: u64) -> NativeEnv {
    let lib = library(problems);
    let config = EnvConfig { step_limit, max_clauses, problem_list: lib.ids().to_vec(), seed };
    NativeEnv::new(config, lib).expect("valid env")
}

/// Runs the given clause loop to its end with first-in-first-out selection
/// (the zero model ranks every clause equally and ties go to the lowest
/// index), which is fair, so saturation is exhaustive.
pub fn saturate(text: &str) -> EpisodeOutcome {
    let problems = [("p".to_owned(), text.to_owned())];
    let mut env = env(&problems, 1_000_000, 1_000_000, 0);
    let features = FeatureConfig::new(64, 1_000_000);
    agent::play_episode(&mut env, Some("p"), &QModel::zero(), &features, 0.0, &mut ChaCha8Rng::seed_from_u64(0))
        .expect("episode runs")
}

/// Twenty chain problems with n in 5..=10 and 4..=8 distractors.
pub fn chain_corpus(seed: u64) -> Vec<(String, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    (0..20)
        .map(|k| {
            let n = rng.gen_range(5..=10);
            let d = rng.gen_range(4..=8);
            (format!("chain{k:02}_n{n}_d{d}"), gen_chain(n, d, seed * 100 + k))
        })
        .collect()
}

pub fn median(values: &mut [usize]) -> f64 {
    values.sort_unstable();
    let m = values.len() / 2;
    if values.len().is_multiple_of(2) {
        (values[m - 1] + values[m]) as f64 / 2.0
    } else {
        values[m] as f64
    }
}
