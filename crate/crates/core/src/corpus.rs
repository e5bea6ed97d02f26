//! Synthetic CNF problem families.

use std::fmt::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CONSTANTS: [&str; 3] = ["a", "b", "c"];

/// Implication chain `p1`, `~p_i | p_(i+1)` for `i < n`, `~p_n`, with `d`
/// ground unit distractors over fresh predicates `q1..qd` scattered between
/// the chain clauses. The chain clauses keep their relative order; the seed
/// only decides the distractors' shape, polarity and placement.
pub fn gen_chain(n: usize, distractors: usize, seed: u64) -> String {
    let n = n.max(1);
    let mut chain = Vec::with_capacity(n + 1);
    chain.push("cnf(chain_start, axiom, p1).".to_owned());
    for i in 1..n {
        chain.push(format!("cnf(chain_{i}, axiom, ~p{i} | p{}).", i + 1));
    }
    chain.push(format!("cnf(chain_goal, negated_conjecture, ~p{n})."));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut extra = Vec::with_capacity(distractors);
    for k in 1..=distractors {
        let arity = rng.gen_range(0..=2);
        let args: Vec<&str> = (0..arity).map(|_| *CONSTANTS.choose(&mut rng).expect("non-empty")).collect();
        let atom = if args.is_empty() { format!("q{k}") } else { format!("q{k}({})", args.join(",")) };
        let sign = if rng.gen_bool(0.5) { "" } else { "~" };
        // insertion slot among the n + 1 chain clauses (0 = before the first)
        let slot = rng.gen_range(0..=chain.len());
        extra.push((slot, format!("cnf(distractor_{k}, axiom, {sign}{atom}).")));
    }
    extra.sort_by_key(|(slot, _)| *slot);

    let mut out = String::new();
    let _ = writeln!(out, "% chain n={n} distractors={distractors} seed={seed}");
    let mut pending = extra.into_iter().peekable();
    for (i, line) in chain.iter().enumerate() {
        while let Some((_, d)) = pending.next_if(|(slot, _)| *slot == i) {
            out.push_str(&d);
            out.push('\n');
        }
        out.push_str(line);
        out.push('\n');
    }
    for (_, d) in pending {
        out.push_str(&d);
        out.push('\n');
    }
    out
}

pub fn chain_file_name(n: usize, distractors: usize, seed: u64) -> String {
    format!("chain_n{n}_d{distractors}_s{seed}.p")
}
