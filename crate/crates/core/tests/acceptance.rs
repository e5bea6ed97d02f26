//! End-to-end acceptance checks. Prints one PASS/FAIL line per check and
//! exits non-zero if any fails.

mod common;

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use clausegym::agent::{
    self, EpisodeStep, FeatureConfig, FeatureVector, QModel, ReplayBuffer, TrainConfig, Transition,
};
use clausegym::corpus::gen_chain;
use clausegym::env::{Backend, ObservedClause, Status};
use clausegym::logic::{unify, Substitution, UnifyError};
use clausegym::syntax::Term;
use clausegym::tptp::{parse_str, serialize_problem, TptpErrorKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

type Outcome = Result<String, String>;
type Check = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($fmt)+));
        }
    };
}

fn main() {
    let checks: [Check; 10] = [
        ("saturation agrees with truth tables", saturation_oracle),
        ("unification laws", unification_laws),
        ("episode semantics", episode_semantics),
        ("reward conservation and buffer purity", reward_conservation),
        ("recency-weighted sampling", recency_sampling),
        ("gradient check", gradient_check),
        ("learning beats random selection", learning_effect),
        ("deterministic training runs", determinism),
        ("wire protocol golden transcript", golden_transcript),
        ("parser round trip and malformed input", parser_round_trip),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({secs:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("{} of {} acceptance checks passed", checks.len() - failed, checks.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn saturation_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut unsat, mut sat) = (0, 0);
    for case in 0..300 {
        let set = random_ground_set(&mut rng);
        let text = ground_set_text(&set);
        let expected = truth_table_unsat(&set);
        let outcome = saturate(&text);
        ensure!(
            matches!(outcome.status, Status::Refuted | Status::Saturated),
            "case {case}: search stopped by a limit ({})",
            outcome.status
        );
        ensure!(
            outcome.solved() == expected,
            "case {case}: saturation says {}, truth table says {}\n{text}",
            outcome.status,
            if expected { "unsat" } else { "sat" }
        );
        if expected {
            unsat += 1;
        } else {
            sat += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure!(unsat > 20 && sat > 20, "corpus too one-sided: {unsat} unsat, {sat} sat");
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!("300/300 agree ({unsat} unsat, {sat} sat)"))
}

fn random_term(rng: &mut impl Rng, depth: u32) -> Term {
    const VARS: [&str; 4] = ["X", "Y", "Z", "W"];
    let pick = rng.gen_range(0..if depth == 0 { 2 } else { 5 });
    match pick {
        0 => Term::var(VARS[rng.gen_range(0..VARS.len())]),
        1 => Term::constant(["a", "b"][rng.gen_range(0..2)]),
        2 => Term::app("f", vec![random_term(rng, depth - 1)]),
        3 => Term::app("g", vec![random_term(rng, depth - 1), random_term(rng, depth - 1)]),
        _ => {
            Term::app("h", vec![random_term(rng, depth - 1), random_term(rng, depth - 1), random_term(rng, depth - 1)])
        }
    }
}

/// Replaces some variables of `t` by random terms so that pairs unify often.
fn instantiate(rng: &mut impl Rng, t: &Term) -> Term {
    let mut vars = Vec::new();
    t.collect_vars(&mut vars);
    let mut pairs: Vec<(String, Term)> = Vec::new();
    for v in vars {
        if rng.gen_bool(0.5) {
            pairs.push((v.to_owned(), random_term(rng, 1)));
        }
    }
    Substitution::from_pairs(pairs).apply(t)
}

fn unification_laws() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut unified = 0;
    for case in 0..1000 {
        let a = random_term(&mut rng, 3);
        let b = if case % 2 == 0 { instantiate(&mut rng, &a) } else { random_term(&mut rng, 3) };
        if let Ok(s) = unify(&a, &b) {
            unified += 1;
            let (sa, sb) = (s.apply(&a), s.apply(&b));
            ensure!(sa == sb, "case {case}: {s} does not equalise {a} and {b}");
            ensure!(s.is_idempotent(), "case {case}: {s} is not idempotent");
            ensure!(s.apply(&sa) == sa, "case {case}: applying {s} twice changes {sa}");
        }
    }
    let x = Term::var("X");
    let fx = Term::app("f", vec![x.clone()]);
    ensure!(
        matches!(unify(&x, &fx), Err(UnifyError::OccursCheck { .. })),
        "unify(X, f(X)) did not fail the occurs check"
    );
    ensure!(unified >= 300, "only {unified} pairs unified; sample too weak");
    Ok(format!("1000 pairs, {unified} unified, all laws hold; X vs f(X) rejected"))
}

fn chain_env(step_limit: usize, max_clauses: usize) -> clausegym::env::NativeEnv {
    env(&[("chain1".to_owned(), gen_chain(1, 0, 0))], step_limit, max_clauses, 0)
}

fn episode_semantics() -> Outcome {
    let mut e = chain_env(10, 10);
    let obs = e.reset(None).map_err(|x| x.to_string())?;
    ensure!(obs.clauses.len() == 2 && obs.clauses[0].text.contains("p1"), "unexpected initial state");
    let r1 = e.step(0).map_err(|x| x.to_string())?;
    ensure!(r1.reward == 0.0 && !r1.done(), "selecting p1 should not end the episode");
    let r2 = e.step(1).map_err(|x| x.to_string())?;
    ensure!(r2.reward == 0.0 && !r2.done(), "selecting ~p1 should not end the episode");
    ensure!(r2.observation.clauses.len() == 3 && r2.observation.clauses[2].size == 0, "empty clause not derived");
    let r3 = e.step(2).map_err(|x| x.to_string())?;
    ensure!(r3.reward == 1.0 && r3.terminated && !r3.truncated, "refutation step gave {r3:?}");
    ensure!(r3.info.terminal_reason == Some(Status::Refuted), "terminal reason {:?}", r3.info.terminal_reason);
    ensure!(r3.info.proof_clause_ids.as_deref() == Some(&[0, 1, 2][..]), "proof {:?}", r3.info.proof_clause_ids);

    let mut e = chain_env(1, 10);
    e.reset(None).map_err(|x| x.to_string())?;
    let r = e.step(0).map_err(|x| x.to_string())?;
    ensure!(r.truncated && !r.terminated && r.reward == 0.0, "step limit run gave {r:?}");
    ensure!(r.info.terminal_reason == Some(Status::StepLimit), "reason {:?}", r.info.terminal_reason);

    let mut e = chain_env(10, 2);
    e.reset(None).map_err(|x| x.to_string())?;
    // two input clauses already reach the cap, so the first step truncates
    let r = e.step(0).map_err(|x| x.to_string())?;
    ensure!(r.observation.clauses.len() == 2, "clause limit run grew to {}", r.observation.clauses.len());
    ensure!(r.truncated && !r.terminated && r.reward == 0.0, "clause limit run gave {r:?}");
    ensure!(r.info.terminal_reason == Some(Status::ClauseLimit), "reason {:?}", r.info.terminal_reason);
    Ok("refuted in 3 steps with reward 1.0 and proof {0,1,2}; step_limit and clause_limit truncate with 0.0".into())
}

fn reward_conservation() -> Outcome {
    let mut problems: Vec<(String, String)> = Vec::new();
    for (n, d) in [(1, 0), (2, 3), (4, 2), (6, 6), (9, 8)] {
        problems.push((format!("chain_{n}_{d}"), gen_chain(n, d, n as u64)));
    }
    problems.push(("sat_chain".into(), "cnf(a, axiom, p1).\ncnf(b, axiom, ~p1 | p2).\ncnf(c, axiom, q(a)).\n".into()));
    problems.push((
        "fo".into(),
        "cnf(a, axiom, p(X) | q(f(X))).\ncnf(b, axiom, ~q(Y) | r(Y)).\ncnf(c, negated_conjecture, ~r(f(a))).\ncnf(d, axiom, ~p(a)).\n"
            .into(),
    ));
    let mut e = env(&problems, 25, 200, 11);
    let features = FeatureConfig::new(64, 200);
    let config = TrainConfig { episodes: 200, buffer_capacity: 1000, ..TrainConfig::default() };
    let out = agent::train(&mut e, &config, &features, QModel::zero(), &mut ChaCha8Rng::seed_from_u64(11))
        .map_err(|x| x.to_string())?;

    let solved: Vec<_> = out.log.iter().filter(|l| l.terminal == Status::Refuted).collect();
    let failures = out.log.len() - solved.len();
    ensure!(failures > 0 && !solved.is_empty(), "corpus must mix outcomes: {} solved, {failures} failed", solved.len());
    let episodes: Vec<_> = out.buffer.episodes().collect();
    ensure!(episodes.len() == solved.len(), "buffer holds {} episodes, {} were solved", episodes.len(), solved.len());
    for (k, (rec, log)) in episodes.iter().zip(&solved).enumerate() {
        let sum: f64 = rec.transitions.iter().map(|t| t.distributed_reward).sum();
        ensure!((sum - 1.0).abs() <= 1e-12, "episode {k}: rewards sum to {sum}");
        ensure!(rec.final_reward == 1.0, "episode {k}: final reward {}", rec.final_reward);
        ensure!(
            rec.transitions.len() == log.steps && rec.transitions[0].problem_id == log.problem,
            "episode {k} does not match solved log entry {}",
            log.episode
        );
    }
    Ok(format!("{} solved episodes buffered, each summing to 1.0; {failures} failed episodes absent", episodes.len()))
}

fn recency_sampling() -> Outcome {
    let features = FeatureConfig::new(64, 100);
    let step = |id| EpisodeStep {
        action: id,
        selected: ObservedClause { id, order_number: id, text: String::new(), size: 1, processed: false },
    };
    let mut buffer = ReplayBuffer::new(10).map_err(|e| e.to_string())?;
    let proof: BTreeSet<usize> = [0, 1, 2].into();
    let steps = [step(0), step(1), step(2)];
    buffer.record_episode("older", &steps, 1.0, Some(&proof), &features).map_err(|e| e.to_string())?;
    buffer.record_episode("newer", &steps, 1.0, Some(&proof), &features).map_err(|e| e.to_string())?;
    let draws = buffer.sample_batch(10_000, &mut ChaCha8Rng::seed_from_u64(5)).map_err(|e| e.to_string())?;
    let newer = draws.iter().filter(|t| t.problem_id == "newer").count() as f64 / draws.len() as f64;
    ensure!((newer - 2.0 / 3.0).abs() <= 0.03, "newer episode drawn {:.2}% of the time", newer * 100.0);
    Ok(format!("older {:.2}% / newer {:.2}% (expected 33.33 / 66.67)", (1.0 - newer) * 100.0, newer * 100.0))
}

fn gradient_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for case in 0..100 {
        let model =
            QModel { weights: [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)], bias: rng.gen_range(-3.0..3.0) };
        let batch: Vec<Transition> = (0..rng.gen_range(1..=16))
            .map(|i| Transition {
                features: FeatureVector([rng.gen_range(0.0..=1.0), rng.gen_range(0.0..=1.0)]),
                distributed_reward: if rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(0.0..=1.0) },
                problem_id: "p".into(),
                episode_index: 0,
                step_index: i,
            })
            .collect();
        let analytic = model.gradient(&batch);
        let h = 1e-6;
        let numeric = |param: usize| {
            let shifted = |delta: f64| {
                let mut m = model;
                match param {
                    0 | 1 => m.weights[param] += delta,
                    _ => m.bias += delta,
                }
                m.loss(&batch)
            };
            (shifted(h) - shifted(-h)) / (2.0 * h)
        };
        for (param, a) in [analytic.weights[0], analytic.weights[1], analytic.bias].into_iter().enumerate() {
            let n = numeric(param);
            let scale = a.abs().max(n.abs());
            // both vanish: nothing to compare
            if scale < 1e-10 {
                continue;
            }
            let rel = (a - n).abs() / scale;
            worst = worst.max(rel);
            ensure!(rel < 1e-5, "case {case} parameter {param}: analytic {a}, numeric {n}, relative error {rel:e}");
        }
    }
    Ok(format!("100 cases, worst relative error {worst:.2e}"))
}

struct Comparison {
    greedy_solved: usize,
    random_solved: usize,
    greedy_median: f64,
    random_median: f64,
}

fn learning_run(seed: u64) -> Result<Comparison, String> {
    let corpus = chain_corpus(seed);
    let ids: Vec<String> = corpus.iter().map(|(id, _)| id.clone()).collect();
    let features = FeatureConfig::new(64, 1000);
    let mut e = env(&corpus, 100, 1000, seed);
    let config = TrainConfig { episodes: 500, ..TrainConfig::default() };
    let out = agent::train(&mut e, &config, &features, QModel::zero(), &mut ChaCha8Rng::seed_from_u64(seed))
        .map_err(|x| x.to_string())?;
    let steps_to_proof = |results: Vec<(String, Result<agent::EpisodeOutcome, agent::AgentError>)>| {
        results
            .into_iter()
            .map(|(_, r)| r.ok().filter(|o| o.solved()).map(|o| o.steps.len()))
            .collect::<Vec<Option<usize>>>()
    };
    let greedy =
        steps_to_proof(agent::evaluate(&mut e, &ids, &out.model, &features, 0.0, &mut ChaCha8Rng::seed_from_u64(seed)));
    let random = steps_to_proof(agent::evaluate(
        &mut e,
        &ids,
        &QModel::zero(),
        &features,
        1.0,
        &mut ChaCha8Rng::seed_from_u64(seed.wrapping_add(1_000)),
    ));
    let (mut g, mut r) = (Vec::new(), Vec::new());
    for (a, b) in greedy.iter().zip(&random) {
        if let (Some(a), Some(b)) = (a, b) {
            g.push(*a);
            r.push(*b);
        }
    }
    if g.is_empty() {
        return Err(format!("seed {seed}: no commonly solved problems"));
    }
    Ok(Comparison {
        greedy_solved: greedy.iter().flatten().count(),
        random_solved: random.iter().flatten().count(),
        greedy_median: median(&mut g),
        random_median: median(&mut r),
    })
}

fn learning_effect() -> Outcome {
    let start = Instant::now();
    let mut wins = 0;
    let mut summary = Vec::new();
    for seed in 0..5 {
        match learning_run(seed) {
            Ok(c) => {
                let win = c.greedy_solved >= c.random_solved && c.greedy_median < c.random_median;
                wins += usize::from(win);
                summary.push(format!(
                    "s{seed}: {}/{} solved, median {} vs {}{}",
                    c.greedy_solved,
                    c.random_solved,
                    c.greedy_median,
                    c.random_median,
                    if win { "" } else { " (lost)" }
                ));
            }
            Err(e) => summary.push(e),
        }
    }
    let elapsed = start.elapsed();
    ensure!(wins >= 4, "only {wins}/5 seeds improved: {}", summary.join("; "));
    ensure!(elapsed < Duration::from_secs(600), "took {elapsed:?}");
    Ok(format!("{wins}/5 seeds; greedy/random {}", summary.join("; ")))
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_clausegym"))
}

fn run_ok(cmd: &mut Command) -> Result<(), String> {
    let out = cmd.output().map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!("{cmd:?} failed: {}", String::from_utf8_lossy(&out.stderr)))
    }
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let problems = dir.path().join("problems");
    for (n, d, s) in [(3, 2, 1), (5, 4, 2), (7, 6, 3), (4, 8, 4)] {
        run_ok(
            cli()
                .args(["gen", "--family", "chain", "--n", &n.to_string(), "--distractors", &d.to_string()])
                .args(["--seed", &s.to_string(), "--out"])
                .arg(&problems),
        )?;
    }
    let train = |tag: &str| -> Result<(Vec<u8>, Vec<u8>), String> {
        let model = dir.path().join(format!("model_{tag}.json"));
        let log = dir.path().join(format!("log_{tag}.jsonl"));
        run_ok(
            cli()
                .args(["train", "--problems"])
                .arg(&problems)
                .args(["--episodes", "60", "--seed", "42", "--out"])
                .arg(&model)
                .arg("--log")
                .arg(&log),
        )?;
        Ok((fs::read(&model).map_err(|e| e.to_string())?, fs::read(&log).map_err(|e| e.to_string())?))
    };
    let (m1, l1) = train("a")?;
    let (m2, l2) = train("b")?;
    ensure!(!l1.is_empty() && l1.iter().filter(|&&b| b == b'\n').count() == 60, "log does not have 60 lines");
    ensure!(m1 == m2, "model files differ");
    ensure!(l1 == l2, "logs differ");
    Ok(format!("model ({} bytes) and log ({} bytes) identical across runs", m1.len(), l1.len()))
}

fn data(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn golden_transcript() -> Outcome {
    let requests = fs::read(data("golden_requests.jsonl")).map_err(|e| e.to_string())?;
    let expected = fs::read(data("golden_transcript.jsonl")).map_err(|e| e.to_string())?;
    let mut child = cli()
        .args(["serve", "--stdio", "--seed", "7", "--problems"])
        .arg(data("golden_problems"))
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .map_err(|e| e.to_string())?;
    child.stdin.take().expect("piped").write_all(&requests).map_err(|e| e.to_string())?;
    let out = child.wait_with_output().map_err(|e| e.to_string())?;
    ensure!(out.status.success(), "server exited with {}", out.status);
    if out.stdout != expected {
        let got = String::from_utf8_lossy(&out.stdout);
        let want = String::from_utf8_lossy(&expected);
        let line = got
            .lines()
            .zip(want.lines())
            .position(|(a, b)| a != b)
            .map_or("length".into(), |i| format!("line {}", i + 1));
        return Err(format!("transcript differs at {line}"));
    }
    Ok(format!("{} response lines byte-identical", expected.iter().filter(|&&b| b == b'\n').count()))
}

/// Random first-order problem with fixed symbol arities, quoted names,
/// equality and every input role.
fn random_fo_problem(rng: &mut impl Rng) -> String {
    const ROLES: [&str; 6] = ["axiom", "hypothesis", "negated_conjecture", "conjecture", "lemma", "plain"];
    fn term(rng: &mut impl Rng, depth: u32) -> String {
        match rng.gen_range(0..if depth == 0 { 3 } else { 6 }) {
            0 => ["X", "Y", "Z1", "_W"][rng.gen_range(0..4)].to_owned(),
            1 => ["a", "b"][rng.gen_range(0..2)].to_owned(),
            2 => "'Big constant'".to_owned(),
            3 => format!("f({})", term(rng, depth - 1)),
            4 => format!("g({},{})", term(rng, depth - 1), term(rng, depth - 1)),
            _ => format!("'h i'({})", term(rng, depth - 1)),
        }
    }
    let mut text = String::from("% random first-order problem\n");
    for i in 0..rng.gen_range(1..=8) {
        let lits: Vec<String> = (0..rng.gen_range(1..=4))
            .map(|_| {
                let neg = if rng.gen_bool(0.5) { "~" } else { "" };
                match rng.gen_range(0..4) {
                    0 => format!("{neg}p({})", term(rng, 2)),
                    1 => format!("{neg}q({},{})", term(rng, 2), term(rng, 1)),
                    2 => format!("{neg}'Odd pred'"),
                    _ => format!("{} {} {}", term(rng, 2), if neg.is_empty() { "=" } else { "!=" }, term(rng, 2)),
                }
            })
            .collect();
        text.push_str(&format!("cnf(c_{i}, {}, {}).\n", ROLES[rng.gen_range(0..ROLES.len())], lits.join(" | ")));
    }
    text
}

fn parser_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut corpus: Vec<String> = (0..15).map(|k| gen_chain(1 + k % 7, k % 5 * 2, k as u64)).collect();
    corpus.extend((0..15).map(|_| random_fo_problem(&mut rng)));
    for (k, text) in corpus.iter().enumerate() {
        let first = parse_str(text).map_err(|e| format!("problem {k} does not parse: {e}\n{text}"))?;
        let printed = serialize_problem(&first);
        let second = parse_str(&printed).map_err(|e| format!("problem {k} reprint does not parse: {e}\n{printed}"))?;
        ensure!(first == second, "problem {k} changed on round trip:\n{text}\n---\n{printed}");
        ensure!(!first.clauses.is_empty(), "problem {k} is empty");
    }

    let malformed: [(&str, (usize, usize), TptpErrorKind); 10] = [
        ("cnf(a, axiom, p(X)", (1, 19), TptpErrorKind::Syntax),
        ("cnf(a, axiom, p)\ncnf(b, axiom, q).", (2, 1), TptpErrorKind::Syntax),
        ("cnf(a, axiom, p(a) | (q).", (1, 22), TptpErrorKind::Syntax),
        ("cnf(a, axiom, ~~p).", (1, 16), TptpErrorKind::Syntax),
        ("cnf(a, wrong_role, p).", (1, 8), TptpErrorKind::Syntax),
        ("cnf(a, axiom, 'unterminated).", (1, 15), TptpErrorKind::Syntax),
        ("\n  fof(a, axiom, p).", (2, 3), TptpErrorKind::NotCnf),
        ("include('missing.ax').", (1, 1), TptpErrorKind::Include),
        ("cnf(a, axiom, p(a)).\ncnf(b, axiom, q(p(b))).", (2, 17), TptpErrorKind::SignatureConflict),
        ("cnf(a, axiom, p(f(a))).\ncnf(b, axiom, f(b)).", (2, 15), TptpErrorKind::SignatureConflict),
    ];
    for (text, pos, kind) in malformed {
        let err = match catch_unwind(|| parse_str(text)) {
            Ok(Ok(_)) => return Err(format!("{text:?} parsed")),
            Ok(Err(e)) => e,
            Err(_) => return Err(format!("{text:?} aborted the parser")),
        };
        ensure!(
            (err.line, err.column) == pos && err.kind == kind,
            "{text:?}: got {:?} at {}:{}, expected {kind:?} at {}:{}",
            err.kind,
            err.line,
            err.column,
            pos.0,
            pos.1
        );
    }
    Ok("30 problems round-trip structurally; 10 malformed inputs give positioned errors".into())
}
