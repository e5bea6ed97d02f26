use std::fs;
use std::io::{self, BufWriter, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use clausegym::agent::{self, FeatureConfig, ModelFile, QModel, TrainConfig, DEFAULT_SIZE_CAP};
use clausegym::corpus;
use clausegym::env::{EnvConfig, NativeEnv, ProblemLibrary};
use clausegym::protocol;
use clausegym::syntax::Inference;
use clausegym::tptp::serialize_clause;

#[derive(Parser)]
#[command(name = "clausegym", version, about = "Reinforcement-learning clause selection for a saturation prover")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct Limits {
    #[arg(long, default_value_t = 100)]
    step_limit: usize,
    #[arg(long, default_value_t = 1000)]
    max_clauses: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Train a model over every *.p problem in a directory.
    Train {
        #[arg(long)]
        problems: PathBuf,
        #[arg(long, default_value_t = 200)]
        episodes: usize,
        #[command(flatten)]
        limits: Limits,
        #[arg(long)]
        out: PathBuf,
        /// Per-episode JSON log; standard output when absent.
        #[arg(long)]
        log: Option<PathBuf>,
        #[arg(long, default_value_t = 32)]
        batch_size: usize,
        #[arg(long, default_value_t = 20)]
        updates_per_episode: usize,
        #[arg(long, default_value_t = 100)]
        buffer_capacity: usize,
        #[arg(long, default_value_t = 1.0)]
        learning_rate: f64,
        #[arg(long, default_value_t = 1.0)]
        eps_start: f64,
        #[arg(long, default_value_t = 0.05)]
        eps_end: f64,
        #[arg(long, default_value_t = DEFAULT_SIZE_CAP)]
        size_cap: usize,
    },
    /// Attempt one problem greedily and print the proof.
    Solve {
        problem: PathBuf,
        #[arg(long)]
        model: Option<PathBuf>,
        #[command(flatten)]
        limits: Limits,
    },
    /// Run one greedy episode per problem and summarise.
    Evaluate {
        #[arg(long)]
        problems: PathBuf,
        #[arg(long)]
        model: Option<PathBuf>,
        #[command(flatten)]
        limits: Limits,
        /// Exploration rate; 1.0 gives the uniform random baseline.
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
    },
    /// Serve the environment over line-delimited JSON.
    #[command(group(ArgGroup::new("transport").required(true).args(["stdio", "tcp"])))]
    Serve {
        #[arg(long)]
        stdio: bool,
        /// Port to listen on; 0 picks a free one.
        #[arg(long)]
        tcp: Option<u16>,
        #[arg(long)]
        problems: PathBuf,
        #[command(flatten)]
        limits: Limits,
    },
    /// Generate a synthetic problem.
    Gen {
        #[arg(long, value_parser = ["chain"])]
        family: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        distractors: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn include_root() -> Option<PathBuf> {
    std::env::var_os("TPTP_ROOT").map(PathBuf::from)
}

fn load_library(dir: &Path) -> Result<ProblemLibrary> {
    if !dir.is_dir() {
        bail!("{} is not a directory", dir.display());
    }
    ProblemLibrary::from_dir(dir, include_root().as_deref()).with_context(|| format!("reading {}", dir.display()))
}

/// Ids of problems that parse; others are reported on stderr.
fn parseable_ids(library: &ProblemLibrary) -> Vec<String> {
    library
        .ids()
        .iter()
        .filter(|id| match library.parse(id) {
            Some(Ok(_)) => true,
            Some(Err(e)) => {
                eprintln!("skipping {id}: {e}");
                false
            }
            None => false,
        })
        .cloned()
        .collect()
}

fn load_model(path: Option<&Path>, max_clauses: usize) -> Result<(QModel, FeatureConfig)> {
    match path {
        Some(p) => {
            let file = ModelFile::load(p)?;
            Ok((file.model(), file.features()))
        }
        None => Ok((QModel::zero(), FeatureConfig::new(DEFAULT_SIZE_CAP, max_clauses))),
    }
}

fn agent_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    rng
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train {
            problems,
            episodes,
            limits,
            out,
            log,
            batch_size,
            updates_per_episode,
            buffer_capacity,
            learning_rate,
            eps_start,
            eps_end,
            size_cap,
        } => {
            let config = TrainConfig {
                episodes,
                eps_start,
                eps_end,
                batch_size,
                updates_per_episode,
                buffer_capacity,
                learning_rate,
                size_cap,
                ..TrainConfig::default()
            };
            cmd_train(&problems, &config, &limits, &out, log.as_deref())
        }
        Command::Solve { problem, model, limits } => cmd_solve(&problem, model.as_deref(), &limits),
        Command::Evaluate { problems, model, limits, epsilon } => {
            cmd_evaluate(&problems, model.as_deref(), &limits, epsilon)
        }
        Command::Serve { stdio, tcp, problems, limits } => cmd_serve(stdio, tcp, &problems, &limits),
        Command::Gen { family: _, n, distractors, seed, out } => cmd_gen(n, distractors, seed, &out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn cmd_train(dir: &Path, config: &TrainConfig, limits: &Limits, out: &Path, log: Option<&Path>) -> Result<ExitCode> {
    let library = load_library(dir)?;
    let ids = parseable_ids(&library);
    if ids.is_empty() {
        bail!("no parseable CNF problems in {}", dir.display());
    }
    let env_config = EnvConfig {
        step_limit: limits.step_limit,
        max_clauses: limits.max_clauses,
        problem_list: ids,
        seed: limits.seed,
    };
    let mut env = NativeEnv::new(env_config, Arc::new(library))?;
    let features = FeatureConfig::new(config.size_cap, limits.max_clauses);
    let output = agent::train(&mut env, config, &features, QModel::zero(), &mut agent_rng(limits.seed))?;

    let mut sink: Box<dyn Write> = match log {
        Some(p) => Box::new(BufWriter::new(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    for entry in &output.log {
        writeln!(sink, "{}", serde_json::to_string(entry)?)?;
    }
    sink.flush()?;
    ModelFile::new(&output.model, &features).save(out)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_solve(path: &Path, model: Option<&Path>, limits: &Limits) -> Result<ExitCode> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            return Ok(ExitCode::from(2));
        }
    };
    let root = include_root().or_else(|| path.parent().map(Path::to_path_buf)).unwrap_or_default();
    let resolver = move |name: &str| fs::read_to_string(root.join(name)).map_err(|e| e.to_string());
    let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "problem".into());
    let mut library = ProblemLibrary::new().with_resolver(resolver);
    library.insert(id.clone(), text);
    if let Some(Err(e)) = library.parse(&id) {
        eprintln!("error: {}: {e}", path.display());
        return Ok(ExitCode::from(2));
    }

    let (model, features) = load_model(model, limits.max_clauses)?;
    let env_config = EnvConfig {
        step_limit: limits.step_limit,
        max_clauses: limits.max_clauses,
        problem_list: vec![id.clone()],
        seed: limits.seed,
    };
    let mut env = NativeEnv::new(env_config, Arc::new(library))?;
    let outcome = agent::play_episode(&mut env, Some(&id), &model, &features, 0.0, &mut agent_rng(limits.seed))?;
    if !outcome.solved() {
        println!(
            "% no proof: {} after {} steps, {} clauses",
            outcome.status,
            outcome.steps.len(),
            outcome.clause_count
        );
        return Ok(ExitCode::from(1));
    }
    let state = env.state().expect("episode ran");
    let proof = outcome.proof_ids.unwrap_or_default();
    println!("% proof of {id} found in {} steps", outcome.steps.len());
    for clause in proof.iter().map(|&i| &state.clauses[i]) {
        match &clause.inference {
            Inference::Input => println!("% {}: input", clause.label),
            Inference::Derived { rule, parents } => {
                let names: Vec<&str> = parents.iter().map(|&p| state.clauses[p].label.as_str()).collect();
                println!("% {}: {rule} from {}", clause.label, names.join(", "));
            }
        }
        println!("{}", serialize_clause(clause));
    }
    Ok(ExitCode::SUCCESS)
}

fn median(values: &mut [usize]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_unstable();
    let mid = values.len() / 2;
    Some(if values.len().is_multiple_of(2) { (values[mid - 1] + values[mid]) as f64 / 2.0 } else { values[mid] as f64 })
}

fn cmd_evaluate(dir: &Path, model_path: Option<&Path>, limits: &Limits, epsilon: f64) -> Result<ExitCode> {
    let library = load_library(dir)?;
    let ids = library.ids().to_vec();
    if ids.is_empty() {
        bail!("no problems in {}", dir.display());
    }
    let (model, features) = load_model(model_path, limits.max_clauses)?;
    let env_config = EnvConfig {
        step_limit: limits.step_limit,
        max_clauses: limits.max_clauses,
        problem_list: ids.clone(),
        seed: limits.seed,
    };
    let mut env = NativeEnv::new(env_config, Arc::new(library))?;
    let results = agent::evaluate(&mut env, &ids, &model, &features, epsilon, &mut agent_rng(limits.seed));

    match model_path {
        Some(p) => println!("# model: {}", p.display()),
        None => println!("# model: zero (no --model given)"),
    }
    println!("# epsilon: {epsilon}");
    println!("{:<32} {:<12} {:>6} {:>8} {:>6}", "problem", "result", "steps", "clauses", "errors");
    let (mut solved, mut errors) = (0usize, 0usize);
    let mut proof_steps = Vec::new();
    for (id, result) in &results {
        match result {
            Ok(o) => {
                if o.solved() {
                    solved += 1;
                    proof_steps.push(o.steps.len());
                }
                let tag = if o.solved() { "solved".to_owned() } else { o.status.to_string() };
                println!("{id:<32} {tag:<12} {:>6} {:>8} {:>6}", o.steps.len(), o.clause_count, 0);
            }
            Err(e) => {
                errors += 1;
                eprintln!("{id}: {e}");
                println!("{id:<32} {:<12} {:>6} {:>8} {:>6}", "error", "-", "-", 1);
            }
        }
    }
    let med = median(&mut proof_steps).map_or_else(|| "-".to_owned(), |m| m.to_string());
    println!("# total: {} problems, {solved} solved, {errors} errors, median steps to proof {med}", results.len());
    Ok(ExitCode::SUCCESS)
}

fn cmd_serve(stdio: bool, tcp: Option<u16>, dir: &Path, limits: &Limits) -> Result<ExitCode> {
    let library = Arc::new(load_library(dir)?);
    let config = EnvConfig {
        step_limit: limits.step_limit,
        max_clauses: limits.max_clauses,
        problem_list: library.ids().to_vec(),
        seed: limits.seed,
    };
    if stdio {
        let env = NativeEnv::new(config, library)?;
        protocol::serve_session(env, io::stdin().lock(), io::stdout().lock())?;
        return Ok(ExitCode::SUCCESS);
    }
    let port = tcp.expect("clap enforces one transport");
    let listener = TcpListener::bind(("127.0.0.1", port)).with_context(|| format!("binding port {port}"))?;
    println!("{}", listener.local_addr()?.port());
    io::stdout().flush()?;
    NativeEnv::new(config.clone(), library.clone())?;
    protocol::serve_tcp(listener, move || NativeEnv::new(config.clone(), library.clone()))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_gen(n: usize, distractors: usize, seed: u64, out: &Path) -> Result<ExitCode> {
    if n == 0 {
        bail!("--n must be at least 1");
    }
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let path = out.join(corpus::chain_file_name(n, distractors, seed));
    fs::write(&path, corpus::gen_chain(n, distractors, seed)).with_context(|| format!("writing {}", path.display()))?;
    println!("{}", path.display());
    Ok(ExitCode::SUCCESS)
}
