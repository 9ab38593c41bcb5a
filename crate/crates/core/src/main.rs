use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use winpar::io::{export_dot, export_product_dot, parse_game, parse_lasso, read_strategy, write_game, write_strategy};
use winpar::objectives::check_lasso;
use winpar::oracle::{paper_gallery, run_corpus, CorpusConfig, CrossCheckOptions, Execution, OracleError};
use winpar::reductions::{solve_with, ReductionError, SolveOptions, SolveResult, Via};
use winpar::synthesis::{certify, verify_strategy, SynthesisError};
use winpar::{Arena, ObjectiveKind, ObjectiveSpec, Player};

#[derive(Parser)]
#[command(name = "winpar", version, about = "Solve window parity games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide an objective and report winners.
    Solve {
        #[command(flatten)]
        objective: ObjectiveArgs,
        /// Vertex to report (defaults to the file's `init`).
        #[arg(long)]
        init: Option<String>,
        /// Report full winning regions.
        #[arg(long)]
        all: bool,
        /// Write a winning strategy for the winner of the initial vertex.
        #[arg(long, value_name = "OUT")]
        strategy: Option<PathBuf>,
    },
    /// Check membership of a lasso `stem | cycle`.
    Check {
        #[command(flatten)]
        objective: ObjectiveArgs,
        #[arg(long)]
        lasso: String,
    },
    /// Verify a strategy file from an initial vertex.
    Verify {
        #[command(flatten)]
        objective: ObjectiveArgs,
        #[arg(long, value_name = "S")]
        strategy: PathBuf,
        #[arg(long)]
        init: Option<String>,
    },
    /// Build the product game and report its size.
    Product {
        #[command(flatten)]
        objective: ObjectiveArgs,
        #[arg(long, value_name = "OUT")]
        emit_dot: Option<PathBuf>,
    },
    /// Run the cross-check corpus.
    Oracle {
        /// Seed range `A..B`.
        #[arg(long, default_value = "0..500")]
        seeds: String,
        #[arg(long, default_value_t = 6)]
        max_v: usize,
        #[arg(long, default_value_t = 4)]
        max_lambda: u32,
        #[arg(long, default_value_t = 2)]
        max_dims: usize,
        #[arg(long, default_value_t = 4)]
        max_priority: u32,
        /// Also run threshold, construction and strategy checks.
        #[arg(long)]
        full: bool,
        #[arg(long)]
        sequential: bool,
    },
    /// Write a gallery arena as a game file.
    Gallery {
        #[arg(long)]
        name: String,
        /// `n=..` or `d=..`.
        #[arg(long)]
        param: Option<String>,
        #[arg(long)]
        out: PathBuf,
        /// Also write a DOT rendering next to the game file.
        #[arg(long)]
        dot: bool,
    },
}

#[derive(Args)]
struct ObjectiveArgs {
    #[arg(long)]
    file: PathBuf,
    #[arg(long, value_parser = parse_kind)]
    obj: ObjectiveKind,
    #[arg(long)]
    direct: bool,
    #[arg(long)]
    lambda: Option<u32>,
    /// Comma-separated vertex ids; repeat for each generalized-reachability target.
    #[arg(long = "target", value_name = "IDS")]
    targets: Vec<String>,
    #[arg(long, value_enum, default_value_t = ViaArg::Auto)]
    via: ViaArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum ViaArg {
    Auto,
    /// Product construction; thresholds for bounded objectives.
    Product,
    /// Request-response encoding (bounded objectives).
    Rr,
    /// History product (FixPR).
    History,
}

fn parse_kind(s: &str) -> Result<ObjectiveKind, String> {
    s.parse().map_err(|e: winpar::SpecError| e.to_string())
}

enum Failure {
    Parse(String),
    Argument(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Parse(_) => 2,
            Failure::Argument(_) => 3,
            Failure::Internal(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Parse(m) | Failure::Argument(m) | Failure::Internal(m) => m,
        }
    }
}

impl From<ReductionError> for Failure {
    fn from(e: ReductionError) -> Self {
        Failure::Argument(e.to_string())
    }
}

type Outcome = Result<Value, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(3) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(value) => {
            println!("{value}");
            ExitCode::SUCCESS
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Solve { objective, init, all, strategy } => {
            solve(&objective, init.as_deref(), all, strategy.as_deref())
        }
        Command::Check { objective, lasso } => check(&objective, &lasso),
        Command::Verify { objective, strategy, init } => verify(&objective, &strategy, init.as_deref()),
        Command::Product { objective, emit_dot } => product(&objective, emit_dot.as_deref()),
        Command::Oracle { seeds, max_v, max_lambda, max_dims, max_priority, full, sequential } => {
            let seeds = parse_seeds(&seeds)?;
            let config = CorpusConfig {
                seeds,
                max_vertices: max_v,
                max_dims,
                max_priority,
                check: CrossCheckOptions {
                    lambdas: (1..=max_lambda).collect(),
                    thresholds: full,
                    constructions: full,
                    strategies: full,
                    ..CrossCheckOptions::default()
                },
            };
            let execution = if sequential { Execution::Sequential } else { Execution::Parallel };
            let report = run_corpus(&config, execution);
            let value = serde_json::to_value(&report).map_err(|e| Failure::Internal(e.to_string()))?;
            if report.total.violations.is_empty() {
                Ok(value)
            } else {
                println!("{value}");
                Err(Failure::Internal(format!("{} violations", report.total.violations.len())))
            }
        }
        Command::Gallery { name, param, out, dot } => gallery(&name, param.as_deref(), &out, dot),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Argument(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Argument(format!("{}: {e}", path.display())))
}

struct Loaded {
    arena: Arena,
    initial: Option<usize>,
    spec: ObjectiveSpec,
    options: SolveOptions,
}

fn load(args: &ObjectiveArgs) -> Result<Loaded, Failure> {
    let game = parse_game(&read(&args.file)?).map_err(|e| Failure::Parse(e.to_string()))?;
    let arena = game.arena;
    let mut targets = Vec::new();
    for list in &args.targets {
        let set = list
            .split(',')
            .filter(|s| !s.is_empty())
            .map(|id| vertex(&arena, id.trim()))
            .collect::<Result<Vec<_>, _>>()?;
        targets.push(set);
    }
    let mut spec = ObjectiveSpec::new(args.obj, args.direct, args.lambda);
    if args.obj.uses_targets() {
        spec.targets = targets;
    } else if !targets.is_empty() {
        return Err(Failure::Argument(format!("--target does not apply to {}", args.obj.name())));
    }
    spec.check_for(&arena).map_err(|e| Failure::Argument(e.to_string()))?;
    let via = match args.via {
        ViaArg::Auto => Via::Auto,
        ViaArg::Product if args.obj.is_bounded() => Via::Threshold,
        ViaArg::Product => Via::Auto,
        ViaArg::Rr => Via::RequestResponse,
        ViaArg::History => Via::History,
    };
    Ok(Loaded { arena, initial: game.initial, spec, options: SolveOptions::via(via) })
}

fn vertex(arena: &Arena, id: &str) -> Result<usize, Failure> {
    arena.vertex(id).ok_or_else(|| Failure::Argument(format!("unknown vertex `{id}`")))
}

fn initial_vertex(loaded: &Loaded, init: Option<&str>) -> Result<Option<usize>, Failure> {
    match init {
        Some(id) => vertex(&loaded.arena, id).map(Some),
        None => Ok(loaded.initial),
    }
}

fn describe(result: &SolveResult) -> Value {
    json!({
        "objective": result.spec.to_string(),
        "route": result.route,
        "lambda": result.lambda,
        "threshold": result.threshold,
        "product_states": result.product.len(),
    })
}

fn solve(args: &ObjectiveArgs, init: Option<&str>, all: bool, strategy_out: Option<&Path>) -> Outcome {
    let loaded = load(args)?;
    let arena = &loaded.arena;
    let initial = initial_vertex(&loaded, init)?;
    let result = solve_with(arena, &loaded.spec, initial, &loaded.options)?;
    let mut out = describe(&result);
    if all || initial.is_none() {
        let mut regions: BTreeMap<String, Vec<&str>> = BTreeMap::new();
        regions.insert("P1".into(), Vec::new());
        regions.insert("P2".into(), Vec::new());
        for v in 0..arena.len() {
            regions.get_mut(&result.regions.winner(v).to_string()).unwrap().push(arena.id(v));
        }
        out["regions"] = json!(regions);
    }
    if let Some(v) = initial {
        out["winners"] = json!({ arena.id(v): result.regions.winner(v).to_string() });
    }
    if let Some(path) = strategy_out {
        let v = initial.ok_or_else(|| Failure::Argument("--strategy needs an initial vertex".into()))?;
        let player = result.regions.winner(v);
        out["strategy"] = match certify(arena, &result, player) {
            Ok(cert) => {
                write(path, &write_strategy(arena, &cert.strategy))?;
                json!({
                    "player": player.to_string(),
                    "memory": cert.strategy.size(),
                    "memory_bound": cert.memory_bound,
                    "file": path.display().to_string(),
                })
            }
            Err(e @ SynthesisError::NoFiniteCertificate(_)) => {
                json!({ "player": player.to_string(), "error": e.to_string() })
            }
            Err(e) => return Err(Failure::Internal(e.to_string())),
        };
    }
    Ok(out)
}

fn check(args: &ObjectiveArgs, lasso: &str) -> Outcome {
    let loaded = load(args)?;
    let lasso = parse_lasso(lasso, &loaded.arena).map_err(|e| Failure::Parse(e.to_string()))?;
    let outcome = check_lasso(&loaded.arena, &lasso, &loaded.spec).map_err(|e| Failure::Argument(e.to_string()))?;
    Ok(json!({
        "objective": loaded.spec.to_string(),
        "lasso": lasso.display(&loaded.arena),
        "holds": outcome.holds,
        "witness": outcome.witness,
    }))
}

fn verify(args: &ObjectiveArgs, strategy: &Path, init: Option<&str>) -> Outcome {
    let loaded = load(args)?;
    let arena = &loaded.arena;
    let strategy = read_strategy(&read(strategy)?, arena).map_err(|e| Failure::Parse(e.to_string()))?;
    let v = initial_vertex(&loaded, init)?.ok_or_else(|| Failure::Argument("--init is required".into()))?;
    let verification =
        verify_strategy(arena, &strategy, &loaded.spec, v).map_err(|e| Failure::Argument(e.to_string()))?;
    let mut out = json!({
        "objective": loaded.spec.to_string(),
        "player": strategy.player().to_string(),
        "memory": strategy.size(),
        "init": arena.id(v),
        "winning": verification.winning,
    });
    if let Some(lasso) = &verification.counterexample {
        let holds = check_lasso(arena, lasso, &loaded.spec).map_err(|e| Failure::Internal(e.to_string()))?.holds;
        if holds == (strategy.player() == Player::P1) {
            return Err(Failure::Internal(format!(
                "counterexample {} does not refute the strategy",
                lasso.display(arena)
            )));
        }
        out["counterexample"] = json!(lasso.display(arena));
    }
    Ok(out)
}

fn product(args: &ObjectiveArgs, dot: Option<&Path>) -> Outcome {
    let loaded = load(args)?;
    let result = solve_with(&loaded.arena, &loaded.spec, loaded.initial, &loaded.options)?;
    let product = &result.product;
    if let Some(path) = dot {
        write(path, &export_product_dot(&loaded.arena, product))?;
    }
    let mut out = describe(&result);
    out["edges"] = json!(product.graph().edge_count());
    out["beta_states"] = json!((0..product.len()).filter(|&s| product.is_beta(s)).count());
    Ok(out)
}

fn parse_seeds(s: &str) -> Result<std::ops::Range<u64>, Failure> {
    let bad = || Failure::Argument(format!("--seeds expects A..B, got `{s}`"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let a: u64 = a.parse().map_err(|_| bad())?;
    let b: u64 = b.parse().map_err(|_| bad())?;
    if a >= b {
        return Err(bad());
    }
    Ok(a..b)
}

fn gallery(name: &str, param: Option<&str>, out: &Path, dot: bool) -> Outcome {
    let value = match param {
        None => None,
        Some(p) => {
            let raw = p.split_once('=').map_or(p, |(_, v)| v);
            Some(raw.parse::<u32>().map_err(|_| Failure::Argument(format!("bad --param `{p}`")))?)
        }
    };
    let arena = paper_gallery(name, value).map_err(|e| match e {
        OracleError::UnknownGallery(_) | OracleError::Parameter(..) => Failure::Argument(e.to_string()),
        other => Failure::Internal(other.to_string()),
    })?;
    write(out, &write_game(&arena, Some(0)))?;
    let mut result = json!({
        "name": name,
        "vertices": arena.len(),
        "dims": arena.dims(),
        "file": out.display().to_string(),
    });
    if dot {
        let path = out.with_extension("dot");
        write(&path, &export_dot(&arena))?;
        result["dot"] = json!(path.display().to_string());
    }
    Ok(result)
}
