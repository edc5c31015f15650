//! `tgame`: certificate reports, playouts, simulations, exact solving and
//! tournament enumeration from the command line.
//!
//! Every subcommand writes JSON lines to standard output or `--output`.
//! Exit codes: 0 on success, 2 on usage or precondition errors, 3 when the
//! exact solver refuses an instance, 1 on I/O failure.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tournament_game::bounds::{
    certificate_point, coupled_log2_n, known_bounds_report, scan_certificate, scan_g,
    tournament_count_lower, ClusterBoundMode,
};
use tournament_game::game::{
    play_out, Board, ElementId, ExplicitFamily, GameState, RandomStrategy, Strategy,
};
use tournament_game::golden;
use tournament_game::orientation::{
    es_obreaker, obreaker_certificate, play_orientation, OrStrategy, OrientationState,
    RandomOrPlayer,
};
use tournament_game::potential::{es_criterion, PotentialBreaker, PotentialMaker};
use tournament_game::random_games::{estimate_threshold, TrialConfig, Variant};
use tournament_game::solver::{
    solve_mb, solve_orientation, OptimalMbPlayer, OptimalOrPlayer, SolverConfig, DEFAULT_MB_LIMIT,
    DEFAULT_OR_LIMIT,
};
use tournament_game::tournament::{
    enumerate_tournaments, maker_tournament_wrapper, reduced_clique_game, tournament_game,
    transitive_strategy_wrapper, Partition, Tournament,
};
use tournament_game::{Error, Log2Real};

/// Environment variable holding the worker-thread count for simulations.
const THREADS_ENV: &str = "TGAME_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "tgame",
    version,
    about = "Maker-Breaker tournament game toolkit"
)]
struct Cli {
    /// Write records here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Known bounds on the clique, tournament and orientation thresholds.
    Bounds {
        #[arg(long)]
        n: u64,
    },
    /// Potential certificates: the p = 4 weak-win pipeline and the
    /// Erdős–Selfridge Breaker bound.
    Criterion(CriterionArgs),
    /// One seeded game, written as a transcript.
    Play(PlayArgs),
    /// Random-vs-random win frequencies over a range of k.
    Simulate(SimulateArgs),
    /// Exact minimax on a tiny instance.
    Solve(SolveArgs),
    /// Non-isomorphic tournaments on k vertices.
    Enumerate {
        #[arg(long)]
        k: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Lemma,
    #[value(alias = "triple_sum")]
    TripleSum,
}

impl From<Mode> for ClusterBoundMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Lemma => ClusterBoundMode::Lemma,
            Mode::TripleSum => ClusterBoundMode::TripleSum,
        }
    }
}

#[derive(Args, Debug)]
struct CriterionArgs {
    /// Evaluate at n = k 2^{(k+9)/2} for this k.
    #[arg(long)]
    couple_k: Option<u32>,
    /// Board order; with --k evaluates at an explicit (n, k).
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    k: Option<u32>,
    /// Cluster order of the weak-win check; only 4 has a cluster bound.
    #[arg(long, default_value_t = 4)]
    p: u32,
    #[arg(long, value_enum, default_value = "lemma")]
    mode: Mode,
    /// Scan the coupling for 3 <= k <= this value.
    #[arg(long)]
    scan: Option<u32>,
    /// Scan the largest cluster factor for 3 <= k <= this value.
    #[arg(long)]
    g_scan: Option<u32>,
    /// Erdős–Selfridge bound for the OBreaker at (--n, --k).
    #[arg(long)]
    es: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GameKind {
    /// Tournament game on K_n; Maker orients her edges.
    Tournament,
    /// Transversal clique game on the balanced k-partite board.
    Reduced,
    /// Orientation game; both players direct edges.
    Orientation,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MakerKind {
    Random,
    /// Potential Maker (through the transversal reduction for tournaments).
    Potential,
    /// Potential clique Maker orienting every edge upward (transitive goals).
    Transitive,
    Optimal,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BreakerKind {
    Random,
    /// Erdős–Selfridge Breaker (the wrapped OBreaker in orientation games).
    Es,
    Optimal,
}

#[derive(Args, Debug)]
struct PlayArgs {
    #[arg(long, value_enum)]
    game: GameKind,
    #[arg(long)]
    n: usize,
    /// Goal size; the goal defaults to the transitive tournament on k vertices.
    #[arg(long)]
    k: Option<usize>,
    /// Goal tournament: a file in the tournament text format, or one of
    /// `transitive:K`, `cyclic:3`.
    #[arg(long)]
    goal: Option<String>,
    #[arg(long, default_value_t = 1)]
    a: u32,
    #[arg(long, default_value_t = 1)]
    b: u32,
    #[arg(long, value_enum, default_value = "random")]
    maker: MakerKind,
    #[arg(long, value_enum, default_value = "random")]
    breaker: BreakerKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long)]
    variant: Variant,
    #[arg(long)]
    n: usize,
    /// Inclusive range `LO:HI`.
    #[arg(long, value_parser = parse_k_range)]
    k_range: (usize, usize),
    #[arg(long, default_value_t = 200)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fixed goal tournament; only valid when the range is a single k.
    #[arg(long)]
    goal: Option<String>,
    /// Emit the rows as CSV instead of a JSON record.
    #[arg(long)]
    csv: bool,
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// Re-solve the golden instance list and emit the golden file.
    #[arg(long)]
    golden: bool,
    /// Orientation game on K_n with this goal.
    #[arg(long)]
    goal: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// Maker-Breaker game: winning sets as `0,1;0,2`.
    #[arg(long)]
    sets: Option<String>,
    #[arg(long)]
    board_size: Option<usize>,
    #[arg(long, default_value_t = 1)]
    a: u32,
    #[arg(long, default_value_t = 1)]
    b: u32,
    /// Largest open instance accepted (elements or edges).
    #[arg(long)]
    limit: Option<usize>,
}

fn parse_k_range(s: &str) -> Result<(usize, usize), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected LO:HI, got {s:?}"))?;
    let lo: usize = lo.trim().parse().map_err(|e| format!("bad LO: {e}"))?;
    let hi: usize = hi.trim().parse().map_err(|e| format!("bad HI: {e}"))?;
    if lo == 0 || lo > hi {
        return Err(format!("need 1 <= LO <= HI, got {lo}:{hi}"));
    }
    Ok((lo, hi))
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::SolverLimit { .. } => 3,
            Error::IllegalStrategyMove { cause, .. }
                if matches!(**cause, Error::SolverLimit { .. }) =>
            {
                3
            }
            Error::Io(_) => 1,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

type Outcome<T> = Result<T, Failure>;

fn load_goal(name_or_path: &str) -> Outcome<Tournament> {
    if name_or_path.starts_with("transitive:") || name_or_path.starts_with("cyclic:") {
        return Ok(Tournament::named(name_or_path)?);
    }
    let text = fs::read_to_string(name_or_path)
        .map_err(|e| usage(format!("cannot read goal file {name_or_path}: {e}")))?;
    Ok(Tournament::parse(&text)?)
}

fn goal_or_transitive(goal: &Option<String>, k: Option<usize>) -> Outcome<Tournament> {
    match (goal, k) {
        (Some(g), k) => {
            let t = load_goal(g)?;
            if let Some(k) = k {
                if k != t.k() {
                    return Err(usage(format!("goal has {} vertices but --k is {k}", t.k())));
                }
            }
            Ok(t)
        }
        (None, Some(k)) => Ok(Tournament::transitive(k)),
        (None, None) => Err(usage("give --k or --goal")),
    }
}

fn record(kind: &str, body: impl serde::Serialize) -> Outcome<Value> {
    let mut v = serde_json::to_value(body).map_err(Error::from)?;
    match v.as_object_mut() {
        Some(map) => {
            map.insert("type".into(), json!(kind));
            Ok(v)
        }
        None => Ok(json!({ "type": kind, "value": v })),
    }
}

fn run_bounds(n: u64) -> Outcome<Vec<Value>> {
    Ok(vec![record("bounds", known_bounds_report(n)?)?])
}

fn run_criterion(args: &CriterionArgs) -> Outcome<Vec<Value>> {
    let mode: ClusterBoundMode = args.mode.into();
    let mut out = Vec::new();
    if args.es {
        let (n, k) = match (args.n, args.k) {
            (Some(n), Some(k)) => (n, k),
            _ => return Err(usage("--es needs --n and --k")),
        };
        out.push(record(
            "obreaker_certificate",
            obreaker_certificate(n, k as u64),
        )?);
    }
    if let Some(k_max) = args.g_scan {
        out.push(record("g_scan", scan_g(k_max))?);
    }
    if let Some(k_max) = args.scan {
        out.push(record("certificate_scan", scan_certificate(k_max, mode))?);
    }
    let point = match (args.couple_k, args.n, args.k) {
        (Some(k), None, _) => Some((coupled_log2_n(k), k)),
        (None, Some(n), Some(k)) if !args.es => {
            if n == 0 {
                return Err(usage("--n must be positive"));
            }
            Some(((n as f64).log2(), k))
        }
        (Some(_), Some(_), _) => return Err(usage("--couple-k and --n are exclusive")),
        _ => None,
    };
    if let Some((log2_n, k)) = point {
        if args.p != 4 {
            return Err(usage(format!(
                "only p = 4 has a cluster potential bound, got --p {}",
                args.p
            )));
        }
        let p = certificate_point(log2_n, k, mode)?;
        out.push(json!({
            "type": "corollary_ratio",
            "k": k,
            "log2_n": log2_n,
            "mode": mode,
            "ratio": p.ratio,
            "verdict": p.certified(),
            "point": p,
        }));
    }
    if out.is_empty() {
        return Err(usage(
            "nothing to evaluate: give --couple-k, --n/--k, --scan, --g-scan or --es",
        ));
    }
    Ok(out)
}

fn mb_breaker(kind: BreakerKind) -> Box<dyn Strategy> {
    match kind {
        BreakerKind::Random => Box::new(RandomStrategy::default()),
        BreakerKind::Es => Box::new(PotentialBreaker),
        BreakerKind::Optimal => Box::new(OptimalMbPlayer::default()),
    }
}

fn run_play(args: &PlayArgs) -> Outcome<Vec<Value>> {
    let transcript = match args.game {
        GameKind::Reduced => {
            let k = args.k.ok_or_else(|| usage("--game reduced needs --k"))?;
            let (state, _) = reduced_clique_game(args.n, k, args.a, args.b)?;
            let mut maker: Box<dyn Strategy> = match args.maker {
                MakerKind::Random => Box::new(RandomStrategy::default()),
                MakerKind::Potential => Box::new(PotentialMaker),
                MakerKind::Optimal => Box::new(OptimalMbPlayer::default()),
                MakerKind::Transitive => {
                    return Err(usage("--maker transitive needs --game tournament"))
                }
            };
            let mut breaker = mb_breaker(args.breaker);
            play_out(state, maker.as_mut(), breaker.as_mut(), args.seed)?.transcript
        }
        GameKind::Tournament => {
            let goal = goal_or_transitive(&args.goal, args.k)?;
            let state = tournament_game(args.n, &goal, args.a, args.b)?;
            let mut maker: Box<dyn Strategy> = match args.maker {
                MakerKind::Random => Box::new(RandomStrategy::oriented()),
                MakerKind::Potential => {
                    let partition = Partition::balanced(args.n, goal.k())?;
                    Box::new(maker_tournament_wrapper(
                        &state,
                        &goal,
                        &partition,
                        PotentialMaker,
                    )?)
                }
                MakerKind::Transitive => {
                    if !goal.is_transitive() {
                        return Err(usage("--maker transitive needs a transitive goal"));
                    }
                    Box::new(transitive_strategy_wrapper(
                        &state,
                        goal.k(),
                        PotentialMaker,
                    )?)
                }
                MakerKind::Optimal => {
                    return Err(usage(
                        "--maker optimal is not available in the tournament game",
                    ))
                }
            };
            // Winning sets depend on Maker's orientations, so only the random
            // Breaker applies here.
            if !matches!(args.breaker, BreakerKind::Random) {
                return Err(usage("the tournament game takes --breaker random"));
            }
            let mut breaker = mb_breaker(args.breaker);
            play_out(state, maker.as_mut(), breaker.as_mut(), args.seed)?.transcript
        }
        GameKind::Orientation => {
            let goal = goal_or_transitive(&args.goal, args.k)?;
            let mut omaker: Box<dyn OrStrategy> = match args.maker {
                MakerKind::Random => Box::new(RandomOrPlayer),
                MakerKind::Optimal => Box::new(OptimalOrPlayer::new(goal.clone())),
                _ => {
                    return Err(usage(
                        "the orientation game takes --maker random or optimal",
                    ))
                }
            };
            let mut obreaker: Box<dyn OrStrategy> = match args.breaker {
                BreakerKind::Random => Box::new(RandomOrPlayer),
                BreakerKind::Es => Box::new(es_obreaker(&goal, args.n)?),
                BreakerKind::Optimal => Box::new(OptimalOrPlayer::new(goal.clone())),
            };
            play_orientation(args.n, &goal, omaker.as_mut(), obreaker.as_mut(), args.seed)?
                .transcript
        }
    };
    transcript
        .to_jsonl()
        .lines()
        .map(|l| serde_json::from_str(l).map_err(|e| Failure::from(Error::from(e))))
        .collect()
}

fn run_simulate(args: &SimulateArgs) -> Outcome<(Vec<Value>, Option<String>)> {
    let (lo, hi) = args.k_range;
    let goal = match &args.goal {
        Some(g) if lo == hi => Some(load_goal(g)?),
        Some(_) => return Err(usage("--goal needs a single-k range")),
        None => None,
    };
    let mut base = TrialConfig::new(args.variant, args.n, lo, args.trials, args.seed);
    base.goal = goal;
    let estimate = estimate_threshold(&base, lo..=hi)?;
    if args.csv {
        return Ok((Vec::new(), Some(estimate.to_csv())));
    }
    Ok((vec![record("threshold_estimate", estimate)?], None))
}

fn parse_sets(s: &str) -> Outcome<Vec<Vec<ElementId>>> {
    s.split(';')
        .filter(|part| !part.trim().is_empty())
        .map(|part| {
            part.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<u32>()
                        .map(ElementId)
                        .map_err(|e| usage(format!("bad element {x:?}: {e}")))
                })
                .collect()
        })
        .collect()
}

fn run_solve(args: &SolveArgs) -> Outcome<(Vec<Value>, Option<String>)> {
    if args.golden {
        return Ok((Vec::new(), Some(golden::generate()?)));
    }
    if let Some(g) = &args.goal {
        let n = args.n.ok_or_else(|| usage("--goal needs --n"))?;
        let goal = load_goal(g)?;
        let limit = args.limit.unwrap_or(DEFAULT_OR_LIMIT);
        let r = solve_orientation(&OrientationState::new(n), &goal, limit)?;
        let mut v = record("orientation_solution", r)?;
        v["n"] = json!(n);
        v["goal"] = json!(goal.arcs().collect::<Vec<_>>());
        return Ok((vec![v], None));
    }
    if let Some(s) = &args.sets {
        let sets = parse_sets(s)?;
        let size = match args.board_size {
            Some(size) => size,
            None => sets
                .iter()
                .flatten()
                .map(|e| e.index() + 1)
                .max()
                .unwrap_or(0),
        };
        let family = ExplicitFamily::new(size, sets)?;
        let es = es_criterion(&family.clone().into(), args.a, args.b)?;
        let state = GameState::new(
            Arc::new(Board::abstract_board(size)),
            Arc::new(family.into()),
            args.a,
            args.b,
        )?;
        let config = SolverConfig {
            limit: args.limit.unwrap_or(DEFAULT_MB_LIMIT),
            ..SolverConfig::default()
        };
        let mut v = record("mb_solution", solve_mb(&state, config)?)?;
        v["es_criterion"] = serde_json::to_value(es).map_err(Error::from)?;
        return Ok((vec![v], None));
    }
    Err(usage("give --golden, --goal with --n, or --sets"))
}

fn run_enumerate(k: usize) -> Outcome<Vec<Value>> {
    if k == 0 {
        return Err(usage("--k must be at least 1"));
    }
    let classes = enumerate_tournaments(k)?;
    let mut out = Vec::with_capacity(classes.len() + 1);
    for (i, t) in classes.iter().enumerate() {
        out.push(json!({
            "type": "tournament",
            "k": k,
            "index": i,
            "canonical_code": t.canonical_code()?,
            "automorphisms": t.automorphism_count()?,
            "transitive": t.is_transitive(),
            "arcs": t.arcs().collect::<Vec<_>>(),
        }));
    }
    let lower = tournament_count_lower(k as u32);
    out.push(json!({
        "type": "tournament_count",
        "k": k,
        "count": classes.len(),
        "lower_bound": lower,
        "meets_lower_bound": Log2Real::from_u64(classes.len() as u64) >= lower.c,
    }));
    Ok(out)
}

fn configure_threads() -> Outcome<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let threads: usize = v
            .trim()
            .parse()
            .map_err(|e| usage(format!("{THREADS_ENV}={v:?}: {e}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| usage(format!("{THREADS_ENV}: {e}")))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Outcome<()> {
    configure_threads()?;
    let (records, raw) = match &cli.command {
        Command::Bounds { n } => (run_bounds(*n)?, None),
        Command::Criterion(args) => (run_criterion(args)?, None),
        Command::Play(args) => (run_play(args)?, None),
        Command::Simulate(args) => run_simulate(args)?,
        Command::Solve(args) => run_solve(args)?,
        Command::Enumerate { k } => (run_enumerate(*k)?, None),
    };
    let mut text = raw.unwrap_or_default();
    for r in &records {
        text.push_str(&serde_json::to_string(r).map_err(Error::from)?);
        text.push('\n');
    }
    let written = match &cli.output {
        Some(path) => fs::write(path, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    };
    written.map_err(|e| Failure::from(Error::from(e)))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("tgame: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
