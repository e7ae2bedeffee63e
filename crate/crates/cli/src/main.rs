use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nonsig::analysis::{
    check_parameters, complete_support_lift, test_count_d, threshold_bound_from, LiftedGame, NsProgram,
    ThresholdParameters,
};
use nonsig::repetition::{
    guessing_game, run_concentration_experiment, run_joint_event_experiment, run_test_reliability_experiment,
    write_csv, Experiment, IidStrategy, MixtureStrategy, RepeatedGame, RunConfig,
};
use nonsig::signalling::{max_sig, SignallingDirection};
use nonsig::strategy::{echo_strategy, pr_box, StrategyFile};
use nonsig::{builtin_game, Error, Game, Strategy};
use serde::Serialize;
use serde_json::json;

#[derive(Parser)]
#[command(name = "nonsig", version, about = "Non-signalling values, signalling tests and repetition experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Game summary and support information.
    Info(GameArgs),
    /// Optimal non-signalling value.
    Value(GameArgs),
    /// Dual multiplier mass, plain and minimized, and the test count d.
    Kappa(GameArgs),
    /// Threshold-theorem bound over a grid of repetition counts.
    Bound(BoundArgs),
    /// Feasibility of a parameter choice for the threshold theorem.
    CheckParams(CheckArgs),
    /// Complete-support lift, written as a loadable game.
    Lift(LiftArgs),
    /// Signalling measure of a strategy in every direction.
    Sig(SigArgs),
    /// Winning-frequency concentration of a repeated strategy.
    Simulate(SimulateArgs),
    /// Acceptance rate of the signalling test.
    Reliability(TestArgs),
    /// Joint events of the test and the held-out estimate, for a mixture strategy.
    JointEvents(TestArgs),
    /// Guessing game driven by the signalling test.
    Guess(TestArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct GameArgs {
    /// Built-in name (chsh, gyni2, anticorr3) or path to a game JSON file.
    #[arg(long)]
    game: String,
    /// Lift to complete support with dummy weight eta.
    #[arg(long)]
    lift: Option<f64>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundArgs {
    #[command(flatten)]
    game: GameArgs,
    #[arg(long)]
    beta: f64,
    /// Repetition counts; defaults to powers of ten from 10^3 to 10^15.
    #[arg(long, num_args = 1..)]
    n: Vec<u64>,
    #[arg(long)]
    minimize_kappa: bool,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    game: GameArgs,
    #[arg(long)]
    beta: f64,
    /// Defaults to the smallest even n meeting the repetition requirement.
    #[arg(long)]
    n: Option<u64>,
    /// With epsilon, zeta and nu all omitted, the default choice eps = beta/(10 kappa), zeta = 8 eps, nu = eps.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    zeta: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    minimize_kappa: bool,
}

#[derive(Args)]
struct LiftArgs {
    #[arg(long)]
    game: String,
    #[arg(long)]
    lift: f64,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SigArgs {
    #[command(flatten)]
    game: GameArgs,
    /// iid-optimal, product-uniform, pr-box, echo[:SOURCE:TARGET], or a strategy JSON file.
    #[arg(long)]
    strategy: String,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    trials: u64,
    #[arg(long)]
    seed: u64,
    /// Worker threads; overrides NONSIG_THREADS.
    #[arg(long)]
    threads: Option<usize>,
}

impl RunArgs {
    fn config(&self) -> RunConfig {
        let cfg = RunConfig::new(self.trials, self.seed);
        match self.threads {
            Some(t) => cfg.with_threads(t),
            None => cfg,
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    game: GameArgs,
    #[command(flatten)]
    run: RunArgs,
    #[arg(long)]
    strategy: String,
    #[arg(long, default_value_t = 0.05)]
    beta: f64,
}

#[derive(Args)]
struct TestArgs {
    #[command(flatten)]
    game: GameArgs,
    #[command(flatten)]
    run: RunArgs,
    /// Repeat for a mixture (joint-events); weights default to uniform.
    #[arg(long, required = true)]
    strategy: Vec<String>,
    #[arg(long, num_args = 1..)]
    weights: Vec<f64>,
    /// Direction `(player|others' answers|own question|others' questions)`; defaults to the
    /// direction of largest signalling for the first strategy.
    #[arg(long)]
    direction: Option<String>,
    #[arg(long)]
    zeta: f64,
    #[arg(long)]
    epsilon: f64,
}

/// Exit status 2 for bad input, 1 for everything else.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidGame(_)
            | Error::InvalidStrategy(_)
            | Error::DimensionMismatch(_)
            | Error::UnknownGame(_)
            | Error::InvalidParameter(_)
            | Error::Json(_) => 2,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Info(a) => info(&a),
        Command::Value(a) => value(&a),
        Command::Kappa(a) => kappa(&a),
        Command::Bound(a) => bound(&a),
        Command::CheckParams(a) => check_params(&a),
        Command::Lift(a) => lift(&a),
        Command::Sig(a) => sig(&a),
        Command::Simulate(a) => simulate(&a),
        Command::Reliability(a) => reliability(&a),
        Command::JointEvents(a) => joint_events(&a),
        Command::Guess(a) => guess(&a),
    }
}

fn load_game(source: &str) -> Result<Game, Failure> {
    match builtin_game(source) {
        Ok(g) => Ok(g),
        Err(Error::UnknownGame(_)) if std::path::Path::new(source).exists() => {
            let text = fs::read_to_string(source).map_err(|e| invalid(format!("cannot read {source}: {e}")))?;
            Game::from_json(&text).map_err(|e| invalid(format!("{source}: {e}")))
        }
        Err(e) => Err(e.into()),
    }
}

/// The game, its optional lift, and the program whose value and duals apply.
struct Loaded {
    game: Game,
    lifted: Option<LiftedGame>,
}

impl Loaded {
    fn new(args: &GameArgs) -> Result<Self, Failure> {
        let game = load_game(&args.game)?;
        let lifted = args.lift.map(|eta| complete_support_lift(&game, eta)).transpose()?;
        Ok(Self { game, lifted })
    }

    fn program(&self) -> NsProgram {
        match &self.lifted {
            Some(l) => l.program(),
            None => NsProgram::standard(&self.game),
        }
    }

    fn repeated(&self) -> RepeatedGame {
        match &self.lifted {
            Some(l) => RepeatedGame::Lifted(l.clone()),
            None => RepeatedGame::Plain(self.game.clone()),
        }
    }

    fn warn_incomplete(&self) {
        if self.lifted.is_none() && !self.game.is_complete_support() {
            eprintln!(
                "warning: the game does not have complete support; the program as written may overstate the value (try --lift)"
            );
        }
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Outcome {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure {
            code: 1,
            message: format!("cannot write {}: {e}", path.display()),
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| Failure {
                code: 1,
                message: e.to_string(),
            })
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

fn info(a: &GameArgs) -> Outcome {
    let l = Loaded::new(a)?;
    let g = &l.game;
    let report = json!({
        "players": g.players(),
        "question_alphabets": g.question_space().radices(),
        "answer_alphabets": g.answer_space().radices(),
        "question_tuples": g.question_count(),
        "answer_tuples": g.answer_count(),
        "support_size": g.support_size(),
        "min_positive_prob": g.min_positive_prob(),
        "is_complete_support": g.is_complete_support(),
        "d": test_count_d(g).ok(),
        "lift": l.lifted.as_ref().map(|x| json!({"eta": x.eta(), "dummy_count": x.dummy_count()})),
    });
    match a.format {
        Format::Json => emit(&a.out, &to_json(&report)),
        Format::Csv => emit(
            &a.out,
            &csv_table(
                &["players", "question_tuples", "answer_tuples", "support_size", "is_complete_support"],
                [vec![
                    g.players().to_string(),
                    g.question_count().to_string(),
                    g.answer_count().to_string(),
                    g.support_size().to_string(),
                    g.is_complete_support().to_string(),
                ]],
            ),
        ),
    }
}

fn value(a: &GameArgs) -> Outcome {
    let l = Loaded::new(a)?;
    l.warn_incomplete();
    let v = l.program().solve()?.value;
    let eta = l.lifted.as_ref().map(|x| x.eta());
    match a.format {
        Format::Json => emit(&a.out, &to_json(&json!({ "ns_value": v, "alpha": 1.0 - v, "eta": eta }))),
        Format::Csv => emit(
            &a.out,
            &csv_table(
                &["ns_value", "alpha", "eta"],
                [vec![v.to_string(), (1.0 - v).to_string(), eta.map(|e| e.to_string()).unwrap_or_default()]],
            ),
        ),
    }
}

fn kappa(a: &GameArgs) -> Outcome {
    let l = Loaded::new(a)?;
    l.warn_incomplete();
    let p = l.program();
    let plain = p.kappa(false)?;
    let min = p.kappa(true)?;
    let d = test_count_d(&l.game)?;
    match a.format {
        Format::Json => emit(&a.out, &to_json(&json!({ "kappa": plain, "kappa_minimized": min, "d": d }))),
        Format::Csv => emit(
            &a.out,
            &csv_table(&["kappa", "kappa_minimized", "d"], [vec![plain.to_string(), min.to_string(), d.to_string()]]),
        ),
    }
}

fn bound(a: &BoundArgs) -> Outcome {
    let l = Loaded::new(&a.game)?;
    l.warn_incomplete();
    let p = l.program();
    let alpha = (1.0 - p.solve()?.value).max(0.0);
    let k = p.kappa(a.minimize_kappa)?;
    let grid: Vec<u64> = if a.n.is_empty() { (3..=15).map(|e| 10u64.pow(e)).collect() } else { a.n.clone() };
    let g = &l.game;
    let rows = grid
        .iter()
        .map(|&n| threshold_bound_from(g.players(), g.question_count(), g.answer_count(), alpha, k, n, a.beta))
        .collect::<Result<Vec<_>, _>>()?;
    match a.game.format {
        Format::Json => emit(&a.game.out, &to_json(&rows)),
        Format::Csv => emit(
            &a.game.out,
            &csv_table(
                &["n", "beta", "alpha", "kappa", "ln_bound", "bound"],
                rows.iter().map(|r| {
                    vec![
                        r.n.to_string(),
                        r.beta.to_string(),
                        r.alpha.to_string(),
                        r.kappa.to_string(),
                        r.ln_bound.to_string(),
                        r.bound.to_string(),
                    ]
                }),
            ),
        ),
    }
}

fn check_params(a: &CheckArgs) -> Outcome {
    let l = Loaded::new(&a.game)?;
    let g = &l.game;
    let k = l.program().kappa(a.minimize_kappa)?;
    let n = match a.n {
        Some(n) => n,
        None => {
            if !(k > 0.0) {
                return Err(invalid("kappa is 0; pass --n explicitly"));
            }
            let rhs = nonsig::analysis::repetitions_beta_rhs(g.question_count(), g.answer_count(), k, a.beta);
            nonsig::analysis::smallest_n_with_ratio(rhs)
        }
    };
    let params = match (a.epsilon, a.zeta, a.nu) {
        (None, None, None) => ThresholdParameters::default_choice(g, a.beta, n, k)?,
        (Some(e), Some(z), Some(nu)) => ThresholdParameters::new(g, e, z, nu, a.beta, n, k)?,
        _ => return Err(invalid("give all of --epsilon, --zeta, --nu, or none for the default choice")),
    };
    let report = check_parameters(g, &params);
    let text = match a.game.format {
        Format::Json => to_json(&json!({ "parameters": params, "report": report })),
        Format::Csv => csv_table(
            &["check", "passed", "lhs", "rhs", "margin"],
            report.checks.iter().map(|c| {
                vec![c.name.clone(), c.passed.to_string(), c.lhs.to_string(), c.rhs.to_string(), c.margin.to_string()]
            }),
        ),
    };
    emit(&a.game.out, &text)?;
    if report.all_passed {
        Ok(())
    } else {
        Err(invalid(format!("infeasible parameters: {}", report.failed().join("; "))))
    }
}

fn lift(a: &LiftArgs) -> Outcome {
    let game = load_game(&a.game)?;
    let l = complete_support_lift(&game, a.lift)?;
    let report = l.report();
    eprintln!("lifted with eta {}: {} dummy tuples", report.eta, report.dummy_count);
    match a.format {
        Format::Json => {
            let mut text = l.sampling_game()?.to_json();
            text.push('\n');
            emit(&a.out, &text)
        }
        Format::Csv => emit(
            &a.out,
            &csv_table(
                &["q", "d", "p"],
                report.lifted_dist.iter().map(|e| {
                    let v = serde_json::to_value(e).expect("entry serializes");
                    vec![v["q"].to_string(), e.d.to_string(), e.p.to_string()]
                }),
            ),
        ),
    }
}

fn parse_strategy(spec: &str, l: &Loaded) -> Result<Strategy, Failure> {
    let g = &l.game;
    let (qa, aa) = (g.question_space().radices(), g.answer_space().radices());
    let strategy = match spec {
        "iid-optimal" => l.program().optimal_strategy()?,
        "product-uniform" => Strategy::uniform(qa, aa)?,
        "pr-box" => pr_box(),
        _ if spec == "echo" || spec.starts_with("echo:") => {
            let (source, target) = match spec.strip_prefix("echo:") {
                None => (1, 0),
                Some(rest) => {
                    let parts: Vec<&str> = rest.split(':').collect();
                    match parts.as_slice() {
                        [s, t] => (
                            s.parse().map_err(|_| invalid(format!("bad echo source in `{spec}`")))?,
                            t.parse().map_err(|_| invalid(format!("bad echo target in `{spec}`")))?,
                        ),
                        _ => return Err(invalid(format!("expected echo:SOURCE:TARGET, got `{spec}`"))),
                    }
                }
            };
            echo_strategy(qa, aa, source, target)?
        }
        path => {
            let text = fs::read_to_string(path).map_err(|e| invalid(format!("unknown strategy `{path}`: {e}")))?;
            let file: StrategyFile = serde_json::from_str(&text).map_err(|e| invalid(format!("{path}: {e}")))?;
            Strategy::from_file(&file)?
        }
    };
    if strategy.questions() != g.question_space() || strategy.answers() != g.answer_space() {
        return Err(invalid(format!("strategy `{spec}` does not match the game's alphabets")));
    }
    Ok(strategy)
}

fn sig(a: &SigArgs) -> Outcome {
    let l = Loaded::new(&a.game)?;
    let o = parse_strategy(&a.strategy, &l)?;
    let report = max_sig(l.game.distribution(), &o)?;
    match a.game.format {
        Format::Json => emit(&a.game.out, &to_json(&report)),
        Format::Csv => emit(
            &a.game.out,
            &csv_table(
                &["direction", "sig"],
                report.values.iter().map(|(d, v)| vec![d.clone(), v.map(|x| x.to_string()).unwrap_or_default()]),
            ),
        ),
    }
}

/// With `--out`, rows go to the file and the summary to stdout; otherwise `--format` picks one.
fn emit_experiment<S: Serialize>(args: &GameArgs, exp: &Experiment<S>) -> Outcome {
    let csv = || -> Result<String, Failure> {
        let mut buf = Vec::new();
        write_csv(&exp.rows, &mut buf)?;
        Ok(String::from_utf8(buf).expect("csv is utf-8"))
    };
    match (&args.out, args.format) {
        (Some(_), _) => {
            emit(&args.out, &csv()?)?;
            emit(&None, &to_json(&exp.summary))
        }
        (None, Format::Json) => emit(&None, &to_json(&exp.summary)),
        (None, Format::Csv) => emit(&None, &csv()?),
    }
}

fn simulate(a: &SimulateArgs) -> Outcome {
    let l = Loaded::new(&a.game)?;
    l.warn_incomplete();
    let iid = IidStrategy::new(parse_strategy(&a.strategy, &l)?);
    let exp = run_concentration_experiment(&l.repeated(), &iid, a.run.n, a.beta, &a.run.config())?;
    emit_experiment(&a.game, &exp)
}

impl TestArgs {
    fn setup(&self) -> Result<(Loaded, Vec<Strategy>, SignallingDirection), Failure> {
        if self.game.lift.is_some() {
            return Err(invalid("signalling tests run on the game as given; drop --lift"));
        }
        let l = Loaded::new(&self.game)?;
        let strategies = self
            .strategy
            .iter()
            .map(|s| parse_strategy(s, &l))
            .collect::<Result<Vec<_>, _>>()?;
        let direction = match &self.direction {
            Some(text) => text.parse::<SignallingDirection>()?,
            None => max_sig(l.game.distribution(), &strategies[0])?
                .max_direction
                .ok_or_else(|| invalid("no defined signalling direction; pass --direction"))?,
        };
        Ok((l, strategies, direction))
    }

    fn single(&self) -> Result<(Loaded, Strategy, SignallingDirection), Failure> {
        if self.strategy.len() != 1 || !self.weights.is_empty() {
            return Err(invalid("this command takes exactly one --strategy and no --weights"));
        }
        let (l, mut s, d) = self.setup()?;
        Ok((l, s.remove(0), d))
    }
}

fn reliability(a: &TestArgs) -> Outcome {
    let (l, o, d) = a.single()?;
    let exp = run_test_reliability_experiment(&l.game, &o, &d, a.run.n, a.zeta, a.epsilon, &a.run.config())?;
    emit_experiment(&a.game, &exp)
}

fn joint_events(a: &TestArgs) -> Outcome {
    let (l, strategies, d) = a.setup()?;
    let weights = if a.weights.is_empty() {
        vec![1.0 / strategies.len() as f64; strategies.len()]
    } else {
        a.weights.clone()
    };
    let mixture = MixtureStrategy::new(weights, strategies)?;
    let exp = run_joint_event_experiment(&l.game, &mixture, &d, a.run.n, a.zeta, a.epsilon, &a.run.config())?;
    emit_experiment(&a.game, &exp)
}

fn guess(a: &TestArgs) -> Outcome {
    let (l, o, d) = a.single()?;
    let iid = IidStrategy::new(o);
    let exp = guessing_game(&l.game, &iid, &d, a.run.n, a.zeta, a.epsilon, &a.run.config())?;
    emit_experiment(&a.game, &exp)
}
