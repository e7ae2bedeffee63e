//! Monte Carlo experiments. Trial `k` draws all of its randomness from
//! [`trial_rng`](crate::rng::trial_rng)`(seed, k)`, so results do not depend on the thread count.

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::strategies::{IidStrategy, MixtureStrategy, RepeatedStrategy};
use super::transcript::{play_with_rng, sample_from, split, winning_frequencies, RepeatedGame, Transcript};
use crate::analysis::{ln_sanov_delta, ln_test_delta, test_count_d, threshold_bound_from, NsProgram};
use crate::error::{Error, Result};
use crate::game::Game;
use crate::rng::{trial_rng, TrialRng};
use crate::signalling::{
    check_test_parameters, estimate_strategy, sig_value, test_estimate, SigForm, SignallingDirection,
};
use crate::stats::{wilson95, Interval};
use crate::strategy::{strategy_distance, Strategy};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "NONSIG_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunConfig {
    pub trials: u64,
    pub seed: u64,
    /// Worker threads; falls back to `NONSIG_THREADS`, then to the rayon default.
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn new(trials: u64, seed: u64) -> Self {
        Self {
            trials,
            seed,
            threads: None,
        }
    }

    pub fn with_threads(self, threads: usize) -> Self {
        Self {
            threads: Some(threads),
            ..self
        }
    }

    fn thread_count(&self) -> Option<usize> {
        self.threads.or_else(|| {
            std::env::var(THREADS_ENV)
                .ok()
                .and_then(|v| v.trim().parse::<usize>().ok())
                .filter(|&t| t > 0)
        })
    }
}

/// Runs `trial(k, rng_k)` for `k = 0..trials`, returning results in trial order.
pub fn run_trials<T, F>(cfg: &RunConfig, trial: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, &mut TrialRng) -> Result<T> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.thread_count().unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    pool.install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(|k| trial(k, &mut trial_rng(cfg.seed, k)))
            .collect()
    })
}

/// One CSV row. Columns that do not apply to an experiment are left empty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRow {
    pub seed: u64,
    pub trial: u64,
    pub f: Option<f64>,
    pub f_t: Option<f64>,
    pub f_g: Option<f64>,
    pub f_real: Option<f64>,
    pub exceed: Option<bool>,
    pub test: Option<bool>,
    pub sig_est2: Option<f64>,
    pub event_low: Option<bool>,
    pub event_high: Option<bool>,
    pub guess_win: Option<bool>,
    pub distance: Option<f64>,
}

impl TrialRow {
    fn new(seed: u64, trial: u64) -> Self {
        Self {
            seed,
            trial,
            f: None,
            f_t: None,
            f_g: None,
            f_real: None,
            exceed: None,
            test: None,
            sig_est2: None,
            event_low: None,
            event_high: None,
            guess_win: None,
            distance: None,
        }
    }

    fn with_frequencies(seed: u64, trial: u64, t: &Transcript) -> Self {
        let fr = winning_frequencies(t);
        Self {
            f: Some(fr.f),
            f_t: Some(fr.f_t),
            f_g: Some(fr.f_g),
            f_real: fr.f_real,
            ..Self::new(seed, trial)
        }
    }
}

pub fn write_csv<W: Write>(rows: &[TrialRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string(rows: &[TrialRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

#[derive(Debug, Clone, Serialize)]
pub struct Experiment<S> {
    pub summary: S,
    #[serde(skip)]
    pub rows: Vec<TrialRow>,
}

/// Count of `true` and its frequency with a Wilson interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Frequency {
    pub count: u64,
    pub trials: u64,
    pub frequency: f64,
    pub interval: Interval,
}

impl Frequency {
    pub fn of(bits: impl Iterator<Item = bool>) -> Self {
        let mut count = 0;
        let mut trials = 0;
        for b in bits {
            trials += 1;
            count += u64::from(b);
        }
        Self {
            count,
            trials,
            frequency: if trials == 0 { 0.0 } else { count as f64 / trials as f64 },
            interval: wilson95(count, trials),
        }
    }
}

fn clamp_exp(ln: f64) -> f64 {
    ln.exp().min(1.0)
}

#[derive(Debug, Clone, Serialize)]
pub struct ConcentrationSummary {
    pub seed: u64,
    pub n: usize,
    pub beta: f64,
    pub alpha: f64,
    pub kappa: f64,
    /// `1 − α + β`.
    pub threshold: f64,
    pub exceed: Frequency,
    /// `e^{−2nβ²}`, the binomial tail for an i.i.d. strategy at the optimum.
    pub iid_tail_bound: f64,
    /// Clamped threshold-theorem bound.
    /// `None` when `β` lies outside `(0, α]`, where the bound is not stated.
    pub theorem_bound: Option<f64>,
    pub theorem_ln_bound: Option<f64>,
}

/// Frequency of `f_real > 1 − α + β`, with `α` from the game's (lifted) program.
pub fn run_concentration_experiment(
    game: &RepeatedGame,
    strategy: &dyn RepeatedStrategy,
    n: usize,
    beta: f64,
    cfg: &RunConfig,
) -> Result<Experiment<ConcentrationSummary>> {
    let program = match game {
        RepeatedGame::Plain(g) => NsProgram::standard(g),
        RepeatedGame::Lifted(l) => l.program(),
    };
    let alpha = (1.0 - program.solve()?.value).max(0.0);
    let kappa = program.kappa(true)?;
    let base = game.base();
    if !(beta > 0.0) {
        return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
    }
    let bound = threshold_bound_from(
        base.players(),
        base.question_count(),
        base.answer_count(),
        alpha,
        kappa,
        n as u64,
        beta,
    )
    .ok();
    let threshold = 1.0 - alpha + beta;
    let rows = run_trials(cfg, |k, rng| {
        let t = play_with_rng(game, strategy, n, rng)?;
        let mut row = TrialRow::with_frequencies(cfg.seed, k, &t);
        row.exceed = Some(row.f_real.is_some_and(|f| f > threshold));
        Ok(row)
    })?;
    Ok(Experiment {
        summary: ConcentrationSummary {
            seed: cfg.seed,
            n,
            beta,
            alpha,
            kappa,
            threshold,
            exceed: Frequency::of(rows.iter().map(|r| r.exceed == Some(true))),
            iid_tail_bound: (-2.0 * n as f64 * beta * beta).exp(),
            theorem_bound: bound.as_ref().map(|b| b.bound),
            theorem_ln_bound: bound.as_ref().map(|b| b.ln_bound),
        },
        rows,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ReliabilitySummary {
    pub seed: u64,
    pub n: usize,
    pub zeta: f64,
    pub epsilon: f64,
    pub direction: SignallingDirection,
    /// `Sig` of the one-game strategy in the tested direction.
    pub sig: Option<f64>,
    pub accepted: Frequency,
    /// `min(1, δ(n/2, ε))`.
    pub delta: f64,
}

fn game_product(game: &Game) -> usize {
    game.question_count() * game.answer_count()
}

/// Plays `strategy^{⊗n}` and records how often the test on the first half fires.
pub fn run_test_reliability_experiment(
    game: &Game,
    strategy: &Strategy,
    direction: &SignallingDirection,
    n: usize,
    zeta: f64,
    epsilon: f64,
    cfg: &RunConfig,
) -> Result<Experiment<ReliabilitySummary>> {
    check_test_parameters(zeta, epsilon)?;
    direction.indices(game.question_space(), game.answer_space())?;
    let repeated = RepeatedGame::Plain(game.clone());
    let iid = IidStrategy::new(strategy.clone());
    let rows = run_trials(cfg, |k, rng| {
        let t = play_with_rng(&repeated, &iid, n, rng)?;
        let (test, _) = split(&t);
        let est = estimate_strategy(test.questions, test.answers, game.question_space(), game.answer_space())?;
        let mut row = TrialRow::with_frequencies(cfg.seed, k, &t);
        row.test = Some(test_estimate(direction, &est, zeta, epsilon, game.distribution())?);
        Ok(row)
    })?;
    Ok(Experiment {
        summary: ReliabilitySummary {
            seed: cfg.seed,
            n,
            zeta,
            epsilon,
            direction: direction.clone(),
            sig: sig_value(game.distribution(), strategy, direction, SigForm::Conditional)?,
            accepted: Frequency::of(rows.iter().map(|r| r.test == Some(true))),
            delta: clamp_exp(ln_test_delta(n as u64, epsilon, game_product(game))?),
        },
        rows,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct JointEventSummary {
    pub seed: u64,
    pub n: usize,
    pub zeta: f64,
    pub epsilon: f64,
    pub direction: SignallingDirection,
    /// `T = 1` while `Sig(O^EST2) < ζ − 4ε`.
    pub accepted_but_low: Frequency,
    /// `T = 0` while `Sig(O^EST2) ≥ ζ + 2ε`.
    pub rejected_but_high: Frequency,
    /// `min(1, 2δ(n/2, ε))`.
    pub two_delta: f64,
}

/// Frequencies of the two events where the test half and the game half disagree.
pub fn run_joint_event_experiment(
    game: &Game,
    mixture: &MixtureStrategy,
    direction: &SignallingDirection,
    n: usize,
    zeta: f64,
    epsilon: f64,
    cfg: &RunConfig,
) -> Result<Experiment<JointEventSummary>> {
    check_test_parameters(zeta, epsilon)?;
    direction.indices(game.question_space(), game.answer_space())?;
    let repeated = RepeatedGame::Plain(game.clone());
    let (qs, ans) = (game.question_space(), game.answer_space());
    let rows = run_trials(cfg, |k, rng| {
        let t = play_with_rng(&repeated, mixture, n, rng)?;
        let (test, rest) = split(&t);
        let est1 = estimate_strategy(test.questions, test.answers, qs, ans)?;
        let est2 = estimate_strategy(rest.questions, rest.answers, qs, ans)?;
        let fired = test_estimate(direction, &est1, zeta, epsilon, game.distribution())?;
        let sig2 = sig_value(game.distribution(), &est2, direction, SigForm::Conditional)?;
        let mut row = TrialRow::with_frequencies(cfg.seed, k, &t);
        row.test = Some(fired);
        row.sig_est2 = sig2;
        row.event_low = Some(fired && sig2.is_some_and(|s| s < zeta - 4.0 * epsilon));
        row.event_high = Some(!fired && sig2.is_some_and(|s| s >= zeta + 2.0 * epsilon));
        Ok(row)
    })?;
    let ln_delta = ln_test_delta(n as u64, epsilon, game_product(game))?;
    Ok(Experiment {
        summary: JointEventSummary {
            seed: cfg.seed,
            n,
            zeta,
            epsilon,
            direction: direction.clone(),
            accepted_but_low: Frequency::of(rows.iter().map(|r| r.event_low == Some(true))),
            rejected_but_high: Frequency::of(rows.iter().map(|r| r.event_high == Some(true))),
            two_delta: clamp_exp(std::f64::consts::LN_2 + ln_delta),
        },
        rows,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct GuessingGameReport {
    pub seed: u64,
    pub direction: SignallingDirection,
    #[serde(rename = "W_ns")]
    pub w_ns: f64,
    pub empirical_win: f64,
    pub win_interval: Interval,
    /// Standard error `√(W_ns(1 − W_ns)/trials)`.
    pub sigma: f64,
    pub trials: u64,
    pub accept_rate: f64,
}

/// The coalition `ī` runs the test on the first half, then names an index of the second half
/// where it believes player `i` was asked `s^i`.
pub fn guessing_game(
    game: &Game,
    strategy: &dyn RepeatedStrategy,
    direction: &SignallingDirection,
    n: usize,
    zeta: f64,
    epsilon: f64,
    cfg: &RunConfig,
) -> Result<Experiment<GuessingGameReport>> {
    check_test_parameters(zeta, epsilon)?;
    let (qs, ans) = (game.question_space(), game.answer_space());
    let (s, b) = direction.indices(qs, ans)?;
    let i = direction.player;
    let w_ns = match game.conditional(i, s) {
        Some(w) if game.prob(s) > 0.0 && w < 1.0 => w,
        _ => {
            return Err(Error::InvalidParameter(format!(
                "direction {direction} needs Q(s) > 0 and Q(s^i|s^ī) < 1"
            )))
        }
    };
    let s_rest = qs.drop_digit(s, i);
    let repeated = RepeatedGame::Plain(game.clone());
    let rows = run_trials(cfg, |k, rng| {
        let t = play_with_rng(&repeated, strategy, n, rng)?;
        let (test, rest) = split(&t);
        let est = estimate_strategy(test.questions, test.answers, qs, ans)?;
        let fired = test_estimate(direction, &est, zeta, epsilon, game.distribution())?;
        let candidates: Vec<usize> = (0..rest.questions.len())
            .filter(|&j| qs.drop_digit(rest.questions[j], i) == s_rest)
            .collect();
        let preferred: Vec<usize> = if fired {
            candidates
                .iter()
                .copied()
                .filter(|&j| ans.drop_digit(rest.answers[j], i) == b)
                .collect()
        } else {
            Vec::new()
        };
        let pool = if preferred.is_empty() { &candidates } else { &preferred };
        let win = if pool.is_empty() {
            false
        } else {
            let j = pool[rng.random_range(0..pool.len())];
            rest.questions[j] == s
        };
        let mut row = TrialRow::with_frequencies(cfg.seed, k, &t);
        row.test = Some(fired);
        row.guess_win = Some(win);
        Ok(row)
    })?;
    let wins = Frequency::of(rows.iter().map(|r| r.guess_win == Some(true)));
    let accepted = Frequency::of(rows.iter().map(|r| r.test == Some(true)));
    Ok(Experiment {
        summary: GuessingGameReport {
            seed: cfg.seed,
            direction: direction.clone(),
            w_ns,
            empirical_win: wins.frequency,
            win_interval: wins.interval,
            sigma: (w_ns * (1.0 - w_ns) / cfg.trials.max(1) as f64).sqrt(),
            trials: cfg.trials,
            accept_rate: accepted.frequency,
        },
        rows,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EstimationSummary {
    pub seed: u64,
    pub l: usize,
    pub epsilon: f64,
    /// Trials with `‖f − O‖ > ε`.
    pub deviation: Frequency,
    /// `min(1, δ(l, ε))`.
    pub sanov_bound: f64,
}

/// Draws `l` i.i.d. rounds of `(Q, O)` per trial and measures the estimate's distance to `O`.
pub fn run_estimation_experiment(
    game: &Game,
    strategy: &Strategy,
    l: usize,
    epsilon: f64,
    cfg: &RunConfig,
) -> Result<Experiment<EstimationSummary>> {
    let sanov = clamp_exp(ln_sanov_delta(l as u64, epsilon, game_product(game))?);
    let iid = IidStrategy::new(strategy.clone());
    let rows = run_trials(cfg, |k, rng| {
        let questions = sample_from(game.distribution(), l, rng);
        let answers = iid.respond(&questions, rng);
        let est = estimate_strategy(&questions, &answers, game.question_space(), game.answer_space())?;
        let mut row = TrialRow::new(cfg.seed, k);
        row.distance = Some(strategy_distance(game, &est, strategy)?);
        Ok(row)
    })?;
    Ok(Experiment {
        summary: EstimationSummary {
            seed: cfg.seed,
            l,
            epsilon,
            deviation: Frequency::of(rows.iter().map(|r| r.distance.is_some_and(|d| d > epsilon))),
            sanov_bound: sanov,
        },
        rows,
    })
}

/// `d`, exposed for summaries that report the union-bound factor.
pub fn direction_count(game: &Game) -> Result<usize> {
    test_count_d(game)
}
