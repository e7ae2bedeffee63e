//! Sampling, playing, splitting and scoring runs of the repeated game.

use rand::{Rng, RngCore};
use serde::Serialize;

use super::strategies::RepeatedStrategy;
use crate::analysis::LiftedGame;
use crate::error::{Error, Result};
use crate::game::Game;
use crate::rng::{sample_cdf, trial_rng};

/// The repeated game `G^n`, or `G̃^n` with dummy questions mixed in.
#[derive(Debug, Clone)]
pub enum RepeatedGame {
    Plain(Game),
    Lifted(LiftedGame),
}

impl RepeatedGame {
    /// The game whose predicate and question space the players face.
    pub fn base(&self) -> &Game {
        match self {
            RepeatedGame::Plain(g) => g,
            RepeatedGame::Lifted(l) => l.base(),
        }
    }

    /// Distribution the referee samples from.
    pub fn sampling_distribution(&self) -> &[f64] {
        match self {
            RepeatedGame::Plain(g) => g.distribution(),
            RepeatedGame::Lifted(l) => l.tilde_distribution(),
        }
    }

    fn is_dummy(&self, q: usize) -> bool {
        match self {
            RepeatedGame::Plain(_) => false,
            RepeatedGame::Lifted(l) => l.is_dummy(q),
        }
    }
}

impl From<Game> for RepeatedGame {
    fn from(g: Game) -> Self {
        RepeatedGame::Plain(g)
    }
}

impl From<LiftedGame> for RepeatedGame {
    fn from(l: LiftedGame) -> Self {
        RepeatedGame::Lifted(l)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Transcript {
    pub questions: Vec<usize>,
    pub answers: Vec<usize>,
    pub dummy_flags: Vec<bool>,
    pub win_bits: Vec<bool>,
}

impl Transcript {
    pub fn len(&self) -> usize {
        self.questions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.questions.is_empty()
    }
}

/// One half of a transcript.
#[derive(Debug, Clone, Copy)]
pub struct Half<'a> {
    pub questions: &'a [usize],
    pub answers: &'a [usize],
    pub dummy_flags: &'a [bool],
    pub win_bits: &'a [bool],
}

fn check_even(n: usize) -> Result<()> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::InvalidParameter(format!("n must be even and at least 2, got {n}")));
    }
    Ok(())
}

fn cdf(dist: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    dist.iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect()
}

/// `n` i.i.d. draws from `dist`.
pub fn sample_from(dist: &[f64], n: usize, rng: &mut dyn RngCore) -> Vec<usize> {
    let c = cdf(dist);
    (0..n).map(|_| sample_cdf(&c, rng.random::<f64>())).collect()
}

/// `n` i.i.d. question tuples from `Q`, reproducible from `seed`.
pub fn sample_questions(game: &Game, n: usize, seed: u64) -> Result<Vec<usize>> {
    check_even(n)?;
    Ok(sample_from(game.distribution(), n, &mut trial_rng(seed, 0)))
}

/// Draws from `P_{Q̃D}`; flags mark dummy rounds.
pub fn sample_questions_modified(lifted: &LiftedGame, n: usize, seed: u64) -> Result<(Vec<usize>, Vec<bool>)> {
    check_even(n)?;
    let q = sample_from(lifted.tilde_distribution(), n, &mut trial_rng(seed, 0));
    let flags = q.iter().map(|&x| lifted.is_dummy(x)).collect();
    Ok((q, flags))
}

/// One run: questions from the referee, answers from `strategy`, dummy rounds auto-win.
pub fn play_with_rng(
    game: &RepeatedGame,
    strategy: &dyn RepeatedStrategy,
    n: usize,
    rng: &mut dyn RngCore,
) -> Result<Transcript> {
    check_even(n)?;
    let questions = sample_from(game.sampling_distribution(), n, rng);
    let answers = strategy.respond(&questions, rng);
    if answers.len() != n {
        return Err(Error::InvalidStrategy(format!(
            "strategy returned {} answers for {n} rounds",
            answers.len()
        )));
    }
    let base = game.base();
    if let Some(&a) = answers.iter().find(|&&a| a >= base.answer_count()) {
        return Err(Error::InvalidStrategy(format!("answer index {a} out of range")));
    }
    let dummy_flags: Vec<bool> = questions.iter().map(|&q| game.is_dummy(q)).collect();
    let win_bits = questions
        .iter()
        .zip(&answers)
        .zip(&dummy_flags)
        .map(|((&q, &a), &d)| d || base.accepts(q, a))
        .collect();
    Ok(Transcript {
        questions,
        answers,
        dummy_flags,
        win_bits,
    })
}

pub fn play(game: &RepeatedGame, strategy: &dyn RepeatedStrategy, n: usize, seed: u64) -> Result<Transcript> {
    play_with_rng(game, strategy, n, &mut trial_rng(seed, 0))
}

/// First `n/2` rounds are test data, the rest game data.
pub fn split(t: &Transcript) -> (Half<'_>, Half<'_>) {
    let h = t.len() / 2;
    let half = |r: std::ops::Range<usize>| Half {
        questions: &t.questions[r.clone()],
        answers: &t.answers[r.clone()],
        dummy_flags: &t.dummy_flags[r.clone()],
        win_bits: &t.win_bits[r],
    };
    (half(0..h), half(h..t.len()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrequencyReport {
    pub f: f64,
    pub f_t: f64,
    pub f_g: f64,
    /// Frequency over non-dummy rounds; `None` when every round is a dummy.
    pub f_real: Option<f64>,
}

fn frequency(bits: &[bool]) -> f64 {
    if bits.is_empty() {
        return 0.0;
    }
    bits.iter().filter(|&&b| b).count() as f64 / bits.len() as f64
}

pub fn winning_frequencies(t: &Transcript) -> FrequencyReport {
    let (test, game) = split(t);
    let f_t = frequency(test.win_bits);
    let f_g = frequency(game.win_bits);
    let real: Vec<bool> = t
        .win_bits
        .iter()
        .zip(&t.dummy_flags)
        .filter(|(_, &d)| !d)
        .map(|(&w, _)| w)
        .collect();
    FrequencyReport {
        f: (f_t + f_g) / 2.0,
        f_t,
        f_g,
        f_real: (!real.is_empty()).then(|| frequency(&real)),
    }
}
