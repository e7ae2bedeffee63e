//! Complete-support lift: mixes dummy questions (those with `Q(q) = 0`) into the question
//! distribution with total weight `η`.

use serde::Serialize;

use super::program::NsProgram;
use crate::error::{Error, Result};
use crate::game::Game;

#[derive(Debug, Clone, Serialize)]
pub struct LiftedEntry {
    pub q: Vec<usize>,
    pub d: u8,
    pub p: f64,
}

#[derive(Debug, Clone)]
pub struct LiftedGame {
    base: Game,
    eta: f64,
    dummy: Vec<bool>,
    tilde: Vec<f64>,
}

impl LiftedGame {
    pub fn base(&self) -> &Game {
        &self.base
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Question tuples with `Q(q) = 0`.
    pub fn dummy_set(&self) -> Vec<usize> {
        (0..self.dummy.len()).filter(|&q| self.dummy[q]).collect()
    }

    pub fn is_dummy(&self, q: usize) -> bool {
        self.dummy[q]
    }

    pub fn dummy_count(&self) -> usize {
        self.dummy.iter().filter(|&&d| d).count()
    }

    /// Marginal `Q̃(q) = Σ_d P(q, d)`.
    pub fn tilde_distribution(&self) -> &[f64] {
        &self.tilde
    }

    /// `P_{Q̃D}(q, d)`.
    pub fn joint(&self, q: usize, d: u8) -> f64 {
        match (self.dummy[q], d) {
            (true, 1) | (false, 0) => self.tilde[q],
            _ => 0.0,
        }
    }

    /// Nonzero entries of the joint distribution.
    pub fn lifted_dist(&self) -> Vec<LiftedEntry> {
        let space = self.base.question_space();
        (0..self.tilde.len())
            .filter(|&q| self.tilde[q] > 0.0)
            .map(|q| LiftedEntry {
                q: space.decode(q),
                d: u8::from(self.dummy[q]),
                p: self.tilde[q],
            })
            .collect()
    }

    /// `P(q | d = 0)`.
    pub fn conditional_on_real(&self) -> Vec<f64> {
        let mass: f64 = (0..self.tilde.len()).map(|q| self.joint(q, 0)).sum();
        (0..self.tilde.len()).map(|q| self.joint(q, 0) / mass).collect()
    }

    /// Signalling rows from `Q̃`, objective from `Q`.
    pub fn program(&self) -> NsProgram {
        NsProgram::with_constraint_distribution(&self.base, &self.tilde)
            .expect("lifted distribution matches the base game")
    }

    /// The game played in repetition: questions drawn from `Q̃`, dummy tuples always accepted.
    pub fn sampling_game(&self) -> Result<Game> {
        let base = &self.base;
        Game::new(
            base.question_space().radices().to_vec(),
            base.answer_space().radices().to_vec(),
            self.tilde.clone(),
            |q, a| {
                let qi = base.question_space().encode(q);
                self.dummy[qi] || base.accepts(qi, base.answer_space().encode(a))
            },
        )
    }

    pub fn report(&self) -> LiftReport {
        LiftReport {
            eta: self.eta,
            dummy_count: self.dummy_count(),
            dummy_set: self
                .dummy_set()
                .into_iter()
                .map(|q| self.base.question_space().decode(q))
                .collect(),
            lifted_dist: self.lifted_dist(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LiftReport {
    pub eta: f64,
    pub dummy_count: usize,
    pub dummy_set: Vec<Vec<usize>>,
    pub lifted_dist: Vec<LiftedEntry>,
}

/// Builds `P_{Q̃D}` with `P(q,1) = η/𝒟` on dummy tuples and `P(q,0) = Q(q)(1−η)` otherwise.
/// A game without dummy tuples is returned unchanged.
pub fn complete_support_lift(game: &Game, eta: f64) -> Result<LiftedGame> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::InvalidParameter(format!("eta must lie in (0,1), got {eta}")));
    }
    let dist = game.distribution();
    let dummy: Vec<bool> = dist.iter().map(|&p| p == 0.0).collect();
    let count = dummy.iter().filter(|&&d| d).count();
    let tilde = if count == 0 {
        dist.to_vec()
    } else {
        dist.iter()
            .zip(&dummy)
            .map(|(&p, &d)| if d { eta / count as f64 } else { p * (1.0 - eta) })
            .collect()
    };
    Ok(LiftedGame {
        base: game.clone(),
        eta,
        dummy,
        tilde,
    })
}
