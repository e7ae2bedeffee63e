//! The non-signalling linear program, its dual, and variants.
//!
//! One [`NsProgram`] covers the plain, lifted and modified two-player programs. They differ only
//! in the distribution used for the objective, the distribution used for the conditionals
//! `C(r^i | q^ī)` inside signalling rows, and the prefactor multiplying each row.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{conditional, Game};
use crate::lp::{self, LinearProgram, LpSolution, Sense, DEFAULT_FEAS_TOL, DEFAULT_GAP_TOL};
use crate::strategy::Strategy;
use crate::tuples::TupleSpace;

/// Index of one signalling constraint: player `i`, question tuple `q`, answers `a^ī`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SignallingIndex {
    pub player: usize,
    pub question: usize,
    pub rest_answer: usize,
}

#[derive(Debug, Clone)]
pub struct NsProgram {
    questions: TupleSpace,
    answers: TupleSpace,
    /// `Q(q) R(q,a)` laid out like strategy tables.
    objective: Vec<f64>,
    /// Distribution defining the conditionals in signalling rows.
    constraint_dist: Vec<f64>,
    /// Row prefactor per question tuple.
    prefactor: Vec<f64>,
    /// Normalization as `Σ_a O ≤ 1` instead of `= 1`.
    normalization_leq: bool,
    /// Full index set in canonical order `i → q → a^ī`.
    index: Vec<SignallingIndex>,
    /// Whether the conditional for `(i, q^ī)` is defined, per entry of `index`.
    present: Vec<bool>,
}

/// Solved primal with per-row duals.
#[derive(Debug, Clone)]
pub struct NsSolution {
    pub value: f64,
    pub strategy: Vec<f64>,
    /// Duals of the present signalling rows, aligned with [`NsProgram::rows`].
    pub signalling_duals: Vec<f64>,
    pub lp: LpSolution,
}

impl NsProgram {
    fn build(
        game: &Game,
        constraint_dist: Vec<f64>,
        prefactor: Vec<f64>,
        normalization_leq: bool,
    ) -> Self {
        let questions = game.question_space().clone();
        let answers = game.answer_space().clone();
        let na = answers.len();
        let mut objective = vec![0.0; questions.len() * na];
        for q in 0..questions.len() {
            for a in 0..na {
                if game.accepts(q, a) {
                    objective[q * na + a] = game.prob(q);
                }
            }
        }
        let mut index = Vec::new();
        let mut present = Vec::new();
        if game.players() >= 2 {
            for i in 0..game.players() {
                let rest = na / answers.radix(i);
                for q in 0..questions.len() {
                    let defined = conditional(&questions, &constraint_dist, i, q).is_some();
                    for b in 0..rest {
                        index.push(SignallingIndex {
                            player: i,
                            question: q,
                            rest_answer: b,
                        });
                        present.push(defined);
                    }
                }
            }
        }
        Self {
            questions,
            answers,
            objective,
            constraint_dist,
            prefactor,
            normalization_leq,
            index,
            present,
        }
    }

    /// The program for `game` as written: `Q` everywhere.
    pub fn standard(game: &Game) -> Self {
        let q = game.distribution().to_vec();
        Self::build(game, q.clone(), q, false)
    }

    /// Signalling rows built from `lifted` (prefactor and conditionals), objective from `game`.
    pub fn with_constraint_distribution(game: &Game, lifted: &[f64]) -> Result<Self> {
        if lifted.len() != game.question_count() {
            return Err(Error::DimensionMismatch("constraint distribution length".into()));
        }
        Ok(Self::build(game, lifted.to_vec(), lifted.to_vec(), false))
    }

    /// Two-player modification: prefactor `η` on rows whose tuple has `Q(q) = 0`, and
    /// normalization relaxed to `Σ_a O(a|q) ≤ 1`.
    pub fn modified_two_player(game: &Game, eta: f64) -> Result<Self> {
        if game.players() != 2 {
            return Err(Error::InvalidParameter(format!(
                "modified program needs 2 players, game has {}",
                game.players()
            )));
        }
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::InvalidParameter(format!("eta must be positive, got {eta}")));
        }
        let q = game.distribution().to_vec();
        let prefactor = q.iter().map(|&p| if p > 0.0 { p } else { eta }).collect();
        Ok(Self::build(game, q, prefactor, true))
    }

    pub fn questions(&self) -> &TupleSpace {
        &self.questions
    }

    pub fn answers(&self) -> &TupleSpace {
        &self.answers
    }

    /// Size of the full signalling index set.
    pub fn index_len(&self) -> usize {
        self.index.len()
    }

    /// Present signalling rows, in the order they appear in the primal.
    pub fn rows(&self) -> Vec<SignallingIndex> {
        self.index
            .iter()
            .zip(&self.present)
            .filter(|(_, &p)| p)
            .map(|(ix, _)| *ix)
            .collect()
    }

    pub fn prefactor(&self, q: usize) -> f64 {
        self.prefactor[q]
    }

    fn num_vars(&self) -> usize {
        self.questions.len() * self.answers.len()
    }

    fn cond(&self, player: usize, q: usize) -> f64 {
        conditional(&self.questions, &self.constraint_dist, player, q).unwrap_or(0.0)
    }

    /// Coefficients of one signalling row over `O(a|q)`.
    fn row(&self, ix: &SignallingIndex) -> Vec<f64> {
        let na = self.answers.len();
        let (i, q, b) = (ix.player, ix.question, ix.rest_answer);
        let pre = self.prefactor[q];
        let mut row = vec![0.0; self.num_vars()];
        for r in 0..self.questions.radix(i) {
            let qr = self.questions.with_digit(q, i, r);
            let w = (if qr == q { 1.0 } else { 0.0 }) - self.cond(i, qr);
            if w == 0.0 {
                continue;
            }
            for x in 0..self.answers.radix(i) {
                let a = self.answers.insert_digit(b, i, x);
                row[qr * na + a] += pre * w;
            }
        }
        row
    }

    fn add_normalization(&self, lp: &mut LinearProgram) {
        let na = self.answers.len();
        for q in 0..self.questions.len() {
            let mut row = vec![0.0; self.num_vars()];
            row[q * na..(q + 1) * na].fill(1.0);
            if self.normalization_leq {
                lp.add_ineq(row, 1.0);
            } else {
                lp.add_eq(row, 1.0);
            }
        }
    }

    /// Primal LP. Signalling rows come first (as inequalities when `relaxed`, else as
    /// equalities), then normalization rows.
    pub fn primal(&self, relaxed: bool) -> LinearProgram {
        let slack = vec![0.0; self.rows().len()];
        self.primal_with_slack(relaxed, &slack)
    }

    /// Relaxed primal whose `k`-th signalling row has right-hand side `slack[k]`.
    pub fn primal_with_slack(&self, relaxed: bool, slack: &[f64]) -> LinearProgram {
        let mut lp = LinearProgram::new(self.num_vars());
        lp.objective = self.objective.clone();
        for (ix, s) in self.rows().iter().zip(slack) {
            let row = self.row(ix);
            if relaxed {
                lp.add_ineq(row, *s);
            } else {
                lp.add_eq(row, *s);
            }
        }
        self.add_normalization(&mut lp);
        lp
    }

    /// Dual of the relaxed primal, stated as a maximization of `−Σ z(q)`.
    ///
    /// Variables: `z(q)` for each question tuple, then `y_i(q, a^ī)` over the full index set
    /// (variables of absent rows have all-zero columns). Constraint per `(q, a)`:
    /// `z(q) + Σ_i y_i(q,a^ī)P(q) − Σ_i Σ_{r: r^ī=q^ī} y_i(r,a^ī)P(r)C(q^i|q^ī) ≥ Q(q)R(q,a)`.
    pub fn dual(&self) -> LinearProgram {
        let nq = self.questions.len();
        let na = self.answers.len();
        let nz = nq;
        let mut lp = LinearProgram::new(nz + self.index.len());
        for z in 0..nz {
            lp.objective[z] = -1.0;
            if !self.normalization_leq {
                lp.set_free(z);
            }
        }
        // Offsets into `index` for each player; within a player, entries are `q * rest + b`.
        let mut offset = Vec::new();
        let mut acc = nz;
        for i in 0..self.questions.arity() {
            offset.push(acc);
            acc += nq * (na / self.answers.radix(i));
        }
        for q in 0..nq {
            for a in 0..na {
                // Written as −(lhs) ≤ −rhs.
                let mut row = vec![0.0; lp.num_vars()];
                row[q] = -1.0;
                if !self.index.is_empty() {
                    for i in 0..self.questions.arity() {
                        let rest = na / self.answers.radix(i);
                        let b = self.answers.drop_digit(a, i);
                        let own = offset[i] + q * rest + b;
                        if self.present[own - nz] {
                            row[own] -= self.prefactor[q];
                            let c = self.cond(i, q);
                            for r in 0..self.questions.radix(i) {
                                let qr = self.questions.with_digit(q, i, r);
                                row[offset[i] + qr * rest + b] += self.prefactor[qr] * c;
                            }
                        }
                    }
                }
                lp.add_ineq(row, -self.objective[q * na + a]);
            }
        }
        lp
    }

    /// Positions of the `y` variables of the dual that belong to present rows.
    pub fn dual_y_range(&self) -> std::ops::Range<usize> {
        let nz = self.questions.len();
        nz..nz + self.index.len()
    }

    pub fn solve(&self) -> Result<NsSolution> {
        self.solve_lp(&self.primal(true), true)
    }

    pub fn solve_equality(&self) -> Result<NsSolution> {
        self.solve_lp(&self.primal(false), false)
    }

    fn solve_lp(&self, lp: &LinearProgram, relaxed: bool) -> Result<NsSolution> {
        let sol = lp::solve(lp, DEFAULT_FEAS_TOL, DEFAULT_GAP_TOL)?;
        if !sol.is_optimal() {
            return Err(Error::Solver("not optimal on a game program"));
        }
        let d = self.rows().len();
        let signalling_duals = if relaxed {
            sol.duals_ineq[..d].to_vec()
        } else {
            sol.duals_eq[..d].to_vec()
        };
        Ok(NsSolution {
            value: sol.objective_value,
            strategy: sol.primal.clone(),
            signalling_duals,
            lp: sol,
        })
    }

    /// Optimal value with every signalling right-hand side raised to `slack`.
    pub fn perturbed_value(&self, slack: f64) -> Result<f64> {
        if !(slack >= 0.0 && slack.is_finite()) {
            return Err(Error::InvalidParameter(format!("slack must be ≥ 0, got {slack}")));
        }
        let s = vec![slack; self.rows().len()];
        self.perturbed_value_with(&s)
    }

    /// Optimal value with per-row slack, aligned with [`rows`](Self::rows).
    pub fn perturbed_value_with(&self, slack: &[f64]) -> Result<f64> {
        if slack.len() != self.rows().len() {
            return Err(Error::DimensionMismatch("one slack per signalling row".into()));
        }
        Ok(self.solve_lp(&self.primal_with_slack(true, slack), true)?.value)
    }

    /// Solves the dual. With `minimize`, minimizes `Σ y` over the optimal face.
    pub fn solve_dual(&self, minimize: bool) -> Result<DualSolution> {
        let lp = self.dual();
        let sol = if minimize {
            let mut secondary = vec![0.0; lp.num_vars()];
            for j in self.dual_y_range() {
                secondary[j] = 1.0;
            }
            lp::solve_with_secondary(&lp, &secondary, Sense::Minimize, DEFAULT_FEAS_TOL, DEFAULT_GAP_TOL)?
        } else {
            lp::solve(&lp, DEFAULT_FEAS_TOL, DEFAULT_GAP_TOL)?
        };
        if !sol.is_optimal() {
            return Err(Error::Solver("dual not optimal"));
        }
        let nz = self.questions.len();
        Ok(DualSolution {
            value: -sol.objective_value,
            z: sol.primal[..nz].to_vec(),
            y: sol.primal[self.dual_y_range()].to_vec(),
        })
    }

    /// An optimal dual whose largest signalling dual is as small as possible.
    pub fn solve_dual_min_max(&self) -> Result<DualSolution> {
        let mut lp = self.dual();
        let t = lp.num_vars();
        lp.objective.push(0.0);
        lp.nonneg.push(true);
        for row in lp.ineq_matrix.iter_mut().chain(lp.eq_matrix.iter_mut()) {
            row.push(0.0);
        }
        for j in self.dual_y_range() {
            let mut row = vec![0.0; t + 1];
            row[j] = 1.0;
            row[t] = -1.0;
            lp.add_ineq(row, 0.0);
        }
        let mut secondary = vec![0.0; t + 1];
        secondary[t] = 1.0;
        let sol = lp::solve_with_secondary(&lp, &secondary, Sense::Minimize, DEFAULT_FEAS_TOL, DEFAULT_GAP_TOL)?;
        if !sol.is_optimal() {
            return Err(Error::Solver("dual not optimal"));
        }
        Ok(DualSolution {
            value: -sol.objective_value,
            z: sol.primal[..self.questions.len()].to_vec(),
            y: sol.primal[self.dual_y_range()].to_vec(),
        })
    }

    /// `κ = Σ_j |y*_j|` over signalling duals.
    pub fn kappa(&self, minimize: bool) -> Result<f64> {
        Ok(self.solve_dual(minimize)?.y.iter().map(|v| v.abs()).sum())
    }

    /// An optimal strategy of the relaxed primal, rows renormalized.
    pub fn optimal_strategy(&self) -> Result<Strategy> {
        let sol = self.solve()?;
        Strategy::from_solver_values(self.questions.clone(), self.answers.clone(), sol.strategy)
    }

    /// The full signalling index set, with a flag for rows that appear in the primal.
    pub fn index(&self) -> impl Iterator<Item = (SignallingIndex, bool)> + '_ {
        self.index.iter().copied().zip(self.present.iter().copied())
    }
}

#[derive(Debug, Clone)]
pub struct DualSolution {
    /// `Σ z(q)`, the optimal value.
    pub value: f64,
    pub z: Vec<f64>,
    /// Signalling duals over the full index set.
    pub y: Vec<f64>,
}

pub fn build_primal(game: &Game, relaxed: bool) -> LinearProgram {
    NsProgram::standard(game).primal(relaxed)
}

pub fn build_dual(game: &Game) -> LinearProgram {
    NsProgram::standard(game).dual()
}

pub fn build_modified_two_player(game: &Game, eta: f64, relaxed: bool) -> Result<LinearProgram> {
    Ok(NsProgram::modified_two_player(game, eta)?.primal(relaxed))
}

/// Optimal value of the relaxed primal for `game` as written.
pub fn ns_value(game: &Game) -> Result<f64> {
    Ok(NsProgram::standard(game).solve()?.value)
}

pub fn kappa(game: &Game, minimize: bool) -> Result<f64> {
    NsProgram::standard(game).kappa(minimize)
}

pub fn perturbed_value(game: &Game, slack: f64) -> Result<f64> {
    NsProgram::standard(game).perturbed_value(slack)
}

pub fn optimal_strategy(game: &Game) -> Result<Strategy> {
    NsProgram::standard(game).optimal_strategy()
}

/// `d = Σ_i |Q| · |A| / |A_i|`, the size of the full signalling index set.
pub fn test_count_d(game: &Game) -> Result<usize> {
    if game.players() < 2 {
        return Err(Error::InvalidParameter("signalling tests need at least 2 players".into()));
    }
    let nq = game.question_count();
    let na = game.answer_count();
    Ok((0..game.players())
        .map(|i| nq * (na / game.answer_space().radix(i)))
        .sum())
}
