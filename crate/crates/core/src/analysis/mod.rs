//! Linear-programming analysis of a game: non-signalling value, dual multipliers and `κ`,
//! sensitivity, support lifts, and the constants of the threshold theorem.

mod delta;
mod lift;
mod program;
mod threshold;

pub use delta::{dual_solution_bound, max_inverse_entry};
pub use lift::{complete_support_lift, LiftReport, LiftedEntry, LiftedGame};
pub use program::{
    build_dual, build_modified_two_player, build_primal, kappa, ns_value, optimal_strategy,
    perturbed_value, test_count_d, DualSolution, NsProgram, NsSolution, SignallingIndex,
};
pub use threshold::{
    check_parameters, definetti_c, linear, ln_definetti_c, ln_sanov_delta, ln_test_delta,
    ln_threshold_bound, names, repetitions_beta_rhs, repetitions_epsilon_rhs, sanov_delta,
    smallest_n_for_bound, smallest_n_with_ratio, threshold_bound, threshold_bound_from,
    ParameterCheck, ParameterReport, ThresholdBound, ThresholdParameters,
};

use serde::Serialize;

use crate::error::Result;
use crate::game::Game;
use crate::lp::DEFAULT_GAP_TOL;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub ns_value: f64,
    pub alpha: f64,
    pub kappa: f64,
    pub kappa_minimized: f64,
    pub d: usize,
    pub relaxed_equals_equality: bool,
}

/// Solves `program` in all the ways the report needs.
pub fn analyze_program(program: &NsProgram, d: usize) -> Result<AnalysisReport> {
    let value = program.solve()?.value;
    let equality = program.solve_equality()?.value;
    let ns_value = value.clamp(0.0, 1.0);
    Ok(AnalysisReport {
        ns_value,
        alpha: 1.0 - ns_value,
        kappa: program.kappa(false)?,
        kappa_minimized: program.kappa(true)?,
        d,
        relaxed_equals_equality: (value - equality).abs() <= 2.0 * DEFAULT_GAP_TOL,
    })
}

pub fn analyze(game: &Game) -> Result<AnalysisReport> {
    analyze_program(&NsProgram::standard(game), test_count_d(game)?)
}
