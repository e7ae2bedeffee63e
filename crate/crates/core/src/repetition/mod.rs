//! The `n`-fold repeated game, strategies for it, and Monte Carlo experiments.

mod experiments;
mod strategies;
mod transcript;

pub use experiments::{
    csv_string, direction_count, guessing_game, run_concentration_experiment, run_estimation_experiment,
    run_joint_event_experiment, run_test_reliability_experiment, run_trials, write_csv, ConcentrationSummary,
    EstimationSummary, Experiment, Frequency, GuessingGameReport, JointEventSummary, ReliabilitySummary, RunConfig,
    TrialRow, THREADS_ENV,
};
pub use strategies::{EchoStrategy, IidStrategy, MixtureStrategy, PermutedWrapper, RepeatedStrategy, RoundPeekStrategy};
pub use transcript::{
    play, play_with_rng, sample_from, sample_questions, sample_questions_modified, split, winning_frequencies,
    FrequencyReport, Half, RepeatedGame, Transcript,
};
