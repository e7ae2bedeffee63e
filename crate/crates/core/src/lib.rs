//! Non-signalling values of finite multiplayer games, signalling measures and tests, and
//! Monte Carlo experiments on parallel repetition.

pub mod analysis;
pub mod error;
pub mod game;
pub mod lp;
pub mod repetition;
pub mod rng;
pub mod signalling;
pub mod stats;
pub mod strategy;
pub mod tuples;

pub use error::{Error, Result};
pub use game::{builtin_game, validate_game, Game, GameDefinition, Violation};
pub use strategy::{strategy_distance, ConditionalTable, EstimatedStrategy, Strategy};
pub use tuples::TupleSpace;
