//! Free-style Gomoku engine: potential-line board, pattern oracle, static
//! analysis, tree search and endgame solvers.

pub mod error;
pub mod eval_movegen;
pub mod analysis;
pub mod board;
pub mod lines;
pub mod patterns;
pub mod search;
pub mod endgame;
pub mod engine_io;

pub use error::{Error, Result};
