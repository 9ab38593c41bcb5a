//! Window parity games: objectives, product reductions, solvers and strategy synthesis.

pub mod io;
pub mod model;
pub mod objectives;
pub mod oracle;
pub mod reductions;
pub mod solvers;
pub mod synthesis;

pub use model::*;
