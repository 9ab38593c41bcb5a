//! Arenas, plays, objectives and strategies.

pub mod arena;
pub mod lasso;
pub mod spec;
pub mod strategy;

pub use arena::{
    validate_arena, Arena, ArenaBuilder, ArenaError, GameGraph, GraphBuilder, Player, ValidationReport, Violation,
};
pub use lasso::{Lasso, LassoError};
pub use spec::{Family, ObjectiveKind, ObjectiveSpec, SpecError};
pub use strategy::{MooreStrategy, StrategyError};
