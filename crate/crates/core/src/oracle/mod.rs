//! Independent validation: brute-force lasso search, arena generators, the
//! generalized-reachability encoding and cross-construction consistency runs.

mod cross;
mod gallery;
mod genreach;
mod lassos;
mod random;

use thiserror::Error;

use crate::model::SpecError;

pub use cross::{
    corpus_arena, cross_check, run_corpus, CorpusConfig, CorpusReport, CrossCheckOptions, CrossCheckReport, Execution,
    ViolationRecord,
};
pub use gallery::{paper_gallery, GALLERY};
pub use genreach::{genreach_to_fixwp, GenReachReduction};
pub use lassos::enumerate_lassos;
pub use random::{corpus_params, random_arena, RandomArenaParams};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("unknown gallery arena `{0}`")]
    UnknownGallery(String),
    #[error("parameter {1} out of range for {0}")]
    Parameter(String, u32),
    #[error("arena is not a one-player arena")]
    NotOnePlayer,
    #[error("vertex index {0} outside the arena")]
    UnknownVertex(usize),
    #[error(transparent)]
    Spec(#[from] SpecError),
}
