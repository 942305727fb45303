//! Embedding initialization for a new vocabulary.
//!
//! Initializers produce a [`TransferPlan`] describing each target row, and
//! [`apply_transfer`] turns a plan into matrices.

pub mod auxiliary;
pub mod init;
pub mod linear;
pub mod matrix;
pub mod plan;
pub mod ppmi;
pub mod sparsemax;

pub use auxiliary::{cosine, AuxiliaryEmbeddings};
pub use init::{
    compute_overlap, decompose, focus_initialize, fvt_initialize, linear_initialize, random_initialize, InitOptions,
    OverlapMap,
};
pub use linear::LinearFit;
pub use matrix::EmbeddingMatrix;
pub use plan::{apply_transfer, PlanEntry, RandomRowSampler, RowOrigin, TransferPlan};
pub use ppmi::{factorize_ppmi, train_aux_embeddings, AuxTrainConfig, PpmiFactorization};
pub use sparsemax::{sparsemax, sparsemax_threshold};

use crate::tokenizer::TokenizerError;

#[derive(Debug, thiserror::Error)]
pub enum TransferError {
    #[error("source and target vocabularies share no token with an auxiliary vector")]
    NoOverlap,
    #[error("{what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("embedding matrix is bound to a different vocabulary")]
    HashMismatch,
    #[error("token {0:?} cannot be decomposed with the source vocabulary")]
    UndecomposableToken(String),
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("{0}")]
    InvalidArgument(String),
    #[error("empty input")]
    EmptyInput,
    #[error("corpus too small: {0}")]
    CorpusTooSmall(String),
    #[error("line {line}: {message}")]
    AuxFormat { line: usize, message: String },
    #[error(transparent)]
    Tokenizer(#[from] TokenizerError),
}
