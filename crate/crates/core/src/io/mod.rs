//! On-disk formats and provenance.

pub mod auxtext;
pub mod emb;
pub mod plan;
pub mod provenance;
pub mod report;

use crate::transfer::TransferError;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{0}")]
    Malformed(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Transfer(#[from] TransferError),
}
