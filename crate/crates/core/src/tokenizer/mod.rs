//! Byte-pair-encoding vocabularies: pre-tokenization, training, and a
//! deterministic encoder/decoder.

mod codec;
mod pretok;
mod train;
mod vocab;

use thiserror::Error;

pub use codec::{decode, encode, TokenSequence};
pub use pretok::{normalize, pretokenize, PreTokenizerConfig, WhitespacePolicy};
pub use train::train_bpe;
pub use vocab::{byte_token, TokenId, Vocabulary, VOCAB_FORMAT_VERSION};

#[derive(Debug, Error)]
pub enum TokenizerError {
    #[error("target size {target} is below the base alphabet size {base}")]
    TargetTooSmall { target: usize, base: usize },
    /// Training ran out of pairs occurring at least twice. The partial
    /// vocabulary is still usable.
    #[error("corpus saturated at {} tokens before reaching target size {target}", partial.len())]
    CorpusSaturated { partial: Box<Vocabulary>, target: usize },
    #[error("character {0:?} is not in the vocabulary and byte fallback is off")]
    UnknownSymbol(char),
    #[error("token id {id} out of range for vocabulary of size {size}")]
    IdOutOfRange { id: TokenId, size: usize },
    #[error("malformed vocabulary: {0}")]
    Malformed(String),
    #[error("vocabulary JSON: {0}")]
    Json(#[from] serde_json::Error),
}
