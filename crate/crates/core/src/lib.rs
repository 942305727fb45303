//! Toolkit for swapping a language model's tokenizer.
//!
//! - [`tokenizer`]: BPE training with configurable pre-tokenization, encode/decode.
//! - [`metrics`]: token count, characters per token, tokens per word.
//! - [`transfer`]: initialize a new vocabulary's embeddings from an old one
//!   (FOCUS, FVT, linear map, random).
//! - [`trainplan`]: staged freeze plans and token budgets for continued pretraining.
//! - [`io`]: on-disk formats; [`cli`]: command implementations behind the binary.

pub mod benchmark;
pub mod cli;
pub mod io;
pub mod metrics;
pub mod tokenizer;
pub mod trainplan;
pub mod transfer;
