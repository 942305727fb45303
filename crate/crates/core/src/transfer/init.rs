//! Initializers for a target vocabulary's embedding matrix.
//!
//! All four share the same skeleton: tokens present in both vocabularies are
//! copied bit-for-bit; every other target token gets a method-specific row.
//! Each initializer builds a [`TransferPlan`] in target-id order and then
//! materializes it, so the returned matrix is exactly what
//! [`apply_transfer`] produces from the plan.

use std::collections::{BTreeMap, HashMap};

use super::auxiliary::{norm, AuxiliaryEmbeddings};
use super::linear::LinearFit;
use super::matrix::EmbeddingMatrix;
use super::plan::{apply_transfer, PlanEntry, RowOrigin, TransferPlan};
use super::sparsemax::sparsemax;
use super::TransferError;
use crate::tokenizer::{encode, TokenId, Vocabulary};

/// Target/source id pairs of tokens whose strings are identical.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OverlapMap {
    /// `(target id, source id)`, ordered by target id.
    pub pairs: Vec<(TokenId, TokenId)>,
}

impl OverlapMap {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Source id per target id.
    fn by_target(&self, target_size: usize) -> Vec<Option<TokenId>> {
        let mut out = vec![None; target_size];
        for &(t, s) in &self.pairs {
            out[t as usize] = Some(s);
        }
        out
    }
}

pub fn compute_overlap(source: &Vocabulary, target: &Vocabulary) -> OverlapMap {
    let pairs = target
        .tokens()
        .iter()
        .enumerate()
        .filter_map(|(t, tok)| source.id_of(tok).map(|s| (t as TokenId, s)))
        .collect();
    OverlapMap { pairs }
}

/// Options shared by the initializers.
#[derive(Debug, Clone, Default)]
pub struct InitOptions {
    /// Seed for random rows, including random fallbacks.
    pub seed: u64,
    /// Source-token frequencies for FVT weighting; uniform when absent.
    pub freq: Option<HashMap<String, u64>>,
}

fn check_source(src_emb: &EmbeddingMatrix, src_vocab: &Vocabulary) -> Result<(), TransferError> {
    if src_emb.rows() != src_vocab.len() {
        return Err(TransferError::DimensionMismatch {
            what: "source matrix rows",
            expected: src_vocab.len(),
            found: src_emb.rows(),
        });
    }
    if src_emb.vocab_hash() != &src_vocab.hash() {
        return Err(TransferError::HashMismatch);
    }
    Ok(())
}

/// Source token ids that `target` token `t` splits into under the source
/// tokenizer. Byte tokens map to their byte rather than their `<0xNN>` name.
pub fn decompose(src_vocab: &Vocabulary, tgt_vocab: &Vocabulary, t: TokenId) -> Option<Vec<TokenId>> {
    let token = tgt_vocab.token(t)?;
    let text = match tgt_vocab.byte_value(t) {
        Some(b) if b.is_ascii() => (b as char).to_string(),
        Some(b) => return src_vocab.byte_id(b).map(|id| vec![id]),
        None => token.to_owned(),
    };
    match encode(src_vocab, &text) {
        Ok(seq) if !seq.is_empty() => Some(seq.ids),
        _ => None,
    }
}

/// Weighted-mean sources for an FVT row: uniform over pieces, or proportional
/// to the pieces' frequencies when any of them is known.
fn fvt_sources(
    src_vocab: &Vocabulary,
    tgt_vocab: &Vocabulary,
    t: TokenId,
    freq: Option<&HashMap<String, u64>>,
) -> Option<Vec<(TokenId, f64)>> {
    let pieces = decompose(src_vocab, tgt_vocab, t)?;
    let piece_freq = |id: TokenId| -> f64 {
        freq.and_then(|f| src_vocab.token(id).and_then(|s| f.get(s)))
            .map_or(0.0, |&c| c as f64)
    };
    let total: f64 = pieces.iter().map(|&id| piece_freq(id)).sum();
    let mut weights: BTreeMap<TokenId, f64> = BTreeMap::new();
    for &id in &pieces {
        let w = if total > 0.0 {
            piece_freq(id) / total
        } else {
            1.0 / pieces.len() as f64
        };
        *weights.entry(id).or_insert(0.0) += w;
    }
    Some(weights.into_iter().filter(|&(_, w)| w > 0.0).collect())
}

struct PlanBuilder<'a> {
    tgt_vocab: &'a Vocabulary,
    overlap: Vec<Option<TokenId>>,
    entries: Vec<PlanEntry>,
}

impl<'a> PlanBuilder<'a> {
    fn new(src_vocab: &'a Vocabulary, tgt_vocab: &'a Vocabulary) -> Self {
        let overlap = compute_overlap(src_vocab, tgt_vocab).by_target(tgt_vocab.len());
        Self {
            tgt_vocab,
            overlap,
            entries: Vec::with_capacity(tgt_vocab.len()),
        }
    }

    fn push(&mut self, t: TokenId, provenance: RowOrigin, sources: Vec<(TokenId, f64)>) {
        self.entries.push(PlanEntry {
            target_id: t,
            token: self.tgt_vocab.token(t).unwrap_or_default().to_owned(),
            provenance,
            sources,
        });
    }

    /// Copies overlap rows and hands every other id to `new_row`.
    fn build<F>(mut self, mut new_row: F) -> Result<Vec<PlanEntry>, TransferError>
    where
        F: FnMut(TokenId, &str) -> Result<(RowOrigin, Vec<(TokenId, f64)>), TransferError>,
    {
        for t in 0..self.tgt_vocab.len() as TokenId {
            if let Some(s) = self.overlap[t as usize] {
                self.push(t, RowOrigin::CopiedOverlap, vec![(s, 1.0)]);
            } else {
                let token = self.tgt_vocab.token(t).unwrap_or_default().to_owned();
                let (origin, sources) = new_row(t, &token)?;
                self.push(t, origin, sources);
            }
        }
        Ok(self.entries)
    }
}

/// Ladder for tokens without an auxiliary vector: FVT decomposition, then a
/// random row.
fn fallback(
    src_vocab: &Vocabulary,
    tgt_vocab: &Vocabulary,
    t: TokenId,
    freq: Option<&HashMap<String, u64>>,
) -> (RowOrigin, Vec<(TokenId, f64)>) {
    match fvt_sources(src_vocab, tgt_vocab, t, freq) {
        Some(s) => (RowOrigin::FvtDecomposition, s),
        None => (RowOrigin::RandomFallback, Vec::new()),
    }
}

fn finish(
    src_emb: &EmbeddingMatrix,
    src_vocab: &Vocabulary,
    tgt_vocab: &Vocabulary,
    seed: u64,
    entries: Vec<PlanEntry>,
    flags: Vec<String>,
) -> Result<(EmbeddingMatrix, TransferPlan), TransferError> {
    let plan = TransferPlan {
        src_vocab_hash: src_vocab.hash(),
        tgt_vocab_hash: tgt_vocab.hash(),
        seed,
        flags,
        entries,
    };
    let (matrix, _) = apply_transfer(src_emb, None, &plan)?;
    Ok((matrix, plan))
}

/// Overlap tokens that have an auxiliary vector, as (source id, unit vector).
fn aux_candidates(
    src_vocab: &Vocabulary,
    tgt_vocab: &Vocabulary,
    aux: &AuxiliaryEmbeddings,
) -> Result<Vec<(TokenId, Vec<f64>)>, TransferError> {
    let overlap = compute_overlap(src_vocab, tgt_vocab);
    if overlap.is_empty() {
        return Err(TransferError::NoOverlap);
    }
    let candidates: Vec<_> = overlap
        .pairs
        .iter()
        .filter_map(|&(t, s)| {
            let v = aux.get(tgt_vocab.token(t)?)?;
            Some((s, v.to_vec()))
        })
        .collect();
    if candidates.is_empty() {
        return Err(TransferError::NoOverlap);
    }
    Ok(candidates)
}

fn unit(v: &[f64]) -> Vec<f64> {
    let n = norm(v);
    v.iter().map(|x| x / n).collect()
}

/// FOCUS: each new token becomes the sparsemax-weighted combination of
/// overlapping tokens' source rows, scored by cosine similarity of auxiliary
/// vectors.
pub fn focus_initialize(
    src_emb: &EmbeddingMatrix,
    src_vocab: &Vocabulary,
    tgt_vocab: &Vocabulary,
    aux: &AuxiliaryEmbeddings,
    opts: &InitOptions,
) -> Result<(EmbeddingMatrix, TransferPlan), TransferError> {
    check_source(src_emb, src_vocab)?;
    let candidates: Vec<(TokenId, Vec<f64>)> = aux_candidates(src_vocab, tgt_vocab, aux)?
        .into_iter()
        .map(|(s, v)| (s, unit(&v)))
        .collect();

    let entries = PlanBuilder::new(src_vocab, tgt_vocab).build(|t, token| {
        let Some(query) = aux.get(token) else {
            return Ok(fallback(src_vocab, tgt_vocab, t, opts.freq.as_ref()));
        };
        let query = unit(query);
        let scores: Vec<f64> = candidates
            .iter()
            .map(|(_, v)| query.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect();
        let weights = sparsemax(&scores)?;
        let mut sources: Vec<(TokenId, f64)> = candidates
            .iter()
            .zip(weights)
            .filter(|&(_, w)| w > 0.0)
            .map(|((s, _), w)| (*s, w))
            .collect();
        sources.sort_by_key(|&(s, _)| s);
        Ok((RowOrigin::FocusCombination, sources))
    })?;
    finish(src_emb, src_vocab, tgt_vocab, opts.seed, entries, Vec::new())
}

/// FVT: each new token is the (optionally frequency-weighted) mean of the
/// source rows it decomposes into.
pub fn fvt_initialize(
    src_emb: &EmbeddingMatrix,
    src_vocab: &Vocabulary,
    tgt_vocab: &Vocabulary,
    opts: &InitOptions,
) -> Result<(EmbeddingMatrix, TransferPlan), TransferError> {
    check_source(src_emb, src_vocab)?;
    let entries = PlanBuilder::new(src_vocab, tgt_vocab).build(|t, token| {
        fvt_sources(src_vocab, tgt_vocab, t, opts.freq.as_ref())
            .map(|s| (RowOrigin::FvtDecomposition, s))
            .ok_or_else(|| TransferError::UndecomposableToken(token.to_owned()))
    })?;
    finish(src_emb, src_vocab, tgt_vocab, opts.seed, entries, Vec::new())
}

/// Linear: fits `A·aux + b ≈ source row` on the overlap and maps each new
/// token's auxiliary vector through it.
pub fn linear_initialize(
    src_emb: &EmbeddingMatrix,
    src_vocab: &Vocabulary,
    tgt_vocab: &Vocabulary,
    aux: &AuxiliaryEmbeddings,
    opts: &InitOptions,
) -> Result<(EmbeddingMatrix, TransferPlan), TransferError> {
    check_source(src_emb, src_vocab)?;
    let candidates = aux_candidates(src_vocab, tgt_vocab, aux)?;
    let xs: Vec<&[f64]> = candidates.iter().map(|(_, v)| v.as_slice()).collect();
    let ys: Vec<&[f64]> = candidates.iter().map(|&(s, _)| src_emb.row(s)).collect();
    let fit = LinearFit::fit(&xs, &ys)?;
    let flags = if fit.rank_deficient {
        vec!["rank-deficient-linear-fit".to_owned()]
    } else {
        Vec::new()
    };

    let entries = PlanBuilder::new(src_vocab, tgt_vocab).build(|t, token| {
        let Some(query) = aux.get(token) else {
            return Ok(fallback(src_vocab, tgt_vocab, t, opts.freq.as_ref()));
        };
        let mut sources: Vec<(TokenId, f64)> = candidates
            .iter()
            .zip(fit.sample_weights(query))
            .filter(|&(_, h)| h != 0.0)
            .map(|((s, _), h)| (*s, h))
            .collect();
        sources.sort_by_key(|&(s, _)| s);
        Ok((RowOrigin::LinearMapped, sources))
    })?;
    finish(src_emb, src_vocab, tgt_vocab, opts.seed, entries, flags)
}

/// Random: new rows drawn per dimension from a normal law with the source
/// matrix's mean and standard deviation.
pub fn random_initialize(
    src_emb: &EmbeddingMatrix,
    src_vocab: &Vocabulary,
    tgt_vocab: &Vocabulary,
    seed: u64,
) -> Result<(EmbeddingMatrix, TransferPlan), TransferError> {
    check_source(src_emb, src_vocab)?;
    let entries = PlanBuilder::new(src_vocab, tgt_vocab).build(|_, _| Ok((RowOrigin::RandomFallback, Vec::new())))?;
    finish(src_emb, src_vocab, tgt_vocab, seed, entries, Vec::new())
}
