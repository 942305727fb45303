//! Auxiliary embeddings from token co-occurrence.
//!
//! Pipeline: symmetric co-occurrence counts within ±window, positive PMI,
//! then the top `dim` eigenpairs of the PPMI matrix from a dense symmetric
//! eigendecomposition. A token's vector is its row of `U·sqrt(max(Λ, 0))`,
//! unit-normalized; tokens whose row vanishes are left out, which sends them
//! to the transfer fallback. No step is random.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::auxiliary::AuxiliaryEmbeddings;
use super::TransferError;
use crate::tokenizer::{encode, TokenId, Vocabulary};

#[derive(Debug, Clone, Serialize)]
pub struct AuxTrainConfig {
    pub dim: usize,
    pub window: usize,
}

impl Default for AuxTrainConfig {
    fn default() -> Self {
        Self { dim: 32, window: 2 }
    }
}

/// Truncated eigendecomposition of a PPMI matrix.
#[derive(Debug, Clone)]
pub struct PpmiFactorization {
    /// Token ids in row order.
    pub types: Vec<TokenId>,
    pub ppmi: DMatrix<f64>,
    /// Descending.
    pub eigenvalues: DVector<f64>,
    /// Columns are eigenvectors.
    pub eigenvectors: DMatrix<f64>,
}

impl PpmiFactorization {
    /// `U·Λ·Uᵀ`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        &self.eigenvectors * DMatrix::from_diagonal(&self.eigenvalues) * self.eigenvectors.transpose()
    }

    /// Rows of `U·sqrt(max(Λ, 0))`, unit-normalized, keyed by token string.
    pub fn embeddings(&self, tokenizer: &Vocabulary) -> Result<AuxiliaryEmbeddings, TransferError> {
        let dim = self.eigenvalues.len();
        let scale: Vec<f64> = self.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).collect();
        let mut aux = AuxiliaryEmbeddings::new(dim);
        for (row, &id) in self.types.iter().enumerate() {
            let v: Vec<f64> = (0..dim).map(|k| self.eigenvectors[(row, k)] * scale[k]).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm <= 1e-12 {
                continue;
            }
            let token = tokenizer
                .token(id)
                .ok_or_else(|| TransferError::InvalidArgument(format!("token id {id} not in tokenizer")))?;
            aux.insert(token.to_owned(), v.into_iter().map(|x| x / norm).collect())?;
        }
        if aux.len() < 2 {
            return Err(TransferError::CorpusTooSmall(
                "fewer than two tokens received a vector".into(),
            ));
        }
        Ok(aux)
    }

    /// `‖P·U − U·Λ‖_F`.
    pub fn residual(&self) -> f64 {
        (&self.ppmi * &self.eigenvectors - &self.eigenvectors * DMatrix::from_diagonal(&self.eigenvalues)).norm()
    }
}

/// Builds the PPMI matrix over the distinct tokens of the encoded corpus.
pub fn ppmi_matrix<S: AsRef<str>>(
    corpus: &[S],
    tokenizer: &Vocabulary,
    window: usize,
) -> Result<(Vec<TokenId>, DMatrix<f64>), TransferError> {
    let docs = corpus
        .iter()
        .map(|d| encode(tokenizer, d.as_ref()).map(|s| s.ids))
        .collect::<Result<Vec<_>, _>>()?;

    let mut index: BTreeMap<TokenId, usize> = BTreeMap::new();
    for id in docs.iter().flatten() {
        index.entry(*id).or_insert(0);
    }
    if index.len() < 2 {
        return Err(TransferError::CorpusTooSmall(format!(
            "{} distinct token(s); need at least 2",
            index.len()
        )));
    }
    for (i, slot) in index.values_mut().enumerate() {
        *slot = i;
    }
    let types: Vec<TokenId> = index.keys().copied().collect();
    let n = types.len();

    let mut counts = DMatrix::<f64>::zeros(n, n);
    for doc in &docs {
        for (i, a) in doc.iter().enumerate() {
            for b in doc.iter().skip(i + 1).take(window) {
                let (ia, ib) = (index[a], index[b]);
                counts[(ia, ib)] += 1.0;
                counts[(ib, ia)] += 1.0;
            }
        }
    }
    let total = counts.sum();
    if total == 0.0 {
        return Err(TransferError::CorpusTooSmall("no co-occurring token pairs".into()));
    }
    let row_sums: Vec<f64> = (0..n).map(|i| counts.row(i).sum()).collect();
    let ppmi = DMatrix::from_fn(n, n, |i, j| {
        let c = counts[(i, j)];
        if c == 0.0 {
            0.0
        } else {
            (c * total / (row_sums[i] * row_sums[j])).ln().max(0.0)
        }
    });
    Ok((types, ppmi))
}

/// Top-`dim` eigenpairs (largest algebraic value) of a symmetric matrix.
fn top_eigenpairs(m: &DMatrix<f64>, dim: usize) -> (DVector<f64>, DMatrix<f64>) {
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    // Ties broken by index so the order does not depend on the sort.
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    order.truncate(dim);
    let lambda = DVector::from_iterator(dim, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut u = DMatrix::from_fn(m.nrows(), dim, |i, j| eig.eigenvectors[(i, order[j])]);
    // Canonical sign: largest-magnitude entry of each eigenvector positive.
    for mut col in u.column_iter_mut() {
        let pivot = col
            .iter()
            .copied()
            .fold(0.0f64, |best, x| if x.abs() > best.abs() { x } else { best });
        if pivot < 0.0 {
            col.neg_mut();
        }
    }
    (lambda, u)
}

pub fn factorize_ppmi<S: AsRef<str>>(
    corpus: &[S],
    tokenizer: &Vocabulary,
    cfg: &AuxTrainConfig,
) -> Result<PpmiFactorization, TransferError> {
    if corpus.is_empty() {
        return Err(TransferError::CorpusTooSmall("empty corpus".into()));
    }
    if cfg.window == 0 || cfg.dim == 0 {
        return Err(TransferError::InvalidArgument("window and dim must be positive".into()));
    }
    let (types, ppmi) = ppmi_matrix(corpus, tokenizer, cfg.window)?;
    if cfg.dim > types.len() {
        return Err(TransferError::InvalidArgument(format!(
            "dim {} exceeds the {} distinct tokens in the corpus",
            cfg.dim,
            types.len()
        )));
    }
    let (eigenvalues, eigenvectors) = top_eigenpairs(&ppmi, cfg.dim);
    Ok(PpmiFactorization {
        types,
        ppmi,
        eigenvalues,
        eigenvectors,
    })
}

/// Trains auxiliary vectors for the tokens `tokenizer` produces on `corpus`.
pub fn train_aux_embeddings<S: AsRef<str>>(
    corpus: &[S],
    tokenizer: &Vocabulary,
    cfg: &AuxTrainConfig,
) -> Result<AuxiliaryEmbeddings, TransferError> {
    factorize_ppmi(corpus, tokenizer, cfg)?.embeddings(tokenizer)
}
