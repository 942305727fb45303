use super::TransferError;
use crate::tokenizer::TokenId;

/// |V|×d embedding matrix, row-major, bound to a vocabulary by hash.
///
/// Values are held as `f64`; the on-disk format stores `f32`, so a matrix
/// read from disk and written back is bit-identical.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    rows: usize,
    dim: usize,
    data: Vec<f64>,
    vocab_hash: [u8; 32],
}

impl EmbeddingMatrix {
    pub fn new(rows: usize, dim: usize, data: Vec<f64>, vocab_hash: [u8; 32]) -> Result<Self, TransferError> {
        if data.len() != rows * dim {
            return Err(TransferError::DimensionMismatch {
                what: "matrix data length",
                expected: rows * dim,
                found: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(TransferError::NonFinite(format!(
                "matrix entry {} (row {})",
                pos,
                pos / dim.max(1)
            )));
        }
        Ok(Self {
            rows,
            dim,
            data,
            vocab_hash,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>], vocab_hash: [u8; 32]) -> Result<Self, TransferError> {
        let dim = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * dim);
        for r in rows {
            if r.len() != dim {
                return Err(TransferError::DimensionMismatch {
                    what: "row length",
                    expected: dim,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), dim, data, vocab_hash)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vocab_hash(&self) -> &[u8; 32] {
        &self.vocab_hash
    }

    pub fn row(&self, id: TokenId) -> &[f64] {
        let i = id as usize;
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim.max(1)).take(self.rows)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}
