use std::collections::HashMap;

use super::TransferError;

/// Token-string keyed vectors used only to measure similarity between tokens.
///
/// All vectors share one dimension, are finite and non-zero. Insertion order
/// is preserved for serialization.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxiliaryEmbeddings {
    dim: usize,
    tokens: Vec<String>,
    vectors: Vec<Vec<f64>>,
    index: HashMap<String, usize>,
}

impl AuxiliaryEmbeddings {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            tokens: Vec::new(),
            vectors: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn from_entries<I>(dim: usize, entries: I) -> Result<Self, TransferError>
    where
        I: IntoIterator<Item = (String, Vec<f64>)>,
    {
        let mut aux = Self::new(dim);
        for (token, v) in entries {
            aux.insert(token, v)?;
        }
        Ok(aux)
    }

    pub fn insert(&mut self, token: String, vector: Vec<f64>) -> Result<(), TransferError> {
        if vector.len() != self.dim {
            return Err(TransferError::DimensionMismatch {
                what: "auxiliary vector",
                expected: self.dim,
                found: vector.len(),
            });
        }
        if vector.iter().any(|x| !x.is_finite()) {
            return Err(TransferError::NonFinite(format!("auxiliary vector for {token:?}")));
        }
        if vector.iter().all(|&x| x == 0.0) {
            return Err(TransferError::InvalidArgument(format!(
                "zero auxiliary vector for {token:?}"
            )));
        }
        if self.index.contains_key(&token) {
            return Err(TransferError::InvalidArgument(format!(
                "duplicate auxiliary token {token:?}"
            )));
        }
        self.index.insert(token.clone(), self.tokens.len());
        self.tokens.push(token);
        self.vectors.push(vector);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<&[f64]> {
        self.index.get(token).map(|&i| self.vectors[i].as_slice())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.tokens
            .iter()
            .map(String::as_str)
            .zip(self.vectors.iter().map(Vec::as_slice))
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    dot(a, b) / (norm(a) * norm(b))
}
