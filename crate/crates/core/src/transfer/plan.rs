//! Transfer plans: for every target token, where its embedding came from.
//!
//! Every initializer first builds a plan and then materializes it with
//! [`apply_transfer`], so the same plan applied to an input embedding and to
//! an output head produces consistently initialized matrices.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::matrix::EmbeddingMatrix;
use super::TransferError;
use crate::tokenizer::TokenId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowOrigin {
    CopiedOverlap,
    FocusCombination,
    FvtDecomposition,
    LinearMapped,
    RandomFallback,
}

impl RowOrigin {
    pub const ALL: [RowOrigin; 5] = [
        Self::CopiedOverlap,
        Self::FocusCombination,
        Self::FvtDecomposition,
        Self::LinearMapped,
        Self::RandomFallback,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::CopiedOverlap => "copied-overlap",
            Self::FocusCombination => "focus-combination",
            Self::FvtDecomposition => "fvt-decomposition",
            Self::LinearMapped => "linear-mapped",
            Self::RandomFallback => "random-fallback",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanEntry {
    pub target_id: TokenId,
    pub token: String,
    pub provenance: RowOrigin,
    /// `(source id, weight)` pairs, sorted by source id. Empty for
    /// random-fallback rows.
    pub sources: Vec<(TokenId, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferPlan {
    pub src_vocab_hash: [u8; 32],
    pub tgt_vocab_hash: [u8; 32],
    /// Seed for random-fallback rows.
    pub seed: u64,
    /// Conditions worth surfacing, e.g. a rank-deficient linear fit.
    pub flags: Vec<String>,
    /// One entry per target id, in id order.
    pub entries: Vec<PlanEntry>,
}

impl TransferPlan {
    pub fn count(&self, origin: RowOrigin) -> usize {
        self.entries.iter().filter(|e| e.provenance == origin).count()
    }

    /// Checks that ids run 0..n without gaps or repeats.
    pub fn check_complete(&self, target_size: usize) -> Result<(), TransferError> {
        if self.entries.len() != target_size {
            return Err(TransferError::DimensionMismatch {
                what: "plan entries",
                expected: target_size,
                found: self.entries.len(),
            });
        }
        for (i, e) in self.entries.iter().enumerate() {
            if e.target_id as usize != i {
                return Err(TransferError::InvalidArgument(format!(
                    "plan entry {i} has target id {}",
                    e.target_id
                )));
            }
        }
        Ok(())
    }
}

/// Draws rows from a per-dimension normal law fitted to a source matrix.
pub struct RandomRowSampler {
    mean: Vec<f64>,
    std: Vec<f64>,
    rng: ChaCha8Rng,
}

impl RandomRowSampler {
    pub fn new(source: &EmbeddingMatrix, seed: u64) -> Self {
        // Welford: identical rows give an exact mean and exactly zero spread.
        let d = source.dim();
        let mut mean = vec![0.0; d];
        let mut m2 = vec![0.0; d];
        for (k, row) in source.iter_rows().enumerate() {
            let n = (k + 1) as f64;
            for j in 0..d {
                let delta = row[j] - mean[j];
                mean[j] += delta / n;
                m2[j] += delta * (row[j] - mean[j]);
            }
        }
        let n = source.rows().max(1) as f64;
        let std = m2.iter().map(|v| (v / n).sqrt()).collect();
        Self {
            mean,
            std,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn std(&self) -> &[f64] {
        &self.std
    }

    pub fn sample(&mut self) -> Vec<f64> {
        self.mean
            .iter()
            .zip(&self.std)
            .map(|(&m, &s)| {
                let z: f64 = StandardNormal.sample(&mut self.rng);
                m + s * z
            })
            .collect()
    }
}

fn combine(source: &EmbeddingMatrix, sources: &[(TokenId, f64)]) -> Vec<f64> {
    let Some((&(first, w0), rest)) = sources.split_first() else {
        return vec![0.0; source.dim()];
    };
    // Seeded with the first term so a single weight-1 source is copied exactly.
    let mut row: Vec<f64> = source.row(first).iter().map(|x| w0 * x).collect();
    for &(id, w) in rest {
        for (acc, x) in row.iter_mut().zip(source.row(id)) {
            *acc += w * x;
        }
    }
    row
}

fn materialize(source: &EmbeddingMatrix, plan: &TransferPlan) -> Result<EmbeddingMatrix, TransferError> {
    if source.vocab_hash() != &plan.src_vocab_hash {
        return Err(TransferError::HashMismatch);
    }
    let mut sampler = RandomRowSampler::new(source, plan.seed);
    let mut data = Vec::with_capacity(plan.entries.len() * source.dim());
    for e in &plan.entries {
        if let Some(&(id, _)) = e.sources.iter().find(|(id, _)| *id as usize >= source.rows()) {
            return Err(TransferError::InvalidArgument(format!(
                "plan references source id {id} beyond {} rows",
                source.rows()
            )));
        }
        match e.provenance {
            RowOrigin::CopiedOverlap => {
                let &[(id, _)] = e.sources.as_slice() else {
                    return Err(TransferError::InvalidArgument(format!(
                        "copied row {} must have exactly one source",
                        e.target_id
                    )));
                };
                data.extend_from_slice(source.row(id));
            }
            RowOrigin::RandomFallback => data.extend(sampler.sample()),
            _ => data.extend(combine(source, &e.sources)),
        }
    }
    EmbeddingMatrix::new(plan.entries.len(), source.dim(), data, plan.tgt_vocab_hash)
}

/// Applies one plan to an input embedding and, when untied, an output head.
/// Both sources must be bound to the plan's source vocabulary.
pub fn apply_transfer(
    src_in: &EmbeddingMatrix,
    src_out: Option<&EmbeddingMatrix>,
    plan: &TransferPlan,
) -> Result<(EmbeddingMatrix, Option<EmbeddingMatrix>), TransferError> {
    let tgt_in = materialize(src_in, plan)?;
    let tgt_out = src_out.map(|m| materialize(m, plan)).transpose()?;
    Ok((tgt_in, tgt_out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(rows: &[Vec<f64>], hash: u8) -> EmbeddingMatrix {
        EmbeddingMatrix::from_rows(rows, [hash; 32]).unwrap()
    }

    fn plan(entries: Vec<PlanEntry>) -> TransferPlan {
        TransferPlan {
            src_vocab_hash: [1; 32],
            tgt_vocab_hash: [2; 32],
            seed: 7,
            flags: Vec::new(),
            entries,
        }
    }

    fn entry(id: TokenId, origin: RowOrigin, sources: Vec<(TokenId, f64)>) -> PlanEntry {
        PlanEntry {
            target_id: id,
            token: format!("t{id}"),
            provenance: origin,
            sources,
        }
    }

    #[test]
    fn identical_rows_have_zero_spread() {
        let m = matrix(&vec![vec![0.1, -0.3, 7.25]; 9], 1);
        let mut s = RandomRowSampler::new(&m, 3);
        assert_eq!(s.std(), &[0.0, 0.0, 0.0]);
        for _ in 0..5 {
            assert_eq!(s.sample(), vec![0.1, -0.3, 7.25]);
        }
    }

    #[test]
    fn copy_plan_permutes_rows() {
        let src = matrix(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]], 1);
        let p = plan(vec![
            entry(0, RowOrigin::CopiedOverlap, vec![(2, 1.0)]),
            entry(1, RowOrigin::CopiedOverlap, vec![(0, 1.0)]),
        ]);
        let (out, head) = apply_transfer(&src, Some(&src), &p).unwrap();
        assert_eq!(out.row(0), src.row(2));
        assert_eq!(out.row(1), src.row(0));
        assert_eq!(head.as_ref(), Some(&out));
        assert_eq!(out.vocab_hash(), &[2; 32]);
    }

    #[test]
    fn same_weights_in_both_matrices() {
        let src_in = matrix(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![5.0, 5.0]], 1);
        let src_out = matrix(&[vec![2.0], vec![4.0], vec![8.0]], 1);
        let p = plan(vec![entry(0, RowOrigin::FocusCombination, vec![(0, 0.7), (1, 0.3)])]);
        let (a, b) = apply_transfer(&src_in, Some(&src_out), &p).unwrap();
        assert_eq!(a.row(0), &[0.7, 0.3]);
        assert!((b.unwrap().row(0)[0] - (0.7 * 2.0 + 0.3 * 4.0)).abs() < 1e-15);
    }

    #[test]
    fn hash_mismatch() {
        let src = matrix(&[vec![1.0]], 9);
        let p = plan(vec![entry(0, RowOrigin::CopiedOverlap, vec![(0, 1.0)])]);
        assert!(matches!(
            apply_transfer(&src, None, &p),
            Err(TransferError::HashMismatch)
        ));
    }

    #[test]
    fn out_of_range_source() {
        let src = matrix(&[vec![1.0]], 1);
        let p = plan(vec![entry(0, RowOrigin::FvtDecomposition, vec![(4, 1.0)])]);
        assert!(apply_transfer(&src, None, &p).is_err());
    }
}
