//! Euclidean projection onto the probability simplex.
//!
//! For scores `z`, sparsemax returns `argmin_{p ∈ Δ} ‖p − z‖²`. The solution
//! is `p_i = max(z_i − τ, 0)` where the threshold `τ` is found by sorting:
//! with `z_(1) ≥ z_(2) ≥ …`, the support size is the largest `k` such that
//! `1 + k·z_(k) > Σ_{j≤k} z_(j)`, and `τ = (Σ_{j≤k} z_(j) − 1) / k`.

use super::TransferError;

/// Support size and threshold for `scores`.
pub fn sparsemax_threshold(scores: &[f64]) -> Result<(usize, f64), TransferError> {
    if scores.is_empty() {
        return Err(TransferError::EmptyInput);
    }
    if scores.iter().any(|z| !z.is_finite()) {
        return Err(TransferError::NonFinite("sparsemax score".into()));
    }
    let mut sorted = scores.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));

    let mut cumsum = 0.0;
    let mut support = 1;
    let mut support_sum = sorted[0];
    for (i, &z) in sorted.iter().enumerate() {
        cumsum += z;
        let k = (i + 1) as f64;
        if 1.0 + k * z > cumsum {
            support = i + 1;
            support_sum = cumsum;
        }
    }
    Ok((support, (support_sum - 1.0) / support as f64))
}

pub fn sparsemax(scores: &[f64]) -> Result<Vec<f64>, TransferError> {
    let (_, tau) = sparsemax_threshold(scores)?;
    Ok(scores.iter().map(|&z| (z - tau).max(0.0)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn symmetric_pair() {
        assert_eq!(sparsemax(&[0.5, 0.5]).unwrap(), vec![0.5, 0.5]);
    }

    #[test]
    fn one_hot_when_gap_is_large() {
        assert_eq!(sparsemax_threshold(&[2.0, 0.0]).unwrap(), (1, 1.0));
        assert_eq!(sparsemax(&[2.0, 0.0]).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn two_of_three() {
        let (k, tau) = sparsemax_threshold(&[0.9, 0.5, 0.1]).unwrap();
        assert_eq!(k, 2);
        assert!((tau - 0.2).abs() < 1e-15);
        let p = sparsemax(&[0.9, 0.5, 0.1]).unwrap();
        for (got, want) in p.iter().zip([0.7, 0.3, 0.0]) {
            assert!((got - want).abs() < 1e-15, "{p:?}");
        }
        assert_eq!(p[2], 0.0);
    }

    #[test]
    fn errors() {
        assert!(matches!(sparsemax(&[]), Err(TransferError::EmptyInput)));
        assert!(matches!(
            sparsemax(&[1.0, f64::INFINITY]),
            Err(TransferError::NonFinite(_))
        ));
    }

    proptest! {
        #[test]
        fn lies_on_simplex(z in prop::collection::vec(-5.0f64..5.0, 1..12)) {
            let p = sparsemax(&z).unwrap();
            prop_assert!(p.iter().all(|&x| x >= 0.0));
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn translation_invariant(z in prop::collection::vec(-5.0f64..5.0, 1..12), c in -10.0f64..10.0) {
            let p = sparsemax(&z).unwrap();
            let shifted: Vec<f64> = z.iter().map(|x| x + c).collect();
            let q = sparsemax(&shifted).unwrap();
            for (a, b) in p.iter().zip(&q) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }

        #[test]
        fn order_preserving(z in prop::collection::vec(-5.0f64..5.0, 2..12)) {
            let p = sparsemax(&z).unwrap();
            for i in 0..z.len() {
                for j in 0..z.len() {
                    if z[i] > z[j] {
                        prop_assert!(p[i] >= p[j]);
                    }
                }
            }
        }
    }
}
