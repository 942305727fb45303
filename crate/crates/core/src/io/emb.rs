//! EMB1 binary embedding matrices.
//!
//! Layout: `b"EMB1"`, row count and dimension as little-endian `u32`, the rows
//! as little-endian `f32` in row-major order, then the 32-byte hash of the
//! vocabulary the rows are indexed by.

use std::io::{Read, Write};

use super::FormatError;
use crate::transfer::EmbeddingMatrix;

pub const MAGIC: &[u8; 4] = b"EMB1";

pub fn write_emb<W: Write>(mut w: W, m: &EmbeddingMatrix) -> Result<(), FormatError> {
    let rows = u32::try_from(m.rows()).map_err(|_| FormatError::Malformed("too many rows for EMB1".into()))?;
    let dim = u32::try_from(m.dim()).map_err(|_| FormatError::Malformed("dimension too large for EMB1".into()))?;
    let mut buf = Vec::with_capacity(12 + 4 * m.as_slice().len() + 32);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&rows.to_le_bytes());
    buf.extend_from_slice(&dim.to_le_bytes());
    for &x in m.as_slice() {
        let v = x as f32;
        if !v.is_finite() {
            return Err(FormatError::Malformed(format!("value {x} overflows f32")));
        }
        buf.extend_from_slice(&v.to_le_bytes());
    }
    buf.extend_from_slice(m.vocab_hash());
    w.write_all(&buf)?;
    Ok(())
}

pub fn emb_to_bytes(m: &EmbeddingMatrix) -> Result<Vec<u8>, FormatError> {
    let mut out = Vec::new();
    write_emb(&mut out, m)?;
    Ok(out)
}

pub fn read_emb<R: Read>(mut r: R) -> Result<EmbeddingMatrix, FormatError> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    emb_from_bytes(&bytes)
}

pub fn emb_from_bytes(bytes: &[u8]) -> Result<EmbeddingMatrix, FormatError> {
    if bytes.len() < 12 || &bytes[..4] != MAGIC {
        return Err(FormatError::Malformed("not an EMB1 file".into()));
    }
    let word = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes")) as usize;
    let (rows, dim) = (word(4), word(8));
    let body = rows
        .checked_mul(dim)
        .and_then(|n| n.checked_mul(4))
        .ok_or_else(|| FormatError::Malformed("EMB1 header overflows".into()))?;
    let expected = 12 + body + 32;
    if bytes.len() != expected {
        return Err(FormatError::Malformed(format!(
            "EMB1 size {} does not match header ({rows}×{dim} needs {expected})",
            bytes.len()
        )));
    }
    let data = bytes[12..12 + body]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")) as f64)
        .collect();
    let hash: [u8; 32] = bytes[12 + body..].try_into().expect("32 bytes");
    Ok(EmbeddingMatrix::new(rows, dim, data, hash)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn layout() {
        let m = EmbeddingMatrix::from_rows(&[vec![1.0, -2.0], vec![0.5, 0.0]], [7; 32]).unwrap();
        let b = emb_to_bytes(&m).unwrap();
        assert_eq!(&b[..4], b"EMB1");
        assert_eq!(&b[4..12], &[2, 0, 0, 0, 2, 0, 0, 0]);
        assert_eq!(&b[12..16], &1.0f32.to_le_bytes());
        assert_eq!(&b[16..20], &(-2.0f32).to_le_bytes());
        assert_eq!(&b[b.len() - 32..], &[7; 32]);
        assert_eq!(b.len(), 12 + 16 + 32);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(emb_from_bytes(b"EMB2\0\0\0\0\0\0\0\0").is_err());
        let m = EmbeddingMatrix::from_rows(&[vec![1.0]], [0; 32]).unwrap();
        let b = emb_to_bytes(&m).unwrap();
        assert!(emb_from_bytes(&b[..b.len() - 1]).is_err());
        let mut nan = b.clone();
        nan[12..16].copy_from_slice(&f32::NAN.to_le_bytes());
        assert!(emb_from_bytes(&nan).is_err());
        let big = EmbeddingMatrix::from_rows(&[vec![1e300]], [0; 32]).unwrap();
        assert!(emb_to_bytes(&big).is_err());
    }

    proptest! {
        #[test]
        fn round_trip(rows in 0usize..6, dim in 0usize..5, seed in any::<u32>(), hash in any::<[u8; 32]>()) {
            let data: Vec<f64> = (0..rows * dim).map(|k| ((seed as f64 + k as f64) * 0.37).sin() as f32 as f64).collect();
            let m = EmbeddingMatrix::new(rows, dim, data, hash).unwrap();
            let back = emb_from_bytes(&emb_to_bytes(&m).unwrap()).unwrap();
            prop_assert_eq!(back, m);
        }
    }
}
