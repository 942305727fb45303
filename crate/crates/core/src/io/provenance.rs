//! Provenance stamps embedded in every artifact the toolkit writes.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool_version: String,
    /// SHA-256 of the canonical JSON form of the run configuration.
    pub config_hash: String,
}

impl Provenance {
    pub fn for_config<T: Serialize>(config: &T) -> Self {
        Self {
            tool_version: TOOL_VERSION.to_owned(),
            config_hash: config_hash(config),
        }
    }
}

pub fn sha256(bytes: &[u8]) -> [u8; 32] {
    let digest = Sha256::digest(bytes);
    let mut out = [0u8; 32];
    out.copy_from_slice(&digest);
    out
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(sha256(bytes))
}

/// Hash of a configuration record. Struct fields serialize in declaration
/// order, so the digest is stable for identical configurations.
pub fn config_hash<T: Serialize>(config: &T) -> String {
    let json = serde_json::to_vec(config).expect("run configuration serializes");
    sha256_hex(&json)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn config_hash_is_stable() {
        #[derive(Serialize)]
        struct Cfg {
            a: u32,
            b: &'static str,
        }
        let h1 = config_hash(&Cfg { a: 1, b: "x" });
        let h2 = config_hash(&Cfg { a: 1, b: "x" });
        let h3 = config_hash(&Cfg { a: 2, b: "x" });
        assert_eq!(h1, h2);
        assert_ne!(h1, h3);
    }
}
