use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::pretok::PreTokenizerConfig;
use super::TokenizerError;
use crate::io::provenance::{sha256, Provenance};

pub const VOCAB_FORMAT_VERSION: u32 = 1;

pub type TokenId = u32;

/// String form of the fallback token for a raw byte, e.g. `<0xC5>`.
pub fn byte_token(b: u8) -> String {
    format!("<0x{b:02X}>")
}

fn parse_byte_token(s: &str) -> Option<u8> {
    let hex = s.strip_prefix("<0x")?.strip_suffix('>')?;
    if hex.len() != 2 || !hex.bytes().all(|c| c.is_ascii_digit() || (b'A'..=b'F').contains(&c)) {
        return None;
    }
    u8::from_str_radix(hex, 16).ok()
}

/// On-disk layout of a vocabulary. Field order is the serialized key order.
#[derive(Serialize, Deserialize)]
struct VocabFile {
    format_version: u32,
    tokens: Vec<String>,
    merges: Vec<[String; 2]>,
    pretok: PreTokenizerConfig,
    specials: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<Provenance>,
}

/// Ordered token inventory with merge rules and pre-tokenization settings.
///
/// Construction validates the invariants; the lookup tables used by
/// encode/decode are derived from the serialized fields and never stored.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "VocabFile", into = "VocabFile")]
pub struct Vocabulary {
    tokens: Vec<String>,
    merges: Vec<(String, String)>,
    pretok: PreTokenizerConfig,
    specials: Vec<String>,
    provenance: Option<Provenance>,

    ids: HashMap<String, TokenId>,
    merge_table: HashMap<(TokenId, TokenId), (u32, TokenId)>,
    byte_ids: Option<Box<[TokenId; 256]>>,
    byte_of: HashMap<TokenId, u8>,
}

impl PartialEq for Vocabulary {
    fn eq(&self, other: &Self) -> bool {
        self.tokens == other.tokens
            && self.merges == other.merges
            && self.pretok == other.pretok
            && self.specials == other.specials
            && self.provenance == other.provenance
    }
}

impl Vocabulary {
    pub fn new(
        tokens: Vec<String>,
        merges: Vec<(String, String)>,
        pretok: PreTokenizerConfig,
        specials: Vec<String>,
    ) -> Result<Self, TokenizerError> {
        let mut ids = HashMap::with_capacity(tokens.len());
        for (i, t) in tokens.iter().enumerate() {
            let id = TokenId::try_from(i).map_err(|_| TokenizerError::Malformed("more than u32::MAX tokens".into()))?;
            if ids.insert(t.clone(), id).is_some() {
                return Err(TokenizerError::Malformed(format!("duplicate token {t:?}")));
            }
        }

        for s in &specials {
            if !ids.contains_key(s) {
                return Err(TokenizerError::Malformed(format!(
                    "special token {s:?} missing from tokens"
                )));
            }
        }

        let mut merge_table = HashMap::with_capacity(merges.len());
        for (rank, (l, r)) in merges.iter().enumerate() {
            let lookup = |s: &str| {
                ids.get(s)
                    .copied()
                    .ok_or_else(|| TokenizerError::Malformed(format!("merge {rank} references unknown token {s:?}")))
            };
            let left = lookup(l)?;
            let right = lookup(r)?;
            let out = lookup(&format!("{l}{r}"))?;
            merge_table.entry((left, right)).or_insert((rank as u32, out));
        }

        let mut byte_of = HashMap::new();
        for (t, &id) in &ids {
            if let Some(b) = parse_byte_token(t) {
                byte_of.insert(id, b);
            }
        }
        let byte_ids = if pretok.byte_fallback {
            let mut table = Box::new([0; 256]);
            for b in 0..=255u8 {
                table[b as usize] = *ids.get(&byte_token(b)).ok_or_else(|| {
                    TokenizerError::Malformed(format!("byte fallback enabled but {} missing", byte_token(b)))
                })?;
            }
            Some(table)
        } else {
            None
        };

        Ok(Self {
            tokens,
            merges,
            pretok,
            specials,
            provenance: None,
            ids,
            merge_table,
            byte_ids,
            byte_of,
        })
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = Some(provenance);
        self
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn merges(&self) -> &[(String, String)] {
        &self.merges
    }

    pub fn pretok(&self) -> &PreTokenizerConfig {
        &self.pretok
    }

    pub fn specials(&self) -> &[String] {
        &self.specials
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub fn id_of(&self, token: &str) -> Option<TokenId> {
        self.ids.get(token).copied()
    }

    pub fn token(&self, id: TokenId) -> Option<&str> {
        self.tokens.get(id as usize).map(String::as_str)
    }

    /// The raw byte a fallback token stands for.
    pub fn byte_value(&self, id: TokenId) -> Option<u8> {
        self.byte_of.get(&id).copied()
    }

    pub(crate) fn byte_id(&self, b: u8) -> Option<TokenId> {
        self.byte_ids.as_ref().map(|t| t[b as usize])
    }

    pub(crate) fn merge_for(&self, left: TokenId, right: TokenId) -> Option<(u32, TokenId)> {
        self.merge_table.get(&(left, right)).copied()
    }

    /// Digest of the ordered token list. Binds embedding matrices and
    /// transfer plans to a vocabulary.
    pub fn hash(&self) -> [u8; 32] {
        let json = serde_json::to_vec(&self.tokens).expect("token list serializes");
        sha256(&json)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("vocabulary serializes");
        s.push('\n');
        s
    }

    pub fn from_json(json: &str) -> Result<Self, TokenizerError> {
        Ok(serde_json::from_str(json)?)
    }
}

impl TryFrom<VocabFile> for Vocabulary {
    type Error = TokenizerError;

    fn try_from(f: VocabFile) -> Result<Self, Self::Error> {
        if f.format_version != VOCAB_FORMAT_VERSION {
            return Err(TokenizerError::Malformed(format!(
                "unsupported vocabulary format_version {}",
                f.format_version
            )));
        }
        let merges = f.merges.into_iter().map(|[l, r]| (l, r)).collect();
        let mut v = Vocabulary::new(f.tokens, merges, f.pretok, f.specials)?;
        v.provenance = f.provenance;
        Ok(v)
    }
}

impl From<Vocabulary> for VocabFile {
    fn from(v: Vocabulary) -> Self {
        VocabFile {
            format_version: VOCAB_FORMAT_VERSION,
            tokens: v.tokens,
            merges: v.merges.into_iter().map(|(l, r)| [l, r]).collect(),
            pretok: v.pretok,
            specials: v.specials,
            provenance: v.provenance,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strings(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn byte_token_names() {
        assert_eq!(byte_token(0x0a), "<0x0A>");
        assert_eq!(parse_byte_token("<0xC5>"), Some(0xC5));
        assert_eq!(parse_byte_token("<0xc5>"), None);
        assert_eq!(parse_byte_token("<0x5>"), None);
    }

    #[test]
    fn rejects_duplicates_and_dangling_merges() {
        let cfg = PreTokenizerConfig::default();
        let dup = Vocabulary::new(strings(&["a", "a"]), vec![], cfg, vec![]);
        assert!(matches!(dup, Err(TokenizerError::Malformed(_))));

        let dangling = Vocabulary::new(strings(&["a", "b"]), vec![("a".into(), "b".into())], cfg, vec![]);
        assert!(matches!(dangling, Err(TokenizerError::Malformed(_))));
    }

    #[test]
    fn byte_fallback_requires_all_bytes() {
        let cfg = PreTokenizerConfig {
            byte_fallback: true,
            ..Default::default()
        };
        assert!(Vocabulary::new(strings(&["a"]), vec![], cfg, vec![]).is_err());
    }

    #[test]
    fn json_layout() {
        let v = Vocabulary::new(
            strings(&["a", "b", "ab"]),
            vec![("a".into(), "b".into())],
            PreTokenizerConfig::default(),
            vec![],
        )
        .unwrap();
        let json = v.to_json();
        let keys: Vec<_> = ["format_version", "tokens", "merges", "pretok", "specials"]
            .iter()
            .map(|k| json.find(&format!("\"{k}\"")).unwrap())
            .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
        assert!(json.contains("\"whitespace_policy\": \"attach-leading-space\""));
        assert_eq!(Vocabulary::from_json(&json).unwrap(), v);
    }

    #[test]
    fn rejects_unknown_format_version() {
        let json = r#"{"format_version":2,"tokens":["a"],"merges":[],"pretok":{"split_digits":false,"isolate_punctuation":false,"whitespace_policy":"standalone","lowercase":false,"byte_fallback":false},"specials":[]}"#;
        assert!(Vocabulary::from_json(json).is_err());
    }
}
