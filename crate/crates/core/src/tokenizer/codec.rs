use super::pretok::{normalize, pretokenize};
use super::vocab::{TokenId, Vocabulary};
use super::TokenizerError;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenSequence {
    pub ids: Vec<TokenId>,
    /// Unicode scalar count of the encoded text.
    pub source_len_chars: usize,
}

impl TokenSequence {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// Maps a fragment to its initial symbols: one token per known character,
/// UTF-8 bytes for unknown ones when byte fallback is on.
fn initial_symbols(vocab: &Vocabulary, fragment: &str, out: &mut Vec<TokenId>) -> Result<(), TokenizerError> {
    let mut buf = [0u8; 4];
    for c in fragment.chars() {
        if let Some(id) = vocab.id_of(c.encode_utf8(&mut buf)) {
            out.push(id);
            continue;
        }
        if !vocab.pretok().byte_fallback {
            return Err(TokenizerError::UnknownSymbol(c));
        }
        for &b in c.encode_utf8(&mut buf).as_bytes() {
            out.push(vocab.byte_id(b).expect("byte table present when byte fallback is on"));
        }
    }
    Ok(())
}

/// Repeatedly applies the lowest-ranked applicable merge, left to right.
fn apply_merges(vocab: &Vocabulary, symbols: &mut Vec<TokenId>) {
    loop {
        let best = symbols
            .windows(2)
            .filter_map(|w| vocab.merge_for(w[0], w[1]).map(|(rank, out)| (rank, w[0], w[1], out)))
            .min_by_key(|&(rank, ..)| rank);
        let Some((_, left, right, out)) = best else {
            return;
        };
        let mut merged = Vec::with_capacity(symbols.len());
        let mut i = 0;
        while i < symbols.len() {
            if i + 1 < symbols.len() && symbols[i] == left && symbols[i + 1] == right {
                merged.push(out);
                i += 2;
            } else {
                merged.push(symbols[i]);
                i += 1;
            }
        }
        *symbols = merged;
    }
}

pub fn encode(vocab: &Vocabulary, text: &str) -> Result<TokenSequence, TokenizerError> {
    let text = normalize(text, vocab.pretok());
    let mut ids = Vec::new();
    let mut symbols = Vec::new();
    for fragment in pretokenize(&text, vocab.pretok()) {
        symbols.clear();
        initial_symbols(vocab, &fragment, &mut symbols)?;
        apply_merges(vocab, &mut symbols);
        ids.extend_from_slice(&symbols);
    }
    Ok(TokenSequence {
        ids,
        source_len_chars: text.chars().count(),
    })
}

pub fn decode(vocab: &Vocabulary, ids: &[TokenId]) -> Result<String, TokenizerError> {
    let mut out = String::new();
    let mut pending = Vec::new();
    for &id in ids {
        let token = vocab
            .token(id)
            .ok_or(TokenizerError::IdOutOfRange { id, size: vocab.len() })?;
        if let Some(b) = vocab.byte_value(id) {
            pending.push(b);
            continue;
        }
        if !pending.is_empty() {
            out.push_str(&String::from_utf8_lossy(&pending));
            pending.clear();
        }
        out.push_str(token);
    }
    if !pending.is_empty() {
        out.push_str(&String::from_utf8_lossy(&pending));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tokenizer::{byte_token, train_bpe, PreTokenizerConfig};

    fn aaab_vocab() -> Vocabulary {
        Vocabulary::new(
            vec!["a".into(), "b".into(), "aa".into()],
            vec![("a".into(), "a".into())],
            PreTokenizerConfig::default(),
            vec![],
        )
        .unwrap()
    }

    fn fallback_vocab(chars: &[&str]) -> Vocabulary {
        let mut tokens: Vec<String> = (0..=255u8).map(byte_token).collect();
        tokens.extend(chars.iter().map(|s| s.to_string()));
        let cfg = PreTokenizerConfig {
            byte_fallback: true,
            ..Default::default()
        };
        Vocabulary::new(tokens, vec![], cfg, vec![]).unwrap()
    }

    #[test]
    fn single_merge_application() {
        let v = aaab_vocab();
        let seq = encode(&v, "aaab").unwrap();
        let pieces: Vec<_> = seq.ids.iter().map(|&i| v.token(i).unwrap()).collect();
        assert_eq!(pieces, vec!["aa", "a", "b"]);
        assert_eq!(seq.source_len_chars, 4);
    }

    #[test]
    fn empty_text_and_ids() {
        let v = aaab_vocab();
        assert!(encode(&v, "").unwrap().is_empty());
        assert_eq!(decode(&v, &[]).unwrap(), "");
    }

    #[test]
    fn unknown_symbol_without_fallback() {
        let v = aaab_vocab();
        assert!(matches!(encode(&v, "aq"), Err(TokenizerError::UnknownSymbol('q'))));
    }

    #[test]
    fn byte_fallback_for_missing_char() {
        let v = fallback_vocab(&["a"]);
        let seq = encode(&v, "q").unwrap();
        assert_eq!(seq.ids, vec![v.id_of("<0x71>").unwrap()]);
        assert_eq!(decode(&v, &seq.ids).unwrap(), "q");
    }

    #[test]
    fn multibyte_character_reassembles() {
        let v = fallback_vocab(&["a"]);
        for text in ["ł", "źródło", "日本", "a🙂a"] {
            let seq = encode(&v, text).unwrap();
            assert_eq!(decode(&v, &seq.ids).unwrap(), text);
        }
        assert_eq!(encode(&v, "ł").unwrap().len(), 2);
    }

    #[test]
    fn id_out_of_range() {
        let v = aaab_vocab();
        assert!(matches!(
            decode(&v, &[3]),
            Err(TokenizerError::IdOutOfRange { id: 3, size: 3 })
        ));
    }

    #[test]
    fn round_trip_trained() {
        let corpus = ["W trosce o byt i przyszłość naszej Ojczyzny"];
        let cfg = PreTokenizerConfig::default();
        let v = match train_bpe(&corpus, 60, &cfg, &[]) {
            Ok(v) => v,
            Err(TokenizerError::CorpusSaturated { partial, .. }) => *partial,
            Err(e) => panic!("{e}"),
        };
        let text = "W trosce o byt";
        assert_eq!(decode(&v, &encode(&v, text).unwrap().ids).unwrap(), text);
    }
}
