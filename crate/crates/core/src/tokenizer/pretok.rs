//! Rule-based splitting of raw text into fragments that merges never cross.
//!
//! Word boundaries are whitespace runs. Inside a word, digits can be split
//! into single characters and punctuation runs can be isolated from letters.
//! The leading-space marker is the space character itself: under
//! [`WhitespacePolicy::AttachLeadingSpace`] a single space preceding a word is
//! glued to the word's first fragment, so concatenating the fragments always
//! reproduces the input.

use serde::{Deserialize, Serialize};

/// Whether a fragment may begin with a space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WhitespacePolicy {
    /// A space directly before a word becomes part of that word's first fragment.
    #[default]
    AttachLeadingSpace,
    /// Whitespace runs are always fragments of their own.
    Standalone,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PreTokenizerConfig {
    /// Every numeric character becomes its own fragment.
    pub split_digits: bool,
    /// Runs of non-alphanumeric characters are split from letters.
    pub isolate_punctuation: bool,
    pub whitespace_policy: WhitespacePolicy,
    /// Lowercase text before pre-tokenization. Breaks the round-trip law.
    pub lowercase: bool,
    /// Characters outside the vocabulary decompose into UTF-8 byte tokens.
    pub byte_fallback: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CharClass {
    Digit,
    Punct,
    Word,
}

fn classify(c: char, cfg: &PreTokenizerConfig) -> CharClass {
    if cfg.split_digits && c.is_numeric() {
        CharClass::Digit
    } else if cfg.isolate_punctuation && !c.is_alphanumeric() {
        CharClass::Punct
    } else {
        CharClass::Word
    }
}

/// Splits a whitespace-free word into fragments according to the digit and
/// punctuation rules. Returned slices borrow from `word`.
fn split_word<'a>(word: &'a str, cfg: &PreTokenizerConfig, out: &mut Vec<&'a str>) {
    let mut start = 0;
    let mut prev: Option<CharClass> = None;
    for (i, c) in word.char_indices() {
        let class = classify(c, cfg);
        if let Some(p) = prev {
            if p != class || class == CharClass::Digit {
                out.push(&word[start..i]);
                start = i;
            }
        }
        prev = Some(class);
    }
    if start < word.len() {
        out.push(&word[start..]);
    }
}

/// Applies the optional lowercase normalization. All other text is left
/// byte-for-byte untouched.
pub fn normalize(text: &str, cfg: &PreTokenizerConfig) -> String {
    if cfg.lowercase {
        text.to_lowercase()
    } else {
        text.to_owned()
    }
}

/// Splits `text` into pre-token fragments. Normalization is not applied here;
/// see [`normalize`].
pub fn pretokenize(text: &str, cfg: &PreTokenizerConfig) -> Vec<String> {
    let mut fragments = Vec::new();
    let mut pending_space = false;
    let mut rest = text;

    while !rest.is_empty() {
        let ws_len = rest
            .char_indices()
            .find(|(_, c)| !c.is_whitespace())
            .map_or(rest.len(), |(i, _)| i);

        if ws_len > 0 {
            let (ws, tail) = rest.split_at(ws_len);
            rest = tail;
            let attach =
                cfg.whitespace_policy == WhitespacePolicy::AttachLeadingSpace && !tail.is_empty() && ws.ends_with(' ');
            if attach {
                let head = &ws[..ws.len() - 1];
                if !head.is_empty() {
                    fragments.push(head.to_owned());
                }
                pending_space = true;
            } else {
                fragments.push(ws.to_owned());
            }
            continue;
        }

        let word_len = rest
            .char_indices()
            .find(|(_, c)| c.is_whitespace())
            .map_or(rest.len(), |(i, _)| i);
        let (word, tail) = rest.split_at(word_len);
        rest = tail;

        let mut pieces = Vec::new();
        split_word(word, cfg, &mut pieces);
        for (k, piece) in pieces.into_iter().enumerate() {
            if k == 0 && pending_space {
                let mut s = String::with_capacity(piece.len() + 1);
                s.push(' ');
                s.push_str(piece);
                fragments.push(s);
            } else {
                fragments.push(piece.to_owned());
            }
        }
        pending_space = false;
    }
    fragments
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg(split_digits: bool, isolate_punctuation: bool) -> PreTokenizerConfig {
        PreTokenizerConfig {
            split_digits,
            isolate_punctuation,
            ..Default::default()
        }
    }

    #[test]
    fn digits_and_punctuation() {
        let frags = pretokenize("rok 1989.", &cfg(true, true));
        assert_eq!(frags, vec!["rok", " 1", "9", "8", "9", "."]);
    }

    #[test]
    fn empty_text() {
        assert!(pretokenize("", &cfg(true, true)).is_empty());
        assert!(pretokenize("", &cfg(false, false)).is_empty());
    }

    #[test]
    fn single_word_no_rules() {
        assert_eq!(pretokenize("abc", &cfg(false, false)), vec!["abc"]);
    }

    #[test]
    fn flags_off_keeps_words_whole() {
        assert_eq!(pretokenize("rok 1989.", &cfg(false, false)), vec!["rok", " 1989."]);
    }

    #[test]
    fn whitespace_runs() {
        let c = cfg(false, false);
        assert_eq!(pretokenize("a  b", &c), vec!["a", " ", " b"]);
        assert_eq!(pretokenize("a\nb ", &c), vec!["a", "\n", "b", " "]);
        assert_eq!(pretokenize(" a", &c), vec![" a"]);
    }

    #[test]
    fn standalone_whitespace() {
        let c = PreTokenizerConfig {
            whitespace_policy: WhitespacePolicy::Standalone,
            ..Default::default()
        };
        assert_eq!(pretokenize("W trosce", &c), vec!["W", " ", "trosce"]);
    }

    #[test]
    fn punctuation_isolated_after_space() {
        assert_eq!(
            pretokenize("my, Naród - wszyscy", &cfg(false, true)),
            vec!["my", ",", " Naród", " -", " wszyscy"]
        );
    }

    proptest! {
        #[test]
        fn concatenation_reproduces_input(
            text in "\\PC{0,40}",
            split in any::<bool>(),
            punct in any::<bool>(),
            standalone in any::<bool>(),
        ) {
            let c = PreTokenizerConfig {
                split_digits: split,
                isolate_punctuation: punct,
                whitespace_policy: if standalone { WhitespacePolicy::Standalone } else { WhitespacePolicy::AttachLeadingSpace },
                ..Default::default()
            };
            let frags = pretokenize(&text, &c);
            prop_assert_eq!(frags.concat(), text);
            prop_assert!(frags.iter().all(|f| !f.is_empty()));
        }

        #[test]
        fn split_digits_never_pairs_digits(text in "[a-z0-9 .,]{0,40}") {
            for frag in pretokenize(&text, &cfg(true, false)) {
                let chars: Vec<char> = frag.chars().collect();
                prop_assert!(chars.windows(2).all(|w| !(w[0].is_numeric() && w[1].is_numeric())));
            }
        }
    }
}
