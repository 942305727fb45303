//! Tokenizer efficiency: token count, characters per token (CpT) and tokens
//! per word (TpW, the fertility ratio).
//!
//! Ratios are kept as exact rationals so that `cpt * tokens == chars` and
//! `tpw * words == tokens` hold without floating-point slack. Conversion to
//! `f64` or to a two-decimal display string happens only at the edges.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::io::provenance::sha256_hex;
use crate::tokenizer::{encode, TokenizerError, Vocabulary};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("text has no words; ratios are undefined")]
    EmptyText,
    #[error("tokenizer {name}: {source}")]
    TokenizerLoad { name: String, source: TokenizerError },
    #[error("reports were computed over different texts or conventions")]
    MixedTexts,
    #[error("unknown counting convention {0:?}")]
    UnknownConvention(String),
}

/// How characters are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountingConvention {
    /// Line breaks and paragraph gaps (any whitespace run) collapse to one
    /// space, leading/trailing whitespace is dropped, every scalar counts.
    #[default]
    CollapseWhitespace,
    /// Text is taken as is; every scalar counts.
    Raw,
    /// Whitespace collapsed as in the default, but only non-whitespace
    /// scalars count.
    NonWhitespace,
}

impl CountingConvention {
    pub const ALL: [CountingConvention; 3] = [Self::CollapseWhitespace, Self::Raw, Self::NonWhitespace];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::CollapseWhitespace => "collapse-whitespace",
            Self::Raw => "raw",
            Self::NonWhitespace => "non-whitespace",
        }
    }
}

impl fmt::Display for CountingConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CountingConvention {
    type Err = MetricsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| MetricsError::UnknownConvention(s.to_owned()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextStats {
    pub char_count: u64,
    /// Maximal runs of non-whitespace.
    pub word_count: u64,
    /// The text tokenizers are run on.
    pub normalized_text: String,
    pub convention: CountingConvention,
}

impl TextStats {
    pub fn text_sha256(&self) -> String {
        sha256_hex(self.normalized_text.as_bytes())
    }
}

fn collapse_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub fn text_stats(text: &str, convention: CountingConvention) -> TextStats {
    let normalized_text = match convention {
        CountingConvention::Raw => text.to_owned(),
        CountingConvention::CollapseWhitespace | CountingConvention::NonWhitespace => collapse_whitespace(text),
    };
    let char_count = match convention {
        CountingConvention::NonWhitespace => normalized_text.chars().filter(|c| !c.is_whitespace()).count(),
        _ => normalized_text.chars().count(),
    } as u64;
    let word_count = normalized_text.split_whitespace().count() as u64;
    TextStats {
        char_count,
        word_count,
        normalized_text,
        convention,
    }
}

/// Anything that can report how many tokens a text costs.
pub trait TokenCounter {
    fn name(&self) -> &str;
    fn vocab_size(&self) -> usize;
    fn count_tokens(&self, text: &str) -> Result<usize, MetricsError>;
}

/// A vocabulary with a display label.
#[derive(Debug, Clone)]
pub struct NamedVocabulary {
    pub name: String,
    pub vocab: Vocabulary,
}

impl TokenCounter for NamedVocabulary {
    fn name(&self) -> &str {
        &self.name
    }

    fn vocab_size(&self) -> usize {
        self.vocab.len()
    }

    fn count_tokens(&self, text: &str) -> Result<usize, MetricsError> {
        encode(&self.vocab, text)
            .map(|s| s.len())
            .map_err(|source| MetricsError::TokenizerLoad {
                name: self.name.clone(),
                source,
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricsReport {
    pub tokenizer: String,
    pub vocab_size: u64,
    pub tokens: u64,
    pub chars: u64,
    pub words: u64,
    pub text_sha256: String,
    pub convention: CountingConvention,
}

impl MetricsReport {
    /// Builds a report from raw counts. Fails when either ratio is undefined.
    pub fn from_counts(tokenizer: &str, vocab_size: u64, tokens: u64, stats: &TextStats) -> Result<Self, MetricsError> {
        if tokens == 0 || stats.word_count == 0 {
            return Err(MetricsError::EmptyText);
        }
        Ok(Self {
            tokenizer: tokenizer.to_owned(),
            vocab_size,
            tokens,
            chars: stats.char_count,
            words: stats.word_count,
            text_sha256: stats.text_sha256(),
            convention: stats.convention,
        })
    }

    /// Characters per token, exact.
    pub fn cpt(&self) -> Ratio<u64> {
        Ratio::new(self.chars, self.tokens)
    }

    /// Tokens per word, exact.
    pub fn tpw(&self) -> Ratio<u64> {
        Ratio::new(self.tokens, self.words)
    }

    pub fn cpt_f64(&self) -> f64 {
        self.chars as f64 / self.tokens as f64
    }

    pub fn tpw_f64(&self) -> f64 {
        self.tokens as f64 / self.words as f64
    }
}

/// Rounds a non-negative rational to `decimals` places, ties to even, and
/// formats it. Operating on the exact value avoids double rounding.
pub fn round_half_even(value: Ratio<u64>, decimals: u32) -> String {
    let scale = 10u128.pow(decimals);
    let n = *value.numer() as u128 * scale;
    let d = *value.denom() as u128;
    let mut q = n / d;
    let rem2 = (n % d) * 2;
    if rem2 > d || (rem2 == d && q % 2 == 1) {
        q += 1;
    }
    if decimals == 0 {
        return q.to_string();
    }
    format!("{}.{:0width$}", q / scale, q % scale, width = decimals as usize)
}

pub fn evaluate<T: TokenCounter + ?Sized>(
    tokenizer: &T,
    text: &str,
    convention: CountingConvention,
) -> Result<MetricsReport, MetricsError> {
    let stats = text_stats(text, convention);
    if stats.word_count == 0 {
        return Err(MetricsError::EmptyText);
    }
    let tokens = tokenizer.count_tokens(&stats.normalized_text)? as u64;
    MetricsReport::from_counts(tokenizer.name(), tokenizer.vocab_size() as u64, tokens, &stats)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SortKey {
    /// Keep caller order.
    #[default]
    Input,
    Name,
    VocabSize,
    Tokens,
    Cpt,
    Tpw,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub report: MetricsReport,
    /// tokens × displayed CpT.
    pub implied_chars: f64,
    /// tokens ÷ displayed TpW.
    pub implied_words: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
    pub chars: u64,
    pub words: u64,
    pub text_sha256: String,
    pub convention: CountingConvention,
}

pub fn compare(reports: &[MetricsReport], key: SortKey) -> Result<ComparisonTable, MetricsError> {
    let first = reports.first().ok_or(MetricsError::EmptyText)?;
    if reports
        .iter()
        .any(|r| r.text_sha256 != first.text_sha256 || r.convention != first.convention)
    {
        return Err(MetricsError::MixedTexts);
    }
    let mut sorted: Vec<MetricsReport> = reports.to_vec();
    match key {
        SortKey::Input => {}
        SortKey::Name => sorted.sort_by(|a, b| a.tokenizer.cmp(&b.tokenizer)),
        SortKey::VocabSize => sorted.sort_by_key(|r| r.vocab_size),
        SortKey::Tokens => sorted.sort_by_key(|r| r.tokens),
        SortKey::Cpt => sorted.sort_by_key(|r| r.cpt()),
        SortKey::Tpw => sorted.sort_by_key(|r| r.tpw()),
    }
    let rows = sorted
        .into_iter()
        .map(|report| {
            let cpt: f64 = round_half_even(report.cpt(), 2).parse().expect("formatted decimal");
            let tpw: f64 = round_half_even(report.tpw(), 2).parse().expect("formatted decimal");
            ComparisonRow {
                implied_chars: report.tokens as f64 * cpt,
                implied_words: report.tokens as f64 / tpw,
                report,
            }
        })
        .collect();
    Ok(ComparisonTable {
        rows,
        chars: first.chars,
        words: first.words,
        text_sha256: first.text_sha256.clone(),
        convention: first.convention,
    })
}

/// A row as printed in a published comparison: token count plus CpT and TpW
/// rounded to `decimals` places.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PublishedRow<'a> {
    pub name: &'a str,
    pub tokens: u64,
    pub cpt: f64,
    pub tpw: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Consistency {
    /// Range of character counts compatible with every row, if any.
    pub chars: Option<(f64, f64)>,
    /// Range of word counts within `word_slack` of every row's compatible
    /// interval, if any.
    pub words: Option<(f64, f64)>,
    pub implied_chars: Vec<f64>,
    pub implied_words: Vec<f64>,
}

impl Consistency {
    pub fn is_consistent(&self) -> bool {
        self.chars.is_some() && self.words.is_some()
    }

    pub fn common_chars(&self) -> Option<f64> {
        self.chars.map(|(lo, hi)| (lo + hi) / 2.0)
    }

    pub fn common_words(&self) -> Option<f64> {
        self.words.map(|(lo, hi)| (lo + hi) / 2.0)
    }
}

fn intersect(intervals: impl Iterator<Item = (f64, f64)>, slack: f64) -> Option<(f64, f64)> {
    let (lo, hi) = intervals.fold((f64::NEG_INFINITY, f64::INFINITY), |(lo, hi), (a, b)| {
        (lo.max(a - slack), hi.min(b + slack))
    });
    (lo <= hi).then_some((lo, hi))
}

/// Checks whether rows published with rounded ratios can all describe the
/// same text.
///
/// A displayed CpT `c` means the true value lies in `c ± h` with
/// `h = 0.5·10^-decimals`, so the character count lies in
/// `tokens·(c ± h)`; rows agree when those intervals intersect. Word counts
/// are derived the same way from TpW, then widened by `word_slack`.
pub fn check_published_consistency(rows: &[PublishedRow<'_>], decimals: u32, word_slack: f64) -> Consistency {
    let h = 0.5 * 10f64.powi(-(decimals as i32));
    let char_iv = rows.iter().map(|r| {
        let t = r.tokens as f64;
        (t * (r.cpt - h), t * (r.cpt + h))
    });
    let word_iv = rows.iter().map(|r| {
        let t = r.tokens as f64;
        (t / (r.tpw + h), t / (r.tpw - h))
    });
    Consistency {
        chars: if rows.is_empty() { None } else { intersect(char_iv, 0.0) },
        words: if rows.is_empty() {
            None
        } else {
            intersect(word_iv, word_slack)
        },
        implied_chars: rows.iter().map(|r| r.tokens as f64 * r.cpt).collect(),
        implied_words: rows.iter().map(|r| r.tokens as f64 / r.tpw).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tokenizer::PreTokenizerConfig;
    use proptest::prelude::*;

    fn toy() -> NamedVocabulary {
        let tokens = ["a", "b", "c", "d", " ", "ab", " c", " cd"].map(String::from).to_vec();
        let merges = vec![
            ("a".into(), "b".into()),
            (" ".into(), "c".into()),
            (" c".into(), "d".into()),
        ];
        NamedVocabulary {
            name: "toy".into(),
            vocab: Vocabulary::new(tokens, merges, PreTokenizerConfig::default(), vec![]).unwrap(),
        }
    }

    #[test]
    fn hand_counted_stats() {
        let s = text_stats("ab cd", CountingConvention::default());
        assert_eq!((s.char_count, s.word_count), (5, 2));
        let s = text_stats("", CountingConvention::default());
        assert_eq!((s.char_count, s.word_count), (0, 0));
    }

    #[test]
    fn conventions_differ_on_line_breaks() {
        let text = "ab\n\ncd ";
        assert_eq!(text_stats(text, CountingConvention::CollapseWhitespace).char_count, 5);
        assert_eq!(text_stats(text, CountingConvention::Raw).char_count, 7);
        assert_eq!(text_stats(text, CountingConvention::NonWhitespace).char_count, 4);
        for c in CountingConvention::ALL {
            assert_eq!(text_stats(text, c).word_count, 2);
            assert_eq!(c.as_str().parse::<CountingConvention>().unwrap(), c);
        }
    }

    #[test]
    fn toy_tokenizer_report() {
        let r = evaluate(&toy(), "ab cd", CountingConvention::default()).unwrap();
        assert_eq!(r.tokens, 2);
        assert_eq!(r.cpt(), Ratio::new(5, 2));
        assert_eq!(r.tpw(), Ratio::from_integer(1));
        assert_eq!(r.cpt_f64(), 2.5);
    }

    #[test]
    fn empty_text_rejected() {
        assert!(matches!(
            evaluate(&toy(), "", CountingConvention::default()),
            Err(MetricsError::EmptyText)
        ));
        assert!(matches!(
            evaluate(&toy(), " \n ", CountingConvention::default()),
            Err(MetricsError::EmptyText)
        ));
    }

    #[test]
    fn compare_same_and_mixed_texts() {
        let a = evaluate(&toy(), "ab cd", CountingConvention::default()).unwrap();
        let mut b = a.clone();
        b.tokenizer = "other".into();
        b.tokens = 4;
        let t = compare(&[a.clone(), b.clone()], SortKey::Tokens).unwrap();
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.chars, 5);
        assert!(t.rows.iter().all(|r| r.report.chars == 5));
        assert!((t.rows[1].implied_chars - 5.0).abs() < 1e-9);

        let c = evaluate(&toy(), "ab ab", CountingConvention::default()).unwrap();
        assert!(matches!(
            compare(&[a, c], SortKey::Input),
            Err(MetricsError::MixedTexts)
        ));
    }

    #[test]
    fn half_even_rounding() {
        assert_eq!(round_half_even(Ratio::new(1, 8), 2), "0.12");
        assert_eq!(round_half_even(Ratio::new(3, 8), 2), "0.38");
        assert_eq!(round_half_even(Ratio::new(1794, 375), 2), "4.78");
        assert_eq!(round_half_even(Ratio::new(5, 2), 0), "2");
        assert_eq!(round_half_even(Ratio::new(7, 2), 0), "4");
    }

    proptest! {
        #[test]
        fn ratios_are_exact(chars in 1u64..100_000, words in 1u64..10_000, tokens in 1u64..100_000) {
            let stats = TextStats { char_count: chars, word_count: words, normalized_text: String::new(), convention: CountingConvention::default() };
            let r = MetricsReport::from_counts("t", 1, tokens, &stats).unwrap();
            prop_assert_eq!(r.cpt() * Ratio::from_integer(tokens), Ratio::from_integer(chars));
            prop_assert_eq!(r.tpw() * Ratio::from_integer(words), Ratio::from_integer(tokens));
        }

        #[test]
        fn splitting_a_token_is_monotone(chars in 1u64..100_000, words in 1u64..10_000, tokens in 1u64..100_000) {
            let stats = TextStats { char_count: chars, word_count: words, normalized_text: String::new(), convention: CountingConvention::default() };
            let before = MetricsReport::from_counts("t", 1, tokens, &stats).unwrap();
            let after = MetricsReport::from_counts("t", 1, tokens + 1, &stats).unwrap();
            prop_assert!(after.tpw() > before.tpw());
            prop_assert!(after.cpt() < before.cpt());
        }
    }
}
