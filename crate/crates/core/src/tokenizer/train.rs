//! BPE training.
//!
//! Token ids are assigned in creation order: specials, then the 256 byte
//! tokens when byte fallback is on, then every corpus character in code-point
//! order, then merge outputs. Each step merges the most frequent adjacent pair
//! (minimum count 2). Ties go to the pair whose left symbol was created
//! earliest, then to the lexicographically smaller right symbol, so the result
//! does not depend on corpus order.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use super::pretok::{normalize, pretokenize, PreTokenizerConfig};
use super::vocab::{byte_token, TokenId, Vocabulary};
use super::TokenizerError;

type Pair = (TokenId, TokenId);

struct Word {
    symbols: Vec<TokenId>,
    count: u64,
}

struct PairStats {
    counts: HashMap<Pair, u64>,
    occurs_in: HashMap<Pair, BTreeSet<usize>>,
}

impl PairStats {
    fn build(words: &[Word]) -> Self {
        let mut stats = PairStats {
            counts: HashMap::new(),
            occurs_in: HashMap::new(),
        };
        for (idx, w) in words.iter().enumerate() {
            stats.add(idx, w);
        }
        stats
    }

    fn add(&mut self, idx: usize, word: &Word) {
        for p in word.symbols.windows(2) {
            let pair = (p[0], p[1]);
            *self.counts.entry(pair).or_insert(0) += word.count;
            self.occurs_in.entry(pair).or_default().insert(idx);
        }
    }

    fn remove(&mut self, word: &Word) {
        for p in word.symbols.windows(2) {
            let pair = (p[0], p[1]);
            if let Some(c) = self.counts.get_mut(&pair) {
                *c -= word.count;
                if *c == 0 {
                    self.counts.remove(&pair);
                    self.occurs_in.remove(&pair);
                }
            }
        }
    }
}

/// Returns the id of `s`, appending it as a new token if absent.
fn push(tokens: &mut Vec<String>, ids: &mut HashMap<String, TokenId>, s: String) -> TokenId {
    if let Some(&id) = ids.get(&s) {
        return id;
    }
    let id = tokens.len() as TokenId;
    ids.insert(s.clone(), id);
    tokens.push(s);
    id
}

fn merge_word(symbols: &[TokenId], pair: Pair, out: TokenId) -> Vec<TokenId> {
    let mut merged = Vec::with_capacity(symbols.len());
    let mut i = 0;
    while i < symbols.len() {
        if i + 1 < symbols.len() && symbols[i] == pair.0 && symbols[i + 1] == pair.1 {
            merged.push(out);
            i += 2;
        } else {
            merged.push(symbols[i]);
            i += 1;
        }
    }
    merged
}

/// Trains a vocabulary of at most `target_size` tokens.
///
/// Returns [`TokenizerError::CorpusSaturated`] carrying the partial vocabulary
/// when no pair occurs at least twice before the target is reached.
pub fn train_bpe<S: AsRef<str>>(
    corpus: &[S],
    target_size: usize,
    cfg: &PreTokenizerConfig,
    specials: &[String],
) -> Result<Vocabulary, TokenizerError> {
    let mut fragment_counts: BTreeMap<String, u64> = BTreeMap::new();
    for doc in corpus {
        let text = normalize(doc.as_ref(), cfg);
        for frag in pretokenize(&text, cfg) {
            *fragment_counts.entry(frag).or_insert(0) += 1;
        }
    }

    let mut tokens: Vec<String> = Vec::new();
    let mut ids: HashMap<String, TokenId> = HashMap::new();
    let mut reserved: HashSet<TokenId> = HashSet::new();

    for s in specials {
        let id = push(&mut tokens, &mut ids, s.clone());
        reserved.insert(id);
    }
    if cfg.byte_fallback {
        for b in 0..=255u8 {
            let id = push(&mut tokens, &mut ids, byte_token(b));
            reserved.insert(id);
        }
    }
    let alphabet: BTreeSet<char> = fragment_counts.keys().flat_map(|f| f.chars()).collect();
    for c in &alphabet {
        push(&mut tokens, &mut ids, c.to_string());
    }

    if target_size < tokens.len() {
        return Err(TokenizerError::TargetTooSmall {
            target: target_size,
            base: tokens.len(),
        });
    }

    let mut words: Vec<Word> = fragment_counts
        .into_iter()
        .map(|(frag, count)| Word {
            symbols: frag.chars().map(|c| ids[c.to_string().as_str()]).collect(),
            count,
        })
        .collect();
    let mut stats = PairStats::build(&words);
    let mut merges: Vec<(String, String)> = Vec::new();
    let mut forbidden: HashSet<Pair> = HashSet::new();
    let mut saturated = false;

    while tokens.len() < target_size {
        let best = stats
            .counts
            .iter()
            .filter(|&(p, &c)| c >= 2 && !forbidden.contains(p))
            .max_by(|&(pa, ca), &(pb, cb)| {
                ca.cmp(cb)
                    .then_with(|| pb.0.cmp(&pa.0))
                    .then_with(|| tokens[pb.1 as usize].cmp(&tokens[pa.1 as usize]))
            })
            .map(|(&p, _)| p);
        let Some(pair) = best else {
            saturated = true;
            break;
        };

        let left = tokens[pair.0 as usize].clone();
        let right = tokens[pair.1 as usize].clone();
        let joined = format!("{left}{right}");
        let out = match ids.get(&joined) {
            // Merge outputs must never alias byte or special tokens.
            Some(id) if reserved.contains(id) => {
                forbidden.insert(pair);
                continue;
            }
            Some(&id) => id,
            None => push(&mut tokens, &mut ids, joined),
        };
        merges.push((left, right));

        let affected: Vec<usize> = stats
            .occurs_in
            .get(&pair)
            .map(|s| s.iter().copied().collect())
            .unwrap_or_default();
        for idx in affected {
            let merged = merge_word(&words[idx].symbols, pair, out);
            if merged.len() == words[idx].symbols.len() {
                continue;
            }
            stats.remove(&words[idx]);
            words[idx].symbols = merged;
            stats.add(idx, &words[idx]);
        }
    }

    let vocab = Vocabulary::new(tokens, merges, *cfg, specials.to_vec())?;
    if saturated {
        return Err(TokenizerError::CorpusSaturated {
            partial: Box::new(vocab),
            target: target_size,
        });
    }
    Ok(vocab)
}
