//! Whitespace and byte-pair-encoding tokenizers, and the per-text statistics
//! the classifier consumes.

use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::error::{Error, Result};

/// Splits on maximal runs of Unicode whitespace. Never yields empty tokens.
pub fn whitespace_tokenize(text: &str) -> Vec<&str> {
    text.split_whitespace().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    /// A vocabulary entry.
    Vocab(u32),
    /// A whole whitespace word (whitespace tokenizer only).
    Word,
    /// A character missing from the vocabulary.
    UnknownChar,
    /// One UTF-8 byte of a character missing from the vocabulary.
    Byte(u8),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub kind: TokenKind,
}

impl Token {
    /// Whether this token is an out-of-vocabulary fallback.
    pub fn is_unknown(&self) -> bool {
        matches!(self.kind, TokenKind::UnknownChar | TokenKind::Byte(_))
    }

    /// Raw bytes this token covers in the pre-token.
    pub fn surface_bytes(&self) -> &[u8] {
        match &self.kind {
            TokenKind::Byte(b) => core::slice::from_ref(b),
            _ => self.text.as_bytes(),
        }
    }
}

/// Concatenates token surfaces back into a string.
pub fn detokenize(tokens: &[Token]) -> String {
    let bytes: Vec<u8> = tokens
        .iter()
        .flat_map(|t| t.surface_bytes().iter().copied())
        .collect();
    String::from_utf8(bytes).unwrap_or_else(|e| String::from_utf8_lossy(e.as_bytes()).into_owned())
}

/// Anything that can split a text into per-word token lists.
pub trait Tokenizer {
    fn name(&self) -> &str;

    /// Tokens grouped by whitespace word, in text order.
    fn encode_words(&self, text: &str) -> Vec<Vec<Token>>;

    fn encode(&self, text: &str) -> Vec<Token> {
        self.encode_words(text).into_iter().flatten().collect()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WhitespaceTokenizer;

impl Tokenizer for WhitespaceTokenizer {
    fn name(&self) -> &str {
        "whitespace"
    }

    fn encode_words(&self, text: &str) -> Vec<Vec<Token>> {
        whitespace_tokenize(text)
            .into_iter()
            .map(|w| {
                alloc::vec![Token {
                    text: w.to_string(),
                    kind: TokenKind::Word,
                }]
            })
            .collect()
    }
}

/// Ranked merges plus the vocabulary they map into.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeTable {
    merges: Vec<(String, String)>,
    vocab: BTreeMap<String, u32>,
    ranks: BTreeMap<String, BTreeMap<String, usize>>,
}

impl MergeTable {
    /// Validates and indexes a merge list.
    ///
    /// Each merge output must be in `vocab`; each input must be a single
    /// character, a vocabulary entry or the output of an earlier merge.
    pub fn new(merges: Vec<(String, String)>, vocab: BTreeMap<String, u32>) -> Result<Self> {
        let mut ranks: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
        let mut produced: BTreeMap<String, ()> = BTreeMap::new();
        for (rank, (left, right)) in merges.iter().enumerate() {
            for symbol in [left, right] {
                let derivable = symbol.chars().count() == 1
                    || vocab.contains_key(symbol)
                    || produced.contains_key(symbol);
                if symbol.is_empty() || !derivable {
                    return Err(Error::UnderivableSymbol {
                        rank,
                        symbol: symbol.clone(),
                    });
                }
            }
            let mut out = left.clone();
            out.push_str(right);
            if !vocab.contains_key(&out) {
                return Err(Error::MergeNotInVocab { rank, token: out });
            }
            let slot = ranks.entry(left.clone()).or_default();
            if slot.contains_key(right) {
                return Err(Error::DuplicateMerge {
                    rank,
                    left: left.clone(),
                    right: right.clone(),
                });
            }
            slot.insert(right.clone(), rank);
            produced.insert(out, ());
        }
        Ok(MergeTable {
            merges,
            vocab,
            ranks,
        })
    }

    pub fn merges(&self) -> &[(String, String)] {
        &self.merges
    }

    pub fn vocab(&self) -> &BTreeMap<String, u32> {
        &self.vocab
    }

    pub fn rank(&self, left: &str, right: &str) -> Option<usize> {
        self.ranks.get(left).and_then(|m| m.get(right)).copied()
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.vocab.get(token).copied()
    }
}

/// How a word is cut into pre-tokens before merging.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PreTokenizer {
    /// Marker prepended to the first pre-token of a word, as in vocabularies
    /// that encode a leading space (`Ġ`, `▁`).
    pub space_marker: Option<char>,
    /// Whether the first word of a text also gets the marker.
    pub mark_first_word: bool,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum CharClass {
    Letter,
    Digit,
    Other,
}

fn class_of(c: char) -> CharClass {
    if c.is_alphabetic() {
        CharClass::Letter
    } else if c.is_numeric() {
        CharClass::Digit
    } else {
        CharClass::Other
    }
}

impl PreTokenizer {
    /// Splits one whitespace word at letter/digit/punctuation boundaries.
    pub fn split_word(&self, word: &str, first_in_text: bool) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        let mut current = String::new();
        let mut class = None;
        for c in word.chars() {
            let cls = class_of(c);
            if class.is_some() && class != Some(cls) {
                out.push(core::mem::take(&mut current));
            }
            class = Some(cls);
            current.push(c);
        }
        if !current.is_empty() {
            out.push(current);
        }
        if let (Some(marker), Some(first)) = (self.space_marker, out.first_mut()) {
            if !first_in_text || self.mark_first_word {
                first.insert(0, marker);
            }
        }
        out
    }
}

/// What to emit for characters missing from the vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Fallback {
    #[default]
    Char,
    Byte,
}

/// One applied merge: its rank and the position of its left symbol in the
/// symbol sequence at the moment it was applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MergeStep {
    pub rank: usize,
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BpeTokenizer {
    pub name: String,
    table: MergeTable,
    pub pretokenizer: PreTokenizer,
    pub fallback: Fallback,
}

impl BpeTokenizer {
    pub fn new(name: impl Into<String>, table: MergeTable) -> Self {
        BpeTokenizer {
            name: name.into(),
            table,
            pretokenizer: PreTokenizer::default(),
            fallback: Fallback::Char,
        }
    }

    pub fn with_pretokenizer(mut self, pretokenizer: PreTokenizer) -> Self {
        self.pretokenizer = pretokenizer;
        self
    }

    pub fn with_fallback(mut self, fallback: Fallback) -> Self {
        self.fallback = fallback;
        self
    }

    pub fn table(&self) -> &MergeTable {
        &self.table
    }

    /// Encodes a single pre-token.
    pub fn encode_pretoken(&self, pretoken: &str) -> Vec<Token> {
        self.encode_pretoken_logged(pretoken).0
    }

    /// Encodes a single pre-token and returns the merges applied, in order.
    ///
    /// Merging repeatedly picks the lowest-rank adjacent pair, leftmost
    /// first among equal ranks. Candidate pairs sit in a min-heap keyed by
    /// (rank, left index); stale entries are skipped on pop.
    pub fn encode_pretoken_logged(&self, pretoken: &str) -> (Vec<Token>, Vec<MergeStep>) {
        let mut symbols: Vec<String> = pretoken.chars().map(|c| c.to_string()).collect();
        let n = symbols.len();
        let mut next: Vec<Option<usize>> = (0..n).map(|i| (i + 1 < n).then_some(i + 1)).collect();
        let mut prev: Vec<Option<usize>> = (0..n).map(|i| i.checked_sub(1)).collect();
        let mut alive = alloc::vec![true; n];

        let mut heap = BinaryHeap::new();
        for i in 0..n.saturating_sub(1) {
            if let Some(rank) = self.table.rank(&symbols[i], &symbols[i + 1]) {
                heap.push(Reverse((rank, i, i + 1)));
            }
        }

        let mut log = Vec::new();
        while let Some(Reverse((rank, left, right))) = heap.pop() {
            if !alive[left] || !alive[right] || next[left] != Some(right) {
                continue;
            }
            if self.table.rank(&symbols[left], &symbols[right]) != Some(rank) {
                continue;
            }
            let mut position = 0;
            let mut cursor = prev[left];
            while let Some(p) = cursor {
                position += 1;
                cursor = prev[p];
            }
            log.push(MergeStep { rank, position });

            let merged = core::mem::take(&mut symbols[right]);
            symbols[left].push_str(&merged);
            alive[right] = false;
            next[left] = next[right];
            if let Some(nn) = next[right] {
                prev[nn] = Some(left);
            }
            if let Some(p) = prev[left] {
                if let Some(r) = self.table.rank(&symbols[p], &symbols[left]) {
                    heap.push(Reverse((r, p, left)));
                }
            }
            if let Some(nn) = next[left] {
                if let Some(r) = self.table.rank(&symbols[left], &symbols[nn]) {
                    heap.push(Reverse((r, left, nn)));
                }
            }
        }

        let mut tokens = Vec::new();
        let mut cursor = (n > 0).then_some(0);
        while let Some(i) = cursor {
            self.emit(&symbols[i], &mut tokens);
            cursor = next[i];
        }
        (tokens, log)
    }

    fn emit(&self, symbol: &str, out: &mut Vec<Token>) {
        if let Some(id) = self.table.id(symbol) {
            out.push(Token {
                text: symbol.to_string(),
                kind: TokenKind::Vocab(id),
            });
            return;
        }
        // merge outputs are always in vocab, so an unknown symbol is a
        // single character
        match self.fallback {
            Fallback::Char => out.push(Token {
                text: symbol.to_string(),
                kind: TokenKind::UnknownChar,
            }),
            Fallback::Byte => {
                for &b in symbol.as_bytes() {
                    out.push(Token {
                        text: format!("<0x{b:02X}>"),
                        kind: TokenKind::Byte(b),
                    });
                }
            }
        }
    }
}

impl Tokenizer for BpeTokenizer {
    fn name(&self) -> &str {
        &self.name
    }

    fn encode_words(&self, text: &str) -> Vec<Vec<Token>> {
        whitespace_tokenize(text)
            .into_iter()
            .enumerate()
            .map(|(i, word)| {
                self.pretokenizer
                    .split_word(word, i == 0)
                    .iter()
                    .flat_map(|p| self.encode_pretoken(p))
                    .collect()
            })
            .collect()
    }
}

/// Per-text tokenization statistics.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TokenStats {
    pub token_count: usize,
    pub word_count: usize,
    /// Tokens per word; 0 for a text without words.
    pub fertility: f64,
    /// Largest number of tokens any single word was split into.
    pub max_split: usize,
    /// Fraction of words split into three or more tokens.
    pub frac_fragmented: f64,
    /// Fraction of tokens that are out-of-vocabulary fallbacks.
    pub frac_unk: f64,
    /// Set when there were no words.
    pub degenerate: bool,
}

/// Statistics from tokens grouped by whitespace word.
pub fn token_stats(per_word: &[Vec<Token>]) -> TokenStats {
    let word_count = per_word.len();
    if word_count == 0 {
        return TokenStats {
            degenerate: true,
            ..TokenStats::default()
        };
    }
    let token_count: usize = per_word.iter().map(Vec::len).sum();
    let unknown = per_word.iter().flatten().filter(|t| t.is_unknown()).count();
    let fragmented = per_word.iter().filter(|w| w.len() >= 3).count();
    TokenStats {
        token_count,
        word_count,
        fertility: token_count as f64 / word_count as f64,
        max_split: per_word.iter().map(Vec::len).max().unwrap_or(0),
        frac_fragmented: fragmented as f64 / word_count as f64,
        frac_unk: if token_count == 0 {
            0.0
        } else {
            unknown as f64 / token_count as f64
        },
        degenerate: false,
    }
}
