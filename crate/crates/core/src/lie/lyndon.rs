//! Lyndon words and their standard bracketings.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::series::{letter_char, word_string, Word};

/// `true` if `word` is nonempty and strictly smaller than each of its proper rotations.
pub fn is_lyndon(word: &[u8]) -> bool {
    let n = word.len();
    if n == 0 {
        return false;
    }
    (1..n).all(|i| {
        let rotated = word[i..].iter().chain(&word[..i]);
        word.iter().cmp(rotated) == Ordering::Less
    })
}

/// A Lyndon word, ordered by degree and then lexicographically.
///
/// The word determines its bracketing: `w = uv` with `v` the longest proper
/// Lyndon suffix, and the bracket monomial of `w` is `[b(u), b(v)]` in that order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LyndonWord(Word);

impl LyndonWord {
    pub fn new(word: Word) -> Result<Self> {
        if is_lyndon(&word) {
            Ok(LyndonWord(word))
        } else {
            Err(Error::InvalidArgument(format!(
                "`{}` is not a Lyndon word",
                word_string(&word)
            )))
        }
    }

    pub fn letter(l: u8) -> Self {
        LyndonWord(vec![l])
    }

    /// Parses a word written with letters `a`, `b`, ...
    pub fn parse(text: &str) -> Result<Self> {
        let word: Result<Word> = text
            .chars()
            .enumerate()
            .map(|(i, ch)| {
                if ch.is_ascii_lowercase() {
                    Ok(ch as u8 - b'a')
                } else {
                    Err(Error::parse(i, format!("unexpected `{ch}` in word")))
                }
            })
            .collect();
        Self::new(word?)
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    /// Largest letter index plus one.
    pub fn min_rank(&self) -> usize {
        self.0.iter().copied().max().map_or(0, |l| l as usize + 1)
    }

    /// The standard factorization `(u, v)`; `None` for single letters.
    pub fn standard_factorization(&self) -> Option<(LyndonWord, LyndonWord)> {
        if self.0.len() < 2 {
            return None;
        }
        let split = (1..self.0.len())
            .find(|&i| is_lyndon(&self.0[i..]))
            .expect("last letter is always a Lyndon suffix");
        Some((
            LyndonWord(self.0[..split].to_vec()),
            LyndonWord(self.0[split..].to_vec()),
        ))
    }

    pub fn bracketing(&self) -> Bracket {
        match self.standard_factorization() {
            None => Bracket::Letter(self.0[0]),
            Some((u, v)) => Bracket::Pair(Box::new(u.bracketing()), Box::new(v.bracketing())),
        }
    }
}

impl Ord for LyndonWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for LyndonWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for LyndonWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", word_string(&self.0))
    }
}

impl fmt::Debug for LyndonWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LyndonWord({self})")
    }
}

/// A binary bracket tree over letters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bracket {
    Letter(u8),
    Pair(Box<Bracket>, Box<Bracket>),
}

impl Bracket {
    pub fn leaves(&self) -> usize {
        match self {
            Bracket::Letter(_) => 1,
            Bracket::Pair(l, r) => l.leaves() + r.leaves(),
        }
    }

    pub fn foliage(&self) -> Word {
        match self {
            Bracket::Letter(l) => vec![*l],
            Bracket::Pair(l, r) => {
                let mut w = l.foliage();
                w.extend(r.foliage());
                w
            }
        }
    }
}

impl fmt::Display for Bracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bracket::Letter(l) => write!(f, "{}", letter_char(*l)),
            Bracket::Pair(l, r) => write!(f, "[{l},{r}]"),
        }
    }
}

/// All Lyndon words of length exactly `n` over `r` letters, in lexicographic order.
///
/// Duval's successor algorithm: it visits every Lyndon word of length at
/// most `n` in lexicographic order.
pub fn lyndon_words(r: usize, n: usize) -> Vec<LyndonWord> {
    let mut out = Vec::new();
    if r == 0 || n == 0 {
        return out;
    }
    let top = (r - 1) as u8;
    let mut w: Vec<u8> = vec![0];
    loop {
        if w.len() == n {
            out.push(LyndonWord(w.clone()));
        }
        let m = w.len();
        while w.len() < n {
            w.push(w[w.len() - m]);
        }
        while w.last() == Some(&top) {
            w.pop();
        }
        match w.last_mut() {
            Some(l) => *l += 1,
            None => break,
        }
    }
    out
}
