//! Text and JSON encodings of collected elements.
//!
//! Text form: `a^2 * b^-1 * [ab]^3`. Letters stand for generators, a Lyndon
//! word in brackets for its basic commutator, `1` for the identity.
//! Parenthesized products may be raised to powers. Whitespace is ignored.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{FreeNilpotentGroup, GroupElement};
use crate::error::{Error, Result};
use crate::json::JsonInt;
use crate::lie::LyndonWord;

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (w, e) in self.group.basis().iter().zip(&self.exponents) {
            if e.is_zero() {
                continue;
            }
            if !first {
                write!(f, " * ")?;
            }
            first = false;
            if w.degree() == 1 {
                write!(f, "{w}")?;
            } else {
                write!(f, "[{w}]")?;
            }
            if !e.is_one() {
                write!(f, "^{e}")?;
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

struct Parser<'a> {
    group: &'a FreeNilpotentGroup,
    chars: Vec<(usize, char)>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or_else(
            || self.chars.last().map_or(0, |&(i, _)| i + 1),
            |&(i, _)| i,
        )
    }

    fn expect(&mut self, ch: char) -> Result<()> {
        if self.peek() == Some(ch) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::parse(self.offset(), format!("expected `{ch}`")))
        }
    }

    fn product(&mut self) -> Result<GroupElement> {
        let mut acc = self.factor()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            let next = self.factor()?;
            acc = acc.mul(&next)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<GroupElement> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let e = self.integer()?;
            Ok(base.pow(&e))
        } else {
            Ok(base)
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        let start = self.pos;
        if matches!(self.peek(), Some('-') | Some('+')) {
            self.pos += 1;
        }
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let text: String = self.chars[start..self.pos].iter().map(|&(_, c)| c).collect();
        text.parse::<BigInt>()
            .map_err(|_| Error::parse(self.chars.get(start).map_or(0, |&(i, _)| i), "expected an integer exponent"))
    }

    fn atom(&mut self) -> Result<GroupElement> {
        let at = self.offset();
        match self.peek() {
            Some('1') => {
                self.pos += 1;
                Ok(self.group.identity())
            }
            Some('(') => {
                self.pos += 1;
                let inner = self.product()?;
                self.expect(')')?;
                Ok(inner)
            }
            Some('[') => {
                self.pos += 1;
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_lowercase()) {
                    self.pos += 1;
                }
                let word: String = self.chars[start..self.pos].iter().map(|&(_, c)| c).collect();
                self.expect(']')?;
                let w = LyndonWord::parse(&word).map_err(|e| Error::parse(at, e.to_string()))?;
                self.group
                    .basic_commutator(&w)
                    .map_err(|e| Error::parse(at, e.to_string()))
            }
            Some(c) if c.is_ascii_lowercase() => {
                self.pos += 1;
                self.group
                    .generator((c as u8 - b'a') as usize)
                    .map_err(|e| Error::parse(at, e.to_string()))
            }
            Some(c) => Err(Error::parse(at, format!("unexpected `{c}`"))),
            None => Err(Error::parse(at, "unexpected end of input")),
        }
    }
}

/// Parses the text encoding of an element and multiplies it out into collected form.
pub fn parse_element(group: &FreeNilpotentGroup, text: &str) -> Result<GroupElement> {
    let chars: Vec<(usize, char)> = text.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
    if chars.is_empty() {
        return Ok(group.identity());
    }
    let mut p = Parser {
        group,
        chars,
        pos: 0,
    };
    let g = p.product()?;
    if p.pos != p.chars.len() {
        return Err(Error::parse(p.offset(), "trailing input"));
    }
    Ok(g)
}

/// `{rank, class, exponents: [[word, e], ...]}` with only nonzero exponents listed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementJson {
    pub rank: usize,
    pub class: usize,
    pub exponents: Vec<(String, JsonInt)>,
}

impl GroupElement {
    pub fn to_json(&self) -> ElementJson {
        ElementJson {
            rank: self.rank(),
            class: self.class(),
            exponents: self
                .exponent_map()
                .into_iter()
                .map(|(w, e)| (w.to_string(), JsonInt(e)))
                .collect(),
        }
    }

    pub fn from_json(json: &ElementJson) -> Result<Self> {
        let group = FreeNilpotentGroup::new(json.rank, json.class)?;
        let terms: Result<Vec<(LyndonWord, BigInt)>> = json
            .exponents
            .iter()
            .map(|(w, e)| Ok((LyndonWord::parse(w)?, e.0.clone())))
            .collect();
        group.from_terms(terms?)
    }
}
