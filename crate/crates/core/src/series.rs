//! The truncated free associative ring `Z<X_1, ..., X_r> / (degree > c)`.
//!
//! Words of length `k` over letters `0..r` are stored per degree, keyed by
//! their base-`r` value with the first letter most significant, so the
//! numeric order inside a layer is the lexicographic order of words.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// A word over the letters `0..rank`.
pub type Word = Vec<u8>;

/// Base-`rank` code of a word.
pub fn encode_word(word: &[u8], rank: usize) -> u64 {
    word.iter().fold(0u64, |acc, &l| acc * rank as u64 + l as u64)
}

/// Inverse of [`encode_word`] for a word of known length.
pub fn decode_word(mut code: u64, len: usize, rank: usize) -> Word {
    let mut out = vec![0u8; len];
    for slot in out.iter_mut().rev() {
        *slot = (code % rank as u64) as u8;
        code /= rank as u64;
    }
    out
}

/// `binomial(e, k)` for an arbitrary (possibly negative) integer `e`.
pub fn generalized_binomial(e: &BigInt, k: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= e - BigInt::from(i);
        acc /= BigInt::from(i + 1);
    }
    acc
}

pub(crate) fn letter_char(l: u8) -> char {
    (b'a' + l) as char
}

pub(crate) fn word_string(word: &[u8]) -> String {
    word.iter().map(|&l| letter_char(l)).collect()
}

/// Checks that words of length `class` over `rank` letters can be encoded.
pub(crate) fn check_parameters(rank: usize, class: usize) -> Result<()> {
    if rank == 0 {
        return Err(Error::InvalidArgument("rank must be at least 1".into()));
    }
    if class == 0 {
        return Err(Error::InvalidArgument("class must be at least 1".into()));
    }
    if rank > 26 {
        return Err(Error::InvalidArgument(format!(
            "rank {rank} exceeds the 26 available letters"
        )));
    }
    let fits = u32::try_from(class + 1)
        .ok()
        .and_then(|e| (rank as u64).checked_pow(e))
        .is_some();
    if !fits {
        return Err(Error::InvalidArgument(format!(
            "rank {rank} and class {class} overflow the word encoding"
        )));
    }
    Ok(())
}

type Layer = BTreeMap<u64, BigInt>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruncatedSeries {
    rank: usize,
    class: usize,
    layers: Vec<Layer>,
}

impl TruncatedSeries {
    pub fn zero(rank: usize, class: usize) -> Self {
        check_parameters(rank, class).expect("series parameters");
        TruncatedSeries {
            rank,
            class,
            layers: vec![Layer::new(); class + 1],
        }
    }

    pub fn one(rank: usize, class: usize) -> Self {
        let mut s = Self::zero(rank, class);
        s.layers[0].insert(0, BigInt::one());
        s
    }

    /// The degree-one series `X_i`.
    pub fn letter(rank: usize, class: usize, i: usize) -> Self {
        assert!(i < rank, "letter out of range");
        let mut s = Self::zero(rank, class);
        s.layers[1].insert(i as u64, BigInt::one());
        s
    }

    /// Sums the given terms; words longer than `class` are dropped.
    pub fn from_terms<I>(rank: usize, class: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Word, BigInt)>,
    {
        let mut s = Self::zero(rank, class);
        for (w, c) in terms {
            assert!(w.iter().all(|&l| (l as usize) < rank), "letter out of range");
            if w.len() <= class {
                *s.layers[w.len()].entry(encode_word(&w, rank)).or_default() += c;
            }
        }
        s.prune();
        s
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn class(&self) -> usize {
        self.class
    }

    pub(crate) fn layer(&self, degree: usize) -> &Layer {
        &self.layers[degree]
    }

    pub(crate) fn layer_mut(&mut self, degree: usize) -> &mut Layer {
        &mut self.layers[degree]
    }

    pub fn coefficient(&self, word: &[u8]) -> BigInt {
        if word.len() > self.class {
            return BigInt::zero();
        }
        self.layers[word.len()]
            .get(&encode_word(word, self.rank))
            .cloned()
            .unwrap_or_default()
    }

    pub fn constant_term(&self) -> BigInt {
        self.coefficient(&[])
    }

    /// Nonzero terms in degree-then-lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (Word, &BigInt)> + '_ {
        self.layers.iter().enumerate().flat_map(move |(d, layer)| {
            layer
                .iter()
                .map(move |(&code, c)| (decode_word(code, d, self.rank), c))
        })
    }

    pub fn num_terms(&self) -> usize {
        self.layers.iter().map(BTreeMap::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.layers.iter().all(BTreeMap::is_empty)
    }

    pub fn is_one(&self) -> bool {
        self.layers[0].get(&0).is_some_and(One::is_one)
            && self.layers[0].len() == 1
            && self.layers[1..].iter().all(BTreeMap::is_empty)
    }

    /// Smallest degree carrying a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.layers.iter().position(|l| !l.is_empty())
    }

    /// The homogeneous component of the given degree.
    pub fn homogeneous_part(&self, degree: usize) -> Self {
        let mut s = Self::zero(self.rank, self.class);
        if degree <= self.class {
            s.layers[degree] = self.layers[degree].clone();
        }
        s
    }

    /// Drops all terms of degree greater than `class` and lowers the bound.
    pub fn truncated(&self, class: usize) -> Self {
        assert!(class >= 1 && class <= self.class, "truncation must lower the class");
        TruncatedSeries {
            rank: self.rank,
            class,
            layers: self.layers[..=class].to_vec(),
        }
    }

    pub fn scaled(&self, factor: &BigInt) -> Self {
        if factor.is_zero() {
            return Self::zero(self.rank, self.class);
        }
        let mut s = self.clone();
        for layer in &mut s.layers {
            for c in layer.values_mut() {
                *c *= factor;
            }
        }
        s
    }

    fn assert_compatible(&self, other: &Self) {
        assert!(
            self.rank == other.rank && self.class == other.class,
            "series of rank {} class {} combined with rank {} class {}",
            self.rank,
            self.class,
            other.rank,
            other.class
        );
    }

    fn prune(&mut self) {
        for layer in &mut self.layers {
            layer.retain(|_, c| !c.is_zero());
        }
    }

    /// Accumulates `scale * self` into `target`.
    pub(crate) fn add_scaled_into(&self, target: &mut Self, scale: &BigInt) {
        self.assert_compatible(target);
        if scale.is_zero() {
            return;
        }
        for (d, layer) in self.layers.iter().enumerate() {
            let out = &mut target.layers[d];
            for (&code, c) in layer {
                let e = out.entry(code).or_default();
                *e += c * scale;
                if e.is_zero() {
                    out.remove(&code);
                }
            }
        }
    }

    /// Adds the product of homogeneous layers `a` (degree `da`) and `b`
    /// (degree `db`) into `out`.
    fn mul_layers_into(rank: usize, a: &Layer, b: &Layer, db: usize, out: &mut Layer) {
        let shift = (rank as u64).pow(db as u32);
        for (&u, x) in a {
            let base = u * shift;
            for (&v, y) in b {
                *out.entry(base + v).or_default() += x * y;
            }
        }
    }

    /// `x y - y x`.
    pub fn ring_commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// Multiplicative inverse; requires constant term `±1`.
    pub fn inverse(&self) -> Result<Self> {
        let s0 = self.constant_term();
        if !s0.abs().is_one() {
            return Err(Error::NotInvertible(format!(
                "series with constant term {s0} is not a unit"
            )));
        }
        let mut out = Self::zero(self.rank, self.class);
        out.layers[0].insert(0, s0.clone());
        for n in 1..=self.class {
            let mut acc = Layer::new();
            for k in 1..=n {
                if self.layers[k].is_empty() || out.layers[n - k].is_empty() {
                    continue;
                }
                Self::mul_layers_into(self.rank, &self.layers[k], &out.layers[n - k], n - k, &mut acc);
            }
            let neg = -&s0;
            let layer: Layer = acc
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(w, c)| (w, c * &neg))
                .collect();
            out.layers[n] = layer;
        }
        Ok(out)
    }

    /// Powers `x, x^2, ...` of `self - 1` until they vanish by truncation.
    pub(crate) fn augmentation_powers(&self) -> Vec<Self> {
        let mut x = self.clone();
        x.layers[0].clear();
        let mut powers = Vec::new();
        let mut current = x.clone();
        while !current.is_zero() {
            let next = &current * &x;
            powers.push(current);
            current = next;
        }
        powers
    }

    /// `1 + sum_k binomial(e, k) x^k` where `powers[k - 1] = x^k`.
    pub(crate) fn binomial_power(rank: usize, class: usize, powers: &[Self], e: &BigInt) -> Self {
        let mut out = Self::one(rank, class);
        for (k, p) in powers.iter().enumerate() {
            let b = generalized_binomial(e, k + 1);
            p.add_scaled_into(&mut out, &b);
        }
        out
    }

    /// Integer power of a series with constant term 1.
    pub fn pow(&self, e: &BigInt) -> Result<Self> {
        if !self.constant_term().is_one() {
            return Err(Error::InvalidArgument(
                "powers are only defined for series with constant term 1".into(),
            ));
        }
        let powers = self.augmentation_powers();
        Ok(Self::binomial_power(self.rank, self.class, &powers, e))
    }

    /// `x^-1 y^-1 x y` for units `x`, `y`.
    pub fn group_commutator(&self, other: &Self) -> Result<Self> {
        let xi = self.inverse()?;
        let yi = other.inverse()?;
        Ok(&(&(&xi * &yi) * self) * other)
    }

    /// Applies the ring endomorphism `X_i -> images[i]`.
    ///
    /// The images must have zero constant term and share a rank and class;
    /// the result lives in their ring.
    pub fn substitute(&self, images: &[Self]) -> Result<Self> {
        if images.len() != self.rank {
            return Err(Error::Dimension(format!(
                "{} images for {} letters",
                images.len(),
                self.rank
            )));
        }
        let (rank, class) = match images.first() {
            Some(y) => (y.rank, y.class),
            None => unreachable!("rank is at least 1"),
        };
        if images.iter().any(|y| y.rank != rank || y.class != class) {
            return Err(Error::Dimension("images of differing rank or class".into()));
        }
        if images.iter().any(|y| !y.layers[0].is_empty()) {
            return Err(Error::InvalidArgument(
                "substituted images must have zero constant term".into(),
            ));
        }
        let max = self.class.min(class);
        let layers: Vec<Layer> = self.layers[..=max].to_vec();
        Ok(substitute_layers(self.rank, &layers, images, rank, class))
    }
}

/// Recursion on the first letter: `phi(s) = s_0 + sum_i y_i phi(s_i)`.
fn substitute_layers(
    src_rank: usize,
    layers: &[Layer],
    images: &[TruncatedSeries],
    rank: usize,
    class: usize,
) -> TruncatedSeries {
    let images: Vec<SparseTerms> = images.iter().map(SparseTerms::augmentation).collect();
    substitute_dense(src_rank, layers, &images, rank, class).to_series()
}

fn substitute_dense(
    src_rank: usize,
    layers: &[Layer],
    images: &[SparseTerms],
    rank: usize,
    class: usize,
) -> DenseSeries {
    let mut out = DenseSeries::one(rank, class);
    out.layers[0][0] = layers
        .first()
        .and_then(|l| l.get(&0))
        .cloned()
        .unwrap_or_default();
    if class == 0 {
        return out;
    }
    for (letter, image) in images.iter().enumerate() {
        let mut child: Vec<Layer> = Vec::with_capacity(layers.len().saturating_sub(1));
        for (d, layer) in layers.iter().enumerate().skip(1) {
            let block = (src_rank as u64).pow((d - 1) as u32);
            let lo = letter as u64 * block;
            let sub: Layer = layer
                .range(lo..lo + block)
                .map(|(&code, c)| (code - lo, c.clone()))
                .collect();
            child.push(sub);
        }
        while child.last().is_some_and(BTreeMap::is_empty) {
            child.pop();
        }
        if child.is_empty() {
            continue;
        }
        // the image has valuation >= 1, so the inner series is only needed below the top degree
        let inner = substitute_dense(src_rank, &child, images, rank, class - 1);
        out.add_left_product(image, &inner);
    }
    out
}

/// Sparse `y` with zero constant term, stored as `(degree, code, coefficient)`.
#[derive(Clone, Debug, Default)]
pub(crate) struct SparseTerms(Vec<(usize, u64, BigInt)>);

impl SparseTerms {
    /// `series - constant term`.
    pub(crate) fn augmentation(s: &TruncatedSeries) -> Self {
        let mut out = Vec::new();
        for (d, layer) in s.layers.iter().enumerate().skip(1) {
            for (&code, c) in layer {
                out.push((d, code, c.clone()));
            }
        }
        SparseTerms(out)
    }
}

/// Dense accumulator for long products of sparse factors `(1 + y)`.
#[derive(Clone, Debug)]
pub(crate) struct DenseSeries {
    rank: usize,
    class: usize,
    layers: Vec<Vec<BigInt>>,
    /// `rank^k` for `k = 0..=class`.
    powers: Vec<u64>,
}

impl DenseSeries {
    pub(crate) fn one(rank: usize, class: usize) -> Self {
        let powers: Vec<u64> = (0..=class).map(|k| (rank as u64).pow(k as u32)).collect();
        let mut layers: Vec<Vec<BigInt>> = powers
            .iter()
            .map(|&n| vec![BigInt::zero(); n as usize])
            .collect();
        layers[0][0] = BigInt::one();
        DenseSeries {
            rank,
            class,
            layers,
            powers,
        }
    }

    pub(crate) fn from_series(s: &TruncatedSeries) -> Self {
        let mut out = Self::one(s.rank, s.class);
        out.layers[0][0] = BigInt::zero();
        for (d, layer) in s.layers.iter().enumerate() {
            for (&code, c) in layer {
                out.layers[d][code as usize] = c.clone();
            }
        }
        out
    }

    /// `self <- self * (1 + y)`, in place from the top degree down.
    pub(crate) fn mul_right(&mut self, y: &SparseTerms) {
        for n in (1..=self.class).rev() {
            let (low, high) = self.layers.split_at_mut(n);
            let target = &mut high[0];
            for (k, v, coef) in &y.0 {
                if *k > n {
                    continue;
                }
                let shift = self.powers[*k];
                for (u, a) in low[n - k].iter().enumerate() {
                    if !a.is_zero() {
                        target[(u as u64 * shift + v) as usize] += a * coef;
                    }
                }
            }
        }
    }

    /// `self <- (1 + y) * self`, in place from the top degree down.
    pub(crate) fn mul_left(&mut self, y: &SparseTerms) {
        for n in (1..=self.class).rev() {
            let (low, high) = self.layers.split_at_mut(n);
            let target = &mut high[0];
            for (k, v, coef) in &y.0 {
                if *k > n {
                    continue;
                }
                let shift = self.powers[n - k];
                for (u, a) in low[n - k].iter().enumerate() {
                    if !a.is_zero() {
                        target[(v * shift + u as u64) as usize] += coef * a;
                    }
                }
            }
        }
    }

    /// `self += y * other`, where `other` may have a smaller class.
    fn add_left_product(&mut self, y: &SparseTerms, other: &DenseSeries) {
        for (k, v, coef) in &y.0 {
            for n in *k..=self.class.min(other.class + k) {
                let shift = self.powers[n - k];
                let target = &mut self.layers[n];
                for (u, a) in other.layers[n - k].iter().enumerate() {
                    if !a.is_zero() {
                        target[(v * shift + u as u64) as usize] += coef * a;
                    }
                }
            }
        }
    }

    pub(crate) fn layer_map(&self, d: usize) -> Layer {
        self.layers[d]
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i as u64, c.clone()))
            .collect()
    }

    pub(crate) fn is_one(&self) -> bool {
        self.layers[0][0].is_one() && self.layers[1..].iter().all(|l| l.iter().all(Zero::is_zero))
    }

    pub(crate) fn to_series(&self) -> TruncatedSeries {
        TruncatedSeries {
            rank: self.rank,
            class: self.class,
            layers: (0..=self.class).map(|d| self.layer_map(d)).collect(),
        }
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        self.assert_compatible(rhs);
        let c = self.class;
        let mut out = TruncatedSeries::zero(self.rank, c);
        for du in 0..=c {
            if self.layers[du].is_empty() {
                continue;
            }
            for dv in 0..=c - du {
                if rhs.layers[dv].is_empty() {
                    continue;
                }
                TruncatedSeries::mul_layers_into(
                    self.rank,
                    &self.layers[du],
                    &rhs.layers[dv],
                    dv,
                    &mut out.layers[du + dv],
                );
            }
        }
        out.prune();
        out
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let mut out = self.clone();
        rhs.add_scaled_into(&mut out, &BigInt::one());
        out
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let mut out = self.clone();
        rhs.add_scaled_into(&mut out, &-BigInt::one());
        out
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        self.scaled(&-BigInt::one())
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (w, c) in self.terms() {
            let word: String = w.iter().map(|&l| letter_char(l).to_ascii_uppercase()).collect();
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match (word.is_empty(), mag.is_one()) {
                (true, _) => write!(f, "{mag}")?,
                (false, true) => write!(f, "{word}")?,
                (false, false) => write!(f, "{mag}{word}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruncatedSeries(r={}, c={}: {})", self.rank, self.class, self)
    }
}
