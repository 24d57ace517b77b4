//! The free Lie ring over the integers on `r` generators, truncated at degree `c`.
//!
//! Elements are stored in the Lyndon basis. Brackets and the GL-action are
//! computed in the associative envelope: every basis monomial expands to a
//! noncommutative polynomial `P_w`, and a Lie polynomial is read back in the
//! basis using that `P_w = w + (lexicographically larger words)`.

mod lyndon;

pub use lyndon::{is_lyndon, lyndon_words, Bracket, LyndonWord};

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, LazyLock, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::series::{check_parameters, decode_word, TruncatedSeries};

/// The Möbius function.
pub fn mobius(n: u64) -> Result<i64> {
    if n == 0 {
        return Err(Error::InvalidArgument("mobius is undefined at 0".into()));
    }
    let mut n = n;
    let mut sign = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return Ok(0);
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    Ok(sign)
}

/// Rank of the degree-`n` layer of the free Lie ring on `r` generators,
/// `(1/n) sum_{d | n} mu(d) r^(n/d)`.
pub fn witt_rank(r: u64, n: u64) -> Result<BigInt> {
    if r == 0 || n == 0 {
        return Err(Error::InvalidArgument(format!(
            "witt_rank needs r >= 1 and n >= 1, got ({r}, {n})"
        )));
    }
    let mut sum = BigInt::zero();
    for d in (1..=n).filter(|d| n % d == 0) {
        let mu = mobius(d)?;
        if mu != 0 {
            let term = num_traits::pow(BigInt::from(r), (n / d) as usize);
            sum += term * mu;
        }
    }
    let n_big = BigInt::from(n);
    if !(&sum % &n_big).is_zero() {
        return Err(Error::Internal(format!(
            "Möbius sum {sum} for (r={r}, n={n}) is not divisible by n"
        )));
    }
    Ok(sum / n_big)
}

/// Convenience for small parameters where the rank fits a `usize`.
pub(crate) fn witt_rank_usize(r: usize, n: usize) -> usize {
    let w = witt_rank(r as u64, n as u64).expect("positive parameters");
    usize::try_from(w).expect("Witt rank fits in usize")
}

/// Lyndon basis of the degree-`n` layer on `r` letters, in lexicographic order.
pub fn lyndon_basis(r: usize, n: usize) -> Vec<LyndonWord> {
    lyndon_words(r, n)
}

/// Degree-ordered Lyndon basis of all layers up to `c`.
pub fn lyndon_basis_upto(r: usize, c: usize) -> Vec<LyndonWord> {
    (1..=c).flat_map(|n| lyndon_words(r, n)).collect()
}

type Layer = BTreeMap<u64, BigInt>;

static ENVELOPE_CACHE: LazyLock<Mutex<HashMap<(usize, Vec<u8>), Arc<Layer>>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

/// The homogeneous polynomial `P_w` of a Lyndon bracket, encoded for rank `r`.
pub(crate) fn envelope_polynomial(rank: usize, w: &LyndonWord) -> Arc<Layer> {
    let key = (rank, w.letters().to_vec());
    if let Some(p) = ENVELOPE_CACHE.lock().expect("cache lock").get(&key) {
        return Arc::clone(p);
    }
    let poly = match w.standard_factorization() {
        None => {
            let mut l = Layer::new();
            l.insert(w.letters()[0] as u64, BigInt::one());
            l
        }
        Some((u, v)) => {
            let pu = envelope_polynomial(rank, &u);
            let pv = envelope_polynomial(rank, &v);
            let mut out = Layer::new();
            let shift_v = (rank as u64).pow(v.degree() as u32);
            let shift_u = (rank as u64).pow(u.degree() as u32);
            for (&x, a) in pu.iter() {
                for (&y, b) in pv.iter() {
                    *out.entry(x * shift_v + y).or_default() += a * b;
                    *out.entry(y * shift_u + x).or_default() -= a * b;
                }
            }
            out.retain(|_, c| !c.is_zero());
            out
        }
    };
    let poly = Arc::new(poly);
    ENVELOPE_CACHE
        .lock()
        .expect("cache lock")
        .insert(key, Arc::clone(&poly));
    poly
}

/// Reads a homogeneous Lie polynomial of the given degree in the Lyndon basis.
pub(crate) fn decompose_layer(
    rank: usize,
    degree: usize,
    layer: &Layer,
) -> Result<Vec<(LyndonWord, BigInt)>> {
    let mut rest = layer.clone();
    let mut out = Vec::new();
    while let Some((&code, coef)) = rest.iter().next() {
        let coef = coef.clone();
        let word = decode_word(code, degree, rank);
        if !is_lyndon(&word) {
            return Err(Error::NotLie(format!(
                "leading word `{}` of a degree-{degree} residual is not a Lyndon word",
                crate::series::word_string(&word)
            )));
        }
        let lw = LyndonWord::new(word).expect("checked");
        let p = envelope_polynomial(rank, &lw);
        for (&w, c) in p.iter() {
            let e = rest.entry(w).or_default();
            *e -= c * &coef;
            if e.is_zero() {
                rest.remove(&w);
            }
        }
        out.push((lw, coef));
    }
    Ok(out)
}

/// An element of the free Lie ring in the Lyndon basis, truncated at `class`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LieElement {
    rank: usize,
    class: usize,
    terms: BTreeMap<LyndonWord, BigInt>,
}

impl LieElement {
    pub fn zero(rank: usize, class: usize) -> Result<Self> {
        check_parameters(rank, class)?;
        Ok(LieElement {
            rank,
            class,
            terms: BTreeMap::new(),
        })
    }

    /// The basis monomial of a Lyndon word.
    pub fn basis(rank: usize, class: usize, word: &LyndonWord) -> Result<Self> {
        Self::from_terms(rank, class, [(word.clone(), BigInt::one())])
    }

    pub fn generator(rank: usize, class: usize, i: usize) -> Result<Self> {
        if i >= rank {
            return Err(Error::InvalidArgument(format!("generator {i} out of range")));
        }
        Self::basis(rank, class, &LyndonWord::letter(i as u8))
    }

    /// Sums terms; basis words above `class` are discarded.
    pub fn from_terms<I>(rank: usize, class: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (LyndonWord, BigInt)>,
    {
        let mut out = Self::zero(rank, class)?;
        for (w, c) in terms {
            if w.min_rank() > rank {
                return Err(Error::InvalidArgument(format!(
                    "word `{w}` uses letters beyond rank {rank}"
                )));
            }
            if w.degree() <= class {
                *out.terms.entry(w).or_default() += c;
            }
        }
        out.terms.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    /// Builds the element with the given coordinates in `lyndon_basis(rank, degree)`.
    pub fn from_coordinates(rank: usize, class: usize, degree: usize, coords: &[BigInt]) -> Result<Self> {
        let basis = lyndon_basis(rank, degree);
        if basis.len() != coords.len() {
            return Err(Error::Dimension(format!(
                "{} coordinates for a basis of size {}",
                coords.len(),
                basis.len()
            )));
        }
        Self::from_terms(rank, class, basis.into_iter().zip(coords.iter().cloned()))
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn class(&self) -> usize {
        self.class
    }

    pub fn terms(&self) -> &BTreeMap<LyndonWord, BigInt> {
        &self.terms
    }

    pub fn coefficient(&self, w: &LyndonWord) -> BigInt {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coordinates of the degree-`n` part in `lyndon_basis(rank, n)`.
    pub fn coordinates(&self, n: usize) -> Vec<BigInt> {
        lyndon_basis(self.rank, n)
            .iter()
            .map(|w| self.coefficient(w))
            .collect()
    }

    pub fn homogeneous_part(&self, n: usize) -> Self {
        LieElement {
            rank: self.rank,
            class: self.class,
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.degree() == n)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    /// The degree when all terms share one, `None` for zero or mixed elements.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut degrees = self.terms.keys().map(LyndonWord::degree);
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.rank != other.rank || self.class != other.class {
            return Err(Error::mismatch((self.rank, self.class), (other.rank, other.class)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Self::from_terms(
            self.rank,
            self.class,
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|(w, c)| (w.clone(), c.clone())),
        )
    }

    pub fn scaled(&self, factor: &BigInt) -> Self {
        let mut out = self.clone();
        if factor.is_zero() {
            out.terms.clear();
        } else {
            out.terms.values_mut().for_each(|c| *c *= factor);
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scaled(&-BigInt::one())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Image in the truncated free associative ring.
    pub fn expand(&self) -> TruncatedSeries {
        let mut s = TruncatedSeries::zero(self.rank, self.class);
        for (w, c) in &self.terms {
            let p = envelope_polynomial(self.rank, w);
            let layer = s.layer_mut(w.degree());
            for (&code, x) in p.iter() {
                let e = layer.entry(code).or_default();
                *e += x * c;
                if e.is_zero() {
                    layer.remove(&code);
                }
            }
        }
        s
    }

    /// Reads a series without constant term back in the Lyndon basis.
    pub fn from_series(s: &TruncatedSeries) -> Result<Self> {
        if !s.constant_term().is_zero() {
            return Err(Error::NotLie("series has a nonzero constant term".into()));
        }
        let mut out = Self::zero(s.rank(), s.class())?;
        for n in 1..=s.class() {
            for (w, c) in decompose_layer(s.rank(), n, s.layer(n))? {
                out.terms.insert(w, c);
            }
        }
        Ok(out)
    }

    pub fn bracket(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let x = self.expand();
        let y = other.expand();
        Self::from_series(&x.ring_commutator(&y))
    }

    /// Substitutes `letter i -> sum_j a[j][i] letter j`; column `i` of `a` is the image of letter `i`.
    pub fn apply_matrix(&self, a: &IntMatrix) -> Result<Self> {
        if a.shape() != (self.rank, self.rank) {
            return Err(Error::Dimension(format!(
                "{}x{} matrix acting on rank {}",
                a.rows(),
                a.cols(),
                self.rank
            )));
        }
        let images: Vec<TruncatedSeries> = (0..self.rank)
            .map(|i| {
                TruncatedSeries::from_terms(
                    self.rank,
                    self.class,
                    (0..self.rank).map(|j| (vec![j as u8], a[(j, i)].clone())),
                )
            })
            .collect();
        Self::from_series(&self.expand().substitute(&images)?)
    }
}

/// `[x, y]`, rewritten in the Lyndon basis and truncated at the class bound.
pub fn lie_bracket(x: &LieElement, y: &LieElement) -> Result<LieElement> {
    x.bracket(y)
}

/// Functorial action of an integer matrix on the free Lie ring.
pub fn lie_apply_matrix(a: &IntMatrix, x: &LieElement) -> Result<LieElement> {
    x.apply_matrix(a)
}

/// Matrix of `lie_apply_matrix(a, -)` on the degree-`n` layer, columns indexed by `lyndon_basis(r, n)`.
pub fn lie_layer_matrix(a: &IntMatrix, n: usize) -> Result<IntMatrix> {
    let r = a.rows();
    let basis = lyndon_basis(r, n);
    let columns: Result<Vec<Vec<BigInt>>> = basis
        .iter()
        .map(|w| {
            let x = LieElement::basis(r, n, w)?;
            Ok(x.apply_matrix(a)?.coordinates(n))
        })
        .collect();
    Ok(IntMatrix::from_columns(basis.len(), &columns?))
}

impl fmt::Display for LieElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            match (i, c.is_negative()) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if !mag.is_one() {
                write!(f, "{mag}")?;
            }
            if w.degree() == 1 {
                write!(f, "{w}")?;
            } else {
                write!(f, "[{w}]")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LieElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LieElement(r={}, c={}: {})", self.rank, self.class, self)
    }
}
