//! Free nilpotent groups `N_r^c = F_r / Γ_{c+1}(F_r)`.
//!
//! Elements are kept in collected form: one integer exponent per basic
//! commutator, in degree-then-lexicographic order of their Lyndon words.
//! The basic commutator of a letter is the generator; for a longer Lyndon
//! word with standard factorization `(u, v)` it is the group commutator
//! `[b_u, b_v]`, with the convention `[g, h] = g^-1 h^-1 g h`.
//!
//! Arithmetic runs through the truncated Magnus embedding `x_i -> 1 + X_i`.
//! Products are formed as series and peeled back degree by degree: the
//! lowest nontrivial layer of what is left is a Lie polynomial whose
//! Lyndon coordinates are the next block of exponents.

mod encoding;

pub use encoding::{parse_element, ElementJson};

use std::collections::{BTreeMap, HashMap};
use std::ops::Range;
use std::sync::{Arc, LazyLock, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::lie::{decompose_layer, lyndon_basis_upto, LieElement, LyndonWord};
use crate::series::{check_parameters, DenseSeries, SparseTerms, TruncatedSeries};

struct GroupTables {
    rank: usize,
    class: usize,
    basis: Vec<LyndonWord>,
    index: HashMap<LyndonWord, usize>,
    /// `degree_start[d]..degree_start[d + 1]` are the basis indices of degree `d`.
    degree_start: Vec<usize>,
    /// Powers `x, x^2, ...` of `x = M(b) - 1` for every basic commutator `b`.
    powers: Vec<Vec<TruncatedSeries>>,
}

static GROUPS: LazyLock<Mutex<HashMap<(usize, usize), FreeNilpotentGroup>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

/// Handle on the precomputed tables of `N_r^c`; cheap to clone.
#[derive(Clone)]
pub struct FreeNilpotentGroup(Arc<GroupTables>);

impl FreeNilpotentGroup {
    pub fn new(rank: usize, class: usize) -> Result<Self> {
        check_parameters(rank, class)?;
        if let Some(g) = GROUPS.lock().expect("group cache").get(&(rank, class)) {
            return Ok(g.clone());
        }
        let group = FreeNilpotentGroup(Arc::new(GroupTables::build(rank, class)));
        GROUPS
            .lock()
            .expect("group cache")
            .entry((rank, class))
            .or_insert(group.clone());
        Ok(group)
    }

    pub fn rank(&self) -> usize {
        self.0.rank
    }

    pub fn class(&self) -> usize {
        self.0.class
    }

    pub fn params(&self) -> (usize, usize) {
        (self.0.rank, self.0.class)
    }

    /// Basic commutators in collection order.
    pub fn basis(&self) -> &[LyndonWord] {
        &self.0.basis
    }

    pub fn basis_index(&self, w: &LyndonWord) -> Option<usize> {
        self.0.index.get(w).copied()
    }

    /// Basis indices of the basic commutators of degree `d`.
    pub fn degree_range(&self, d: usize) -> Range<usize> {
        assert!(d >= 1 && d <= self.0.class, "degree out of range");
        self.0.degree_start[d]..self.0.degree_start[d + 1]
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            group: self.clone(),
            exponents: vec![BigInt::zero(); self.0.basis.len()],
        }
    }

    pub fn generator(&self, i: usize) -> Result<GroupElement> {
        if i >= self.rank() {
            return Err(Error::InvalidArgument(format!(
                "generator {i} out of range for rank {}",
                self.rank()
            )));
        }
        self.basic_commutator(&LyndonWord::letter(i as u8))
    }

    pub fn generators(&self) -> Vec<GroupElement> {
        (0..self.rank()).map(|i| self.generator(i).expect("in range")).collect()
    }

    pub fn basic_commutator(&self, w: &LyndonWord) -> Result<GroupElement> {
        self.from_terms([(w.clone(), BigInt::one())])
    }

    /// Collected form with the given exponents in basis order.
    pub fn from_exponents(&self, exponents: Vec<BigInt>) -> Result<GroupElement> {
        if exponents.len() != self.0.basis.len() {
            return Err(Error::Dimension(format!(
                "{} exponents for {} basic commutators",
                exponents.len(),
                self.0.basis.len()
            )));
        }
        Ok(GroupElement {
            group: self.clone(),
            exponents,
        })
    }

    pub fn from_terms<I>(&self, terms: I) -> Result<GroupElement>
    where
        I: IntoIterator<Item = (LyndonWord, BigInt)>,
    {
        let mut g = self.identity();
        for (w, e) in terms {
            let idx = self.basis_index(&w).ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "`{w}` is not a basic commutator of N_{}^{}",
                    self.rank(),
                    self.class()
                ))
            })?;
            g.exponents[idx] += e;
        }
        Ok(g)
    }

    /// Element supported in degree `d` with the given Lie coordinates.
    pub fn from_layer(&self, d: usize, coords: &[BigInt]) -> Result<GroupElement> {
        let range = self.degree_range(d);
        if coords.len() != range.len() {
            return Err(Error::Dimension(format!(
                "{} coordinates for a degree-{d} layer of size {}",
                coords.len(),
                range.len()
            )));
        }
        let mut g = self.identity();
        for (slot, c) in g.exponents[range].iter_mut().zip(coords) {
            *slot = c.clone();
        }
        Ok(g)
    }

    /// Uniformly random exponents in `-bound..=bound`.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R, bound: i64) -> GroupElement {
        let exponents = (0..self.0.basis.len())
            .map(|_| BigInt::from(rng.gen_range(-bound..=bound)))
            .collect();
        GroupElement {
            group: self.clone(),
            exponents,
        }
    }

    fn factor_series(&self, idx: usize, e: &BigInt) -> TruncatedSeries {
        TruncatedSeries::binomial_power(self.rank(), self.class(), &self.0.powers[idx], e)
    }

    /// `M(b)^e - 1` for the basic commutator with index `idx`.
    fn factor_terms(&self, idx: usize, e: &BigInt) -> SparseTerms {
        SparseTerms::augmentation(&self.factor_series(idx, e))
    }

    /// Multiplies `M(g)` (or `M(g)^-1`) onto the right of `acc`.
    fn push_element(&self, acc: &mut DenseSeries, g: &GroupElement, inverse: bool) {
        if inverse {
            for (idx, e) in g.exponents.iter().enumerate().rev() {
                if !e.is_zero() {
                    acc.mul_right(&self.factor_terms(idx, &-e));
                }
            }
        } else {
            for (idx, e) in g.exponents.iter().enumerate() {
                if !e.is_zero() {
                    acc.mul_right(&self.factor_terms(idx, e));
                }
            }
        }
    }

    /// The Magnus series of a basic commutator.
    pub fn basic_series(&self, idx: usize) -> TruncatedSeries {
        self.factor_series(idx, &BigInt::one())
    }

    pub fn embed(&self, g: &GroupElement) -> Result<TruncatedSeries> {
        self.check(g)?;
        let mut acc = DenseSeries::one(self.rank(), self.class());
        self.push_element(&mut acc, g, false);
        Ok(acc.to_series())
    }

    /// Recovers the collected form of a series in the image of the embedding.
    pub fn peel(&self, s: &TruncatedSeries) -> Result<GroupElement> {
        if s.rank() != self.rank() || s.class() != self.class() {
            return Err(Error::mismatch(self.params(), (s.rank(), s.class())));
        }
        if !s.constant_term().is_one() {
            return Err(Error::NotGroupElement("constant term is not 1".into()));
        }
        self.peel_dense(DenseSeries::from_series(s))
    }

    fn peel_dense(&self, mut rest: DenseSeries) -> Result<GroupElement> {
        let mut g = self.identity();
        for d in 1..=self.class() {
            let coords = decompose_layer(self.rank(), d, &rest.layer_map(d))
                .map_err(|e| Error::NotGroupElement(e.to_string()))?;
            for (w, e) in coords {
                let idx = self.0.index[&w];
                rest.mul_left(&self.factor_terms(idx, &-&e));
                g.exponents[idx] = e;
            }
        }
        if !rest.is_one() {
            return Err(Error::NotGroupElement(
                "series is not in the image of the Magnus embedding".into(),
            ));
        }
        Ok(g)
    }

    fn peel_product(&self, acc: DenseSeries) -> GroupElement {
        self.peel_dense(acc)
            .expect("products of embedded elements stay in the Magnus image")
    }

    /// Collected form of `g_1^(±1) g_2^(±1) ...`, computed as one Magnus product.
    fn product(&self, factors: &[(&GroupElement, bool)]) -> GroupElement {
        let mut acc = DenseSeries::one(self.rank(), self.class());
        for (g, inverse) in factors {
            self.push_element(&mut acc, g, *inverse);
        }
        self.peel_product(acc)
    }

    fn check(&self, g: &GroupElement) -> Result<()> {
        if g.group.params() != self.params() {
            return Err(Error::mismatch(self.params(), g.group.params()));
        }
        Ok(())
    }

    /// Rank of `H_1(N_r^c; Z)`: the cokernel of the degree-one parts of the
    /// commutators `[x_i, x_j]`, which generate the derived subgroup.
    pub fn h1_rank(&self) -> usize {
        let gens = self.generators();
        let mut columns = Vec::new();
        for (i, x) in gens.iter().enumerate() {
            for y in &gens[i + 1..] {
                columns.push(x.comm(y).expect("same group").layer(1).to_vec());
            }
        }
        let relations = crate::matrix::IntMatrix::from_columns(self.rank(), &columns);
        crate::stability::cokernel(&relations).free_rank
    }

    /// Rank of `H_2(N_r^c; Z)` through Hopf's formula: the kernel of
    /// `N_r^(c+1) -> N_r^c`, which is central and free abelian on the basic
    /// commutators it contains.
    pub fn h2_rank(&self) -> BigInt {
        let next = FreeNilpotentGroup::new(self.rank(), self.class() + 1).expect("class fits");
        let count = next
            .basis()
            .iter()
            .map(|w| next.basic_commutator(w).expect("basis word"))
            .filter(|b| b.truncate(self.class()).expect("lower class").is_identity())
            .inspect(|b| debug_assert!(b.center_test()))
            .count();
        BigInt::from(count)
    }
}

impl PartialEq for FreeNilpotentGroup {
    fn eq(&self, other: &Self) -> bool {
        self.params() == other.params()
    }
}

impl Eq for FreeNilpotentGroup {}

impl std::fmt::Debug for FreeNilpotentGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "N_{}^{}", self.rank(), self.class())
    }
}

impl GroupTables {
    fn build(rank: usize, class: usize) -> Self {
        let basis = lyndon_basis_upto(rank, class);
        let index: HashMap<LyndonWord, usize> =
            basis.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        let mut degree_start = vec![0; class + 2];
        for d in 1..=class {
            degree_start[d + 1] = degree_start[d] + basis.iter().filter(|w| w.degree() == d).count();
        }
        let one = TruncatedSeries::one(rank, class);
        let mut series: Vec<TruncatedSeries> = Vec::with_capacity(basis.len());
        for w in &basis {
            let s = match w.standard_factorization() {
                None => &one + &TruncatedSeries::letter(rank, class, w.letters()[0] as usize),
                Some((u, v)) => {
                    let su = &series[index[&u]];
                    let sv = &series[index[&v]];
                    su.group_commutator(sv).expect("units")
                }
            };
            series.push(s);
        }
        let powers = series.iter().map(TruncatedSeries::augmentation_powers).collect();
        GroupTables {
            rank,
            class,
            basis,
            index,
            degree_start,
            powers,
        }
    }
}

/// An element of `N_r^c` in collected normal form.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupElement {
    group: FreeNilpotentGroup,
    exponents: Vec<BigInt>,
}

impl std::hash::Hash for GroupElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.group.params().hash(state);
        self.exponents.hash(state);
    }
}

impl GroupElement {
    pub fn group(&self) -> &FreeNilpotentGroup {
        &self.group
    }

    pub fn rank(&self) -> usize {
        self.group.rank()
    }

    pub fn class(&self) -> usize {
        self.group.class()
    }

    /// Exponents in collection order.
    pub fn exponents(&self) -> &[BigInt] {
        &self.exponents
    }

    pub fn exponent(&self, w: &LyndonWord) -> BigInt {
        self.group
            .basis_index(w)
            .map(|i| self.exponents[i].clone())
            .unwrap_or_default()
    }

    /// Nonzero exponents keyed by basic commutator.
    pub fn exponent_map(&self) -> BTreeMap<LyndonWord, BigInt> {
        self.group
            .basis()
            .iter()
            .zip(&self.exponents)
            .filter(|(_, e)| !e.is_zero())
            .map(|(w, e)| (w.clone(), e.clone()))
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.exponents.iter().all(Zero::is_zero)
    }

    pub fn magnus(&self) -> TruncatedSeries {
        self.group.embed(self).expect("own group")
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.group.check(other)?;
        Ok(self.group.product(&[(self, false), (other, false)]))
    }

    pub fn inv(&self) -> Self {
        self.group.product(&[(self, true)])
    }

    pub fn pow(&self, e: &BigInt) -> Self {
        let s = self.magnus().pow(e).expect("constant term is 1");
        self.group.peel(&s).expect("powers stay in the Magnus image")
    }

    /// `g^-1 h^-1 g h`.
    pub fn comm(&self, other: &Self) -> Result<Self> {
        self.group.check(other)?;
        Ok(self
            .group
            .product(&[(self, true), (other, true), (self, false), (other, false)]))
    }

    /// Image under `N_r^c -> N_r^c'`.
    pub fn truncate(&self, class: usize) -> Result<Self> {
        if class == 0 || class > self.class() {
            return Err(Error::InvalidArgument(format!(
                "cannot truncate class {} to class {class}",
                self.class()
            )));
        }
        let group = FreeNilpotentGroup::new(self.rank(), class)?;
        let len = group.basis().len();
        Ok(GroupElement {
            group,
            exponents: self.exponents[..len].to_vec(),
        })
    }

    /// The same collected word read in `N_r^c''` for `c'' >= c`.
    pub fn reinterpret_in_class(&self, class: usize) -> Result<Self> {
        if class < self.class() {
            return Err(Error::InvalidArgument(format!(
                "cannot reinterpret class {} in lower class {class}",
                self.class()
            )));
        }
        let group = FreeNilpotentGroup::new(self.rank(), class)?;
        let mut exponents = self.exponents.clone();
        exponents.resize(group.basis().len(), BigInt::zero());
        Ok(GroupElement { group, exponents })
    }

    /// Image under `N_r^c -> N_{r'}^c` sending generators to the first `r` generators.
    pub fn embed_in_rank(&self, rank: usize) -> Result<Self> {
        if rank < self.rank() {
            return Err(Error::InvalidArgument(format!(
                "cannot embed rank {} into rank {rank}",
                self.rank()
            )));
        }
        let group = FreeNilpotentGroup::new(rank, self.class())?;
        group.from_terms(self.exponent_map())
    }

    /// Largest `n` with `g` in `Γ_n`; `None` for the identity.
    pub fn lcs_degree(&self) -> Option<usize> {
        self.exponents
            .iter()
            .position(|e| !e.is_zero())
            .map(|i| self.group.basis()[i].degree())
    }

    /// The degree-`n` exponents read as an element of `Lie_r^n`.
    pub fn graded_class(&self, n: usize) -> LieElement {
        let terms = self
            .group
            .degree_range(n)
            .map(|i| (self.group.basis()[i].clone(), self.exponents[i].clone()));
        LieElement::from_terms(self.rank(), self.class(), terms).expect("valid parameters")
    }

    /// Degree-`n` exponents in Lyndon order.
    pub fn layer(&self, n: usize) -> &[BigInt] {
        &self.exponents[self.group.degree_range(n)]
    }

    /// `true` if `g` commutes with every generator.
    pub fn center_test(&self) -> bool {
        self.group
            .generators()
            .iter()
            .all(|x| self.comm(x).expect("same group").is_identity())
    }
}

impl std::fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}({})", self.group, self)
    }
}

pub fn magnus_embed(g: &GroupElement) -> TruncatedSeries {
    g.magnus()
}

pub fn magnus_peel(group: &FreeNilpotentGroup, s: &TruncatedSeries) -> Result<GroupElement> {
    group.peel(s)
}

pub fn h1_rank(r: usize, c: usize) -> Result<usize> {
    Ok(FreeNilpotentGroup::new(r, c)?.h1_rank())
}

pub fn h2_rank(r: usize, c: usize) -> Result<BigInt> {
    check_parameters(r, c + 1)?;
    Ok(FreeNilpotentGroup::new(r, c)?.h2_rank())
}
