//! Endomorphisms and automorphisms of `N_r^c`.
//!
//! An endomorphism is determined by the images of the generators. The
//! projection `Aut(N_r^c) -> Aut(N_r^{c-1})` truncates those images; its
//! kernel is identified with `Hom(Z^r, Lie_r^c)` through
//! `flat(α)(x_i) = α(x_i) x_i^-1` and `sharp(β)(x_i) = β(x_i) x_i`.
//!
//! Composition follows function notation: `e.compose(f)` is `e ∘ f`.

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::{lie_layer_matrix, witt_rank};
use crate::matrix::IntMatrix;
use crate::nilgroup::{ElementJson, FreeNilpotentGroup, GroupElement};
use crate::series::TruncatedSeries;

#[derive(Clone)]
pub struct Endo {
    group: FreeNilpotentGroup,
    images: Vec<GroupElement>,
    /// `M(images[i]) - 1`, the substitution used by [`Endo::apply`].
    substitution: Vec<TruncatedSeries>,
}

impl PartialEq for Endo {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group && self.images == other.images
    }
}

impl Eq for Endo {}

impl std::fmt::Debug for Endo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Endo[{:?}](", self.group)?;
        for (i, g) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{} -> {}", crate::series::letter_char(i as u8), g)?;
        }
        write!(f, ")")
    }
}

impl Endo {
    /// The endomorphism sending generator `i` to `images[i]`.
    pub fn from_images(images: Vec<GroupElement>) -> Result<Self> {
        let group = images
            .first()
            .map(|g| g.group().clone())
            .ok_or_else(|| Error::InvalidArgument("an endomorphism needs at least one image".into()))?;
        if images.len() != group.rank() {
            return Err(Error::InvalidArgument(format!(
                "{} images given for rank {}",
                images.len(),
                group.rank()
            )));
        }
        if let Some(bad) = images.iter().find(|g| g.group() != &group) {
            return Err(Error::mismatch(group.params(), bad.group().params()));
        }
        let one = TruncatedSeries::one(group.rank(), group.class());
        let substitution = images.iter().map(|g| &g.magnus() - &one).collect();
        Ok(Endo {
            group,
            images,
            substitution,
        })
    }

    pub fn identity(group: &FreeNilpotentGroup) -> Self {
        Self::from_images(group.generators()).expect("generators form valid images")
    }

    /// The lift of `a` sending `x_i` to `prod_j x_j^(a[j][i])` in collected order.
    pub fn from_matrix(group: &FreeNilpotentGroup, a: &IntMatrix) -> Result<Self> {
        let r = group.rank();
        if a.shape() != (r, r) {
            return Err(Error::Dimension(format!(
                "{}x{} matrix for rank {r}",
                a.rows(),
                a.cols()
            )));
        }
        let images: Result<Vec<GroupElement>> = (0..r)
            .map(|i| group.from_layer(1, &a.column(i)))
            .collect();
        Self::from_images(images?)
    }

    pub fn group(&self) -> &FreeNilpotentGroup {
        &self.group
    }

    pub fn rank(&self) -> usize {
        self.group.rank()
    }

    pub fn class(&self) -> usize {
        self.group.class()
    }

    pub fn images(&self) -> &[GroupElement] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, g)| g == &self.group.generator(i).expect("in range"))
    }

    pub fn apply(&self, g: &GroupElement) -> Result<GroupElement> {
        if g.group() != &self.group {
            return Err(Error::mismatch(self.group.params(), g.group().params()));
        }
        let s = g.magnus().substitute(&self.substitution)?;
        self.group
            .peel(&s)
            .map_err(|e| Error::Internal(format!("endomorphism image left the group: {e}")))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if other.group != self.group {
            return Err(Error::mismatch(self.group.params(), other.group.params()));
        }
        let images: Result<Vec<GroupElement>> = other.images.iter().map(|g| self.apply(g)).collect();
        Self::from_images(images?)
    }

    /// Action on `H_1 = Z^r`; column `i` is the abelianized image of `x_i`.
    pub fn abelianization_matrix(&self) -> IntMatrix {
        let r = self.rank();
        let columns: Vec<Vec<BigInt>> = self.images.iter().map(|g| g.layer(1).to_vec()).collect();
        IntMatrix::from_columns(r, &columns)
    }

    pub fn is_automorphism(&self) -> bool {
        self.abelianization_matrix().is_unimodular()
    }

    /// Two-sided inverse, built from the inverse on `H_1` and corrected degree by degree.
    pub fn invert(&self) -> Result<Self> {
        let a = self.abelianization_matrix();
        let a_inv = a.inverse_unimodular().map_err(|_| {
            Error::NotInvertible(format!("abelianization {a} has non-unit determinant"))
        })?;
        let mut f = Self::from_matrix(&self.group, &a_inv)?;
        for _ in 0..self.class() {
            let h = self.compose(&f)?;
            let mut done = true;
            let mut correction = Vec::with_capacity(self.rank());
            for (i, image) in h.images.iter().enumerate() {
                let x = self.group.generator(i)?;
                let delta = x.inv().mul(image)?;
                done &= delta.is_identity();
                correction.push(x.mul(&delta.inv())?);
            }
            if done {
                break;
            }
            f = f.compose(&Self::from_images(correction)?)?;
        }
        if !self.compose(&f)?.is_identity() || !f.compose(self)?.is_identity() {
            return Err(Error::Internal("degree-by-degree inversion did not converge".into()));
        }
        Ok(f)
    }

    /// The induced endomorphism of `N_r^{c-1}`.
    pub fn project(&self) -> Result<Self> {
        if self.class() < 2 {
            return Err(Error::InvalidArgument("cannot project below class 1".into()));
        }
        let images: Result<Vec<GroupElement>> = self
            .images
            .iter()
            .map(|g| g.truncate(self.class() - 1))
            .collect();
        Self::from_images(images?)
    }

    /// A preimage under [`Endo::project`] in class `c + 1`, reusing the collected words.
    pub fn lift(&self) -> Result<Self> {
        if !self.is_automorphism() {
            return Err(Error::NotInvertible("only automorphisms are lifted".into()));
        }
        let images: Result<Vec<GroupElement>> = self
            .images
            .iter()
            .map(|g| g.reinterpret_in_class(self.class() + 1))
            .collect();
        Self::from_images(images?)
    }

    /// Iterated [`Endo::lift`] up to the given class.
    pub fn lift_to(&self, class: usize) -> Result<Self> {
        if class < self.class() {
            return Err(Error::InvalidArgument(format!(
                "cannot lift class {} to class {class}",
                self.class()
            )));
        }
        if !self.is_automorphism() {
            return Err(Error::NotInvertible("only automorphisms are lifted".into()));
        }
        let images: Result<Vec<GroupElement>> = self
            .images
            .iter()
            .map(|g| g.reinterpret_in_class(class))
            .collect();
        Self::from_images(images?)
    }

    /// Extends to rank `r + 1`, fixing the new generator.
    pub fn stabilize(&self) -> Result<Self> {
        let r = self.rank() + 1;
        let group = FreeNilpotentGroup::new(r, self.class())?;
        let mut images: Vec<GroupElement> = self
            .images
            .iter()
            .map(|g| g.embed_in_rank(r))
            .collect::<Result<_>>()?;
        images.push(group.generator(r - 1)?);
        Self::from_images(images)
    }

    /// The homomorphism `Z^r -> Lie_r^c` of a kernel element.
    pub fn flat(&self) -> Result<HomMap> {
        let c = self.class();
        if c < 2 {
            return Err(Error::InvalidArgument("flat needs class at least 2".into()));
        }
        if !self.project()?.is_identity() {
            return Err(Error::NotInKernel(format!("{self:?} does not project to the identity")));
        }
        let mut columns = Vec::with_capacity(self.rank());
        for (i, image) in self.images.iter().enumerate() {
            let z = image.mul(&self.group.generator(i)?.inv())?;
            if z.lcs_degree().is_some_and(|d| d < c) {
                return Err(Error::NotCentral(format!(
                    "α(x_{i}) x_{i}^-1 = {z} is not supported in degree {c}"
                )));
            }
            columns.push(z.layer(c).to_vec());
        }
        HomMap::new(self.rank(), c, IntMatrix::from_columns(self.group.degree_range(c).len(), &columns))
    }

    pub fn to_json(&self) -> EndoJson {
        EndoJson {
            rank: self.rank(),
            class: self.class(),
            images: self.images.iter().map(GroupElement::to_json).collect(),
        }
    }

    pub fn from_json(json: &EndoJson) -> Result<Self> {
        let images: Result<Vec<GroupElement>> = json.images.iter().map(GroupElement::from_json).collect();
        let e = Self::from_images(images?)?;
        if e.group.params() != (json.rank, json.class) {
            return Err(Error::mismatch((json.rank, json.class), e.group.params()));
        }
        Ok(e)
    }
}

/// `{rank, class, images: [element, ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndoJson {
    pub rank: usize,
    pub class: usize,
    pub images: Vec<ElementJson>,
}

/// A homomorphism `Z^r -> Lie_r^c`: column `i` holds the Lyndon coordinates of the image of `e_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HomMap {
    rank: usize,
    class: usize,
    matrix: IntMatrix,
}

impl HomMap {
    pub fn new(rank: usize, class: usize, matrix: IntMatrix) -> Result<Self> {
        if class < 2 {
            return Err(Error::InvalidArgument("kernel homomorphisms need class at least 2".into()));
        }
        let rows = crate::lie::witt_rank_usize(rank, class);
        if matrix.shape() != (rows, rank) {
            return Err(Error::Dimension(format!(
                "expected a {rows}x{rank} matrix, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(HomMap { rank, class, matrix })
    }

    pub fn zero(rank: usize, class: usize) -> Result<Self> {
        let rows = witt_rank(rank as u64, class as u64)?;
        let rows = usize::try_from(rows).map_err(|_| Error::InvalidArgument("layer too large".into()))?;
        Self::new(rank, class, IntMatrix::zeros(rows, rank))
    }

    /// The basis homomorphism with a single 1 at `(row, col)`.
    pub fn unit(rank: usize, class: usize, row: usize, col: usize) -> Result<Self> {
        let mut h = Self::zero(rank, class)?;
        if row >= h.matrix.rows() || col >= rank {
            return Err(Error::Dimension(format!("unit ({row}, {col}) out of range")));
        }
        h.matrix[(row, col)] = BigInt::one();
        Ok(h)
    }

    /// All basis homomorphisms, column-major.
    pub fn standard_basis(rank: usize, class: usize) -> Result<Vec<Self>> {
        let rows = Self::zero(rank, class)?.matrix.rows();
        let mut out = Vec::with_capacity(rows * rank);
        for col in 0..rank {
            for row in 0..rows {
                out.push(Self::unit(rank, class, row, col)?);
            }
        }
        Ok(out)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn class(&self) -> usize {
        self.class
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if (self.rank, self.class) != (other.rank, other.class) {
            return Err(Error::mismatch((self.rank, self.class), (other.rank, other.class)));
        }
        Self::new(self.rank, self.class, &self.matrix + &other.matrix)
    }

    /// The left `GL_r(Z)`-action `β -> Lie(g) ∘ β ∘ g^-1`.
    pub fn act(&self, g: &IntMatrix) -> Result<Self> {
        let g_inv = g.inverse_unimodular()?;
        let lie = lie_layer_matrix(g, self.class)?;
        Self::new(self.rank, self.class, &(&lie * &self.matrix) * &g_inv)
    }

    /// The automorphism `x_i -> β(e_i) x_i` of `N_r^c`.
    pub fn sharp(&self) -> Result<Endo> {
        let group = FreeNilpotentGroup::new(self.rank, self.class)?;
        let images: Result<Vec<GroupElement>> = (0..self.rank)
            .map(|i| {
                let z = group.from_layer(self.class, &self.matrix.column(i))?;
                z.mul(&group.generator(i)?)
            })
            .collect();
        Endo::from_images(images?)
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }
}

/// `true` if the determinant of the abelianization is a unit.
pub fn is_automorphism(e: &Endo) -> bool {
    e.is_automorphism()
}

/// Degree of freedom count `r * witt_rank(r, c)` of the kernel of the projection.
pub fn kernel_rank(rank: usize, class: usize) -> Result<BigInt> {
    Ok(witt_rank(rank as u64, class as u64)? * BigInt::from(rank))
}
