//! Polynomial `GL_r(Z)`-modules built from the standard module `Z^r` and its
//! inverse-transpose dual.
//!
//! A [`ModuleSpec`] is rank independent; [`eval_module`] produces the based
//! module at a given rank together with its action and stabilization map.

mod spec;

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::aut::Endo;
use crate::error::{Error, Result};
use crate::json::JsonInt;
use crate::lie::{lie_layer_matrix, lyndon_basis, witt_rank};
use crate::matrix::IntMatrix;
use crate::stability::FinAbPresentation;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ModuleSpec {
    /// A constant module with trivial action.
    Const(FinAbPresentation),
    /// `Z^r` with `A` acting as itself.
    Std,
    /// `Z^r` with `A` acting as `(A^-1)^T`.
    Dual,
    Tensor(Box<ModuleSpec>, Box<ModuleSpec>),
    /// Exterior power.
    Ext(usize, Box<ModuleSpec>),
    /// `Hom(source, target)`.
    Hom(Box<ModuleSpec>, Box<ModuleSpec>),
    Sum(Box<ModuleSpec>, Box<ModuleSpec>),
    /// Degree-`n` layer of the free Lie ring on `r` generators.
    Lie(usize),
}

impl ModuleSpec {
    pub fn integers() -> Self {
        ModuleSpec::Const(FinAbPresentation::free(1))
    }

    pub fn tensor(a: Self, b: Self) -> Self {
        ModuleSpec::Tensor(Box::new(a), Box::new(b))
    }

    pub fn ext(t: usize, a: Self) -> Self {
        ModuleSpec::Ext(t, Box::new(a))
    }

    pub fn hom(source: Self, target: Self) -> Self {
        ModuleSpec::Hom(Box::new(source), Box::new(target))
    }

    pub fn sum(a: Self, b: Self) -> Self {
        ModuleSpec::Sum(Box::new(a), Box::new(b))
    }

    /// Number of basis elements at rank `r`, by structural recursion.
    pub fn rank_at(&self, r: usize) -> Result<BigInt> {
        Ok(match self {
            ModuleSpec::Const(g) => BigInt::from(g.num_generators()),
            ModuleSpec::Std | ModuleSpec::Dual => BigInt::from(r),
            ModuleSpec::Tensor(a, b) | ModuleSpec::Hom(a, b) => a.rank_at(r)? * b.rank_at(r)?,
            ModuleSpec::Sum(a, b) => a.rank_at(r)? + b.rank_at(r)?,
            ModuleSpec::Ext(t, a) => binomial(&a.rank_at(r)?, *t),
            ModuleSpec::Lie(n) => witt_rank(r as u64, *n as u64)?,
        })
    }

    fn check(&self) -> Result<()> {
        match self {
            ModuleSpec::Lie(0) => Err(Error::InvalidArgument("lie(n) needs n >= 1".into())),
            ModuleSpec::Tensor(a, b) | ModuleSpec::Hom(a, b) | ModuleSpec::Sum(a, b) => {
                a.check()?;
                b.check()
            }
            ModuleSpec::Ext(_, a) => a.check(),
            _ => Ok(()),
        }
    }
}

/// `C(n, k)` for a nonnegative integer `n`.
pub(crate) fn binomial(n: &BigInt, k: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - BigInt::from(i)) / BigInt::from(i + 1);
    }
    if acc < BigInt::zero() {
        BigInt::zero()
    } else {
        acc
    }
}

/// A module evaluated at rank `r`: `Z^k / relations` with a basis, an action and a stabilization map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasedModule {
    spec: ModuleSpec,
    rank: usize,
    labels: Vec<String>,
    relations: IntMatrix,
    stab: Vec<usize>,
    next_dim: usize,
}

pub fn eval_module(spec: &ModuleSpec, r: usize) -> Result<BasedModule> {
    if r == 0 {
        return Err(Error::InvalidArgument("modules are evaluated at rank >= 1".into()));
    }
    spec.check()?;
    let labels = labels(spec, r);
    let relations = relations(spec, r)?;
    let stab = stab_map(spec, r);
    let next_dim = labels_len(spec, r + 1);
    Ok(BasedModule {
        spec: spec.clone(),
        rank: r,
        labels,
        relations,
        stab,
        next_dim,
    })
}

impl BasedModule {
    pub fn spec(&self) -> &ModuleSpec {
        &self.spec
    }

    pub fn rank_of_group(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn basis(&self) -> &[String] {
        &self.labels
    }

    /// Columns generate the relation lattice; empty for free modules.
    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    pub fn is_free(&self) -> bool {
        self.relations.cols() == 0
    }

    /// The matrix of `a` in this basis.
    pub fn action(&self, a: &IntMatrix) -> Result<IntMatrix> {
        if a.shape() != (self.rank, self.rank) {
            return Err(Error::Dimension(format!(
                "{}x{} matrix acting at rank {}",
                a.rows(),
                a.cols(),
                self.rank
            )));
        }
        let a_inv = a.inverse_unimodular()?;
        action(&self.spec, a, &a_inv)
    }

    /// Basis index at rank `r + 1` of each basis element.
    pub fn stab_indices(&self) -> &[usize] {
        &self.stab
    }

    /// The stabilization map as a `dim(r+1) x dim(r)` matrix.
    pub fn stab(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.next_dim, self.dim());
        for (j, &i) in self.stab.iter().enumerate() {
            m[(i, j)] = BigInt::one();
        }
        m
    }

    pub fn to_json(&self) -> ModuleJson {
        ModuleJson {
            spec: self.spec.to_string(),
            rank: self.rank,
            basis: self.labels.clone(),
            relations: columns_json(&self.relations),
            stab: self.stab.clone(),
        }
    }
}

fn columns_json(m: &IntMatrix) -> Vec<Vec<JsonInt>> {
    (0..m.cols())
        .map(|j| m.column(j).into_iter().map(JsonInt).collect())
        .collect()
}

/// Evaluated module in JSON; `relations` lists relation vectors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleJson {
    pub spec: String,
    pub rank: usize,
    pub basis: Vec<String>,
    pub relations: Vec<Vec<JsonInt>>,
    pub stab: Vec<usize>,
}

fn labels_len(spec: &ModuleSpec, r: usize) -> usize {
    match spec {
        ModuleSpec::Const(g) => g.num_generators(),
        ModuleSpec::Std | ModuleSpec::Dual => r,
        ModuleSpec::Tensor(a, b) | ModuleSpec::Hom(a, b) => labels_len(a, r) * labels_len(b, r),
        ModuleSpec::Sum(a, b) => labels_len(a, r) + labels_len(b, r),
        ModuleSpec::Ext(t, a) => combinations(labels_len(a, r), *t).len(),
        ModuleSpec::Lie(n) => lyndon_basis(r, *n).len(),
    }
}

fn labels(spec: &ModuleSpec, r: usize) -> Vec<String> {
    match spec {
        ModuleSpec::Const(g) => (1..=g.num_generators()).map(|i| format!("g{i}")).collect(),
        ModuleSpec::Std => (1..=r).map(|i| format!("e{i}")).collect(),
        ModuleSpec::Dual => (1..=r).map(|i| format!("e{i}*")).collect(),
        ModuleSpec::Tensor(a, b) => {
            let (la, lb) = (labels(a, r), labels(b, r));
            la.iter()
                .flat_map(|x| lb.iter().map(move |y| format!("{x}⊗{y}")))
                .collect()
        }
        ModuleSpec::Hom(a, b) => {
            let (la, lb) = (labels(a, r), labels(b, r));
            lb.iter()
                .flat_map(|y| la.iter().map(move |x| format!("({x}→{y})")))
                .collect()
        }
        ModuleSpec::Sum(a, b) => {
            let mut out: Vec<String> = labels(a, r).into_iter().map(|x| format!("1:{x}")).collect();
            out.extend(labels(b, r).into_iter().map(|y| format!("2:{y}")));
            out
        }
        ModuleSpec::Ext(t, a) => {
            let la = labels(a, r);
            if *t == 0 {
                return vec!["1".into()];
            }
            combinations(la.len(), *t)
                .into_iter()
                .map(|c| c.iter().map(|&i| la[i].as_str()).collect::<Vec<_>>().join("∧"))
                .collect()
        }
        ModuleSpec::Lie(n) => lyndon_basis(r, *n)
            .into_iter()
            .map(|w| format!("[{w}]"))
            .collect(),
    }
}

/// Strictly increasing `t`-tuples from `0..n` in lexicographic order.
fn combinations(n: usize, t: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if t > n {
        return out;
    }
    let mut c: Vec<usize> = (0..t).collect();
    loop {
        out.push(c.clone());
        let Some(i) = (0..t).rev().find(|&i| c[i] != i + n - t) else {
            return out;
        };
        c[i] += 1;
        for j in i + 1..t {
            c[j] = c[j - 1] + 1;
        }
    }
}

fn relations(spec: &ModuleSpec, r: usize) -> Result<IntMatrix> {
    Ok(match spec {
        ModuleSpec::Const(g) => {
            let k = g.num_generators();
            let columns: Vec<Vec<BigInt>> = g
                .invariant_factors
                .iter()
                .enumerate()
                .map(|(i, d)| {
                    let mut v = vec![BigInt::zero(); k];
                    v[g.free_rank + i] = d.clone();
                    v
                })
                .collect();
            IntMatrix::from_columns(k, &columns)
        }
        ModuleSpec::Std | ModuleSpec::Dual | ModuleSpec::Lie(_) => IntMatrix::zeros(labels_len(spec, r), 0),
        ModuleSpec::Tensor(a, b) => {
            let (ra, rb) = (relations(a, r)?, relations(b, r)?);
            let left = ra.kron(&IntMatrix::identity(rb.rows()));
            let right = IntMatrix::identity(ra.rows()).kron(&rb);
            left.hconcat(&right)?
        }
        ModuleSpec::Sum(a, b) => relations(a, r)?.block_diag(&relations(b, r)?),
        ModuleSpec::Ext(t, a) => {
            let ra = relations(a, r)?;
            match t {
                0 => IntMatrix::zeros(1, 0),
                1 => ra,
                _ if ra.cols() == 0 => IntMatrix::zeros(labels_len(spec, r), 0),
                _ => return Err(Error::Unsupported("exterior powers of modules with torsion".into())),
            }
        }
        ModuleSpec::Hom(a, b) => {
            let (ra, rb) = (relations(a, r)?, relations(b, r)?);
            if ra.cols() > 0 {
                return Err(Error::Unsupported("Hom out of a module with torsion".into()));
            }
            rb.kron(&IntMatrix::identity(ra.rows()))
        }
    })
}

fn action(spec: &ModuleSpec, a: &IntMatrix, a_inv: &IntMatrix) -> Result<IntMatrix> {
    Ok(match spec {
        ModuleSpec::Const(g) => IntMatrix::identity(g.num_generators()),
        ModuleSpec::Std => a.clone(),
        ModuleSpec::Dual => a_inv.transpose(),
        ModuleSpec::Tensor(x, y) => action(x, a, a_inv)?.kron(&action(y, a, a_inv)?),
        ModuleSpec::Sum(x, y) => action(x, a, a_inv)?.block_diag(&action(y, a, a_inv)?),
        ModuleSpec::Hom(x, y) => {
            // f -> ρ_y(A) f ρ_x(A)^-1, with f flattened row by row
            let target = action(y, a, a_inv)?;
            let source_inv = action(x, a_inv, a)?;
            target.kron(&source_inv.transpose())
        }
        ModuleSpec::Ext(t, x) => {
            let m = action(x, a, a_inv)?;
            let combos = combinations(m.rows(), *t);
            let mut out = IntMatrix::zeros(combos.len(), combos.len());
            for (i, rows) in combos.iter().enumerate() {
                for (j, cols) in combos.iter().enumerate() {
                    out[(i, j)] = if *t == 0 { BigInt::one() } else { m.minor(rows, cols) };
                }
            }
            out
        }
        ModuleSpec::Lie(n) => lie_layer_matrix(a, *n)?,
    })
}

fn stab_map(spec: &ModuleSpec, r: usize) -> Vec<usize> {
    match spec {
        ModuleSpec::Const(g) => (0..g.num_generators()).collect(),
        ModuleSpec::Std | ModuleSpec::Dual => (0..r).collect(),
        ModuleSpec::Tensor(x, y) | ModuleSpec::Hom(y, x) => {
            // Tensor is indexed (x, y); Hom(source, target) is indexed (target, source)
            let (sx, sy) = (stab_map(x, r), stab_map(y, r));
            let ny = labels_len(y, r + 1);
            sx.iter()
                .flat_map(|&i| sy.iter().map(move |&j| i * ny + j))
                .collect()
        }
        ModuleSpec::Sum(x, y) => {
            let nx = labels_len(x, r + 1);
            let mut out = stab_map(x, r);
            out.extend(stab_map(y, r).into_iter().map(|j| nx + j));
            out
        }
        ModuleSpec::Ext(t, x) => {
            let sx = stab_map(x, r);
            let index: HashMap<Vec<usize>, usize> = combinations(labels_len(x, r + 1), *t)
                .into_iter()
                .enumerate()
                .map(|(i, c)| (c, i))
                .collect();
            combinations(sx.len(), *t)
                .into_iter()
                .map(|c| index[&c.iter().map(|&i| sx[i]).collect::<Vec<_>>()])
                .collect()
        }
        ModuleSpec::Lie(n) => {
            let index: HashMap<_, usize> = lyndon_basis(r + 1, *n)
                .into_iter()
                .enumerate()
                .map(|(i, w)| (w, i))
                .collect();
            lyndon_basis(r, *n).iter().map(|w| index[w]).collect()
        }
    }
}

/// The action of an automorphism of `N_r^c` through its abelianization.
pub fn restrict_action(spec: &ModuleSpec, e: &Endo) -> Result<IntMatrix> {
    let a = e.abelianization_matrix();
    if !a.is_unimodular() {
        return Err(Error::NotInvertible(format!("{e:?} is not an automorphism")));
    }
    eval_module(spec, e.rank())?.action(&a)
}

/// `Λ^t Hom(Z^•, Lie^{c+1}) ⊗ M`, the homology of the free abelian kernel with coefficients in `M`.
pub fn kernel_homology_module(c: usize, t: usize, m: &ModuleSpec) -> Result<ModuleSpec> {
    if c == 0 {
        return Err(Error::InvalidArgument("class must be at least 1".into()));
    }
    Ok(ModuleSpec::tensor(
        ModuleSpec::ext(t, ModuleSpec::hom(ModuleSpec::Std, ModuleSpec::Lie(c + 1))),
        m.clone(),
    ))
}
