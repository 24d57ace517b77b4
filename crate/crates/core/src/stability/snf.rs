//! Smith normal form over the integers and finitely generated abelian groups.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::json::JsonInt;
use crate::matrix::IntMatrix;

/// `U * A * V = D`, with `D` diagonal and its diagonal a nonnegative divisibility chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SnfResult {
    /// The diagonal of `D`, trailing zeros included up to `min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        let n = self.d.rows().min(self.d.cols());
        (0..n).map(|i| self.d[(i, i)].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }
}

pub fn snf(a: &IntMatrix) -> SnfResult {
    let mut work = Reduction::new(a.clone(), true, true);
    work.run();
    SnfResult {
        u: work.u.expect("tracked"),
        d: work.a,
        v: work.v.expect("tracked"),
    }
}

/// Diagonal entries of the Smith form only.
pub fn invariant_factors(a: &IntMatrix) -> Vec<BigInt> {
    let mut work = Reduction::new(a.clone(), false, false);
    work.run();
    let n = work.a.rows().min(work.a.cols());
    (0..n).map(|i| work.a[(i, i)].clone()).collect()
}

struct Reduction {
    a: IntMatrix,
    u: Option<IntMatrix>,
    v: Option<IntMatrix>,
}

impl Reduction {
    fn new(a: IntMatrix, track_u: bool, track_v: bool) -> Self {
        let u = track_u.then(|| IntMatrix::identity(a.rows()));
        let v = track_v.then(|| IntMatrix::identity(a.cols()));
        Reduction { a, u, v }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i != j {
            self.a.swap_rows(i, j);
            if let Some(u) = &mut self.u {
                u.swap_rows(i, j);
            }
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i != j {
            self.a.swap_cols(i, j);
            if let Some(v) = &mut self.v {
                v.swap_cols(i, j);
            }
        }
    }

    fn add_row(&mut self, target: usize, source: usize, k: &BigInt) {
        self.a.add_row_multiple(target, source, k);
        if let Some(u) = &mut self.u {
            u.add_row_multiple(target, source, k);
        }
    }

    fn add_col(&mut self, target: usize, source: usize, k: &BigInt) {
        self.a.add_col_multiple(target, source, k);
        if let Some(v) = &mut self.v {
            v.add_col_multiple(target, source, k);
        }
    }

    fn negate_row(&mut self, i: usize) {
        self.a.negate_row(i);
        if let Some(u) = &mut self.u {
            u.negate_row(i);
        }
    }

    /// Position of the smallest nonzero entry in the trailing block.
    fn smallest(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, BigInt)> = None;
        for i in t..self.a.rows() {
            for j in t..self.a.cols() {
                let x = &self.a[(i, j)];
                if x.is_zero() {
                    continue;
                }
                let m = x.abs();
                if best.as_ref().is_none_or(|b| m < b.2) {
                    let unit = m.is_one();
                    best = Some((i, j, m));
                    if unit {
                        let b = best.unwrap();
                        return Some((b.0, b.1));
                    }
                }
            }
        }
        best.map(|b| (b.0, b.1))
    }

    fn run(&mut self) {
        let (rows, cols) = self.a.shape();
        for t in 0..rows.min(cols) {
            let Some((i, j)) = self.smallest(t) else { break };
            self.swap_rows(t, i);
            self.swap_cols(t, j);
            loop {
                // column t, then row t
                let mut dirty = false;
                for i in t + 1..rows {
                    if self.a[(i, t)].is_zero() {
                        continue;
                    }
                    let q = self.a[(i, t)].div_floor(&self.a[(t, t)]);
                    self.add_row(i, t, &-q);
                    dirty |= !self.a[(i, t)].is_zero();
                }
                for j in t + 1..cols {
                    if self.a[(t, j)].is_zero() {
                        continue;
                    }
                    let q = self.a[(t, j)].div_floor(&self.a[(t, t)]);
                    self.add_col(j, t, &-q);
                    dirty |= !self.a[(t, j)].is_zero();
                }
                if dirty {
                    let (i, j) = self.smallest_in_cross(t);
                    self.swap_rows(t, i);
                    self.swap_cols(t, j);
                    continue;
                }
                // the pivot must divide the rest of the block
                let p = self.a[(t, t)].clone();
                let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !self.a[(i, j)].is_multiple_of(&p)));
                match bad {
                    Some(i) => self.add_row(t, i, &BigInt::one()),
                    None => break,
                }
            }
            if self.a[(t, t)].is_negative() {
                self.negate_row(t);
            }
        }
    }

    /// Smallest nonzero entry in row `t` or column `t`.
    fn smallest_in_cross(&self, t: usize) -> (usize, usize) {
        let mut best = (t, t, self.a[(t, t)].abs());
        for i in t + 1..self.a.rows() {
            let x = self.a[(i, t)].abs();
            if !x.is_zero() && x < best.2 {
                best = (i, t, x);
            }
        }
        for j in t + 1..self.a.cols() {
            let x = self.a[(t, j)].abs();
            if !x.is_zero() && x < best.2 {
                best = (t, j, x);
            }
        }
        (best.0, best.1)
    }
}

/// A finitely generated abelian group `Z^free_rank + Z/d_1 + ... + Z/d_k`, with `1 < d_1 | d_2 | ...`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct FinAbPresentation {
    pub free_rank: usize,
    pub invariant_factors: Vec<BigInt>,
}

impl FinAbPresentation {
    pub fn free(rank: usize) -> Self {
        FinAbPresentation {
            free_rank: rank,
            invariant_factors: Vec::new(),
        }
    }

    /// Canonical form of an arbitrary list of cyclic orders (0 meaning infinite cyclic).
    pub fn from_cyclic_orders(orders: &[BigInt]) -> Self {
        let m = IntMatrix::from_fn(orders.len(), orders.len(), |i, j| {
            if i == j {
                orders[i].clone()
            } else {
                BigInt::zero()
            }
        });
        cokernel(&m)
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.invariant_factors.is_empty()
    }

    /// Number of cyclic summands.
    pub fn num_generators(&self) -> usize {
        self.free_rank + self.invariant_factors.len()
    }
}

impl fmt::Display for FinAbPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            n => parts.push(format!("Z^{n}")),
        }
        parts.extend(self.invariant_factors.iter().map(|d| format!("Z/{d}")));
        write!(f, "{}", parts.join(" + "))
    }
}

/// `{free_rank, invariant_factors}` in JSON.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinAbJson {
    pub free_rank: usize,
    pub invariant_factors: Vec<JsonInt>,
}

impl From<&FinAbPresentation> for FinAbJson {
    fn from(p: &FinAbPresentation) -> Self {
        FinAbJson {
            free_rank: p.free_rank,
            invariant_factors: p.invariant_factors.iter().map(JsonInt::from).collect(),
        }
    }
}

/// The cokernel `Z^rows / (column span of relations)`.
pub fn cokernel(relations: &IntMatrix) -> FinAbPresentation {
    let k = relations.rows();
    let diag = invariant_factors(relations);
    let rank = diag.iter().filter(|x| !x.is_zero()).count();
    FinAbPresentation {
        free_rank: k - rank,
        invariant_factors: diag.into_iter().filter(|x| x > &BigInt::one()).collect(),
    }
}
