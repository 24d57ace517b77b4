//! Brute-force oracles shared by the integration tests. Nothing here calls
//! into the library's arithmetic; conversions only read its data.
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use nilstab::{GroupElement, IntMatrix, LieElement, TruncatedSeries};

pub fn big(x: &BigInt) -> i128 {
    x.to_i128().expect("oracle values fit in i128")
}

pub fn mat(rows: &[Vec<i128>]) -> IntMatrix {
    let cols = rows.first().map_or(0, Vec::len);
    IntMatrix::from_big_rows(
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect(),
        cols,
    )
    .unwrap()
}

pub fn rows_of(m: &IntMatrix) -> Vec<Vec<i128>> {
    m.to_rows().iter().map(|r| r.iter().map(big).collect()).collect()
}

// ---- number theory and words ----

pub fn trial_mobius(mut n: u64) -> i64 {
    let mut sign = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

pub fn brute_witt(r: u64, n: u64) -> i128 {
    let mut total: i128 = 0;
    for d in 1..=n {
        if n % d == 0 {
            total += trial_mobius(d) as i128 * (r as i128).pow((n / d) as u32);
        }
    }
    assert_eq!(total % n as i128, 0);
    total / n as i128
}

/// Every word of length `n`, in lexicographic order.
pub fn all_words(r: usize, n: usize) -> Vec<Vec<u8>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..r as u8).map(move |l| {
                    let mut w = w.clone();
                    w.push(l);
                    w
                })
            })
            .collect();
    }
    out
}

/// Strictly smaller than all proper rotations.
pub fn rotation_minimal(w: &[u8]) -> bool {
    (1..w.len()).all(|k| {
        let mut rot = w[k..].to_vec();
        rot.extend_from_slice(&w[..k]);
        w < rot.as_slice()
    })
}

pub fn brute_lyndon(r: usize, n: usize) -> Vec<Vec<u8>> {
    all_words(r, n).into_iter().filter(|w| rotation_minimal(w)).collect()
}

/// `w = uv` with `v` the longest proper suffix that is rotation-minimal.
pub fn brute_factorization(w: &[u8]) -> (Vec<u8>, Vec<u8>) {
    let k = (1..w.len()).find(|&k| rotation_minimal(&w[k..])).expect("length >= 2");
    (w[..k].to_vec(), w[k..].to_vec())
}

pub fn word_of(text: &str) -> Vec<u8> {
    text.bytes().map(|b| b - b'a').collect()
}

// ---- truncated noncommutative polynomials ----

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NcPoly {
    pub r: usize,
    pub c: usize,
    pub terms: BTreeMap<Vec<u8>, i128>,
}

impl NcPoly {
    pub fn zero(r: usize, c: usize) -> Self {
        NcPoly { r, c, terms: BTreeMap::new() }
    }

    pub fn constant(r: usize, c: usize, k: i128) -> Self {
        let mut p = Self::zero(r, c);
        p.add_term(vec![], k);
        p
    }

    pub fn one(r: usize, c: usize) -> Self {
        Self::constant(r, c, 1)
    }

    pub fn letter(r: usize, c: usize, i: usize) -> Self {
        let mut p = Self::zero(r, c);
        p.add_term(vec![i as u8], 1);
        p
    }

    pub fn add_term(&mut self, w: Vec<u8>, k: i128) {
        if w.len() > self.c || k == 0 {
            return;
        }
        let e = self.terms.entry(w.clone()).or_insert(0);
        *e += k;
        if *e == 0 {
            self.terms.remove(&w);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut p = self.clone();
        for (w, &k) in &o.terms {
            p.add_term(w.clone(), k);
        }
        p
    }

    pub fn scale(&self, k: i128) -> Self {
        let mut p = Self::zero(self.r, self.c);
        for (w, &x) in &self.terms {
            p.add_term(w.clone(), x * k);
        }
        p
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(-1))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut p = Self::zero(self.r, self.c);
        for (u, &a) in &self.terms {
            for (v, &b) in &o.terms {
                if u.len() + v.len() <= self.c {
                    let mut w = u.clone();
                    w.extend_from_slice(v);
                    p.add_term(w, a * b);
                }
            }
        }
        p
    }

    pub fn constant_term(&self) -> i128 {
        self.terms.get(&vec![]).copied().unwrap_or(0)
    }

    /// Inverse of a series with constant term ±1, by the geometric series.
    pub fn unit_inverse(&self) -> Self {
        let e = self.constant_term();
        assert!(e == 1 || e == -1);
        // self = e (1 + y)  =>  self^-1 = e (1 - y + y^2 - ...)
        let y = self.scale(e).sub(&Self::one(self.r, self.c));
        let mut out = Self::one(self.r, self.c);
        let mut term = Self::one(self.r, self.c);
        for _ in 0..self.c {
            term = term.mul(&y).scale(-1);
            out = out.add(&term);
        }
        out.scale(e)
    }

    pub fn pow(&self, e: i128) -> Self {
        let base = if e < 0 { self.unit_inverse() } else { self.clone() };
        let mut out = Self::one(self.r, self.c);
        for _ in 0..e.abs() {
            out = out.mul(&base);
        }
        out
    }

    /// `g^-1 h^-1 g h`.
    pub fn group_comm(&self, o: &Self) -> Self {
        self.unit_inverse().mul(&o.unit_inverse()).mul(self).mul(o)
    }

    pub fn ring_comm(&self, o: &Self) -> Self {
        self.mul(o).sub(&o.mul(self))
    }

    /// Ring endomorphism `X_i -> sum_j a[j][i] X_j`.
    pub fn linear_substitute(&self, a: &[Vec<i128>]) -> Self {
        let images: Vec<Self> = (0..self.r)
            .map(|i| {
                let mut p = Self::zero(self.r, self.c);
                for (j, row) in a.iter().enumerate() {
                    p.add_term(vec![j as u8], row[i]);
                }
                p
            })
            .collect();
        self.substitute(&images)
    }

    /// Ring endomorphism `X_i -> images[i]`; images must have no constant term.
    pub fn substitute(&self, images: &[Self]) -> Self {
        let mut out = Self::zero(self.r, self.c);
        for (w, &k) in &self.terms {
            let mut p = Self::constant(self.r, self.c, k);
            for &l in w {
                p = p.mul(&images[l as usize]);
            }
            out = out.add(&p);
        }
        out
    }

    /// Magnus series of a free group word given as `(letter, ±1)` pairs.
    pub fn of_word(r: usize, c: usize, word: &[(usize, i8)]) -> Self {
        let mut p = Self::one(r, c);
        for &(l, e) in word {
            let x = Self::one(r, c).add(&Self::letter(r, c, l));
            p = p.mul(&if e > 0 { x } else { x.unit_inverse() });
        }
        p
    }
}

pub fn poly_of_series(s: &TruncatedSeries) -> NcPoly {
    let mut p = NcPoly::zero(s.rank(), s.class());
    for (w, k) in s.terms() {
        p.add_term(w, big(k));
    }
    p
}

/// Lie polynomial of a Lyndon word: `P_w = P_u P_v - P_v P_u` along the brute-force factorization.
pub fn envelope(r: usize, c: usize, w: &[u8]) -> NcPoly {
    if w.len() == 1 {
        return NcPoly::letter(r, c, w[0] as usize);
    }
    let (u, v) = brute_factorization(w);
    envelope(r, c, &u).ring_comm(&envelope(r, c, &v))
}

pub fn expand_lie(x: &LieElement) -> NcPoly {
    let mut p = NcPoly::zero(x.rank(), x.class());
    for (w, k) in x.terms() {
        p = p.add(&envelope(x.rank(), x.class(), w.letters()).scale(big(k)));
    }
    p
}

/// Polynomial of a degree-`n` layer given in Lyndon coordinates.
pub fn layer_poly(r: usize, c: usize, n: usize, coords: &[BigInt]) -> NcPoly {
    let basis = brute_lyndon(r, n);
    assert_eq!(basis.len(), coords.len());
    let mut p = NcPoly::zero(r, c);
    for (w, k) in basis.iter().zip(coords) {
        p = p.add(&envelope(r, c, w).scale(big(k)));
    }
    p
}

/// Expected `Lie(g) ∘ β ∘ g^-1` on generator `i`, computed by substitution.
pub fn oracle_hom_action(beta: &IntMatrix, g: &[Vec<i128>], class: usize, i: usize) -> NcPoly {
    let r = g.len();
    let g_inv = unimodular_inverse(g);
    let mut p = NcPoly::zero(r, class);
    for j in 0..r {
        p = p.add(&layer_poly(r, class, class, &beta.column(j)).scale(g_inv[j][i]));
    }
    p.linear_substitute(g)
}

/// Magnus images of basic commutators, built from brute-force Lyndon words and group commutators.
pub struct MagnusOracle {
    pub r: usize,
    pub c: usize,
    pub basis: Vec<Vec<u8>>,
    pub series: BTreeMap<Vec<u8>, NcPoly>,
}

impl MagnusOracle {
    pub fn new(r: usize, c: usize) -> Self {
        let basis: Vec<Vec<u8>> = (1..=c).flat_map(|n| brute_lyndon(r, n)).collect();
        let mut series: BTreeMap<Vec<u8>, NcPoly> = BTreeMap::new();
        for w in &basis {
            let s = if w.len() == 1 {
                NcPoly::one(r, c).add(&NcPoly::letter(r, c, w[0] as usize))
            } else {
                let (u, v) = brute_factorization(w);
                series[&u].group_comm(&series[&v])
            };
            series.insert(w.clone(), s);
        }
        MagnusOracle { r, c, basis, series }
    }

    /// `prod_w M(b_w)^(e_w)` in degree-then-lexicographic order.
    pub fn element(&self, exps: &BTreeMap<Vec<u8>, i128>) -> NcPoly {
        let mut p = NcPoly::one(self.r, self.c);
        for w in &self.basis {
            if let Some(&e) = exps.get(w) {
                if e != 0 {
                    p = p.mul(&self.series[w].pow(e));
                }
            }
        }
        p
    }

    pub fn of(&self, g: &GroupElement) -> NcPoly {
        let exps = g
            .exponent_map()
            .into_iter()
            .map(|(w, e)| (w.letters().to_vec(), big(&e)))
            .collect();
        self.element(&exps)
    }
}

// ---- integer linear algebra ----

fn egcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    if b.is_zero() {
        (a.abs(), a.signum(), BigInt::zero())
    } else {
        let (g, x, y) = egcd(b, &a.mod_floor(b));
        let q = a.div_floor(b);
        (g, y.clone(), x - q * y)
    }
}

/// Like `egcd`, but a pivot dividing `b` keeps itself, so the other line is cleared without feedback.
fn bezout(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    if !a.is_zero() && (b % a).is_zero() {
        (a.clone(), BigInt::one(), BigInt::zero())
    } else {
        egcd(a, b)
    }
}

/// Cokernel of `m` (columns are relations) as (free rank, invariant factors > 1),
/// by Bezout transforms on a first-found pivot.
pub fn oracle_cokernel(m: &[Vec<i128>], rows: usize) -> (usize, Vec<i128>) {
    let cols = m.first().map_or(0, Vec::len);
    let mut a: Vec<Vec<BigInt>> = m.iter().map(|row| row.iter().map(|&x| BigInt::from(x)).collect()).collect();
    if a.is_empty() {
        a = vec![vec![]; rows];
    }
    let mut diag: Vec<BigInt> = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pi, pj)) = (t..rows)
            .flat_map(|i| (t..cols).map(move |j| (i, j)))
            .find(|&(i, j)| !a[i][j].is_zero())
        else {
            break;
        };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut changed = false;
            for i in t + 1..rows {
                if !a[i][t].is_zero() {
                    let (g, x, y) = bezout(&a[t][t], &a[i][t]);
                    let (p, q) = (&a[t][t] / &g, &a[i][t] / &g);
                    for j in 0..cols {
                        let (u, v) = (a[t][j].clone(), a[i][j].clone());
                        a[t][j] = &x * &u + &y * &v;
                        a[i][j] = -&q * u + &p * v;
                    }
                    changed = true;
                }
            }
            for j in t + 1..cols {
                if !a[t][j].is_zero() {
                    let (g, x, y) = bezout(&a[t][t], &a[t][j]);
                    let (p, q) = (&a[t][t] / &g, &a[t][j] / &g);
                    for row in a.iter_mut() {
                        let (u, v) = (row[t].clone(), row[j].clone());
                        row[t] = &x * &u + &y * &v;
                        row[j] = -&q * u + &p * v;
                    }
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    let free = rows - diag.len();
    // turn the diagonal into a divisibility chain
    for i in 0..diag.len() {
        for j in i + 1..diag.len() {
            let g = diag[i].gcd(&diag[j]);
            let l = &diag[i] / &g * &diag[j];
            diag[i] = g;
            diag[j] = l;
        }
    }
    let one = BigInt::one();
    (free, diag.iter().filter(|&d| *d > one).map(big).collect())
}

/// Cokernel presented by the columns `(g - I) e_j` for every matrix `g`.
pub fn oracle_coinvariants(gens: &[Vec<Vec<i128>>], k: usize) -> (usize, Vec<i128>) {
    let mut m: Vec<Vec<i128>> = vec![vec![]; k];
    for g in gens {
        for j in 0..k {
            for i in 0..k {
                m[i].push(g[i][j] - if i == j { 1 } else { 0 });
            }
        }
    }
    oracle_cokernel(&m, k)
}

pub fn det(a: &[Vec<i128>]) -> i128 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    // cofactor expansion along the first row
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<i128>> = a[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &x)| x).collect())
                .collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * a[0][j] * det(&minor)
        })
        .sum()
}

pub fn mat_mul(a: &[Vec<i128>], b: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let (n, m, p) = (a.len(), b.len(), b.first().map_or(0, Vec::len));
    (0..n)
        .map(|i| (0..p).map(|j| (0..m).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

pub fn identity(n: usize) -> Vec<Vec<i128>> {
    (0..n).map(|i| (0..n).map(|j| (i == j) as i128).collect()).collect()
}

pub fn elementary(n: usize, i: usize, j: usize, k: i128) -> Vec<Vec<i128>> {
    let mut m = identity(n);
    m[i][j] = k;
    m
}

/// Unimodular inverse through the adjugate.
pub fn unimodular_inverse(a: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let n = a.len();
    let d = det(a);
    assert!(d == 1 || d == -1);
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    // cofactor (j, i)
                    let minor: Vec<Vec<i128>> = (0..n)
                        .filter(|&r| r != j)
                        .map(|r| (0..n).filter(|&c| c != i).map(|c| a[r][c]).collect())
                        .collect();
                    let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                    sign * det(&minor) * d
                })
                .collect()
        })
        .collect()
}
