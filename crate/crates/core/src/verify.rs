//! Seeded self-checks of the Lie ring, group and automorphism layers at a fixed `(r, c)`.
//!
//! Each check is a property that must hold exactly; the suite reports every
//! check instead of stopping at the first failure.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::aut::{kernel_rank, Endo, HomMap};
use crate::error::{Error, Result};
use crate::lie::{lie_bracket, lyndon_basis, witt_rank, LieElement};
use crate::matrix::IntMatrix;
use crate::nilgroup::{FreeNilpotentGroup, GroupElement};
use crate::stability::gl_generators;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

/// Random element with coefficients in `-bound..=bound` on every basis word up to the class.
pub fn random_lie_element<R: Rng + ?Sized>(rng: &mut R, r: usize, c: usize, bound: i64) -> LieElement {
    let terms: Vec<_> = (1..=c)
        .flat_map(|n| lyndon_basis(r, n))
        .map(|w| (w, BigInt::from(rng.gen_range(-bound..=bound))))
        .collect();
    LieElement::from_terms(r, c, terms).expect("valid parameters")
}

/// Product of `steps` random generators from [`gl_generators`] and their inverses.
pub fn random_gl<R: Rng + ?Sized>(rng: &mut R, r: usize, steps: usize) -> IntMatrix {
    let gens = gl_generators(r);
    let mut a = IntMatrix::identity(r);
    for _ in 0..steps {
        let g = gens.choose(rng).expect("nonempty");
        let g = if rng.gen_bool(0.5) {
            g.clone()
        } else {
            g.inverse_unimodular().expect("unimodular")
        };
        a = &a * &g;
    }
    a
}

pub fn random_hom_map<R: Rng + ?Sized>(rng: &mut R, r: usize, c: usize, bound: i64) -> Result<HomMap> {
    let rows = witt_rank(r as u64, c as u64)?;
    let rows = usize::try_from(rows).map_err(|_| Error::InvalidArgument("layer too large".into()))?;
    let m = IntMatrix::from_fn(rows, r, |_, _| BigInt::from(rng.gen_range(-bound..=bound)));
    HomMap::new(r, c, m)
}

/// A random automorphism of `N_r^c`: a lifted product of at most `steps`
/// elementary generators, composed with kernel elements from every class level.
pub fn random_automorphism<R: Rng + ?Sized>(rng: &mut R, r: usize, c: usize, steps: usize) -> Result<Endo> {
    let base = FreeNilpotentGroup::new(r, 1)?;
    let n = rng.gen_range(0..=steps);
    let mut e = Endo::from_matrix(&base, &random_gl(rng, r, n))?.lift_to(c)?;
    for k in 2..=c {
        let beta = random_hom_map(rng, r, k, 1)?;
        e = e.compose(&beta.sharp()?.lift_to(c)?)?;
    }
    Ok(e)
}

/// A random element of the kernel of `Aut(N_r^c) -> Aut(N_r^{c-1})`.
pub fn random_kernel_element<R: Rng + ?Sized>(rng: &mut R, r: usize, c: usize) -> Result<Endo> {
    random_hom_map(rng, r, c, 3)?.sharp()
}

struct Suite {
    checks: Vec<Check>,
}

impl Suite {
    fn run(&mut self, name: &'static str, f: impl FnOnce() -> Result<Option<String>>) {
        let start = Instant::now();
        let (passed, detail) = match f() {
            Ok(None) => (true, String::new()),
            Ok(Some(why)) => (false, why),
            Err(e) => (false, format!("error: {e}")),
        };
        self.checks.push(Check {
            name,
            passed,
            detail,
            elapsed: start.elapsed(),
        });
    }
}

fn fail_if(cond: bool, detail: impl FnOnce() -> String) -> Option<String> {
    cond.then(detail)
}

/// Runs every check at `(r, c)` with `samples` random cases per property.
pub fn run_suite(r: usize, c: usize, seed: u64, samples: usize) -> Result<Vec<Check>> {
    let group = FreeNilpotentGroup::new(r, c)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut suite = Suite { checks: Vec::new() };

    suite.run("witt rank equals Lyndon count", || {
        for n in 1..=c {
            let count = lyndon_basis(r, n).len();
            if witt_rank(r as u64, n as u64)? != BigInt::from(count) {
                return Ok(Some(format!("degree {n}: {count} Lyndon words")));
            }
        }
        Ok(None)
    });

    let lie_samples: Vec<(LieElement, LieElement, LieElement)> = (0..samples)
        .map(|_| {
            (
                random_lie_element(&mut rng, r, c, 3),
                random_lie_element(&mut rng, r, c, 3),
                random_lie_element(&mut rng, r, c, 3),
            )
        })
        .collect();

    suite.run("bracket antisymmetry", || {
        for (x, y, _) in &lie_samples {
            let s = lie_bracket(x, y)?.add(&lie_bracket(y, x)?)?;
            if !s.is_zero() {
                return Ok(Some(format!("[x,y] + [y,x] = {s} for x = {x}, y = {y}")));
            }
        }
        Ok(None)
    });

    suite.run("Jacobi identity", || {
        for (x, y, z) in &lie_samples {
            let s = x
                .bracket(&y.bracket(z)?)?
                .add(&y.bracket(&z.bracket(x)?)?)?
                .add(&z.bracket(&x.bracket(y)?)?)?;
            if !s.is_zero() {
                return Ok(Some(format!("Jacobi sum {s}")));
            }
        }
        Ok(None)
    });

    suite.run("bracket grading", || {
        for (x, y, _) in &lie_samples {
            for m in 1..=c {
                for n in 1..=c {
                    let b = x.homogeneous_part(m).bracket(&y.homogeneous_part(n))?;
                    let ok = match b.homogeneous_degree() {
                        None => true,
                        Some(d) => d == m + n && m + n <= c,
                    };
                    if !ok {
                        return Ok(Some(format!("degrees {m} and {n} gave {b}")));
                    }
                }
            }
        }
        Ok(None)
    });

    suite.run("envelope intertwines brackets", || {
        for (x, y, _) in &lie_samples {
            let lhs = x.bracket(y)?.expand();
            let rhs = x.expand().ring_commutator(&y.expand());
            if lhs != rhs {
                return Ok(Some(format!("expansion of [{x}, {y}] differs from XY - YX")));
            }
        }
        Ok(None)
    });

    suite.run("GL functoriality on the Lie ring", || {
        for (x, y, _) in &lie_samples {
            let a = random_gl(&mut rng, r, 4);
            let b = random_gl(&mut rng, r, 4);
            let ab = &a * &b;
            if x.apply_matrix(&ab)? != x.apply_matrix(&b)?.apply_matrix(&a)? {
                return Ok(Some(format!("(AB)x != A(Bx) for A = {a}, B = {b}")));
            }
            if x.add(y)?.apply_matrix(&a)? != x.apply_matrix(&a)?.add(&y.apply_matrix(&a)?)? {
                return Ok(Some("A(x + y) != Ax + Ay".into()));
            }
            if x.bracket(y)?.apply_matrix(&a)? != x.apply_matrix(&a)?.bracket(&y.apply_matrix(&a)?)? {
                return Ok(Some("A[x, y] != [Ax, Ay]".into()));
            }
        }
        Ok(None)
    });

    let triples: Vec<[GroupElement; 3]> = (0..samples)
        .map(|_| std::array::from_fn(|_| group.random_element(&mut rng, 3)))
        .collect();

    suite.run("group axioms against the Magnus oracle", || {
        let e = group.identity();
        for [g, h, k] in &triples {
            let gh = g.mul(h)?;
            let oracle = group.peel(&(&g.magnus() * &h.magnus()))?;
            if gh != oracle {
                return Ok(Some(format!("{g} * {h}: collected {gh}, Magnus {oracle}")));
            }
            if gh.mul(k)? != g.mul(&h.mul(k)?)? {
                return Ok(Some(format!("associativity fails for {g}, {h}, {k}")));
            }
            if g.mul(&e)? != *g || e.mul(g)? != *g {
                return Ok(Some(format!("identity fails for {g}")));
            }
            let gi = g.inv();
            if !g.mul(&gi)?.is_identity() || !gi.mul(g)?.is_identity() {
                return Ok(Some(format!("inverse fails for {g}")));
            }
            let magnus_inv = group.peel(&g.magnus().inverse()?)?;
            if gi != magnus_inv {
                return Ok(Some(format!("inverse of {g}: collected {gi}, Magnus {magnus_inv}")));
            }
        }
        Ok(None)
    });

    suite.run("peel inverts embed", || {
        for [g, _, _] in &triples {
            if group.peel(&group.embed(g)?)? != *g {
                return Ok(Some(format!("round trip fails for {g}")));
            }
        }
        Ok(None)
    });

    suite.run("graded layers have Witt rank", || {
        for n in 1..=c {
            let len = group.degree_range(n).len();
            if BigInt::from(len) != witt_rank(r as u64, n as u64)? {
                return Ok(Some(format!("degree {n} has {len} basic commutators")));
            }
            for i in group.degree_range(n) {
                let b = group.basic_commutator(&group.basis()[i])?;
                if b.lcs_degree() != Some(n) {
                    return Ok(Some(format!("{b} is not in degree {n}")));
                }
            }
        }
        Ok(None)
    });

    suite.run("center is the last layer", || {
        if c < 2 {
            return Ok(fail_if(!group.generators().iter().all(GroupElement::center_test), || {
                "class 1 group is not abelian".into()
            }));
        }
        let mut kernel = 0;
        for w in group.basis() {
            let b = group.basic_commutator(w)?;
            let in_kernel = b.truncate(c - 1)?.is_identity();
            let in_last = w.degree() == c;
            if in_kernel != in_last {
                return Ok(Some(format!("truncation kernel disagrees at {w}")));
            }
            kernel += in_kernel as usize;
            if b.center_test() != (in_last || r == 1) {
                return Ok(Some(format!("center test disagrees at {w}")));
            }
        }
        if BigInt::from(kernel) != witt_rank(r as u64, c as u64)? {
            return Ok(Some(format!("truncation kernel has rank {kernel}")));
        }
        for [g, h, _] in &triples {
            let z = g.comm(h)?;
            let central = z.center_test();
            let last = z.lcs_degree().is_none_or(|d| d >= c);
            if central != (last || r == 1) {
                return Ok(Some(format!("center test disagrees at {z}")));
            }
        }
        Ok(None)
    });

    suite.run("nilpotency class is exact", || {
        let gens = group.generators();
        let expected = if r == 1 { 1 } else { c };
        // left-normed [x_1, x_2, x_2, ...] of each length
        let mut z = gens[0].clone();
        for len in 2..=c {
            z = z.comm(&gens[1 % r])?;
            if len <= expected && z.is_identity() {
                return Ok(Some(format!("{len}-fold commutator is trivial")));
            }
        }
        for [g, h, _] in &triples {
            let mut z = g.clone();
            for _ in 0..c {
                z = z.comm(h)?;
            }
            if !z.is_identity() {
                return Ok(Some(format!("{}-fold commutator {z} is nontrivial", c + 1)));
            }
        }
        Ok(None)
    });

    suite.run("abelianization is truncation to class 1", || {
        for [g, h, _] in &triples {
            let ab = |x: &GroupElement| x.truncate(1).map(|t| t.exponents().to_vec());
            let sum: Vec<BigInt> = ab(g)?.iter().zip(ab(h)?).map(|(a, b)| a + b).collect();
            if ab(&g.mul(h)?)? != sum {
                return Ok(Some(format!("truncation is not additive at {g}, {h}")));
            }
            if ab(&g.comm(h)?)?.iter().any(|x| !x.is_zero()) {
                return Ok(Some("commutator survives abelianization".into()));
            }
        }
        Ok(None)
    });

    if c >= 2 {
        suite.run("flat and sharp are inverse", || {
            for _ in 0..samples {
                let beta = random_hom_map(&mut rng, r, c, 3)?;
                if beta.sharp()?.flat()? != beta {
                    return Ok(Some("flat(sharp(β)) != β".into()));
                }
                let alpha = random_kernel_element(&mut rng, r, c)?;
                let gamma = random_kernel_element(&mut rng, r, c)?;
                let back = alpha.flat()?.sharp()?;
                if back != alpha {
                    return Ok(Some(format!("sharp(flat(α)) != α for {alpha:?}")));
                }
                if alpha.compose(&gamma)?.flat()? != alpha.flat()?.add(&gamma.flat()?)? {
                    return Ok(Some("flat is not a homomorphism".into()));
                }
            }
            let dim = HomMap::standard_basis(r, c)?.len();
            Ok(fail_if(BigInt::from(dim) != kernel_rank(r, c)?, || {
                format!("kernel basis has {dim} elements")
            }))
        });

        suite.run("project inverts lift", || {
            for _ in 0..samples {
                let phi = random_automorphism(&mut rng, r, c - 1, 5)?;
                let lifted = phi.lift()?;
                if lifted.project()? != phi || !lifted.is_automorphism() {
                    return Ok(Some(format!("project(lift(φ)) != φ for {phi:?}")));
                }
            }
            Ok(None)
        });

        suite.run("conjugation acts through GL", || {
            for _ in 0..samples {
                let e = random_automorphism(&mut rng, r, c, 4)?;
                let alpha = random_kernel_element(&mut rng, r, c)?;
                let conj = e.invert()?.compose(&alpha.compose(&e)?)?;
                let a_inv = e.abelianization_matrix().inverse_unimodular()?;
                let expected = alpha.flat()?.act(&a_inv)?;
                if conj.flat()? != expected {
                    return Ok(Some(format!("conjugating by {e:?} moved flat values off the GL orbit")));
                }
            }
            let beta = random_hom_map(&mut rng, r, c, 2)?;
            let kernel_conj = beta.sharp()?;
            let alpha = random_kernel_element(&mut rng, r, c)?;
            let conj = kernel_conj.invert()?.compose(&alpha.compose(&kernel_conj)?)?;
            Ok(fail_if(conj.flat()? != alpha.flat()?, || {
                "identity abelianization does not fix flat values".into()
            }))
        });
    }

    suite.run("automorphisms have two-sided inverses", || {
        for _ in 0..samples.min(10) {
            let e = random_automorphism(&mut rng, r, c, 5)?;
            let f = e.invert()?;
            if !e.compose(&f)?.is_identity() || !f.compose(&e)?.is_identity() {
                return Ok(Some(format!("invert failed for {e:?}")));
            }
        }
        let mut singular = IntMatrix::identity(r);
        singular[(0, 0)] = BigInt::from(2);
        let e = Endo::from_matrix(&group, &singular)?;
        Ok(fail_if(e.is_automorphism() || e.invert().is_ok(), || {
            "a determinant-2 endomorphism was accepted".into()
        }))
    });

    Ok(suite.checks)
}
