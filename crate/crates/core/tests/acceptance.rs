//! Acceptance criteria 1 to 7. Runs without the test harness so that every
//! criterion prints one PASS or FAIL line; exits nonzero if any fails.
//!
//! Replay the random seeds of criterion 7 with `NILSTAB_SEEDS=a,b,c`.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nilstab::aut::kernel_rank;
use nilstab::glmod::restrict_action;
use nilstab::nilgroup::{h1_rank, h2_rank};
use nilstab::stability::{aut_generators, coinvariants, cokernel, gl_generators};
use nilstab::verify::{random_automorphism, random_gl, random_hom_map, random_kernel_element, random_lie_element, run_suite};
use nilstab::{
    eval_module, lie_apply_matrix, lyndon_basis, snf, stability_scan, witt_rank, Endo, FinAbPresentation,
    FreeNilpotentGroup, HomMap, IntMatrix, ModuleSpec,
};

const FIXED_SEED: u64 = 0x5eed_2024;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn run(f: impl FnOnce() -> Outcome) -> (Outcome, Duration) {
    let start = Instant::now();
    let out = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(out) => out,
        Err(p) => Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into())),
    };
    (out, start.elapsed())
}

fn within(out: Outcome, elapsed: Duration, limit: Option<Duration>) -> Outcome {
    let detail = out?;
    match limit {
        Some(limit) if elapsed > limit => Err(format!("{detail}; took {elapsed:.2?}, limit {limit:?}")),
        _ => Ok(detail),
    }
}

fn criterion_1() -> Outcome {
    for r in 1..=5usize {
        for n in 1..=6usize {
            let brute = brute_lyndon(r, n).len();
            let rank = witt_rank(r as u64, n as u64).map_err(|e| e.to_string())?;
            ensure!(rank == BigInt::from(brute), "witt_rank({r}, {n}) = {rank}, {brute} Lyndon words");
            ensure!(lyndon_basis(r, n).len() == brute, "lyndon_basis({r}, {n}) has the wrong length");
        }
    }
    let w2: Vec<BigInt> = (1..=6).map(|n| witt_rank(2, n).unwrap()).collect();
    ensure!(w2 == [2, 1, 2, 3, 6, 9].map(BigInt::from), "witt(2, 1..6) = {w2:?}");
    ensure!(witt_rank(3, 2).unwrap() == BigInt::from(3), "witt(3, 2)");
    ensure!(witt_rank(3, 3).unwrap() == BigInt::from(8), "witt(3, 3)");
    Ok("30 ranks equal Lyndon counts".into())
}

fn criterion_2(seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for r in 1..=4 {
        for c in 1..=4 {
            let g = FreeNilpotentGroup::new(r, c).map_err(|e| e.to_string())?;
            let oracle = MagnusOracle::new(r, c);
            let one = g.identity();
            for i in 0..100 {
                let (x, y, z) = (g.random_element(&mut rng, 3), g.random_element(&mut rng, 3), g.random_element(&mut rng, 3));
                let xy = x.mul(&y).unwrap();
                let xy_z = xy.mul(&z).unwrap();
                let x_yz = x.mul(&y.mul(&z).unwrap()).unwrap();
                let xi = x.inv();
                ensure!(xy_z == x_yz, "associativity fails at (r, c) = ({r}, {c}), triple {i}");
                ensure!(x.mul(&one).unwrap() == x && one.mul(&x).unwrap() == x, "identity fails at ({r}, {c}), triple {i}");
                ensure!(x.mul(&xi).unwrap().is_identity() && xi.mul(&x).unwrap().is_identity(), "inverse fails at ({r}, {c}), triple {i}");
                let (ox, oy, oz) = (oracle.of(&x), oracle.of(&y), oracle.of(&z));
                ensure!(oracle.of(&xy) == ox.mul(&oy), "x*y disagrees with the Magnus oracle at ({r}, {c}), triple {i}");
                ensure!(oracle.of(&xy_z) == ox.mul(&oy).mul(&oz), "(x*y)*z disagrees with the oracle at ({r}, {c}), triple {i}");
                ensure!(oracle.of(&xi) == ox.unit_inverse(), "x^-1 disagrees with the oracle at ({r}, {c}), triple {i}");
            }
        }
    }
    Ok(format!("1600 triples, seed {seed:#x}"))
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(FIXED_SEED);
    for r in 1..=4usize {
        for c in 1..=4usize {
            ensure!(h1_rank(r, c).unwrap() == r, "h1_rank({r}, {c})");
            let h2 = h2_rank(r, c).unwrap();
            ensure!(h2 == BigInt::from(brute_witt(r as u64, c as u64 + 1)), "h2_rank({r}, {c}) = {h2}");
            let g = FreeNilpotentGroup::new(r, c).unwrap();
            let mut kernel = 0i128;
            for w in g.basis() {
                let b = g.basic_commutator(w).unwrap();
                let in_kernel = c == 1 || b.truncate(c - 1).unwrap().is_identity();
                kernel += i128::from(in_kernel);
                ensure!(in_kernel == (w.degree() == c), "truncation kernel of N_{r}^{c} contains {w}");
                // rank one is abelian: the whole group is central
                let expected_center = if r == 1 { true } else { in_kernel };
                ensure!(b.center_test() == expected_center, "center_test({w}) in N_{r}^{c}");
            }
            ensure!(kernel == brute_witt(r as u64, c as u64), "kernel rank of N_{r}^{c} -> N_{r}^{} is {kernel}", c - 1);
            if r >= 2 {
                for _ in 0..10 {
                    let x = g.random_element(&mut rng, 2);
                    let in_kernel = c == 1 || x.truncate(c - 1).unwrap().is_identity();
                    ensure!(x.center_test() == in_kernel, "center_test disagrees with the truncation kernel on {x}");
                }
            }
        }
    }
    Ok("16 (r, c); center equals the truncation kernel for r >= 2, rank 1 is abelian".into())
}

/// A kernel element produced without `sharp`: `e ∘ lift(project(e))^-1`.
fn kernel_element(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Endo {
    let e = random_automorphism(rng, r, c, 5).unwrap();
    let back = e.project().unwrap().lift().unwrap().invert().unwrap();
    e.compose(&back).unwrap()
}

fn criterion_4(seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for r in 1..=3usize {
        for c in 2..=4usize {
            let expected = r as i128 * brute_witt(r as u64, c as u64);
            ensure!(kernel_rank(r, c).unwrap() == BigInt::from(expected), "kernel_rank({r}, {c})");
            let basis = HomMap::standard_basis(r, c).unwrap();
            ensure!(basis.len() as i128 == expected, "standard basis size at ({r}, {c})");
            let mut previous: Option<Endo> = None;
            for i in 0..50 {
                let k = kernel_element(&mut rng, r, c);
                ensure!(k.project().unwrap().is_identity(), "kernel element {i} does not project to the identity");
                let f = k.flat().map_err(|e| e.to_string())?;
                ensure!(f.sharp().unwrap() == k, "sharp(flat(k)) != k at ({r}, {c}), sample {i}");
                if let Some(p) = previous.replace(k.clone()) {
                    let sum = p.flat().unwrap().add(&f).unwrap();
                    ensure!(p.compose(&k).unwrap().flat().unwrap() == sum, "flat is not additive at ({r}, {c})");
                }
            }
            for i in 0..50 {
                let beta = random_hom_map(&mut rng, r, c, 5).unwrap();
                let s = beta.sharp().unwrap();
                ensure!(s.is_automorphism() && s.project().unwrap().is_identity(), "sharp leaves the kernel at ({r}, {c})");
                ensure!(s.flat().unwrap() == beta, "flat(sharp(b)) != b at ({r}, {c}), sample {i}");
            }
            for i in 0..20 {
                let phi = random_automorphism(&mut rng, r, c - 1, 5).unwrap();
                let lifted = phi.lift().unwrap();
                ensure!(lifted.is_automorphism(), "lift is not an automorphism at ({r}, {c})");
                ensure!(lifted.project().unwrap() == phi, "project(lift(phi)) != phi at ({r}, {c}), sample {i}");
            }
        }
    }
    Ok(format!("9 (r, c), seed {seed:#x}"))
}

fn criterion_5(seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for r in 1..=3usize {
        for c in 2..=4usize {
            for i in 0..20 {
                let alpha = random_kernel_element(&mut rng, r, c).unwrap();
                let flat = alpha.flat().unwrap();
                let e = random_automorphism(&mut rng, r, c, 5).unwrap();
                let conj = e.invert().unwrap().compose(&alpha.compose(&e).unwrap()).unwrap();
                let got = conj.flat().map_err(|err| err.to_string())?;
                let a = rows_of(&e.abelianization_matrix());
                let a_inv = unimodular_inverse(&a);
                for j in 0..r {
                    let lhs = layer_poly(r, c, c, &got.matrix().column(j));
                    ensure!(lhs == oracle_hom_action(flat.matrix(), &a_inv, c, j), "conjugation at ({r}, {c}), sample {i}, generator {j}");
                }
                ensure!(got == flat.act(&mat(&a_inv)).unwrap(), "library action disagrees at ({r}, {c}), sample {i}");
                // identity on H_1: products of kernel elements of lower classes
                let unipotent = random_automorphism(&mut rng, r, c, 0).unwrap();
                ensure!(unipotent.abelianization_matrix().is_identity(), "expected identity abelianization");
                let fixed = unipotent.invert().unwrap().compose(&alpha.compose(&unipotent).unwrap()).unwrap();
                ensure!(fixed.flat().unwrap() == flat, "IA conjugation moved a flat value at ({r}, {c}), sample {i}");
            }
        }
    }
    Ok(format!("180 conjugations plus 180 with identity abelianization, seed {seed:#x}"))
}

const SCAN_SPECS: [&str; 5] = ["const", "std", "dual", "std (x) dual", "hom(std, ext(2, dual))"];

fn criterion_6() -> Outcome {
    let mut stable = Vec::new();
    for s in SCAN_SPECS {
        let spec: ModuleSpec = s.parse().unwrap();
        for c in 1..=3 {
            let scan = stability_scan(&spec, c, 1, 5).map_err(|e| e.to_string())?;
            let from = scan.stabilized_from.ok_or(format!("{s} at c = {c} not stabilized in 1..5"))?;
            ensure!(from <= 4, "{s} at c = {c} stabilizes only from {from}");
            for e in &scan.entries {
                if e.r >= from && e.r < 5 {
                    ensure!(e.map_to_next_is_iso == Some(true), "{s}, c = {c}: map at r = {} is not an isomorphism", e.r);
                }
                let m = eval_module(&spec, e.r).unwrap();
                let gens: Vec<Vec<Vec<i128>>> = aut_generators(e.r, c)
                    .unwrap()
                    .iter()
                    .map(|g| rows_of(&restrict_action(&spec, g).unwrap()))
                    .collect();
                let (free, factors) = oracle_coinvariants(&gens, m.dim());
                ensure!(
                    e.value.free_rank == free && e.value.invariant_factors.iter().map(big).collect::<Vec<_>>() == factors,
                    "{s}, c = {c}, r = {}: {} but the oracle gives free rank {free}, factors {factors:?}",
                    e.r,
                    e.value
                );
            }
            if s == "std" {
                let z2 = FinAbPresentation::from_cyclic_orders(&[BigInt::from(2)]);
                let zero = FinAbPresentation::default();
                ensure!(scan.values() == [z2, zero.clone(), zero.clone(), zero.clone(), zero], "std values at c = {c}: {:?}", scan.values());
                // the middle group H_0(G_r; Z^(r+1)) is Z, so neither factor is an isomorphism
                for e in &scan.entries[1..4] {
                    ensure!(e.factor_maps_are_iso == Some((false, false)), "std factor maps at r = {}", e.r);
                }
            }
            stable.push(from);
        }
    }
    Ok(format!("15 scans stabilize, indices {stable:?}; composite maps are isomorphisms from there"))
}

fn module_suites(seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Lie ring: brackets expand to ring commutators, Jacobi, functoriality
    for (r, c) in [(2, 4), (3, 3), (4, 2)] {
        for _ in 0..5 {
            let (x, y, z) = (random_lie_element(&mut rng, r, c, 3), random_lie_element(&mut rng, r, c, 3), random_lie_element(&mut rng, r, c, 3));
            let xy = x.bracket(&y).unwrap();
            ensure!(expand_lie(&xy) == expand_lie(&x).ring_comm(&expand_lie(&y)), "bracket does not expand to a commutator");
            let direct = xy
                .bracket(&z)
                .unwrap()
                .add(&y.bracket(&z).unwrap().bracket(&x).unwrap())
                .unwrap()
                .add(&z.bracket(&x).unwrap().bracket(&y).unwrap())
                .unwrap();
            ensure!(direct.is_zero(), "Jacobi identity fails");
            let a = random_gl(&mut rng, r, 6);
            let image = lie_apply_matrix(&a, &x).unwrap();
            ensure!(expand_lie(&image) == expand_lie(&x).linear_substitute(&rows_of(&a)), "GL action is not substitution");
        }
    }
    // modules: multiplicativity and stab equivariance
    for s in ["std (x) dual", "ext(2, dual)", "hom(std, ext(2, dual))", "lie(3) (+) const(Z/2)", "ext(2, hom(std, lie(2)))"] {
        let spec: ModuleSpec = s.parse().unwrap();
        for r in 1..=3 {
            let m = eval_module(&spec, r).unwrap();
            let next = eval_module(&spec, r + 1).unwrap();
            for _ in 0..4 {
                let (a, b) = (random_gl(&mut rng, r, 6), random_gl(&mut rng, r, 6));
                ensure!(m.action(&(&a * &b)).unwrap() == &m.action(&a).unwrap() * &m.action(&b).unwrap(), "{s} is not multiplicative");
                ensure!(&m.stab() * &m.action(&a).unwrap() == &next.action(&a.stabilized()).unwrap() * &m.stab(), "{s}: stab is not equivariant");
            }
        }
    }
    // Smith normal form
    for _ in 0..20 {
        let (rows, cols) = (rng.gen_range(1..=12), rng.gen_range(1..=12));
        let a = IntMatrix::from_fn(rows, cols, |_, _| {
            if rng.gen_bool(0.3) {
                BigInt::from(rng.gen_range(-9..=9))
            } else {
                BigInt::zero()
            }
        });
        let s = snf(&a);
        ensure!(&(&s.u * &a) * &s.v == s.d, "U A V != D");
        ensure!(s.u.det().unwrap().abs().is_one() && s.v.det().unwrap().abs().is_one(), "U or V is not unimodular");
        let diag = s.diagonal();
        for w in diag.windows(2) {
            ensure!(if w[0].is_zero() { w[1].is_zero() } else { (&w[1] % &w[0]).is_zero() }, "no divisibility chain: {diag:?}");
        }
        let (free, factors) = oracle_cokernel(&rows_of(&a), rows);
        let got = cokernel(&a);
        ensure!(got.free_rank == free && got.invariant_factors.iter().map(big).collect::<Vec<_>>() == factors, "cokernel disagrees with the oracle");
    }
    // generating-set independence, with a randomly conjugated alternative set
    for r in 2..=4 {
        let g = random_gl(&mut rng, r, 5);
        let g_inv = g.inverse_unimodular().unwrap();
        let mut diag = identity(r);
        diag[0][0] = -1;
        let mut swap = identity(r);
        swap.swap(0, 1);
        let cycle: Vec<Vec<i128>> = (0..r).map(|i| (0..r).map(|j| i128::from(j == (i + 1) % r)).collect()).collect();
        let alt: Vec<IntMatrix> = [elementary(r, 0, 1, 1), cycle, swap, diag].iter().map(|x| &(&g_inv * &mat(x)) * &g).collect();
        for s in ["std", "dual", "std (x) dual", "hom(std, ext(2, dual))"] {
            let m = eval_module(&s.parse().unwrap(), r).unwrap();
            let standard: Vec<IntMatrix> = gl_generators(r).iter().map(|a| m.action(a).unwrap()).collect();
            let other: Vec<IntMatrix> = alt.iter().map(|a| m.action(a).unwrap()).collect();
            ensure!(coinvariants(&standard, m.dim()).unwrap() == coinvariants(&other, m.dim()).unwrap(), "{s} at r = {r} depends on the generating set");
        }
    }
    Ok(String::new())
}

fn library_suites(seed: u64) -> Outcome {
    for (r, c) in [(2, 2), (2, 4), (3, 3), (4, 3)] {
        let checks = run_suite(r, c, seed, 8).map_err(|e| e.to_string())?;
        if let Some(bad) = checks.iter().find(|x| !x.passed) {
            return Err(format!("{} at ({r}, {c}): {}", bad.name, bad.detail));
        }
    }
    Ok(String::new())
}

fn criterion_7(seeds: &[u64]) -> Outcome {
    for &seed in seeds {
        let tag = |e: String| format!("seed {seed:#x}: {e}");
        criterion_2(seed).map_err(tag)?;
        criterion_4(seed).map_err(tag)?;
        criterion_5(seed).map_err(tag)?;
        module_suites(seed).map_err(tag)?;
        library_suites(seed).map_err(tag)?;
    }
    let list: Vec<String> = seeds.iter().map(|s| format!("{s:#x}")).collect();
    Ok(format!(
        "seeded criteria and invariant suites pass for seeds [{}]; criteria 1, 3, 6 are seed independent; \
         stability in degree d >= 1 is not desk-reproducible and is not tested",
        list.join(", ")
    ))
}

fn random_seeds() -> Vec<u64> {
    if let Ok(text) = std::env::var("NILSTAB_SEEDS") {
        return text
            .split(',')
            .map(|s| {
                let s = s.trim();
                match s.strip_prefix("0x") {
                    Some(hex) => u64::from_str_radix(hex, 16),
                    None => s.parse(),
                }
                .expect("NILSTAB_SEEDS holds comma separated integers")
            })
            .collect();
    }
    (0..3).map(|_| rand::random()).collect()
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let seeds: Vec<u64> = std::iter::once(FIXED_SEED).chain(random_seeds()).collect();
    let criteria: Vec<(&str, Box<dyn FnOnce() -> Outcome>, Option<Duration>)> = vec![
        ("1 Witt tables", Box::new(criterion_1), Some(secs(1))),
        ("2 group law against the Magnus oracle", Box::new(|| criterion_2(FIXED_SEED)), Some(secs(60))),
        ("3 homology and center of N_r^c", Box::new(criterion_3), None),
        ("4 kernel of Aut(N_r^c) -> Aut(N_r^(c-1))", Box::new(|| criterion_4(FIXED_SEED)), None),
        ("5 conjugation acts through GL_r(Z)", Box::new(|| criterion_5(FIXED_SEED)), None),
        ("6 degree-0 stability scans", Box::new(criterion_6), Some(secs(300))),
        ("7 fixed and random seeds", Box::new(move || criterion_7(&seeds)), None),
    ];
    let mut failed = 0;
    for (name, f, limit) in criteria {
        let (out, elapsed) = run(f);
        match within(out, elapsed, limit) {
            Ok(detail) => println!("criterion {name}: PASS ({elapsed:.2?}) {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {name}: FAIL ({elapsed:.2?}) {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
