mod common;

use common::*;
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use nilstab::lie::{lyndon_basis_upto, LieElement, LyndonWord};
use nilstab::verify::{random_gl, random_lie_element};
use nilstab::{lie_apply_matrix, lie_bracket, lyndon_basis, mobius, witt_rank, Error, IntMatrix};

fn lie(r: usize, c: usize, terms: &[(&str, i64)]) -> LieElement {
    LieElement::from_terms(
        r,
        c,
        terms.iter().map(|(w, k)| (LyndonWord::parse(w).unwrap(), BigInt::from(*k))),
    )
    .unwrap()
}

#[test]
fn mobius_examples() {
    assert_eq!(mobius(1).unwrap(), 1);
    assert_eq!(mobius(6).unwrap(), 1);
    assert_eq!(mobius(12).unwrap(), 0);
    assert!(matches!(mobius(0), Err(Error::InvalidArgument(_))));
    for n in 1..500 {
        assert_eq!(mobius(n).unwrap(), trial_mobius(n), "mu({n})");
    }
}

#[test]
fn witt_examples() {
    for r in 1..8 {
        assert_eq!(witt_rank(r, 1).unwrap(), BigInt::from(r));
    }
    assert_eq!(witt_rank(2, 3).unwrap(), BigInt::from(2));
    assert_eq!(witt_rank(3, 2).unwrap(), BigInt::from(3));
    assert!(witt_rank(0, 2).is_err() && witt_rank(2, 0).is_err());
    for r in 1..=5 {
        for n in 1..=8 {
            assert_eq!(witt_rank(r, n).unwrap(), BigInt::from(brute_witt(r, n)), "witt({r}, {n})");
        }
    }
    // far beyond machine words
    assert!(witt_rank(26, 30).unwrap() > BigInt::from(u64::MAX));
}

#[test]
fn lyndon_examples() {
    let words = |r, n| -> Vec<String> { lyndon_basis(r, n).iter().map(ToString::to_string).collect() };
    assert_eq!(words(2, 2), ["ab"]);
    assert_eq!(words(2, 1), ["a", "b"]);
    assert_eq!(words(2, 4), ["aaab", "aabb", "abbb"]);
}

#[test]
fn lyndon_basis_matches_rotation_filter() {
    for r in 1..=4 {
        for n in 1..=6 {
            let basis: Vec<Vec<u8>> = lyndon_basis(r, n).iter().map(|w| w.letters().to_vec()).collect();
            assert_eq!(basis, brute_lyndon(r, n), "r = {r}, n = {n}");
            for w in lyndon_basis(r, n).iter().filter(|w| w.degree() > 1) {
                let (u, v) = w.standard_factorization().unwrap();
                assert_eq!((u.letters().to_vec(), v.letters().to_vec()), brute_factorization(w.letters()));
                assert_eq!(w.bracketing().leaves(), n);
            }
        }
    }
}

#[test]
fn bracket_examples() {
    let a = lie(2, 3, &[("a", 1)]);
    let b = lie(2, 3, &[("b", 1)]);
    let ab = lie(2, 3, &[("ab", 1)]);
    assert_eq!(lie_bracket(&a, &b).unwrap(), ab);
    let x = lie(2, 3, &[("a", 2), ("ab", -1), ("abb", 5)]);
    assert!(lie_bracket(&x, &x).unwrap().is_zero());
    let z = lie_bracket(&ab, &a).unwrap();
    assert_eq!(z, lie(2, 3, &[("aab", -1)]));
    // the oracle: expansion of the result equals the ring commutator of the expansions
    let oracle = envelope(2, 3, &word_of("ab")).ring_comm(&envelope(2, 3, &word_of("a")));
    assert_eq!(expand_lie(&z), oracle);
    assert!(matches!(lie_bracket(&a, &lie(3, 3, &[("a", 1)])), Err(Error::Mismatch { .. })));
}

#[test]
fn apply_matrix_examples() {
    let x = lie(3, 3, &[("a", 1), ("bc", 2), ("abc", -1), ("acb", 3)]);
    assert_eq!(lie_apply_matrix(&IntMatrix::identity(3), &x).unwrap(), x);
    let swap = IntMatrix::transposition(2, 0, 1);
    let ab = lie(2, 2, &[("ab", 1)]);
    assert_eq!(lie_apply_matrix(&swap, &ab).unwrap(), lie(2, 2, &[("ab", -1)]));
    let oracle = envelope(2, 2, &word_of("ab")).linear_substitute(&rows_of(&swap));
    assert_eq!(expand_lie(&lie(2, 2, &[("ab", -1)])), oracle);
    assert!(matches!(lie_apply_matrix(&swap, &x), Err(Error::Dimension(_))));
}

#[test]
fn envelope_map_is_injective_on_the_basis() {
    for (r, c) in [(2, 5), (3, 4), (4, 3)] {
        let expansions: Vec<NcPoly> = lyndon_basis_upto(r, c).iter().map(|w| envelope(r, c, w.letters())).collect();
        for (w, p) in lyndon_basis_upto(r, c).iter().zip(&expansions) {
            // leading word of P_w is w itself, with coefficient 1
            let (lead, k) = p.terms.iter().find(|(u, _)| u.len() == w.degree()).unwrap();
            assert_eq!((lead.as_slice(), *k), (w.letters(), 1));
            assert_eq!(expand_lie(&LieElement::basis(r, c, w).unwrap()), *p);
        }
    }
}

fn params() -> impl Strategy<Value = (usize, usize, u64)> {
    (1usize..=3, 1usize..=4, any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn antisymmetry_and_jacobi((r, c, seed) in params()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_lie_element(&mut rng, r, c, 4);
        let y = random_lie_element(&mut rng, r, c, 4);
        let z = random_lie_element(&mut rng, r, c, 4);
        prop_assert!(x.bracket(&y).unwrap().add(&y.bracket(&x).unwrap()).unwrap().is_zero());
        let jacobi = x.bracket(&y.bracket(&z).unwrap()).unwrap()
            .add(&y.bracket(&z.bracket(&x).unwrap()).unwrap()).unwrap()
            .add(&z.bracket(&x.bracket(&y).unwrap()).unwrap()).unwrap();
        prop_assert!(jacobi.is_zero());
    }

    #[test]
    fn bracket_intertwines_ring_commutator((r, c, seed) in params()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_lie_element(&mut rng, r, c, 4);
        let y = random_lie_element(&mut rng, r, c, 4);
        let b = x.bracket(&y).unwrap();
        prop_assert_eq!(expand_lie(&b), expand_lie(&x).ring_comm(&expand_lie(&y)));
    }

    #[test]
    fn bracket_is_graded((r, c, seed) in params(), m in 1usize..4, n in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_lie_element(&mut rng, r, c, 4).homogeneous_part(m);
        let y = random_lie_element(&mut rng, r, c, 4).homogeneous_part(n);
        let b = x.bracket(&y).unwrap();
        if m + n > c {
            prop_assert!(b.is_zero());
        } else if let Some(d) = b.homogeneous_degree() {
            prop_assert_eq!(d, m + n);
        }
    }

    #[test]
    fn gl_action_is_functorial((r, c, seed) in params()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_lie_element(&mut rng, r, c, 3);
        let y = random_lie_element(&mut rng, r, c, 3);
        let a = random_gl(&mut rng, r, 4);
        let b = random_gl(&mut rng, r, 4);
        let ab = &a * &b;
        prop_assert_eq!(
            lie_apply_matrix(&ab, &x).unwrap(),
            lie_apply_matrix(&a, &lie_apply_matrix(&b, &x).unwrap()).unwrap()
        );
        prop_assert_eq!(
            lie_apply_matrix(&a, &x.add(&y).unwrap()).unwrap(),
            lie_apply_matrix(&a, &x).unwrap().add(&lie_apply_matrix(&a, &y).unwrap()).unwrap()
        );
        // against substitution in the oracle ring
        prop_assert_eq!(
            expand_lie(&lie_apply_matrix(&a, &x).unwrap()),
            expand_lie(&x).linear_substitute(&rows_of(&a))
        );
    }
}
