//! Cross-checks the pruned growth-table recurrence against exhaustive
//! enumeration of every combination tree, on fixed systems and on randomly
//! generated ones.

use bilinear::core::{
    enumerate_trees, eval_tree, growth_table, tree_count, BilinearMap, BilinearSystem, SignClass,
};
use bilinear::linalg::{vector_from_i64, Vector};
use bilinear::scalar::{int, rat, Scalar};
use num_traits::Zero;
use proptest::prelude::*;

/// `x*y = (x₁y₂ + x₂y₁, x₁y₂)`, seed `(1,1)`: growth is the Fibonacci
/// sequence shifted by one.
fn golden() -> BilinearSystem {
    let op = BilinearMap::from_coeffs(
        2,
        vec![(0, 0, 1, int(1)), (0, 1, 0, int(1)), (1, 0, 1, int(1))],
    )
    .unwrap();
    BilinearSystem::new(
        2,
        vec![op],
        vec![vector_from_i64(&[1, 1])],
        SignClass::Nonnegative,
    )
    .unwrap()
}

/// `x*y = (x₁y₁ + x₂y₂, x₂y₂)`, seed `(1,1)`: growth obeys
/// `f(n) = max_{a+b=n} f(a)f(b) + 1`.
fn chained_squares() -> BilinearSystem {
    let op = BilinearMap::from_coeffs(
        2,
        vec![(0, 0, 0, int(1)), (0, 1, 1, int(1)), (1, 1, 1, int(1))],
    )
    .unwrap();
    BilinearSystem::new(
        2,
        vec![op],
        vec![vector_from_i64(&[1, 1])],
        SignClass::Nonnegative,
    )
    .unwrap()
}

/// Per-coordinate maxima over every combination tree of the given size,
/// computed by sheer enumeration.
fn brute_force_per_dim(system: &BilinearSystem, n: usize) -> Vec<Scalar> {
    let trees = enumerate_trees(n, system.seeds().len(), system.operators().len()).unwrap();
    assert_eq!(
        trees.len() as u128,
        tree_count(n, system.seeds().len(), system.operators().len())
    );
    let mut best = vec![Scalar::zero(); system.dim()];
    for tree in &trees {
        let v = eval_tree(system, tree).unwrap();
        for (slot, entry) in best.iter_mut().zip(v.iter()) {
            if entry > slot {
                *slot = entry.clone();
            }
        }
    }
    best
}

fn assert_table_matches_brute_force(system: &BilinearSystem, n_max: usize) {
    let table = growth_table(system, n_max).unwrap();
    for n in 1..=n_max {
        let expected = brute_force_per_dim(system, n);
        let got: Vec<Scalar> = (0..system.dim())
            .map(|i| table.g_dim(n, i).unwrap().clone())
            .collect();
        assert_eq!(got, expected, "per-coordinate growth differs at size {n}");
        let max = expected.iter().max().unwrap();
        assert_eq!(table.g(n).unwrap(), max, "growth differs at size {n}");
    }
}

#[test]
fn golden_growth_matches_enumeration_and_fibonacci() {
    let system = golden();
    assert_table_matches_brute_force(&system, 8);
    let table = growth_table(&system, 8).unwrap();
    for (n, fib) in [1, 2, 3, 5, 8, 13, 21, 34].into_iter().enumerate() {
        assert_eq!(table.g(n + 1).unwrap(), &int(fib));
    }
}

#[test]
fn chained_squares_growth_matches_enumeration() {
    let system = chained_squares();
    assert_table_matches_brute_force(&system, 8);
    let table = growth_table(&system, 8).unwrap();
    for (n, expected) in [1, 2, 3, 5, 7, 11, 16, 26].into_iter().enumerate() {
        assert_eq!(table.g(n + 1).unwrap(), &int(expected));
    }
}

#[test]
fn multi_seed_multi_operator_growth_matches_enumeration() {
    // Two operators (the golden one and a coordinatewise product) and two
    // seeds exercise the full front recurrence.
    let golden_op = BilinearMap::from_coeffs(
        2,
        vec![(0, 0, 1, int(1)), (0, 1, 0, int(1)), (1, 0, 1, int(1))],
    )
    .unwrap();
    let pointwise = BilinearMap::from_coeffs(
        2,
        vec![(0, 0, 0, int(1)), (1, 1, 1, int(1))],
    )
    .unwrap();
    let system = BilinearSystem::new(
        2,
        vec![golden_op, pointwise],
        vec![vector_from_i64(&[1, 1]), vector_from_i64(&[2, 0])],
        SignClass::Nonnegative,
    )
    .unwrap();
    assert_table_matches_brute_force(&system, 6);
}

#[test]
fn front_witnesses_replay_to_their_values() {
    for system in [golden(), chained_squares()] {
        let table = growth_table(&system, 8).unwrap();
        for n in 1..=8 {
            let front = table.front(n).unwrap();
            assert!(!front.is_empty());
            for entry in front {
                assert_eq!(entry.witness.leaf_count(), n);
                assert_eq!(eval_tree(&system, &entry.witness).unwrap(), entry.value);
            }
        }
    }
}

/// A sparse random nonnegative coefficient: mostly zero, sometimes a small
/// integer or half-integer.
fn coeff_strategy() -> impl Strategy<Value = Scalar> {
    prop_oneof![
        4 => Just(Scalar::zero()),
        2 => Just(int(1)),
        1 => Just(int(2)),
        1 => Just(rat(1, 2)),
    ]
}

fn system_strategy() -> impl Strategy<Value = BilinearSystem> {
    (1usize..=2)
        .prop_flat_map(|dim| {
            let coeffs = proptest::collection::vec(coeff_strategy(), dim * dim * dim);
            let seed = proptest::collection::vec(
                prop_oneof![2 => Just(int(0)), 2 => Just(int(1)), 1 => Just(int(2))],
                dim,
            );
            (Just(dim), coeffs, seed)
        })
        .prop_map(|(dim, coeffs, seed)| {
            let triples: Vec<_> = coeffs
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(idx, c)| {
                    let k = idx / (dim * dim);
                    let i = (idx / dim) % dim;
                    let j = idx % dim;
                    (k, i, j, c)
                })
                .collect();
            let op = BilinearMap::from_coeffs(dim, triples).unwrap();
            BilinearSystem::new(dim, vec![op], vec![Vector::new(seed)], SignClass::Nonnegative)
                .unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn growth_table_agrees_with_enumeration(system in system_strategy()) {
        assert_table_matches_brute_force(&system, 5);
    }

    #[test]
    fn growth_is_monotone_under_coefficient_increase(system in system_strategy()) {
        // Adding mass to an operator can only raise every g_i(n).
        let dim = system.dim();
        let mut coeffs: Vec<(usize, usize, usize, Scalar)> =
            system.operators()[0].iter().map(|(k, i, j, c)| (k, i, j, c.clone())).collect();
        coeffs.push((0, 0, 0, int(1)));
        let bigger_op = BilinearMap::from_coeffs(dim, coeffs).unwrap();
        let bigger = BilinearSystem::new(
            dim,
            vec![bigger_op],
            system.seeds().to_vec(),
            SignClass::Nonnegative,
        )
        .unwrap();
        let before = growth_table(&system, 5).unwrap();
        let after = growth_table(&bigger, 5).unwrap();
        for n in 1..=5 {
            for i in 0..dim {
                prop_assert!(after.g_dim(n, i).unwrap() >= before.g_dim(n, i).unwrap());
            }
        }
    }
}
