use num_rational::{BigRational, Ratio};
use proptest::prelude::*;

use pslab_core::algebra::{enumerate_monomials, Monomial};
use pslab_core::characters::{compare, dimension_table, fermionic_sum, LinearTerm};
use pslab_core::ideal::{Engine, PieceBasis};
use pslab_core::lattice::{graded_basis, Evaluator, ModuleConfig};
use pslab_core::linalg::{SparseVector, Subspace};

type Q = BigRational;

/// Partitions of each `n <= order` into parts not congruent to `0` or `±a`
/// modulo `m`, by the usual coin-change recursion.
fn restricted_partitions(m: usize, a: usize, order: usize) -> Vec<i64> {
    let mut counts = vec![0i64; order + 1];
    counts[0] = 1;
    for part in (1..=order).filter(|p| ![0, a, m - a].contains(&(p % m))) {
        for n in part..=order {
            counts[n] += counts[n - part];
        }
    }
    counts
}

#[test]
fn dimensions_match_product_formulas() {
    let engine = Engine::<Q>::new();
    for (k, order) in [(1u32, 16usize), (2, 12), (3, 10)] {
        for i in 0..=k {
            let dims = dimension_table(&engine, k, i, order).charge_summed();
            let expected = restricted_partitions(2 * k as usize + 3, (k - i + 1) as usize, order);
            assert_eq!(dims.coeffs(), expected.as_slice(), "k={k} i={i}");
        }
    }
}

#[test]
fn rogers_ramanujan_values() {
    let engine = Engine::<Q>::new();
    let dims = dimension_table(&engine, 1, 0, 18).charge_summed();
    assert_eq!(dims.coeffs(), restricted_partitions(5, 2, 18).as_slice());
    assert_eq!(dims.coefficient(4), 2);
    assert_eq!(dims.coefficient(18), 23);
}

#[test]
fn dimensions_decrease_along_the_index() {
    let engine = Engine::<Q>::new();
    for k in 1..=3 {
        let tables: Vec<_> = (0..=k).map(|i| dimension_table(&engine, k, i, 9)).collect();
        for pair in tables.windows(2) {
            for c in 0..=9 {
                for n in 0..=9 {
                    assert!(
                        pair[0].coefficient(c, n) >= pair[1].coefficient(c, n),
                        "k={k} ({n},{c})"
                    );
                }
            }
        }
    }
}

#[test]
fn fermionic_conventions_are_distinguished() {
    let engine = Engine::<Q>::new();
    let dims = dimension_table(&engine, 3, 1, 10);
    assert!(compare(&dims, &fermionic_sum(3, 1, 10, LinearTerm::LastI), 10).is_equal());
    assert!(!compare(
        &dims,
        &fermionic_sum(3, 1, 10, LinearTerm::FromIPlusOne),
        10
    )
    .is_equal());
    assert!(!compare(&dims, &fermionic_sum(3, 1, 10, LinearTerm::FirstI), 10).is_equal());
}

#[test]
fn kernels_do_not_depend_on_the_pattern() {
    let engine = Engine::<Q>::new();
    for i in 1..=2 {
        assert!(engine.verify_pattern_independence(3, i, 9, 9).passed());
    }
    assert!(engine.verify_pattern_independence(2, 1, 10, 10).passed());
}

/// The rank of the evaluation map, computed in the coordinates of the
/// weight space of the tensor product, matches the quotient dimension.
#[test]
fn quotient_dimension_is_evaluation_rank() {
    let engine = Engine::<Q>::new();
    for (k, i) in [(1, 1), (2, 1), (3, 2)] {
        let cfg = ModuleConfig::new(k, i).unwrap();
        let ev = Evaluator::<Q>::new(cfg.clone());
        for n in 0..=8 {
            for c in 0..=n {
                let target = graded_basis(&cfg, n, c);
                let rows = enumerate_monomials(n, c, 1).into_iter().map(|m| {
                    let image = ev.image(&m);
                    SparseVector::from_entries(image.terms().map(|(b, v)| {
                        (
                            target
                                .binary_search(b)
                                .expect("image stays in the weight space"),
                            v.clone(),
                        )
                    }))
                });
                let rank = Subspace::span(target.len(), rows).unwrap().dim();
                assert_eq!(
                    rank,
                    engine.quotient_dimension(&cfg, n, c),
                    "k={k} i={i} ({n},{c})"
                );
            }
        }
    }
}

#[test]
fn fixed_width_scalars_agree_with_bigrationals() {
    let big = Engine::<Q>::new();
    let small = Engine::<Ratio<i128>>::new();
    for (k, i) in [(2, 0), (3, 3)] {
        let cfg = ModuleConfig::new(k, i).unwrap();
        for n in 0..=9 {
            for c in 0..=n {
                let a = big.kernel_piece(&cfg, n, c);
                let b = small.kernel_piece(&cfg, n, c);
                assert_eq!(a.pivots(), b.pivots());
                assert_eq!(a.to_string(), b.to_string());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Ideal pieces are always contained in kernel pieces.
    #[test]
    fn ideal_is_inside_kernel(k in 1u32..=3, i_seed in 0u32..4, n in 0u32..=9, c_seed in 0u32..10) {
        let i = i_seed % (k + 1);
        let c = if n == 0 { 0 } else { 1 + c_seed % n };
        let engine = Engine::<Q>::new();
        let cfg = ModuleConfig::new(k, i).unwrap();
        let ideal = engine.ideal_piece(k, i, n, c, false);
        prop_assert!(ideal.is_subspace_of(&engine.kernel_piece(&cfg, n, c)).unwrap());
    }

    /// Coordinates round-trip through polynomials.
    #[test]
    fn piece_coordinates_round_trip(n in 0u32..=10, c_seed in 0u32..10, coeffs in proptest::collection::vec(-3i64..=3, 0..8)) {
        let c = if n == 0 { 0 } else { 1 + c_seed % n };
        let basis = PieceBasis::new(n, c, 1);
        let v = SparseVector::<Q>::from_entries(
            coeffs.iter().enumerate().filter(|(j, _)| *j < basis.dim()).map(|(j, &x)| (j, Q::from_integer(x.into()))),
        );
        let p = basis.polynomial(&v);
        prop_assert_eq!(basis.coordinates(&p), Some(v));
        prop_assert!(basis.monomials().iter().all(|m: &Monomial| m.weight() == n && m.charge() == c));
    }
}
