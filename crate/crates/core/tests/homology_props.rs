mod common;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use proptest::prelude::*;

use lch::augment::{enumerate_augmentations, enumerate_augmentations_bounded, RingDesc, DEFAULT_SEARCH_CAP};
use lch::dga::{euler_tb, lambda0, lambda_k, unknot};
use lch::homology::{field_homology, integral_homology, smith_normal_form, HomologyGroup};
use lch::linearize::{linearized_differential, ChainComplex};
use lch::matrix::IntMatrix;
use lch::verify::{positivity_check, Positivity};

fn small_matrix(max: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-6i64..=6, c), r))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// Products of two random factors have low rank and nontrivial
    /// invariant factors, unlike uniformly random matrices.
    #[test]
    fn snf_of_structured_products(a in small_matrix(6), inner in 1usize..4, scale in 1i64..5) {
        let rows = a.len();
        let left = IntMatrix::from_fn(rows, inner, |i, j| BigInt::from(a[i][j % a[i].len()] * scale));
        let right = IntMatrix::from_fn(inner, a[0].len(), |i, j| BigInt::from(a[(i + j) % rows][j]));
        let m = left.mul(&right);
        let s = smith_normal_form(&m);
        prop_assert_eq!(s.u.mul(&m).mul(&s.v), s.d.clone());
        let rank = m.rank_rational();
        prop_assert_eq!(s.diagonal().len(), rank);
        let plain: Vec<Vec<i64>> = (0..m.rows())
            .map(|i| (0..m.cols()).map(|j| i64::try_from(m.get(i, j)).unwrap()).collect())
            .collect();
        let oracle = common::determinantal_invariant_factors(&plain, rank);
        let got: Vec<i128> = s.diagonal().iter().map(|x| i128::try_from(x).unwrap()).collect();
        prop_assert_eq!(got, oracle);
    }

    #[test]
    fn rank_consistency_over_q(k in small_matrix(5)) {
        let rows = k.len();
        let cols = k[0].len();
        // C_1 = Z^cols -> C_0 = Z^rows
        let m1 = IntMatrix::from_rows(&k);
        let basis = BTreeMap::from([
            (0, (0..rows).map(|i| format!("r{i}")).collect::<Vec<_>>()),
            (1, (0..cols).map(|j| format!("c{j}")).collect()),
        ]);
        let c = ChainComplex::from_parts(RingDesc::Integers, basis, BTreeMap::from([(1, m1)])).unwrap();
        let h = integral_homology(&c).unwrap();
        let q = field_homology(&c, RingDesc::Rationals).unwrap();
        for d in [0, 1] {
            prop_assert_eq!(h.get(d).free_rank, q.get(&d).copied().unwrap_or(0));
        }
        prop_assert_eq!(h.euler_characteristic(), rows as i64 - cols as i64);
    }

    #[test]
    fn direct_sum_is_commutative_and_normal(a in prop::collection::vec(0i64..40, 0..5), b in prop::collection::vec(0i64..40, 0..5)) {
        let ga = HomologyGroup::from_orders(1, a.clone());
        let gb = HomologyGroup::from_orders(0, b.clone());
        let s = ga.direct_sum(&gb);
        prop_assert_eq!(&s, &gb.direct_sum(&ga));
        prop_assert!(s.torsion.windows(2).all(|w| (&w[1] % &w[0]) == BigInt::from(0)));
        prop_assert!(s.torsion.iter().all(|d| *d >= BigInt::from(2)));
        let order: BigInt = s.torsion.iter().product();
        let expected: BigInt = a.iter().chain(&b).filter(|n| **n > 0).map(|&n| BigInt::from(n)).product();
        prop_assert_eq!(order, expected);
    }
}

fn builtins() -> Vec<lch::dga::Dga> {
    let mut v = vec![lambda0(), unknot()];
    v.extend((1..=3).map(|k| lambda_k(k).unwrap()));
    v
}

#[test]
fn reduction_mod_p_is_natural() {
    for d in builtins() {
        for aug in enumerate_augmentations_bounded(&d, 2, DEFAULT_SEARCH_CAP).unwrap() {
            let c = linearized_differential(&d, &aug).unwrap();
            for p in [2, 3, 5] {
                let direct = linearized_differential(&d, &aug.reduce_mod(p).unwrap()).unwrap();
                assert_eq!(c.reduce_mod(p).unwrap(), direct, "{} {aug} mod {p}", d.name());
            }
        }
    }
}

#[test]
fn euler_characteristic_is_tb() {
    for d in builtins() {
        let tb = euler_tb(&d);
        assert_eq!(Some(tb), d.tb_metadata());
        for aug in enumerate_augmentations_bounded(&d, 2, DEFAULT_SEARCH_CAP).unwrap() {
            let h = integral_homology(&linearized_differential(&d, &aug).unwrap()).unwrap();
            assert_eq!(h.euler_characteristic(), tb, "{} {aug}", d.name());
        }
        for p in [2, 5] {
            for aug in enumerate_augmentations(&d, RingDesc::Mod(p), DEFAULT_SEARCH_CAP).unwrap() {
                let c = linearized_differential(&d, &aug).unwrap();
                let dims = field_homology(&c, RingDesc::Mod(p)).unwrap();
                let chi: i64 = dims
                    .iter()
                    .map(|(d, n)| if d.rem_euclid(2) == 0 { *n as i64 } else { -(*n as i64) })
                    .sum();
                assert_eq!(chi, tb);
            }
        }
    }
}

#[test]
fn positivity_on_nonnegative_builtins() {
    let d = unknot();
    for p in [2, 3, 5] {
        for aug in enumerate_augmentations(&d, RingDesc::Mod(p), DEFAULT_SEARCH_CAP).unwrap() {
            assert_eq!(positivity_check(&d, &aug).unwrap(), Positivity::Holds);
        }
    }
    let sum = lch::dga::connected_sum(&unknot(), &unknot()).unwrap().dga;
    for aug in enumerate_augmentations_bounded(&sum, 2, DEFAULT_SEARCH_CAP).unwrap() {
        assert_eq!(positivity_check(&sum, &aug).unwrap(), Positivity::Holds);
    }
}
