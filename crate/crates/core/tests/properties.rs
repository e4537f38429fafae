use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use selfsim_core::arith::{intersection_finite, weak_limit_times};
use selfsim_core::flow::{FlowParams, RectSet};
use selfsim_core::fock::{self, RotationMultiset};
use selfsim_core::spectral::{correlation_sequence, fejer_density, tensor_correlation};
use selfsim_core::tower::{LevelSet, PointCoord, SelfSimilarParams};
use selfsim_core::{BigInt, BigRational, BigUint};

const CAP: u32 = 40;

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn hp_params() -> impl Strategy<Value = SelfSimilarParams> {
    (1u64..5, 4u32..12).prop_map(|(h, p)| SelfSimilarParams::hp(h, p).unwrap())
}

fn general_params() -> impl Strategy<Value = SelfSimilarParams> {
    (1u64..4, prop::collection::vec(0u32..4, 2..4))
        // a last column without spacers keeps the top level topmost forever,
        // so translates touching it never close at a finite stage
        .prop_filter("needs spacers over the last column", |(_, s)| {
            s.last() > Some(&0)
        })
        .prop_map(|(h, s)| SelfSimilarParams::new(h, s).unwrap())
}

fn any_params() -> impl Strategy<Value = SelfSimilarParams> {
    prop_oneof![hp_params(), general_params()]
}

/// Parameters with a random nonempty level set at stage 1 or 2.
fn params_and_set() -> impl Strategy<Value = (SelfSimilarParams, LevelSet)> {
    any_params().prop_flat_map(|params| {
        (1u32..3).prop_flat_map(move |stage| {
            let height = params.height(stage).try_into().unwrap_or(64u64).min(64);
            let params = params.clone();
            prop::collection::btree_set(0..height, 1..6)
                .prop_map(move |levels| (params.clone(), LevelSet::new(stage, levels)))
        })
    })
}

fn params_and_two_sets() -> impl Strategy<Value = (SelfSimilarParams, LevelSet, LevelSet)> {
    any_params().prop_flat_map(|params| {
        let height: u64 = params.height(2).try_into().unwrap_or(64u64).min(64);
        let p = params.clone();
        (
            prop::collection::btree_set(0..height, 1..6),
            prop::collection::btree_set(0..height, 1..6),
        )
            .prop_map(move |(a, b)| (p.clone(), LevelSet::new(2, a), LevelSet::new(2, b)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn translation_preserves_measure((params, set) in params_and_set(), n in 0i64..300) {
        let moved = params.translate_set(&set, n, CAP).unwrap();
        prop_assert_eq!(params.measure(&moved), params.measure(&set));
    }

    #[test]
    fn refinement_preserves_measure((params, set) in params_and_set(), extra in 0u32..3) {
        let refined = params.refine_set(&set, set.stage() + extra).unwrap();
        prop_assert_eq!(params.measure(&refined), params.measure(&set));
        prop_assert!(params.same_set(&set, &refined).unwrap());
    }

    #[test]
    fn translation_commutes_with_refinement((params, set) in params_and_set(), n in 0i64..200) {
        let refined = params.refine_set(&set, set.stage() + 1).unwrap();
        let a = params.translate_set(&set, n, CAP).unwrap();
        let b = params.translate_set(&refined, n, CAP).unwrap();
        prop_assert!(params.same_set(&a, &b).unwrap());
    }

    #[test]
    fn correlation_is_bounded_by_its_value_at_zero((params, a, _b) in params_and_two_sets(), n in 0i64..500) {
        let at_zero = params.correlation(&a, &a, 0, CAP).unwrap();
        prop_assert_eq!(&at_zero, &params.measure(&a));
        let value = params.correlation(&a, &a, n, CAP).unwrap();
        prop_assert!(!value.is_negative());
        prop_assert!(value <= at_zero);
    }

    #[test]
    fn correlation_adjoint_symmetry((params, a, b) in params_and_two_sets(), n in 0i64..300) {
        let forward = params.correlation(&a, &b, n, CAP).unwrap();
        let backward = params.correlation(&b, &a, -n, CAP).unwrap();
        prop_assert_eq!(&forward, &backward);
        // the same value through an explicit translate
        let moved = params.translate_set(&a, n, CAP).unwrap();
        prop_assert_eq!(params.correlation(&moved, &b, 0, CAP).unwrap(), forward);
    }

    #[test]
    fn sequence_agrees_with_pointwise_correlation((params, a, b) in params_and_two_sets()) {
        let seq = correlation_sequence(&params, &a, &b, 60, CAP).unwrap();
        for (n, value) in seq.values.iter().enumerate() {
            prop_assert_eq!(value, &params.correlation(&a, &b, n as i64, CAP).unwrap());
        }
    }

    #[test]
    fn point_moves_form_a_group(params in any_params(), level in 0u64..3, k in 0i64..16, m in 0i64..120, n in 0i64..120) {
        let level = level % params.initial_height().try_into().unwrap_or(1u64);
        let x = PointCoord::new(1, level, r(2 * k + 1, 32));
        let once = params.apply_point(&x, m + n, CAP).unwrap();
        let twice = params.apply_point(&params.apply_point(&x, m, CAP).unwrap(), n, CAP).unwrap();
        prop_assert!(params.same_point(&once, &twice).unwrap());
        let back = params.apply_point(&once, -(m + n), CAP).unwrap();
        prop_assert!(params.same_point(&back, &x).unwrap());
    }

    #[test]
    fn point_membership_follows_set_translation((params, set) in params_and_set(), n in 0i64..100, k in 0i64..8) {
        let moved = params.translate_set(&set, n, CAP).unwrap();
        let width = params.width(set.stage());
        for level in set.indices() {
            let x = PointCoord::new(set.stage(), level.clone(), &width * r(2 * k + 1, 16));
            let y = params.apply_point(&x, n, CAP).unwrap();
            prop_assert!(params.contains(&moved, &y).unwrap());
        }
    }
}

fn rational_seq() -> impl Strategy<Value = Vec<BigRational>> {
    prop::collection::vec((0i64..9, 1i64..9), 1..12)
        .prop_map(|v| v.into_iter().map(|(n, d)| r(n, d)).collect())
}

fn spectrum() -> impl Strategy<Value = RotationMultiset> {
    prop::collection::vec((0i64..12, 1i64..7, 1u64..4), 0..5).prop_map(|v| {
        v.into_iter()
            .map(|(n, d, c)| (r(n, d), BigUint::from(c)))
            .collect()
    })
}

fn binomial(n: &BigUint, k: u32) -> BigUint {
    (0..k).fold(BigUint::one(), |acc, i| {
        acc * (n - BigUint::from(i)) / BigUint::from(i + 1)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tensor_sequences_commute(a in rational_seq(), b in rational_seq()) {
        let n = a.len().min(b.len());
        let (a, b) = (&a[..n], &b[..n]);
        prop_assert_eq!(tensor_correlation(a, b).unwrap(), tensor_correlation(b, a).unwrap());
    }

    #[test]
    fn tensor_sequences_associate(a in rational_seq(), b in rational_seq(), c in rational_seq()) {
        let n = a.len().min(b.len()).min(c.len());
        let (a, b, c) = (&a[..n], &b[..n], &c[..n]);
        let left = tensor_correlation(&tensor_correlation(a, b).unwrap(), c).unwrap();
        let right = tensor_correlation(a, &tensor_correlation(b, c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn tensor_rejects_unequal_lengths(a in rational_seq(), extra in 1usize..3) {
        let mut b = a.clone();
        b.extend(std::iter::repeat_n(BigRational::zero(), extra));
        prop_assert!(tensor_correlation(&a, &b).is_err());
    }

    #[test]
    fn symmetric_power_dimension(u in spectrum(), d in 0u32..5) {
        let n = u.dim();
        let expected = match (d, n.is_zero()) {
            (0, _) => BigUint::one(),
            (_, true) => BigUint::zero(),
            _ => binomial(&(&n + BigUint::from(d) - BigUint::one()), d),
        };
        prop_assert_eq!(fock::sym_power(&u, d).dim(), expected);
    }

    #[test]
    fn exp_dimension_is_sum_of_layers(u in spectrum(), d in 0u32..4) {
        let layers: BigUint = (0..=d).map(|k| fock::sym_power(&u, k).dim()).sum();
        prop_assert_eq!(fock::exp_truncated(&u, d).dim(), layers);
    }

    #[test]
    fn copies_scale_every_multiplicity(u in spectrum(), m in 1u64..5) {
        let scaled = fock::scale_copies(&u, m);
        let expected: BTreeSet<BigUint> =
            fock::multiplicity_set(&u, false).into_iter().map(|c| c * BigUint::from(m)).collect();
        prop_assert_eq!(fock::multiplicity_set(&scaled, false), expected);
    }

    #[test]
    fn tensor_dimension_multiplies(a in spectrum(), b in spectrum()) {
        prop_assert_eq!(fock::tensor(&a, &b).dim(), a.dim() * b.dim());
        prop_assert_eq!(fock::tensor(&a, &b), fock::tensor(&b, &a));
    }

    #[test]
    fn fejer_density_is_nonnegative_for_tower_sequences((params, a, _b) in params_and_two_sets(), n in 8usize..80) {
        let seq = correlation_sequence(&params, &a, &a, n, CAP).unwrap();
        let scale = &seq.values[0];
        let normalized: Vec<BigRational> = seq.values.iter().map(|v| v / scale).collect();
        let density = fejer_density(&normalized, 4 * (n + 1)).unwrap();
        prop_assert!(density.min() >= -1e-9);
        prop_assert!((density.total_mass() - 1.0).abs() <= 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn collisions_only_grow_with_the_bound(m in 2u64..6, n in 2u64..6, s in -20i64..20, p in 2u64..12, bound in 2u32..12) {
        let small = intersection_finite(m, n, s, p, bound).unwrap();
        let large = intersection_finite(m, n, s, p, bound + 5).unwrap();
        for pair in &small.collisions {
            prop_assert!(large.collisions.contains(pair));
        }
    }

    #[test]
    fn weak_limit_times_satisfy_their_defining_relation(q in 1u64..10, p in 2u64..10, i_max in 1u32..8) {
        prop_assume!(num_integer::gcd(q, p) == 1);
        let report = weak_limit_times(q, p, i_max).unwrap();
        prop_assert_eq!(report.entries.len(), i_max as usize);
        for entry in &report.entries {
            let pi = BigInt::from(p).pow(entry.i);
            prop_assert_eq!(BigInt::from(q) * &entry.n, &pi + BigInt::from(entry.s));
            prop_assert!(entry.s < q);
            if let Some(red) = &entry.reduction {
                // dividing through by p^k keeps the relation
                let pk = BigInt::from(p).pow(red.exponent);
                prop_assert_eq!(BigInt::from(q) * &red.n, pk + BigInt::from(red.s));
                prop_assert!(red.s % p != 0);
                prop_assert_eq!(red.exponent + red.power, entry.i);
            }
        }
    }

    #[test]
    fn flow_translation_preserves_measure(q_num in 5i64..20, t_num in 0i64..40, t_den in 1i64..5, lo in 0i64..4, len in 1i64..4) {
        let flow = FlowParams::new(r(q_num, 2)).unwrap();
        let top = r(lo + len, 4);
        prop_assume!(top <= BigRational::one());
        let set = RectSet::new(1, vec![(r(lo, 4), top)]);
        let t = r(t_num, t_den);
        let moved = flow.flow_translate(&set, &t, CAP).unwrap();
        prop_assert_eq!(flow.measure(&moved), flow.measure(&set));
        let corr = flow.flow_correlation(&set, &set, &t, CAP).unwrap();
        prop_assert!(!corr.is_negative() && corr <= flow.measure(&set));
    }
}

#[test]
fn bare_last_column_never_closes_the_top_level() {
    let params = SelfSimilarParams::new(1, vec![1, 0]).unwrap();
    let e1 = LevelSet::base(1);
    assert!(params.translate_set(&e1, 1, CAP).is_err());
    assert!(params.correlation(&e1, &e1, 1, CAP).is_err());
}
