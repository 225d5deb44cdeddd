use proptest::prelude::*;

use subdyn::lovasz::{lovasz_eval, lovasz_value, sort_descending, RelaxedPoint};
use subdyn::oracle::{audit_beta_sandwich, check_submodular};
use subdyn::rng::SeededRng;
use subdyn::sets::{
    all_masks, symmetric_difference_card, SetFunction, SubsetMask, VariationLedger,
};
use subdyn::synthetic::SyntheticParams;

fn masks(n: usize) -> Vec<SubsetMask> {
    all_masks(n).unwrap().collect()
}

fn point(coords: Vec<f64>) -> RelaxedPoint {
    RelaxedPoint::new(coords).unwrap()
}

fn instance(n: usize, seed: u64) -> (SyntheticParams, SetFunction) {
    let p = SyntheticParams::random(n, &mut SeededRng::new(seed));
    let f = p.function().unwrap();
    (p, f)
}

#[test]
fn symmetric_difference_is_a_metric_on_six_elements() {
    let all = masks(6);
    for a in &all {
        assert_eq!(symmetric_difference_card(a, a).unwrap(), 0);
        for b in &all {
            let ab = symmetric_difference_card(a, b).unwrap();
            assert_eq!(ab, symmetric_difference_card(b, a).unwrap());
            assert_eq!(ab == 0, a == b);
            for c in &all {
                let ac = symmetric_difference_card(a, c).unwrap();
                let bc = symmetric_difference_card(b, c).unwrap();
                assert!(ac <= ab + bc);
            }
        }
    }
}

fn mask_strategy(n: usize) -> impl Strategy<Value = SubsetMask> {
    (0u64..(1 << n)).prop_map(move |b| SubsetMask::from_bits(n, b).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn variation_equals_euclidean_path_length(seq in prop::collection::vec(mask_strategy(9), 1..40)) {
        let mut ledger = VariationLedger::new();
        let mut previous = ledger.cumulative();
        for s in &seq {
            ledger.push(s.clone()).unwrap();
            prop_assert!(ledger.cumulative() >= previous);
            previous = ledger.cumulative();
        }
        let path = seq.windows(2).fold(0.0, |acc, w| {
            let (a, b) = (w[0].characteristic(), w[1].characteristic());
            let sq = a.iter().zip(&b).fold(0.0, |s, (x, y)| s + (x - y) * (x - y));
            acc + sq.sqrt()
        });
        prop_assert!((ledger.cumulative() - path).abs() <= 1e-12);
    }

    #[test]
    fn characteristic_vectors_roundtrip(s in mask_strategy(12)) {
        prop_assert_eq!(SubsetMask::from_characteristic(&s.characteristic()).unwrap(), s);
    }

    #[test]
    fn normalize_is_idempotent(seed in any::<u64>(), offset in -5.0f64..5.0) {
        let (mut p, _) = instance(6, seed);
        p.offset = offset;
        let f = p.function().unwrap();
        let once = f.normalize().unwrap();
        let twice = once.normalize().unwrap();
        for s in masks(6) {
            prop_assert_eq!(once.eval(&s).unwrap().to_bits(), twice.eval(&s).unwrap().to_bits());
        }
        prop_assert_eq!(once.eval(&SubsetMask::empty(6)).unwrap(), 0.0);
    }

    #[test]
    fn extension_agrees_with_the_function_on_vertices(seed in any::<u64>()) {
        let (_, f) = instance(7, seed);
        for s in masks(7) {
            let x = RelaxedPoint::from_mask(&s);
            prop_assert_eq!(lovasz_value(&f, &x).unwrap(), f.eval(&s).unwrap());
        }
    }

    #[test]
    fn extension_is_convex_for_submodular_functions(
        seed in any::<u64>(),
        x in prop::collection::vec(0.0f64..=1.0, 6),
        y in prop::collection::vec(0.0f64..=1.0, 6),
        lambda in 0.0f64..=1.0,
    ) {
        let (_, f) = instance(6, seed);
        prop_assert!(check_submodular(&f).unwrap().holds);
        let mid: Vec<f64> = x.iter().zip(&y).map(|(a, b)| lambda * a + (1.0 - lambda) * b).collect();
        let fx = lovasz_value(&f, &point(x)).unwrap();
        let fy = lovasz_value(&f, &point(y)).unwrap();
        let fm = lovasz_value(&f, &point(mid)).unwrap();
        prop_assert!(fm <= lambda * fx + (1.0 - lambda) * fy + 1e-9);
    }

    #[test]
    fn subgradient_supports_the_extension(
        seed in any::<u64>(),
        x in prop::collection::vec(0.0f64..=1.0, 6),
        y in prop::collection::vec(0.0f64..=1.0, 6),
    ) {
        let (_, f) = instance(6, seed);
        let at_x = lovasz_eval(&f, &point(x.clone())).unwrap();
        let fy = lovasz_value(&f, &point(y.clone())).unwrap();
        let linear = at_x.subgradient.iter().zip(y.iter().zip(&x)).fold(0.0, |a, (g, (yi, xi))| a + g * (yi - xi));
        prop_assert!(fy >= at_x.value + linear - 1e-9);
        let norm = at_x.subgradient.iter().fold(0.0, |a, g| a + g * g).sqrt();
        prop_assert!(norm <= 4.0 * f.bound());
    }

    #[test]
    fn extension_is_positively_homogeneous(
        seed in any::<u64>(),
        x in prop::collection::vec(0.0f64..=1.0, 6),
        c in 0.0f64..=1.0,
    ) {
        let (_, f) = instance(6, seed);
        let x = point(x);
        let scaled = point(x.coords().iter().map(|v| c * v).collect());
        prop_assume!(c == 0.0 || sort_descending(&scaled) == sort_descending(&x));
        let lhs = lovasz_value(&f, &scaled).unwrap();
        let rhs = c * lovasz_value(&f, &x).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
    }

    #[test]
    fn sandwich_audit_is_monotone_in_beta(seed in any::<u64>(), beta in 1.0f64..4.0, extra in 0.0f64..3.0) {
        let p = SyntheticParams::random(6, &mut SeededRng::new(seed)).lifted(1.0).unwrap();
        let f = p.function().unwrap();
        let approx = p.singleton_surrogate().unwrap();
        let low = audit_beta_sandwich(&f, &approx, beta).unwrap();
        let high = audit_beta_sandwich(&f, &approx, beta + extra).unwrap();
        prop_assert!(!low.passes || high.passes);
        prop_assert!(high.violations.len() <= low.violations.len());
    }
}
