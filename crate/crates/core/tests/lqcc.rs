mod common;

use bsa_lab_core::lqcc::{
    apply_lqcc, predict_concurrence, transform_decomposition, verify_transformed_optimality, LqccPair,
};
use bsa_lab_core::measures::wootters_concurrence;
use bsa_lab_core::{bsa_bd, reconstruct};
use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn inverse_pair_restores_the_state(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = entangled_any(&mut r, 0.0);
        let pair = pair(&mut r, 0.9);
        let (out, _) = apply_lqcc(&s.density_matrix(), &pair).unwrap();
        let (back, _) = apply_lqcc(&out, &pair.inverse()).unwrap();
        prop_assert!((back - s.density_matrix()).frobenius_norm() < 1e-9);
    }

    #[test]
    fn law_holds_on_transformed_states(seed in any::<u64>()) {
        // Chain two operations: the input of the second is no longer Bell-diagonal.
        let mut r = rng(seed);
        let s = entangled_any(&mut r, 0.0);
        let (mid, _) = apply_lqcc(&s.density_matrix(), &pair(&mut r, 0.9)).unwrap();
        let second = pair(&mut r, 0.9);
        let predicted = predict_concurrence(&mid, &second).unwrap();
        let (out, _) = apply_lqcc(&mid, &second).unwrap();
        prop_assert!((predicted - wootters_concurrence(&out).unwrap().value).abs() < 1e-9);
    }

    #[test]
    fn transformed_split_is_consistent(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = entangled_any(&mut r, 1e-6);
        let td = transform_decomposition(&bsa_bd(&s), &pair(&mut r, 0.9)).unwrap();
        prop_assert!((reconstruct(&td) - td.rho).frobenius_norm() < 1e-12);
        prop_assert!(td.ensemble.iter().all(|e| e.ket.is_product(1e-10)));
        let c = wootters_concurrence(&td.rho).unwrap().value;
        prop_assert!(((1.0 - td.lambda) * td.pure_part.concurrence() - c).abs() < 1e-10);
    }

    #[test]
    fn frame_symmetric_pairs_verify(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = entangled_any(&mut r, 1e-3);
        let d = bsa_bd(&s);
        let pair = LqccPair::symmetric_in(local_op(&mut r, 0.9), d.frame);
        let v = verify_transformed_optimality(&transform_decomposition(&d, &pair).unwrap(), &pair).unwrap();
        prop_assert!(v.guaranteed && v.report.passed);
    }
}

#[test]
fn pair_json_defaults_to_identity() {
    let p: LqccPair = serde_json::from_str(r#"{"A": {"filtration": {"a": 0.3}}, "B": {}}"#).unwrap();
    assert_eq!(p.a.filtration.a, 0.3);
    assert_eq!(p.a.filtration.m, [0.0, 0.0, 1.0]);
    assert_eq!(p.b, bsa_lab_core::lqcc::LocalOperation::identity());
    assert!(serde_json::from_str::<LqccPair>(r#"{"A": {"filtration": {"a": 1.0}}, "B": {}}"#).is_err());
}

#[test]
fn identity_pair_is_a_no_op() {
    let s = entangled_any(&mut rng(3), 0.0);
    let (out, norm) = apply_lqcc(&s.density_matrix(), &LqccPair::identity()).unwrap();
    assert_eq!(norm, 1.0);
    assert!((out - s.density_matrix()).frobenius_norm() < 1e-15);
}
