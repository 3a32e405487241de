mod common;

use bsa_lab_core::matcore::{eigvalsh, partial_transpose_b};
use bsa_lab_core::{BdState, BellLabel, PauliFrame};
use common::*;
use proptest::prelude::*;

fn any_state() -> impl Strategy<Value = BdState> {
    any::<u64>().prop_map(|seed| BdState::from_p(simplex(&mut rng(seed))).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn spectrum_is_the_weight_vector(s in any_state()) {
        let mut p = s.p();
        p.sort_by(f64::total_cmp);
        let e = eigvalsh(&s.density_matrix());
        for (a, b) in e.iter().zip(p) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn separable_iff_ppt(s in any_state()) {
        let min_pt = eigvalsh(&partial_transpose_b(&s.density_matrix()))[0];
        prop_assume!(min_pt.abs() > 1e-9);
        prop_assert_eq!(s.is_separable(), min_pt > 0.0);
    }

    #[test]
    fn matrix_round_trip(s in any_state()) {
        let back = BdState::from_density_matrix(&s.density_matrix()).unwrap();
        for (a, b) in back.p().iter().zip(s.p()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn frames_act_by_conjugation(s in any_state(), k in 0usize..4) {
        let f = FRAMES[k];
        let moved = s.in_frame(f).density_matrix();
        let direct = f.conjugate(&s.density_matrix());
        prop_assert!((moved - direct).frobenius_norm() < 1e-12);
    }

    #[test]
    fn canonical_frame_lands_in_singlet_tetra(seed in any::<u64>()) {
        let s = entangled_any(&mut rng(seed), 1e-6);
        let (c, f) = s.canonicalize().unwrap();
        prop_assert_eq!(c.tetra_id(), Some(BellLabel::PsiMinus));
        prop_assert_eq!(c.in_frame(f).p(), s.p());
    }

    #[test]
    fn json_round_trip(s in any_state()) {
        let text = serde_json::to_string(&s).unwrap();
        let back: BdState = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.p(), s.p());
    }
}

#[test]
fn bell_states_are_the_vertices() {
    for label in BellLabel::ALL {
        let s = BdState::bell(label);
        assert_eq!(s.t(), label.vertex());
        assert_eq!(s.tetra_id(), Some(label));
        assert_eq!(PauliFrame::to_singlet(label).permute_p(&s.p())[3], 1.0);
    }
}

#[test]
fn rejects_unphysical_t() {
    assert!(BdState::from_t([1.0, 1.0, 1.0]).is_err());
    assert!(BdState::from_t([0.2, 0.2, 0.2]).is_ok());
}
