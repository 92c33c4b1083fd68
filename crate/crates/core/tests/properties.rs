//! Invariants checked over random inputs.

use proptest::prelude::*;
use std::f64::consts::FRAC_PI_2;

use ionlight::calibration::{fit_power_law, optimize_rabi, optimize_rabi_table, static_rabi};
use ionlight::constants::{hz_to_angular, YB171_MASS};
use ionlight::dynamics::{
    gate_block, p_up_table, sequence_unitary, theta_n_aligned, unitarity_error, PhaseErrorModel, PulseSequence,
    SequenceErrors, ThermalState, ThetaTable,
};
use ionlight::expansion::{closed_form, evaluate, terms, truncated_position_norm, Caps, FunctionId, Sign};
use ionlight::modes::{chain_normal_modes, zero_point_spread};
use ionlight::special::{fock_moment_exact, hermite_all, MomentRoute};
use ionlight::BeamGeometry;
use ionlight::Axis;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gate_blocks_are_unitary(theta in -10.0..10.0f64, psi in -10.0..10.0f64) {
        prop_assert!(unitarity_error(&gate_block(theta, psi)) < 1e-14);
    }

    #[test]
    fn sequences_stay_unitary(
        theta in 0.0..3.0f64,
        phase in -1.0..1.0f64,
        amp in -0.2..0.2f64,
        constant in any::<bool>(),
    ) {
        let errors = SequenceErrors {
            phase_error: phase,
            phase_model: if constant { PhaseErrorModel::Constant } else { PhaseErrorModel::Progressive },
            amplitude_error: amp,
        };
        for seq in [PulseSequence::single(), PulseSequence::sk1(), PulseSequence::tycko()] {
            prop_assert!(unitarity_error(&sequence_unitary(&seq, theta, &errors)) < 1e-13);
        }
    }

    #[test]
    fn error_free_sequences_invert_the_qubit(seq in 0usize..3) {
        let s = [PulseSequence::single(), PulseSequence::sk1(), PulseSequence::tycko()][seq].clone();
        let u = sequence_unitary(&s, FRAC_PI_2, &SequenceErrors::default());
        prop_assert!((u[(1, 0)].norm_sqr() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn thermal_population_is_a_convex_mixture(nbar in 0.0..200.0f64, eta in 0.0..0.05f64, omega_t in 0.2..3.0f64) {
        let state = ThermalState::new(nbar, 1e-9).unwrap();
        let table = ThetaTable::new(state.n_max, eta, 0.0).unwrap();
        let p = p_up_table(&state, &table, omega_t).unwrap();
        let per_level: Vec<f64> = (0..=state.n_max).map(|n| (omega_t * table.factor(n)).sin().powi(2)).collect();
        let lo = per_level.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = per_level.iter().cloned().fold(0.0, f64::max);
        prop_assert!(p >= lo * (1.0 - 1e-9) - 1e-15 && p <= hi + 1e-15, "{lo} <= {p} <= {hi}");
    }

    #[test]
    fn optimized_dominates_static(nbar0 in 1.0..100.0f64, extra in 0.0..500.0f64, eta in 0.001..0.03f64) {
        let nbar = nbar0 + extra;
        let state = ThermalState::with_default_tail(nbar).unwrap();
        let table = ThetaTable::new(state.n_max, eta, 0.0).unwrap();
        let st = static_rabi(nbar0, eta, 0.0).unwrap();
        let opt = optimize_rabi_table(&state, &table).unwrap();
        prop_assert!(p_up_table(&state, &table, opt).unwrap() + 1e-12 >= p_up_table(&state, &table, st).unwrap());
    }

    #[test]
    fn ground_state_calibration_inverts_theta_zero(eta in 0.0..0.2f64) {
        let x = optimize_rabi(0.0, eta, 0.0).unwrap();
        prop_assert!((theta_n_aligned(0, eta, x) - FRAC_PI_2).abs() < 1e-8);
    }

    #[test]
    fn power_law_is_scale_equivariant(
        alpha in 0.5..3.0f64,
        s in 0.1..10.0f64,
        noise in prop::collection::vec(-0.2..0.2f64, 8),
    ) {
        let pts: Vec<(f64, f64)> = noise
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let w = 1e6 * (1.0 + i as f64 * 0.3);
                (w, 1e14 * w.powf(-alpha) * e.exp())
            })
            .collect();
        let scaled: Vec<(f64, f64)> = pts.iter().map(|&(w, n)| (s * w, n)).collect();
        let a = fit_power_law(&pts).unwrap().exponent;
        let b = fit_power_law(&scaled).unwrap().exponent;
        prop_assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }

    #[test]
    fn zero_point_spread_scaling(f in 1e4..1e7f64) {
        let a = zero_point_spread(YB171_MASS, hz_to_angular(f)).unwrap();
        let b = zero_point_spread(YB171_MASS, hz_to_angular(4.0 * f)).unwrap();
        prop_assert!((b / a - 0.5).abs() < 1e-14);
    }

    #[test]
    fn hermite_recurrence_and_parity(x in -3.0..3.0f64) {
        let h = hermite_all(12, x);
        let hm = hermite_all(12, -x);
        for n in 1..12 {
            let lhs = h[n + 1];
            let rhs = 2.0 * x * h[n] - 2.0 * n as f64 * h[n - 1];
            prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs()));
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert!((hm[n] - sign * h[n]).abs() <= 1e-12 * (1.0 + h[n].abs()));
        }
    }

    #[test]
    fn moment_routes_agree(n in 0u64..200, m in 0u64..40) {
        prop_assert_eq!(
            fock_moment_exact(n, m, MomentRoute::FiniteSum),
            fock_moment_exact(n, m, MomentRoute::Hypergeometric)
        );
    }

    #[test]
    fn term_lists_reproduce_closed_forms(
        p0 in -0.2..0.2f64,
        q0 in -0.2..0.2f64,
        p1 in -0.02..0.02f64,
        q1 in -0.02..0.02f64,
        which in 0usize..8,
    ) {
        let id = [
            FunctionId::A1,
            FunctionId::A2,
            FunctionId::B0(Sign::Plus),
            FunctionId::B0(Sign::Minus),
            FunctionId::B1(Sign::Plus),
            FunctionId::B1(Sign::Minus),
            FunctionId::B2(Sign::Plus),
            FunctionId::B2(Sign::Minus),
        ][which];
        let list = terms(id, p0, q0, Caps::new(10, 10)).unwrap();
        let exact = match id {
            FunctionId::B0(_) => closed_form(id, p1, q1),
            _ => closed_form(id, p0 + p1, q0 + q1),
        };
        prop_assert!((evaluate(&list, p1, q1) - exact).norm() < 1e-10);
    }

    #[test]
    fn spot_size_is_smallest_at_focus(y in -1e-4..1e-4f64, w in 0.5e-6..5e-6f64) {
        let b = BeamGeometry::focused(1e-3, 355e-9, w, 5.0 * w);
        for axis in Axis::BOTH {
            prop_assert!(b.spot_size(axis, y) >= b.waist(axis));
        }
    }

    #[test]
    fn position_norm_grows_with_cutoff(d in 2usize..200) {
        prop_assert!(truncated_position_norm(d + 1) > truncated_position_norm(d));
        prop_assert!(truncated_position_norm(d) < (4.0 * d as f64 + 2.0).sqrt());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn chain_modes_are_orthonormal(n in 1usize..12, ratio in 8.0..20.0f64) {
        let m = chain_normal_modes(n, YB171_MASS, hz_to_angular(200e3), hz_to_angular(200e3 * ratio), hz_to_angular(180e3 * ratio)).unwrap();
        prop_assert!(m.orthonormality_error() < 1e-10);
    }
}
