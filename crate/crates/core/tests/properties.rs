//! Property-based invariants across the library.

use proptest::prelude::*;

use rlvr_core::csvio;
use rlvr_core::dynamics::{
    lambert_w0, logodds_step, recursion_step, TabulatedWeight, TimeMode, Trajectory,
};
use rlvr_core::popsim::StepRecord;
use rlvr_core::util::logistic;
use rlvr_core::weighting::{
    advantages, effective_weight, weight, BoundaryPolicy, RewardGroup, SchemeId,
};

fn any_scheme() -> impl Strategy<Value = SchemeId> {
    prop::sample::select(SchemeId::ALL.to_vec())
}

proptest! {
    // Advantage identity: entrywise ω(ρ̂)(r_i − ρ̂) for every scheme except
    // RLOO and rejection sampling, on interior groups.
    #[test]
    fn advantage_identity(
        scheme in any_scheme(),
        rewards in prop::collection::vec(0u8..=1, 2..32),
    ) {
        prop_assume!(scheme != SchemeId::Rloo && scheme != SchemeId::RejectionSampling);
        let group = RewardGroup::new(&rewards).unwrap();
        prop_assume!(!group.is_all_fail() && !group.is_all_pass());
        let a = advantages(scheme, &group, BoundaryPolicy::default()).unwrap();
        let rho = group.rho_hat();
        let om = weight(scheme, rho).unwrap();
        for (v, &r) in a.values.iter().zip(&rewards) {
            prop_assert!((v - om * (r as f64 - rho)).abs() < 1e-12);
        }
    }

    // Mean-zero advantages for every scheme except rejection sampling.
    #[test]
    fn advantages_are_mean_zero(
        scheme in any_scheme(),
        rewards in prop::collection::vec(0u8..=1, 2..32),
    ) {
        prop_assume!(scheme.is_mean_zero());
        let group = RewardGroup::new(&rewards).unwrap();
        prop_assume!(!group.is_all_fail() && !group.is_all_pass());
        let a = advantages(scheme, &group, BoundaryPolicy::default()).unwrap();
        prop_assert!(a.mean().abs() < 1e-12);
    }

    // Effective-weight consistency on the interior.
    #[test]
    fn effective_weight_consistency(scheme in any_scheme(), rho in 1e-3..0.999f64) {
        let e = effective_weight(scheme, rho).unwrap();
        let w = weight(scheme, rho).unwrap();
        prop_assert!((e - w * rho * (1.0 - rho)).abs() < 1e-12);
    }

    // The two recursion forms are the same map.
    #[test]
    fn recursion_and_logodds_agree(
        scheme in any_scheme(),
        l in -30.0..30.0f64,
        beta in 0.1..100.0f64,
    ) {
        let via_rho = recursion_step(logistic(l), scheme, beta).unwrap();
        let via_l = logistic(logodds_step(l, scheme, beta));
        prop_assert!((via_rho - via_l).abs() < 1e-12);
    }

    // The recursion strictly increases rho for positive weights. (It may
    // round to exactly 1.0 when exp(-omega/beta) underflows.)
    #[test]
    fn recursion_moves_forward(scheme in any_scheme(), rho in 1e-6..0.999f64) {
        let next = recursion_step(rho, scheme, 1.0).unwrap();
        prop_assert!(next > rho);
        prop_assert!(next <= 1.0);
    }

    // Lambert-W residual over its domain.
    #[test]
    fn lambert_residual(x in -0.36787944117144233f64..1e6) {
        let w = lambert_w0(x).unwrap();
        prop_assert!((w * w.exp() - x).abs() <= 1e-12 * x.abs().max(1.0));
    }

    // Trajectory CSV round-trips exactly at 17 significant digits.
    #[test]
    fn trajectory_csv_round_trip(
        raw in prop::collection::vec((0.0..1e6f64, 1e-12..1.0f64), 1..50),
        effective in any::<bool>(),
    ) {
        let mut samples = raw;
        samples.sort_by(|a, b| a.0.total_cmp(&b.0));
        samples.dedup_by(|a, b| a.0 == b.0);
        let traj = Trajectory {
            samples,
            time_mode: if effective { TimeMode::Effective } else { TimeMode::Regular },
        };
        let text = csvio::trajectory_csv(&traj, 17);
        prop_assert_eq!(csvio::parse_trajectory_csv(&text).unwrap(), traj);
    }

    // Trace CSV round-trips exactly.
    #[test]
    fn trace_csv_round_trip(
        rows in prop::collection::vec(
            (1usize..10_000, 0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64),
            1..40,
        ),
    ) {
        let records: Vec<StepRecord> = rows
            .into_iter()
            .map(|(step, a, b, c, d)| StepRecord {
                step,
                mean_rho: a,
                mean_rho_hat: b,
                frac_zero: c,
                frac_full: d,
            })
            .collect();
        let text = csvio::trace_csv(&records, 17);
        prop_assert_eq!(csvio::parse_trace_csv(&text).unwrap(), records);
    }

    // Monotone tabulated data yields a monotone interpolant.
    #[test]
    fn tabulated_interpolation_preserves_monotonicity(
        mut ys in prop::collection::vec(0.0..100.0f64, 4..20),
        probe in 0.0..1.0f64,
    ) {
        ys.sort_by(f64::total_cmp);
        let n = ys.len();
        let pts: Vec<(f64, f64)> = ys
            .iter()
            .enumerate()
            .map(|(i, &y)| (0.05 + 0.9 * i as f64 / (n - 1) as f64, y))
            .collect();
        let table = TabulatedWeight::new(&pts).unwrap();
        // Sample two ordered interior points and check order is preserved.
        let a = 0.05 + 0.9 * probe * 0.5;
        let b = a + (0.95 - a) * 0.5;
        prop_assert!(table.omega(a) <= table.omega(b) + 1e-9);
    }
}
