//! Prompt-weighting schemes for binary-reward rollout groups.
//!
//! Each scheme is a weight function `ω(ρ)` of the success rate. For a group
//! of `M` binary rewards with empirical success rate `ρ̂`, the per-rollout
//! advantages are `A_i = ω(ρ̂)·(r_i − ρ̂)`, except for RLOO (exact
//! leave-one-out baselines) and rejection sampling (`A_i = r_i/ρ̂`). The
//! *effective* weight `ω(ρ)·ρ(1−ρ)` is the factor multiplying the difference
//! of mean success/failure gradients; it stays finite on all of [0, 1] and is
//! what distinguishes symmetric schemes (zero at the endpoints) from
//! asymmetric ones (non-zero at ρ = 0).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::quad::{integrate_unit, QuadratureConfig};

/// A named weighting scheme. The set is closed; unknown tags fail to parse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeId {
    LinearR,
    SqrtR,
    PlateauR,
    UniformR,
    Grpo,
    Rloo,
    Kimi,
    RejectionSampling,
}

impl SchemeId {
    pub const ALL: [SchemeId; 8] = [
        SchemeId::LinearR,
        SchemeId::SqrtR,
        SchemeId::PlateauR,
        SchemeId::UniformR,
        SchemeId::Grpo,
        SchemeId::Rloo,
        SchemeId::Kimi,
        SchemeId::RejectionSampling,
    ];

    /// Canonical tag, used verbatim as CSV column header.
    pub fn tag(self) -> &'static str {
        match self {
            SchemeId::LinearR => "LinearR",
            SchemeId::SqrtR => "SqrtR",
            SchemeId::PlateauR => "PlateauR",
            SchemeId::UniformR => "UniformR",
            SchemeId::Grpo => "GRPO",
            SchemeId::Rloo => "RLOO",
            SchemeId::Kimi => "Kimi",
            SchemeId::RejectionSampling => "RejectionSampling",
        }
    }

    /// Every scheme except rejection sampling produces mean-zero advantages
    /// on groups with 0 < ρ̂ < 1.
    pub fn is_mean_zero(self) -> bool {
        self != SchemeId::RejectionSampling
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for SchemeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "linearr" | "linearreinforce" => Ok(SchemeId::LinearR),
            "sqrtr" | "sqrtreinforce" => Ok(SchemeId::SqrtR),
            "plateaur" | "plateaureinforce" => Ok(SchemeId::PlateauR),
            "uniformr" | "uniformreinforce" => Ok(SchemeId::UniformR),
            "grpo" => Ok(SchemeId::Grpo),
            "rloo" => Ok(SchemeId::Rloo),
            "kimi" | "kimir" => Ok(SchemeId::Kimi),
            "rejectionsampling" | "rs" => Ok(SchemeId::RejectionSampling),
            _ => Err(Error::Config(format!(
                "unknown scheme `{s}` (expected one of linear-r, sqrt-r, plateau-r, \
                 uniform-r, grpo, rloo, kimi, rejection-sampling)"
            ))),
        }
    }
}

/// Weight `ω(ρ)` of the scheme at an interior success rate.
pub fn weight(scheme: SchemeId, rho: f64) -> Result<f64> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::Domain(format!(
            "weight is defined on the open interval (0, 1), got rho = {rho}"
        )));
    }
    Ok(match scheme {
        SchemeId::LinearR => 1.0 / rho,
        SchemeId::SqrtR => 1.0 / (rho * (1.0 - rho).sqrt()),
        SchemeId::PlateauR => {
            if rho < 0.5 {
                1.0 / (2.0 * rho * (1.0 - rho))
            } else {
                1.0 / (rho * (1.0 - rho)).sqrt()
            }
        }
        SchemeId::UniformR => 1.0 / (rho * (1.0 - rho)),
        SchemeId::Grpo => 1.0 / (rho * (1.0 - rho)).sqrt(),
        SchemeId::Rloo => 1.0,
        SchemeId::Kimi => ((1.0 - rho) / rho).sqrt(),
        SchemeId::RejectionSampling => 1.0 / rho,
    })
}

/// Effective weight `ω(ρ)·ρ(1−ρ)`, extended to [0, 1] by one-sided limits.
pub fn effective_weight(scheme: SchemeId, rho: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::Domain(format!(
            "effective weight is defined on [0, 1], got rho = {rho}"
        )));
    }
    Ok(match scheme {
        SchemeId::LinearR => 1.0 - rho,
        SchemeId::SqrtR => (1.0 - rho).sqrt(),
        SchemeId::PlateauR => {
            if rho < 0.5 {
                0.5
            } else {
                (rho * (1.0 - rho)).sqrt()
            }
        }
        SchemeId::UniformR => 1.0,
        SchemeId::Grpo => (rho * (1.0 - rho)).sqrt(),
        SchemeId::Rloo => rho * (1.0 - rho),
        SchemeId::Kimi => rho.sqrt() * (1.0 - rho) * (1.0 - rho).sqrt(),
        SchemeId::RejectionSampling => 1.0 - rho,
    })
}

/// Advantage assigned to every rollout of an all-fail group (ρ̂ = 0), taken
/// as the one-sided limit of the defining formula.
pub(crate) fn all_fail_limit(scheme: SchemeId) -> f64 {
    match scheme {
        SchemeId::LinearR => -1.0,
        SchemeId::SqrtR => -1.0,
        SchemeId::PlateauR => -0.5,
        SchemeId::UniformR => -1.0,
        SchemeId::Grpo | SchemeId::Rloo | SchemeId::Kimi | SchemeId::RejectionSampling => 0.0,
    }
}

/// Advantage assigned to every rollout of an all-pass group (ρ̂ = 1).
pub(crate) fn all_pass_limit(scheme: SchemeId) -> f64 {
    match scheme {
        SchemeId::UniformR | SchemeId::RejectionSampling => 1.0,
        _ => 0.0,
    }
}

/// How groups with ρ̂ = 0 are handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZeroGroupMode {
    /// Use the continuous limit of the advantage formula.
    #[default]
    Limit,
    /// Force the all-zero advantage set.
    Zero,
}

impl FromStr for ZeroGroupMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "limit" => Ok(ZeroGroupMode::Limit),
            "zero" => Ok(ZeroGroupMode::Zero),
            _ => Err(Error::Config(format!(
                "unknown zero-group mode `{s}` (expected `limit` or `zero`)"
            ))),
        }
    }
}

/// Boundary handling for advantage computation. While `warmup_active`,
/// all-fail groups yield zero advantages regardless of scheme and mode.
#[derive(Debug, Clone, Copy, Default)]
pub struct BoundaryPolicy {
    pub zero_group_mode: ZeroGroupMode,
    pub warmup_active: bool,
}

/// One prompt's group of binary rewards, with counts kept in integer form so
/// that ρ̂ = M1/M is exact (branch decisions such as Plateau-R's ρ̂ < 1/2
/// never depend on float rounding).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewardGroup {
    rewards: Vec<u8>,
    ones: usize,
}

impl RewardGroup {
    pub fn new(rewards: &[u8]) -> Result<Self> {
        if rewards.is_empty() {
            return Err(Error::Domain("reward group must contain at least one rollout".into()));
        }
        if let Some(bad) = rewards.iter().find(|&&r| r > 1) {
            return Err(Error::Domain(format!(
                "rewards must be binary, found {bad}"
            )));
        }
        let ones = rewards.iter().filter(|&&r| r == 1).count();
        Ok(Self {
            rewards: rewards.to_vec(),
            ones,
        })
    }

    pub fn rewards(&self) -> &[u8] {
        &self.rewards
    }

    /// Number of rollouts M.
    pub fn m(&self) -> usize {
        self.rewards.len()
    }

    /// Number of successes M1.
    pub fn m1(&self) -> usize {
        self.ones
    }

    /// Number of failures M0.
    pub fn m0(&self) -> usize {
        self.rewards.len() - self.ones
    }

    /// ρ̂ = M1/M as a float.
    pub fn rho_hat(&self) -> f64 {
        self.ones as f64 / self.rewards.len() as f64
    }

    /// Exact test of ρ̂ < 1/2 via 2·M1 < M.
    pub fn below_half(&self) -> bool {
        2 * self.ones < self.rewards.len()
    }

    pub fn is_all_fail(&self) -> bool {
        self.ones == 0
    }

    pub fn is_all_pass(&self) -> bool {
        self.ones == self.rewards.len()
    }
}

/// Per-rollout advantages for one group, in reward order.
#[derive(Debug, Clone, PartialEq)]
pub struct AdvantageSet {
    pub values: Vec<f64>,
    pub scheme: SchemeId,
}

impl AdvantageSet {
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

/// Advantages of `group` under `scheme`, honoring the boundary policy.
pub fn advantages(
    scheme: SchemeId,
    group: &RewardGroup,
    policy: BoundaryPolicy,
) -> Result<AdvantageSet> {
    if scheme == SchemeId::Rloo {
        if group.is_all_fail() || group.is_all_pass() {
            // Leave-one-out values vanish on zero-variance groups of any size.
            return Ok(AdvantageSet {
                values: vec![0.0; group.m()],
                scheme,
            });
        }
        return rloo_advantages(group);
    }

    let values = if group.is_all_fail() {
        let a = if policy.warmup_active || policy.zero_group_mode == ZeroGroupMode::Zero {
            0.0
        } else {
            all_fail_limit(scheme)
        };
        vec![a; group.m()]
    } else if group.is_all_pass() {
        vec![all_pass_limit(scheme); group.m()]
    } else {
        let rho = group.rho_hat();
        match scheme {
            SchemeId::RejectionSampling => group
                .rewards
                .iter()
                .map(|&r| r as f64 / rho)
                .collect(),
            _ => {
                // Plateau-R's branch is decided on the exact rational ρ̂.
                let om = if scheme == SchemeId::PlateauR {
                    if group.below_half() {
                        1.0 / (2.0 * rho * (1.0 - rho))
                    } else {
                        1.0 / (rho * (1.0 - rho)).sqrt()
                    }
                } else {
                    weight(scheme, rho)?
                };
                group
                    .rewards
                    .iter()
                    .map(|&r| om * (r as f64 - rho))
                    .collect()
            }
        }
    };
    Ok(AdvantageSet { values, scheme })
}

/// Exact leave-one-out advantages: `A_i = r_i − mean(r_j, j ≠ i)`.
pub fn rloo_advantages(group: &RewardGroup) -> Result<AdvantageSet> {
    let m = group.m();
    if m < 2 {
        return Err(Error::Domain(
            "leave-one-out advantages need at least 2 rollouts".into(),
        ));
    }
    let m1 = group.m1() as f64;
    let values = group
        .rewards
        .iter()
        .map(|&r| {
            let r = r as f64;
            r - (m1 - r) / (m as f64 - 1.0)
        })
        .collect();
    Ok(AdvantageSet {
        values,
        scheme: SchemeId::Rloo,
    })
}

/// Surrogate reward `F(ρ)` with `F′ = ω`.
///
/// Closed forms exist for six schemes; Kimi and rejection sampling report the
/// antiderivative of their weight anchored at `F(1/2) = 0`, computed by
/// quadrature.
pub fn surrogate(scheme: SchemeId, rho: f64) -> Result<f64> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::Domain(format!(
            "surrogate is defined on the open interval (0, 1), got rho = {rho}"
        )));
    }
    Ok(match scheme {
        SchemeId::Rloo => rho,
        SchemeId::Grpo => 2.0 * rho.sqrt().asin(),
        SchemeId::LinearR => rho.ln(),
        SchemeId::SqrtR => -2.0 * (1.0 - rho).sqrt().atanh(),
        SchemeId::UniformR => (rho / (1.0 - rho)).ln(),
        SchemeId::PlateauR => {
            // Antiderivative of the piecewise weight, continuous with F(1/2) = 0.
            if rho <= 0.5 {
                0.5 * (rho / (1.0 - rho)).ln()
            } else {
                2.0 * rho.sqrt().asin() - std::f64::consts::FRAC_PI_2
            }
        }
        SchemeId::Kimi | SchemeId::RejectionSampling => {
            let cfg = QuadratureConfig::default();
            let (lo, hi, sign) = if rho >= 0.5 {
                (0.5, rho, 1.0)
            } else {
                (rho, 0.5, -1.0)
            };
            sign * integrate_unit(
                |u| weight(scheme, u).expect("interior point"),
                lo,
                hi,
                &cfg,
            )?
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    fn group(bits: &[u8]) -> RewardGroup {
        RewardGroup::new(bits).unwrap()
    }

    #[test]
    fn scheme_parsing_round_trips() {
        for s in SchemeId::ALL {
            assert_eq!(s.tag().parse::<SchemeId>().unwrap(), s);
        }
        assert_eq!("linear-r".parse::<SchemeId>().unwrap(), SchemeId::LinearR);
        assert_eq!("Sqrt-R".parse::<SchemeId>().unwrap(), SchemeId::SqrtR);
        assert!("dapo".parse::<SchemeId>().is_err());
    }

    #[test]
    fn weight_examples() {
        assert!((weight(SchemeId::Grpo, 0.5).unwrap() - 2.0).abs() < TOL);
        assert!((weight(SchemeId::Rloo, 0.3).unwrap() - 1.0).abs() < TOL);
        // 1/0.25 evaluated directly
        assert!((weight(SchemeId::LinearR, 0.25).unwrap() - 4.0).abs() < TOL);
        assert!(weight(SchemeId::Grpo, 0.0).is_err());
        assert!(weight(SchemeId::Grpo, 1.0).is_err());
    }

    #[test]
    fn effective_weight_examples() {
        assert_eq!(effective_weight(SchemeId::Grpo, 0.0).unwrap(), 0.0);
        assert_eq!(effective_weight(SchemeId::PlateauR, 0.0).unwrap(), 0.5);
        // √(1 − 0.75) in high precision
        assert!((effective_weight(SchemeId::SqrtR, 0.75).unwrap() - 0.5).abs() < TOL);
        assert!(effective_weight(SchemeId::Grpo, 1.5).is_err());
    }

    #[test]
    fn effective_weight_is_weight_times_variance() {
        for s in SchemeId::ALL {
            for k in 1..200 {
                let rho = k as f64 / 200.0;
                let expected = weight(s, rho).unwrap() * rho * (1.0 - rho);
                let got = effective_weight(s, rho).unwrap();
                assert!(
                    (got - expected).abs() < TOL,
                    "{s} at rho={rho}: {got} vs {expected}"
                );
            }
        }
    }

    #[test]
    fn effective_weight_boundaries_are_limits() {
        for s in SchemeId::ALL {
            for &(boundary, interior) in &[(0.0, 1e-9), (1.0, 1.0 - 1e-9)] {
                let at = effective_weight(s, boundary).unwrap();
                let near = effective_weight(s, interior).unwrap();
                assert!(
                    (at - near).abs() < 1e-4,
                    "{s} boundary {boundary}: {at} vs {near}"
                );
            }
        }
    }

    #[test]
    fn advantage_examples() {
        let p = BoundaryPolicy::default();
        let a = advantages(SchemeId::LinearR, &group(&[1, 0, 0, 0]), p).unwrap();
        for (got, want) in a.values.iter().zip([3.0, -1.0, -1.0, -1.0]) {
            assert!((got - want).abs() < TOL);
        }
        let a = advantages(SchemeId::PlateauR, &group(&[0, 0, 0, 0]), p).unwrap();
        assert_eq!(a.values, vec![-0.5; 4]);
        let a = advantages(SchemeId::Grpo, &group(&[1, 0, 0, 1]), p).unwrap();
        for (got, want) in a.values.iter().zip([1.0, -1.0, -1.0, 1.0]) {
            assert!((got - want).abs() < TOL);
        }
        let a = advantages(SchemeId::Grpo, &group(&[0, 0, 0, 0]), p).unwrap();
        assert_eq!(a.values, vec![0.0; 4]);
    }

    #[test]
    fn all_pass_limits() {
        let p = BoundaryPolicy::default();
        for s in SchemeId::ALL {
            let a = advantages(s, &group(&[1, 1, 1]), p).unwrap();
            let want = match s {
                SchemeId::UniformR | SchemeId::RejectionSampling => 1.0,
                _ => 0.0,
            };
            assert_eq!(a.values, vec![want; 3], "{s}");
        }
    }

    #[test]
    fn zero_mode_and_warmup_force_zero() {
        let zero = BoundaryPolicy {
            zero_group_mode: ZeroGroupMode::Zero,
            warmup_active: false,
        };
        let warm = BoundaryPolicy {
            zero_group_mode: ZeroGroupMode::Limit,
            warmup_active: true,
        };
        for s in SchemeId::ALL {
            for p in [zero, warm] {
                let a = advantages(s, &group(&[0, 0]), p).unwrap();
                assert_eq!(a.values, vec![0.0; 2], "{s}");
            }
        }
        // Warmup only affects all-fail groups.
        let a = advantages(SchemeId::LinearR, &group(&[1, 0]), warm).unwrap();
        assert!((a.values[0] - 1.0).abs() < TOL);
    }

    #[test]
    fn rloo_examples() {
        let a = rloo_advantages(&group(&[1, 0, 0, 1])).unwrap();
        for (got, want) in a.values.iter().zip([2.0 / 3.0, -2.0 / 3.0, -2.0 / 3.0, 2.0 / 3.0]) {
            assert!((got - want).abs() < TOL);
        }
        let a = rloo_advantages(&group(&[1, 1])).unwrap();
        assert_eq!(a.values, vec![0.0, 0.0]);
        let a = rloo_advantages(&group(&[1, 0])).unwrap();
        assert_eq!(a.values, vec![1.0, -1.0]);
        assert!(rloo_advantages(&group(&[1])).is_err());
    }

    #[test]
    fn rloo_brute_force_leave_one_out() {
        // Independent oracle: recompute each baseline as an explicit mean.
        for m in 2..=8usize {
            for bits in 0..(1u32 << m) {
                let rewards: Vec<u8> = (0..m).map(|i| ((bits >> i) & 1) as u8).collect();
                let g = group(&rewards);
                let a = rloo_advantages(&g).unwrap();
                for i in 0..m {
                    let others: f64 = rewards
                        .iter()
                        .enumerate()
                        .filter(|&(j, _)| j != i)
                        .map(|(_, &r)| r as f64)
                        .sum::<f64>()
                        / (m as f64 - 1.0);
                    assert!((a.values[i] - (rewards[i] as f64 - others)).abs() < TOL);
                }
            }
        }
    }

    #[test]
    fn rloo_aggregation_identity() {
        // The grouped update equals M/(M−1)·ρ̂(1−ρ̂)·(∇̂1 − ∇̂0); in scalar
        // form the per-class advantage sums must be ±that coefficient.
        for m in 2..=8usize {
            for bits in 0..(1u32 << m) {
                let rewards: Vec<u8> = (0..m).map(|i| ((bits >> i) & 1) as u8).collect();
                let g = group(&rewards);
                let a = rloo_advantages(&g).unwrap();
                let rho = g.rho_hat();
                let coef = (m as f64 / (m as f64 - 1.0)) * rho * (1.0 - rho);
                let c1: f64 = a
                    .values
                    .iter()
                    .zip(&rewards)
                    .filter(|&(_, &r)| r == 1)
                    .map(|(v, _)| v)
                    .sum::<f64>()
                    / m as f64;
                let c0: f64 = a
                    .values
                    .iter()
                    .zip(&rewards)
                    .filter(|&(_, &r)| r == 0)
                    .map(|(v, _)| v)
                    .sum::<f64>()
                    / m as f64;
                assert!((c1 - coef).abs() < TOL);
                assert!((c0 + coef).abs() < TOL);
            }
        }
    }

    #[test]
    fn mean_zero_and_sign_pattern() {
        let p = BoundaryPolicy::default();
        for s in SchemeId::ALL {
            for m in 2..=10usize {
                for bits in 1..((1u32 << m) - 1) {
                    let rewards: Vec<u8> = (0..m).map(|i| ((bits >> i) & 1) as u8).collect();
                    let g = group(&rewards);
                    let a = advantages(s, &g, p).unwrap();
                    if s.is_mean_zero() {
                        assert!(a.mean().abs() < TOL, "{s} {rewards:?}");
                    }
                    for (v, &r) in a.values.iter().zip(&rewards) {
                        if r == 0 {
                            assert!(*v <= 0.0);
                        } else {
                            assert!(*v >= 0.0);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn plateau_midpoint_uses_upper_branch() {
        // Both branches coincide at ρ̂ = 1/2, so the value is 2·(r − 1/2).
        let a = advantages(SchemeId::PlateauR, &group(&[1, 0]), BoundaryPolicy::default()).unwrap();
        assert!((a.values[0] - 1.0).abs() < TOL);
        assert!((a.values[1] + 1.0).abs() < TOL);
    }

    #[test]
    fn surrogate_examples() {
        assert!(
            (surrogate(SchemeId::Grpo, 0.5).unwrap() - std::f64::consts::FRAC_PI_2).abs() < TOL
        );
        assert!((surrogate(SchemeId::Rloo, 0.3).unwrap() - 0.3).abs() < TOL);
        // log ρ → 0 as ρ → 1
        assert!(surrogate(SchemeId::LinearR, 1.0 - 1e-12).unwrap().abs() < 1e-9);
        assert!(surrogate(SchemeId::LinearR, 1.0).is_err());
    }

    #[test]
    fn surrogate_derivative_matches_weight() {
        // Central finite differences, including the quadrature-backed schemes.
        let h = 1e-6;
        for s in SchemeId::ALL {
            for k in 0..50 {
                let rho = 0.05 + 0.9 * k as f64 / 49.0;
                let fd =
                    (surrogate(s, rho + h).unwrap() - surrogate(s, rho - h).unwrap()) / (2.0 * h);
                let w = weight(s, rho).unwrap();
                assert!(
                    ((fd - w) / w).abs() < 1e-5,
                    "{s} at rho={rho}: fd={fd} w={w}"
                );
            }
        }
    }

    #[test]
    fn surrogate_anchors() {
        // Quadrature-backed surrogates are anchored at F(1/2) = 0.
        assert!(surrogate(SchemeId::Kimi, 0.5).unwrap().abs() < TOL);
        assert!(surrogate(SchemeId::RejectionSampling, 0.5).unwrap().abs() < TOL);
        // Rejection sampling has ω = 1/ρ, so its anchored antiderivative is ln(2ρ).
        let f = surrogate(SchemeId::RejectionSampling, 0.8).unwrap();
        assert!((f - (1.6f64).ln()).abs() < 1e-9);
    }

    #[test]
    fn reward_group_validation() {
        assert!(RewardGroup::new(&[]).is_err());
        assert!(RewardGroup::new(&[0, 2]).is_err());
        let g = group(&[1, 0, 1]);
        assert_eq!((g.m(), g.m1(), g.m0()), (3, 2, 1));
        assert!((g.rho_hat() - 2.0 / 3.0).abs() < TOL);
        assert!(!g.below_half());
    }
}
