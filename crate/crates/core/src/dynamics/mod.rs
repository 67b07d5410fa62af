//! Success-rate dynamics induced by a weighting scheme.
//!
//! Under a KL-proximal update with coefficient `β`, the population success
//! rate of a prompt obeys the recursion
//! `ρ' = 1 / (1 + ((1−ρ)/ρ)·exp(−ω(ρ)/β))`, whose continuous limit is the
//! ODE `dρ/dt = ρ(1−ρ)ω(ρ)/β`. Measuring progress in effective time
//! `dτ = dt/ρ` (rollout cost dominates at small ρ) gives
//! `dρ/dτ = ρ²(1−ρ)ω(ρ)/β`. This module provides the recursion, a fixed-step
//! 4th-order integrator for both clocks, the closed-form trajectories that
//! exist for RLOO / Linear-R / Sqrt-R / GRPO, hitting times and weight
//! budgets by adaptive quadrature, budget normalization, the
//! budget-optimal weights for each clock, and the matching Cauchy-Schwarz
//! lower bounds.

mod interp;
mod lambert;

pub use interp::TabulatedWeight;
pub use lambert::{lambert_w0, lambert_w0_exp};

use crate::error::{Error, Result};
use crate::quad::{integrate_unit, QuadratureConfig};
use crate::util::{logistic, logit};
use crate::weighting::{self, SchemeId};

/// Which clock the dynamics run on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TimeMode {
    #[default]
    Regular,
    Effective,
}

impl std::str::FromStr for TimeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "regular" => Ok(TimeMode::Regular),
            "effective" => Ok(TimeMode::Effective),
            _ => Err(Error::Config(format!(
                "unknown time mode `{s}` (expected `regular` or `effective`)"
            ))),
        }
    }
}

/// A weight function: either a named scheme or a tabulated curve, with an
/// optional scalar factor (used for budget normalization).
#[derive(Debug, Clone)]
pub struct Weight {
    source: WeightSource,
    scale: f64,
}

#[derive(Debug, Clone)]
enum WeightSource {
    Scheme(SchemeId),
    Table(TabulatedWeight),
}

impl From<SchemeId> for Weight {
    fn from(s: SchemeId) -> Self {
        Weight::scheme(s)
    }
}

impl Weight {
    pub fn scheme(scheme: SchemeId) -> Self {
        Self {
            source: WeightSource::Scheme(scheme),
            scale: 1.0,
        }
    }

    pub fn tabulated(table: TabulatedWeight) -> Self {
        Self {
            source: WeightSource::Table(table),
            scale: 1.0,
        }
    }

    /// The same weight multiplied by a positive constant.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            source: self.source.clone(),
            scale: self.scale * factor,
        }
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Short display name for tables and CSV headers.
    pub fn label(&self) -> String {
        match &self.source {
            WeightSource::Scheme(s) => s.tag().to_string(),
            WeightSource::Table(_) => "Custom".to_string(),
        }
    }

    /// `ω(ρ)` on the open interval.
    pub fn omega(&self, rho: f64) -> Result<f64> {
        match &self.source {
            WeightSource::Scheme(s) => Ok(self.scale * weighting::weight(*s, rho)?),
            WeightSource::Table(t) => {
                if !(rho > 0.0 && rho < 1.0) {
                    return Err(Error::Domain(format!(
                        "tabulated weight is defined on (0, 1), got {rho}"
                    )));
                }
                Ok(self.scale * t.omega(rho))
            }
        }
    }

    /// Effective weight `ω(ρ)·ρ(1−ρ)` extended to [0, 1].
    pub fn effective(&self, rho: f64) -> Result<f64> {
        match &self.source {
            WeightSource::Scheme(s) => Ok(self.scale * weighting::effective_weight(*s, rho)?),
            WeightSource::Table(t) => {
                if !(0.0..=1.0).contains(&rho) {
                    return Err(Error::Domain(format!(
                        "effective weight is defined on [0, 1], got {rho}"
                    )));
                }
                Ok(self.scale * t.omega(rho) * rho * (1.0 - rho))
            }
        }
    }

    /// Power `p` such that the effective weight behaves like `(1−ρ)^p` near
    /// ρ = 1. Hitting a target of exactly 1 takes infinite time iff `p ≥ 1`.
    fn effective_decay_at_one(&self) -> f64 {
        match &self.source {
            WeightSource::Scheme(s) => match s {
                SchemeId::LinearR | SchemeId::Rloo | SchemeId::RejectionSampling => 1.0,
                SchemeId::SqrtR | SchemeId::PlateauR | SchemeId::Grpo => 0.5,
                SchemeId::UniformR => 0.0,
                SchemeId::Kimi => 1.5,
            },
            // Tables are bounded, so the ρ(1−ρ) factor decays linearly.
            WeightSource::Table(_) => 1.0,
        }
    }

    /// Power `q` such that `ω` behaves like `(1−ρ)^{−q}` near ρ = 1. The
    /// budget integral to ρ* = 1 diverges iff `q ≥ 1`.
    fn omega_growth_at_one(&self) -> f64 {
        match &self.source {
            WeightSource::Scheme(s) => match s {
                SchemeId::UniformR => 1.0,
                SchemeId::SqrtR | SchemeId::PlateauR | SchemeId::Grpo => 0.5,
                _ => 0.0,
            },
            WeightSource::Table(_) => 0.0,
        }
    }
}

/// One dynamics configuration.
#[derive(Debug, Clone)]
pub struct DynamicsSpec {
    pub weight: Weight,
    /// KL-proximal coefficient β > 0.
    pub beta: f64,
    pub rho0: f64,
    pub rho_star: f64,
    pub time_mode: TimeMode,
    /// When set, the weight is scaled so its integral over [rho0, rho_star]
    /// equals `budget`.
    pub normalized: bool,
    pub budget: f64,
}

impl DynamicsSpec {
    pub fn new(weight: impl Into<Weight>, beta: f64, rho0: f64) -> Self {
        Self {
            weight: weight.into(),
            beta,
            rho0,
            rho_star: 1.0,
            time_mode: TimeMode::Regular,
            normalized: false,
            budget: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho0 > 0.0 && self.rho0 < self.rho_star && self.rho_star <= 1.0) {
            return Err(Error::Domain(format!(
                "need 0 < rho0 < rho_star <= 1, got rho0 = {}, rho_star = {}",
                self.rho0, self.rho_star
            )));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::Domain(format!("beta must be positive, got {}", self.beta)));
        }
        if !(self.budget > 0.0 && self.budget.is_finite()) {
            return Err(Error::Domain(format!(
                "budget must be positive, got {}",
                self.budget
            )));
        }
        Ok(())
    }

    /// The weight actually integrated: budget-normalized when requested.
    fn working_weight(&self) -> Result<Weight> {
        if self.normalized {
            let norm = normalize(&self.weight, self.rho0, self.rho_star, self.budget)?;
            Ok(self.weight.scaled(norm.constant))
        } else {
            Ok(self.weight.clone())
        }
    }
}

/// A solved (time, rho) curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<(f64, f64)>,
    pub time_mode: TimeMode,
}

impl Trajectory {
    pub fn final_rho(&self) -> f64 {
        self.samples.last().map(|&(_, r)| r).unwrap_or(f64::NAN)
    }

    /// Earliest recorded time with `rho >= target`, if any.
    pub fn first_time_reaching(&self, target: f64) -> Option<f64> {
        self.samples
            .iter()
            .find(|&&(_, r)| r >= target)
            .map(|&(t, _)| t)
    }
}

/// One exact KL-proximal step of the success-rate recursion.
pub fn recursion_step(rho: f64, scheme: SchemeId, beta: f64) -> Result<f64> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::Domain(format!(
            "recursion is defined on the open interval (0, 1), got rho = {rho}"
        )));
    }
    if !(beta > 0.0) {
        return Err(Error::Domain(format!("beta must be positive, got {beta}")));
    }
    let om = weighting::weight(scheme, rho)?;
    Ok(1.0 / (1.0 + ((1.0 - rho) / rho) * (-om / beta).exp()))
}

/// The same step in log-odds form: `L + ω(σ(L))/β`.
///
/// Total in `L`; the logistic map saturates at the representable
/// neighborhood of {0, 1} for |L| beyond ~36.
pub fn logodds_step(l: f64, scheme: SchemeId, beta: f64) -> f64 {
    let rho = logistic(l).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0);
    l + weighting::weight(scheme, rho).expect("clamped to the open interval") / beta
}

/// Fixed-step classical 4th-order integration of the dynamics.
///
/// Integration halts early once `rho >= min(rho_star, 1) - 1e-12`. Every
/// accepted step is recorded; use [`integrate_sampled`] to thin the output.
pub fn integrate(spec: &DynamicsSpec, step: f64, horizon: f64) -> Result<Trajectory> {
    integrate_sampled(spec, step, horizon, 1)
}

/// As [`integrate`], recording every `record_every`-th step (the initial
/// point and the final step are always recorded).
pub fn integrate_sampled(
    spec: &DynamicsSpec,
    step: f64,
    horizon: f64,
    record_every: usize,
) -> Result<Trajectory> {
    spec.validate()?;
    if !(step > 0.0) || horizon < 0.0 {
        return Err(Error::Domain(format!(
            "need step > 0 and horizon >= 0, got step = {step}, horizon = {horizon}"
        )));
    }
    let record_every = record_every.max(1);
    let weight = spec.working_weight()?;
    let beta = spec.beta;
    let mode = spec.time_mode;

    // NaN propagates through the stages and is caught after each step.
    let field = |rho: f64| -> f64 {
        if !rho.is_finite() {
            return f64::NAN;
        }
        let r = rho.clamp(0.0, 1.0);
        let e = weight.effective(r).unwrap_or(f64::NAN);
        match mode {
            TimeMode::Regular => e / beta,
            TimeMode::Effective => r * e / beta,
        }
    };

    let target = spec.rho_star.min(1.0) - 1e-12;
    let mut rho = spec.rho0;
    let mut samples = vec![(0.0, rho)];
    let n_full = (horizon / step).floor() as usize;
    let remainder = horizon - n_full as f64 * step;

    let mut k: usize = 0;
    while rho < target {
        let (t_next, h) = if k < n_full {
            (((k + 1) as f64) * step, step)
        } else if remainder > step * 1e-9 && k == n_full {
            (horizon, remainder)
        } else {
            break;
        };
        let k1 = field(rho);
        let k2 = field(rho + 0.5 * h * k1);
        let k3 = field(rho + 0.5 * h * k2);
        let k4 = field(rho + h * k3);
        let next = rho + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if !next.is_finite() {
            return Err(Error::Numeric(format!(
                "non-finite state at t = {t_next}"
            )));
        }
        rho = next.min(1.0);
        k += 1;
        if k.is_multiple_of(record_every) || rho >= target || k >= n_full {
            samples.push((t_next, rho));
        }
    }

    Ok(Trajectory {
        samples,
        time_mode: mode,
    })
}

/// Closed-form regular-time trajectory, for the four schemes that have one.
pub fn closed_form_regular(scheme: SchemeId, rho0: f64, beta: f64, t: f64) -> Result<f64> {
    check_closed_form_args(rho0, beta, t)?;
    match scheme {
        SchemeId::Rloo => Ok(1.0 / (1.0 + ((1.0 - rho0) / rho0) * (-t / beta).exp())),
        SchemeId::LinearR => Ok(1.0 - (1.0 - rho0) * (-t / beta).exp()),
        SchemeId::SqrtR => {
            let s = ((1.0 - rho0).sqrt() - t / (2.0 * beta)).max(0.0);
            Ok(1.0 - s * s)
        }
        SchemeId::Grpo => {
            let theta = (t / (2.0 * beta) + rho0.sqrt().asin()).min(std::f64::consts::FRAC_PI_2);
            Ok(theta.sin().powi(2))
        }
        other => Err(Error::Capability {
            scheme: other,
            context: "regular-time closed form".into(),
            fallback: "integrate".into(),
        }),
    }
}

/// Closed-form effective-time trajectory, for the four schemes that have one.
pub fn closed_form_effective(scheme: SchemeId, rho0: f64, beta: f64, tau: f64) -> Result<f64> {
    check_closed_form_args(rho0, beta, tau)?;
    match scheme {
        SchemeId::LinearR => Ok(1.0 / (1.0 + ((1.0 - rho0) / rho0) * (-tau / beta).exp())),
        SchemeId::SqrtR => {
            let c = (1.0 - rho0).sqrt().atanh();
            if tau >= 2.0 * beta * c {
                Ok(1.0)
            } else {
                let sech = 1.0 / (c - tau / (2.0 * beta)).cosh();
                Ok(sech * sech)
            }
        }
        SchemeId::Grpo => {
            let z0 = ((1.0 - rho0) / rho0).sqrt();
            let z = (z0 - tau / (2.0 * beta)).max(0.0);
            Ok(1.0 / (1.0 + z * z))
        }
        SchemeId::Rloo => {
            let s = tau / beta - 1.0 / rho0 + logit(rho0);
            let u = lambert_w0_exp(-s - 1.0);
            Ok(1.0 / (1.0 + u))
        }
        other => Err(Error::Capability {
            scheme: other,
            context: "effective-time closed form".into(),
            fallback: "integrate".into(),
        }),
    }
}

fn check_closed_form_args(rho0: f64, beta: f64, t: f64) -> Result<()> {
    if !(rho0 > 0.0 && rho0 < 1.0) {
        return Err(Error::Domain(format!("rho0 must lie in (0, 1), got {rho0}")));
    }
    if !(beta > 0.0) {
        return Err(Error::Domain(format!("beta must be positive, got {beta}")));
    }
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("time must be non-negative, got {t}")));
    }
    Ok(())
}

/// Time to raise the success rate from `rho0` to `rho_star`, or a marker
/// that the target is never reached in finite time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeToTarget {
    Finite(f64),
    Unreachable,
}

impl TimeToTarget {
    pub fn finite(&self) -> Option<f64> {
        match self {
            TimeToTarget::Finite(t) => Some(*t),
            TimeToTarget::Unreachable => None,
        }
    }
}

impl std::fmt::Display for TimeToTarget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TimeToTarget::Finite(t) => write!(f, "{t}"),
            TimeToTarget::Unreachable => f.write_str("unreachable"),
        }
    }
}

/// Hitting time via adaptive quadrature of `β∫dρ/(ρ(1−ρ)ω)` (regular) or
/// `β∫dρ/(ρ²(1−ρ)ω)` (effective).
pub fn hitting_time(spec: &DynamicsSpec) -> Result<TimeToTarget> {
    hitting_time_with(spec, &QuadratureConfig::default())
}

pub fn hitting_time_with(spec: &DynamicsSpec, cfg: &QuadratureConfig) -> Result<TimeToTarget> {
    spec.validate()?;
    let weight = spec.working_weight()?;
    if spec.rho_star == 1.0 && weight.effective_decay_at_one() >= 1.0 {
        return Ok(TimeToTarget::Unreachable);
    }
    let beta = spec.beta;
    let mode = spec.time_mode;
    let integrand = |rho: f64| {
        let e = weight.effective(rho).unwrap_or(f64::NAN);
        match mode {
            TimeMode::Regular => beta / e,
            TimeMode::Effective => beta / (rho * e),
        }
    };
    let t = integrate_unit(integrand, spec.rho0, spec.rho_star, cfg)?;
    Ok(TimeToTarget::Finite(t))
}

/// Total weight `∫ω(ρ)dρ` over [rho0, rho_star].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightBudget {
    Finite(f64),
    Divergent,
}

impl WeightBudget {
    pub fn finite(&self) -> Option<f64> {
        match self {
            WeightBudget::Finite(b) => Some(*b),
            WeightBudget::Divergent => None,
        }
    }
}

pub fn budget_integral(weight: &Weight, rho0: f64, rho_star: f64) -> Result<WeightBudget> {
    budget_integral_with(weight, rho0, rho_star, &QuadratureConfig::default())
}

pub fn budget_integral_with(
    weight: &Weight,
    rho0: f64,
    rho_star: f64,
    cfg: &QuadratureConfig,
) -> Result<WeightBudget> {
    if !(rho0 > 0.0 && rho0 < rho_star && rho_star <= 1.0) {
        return Err(Error::Domain(format!(
            "need 0 < rho0 < rho_star <= 1, got rho0 = {rho0}, rho_star = {rho_star}"
        )));
    }
    if rho_star == 1.0 && weight.omega_growth_at_one() >= 1.0 {
        return Ok(WeightBudget::Divergent);
    }
    let v = integrate_unit(
        |rho| weight.omega(rho).unwrap_or(f64::NAN),
        rho0,
        rho_star,
        cfg,
    )?;
    Ok(WeightBudget::Finite(v))
}

/// Scaling constant `c = B / ∫ω` and the equivalent β rescaling.
#[derive(Debug, Clone, Copy)]
pub struct Normalization {
    pub constant: f64,
}

impl Normalization {
    /// Scaling ω by `c` is the same as replacing β with `β/c`.
    pub fn beta_eff(&self, beta: f64) -> f64 {
        beta / self.constant
    }
}

pub fn normalize(weight: &Weight, rho0: f64, rho_star: f64, budget: f64) -> Result<Normalization> {
    normalize_with(weight, rho0, rho_star, budget, &QuadratureConfig::default())
}

pub fn normalize_with(
    weight: &Weight,
    rho0: f64,
    rho_star: f64,
    budget: f64,
    cfg: &QuadratureConfig,
) -> Result<Normalization> {
    if !(budget > 0.0 && budget.is_finite()) {
        return Err(Error::Domain(format!("budget must be positive, got {budget}")));
    }
    match budget_integral_with(weight, rho0, rho_star, cfg)? {
        WeightBudget::Divergent => Err(Error::Domain(format!(
            "{} has an infinite weight budget on [{rho0}, {rho_star}] and cannot be normalized",
            weight.label()
        ))),
        WeightBudget::Finite(total) => Ok(Normalization {
            constant: budget / total,
        }),
    }
}

/// The budget-saturating weight that minimizes the hitting time for the
/// requested clock, together with its normalization constant.
#[derive(Debug, Clone)]
pub struct OptimalWeight {
    pub weight: Weight,
    pub constant: f64,
    /// Set when the interval is so short that the constant blows up.
    pub near_degenerate: bool,
}

pub fn optimal_weight(mode: TimeMode, rho0: f64, rho_star: f64) -> Result<OptimalWeight> {
    if !(rho0 > 0.0 && rho0 < rho_star && rho_star <= 1.0) {
        return Err(Error::Domain(format!(
            "need 0 < rho0 < rho_star <= 1, got rho0 = {rho0}, rho_star = {rho_star}"
        )));
    }
    // Closed-form budget of the optimal shape over [rho0, rho_star].
    let (shape, total) = match mode {
        TimeMode::Regular => (
            SchemeId::Grpo,
            2.0 * (rho_star.sqrt().asin() - rho0.sqrt().asin()),
        ),
        TimeMode::Effective => (
            SchemeId::SqrtR,
            2.0 * ((1.0 - rho0).sqrt().atanh() - (1.0 - rho_star).sqrt().atanh()),
        ),
    };
    let constant = 1.0 / total;
    Ok(OptimalWeight {
        weight: Weight::scheme(shape).scaled(constant),
        constant,
        near_degenerate: rho_star - rho0 < 1e-6,
    })
}

/// Cauchy-Schwarz lower bound on the (budget-constrained, B = 1) hitting
/// time: `β(∫√a)²` with `a = 1/(ρ(1−ρ))` (regular) or `1/(ρ²(1−ρ))`
/// (effective). Attained exactly by the corresponding optimal weight.
pub fn cs_lower_bound(mode: TimeMode, rho0: f64, rho_star: f64, beta: f64) -> Result<f64> {
    if !(rho0 > 0.0 && rho0 <= rho_star && rho_star <= 1.0) {
        return Err(Error::Domain(format!(
            "need 0 < rho0 <= rho_star <= 1, got rho0 = {rho0}, rho_star = {rho_star}"
        )));
    }
    if !(beta > 0.0) {
        return Err(Error::Domain(format!("beta must be positive, got {beta}")));
    }
    let root_integral = match mode {
        TimeMode::Regular => 2.0 * (rho_star.sqrt().asin() - rho0.sqrt().asin()),
        TimeMode::Effective => {
            2.0 * ((1.0 - rho0).sqrt().atanh() - (1.0 - rho_star).sqrt().atanh())
        }
    };
    Ok(beta * root_integral * root_integral)
}

#[cfg(test)]
mod tests {
    use super::*;

    const PI: f64 = std::f64::consts::PI;

    #[test]
    fn recursion_examples() {
        // β → ∞ freezes the state.
        let r = recursion_step(0.5, SchemeId::Rloo, 1e12).unwrap();
        assert!((r - 0.5).abs() < 1e-9);
        // Direct evaluation, cross-checked against logodds_step below.
        let r = recursion_step(0.5, SchemeId::Rloo, 1.0).unwrap();
        assert!((r - 0.7310585786300049).abs() < 1e-12);
        let r = recursion_step(0.5, SchemeId::LinearR, 1.0).unwrap();
        assert!((r - 0.8807970779778823).abs() < 1e-12);
        assert!(recursion_step(0.0, SchemeId::Rloo, 1.0).is_err());
        assert!(recursion_step(0.5, SchemeId::Rloo, 0.0).is_err());
    }

    #[test]
    fn logodds_examples_and_identity() {
        assert!((logodds_step(0.0, SchemeId::Rloo, 1.0) - 1.0).abs() < 1e-12);
        assert!((logodds_step(0.0, SchemeId::LinearR, 2.0) - 1.0).abs() < 1e-12);
        assert!((logodds_step(0.0, SchemeId::Grpo, 1.0) - 2.0).abs() < 1e-12);
        // recursion_step(σ(L)) == σ(logodds_step(L))
        for s in SchemeId::ALL {
            for l in [-8.0, -2.5, 0.0, 0.7, 3.0, 9.0] {
                for beta in [0.5, 1.0, 7.0] {
                    let via_rho = recursion_step(logistic(l), s, beta).unwrap();
                    let via_l = logistic(logodds_step(l, s, beta));
                    assert!(
                        (via_rho - via_l).abs() < 1e-12,
                        "{s} L={l} beta={beta}: {via_rho} vs {via_l}"
                    );
                }
            }
        }
    }

    #[test]
    fn recursion_euler_limit_matches_field() {
        // (recursion_step(ρ, s, β/h) − ρ)/h → ρ(1−ρ)ω(ρ)/β, checked with
        // Richardson extrapolation over h = 1e-3, 1e-4.
        for s in SchemeId::ALL {
            for k in 1..9 {
                let rho = k as f64 / 10.0;
                let beta = 1.0;
                let d = |h: f64| (recursion_step(rho, s, beta / h).unwrap() - rho) / h;
                let extrapolated = (10.0 * d(1e-4) - d(1e-3)) / 9.0;
                let field = rho * (1.0 - rho) * weighting::weight(s, rho).unwrap() / beta;
                assert!(
                    (extrapolated - field).abs() <= 1e-6,
                    "{s} rho={rho}: {extrapolated} vs {field}"
                );
            }
        }
    }

    #[test]
    fn integrate_examples() {
        // Linear-R regular from 0.5: ρ(t) = 1 − 0.5·e^{−t}.
        let spec = DynamicsSpec::new(SchemeId::LinearR, 1.0, 0.5);
        let traj = integrate(&spec, 1e-4, std::f64::consts::LN_2).unwrap();
        assert!((traj.final_rho() - 0.75).abs() < 1e-8);

        let spec = DynamicsSpec::new(SchemeId::Rloo, 1.0, 0.5);
        let traj = integrate(&spec, 1e-4, 0.0).unwrap();
        assert_eq!(traj.samples, vec![(0.0, 0.5)]);

        let spec = DynamicsSpec {
            time_mode: TimeMode::Effective,
            ..DynamicsSpec::new(SchemeId::Grpo, 1.0, 0.5)
        };
        let traj = integrate(&spec, 1e-4, 1.0).unwrap();
        assert!((traj.final_rho() - 0.8).abs() < 1e-8);
    }

    #[test]
    fn absorption_time_matches_closed_form() {
        // GRPO regular from 0.5 absorbs at t = 2(π/2 − arcsin√0.5) = π/2.
        let spec = DynamicsSpec::new(SchemeId::Grpo, 1.0, 0.5);
        let traj = integrate(&spec, 1e-4, 2.0).unwrap();
        let hit = traj.first_time_reaching(1.0 - 1e-9).unwrap();
        assert!((hit - std::f64::consts::FRAC_PI_2).abs() < 1e-3, "hit at {hit}");
    }

    #[test]
    fn trajectories_are_monotone() {
        for s in SchemeId::ALL {
            for mode in [TimeMode::Regular, TimeMode::Effective] {
                let spec = DynamicsSpec {
                    time_mode: mode,
                    ..DynamicsSpec::new(s, 1.0, 0.2)
                };
                let traj = integrate_sampled(&spec, 1e-3, 5.0, 10).unwrap();
                for w in traj.samples.windows(2) {
                    assert!(w[1].0 > w[0].0, "times increase");
                    assert!(w[1].1 >= w[0].1, "{s}: rho non-decreasing");
                }
                assert!(traj.final_rho() <= 1.0);
            }
        }
    }

    #[test]
    fn rejection_sampling_matches_linear_r_dynamics() {
        // Same ω = 1/ρ, so the induced populations coincide.
        for mode in [TimeMode::Regular, TimeMode::Effective] {
            let a = integrate(
                &DynamicsSpec {
                    time_mode: mode,
                    ..DynamicsSpec::new(SchemeId::LinearR, 1.0, 0.1)
                },
                1e-3,
                3.0,
            )
            .unwrap();
            let b = integrate(
                &DynamicsSpec {
                    time_mode: mode,
                    ..DynamicsSpec::new(SchemeId::RejectionSampling, 1.0, 0.1)
                },
                1e-3,
                3.0,
            )
            .unwrap();
            for (x, y) in a.samples.iter().zip(&b.samples) {
                assert!((x.1 - y.1).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn closed_form_regular_examples() {
        let v = closed_form_regular(SchemeId::SqrtR, 0.75, 1.0, 0.5).unwrap();
        assert!((v - 0.9375).abs() < 1e-12);
        let v = closed_form_regular(SchemeId::Grpo, 0.5, 1.0, PI / 2.0).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        let v = closed_form_regular(SchemeId::LinearR, 0.9, 1.0, 0.0).unwrap();
        assert!((v - 0.9).abs() < 1e-12);
        match closed_form_regular(SchemeId::PlateauR, 0.5, 1.0, 1.0) {
            Err(Error::Capability { fallback, .. }) => assert_eq!(fallback, "integrate"),
            other => panic!("expected capability error, got {other:?}"),
        }
    }

    #[test]
    fn closed_form_effective_examples() {
        let v = closed_form_effective(SchemeId::Rloo, 0.5, 1.0, 0.0).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
        let v = closed_form_effective(SchemeId::Grpo, 0.5, 1.0, 2.0).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        let v = closed_form_effective(SchemeId::SqrtR, 0.75, 1.0, 3.0f64.ln()).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        assert!(closed_form_effective(SchemeId::UniformR, 0.5, 1.0, 1.0).is_err());
    }

    #[test]
    fn hitting_time_examples() {
        let cfg = QuadratureConfig::default();
        let spec = DynamicsSpec {
            rho_star: 0.9,
            ..DynamicsSpec::new(SchemeId::LinearR, 1.0, 0.1)
        };
        let t = hitting_time_with(&spec, &cfg).unwrap().finite().unwrap();
        assert!((t - 9.0f64.ln()).abs() < 1e-9);

        let spec = DynamicsSpec {
            rho_star: 0.9,
            ..DynamicsSpec::new(SchemeId::Grpo, 1.0, 0.1)
        };
        let t = hitting_time_with(&spec, &cfg).unwrap().finite().unwrap();
        assert!((t - 1.8545904360032245).abs() < 1e-9);

        let spec = DynamicsSpec::new(SchemeId::Rloo, 1.0, 0.1);
        assert_eq!(hitting_time(&spec).unwrap(), TimeToTarget::Unreachable);
    }

    #[test]
    fn budget_examples() {
        let w = Weight::scheme(SchemeId::Rloo);
        let b = budget_integral(&w, 0.1, 1.0).unwrap().finite().unwrap();
        assert!((b - 0.9).abs() < 1e-10);

        let w = Weight::scheme(SchemeId::LinearR);
        let b = budget_integral(&w, 0.1, 1.0).unwrap().finite().unwrap();
        assert!((b - 10.0f64.ln()).abs() < 1e-10);

        let w = Weight::scheme(SchemeId::Grpo);
        let b = budget_integral(&w, 0.1, 1.0).unwrap().finite().unwrap();
        assert!((b - (PI - 2.0 * 0.1f64.sqrt().asin())).abs() < 1e-10);

        let w = Weight::scheme(SchemeId::UniformR);
        assert_eq!(budget_integral(&w, 0.1, 1.0).unwrap(), WeightBudget::Divergent);
    }

    #[test]
    fn normalize_examples() {
        let n = normalize(&Weight::scheme(SchemeId::LinearR), 0.1, 1.0, 1.0).unwrap();
        assert!((n.constant - 1.0 / 10.0f64.ln()).abs() < 1e-10);
        assert!((n.beta_eff(1.0) - 10.0f64.ln()).abs() < 1e-9);

        let n = normalize(&Weight::scheme(SchemeId::Rloo), 0.1, 1.0, 1.0).unwrap();
        assert!((n.constant - 1.0 / 0.9).abs() < 1e-10);

        let n = normalize(&Weight::scheme(SchemeId::SqrtR), 0.75, 1.0, 1.0).unwrap();
        assert!((n.constant - 1.0 / 3.0f64.ln()).abs() < 1e-10);

        assert!(normalize(&Weight::scheme(SchemeId::UniformR), 0.1, 1.0, 1.0).is_err());
    }

    #[test]
    fn optimal_weight_examples() {
        let o = optimal_weight(TimeMode::Regular, 0.1, 1.0).unwrap();
        let want = 1.0 / (PI - 2.0 * 0.1f64.sqrt().asin());
        assert!((o.constant - want).abs() < 1e-12);
        assert!(!o.near_degenerate);
        // The scaled weight saturates the unit budget.
        let b = budget_integral(&o.weight, 0.1, 1.0).unwrap().finite().unwrap();
        assert!((b - 1.0).abs() < 1e-9);

        let o = optimal_weight(TimeMode::Effective, 0.03, 1.0).unwrap();
        let want = 1.0 / (2.0 * 0.97f64.sqrt().atanh());
        assert!((o.constant - want).abs() < 1e-12);

        let o = optimal_weight(TimeMode::Regular, 0.8 - 1e-9, 0.8).unwrap();
        assert!(o.near_degenerate);
    }

    #[test]
    fn cs_bound_examples() {
        let b = cs_lower_bound(TimeMode::Regular, 0.1, 1.0, 1.0).unwrap();
        let want = (PI - 2.0 * 0.1f64.sqrt().asin()).powi(2);
        assert!((b - want).abs() < 1e-12);

        let b = cs_lower_bound(TimeMode::Effective, 0.75, 1.0, 1.0).unwrap();
        assert!((b - 3.0f64.ln().powi(2)).abs() < 1e-12);

        let b = cs_lower_bound(TimeMode::Regular, 0.4, 0.4, 1.0).unwrap();
        assert_eq!(b, 0.0);
    }

    #[test]
    fn bound_is_attained_by_optimal_weight() {
        for (mode, rho0) in [(TimeMode::Regular, 0.1), (TimeMode::Effective, 0.03)] {
            let o = optimal_weight(mode, rho0, 1.0).unwrap();
            let spec = DynamicsSpec {
                time_mode: mode,
                ..DynamicsSpec::new(o.weight.clone(), 1.0, rho0)
            };
            let t = hitting_time(&spec).unwrap().finite().unwrap();
            let bound = cs_lower_bound(mode, rho0, 1.0, 1.0).unwrap();
            assert!(
                ((t - bound) / bound).abs() < 1e-8,
                "{mode:?}: {t} vs {bound}"
            );
        }
    }

    #[test]
    fn tabulated_weight_reproduces_scheme_hitting_time() {
        let pts: Vec<(f64, f64)> = (0..400)
            .map(|i| {
                let x = 0.02 + 0.96 * i as f64 / 399.0;
                (x, weighting::weight(SchemeId::Grpo, x).unwrap())
            })
            .collect();
        let table = Weight::tabulated(TabulatedWeight::new(&pts).unwrap());
        let spec_t = DynamicsSpec {
            rho_star: 0.9,
            ..DynamicsSpec::new(table, 1.0, 0.1)
        };
        let spec_s = DynamicsSpec {
            rho_star: 0.9,
            ..DynamicsSpec::new(SchemeId::Grpo, 1.0, 0.1)
        };
        let tt = hitting_time(&spec_t).unwrap().finite().unwrap();
        let ts = hitting_time(&spec_s).unwrap().finite().unwrap();
        assert!(((tt - ts) / ts).abs() < 1e-5);
        // Bounded tables never reach 1 in finite time.
        let spec_unreachable = DynamicsSpec {
            rho_star: 1.0,
            ..spec_t
        };
        assert_eq!(
            hitting_time(&spec_unreachable).unwrap(),
            TimeToTarget::Unreachable
        );
    }

    #[test]
    fn custom_weight_obeys_the_lower_bound() {
        // A weight outside the named family (flat-topped triangle) still
        // sits above the Cauchy-Schwarz bound once budget-normalized.
        let pts: Vec<(f64, f64)> = (0..100)
            .map(|i| {
                let x = 0.05 + 0.9 * i as f64 / 99.0;
                (x, 1.0 + (1.0 - (x - 0.5).abs() * 4.0).max(0.0))
            })
            .collect();
        let weight = Weight::tabulated(TabulatedWeight::new(&pts).unwrap());
        let spec = DynamicsSpec {
            rho_star: 0.9,
            normalized: true,
            ..DynamicsSpec::new(weight, 1.0, 0.1)
        };
        let t = hitting_time(&spec).unwrap().finite().unwrap();
        let bound = cs_lower_bound(TimeMode::Regular, 0.1, 0.9, 1.0).unwrap();
        assert!(t >= bound, "custom weight beat the bound: {t} < {bound}");
    }

    #[test]
    fn non_finite_weight_is_a_numeric_error() {
        let spec = DynamicsSpec::new(
            Weight::scheme(SchemeId::LinearR).scaled(f64::NAN),
            1.0,
            0.5,
        );
        match integrate(&spec, 1e-3, 1.0) {
            Err(Error::Numeric(msg)) => assert!(msg.contains("t =")),
            other => panic!("expected numeric error, got {other:?}"),
        }
    }

    #[test]
    fn normalized_integration_uses_scaled_weight() {
        // Normalized Linear-R on [0.1, 1] is plain Linear-R with β_eff = ln 10.
        let spec = DynamicsSpec {
            normalized: true,
            ..DynamicsSpec::new(SchemeId::LinearR, 1.0, 0.1)
        };
        let traj = integrate(&spec, 1e-3, 2.0).unwrap();
        let want = closed_form_regular(SchemeId::LinearR, 0.1, 10.0f64.ln(), 2.0).unwrap();
        assert!((traj.final_rho() - want).abs() < 1e-7);
    }
}
