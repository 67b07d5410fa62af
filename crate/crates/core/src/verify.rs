//! Self-verification suites.
//!
//! Each suite re-derives a family of results through an independent route
//! (brute-force enumeration, finite differences, quadrature against closed
//! forms, replayed simulations) and reports one [`CheckResult`] per check.
//! The CLI `verify` subcommand and the acceptance tests are thin wrappers
//! around these functions.

use rayon::ThreadPoolBuilder;

use crate::csvio;
use crate::dynamics::{
    budget_integral_with, closed_form_effective, closed_form_regular, cs_lower_bound,
    hitting_time_with, integrate, lambert_w0, DynamicsSpec, TimeMode, TimeToTarget, Weight,
    WeightBudget,
};
use crate::error::{Error, Result};
use crate::figures;
use crate::popsim::{run, update_prompt, InitSpec, SimConfig};
use crate::quad::QuadratureConfig;
use crate::weighting::{advantages, surrogate, weight, BoundaryPolicy, RewardGroup, SchemeId};

/// Outcome of a single named check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }

    pub fn status(&self) -> &'static str {
        if self.passed {
            "PASS"
        } else {
            "FAIL"
        }
    }
}

/// All suite names, in the order `verify all` runs them.
pub const SUITES: [&str; 9] = [
    "closed-forms",
    "lambert-w",
    "optimality",
    "budget-constants",
    "advantage-tables",
    "surrogates",
    "zero-group",
    "determinism",
    "separation",
];

/// Run one suite by name.
pub fn run_suite(name: &str) -> Result<Vec<CheckResult>> {
    match name {
        "closed-forms" => Ok(closed_forms()),
        "lambert-w" => Ok(lambert_w()),
        "optimality" => Ok(optimality()),
        "budget-constants" => Ok(budget_constants()),
        "advantage-tables" => Ok(advantage_tables()),
        "surrogates" => Ok(surrogates()),
        "zero-group" => Ok(zero_group()),
        "determinism" => Ok(determinism()),
        "separation" => Ok(separation()),
        other => Err(Error::Config(format!(
            "unknown suite `{other}`; available: {}",
            SUITES.join(", ")
        ))),
    }
}

const CLOSED_FORM_SCHEMES: [SchemeId; 4] = [
    SchemeId::Rloo,
    SchemeId::LinearR,
    SchemeId::SqrtR,
    SchemeId::Grpo,
];

/// Time at which the closed form reaches `target` (or absorbs), used to set
/// integration horizons.
fn closed_form_span(scheme: SchemeId, mode: TimeMode, rho0: f64) -> f64 {
    let target = 0.999;
    match (mode, scheme) {
        (TimeMode::Regular, SchemeId::Rloo) => {
            ((1.0 - rho0) / rho0 * target / (1.0 - target)).ln()
        }
        (TimeMode::Regular, SchemeId::LinearR) => ((1.0 - rho0) / (1.0 - target)).ln(),
        (TimeMode::Regular, SchemeId::SqrtR) => 2.0 * (1.0 - rho0).sqrt(),
        (TimeMode::Regular, SchemeId::Grpo) => {
            2.0 * (std::f64::consts::FRAC_PI_2 - rho0.sqrt().asin())
        }
        (TimeMode::Effective, SchemeId::LinearR) => {
            ((1.0 - rho0) / rho0 * target / (1.0 - target)).ln()
        }
        (TimeMode::Effective, SchemeId::SqrtR) => 2.0 * (1.0 - rho0).sqrt().atanh(),
        (TimeMode::Effective, SchemeId::Grpo) => 2.0 * ((1.0 - rho0) / rho0).sqrt(),
        (TimeMode::Effective, SchemeId::Rloo) => {
            let s = |r: f64| -1.0 / r + (r / (1.0 - r)).ln();
            s(target) - s(rho0)
        }
        _ => unreachable!("only the four closed-form schemes are spanned"),
    }
}

/// Fixed-step integration against every closed-form trajectory: max error
/// over 200 grid times must stay within 1e-6 for each (scheme, mode, rho0).
pub fn closed_forms() -> Vec<CheckResult> {
    let mut out = Vec::new();
    let step = 1e-4;
    for mode in [TimeMode::Regular, TimeMode::Effective] {
        for scheme in CLOSED_FORM_SCHEMES {
            let mut worst: f64 = 0.0;
            let mut ok = true;
            let mut detail = String::new();
            for rho0 in [0.03, 0.1, 0.5, 0.75] {
                let horizon = 1.05 * closed_form_span(scheme, mode, rho0);
                let spec = DynamicsSpec {
                    time_mode: mode,
                    ..DynamicsSpec::new(scheme, 1.0, rho0)
                };
                let traj = match integrate(&spec, step, horizon) {
                    Ok(t) => t,
                    Err(e) => {
                        ok = false;
                        detail = format!("integration failed: {e}");
                        break;
                    }
                };
                let n = traj.samples.len();
                for k in 0..200 {
                    let idx = (k + 1) * (n - 1) / 200;
                    let (t, rho) = traj.samples[idx];
                    let reference = match mode {
                        TimeMode::Regular => closed_form_regular(scheme, rho0, 1.0, t),
                        TimeMode::Effective => closed_form_effective(scheme, rho0, 1.0, t),
                    }
                    .expect("closed form exists");
                    worst = worst.max((rho - reference).abs());
                }
            }
            if ok {
                ok = worst <= 1e-6;
                detail = format!("max |integrate - closed_form| = {worst:.3e}");
            }
            out.push(CheckResult::new(
                format!("closed-form agreement {scheme} ({mode:?})"),
                ok,
                detail,
            ));
        }
    }
    out
}

/// Residuals of the Lambert-W evaluation on the documented grid, plus the
/// two exact anchor points.
pub fn lambert_w() -> Vec<CheckResult> {
    let mut out = Vec::new();

    let w0 = lambert_w0(0.0).unwrap();
    out.push(CheckResult::new(
        "lambert W(0) = 0",
        w0 == 0.0,
        format!("W(0) = {w0:e}"),
    ));
    let we = lambert_w0(std::f64::consts::E).unwrap();
    out.push(CheckResult::new(
        "lambert W(e) = 1",
        (we - 1.0).abs() <= 1e-14,
        format!("|W(e) - 1| = {:.3e}", (we - 1.0).abs()),
    ));

    let mut worst = 0.0f64;
    let mut failures = 0usize;
    let n = 500;
    let neg_inv_e = -(-1.0f64).exp();
    let mut grid = Vec::with_capacity(2 * n + 2);
    for k in 0..=n {
        // x = -1/e + u with u log-spaced over [1e-9, 1/e].
        let u = 1e-9 * ((-neg_inv_e) / 1e-9f64).powf(k as f64 / n as f64);
        grid.push(neg_inv_e + u);
    }
    for k in 0..=n {
        grid.push(1e-12 * 1e18f64.powf(k as f64 / n as f64));
    }
    for &x in &grid {
        match lambert_w0(x) {
            Ok(w) => {
                let residual = (w * w.exp() - x).abs() / x.abs().max(1.0);
                worst = worst.max(residual);
                if residual > 1e-12 {
                    failures += 1;
                }
            }
            Err(_) => failures += 1,
        }
    }
    out.push(CheckResult::new(
        "lambert residual on log grid [-1/e + 1e-9, 1e6]",
        failures == 0,
        format!("{} points, worst relative residual {worst:.3e}", grid.len()),
    ));
    out
}

/// Candidates compared under budget normalization (rejection sampling shares
/// Linear-R's weight, so the named list has seven entries).
const OPTIMALITY_CANDIDATES: [SchemeId; 7] = [
    SchemeId::Grpo,
    SchemeId::LinearR,
    SchemeId::SqrtR,
    SchemeId::PlateauR,
    SchemeId::UniformR,
    SchemeId::Rloo,
    SchemeId::Kimi,
];

/// Budget-normalized hitting time of `scheme` to `rho_star`, where the
/// budget is spent over [rho0, budget_upper]. Schemes whose budget integral
/// diverges are reported as unreachable.
fn normalized_hitting_time(
    scheme: SchemeId,
    mode: TimeMode,
    rho0: f64,
    budget_upper: f64,
    rho_star: f64,
    cfg: &QuadratureConfig,
) -> Result<TimeToTarget> {
    let weight = Weight::scheme(scheme);
    let total = match budget_integral_with(&weight, rho0, budget_upper, cfg)? {
        WeightBudget::Divergent => return Ok(TimeToTarget::Unreachable),
        WeightBudget::Finite(b) => b,
    };
    let spec = DynamicsSpec {
        rho_star,
        time_mode: mode,
        ..DynamicsSpec::new(weight.scaled(1.0 / total), 1.0, rho0)
    };
    hitting_time_with(&spec, cfg)
}

/// Budget-constrained optimality on both clocks, plus the normalized-race
/// orderings of the comparison bundle.
pub fn optimality() -> Vec<CheckResult> {
    let mut out = Vec::new();
    let cfg = QuadratureConfig::default();

    for (mode, rho0, best) in [
        (TimeMode::Regular, 0.1, SchemeId::Grpo),
        (TimeMode::Effective, 0.03, SchemeId::SqrtR),
    ] {
        let bound = cs_lower_bound(mode, rho0, 1.0, 1.0).unwrap();
        let mut times = Vec::new();
        let mut ok = true;
        let mut detail = String::new();
        for scheme in OPTIMALITY_CANDIDATES {
            match normalized_hitting_time(scheme, mode, rho0, 1.0, 1.0, &cfg) {
                Ok(t) => times.push((scheme, t)),
                Err(e) => {
                    ok = false;
                    detail = format!("{scheme}: {e}");
                }
            }
        }
        if ok {
            let best_time = times
                .iter()
                .find(|(s, _)| *s == best)
                .and_then(|(_, t)| t.finite());
            match best_time {
                Some(t) => {
                    let rel = ((t - bound) / bound).abs();
                    let is_min = times.iter().all(|(s, other)| {
                        *s == best
                            || match other.finite() {
                                Some(o) => t <= o + 1e-9,
                                None => true,
                            }
                    });
                    ok = is_min && rel <= 1e-6 && bound <= t + 1e-9 * bound;
                    let listing: Vec<String> = times
                        .iter()
                        .map(|(s, t)| format!("{s}={t}"))
                        .collect();
                    detail = format!(
                        "bound = {bound:.9}, argmin time rel. gap = {rel:.3e}; {}",
                        listing.join(", ")
                    );
                }
                None => {
                    ok = false;
                    detail = format!("{best} unexpectedly unreachable");
                }
            }
        }
        out.push(CheckResult::new(
            format!("{mode:?}-time optimality: {best} attains the Cauchy-Schwarz bound"),
            ok,
            detail,
        ));
    }

    // Normalized-race orderings of the comparison bundle: GRPO is first to
    // 0.999 in regular time (rho0 = 0.1), Sqrt-R in effective time
    // (rho0 = 0.03).
    match figures::comparison_bundle(17) {
        Ok(bundle) => {
            let reg = figures::first_to_reach(&bundle.regular_csv, 0.999)
                .ok()
                .flatten();
            let eff = figures::first_to_reach(&bundle.effective_csv, 0.999)
                .ok()
                .flatten();
            let ok = matches!(&reg, Some((name, _)) if name == "GRPO")
                && matches!(&eff, Some((name, _)) if name == "SqrtR");
            out.push(CheckResult::new(
                "normalized race: first to 0.999 is GRPO (regular) / SqrtR (effective)",
                ok,
                format!("regular: {reg:?}, effective: {eff:?}"),
            ));
        }
        Err(e) => out.push(CheckResult::new(
            "normalized race: first to 0.999 is GRPO (regular) / SqrtR (effective)",
            false,
            e.to_string(),
        )),
    }

    // In the low-success effective-time regime, Linear-R beats both
    // symmetric baselines to 0.99 under the same normalization. (At targets
    // beyond ~0.996 GRPO's late sprint overtakes Linear-R, so the asymmetric
    // advantage is asserted at 0.99.)
    {
        let mut race = Vec::new();
        for scheme in [SchemeId::LinearR, SchemeId::Grpo, SchemeId::Rloo] {
            let t = normalized_hitting_time(scheme, TimeMode::Effective, 0.03, 1.0, 0.99, &cfg);
            race.push((scheme, t));
        }
        let get = |s: SchemeId| {
            race.iter()
                .find(|(x, _)| *x == s)
                .and_then(|(_, t)| t.as_ref().ok().and_then(|t| t.finite()))
        };
        let (lin, grpo, rloo) = (
            get(SchemeId::LinearR),
            get(SchemeId::Grpo),
            get(SchemeId::Rloo),
        );
        let ok = matches!((lin, grpo, rloo), (Some(l), Some(g), Some(r)) if l < g && l < r);
        out.push(CheckResult::new(
            "effective-time race to 0.99: LinearR beats GRPO and RLOO",
            ok,
            format!("LinearR = {lin:?}, GRPO = {grpo:?}, RLOO = {rloo:?}"),
        ));
    }

    out
}

/// Quadrature weight budgets against the closed-form normalizers.
pub fn budget_constants() -> Vec<CheckResult> {
    let cfg = QuadratureConfig::with_rel_tol(1e-12);
    let mut out = Vec::new();
    for rho0 in [0.03f64, 0.1] {
        let closed = [
            (SchemeId::Grpo, std::f64::consts::PI - 2.0 * rho0.sqrt().asin()),
            (SchemeId::SqrtR, 2.0 * (1.0 - rho0).sqrt().atanh()),
            (SchemeId::LinearR, (1.0f64 / rho0).ln()),
            (SchemeId::Rloo, 1.0 - rho0),
        ];
        for (scheme, expected) in closed {
            let got = budget_integral_with(&Weight::scheme(scheme), rho0, 1.0, &cfg)
                .ok()
                .and_then(|b| b.finite());
            let (passed, detail) = match got {
                Some(v) => (
                    (v - expected).abs() <= 1e-10,
                    format!("|quadrature - closed| = {:.3e}", (v - expected).abs()),
                ),
                None => (false, "integral reported divergent".into()),
            };
            out.push(CheckResult::new(
                format!("budget constant {scheme} on [{rho0}, 1]"),
                passed,
                detail,
            ));
        }
    }
    out
}

/// Independent transcription of the defining advantage formulas, kept apart
/// from the implementation it checks.
mod oracle {
    use crate::weighting::SchemeId;

    pub fn omega(scheme: SchemeId, rho: f64) -> f64 {
        match scheme {
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
        }
    }

    /// Limit-mode advantages from first principles: `ω(ρ̂)(r − ρ̂)` with the
    /// one-sided limits at ρ̂ ∈ {0, 1}, explicit leave-one-out means for
    /// RLOO, and `r/ρ̂` for rejection sampling.
    pub fn advantages(scheme: SchemeId, rewards: &[u8]) -> Vec<f64> {
        let m = rewards.len();
        let m1 = rewards.iter().filter(|&&r| r == 1).count();
        if scheme == SchemeId::Rloo {
            return rewards
                .iter()
                .enumerate()
                .map(|(i, &r)| {
                    if m < 2 {
                        return f64::NAN;
                    }
                    let others: f64 = rewards
                        .iter()
                        .enumerate()
                        .filter(|&(j, _)| j != i)
                        .map(|(_, &x)| x as f64)
                        .sum::<f64>()
                        / (m as f64 - 1.0);
                    r as f64 - others
                })
                .collect();
        }
        if m1 == 0 {
            let a = match scheme {
                SchemeId::LinearR | SchemeId::SqrtR | SchemeId::UniformR => -1.0,
                SchemeId::PlateauR => -0.5,
                _ => 0.0,
            };
            return vec![a; m];
        }
        if m1 == m {
            let a = match scheme {
                SchemeId::UniformR | SchemeId::RejectionSampling => 1.0,
                _ => 0.0,
            };
            return vec![a; m];
        }
        let rho = m1 as f64 / m as f64;
        rewards
            .iter()
            .map(|&r| match scheme {
                SchemeId::RejectionSampling => r as f64 / rho,
                _ => omega(scheme, rho) * (r as f64 - rho),
            })
            .collect()
    }
}

/// Every scheme against the brute-force oracle on all reward patterns with
/// M ≤ 8, plus the RLOO aggregation factor identity.
pub fn advantage_tables() -> Vec<CheckResult> {
    let policy = BoundaryPolicy::default();
    let mut out = Vec::new();

    for scheme in SchemeId::ALL {
        let mut worst = 0.0f64;
        let mut checked = 0usize;
        let mut ok = true;
        for m in 1..=8usize {
            if scheme == SchemeId::Rloo && m == 1 {
                // Leave-one-out is undefined; the implementation must refuse.
                let g = RewardGroup::new(&[1]).unwrap();
                ok &= crate::weighting::rloo_advantages(&g).is_err();
                continue;
            }
            for bits in 0..(1u32 << m) {
                let rewards: Vec<u8> = (0..m).map(|i| ((bits >> i) & 1) as u8).collect();
                let g = RewardGroup::new(&rewards).unwrap();
                let got = advantages(scheme, &g, policy).unwrap();
                let expected = oracle::advantages(scheme, &rewards);
                for (a, b) in got.values.iter().zip(&expected) {
                    worst = worst.max((a - b).abs());
                }
                checked += 1;
            }
        }
        ok &= worst <= 1e-12;
        out.push(CheckResult::new(
            format!("advantage table {scheme} (all patterns, M <= 8)"),
            ok,
            format!("{checked} patterns, max deviation {worst:.3e}"),
        ));
    }

    // RLOO's grouped update carries the factor M/(M−1)·ρ̂(1−ρ̂).
    let mut worst = 0.0f64;
    for m in 2..=8usize {
        for bits in 0..(1u32 << m) {
            let rewards: Vec<u8> = (0..m).map(|i| ((bits >> i) & 1) as u8).collect();
            let g = RewardGroup::new(&rewards).unwrap();
            let a = crate::weighting::rloo_advantages(&g).unwrap();
            let rho = g.rho_hat();
            let coef = m as f64 / (m as f64 - 1.0) * rho * (1.0 - rho);
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
            worst = worst.max((c1 - coef).abs()).max((c0 + coef).abs());
        }
    }
    out.push(CheckResult::new(
        "RLOO aggregation factor M/(M-1)·rho(1-rho)",
        worst <= 1e-12,
        format!("max deviation {worst:.3e}"),
    ));
    out
}

/// Finite-difference check `F' = ω` for every scheme with a closed-form
/// surrogate, at 50 interior points.
pub fn surrogates() -> Vec<CheckResult> {
    let closed_form: [SchemeId; 6] = [
        SchemeId::Rloo,
        SchemeId::Grpo,
        SchemeId::LinearR,
        SchemeId::SqrtR,
        SchemeId::UniformR,
        SchemeId::PlateauR,
    ];
    let h = 1e-6;
    let mut out = Vec::new();
    for scheme in closed_form {
        let mut worst = 0.0f64;
        for k in 0..50 {
            let rho = 0.05 + 0.9 * k as f64 / 49.0;
            let fd = (surrogate(scheme, rho + h).unwrap() - surrogate(scheme, rho - h).unwrap())
                / (2.0 * h);
            let w = weight(scheme, rho).unwrap();
            worst = worst.max(((fd - w) / w).abs());
        }
        out.push(CheckResult::new(
            format!("surrogate derivative {scheme}"),
            worst <= 1e-5,
            format!("max relative FD error {worst:.3e}"),
        ));
    }
    out
}

/// Exhaustive all-fail-group contract for M in {2, 4, 8, 16}.
pub fn zero_group() -> Vec<CheckResult> {
    let mut out = Vec::new();
    for beta in [1.0, 8.0] {
        let mut ok = true;
        let mut detail = String::new();
        'outer: for m in [2usize, 4, 8, 16] {
            let g = RewardGroup::new(&vec![0u8; m]).unwrap();
            for scheme in SchemeId::ALL {
                let plain = BoundaryPolicy::default();
                let dl = update_prompt(0.0, &g, scheme, beta, plain).unwrap();
                let expected = match scheme {
                    SchemeId::LinearR | SchemeId::SqrtR | SchemeId::UniformR => 1.0 / beta,
                    SchemeId::PlateauR => 0.5 / beta,
                    _ => 0.0,
                };
                if dl != expected {
                    ok = false;
                    detail = format!("{scheme} M={m}: got {dl}, want {expected}");
                    break 'outer;
                }
                let warm = BoundaryPolicy {
                    warmup_active: true,
                    ..plain
                };
                if update_prompt(0.0, &g, scheme, beta, warm).unwrap() != 0.0 {
                    ok = false;
                    detail = format!("{scheme} M={m}: warmup update not zero");
                    break 'outer;
                }
            }
        }
        if ok {
            detail = "exact for all schemes, M in {2,4,8,16}, limit and warmup".into();
        }
        out.push(CheckResult::new(
            format!("zero-success group updates (beta = {beta})"),
            ok,
            detail,
        ));
    }
    out
}

fn separation_config(scheme: SchemeId, seed: u64) -> SimConfig {
    let mut config = SimConfig::new(scheme);
    config.m = 16;
    config.population = 512;
    config.batch_size = 256;
    config.steps = 300;
    config.beta = 8.0;
    config.init = InitSpec::BetaDist {
        alpha: 0.3,
        beta: 3.0,
    };
    config.seed = seed;
    config
}

pub const ASYMMETRIC: [SchemeId; 3] = [SchemeId::LinearR, SchemeId::SqrtR, SchemeId::PlateauR];
pub const SYMMETRIC: [SchemeId; 3] = [SchemeId::Grpo, SchemeId::Rloo, SchemeId::UniformR];

/// Directional separation: hard-prompt-heavy init, M = 16, 300 steps,
/// 5 seeds; each asymmetric scheme's final mean ρ must exceed each symmetric
/// scheme's in at least 4 of 5 seeds.
pub fn separation() -> Vec<CheckResult> {
    let seeds: [u64; 5] = [1, 2, 3, 4, 5];
    let mut finals = std::collections::HashMap::new();
    for scheme in ASYMMETRIC.iter().chain(SYMMETRIC.iter()) {
        for &seed in &seeds {
            let trace = run(&separation_config(*scheme, seed)).expect("valid config");
            finals.insert((*scheme, seed), trace.records.last().unwrap().mean_rho);
        }
    }
    let mut out = Vec::new();
    for a in ASYMMETRIC {
        for s in SYMMETRIC {
            let mut wins = 0;
            let mut pairs = Vec::new();
            for &seed in &seeds {
                let fa = finals[&(a, seed)];
                let fs = finals[&(s, seed)];
                if fa > fs {
                    wins += 1;
                }
                pairs.push(format!("seed {seed}: {fa:.4} vs {fs:.4}"));
            }
            out.push(CheckResult::new(
                format!("separation {a} > {s}"),
                wins >= 4,
                format!("{wins}/5 seeds ({})", pairs.join("; ")),
            ));
        }
    }
    out
}

fn determinism_config() -> SimConfig {
    let mut config = SimConfig::new(SchemeId::LinearR);
    config.m = 16;
    config.population = 128;
    config.batch_size = 64;
    config.steps = 100;
    config.beta = 8.0;
    config.seed = 42;
    config.checkpoint_steps = vec![5, 50, 100];
    config
}

fn trace_artifacts(config: &SimConfig) -> (String, Vec<String>) {
    let trace = run(config).expect("valid config");
    let csv = csvio::trace_csv(&trace.records, 17);
    let hists = trace
        .checkpoints
        .iter()
        .map(|(_, h)| csvio::histogram_csv(h, 17))
        .collect();
    (csv, hists)
}

/// Byte-identical traces across repeated runs and across thread counts.
pub fn determinism() -> Vec<CheckResult> {
    let config = determinism_config();
    let (base_trace, base_hists) = trace_artifacts(&config);

    let repeat = trace_artifacts(&config);
    let mut out = vec![CheckResult::new(
        "repeated run produces byte-identical CSVs",
        repeat.0 == base_trace && repeat.1 == base_hists,
        format!(
            "{} trace bytes, {} checkpoint histograms",
            base_trace.len(),
            base_hists.len()
        ),
    )];

    for threads in [1usize, 4] {
        let pool = ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        let (trace, hists) = pool.install(|| trace_artifacts(&config));
        out.push(CheckResult::new(
            format!("{threads}-thread run produces byte-identical CSVs"),
            trace == base_trace && hists == base_hists,
            "compared against the ambient-pool run".to_string(),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_rejected() {
        assert!(run_suite("nope").is_err());
    }

    #[test]
    fn quick_suites_pass() {
        for name in ["lambert-w", "budget-constants", "advantage-tables", "surrogates", "zero-group"] {
            for check in run_suite(name).unwrap() {
                assert!(check.passed, "{name}: {} — {}", check.name, check.detail);
            }
        }
    }
}
