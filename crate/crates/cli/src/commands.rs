//! Implementations of the five subcommands.

use std::fs;
use std::path::{Path, PathBuf};

use rlvr_core::csvio::{self, DEFAULT_SIG_DIGITS};
use rlvr_core::dynamics::{
    budget_integral_with, closed_form_effective, closed_form_regular, cs_lower_bound,
    hitting_time_with, integrate_sampled, optimal_weight, DynamicsSpec, TimeMode, TimeToTarget,
    Trajectory, Weight, WeightBudget,
};
use rlvr_core::figures;
use rlvr_core::popsim::{self, InitSpec, SimConfig};
use rlvr_core::quad::QuadratureConfig;
use rlvr_core::verify as suites;
use rlvr_core::weighting::{
    advantages as advantage_set, effective_weight, weight, BoundaryPolicy, RewardGroup, SchemeId,
    ZeroGroupMode,
};

use crate::config::Resolver;
use crate::{
    AdvantagesArgs, CliError, DynamicsArgs, OptimalArgs, SimulateArgs, VerifyArgs,
};

fn parse_schemes(raw: &str) -> Result<Vec<SchemeId>, CliError> {
    if raw.eq_ignore_ascii_case("all") {
        return Ok(SchemeId::ALL.to_vec());
    }
    raw.split(',')
        .map(|s| s.trim().parse::<SchemeId>().map_err(CliError::from))
        .collect()
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::config(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents)
        .map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

fn join_values(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

pub fn advantages(args: AdvantagesArgs) -> Result<(), CliError> {
    let scheme: SchemeId = args.scheme.parse()?;
    let rewards: Vec<u8> = args
        .rewards
        .split(',')
        .map(|s| match s.trim() {
            "0" => Ok(0u8),
            "1" => Ok(1u8),
            other => Err(CliError::config(format!(
                "rewards must be a comma-separated list of 0/1, found `{other}` \
                 (usage: --rewards 1,0,0,1)"
            ))),
        })
        .collect::<Result<_, _>>()?;
    let group = RewardGroup::new(&rewards)?;
    let policy = BoundaryPolicy {
        zero_group_mode: args.zero_mode.parse::<ZeroGroupMode>()?,
        warmup_active: args.warmup,
    };
    let set = advantage_set(scheme, &group, policy)?;

    let rho = group.rho_hat();
    println!("scheme = {scheme}");
    println!("rho_hat = {rho} ({}/{})", group.m1(), group.m());
    match weight(scheme, rho) {
        Ok(w) => println!("weight = {w}"),
        Err(_) => println!("weight = divergent (boundary rho_hat)"),
    }
    println!("effective_weight = {}", effective_weight(scheme, rho)?);
    println!("advantages = {}", join_values(&set.values));
    Ok(())
}

pub fn dynamics(args: DynamicsArgs) -> Result<(), CliError> {
    let mut resolver = Resolver::load(args.config.as_deref())?;
    let precision = resolver.value("precision", args.precision, DEFAULT_SIG_DIGITS)?;
    let output_dir = PathBuf::from(resolver.value(
        "output_dir",
        args.output_dir.map(|p| p.display().to_string()),
        "out".to_string(),
    )?);

    if args.figure4 {
        println!("{}", resolver.banner());
        let bundle = figures::comparison_bundle(precision)?;
        let reg = write_file(&output_dir, "figure4_regular.csv", &bundle.regular_csv)?;
        let eff = write_file(&output_dir, "figure4_effective.csv", &bundle.effective_csv)?;
        println!("wrote {}", reg.display());
        println!("wrote {}", eff.display());
        if let Some((name, t)) = figures::first_to_reach(&bundle.regular_csv, 0.999)? {
            println!("regular: first to 0.999 is {name} at t = {t}");
        }
        if let Some((name, t)) = figures::first_to_reach(&bundle.effective_csv, 0.999)? {
            println!("effective: first to 0.999 is {name} at tau = {t}");
        }
        return Ok(());
    }

    let schemes = parse_schemes(&resolver.required("scheme", args.scheme.clone())?)?;
    let mode: TimeMode = resolver
        .value("mode", args.mode, "regular".to_string())?
        .parse()?;
    let beta = resolver.value("beta", args.beta, 1.0)?;
    let rho0 = resolver.required("rho0", args.rho0)?;
    let rho_star = resolver.value("rho_star", args.rho_star, 1.0)?;
    let budget = resolver.value("budget", args.budget, 1.0)?;
    let normalized = args.normalized
        || resolver
            .optional("normalized", None::<bool>)?
            .unwrap_or(false);
    let step = resolver.value("step", args.step, 1e-4)?;
    let single_time = match mode {
        TimeMode::Regular => resolver.optional("t", args.t)?,
        TimeMode::Effective => resolver.optional("tau", args.tau)?,
    };
    let horizon = match single_time {
        Some(t) => t,
        None => resolver.value("horizon", args.horizon, 10.0)?,
    };
    println!("{}", resolver.banner());

    let time_label = match mode {
        TimeMode::Regular => "t",
        TimeMode::Effective => "tau",
    };
    for scheme in schemes {
        let traj = if args.closed_form {
            let rows = 1000usize;
            let samples: Result<Vec<(f64, f64)>, rlvr_core::Error> = (0..=rows)
                .map(|i| {
                    let t = horizon * i as f64 / rows as f64;
                    let rho = match mode {
                        TimeMode::Regular => closed_form_regular(scheme, rho0, beta, t),
                        TimeMode::Effective => closed_form_effective(scheme, rho0, beta, t),
                    }?;
                    Ok((t, rho))
                })
                .collect();
            Trajectory {
                samples: samples?,
                time_mode: mode,
            }
        } else {
            let spec = DynamicsSpec {
                rho_star,
                time_mode: mode,
                normalized,
                budget,
                ..DynamicsSpec::new(scheme, beta, rho0)
            };
            let record_every = ((horizon / step) as usize / 2000).max(1);
            integrate_sampled(&spec, step, horizon, record_every)?
        };
        let name = format!(
            "trajectory_{}_{}.csv",
            scheme.tag().to_ascii_lowercase(),
            time_label
        );
        let path = write_file(&output_dir, &name, &csvio::trajectory_csv(&traj, precision))?;
        println!(
            "scheme={scheme} mode={mode:?} {time_label}={horizon} final_rho={}",
            traj.final_rho()
        );
        println!("wrote {}", path.display());
    }
    Ok(())
}

pub fn optimal(args: OptimalArgs) -> Result<(), CliError> {
    let mode: TimeMode = args.mode.parse()?;
    let schemes = parse_schemes(&args.schemes)?;
    let (rho0, rho_star, budget) = (args.rho0, args.rho_star, args.budget);
    let cfg = QuadratureConfig::default();

    let bound = cs_lower_bound(mode, rho0, rho_star, 1.0)?;
    let mut rows = Vec::new();
    for scheme in schemes {
        let w = Weight::scheme(scheme);
        match budget_integral_with(&w, rho0, rho_star, &cfg)? {
            WeightBudget::Divergent => rows.push((scheme, None, None)),
            WeightBudget::Finite(total) => {
                let constant = budget / total;
                let spec = DynamicsSpec {
                    rho_star,
                    time_mode: mode,
                    ..DynamicsSpec::new(w.scaled(constant), 1.0, rho0)
                };
                let t = hitting_time_with(&spec, &cfg)?;
                rows.push((scheme, Some((total, constant)), Some(t)));
            }
        }
    }

    println!("# optimal: mode={mode:?} interval=[{rho0}, {rho_star}] budget={budget}");
    println!("scheme,budget_integral,constant,hitting_time");
    for (scheme, norm, time) in &rows {
        match (norm, time) {
            (Some((total, constant)), Some(t)) => {
                println!("{scheme},{total},{constant},{t}");
            }
            _ => println!("{scheme},divergent,not normalizable,unreachable"),
        }
    }
    println!("cs_lower_bound,,,{bound}");

    let argmin = rows
        .iter()
        .filter_map(|(s, _, t)| t.as_ref().and_then(TimeToTarget::finite).map(|t| (*s, t)))
        .min_by(|a, b| a.1.total_cmp(&b.1));
    match argmin {
        Some((scheme, best)) => {
            println!("argmin={scheme}");
            if bound > best * (1.0 + 1e-9) {
                return Err(CliError::numeric(format!(
                    "Cauchy-Schwarz bound {bound} exceeds best hitting time {best}"
                )));
            }
        }
        // A single candidate is trivially the argmin even when it never
        // reaches the target.
        None if rows.len() == 1 => println!("argmin={}", rows[0].0),
        None => println!("argmin=none (no scheme reaches the target in finite time)"),
    }

    let opt = optimal_weight(mode, rho0, rho_star)?;
    let shape = match mode {
        TimeMode::Regular => "1/sqrt(rho(1-rho))",
        TimeMode::Effective => "1/(rho*sqrt(1-rho))",
    };
    let degenerate = if opt.near_degenerate {
        " [near-degenerate interval]"
    } else {
        ""
    };
    println!("optimal_weight = {} * {shape}{degenerate}", opt.constant);
    Ok(())
}

fn parse_init(raw: &str) -> Result<InitSpec, CliError> {
    let (kind, rest) = raw
        .split_once(':')
        .ok_or_else(|| CliError::config(format!("init `{raw}` (expected beta:A,B | point:RHO | hist:PATH)")))?;
    match kind {
        "beta" => {
            let (a, b) = rest
                .split_once(',')
                .ok_or_else(|| CliError::config(format!("beta init needs two shapes, got `{rest}`")))?;
            let alpha: f64 = a
                .trim()
                .parse()
                .map_err(|_| CliError::config(format!("bad beta shape `{a}`")))?;
            let beta: f64 = b
                .trim()
                .parse()
                .map_err(|_| CliError::config(format!("bad beta shape `{b}`")))?;
            Ok(InitSpec::BetaDist { alpha, beta })
        }
        "point" => {
            let rho: f64 = rest
                .trim()
                .parse()
                .map_err(|_| CliError::config(format!("bad point-mass rho `{rest}`")))?;
            Ok(InitSpec::PointMass { rho })
        }
        "hist" => Ok(InitSpec::HistogramFile {
            path: PathBuf::from(rest),
        }),
        other => Err(CliError::config(format!(
            "unknown init kind `{other}` (expected beta, point, or hist)"
        ))),
    }
}

pub fn simulate(args: SimulateArgs) -> Result<(), CliError> {
    let mut resolver = Resolver::load(args.config.as_deref())?;
    let scheme: SchemeId = resolver.required("scheme", args.scheme)?.parse()?;
    let mut config = SimConfig::new(scheme);
    config.m = resolver.value("m", args.m, config.m)?;
    config.population = resolver.value("population", args.population, config.population)?;
    config.batch_size = resolver.value("batch_size", args.batch_size, config.batch_size)?;
    config.steps = resolver.value("steps", args.steps, config.steps)?;
    let lr = resolver.optional("lr", args.lr)?;
    config.beta = match lr {
        Some(lr) if args.beta.is_none() => {
            if lr <= 0.0 {
                return Err(CliError::config(format!("lr must be positive, got {lr}")));
            }
            1.0 / lr
        }
        Some(_) => return Err(CliError::config("pass either --beta or --lr, not both")),
        None => resolver.value("beta", args.beta, config.beta)?,
    };
    config.warmup_steps = resolver.value("warmup_steps", args.warmup_steps, 0)?;
    config.zero_group_mode = resolver
        .value("zero_mode", args.zero_mode, "limit".to_string())?
        .parse()?;
    config.seed = resolver.value("seed", args.seed, 0)?;
    if let Some(raw) = resolver.optional("init", args.init)? {
        config.init = parse_init(&raw)?;
    } else {
        // Documented default: hard-prompt-heavy Beta(0.3, 3).
    }
    if let Some(raw) = resolver.optional("checkpoints", args.checkpoints)? {
        config.checkpoint_steps = raw
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| CliError::config(format!("bad checkpoint step `{s}`")))
            })
            .collect::<Result<_, _>>()?;
    }
    let precision = resolver.value("precision", args.precision, DEFAULT_SIG_DIGITS)?;
    let output_dir = PathBuf::from(resolver.value(
        "output_dir",
        args.output_dir.map(|p| p.display().to_string()),
        "out".to_string(),
    )?);
    config.validate()?;
    println!("{}", resolver.banner());

    let trace = popsim::run(&config)?;
    let path = write_file(&output_dir, "trace.csv", &csvio::trace_csv(&trace.records, precision))?;
    println!("wrote {}", path.display());
    for (step, hist) in &trace.checkpoints {
        let name = format!("hist_step_{step}.csv");
        let path = write_file(&output_dir, &name, &csvio::histogram_csv(hist, precision))?;
        println!("wrote {}", path.display());
    }
    println!(
        "final_mean_rho={}",
        trace.records.last().map(|r| r.mean_rho).unwrap_or(f64::NAN)
    );
    Ok(())
}

pub fn verify(args: VerifyArgs) -> Result<(), CliError> {
    if args.list {
        for name in suites::SUITES {
            println!("{name}");
        }
        return Ok(());
    }
    let selector = args.suite.unwrap_or_else(|| "all".to_string());
    let names: Vec<&str> = if selector == "all" {
        suites::SUITES.to_vec()
    } else {
        // Validate the name before running anything.
        if !suites::SUITES.contains(&selector.as_str()) {
            return Err(CliError::config(format!(
                "unknown suite `{selector}`; available: {} (or `all`)",
                suites::SUITES.join(", ")
            )));
        }
        vec![suites::SUITES
            .iter()
            .find(|s| **s == selector)
            .copied()
            .unwrap()]
    };

    let mut failed = 0usize;
    let mut total = 0usize;
    for name in names {
        let started = std::time::Instant::now();
        let checks = suites::run_suite(name)?;
        let elapsed = started.elapsed();
        for check in &checks {
            println!("{} [{name}] {}: {}", check.status(), check.name, check.detail);
            total += 1;
            failed += usize::from(!check.passed);
        }
        println!("# suite {name} finished in {elapsed:.2?}");
    }
    println!("# {} checks, {} failed", total, failed);
    if failed > 0 {
        return Err(CliError::silent(4));
    }
    Ok(())
}
