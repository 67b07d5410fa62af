//! Finite-sample population simulator.
//!
//! A population of prompts carries latent success log-odds `L`. Each step
//! samples a batch of prompts without replacement, draws `M` Bernoulli
//! rollouts per prompt at its current success rate, and applies the
//! advantage-driven log-odds update
//!
//! ```text
//! L' = L + (A1·[M1 > 0] − A0·[M0 > 0]) / β
//! ```
//!
//! where `A1`/`A0` are the success/failure advantages of the drawn group.
//! When both classes appear this is exactly `L + ω(ρ̂)/β` for every mean-zero
//! scheme; all-fail groups move only the schemes whose failure advantage has
//! a non-zero limit. All randomness flows from counter-based streams keyed by
//! `(seed, prompt, step)`, so a run is a pure function of its `SimConfig` —
//! identical configs produce bit-identical traces at any thread count.

mod rng;

pub use rng::{Stream, StreamKind};

use std::path::PathBuf;

use rand_distr::{Beta, Distribution};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::util::{logistic, logit};
use crate::weighting::{advantages, BoundaryPolicy, RewardGroup, SchemeId, ZeroGroupMode};

/// Initial distribution of per-prompt success rates.
#[derive(Debug, Clone)]
pub enum InitSpec {
    /// Beta(alpha, beta) draw per prompt.
    BetaDist { alpha: f64, beta: f64 },
    /// Every prompt starts at the same rate.
    PointMass { rho: f64 },
    /// Discrete distribution loaded from a `rho,percent` CSV file.
    HistogramFile { path: PathBuf },
    /// Discrete distribution given inline; percents must sum to 100 ± 0.01.
    Discrete { support: Vec<(f64, f64)> },
}

impl Default for InitSpec {
    /// Hard-prompt-heavy default: most mass well below ρ = 0.1.
    fn default() -> Self {
        InitSpec::BetaDist {
            alpha: 0.3,
            beta: 3.0,
        }
    }
}

/// Full configuration of one simulation run.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub scheme: SchemeId,
    /// Rollouts per prompt per step.
    pub m: usize,
    /// Number of prompts in the population.
    pub population: usize,
    /// Prompts sampled per step (without replacement).
    pub batch_size: usize,
    pub steps: usize,
    /// Update scale; a configured learning rate `lr` maps to `beta = 1/lr`.
    pub beta: f64,
    /// Steps during which all-fail groups are masked to zero advantage.
    pub warmup_steps: usize,
    pub zero_group_mode: ZeroGroupMode,
    pub seed: u64,
    pub init: InitSpec,
    /// Steps at which a ρ̂ histogram of the sampled batch is recorded.
    pub checkpoint_steps: Vec<usize>,
}

impl SimConfig {
    pub fn new(scheme: SchemeId) -> Self {
        Self {
            scheme,
            m: 16,
            population: 512,
            batch_size: 256,
            steps: 100,
            beta: 8.0,
            warmup_steps: 0,
            zero_group_mode: ZeroGroupMode::Limit,
            seed: 0,
            init: InitSpec::default(),
            checkpoint_steps: Vec::new(),
        }
    }

    /// Interpret a learning rate as `beta = 1/lr`.
    pub fn with_lr(mut self, lr: f64) -> Self {
        self.beta = 1.0 / lr;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::Config("m must be positive".into()));
        }
        if self.scheme == SchemeId::Rloo && self.m < 2 {
            return Err(Error::Config("RLOO needs m >= 2".into()));
        }
        if self.population == 0 {
            return Err(Error::Config("population must be positive".into()));
        }
        if self.batch_size == 0 || self.batch_size > self.population {
            return Err(Error::Config(format!(
                "batch_size must lie in [1, population], got {} of {}",
                self.batch_size, self.population
            )));
        }
        if self.steps == 0 {
            return Err(Error::Config("steps must be positive".into()));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::Config(format!("beta must be positive, got {}", self.beta)));
        }
        match &self.init {
            InitSpec::BetaDist { alpha, beta } => {
                if !(alpha > &0.0 && beta > &0.0) {
                    return Err(Error::Config("beta-distribution shapes must be positive".into()));
                }
            }
            InitSpec::PointMass { rho } => {
                if !(rho > &0.0 && rho < &1.0) {
                    return Err(Error::Config(format!(
                        "point-mass rho must lie in (0, 1), got {rho}"
                    )));
                }
            }
            InitSpec::Discrete { support } => validate_support(support)?,
            InitSpec::HistogramFile { .. } => {}
        }
        Ok(())
    }
}

fn validate_support(support: &[(f64, f64)]) -> Result<()> {
    if support.is_empty() {
        return Err(Error::Config("init histogram has no rows".into()));
    }
    let mut total = 0.0;
    for &(rho, percent) in support {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::Config(format!(
                "init histogram rho values must lie in (0, 1), got {rho}"
            )));
        }
        if !(percent >= 0.0) {
            return Err(Error::Config(format!(
                "init histogram percents must be non-negative, got {percent}"
            )));
        }
        total += percent;
    }
    if (total - 100.0).abs() > 0.01 {
        return Err(Error::Config(format!(
            "init histogram percents must sum to 100 +/- 0.01, got {total}"
        )));
    }
    Ok(())
}

/// Latent success log-odds, one per prompt.
#[derive(Debug, Clone, PartialEq)]
pub struct PromptPopulation {
    logodds: Vec<f64>,
}

impl PromptPopulation {
    /// Draw the initial population. Per-prompt init streams keep the result
    /// independent of traversal order.
    pub fn from_init(init: &InitSpec, size: usize, seed: u64) -> Result<Self> {
        let support;
        let init = match init {
            InitSpec::HistogramFile { path } => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    Error::Config(format!("cannot read init histogram {}: {e}", path.display()))
                })?;
                support = InitSpec::Discrete {
                    support: crate::csvio::parse_init_histogram(&text)?,
                };
                &support
            }
            other => other,
        };
        let logodds = match init {
            InitSpec::BetaDist { alpha, beta } => {
                let dist = Beta::new(*alpha, *beta)
                    .map_err(|e| Error::Config(format!("invalid beta distribution: {e}")))?;
                (0..size)
                    .map(|i| {
                        let mut stream = Stream::for_init(seed, i);
                        let rho: f64 = dist.sample(&mut stream);
                        logit(rho.clamp(1e-300, 1.0 - 1e-16))
                    })
                    .collect()
            }
            InitSpec::PointMass { rho } => vec![logit(*rho); size],
            InitSpec::Discrete { support } => {
                validate_support(support)?;
                let total: f64 = support.iter().map(|s| s.1).sum();
                (0..size)
                    .map(|i| {
                        let mut stream = Stream::for_init(seed, i);
                        let u = stream.next_f64() * total;
                        let mut acc = 0.0;
                        let mut chosen = support[support.len() - 1].0;
                        for &(rho, percent) in support {
                            acc += percent;
                            if u < acc {
                                chosen = rho;
                                break;
                            }
                        }
                        logit(chosen)
                    })
                    .collect()
            }
            InitSpec::HistogramFile { .. } => unreachable!("resolved above"),
        };
        Ok(Self { logodds })
    }

    pub fn size(&self) -> usize {
        self.logodds.len()
    }

    pub fn logodds(&self) -> &[f64] {
        &self.logodds
    }

    pub fn rho(&self, prompt: usize) -> f64 {
        logistic(self.logodds[prompt])
    }

    pub fn mean_rho(&self) -> f64 {
        self.logodds.iter().map(|&l| logistic(l)).sum::<f64>() / self.logodds.len() as f64
    }

    pub fn mean_logodds(&self) -> f64 {
        self.logodds.iter().sum::<f64>() / self.logodds.len() as f64
    }
}

/// Draw `m` Bernoulli rollouts at success rate `rho` from a stream.
pub fn sample_group(rho: f64, m: usize, stream: &mut Stream) -> RewardGroup {
    let rewards: Vec<u8> = (0..m).map(|_| u8::from(stream.bernoulli(rho))).collect();
    RewardGroup::new(&rewards).expect("m >= 1 and binary rewards")
}

/// Advantage-driven log-odds update for one prompt.
pub fn update_prompt(
    l: f64,
    group: &RewardGroup,
    scheme: SchemeId,
    beta: f64,
    policy: BoundaryPolicy,
) -> Result<f64> {
    let adv = advantages(scheme, group, policy)?;
    let mut a1 = 0.0;
    let mut a0 = 0.0;
    for (v, &r) in adv.values.iter().zip(group.rewards()) {
        if r == 1 {
            a1 = *v;
        } else {
            a0 = *v;
        }
    }
    // Classes that were not observed contribute nothing (their slot stays 0).
    Ok(l + (a1 - a0) / beta)
}

/// Per-step telemetry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    /// 1-based step index.
    pub step: usize,
    /// Mean population success rate after the step's updates.
    pub mean_rho: f64,
    /// Mean empirical success rate of the sampled batch.
    pub mean_rho_hat: f64,
    /// Fraction of sampled groups with no successes.
    pub frac_zero: f64,
    /// Fraction of sampled groups with all successes.
    pub frac_full: f64,
}

/// Binned distribution of ρ̂ over a set of same-size groups: one bin per
/// attainable value 0, 1/M, ..., 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    m: usize,
    percentages: Vec<f64>,
}

impl Histogram {
    pub fn m(&self) -> usize {
        self.m
    }

    /// Percentages per bin; `bin_start(i) = i / M`.
    pub fn percentages(&self) -> &[f64] {
        &self.percentages
    }

    pub fn bin_start(&self, i: usize) -> f64 {
        i as f64 / self.m as f64
    }
}

/// Percentage of groups at each attainable ρ̂ value.
pub fn rho_hat_histogram(groups: &[RewardGroup], m: usize) -> Result<Histogram> {
    if m == 0 {
        return Err(Error::Domain("m must be positive".into()));
    }
    if groups.is_empty() {
        return Err(Error::Domain("histogram needs at least one group".into()));
    }
    let mut counts = vec![0usize; m + 1];
    for g in groups {
        if g.m() != m {
            return Err(Error::Domain(format!(
                "mixed group sizes: expected {m}, found {}",
                g.m()
            )));
        }
        counts[g.m1()] += 1;
    }
    let total = groups.len() as f64;
    Ok(Histogram {
        m,
        percentages: counts.iter().map(|&c| 100.0 * c as f64 / total).collect(),
    })
}

/// Full result of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    pub records: Vec<StepRecord>,
    pub checkpoints: Vec<(usize, Histogram)>,
}

/// Sample `k` distinct indices from `[0, n)` via partial Fisher-Yates.
fn sample_without_replacement(n: usize, k: usize, stream: &mut Stream) -> Vec<usize> {
    let mut indices: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = i + stream.next_index(n - i);
        indices.swap(i, j);
    }
    indices.truncate(k);
    indices
}

/// Run the simulation. Deterministic in `config`; per-prompt work may be
/// executed on any number of threads without changing the result.
pub fn run(config: &SimConfig) -> Result<SimTrace> {
    config.validate()?;
    let init = match &config.init {
        // Resolve files up front so a bad path fails before any stepping.
        InitSpec::HistogramFile { path } => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                Error::Config(format!("cannot read init histogram {}: {e}", path.display()))
            })?;
            InitSpec::Discrete {
                support: crate::csvio::parse_init_histogram(&text)?,
            }
        }
        other => other.clone(),
    };
    let mut population = PromptPopulation::from_init(&init, config.population, config.seed)?;

    let mut records = Vec::with_capacity(config.steps);
    let mut checkpoints = Vec::new();

    for step in 1..=config.steps {
        let policy = BoundaryPolicy {
            zero_group_mode: config.zero_group_mode,
            warmup_active: step <= config.warmup_steps,
        };
        let mut batch_stream = Stream::for_batch(config.seed, step);
        let batch = sample_without_replacement(config.population, config.batch_size, &mut batch_stream);

        // Independent per-prompt work; `collect` keeps batch-slot order, so
        // the reduction below is identical at any thread count.
        let updates: Result<Vec<(usize, RewardGroup, f64)>> = batch
            .par_iter()
            .map(|&prompt| {
                let mut stream = Stream::for_rollouts(config.seed, prompt, step);
                let rho = population.rho(prompt);
                let group = sample_group(rho, config.m, &mut stream);
                let new_l = update_prompt(
                    population.logodds[prompt],
                    &group,
                    config.scheme,
                    config.beta,
                    policy,
                )?;
                Ok((prompt, group, new_l))
            })
            .collect();
        let updates = updates?;

        let mut sum_rho_hat = 0.0;
        let mut zero = 0usize;
        let mut full = 0usize;
        for (prompt, group, new_l) in &updates {
            population.logodds[*prompt] = *new_l;
            sum_rho_hat += group.rho_hat();
            zero += usize::from(group.is_all_fail());
            full += usize::from(group.is_all_pass());
        }
        let n = updates.len() as f64;
        records.push(StepRecord {
            step,
            mean_rho: population.mean_rho(),
            mean_rho_hat: sum_rho_hat / n,
            frac_zero: zero as f64 / n,
            frac_full: full as f64 / n,
        });

        if config.checkpoint_steps.contains(&step) {
            let groups: Vec<RewardGroup> = updates.into_iter().map(|(_, g, _)| g).collect();
            checkpoints.push((step, rho_hat_histogram(&groups, config.m)?));
        }
    }

    Ok(SimTrace {
        records,
        checkpoints,
    })
}
