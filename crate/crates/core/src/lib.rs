//! Numerical toolkit for prompt-weighting schemes in binary-reward RL.
//!
//! Policy-optimization algorithms such as GRPO and RLOO effectively weight
//! each prompt's gradient by a function `ω(ρ)` of its success rate; this
//! crate implements a family of such weightings (including asymmetric ones
//! that keep pushing on all-fail groups), the per-rollout advantages they
//! induce, the success-rate dynamics they generate under KL-proximal
//! updates in both the optimization clock and the rollout-cost-adjusted
//! effective clock, budget-constrained optimality analysis, and a
//! deterministic finite-sample population simulator.
//!
//! Modules:
//! - [`weighting`]: schemes, weights, advantages, surrogate rewards.
//! - [`dynamics`]: recursion, ODE integration, closed forms, hitting times,
//!   weight budgets, optimal weights, Lambert-W.
//! - [`popsim`]: Bernoulli rollout simulation over a prompt population.
//! - [`figures`]: budget-normalized comparison tables as CSV.
//! - [`verify`]: self-check suites backing the `verify` CLI subcommand.
//!
//! ```
//! use rlvr_core::weighting::{advantages, BoundaryPolicy, RewardGroup, SchemeId};
//! use rlvr_core::dynamics::{closed_form_regular, DynamicsSpec, hitting_time, TimeToTarget};
//!
//! // One success in four rollouts under Linear-R: failures get advantage -1.
//! let group = RewardGroup::new(&[1, 0, 0, 0])?;
//! let adv = advantages(SchemeId::LinearR, &group, BoundaryPolicy::default())?;
//! assert_eq!(adv.values, vec![3.0, -1.0, -1.0, -1.0]);
//!
//! // GRPO's success rate reaches 1 in finite regular time...
//! let rho = closed_form_regular(SchemeId::Grpo, 0.5, 1.0, std::f64::consts::FRAC_PI_2)?;
//! assert_eq!(rho, 1.0);
//! // ...while RLOO's logistic trajectory never does.
//! let spec = DynamicsSpec::new(SchemeId::Rloo, 1.0, 0.5);
//! assert_eq!(hitting_time(&spec)?, TimeToTarget::Unreachable);
//! # Ok::<(), rlvr_core::Error>(())
//! ```

// `!(x > 0.0)` is used instead of `x <= 0.0` throughout so that NaN inputs
// fail validation too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod csvio;
pub mod dynamics;
pub mod error;
pub mod figures;
pub mod popsim;
pub mod quad;
pub mod util;
pub mod verify;
pub mod weighting;

pub use error::{Error, Result};
