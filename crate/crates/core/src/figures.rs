//! Figure-ready CSV bundles.

use crate::csvio;
use crate::dynamics::{closed_form_effective, closed_form_regular};
use crate::error::Result;
use crate::weighting::SchemeId;

/// Column order of the budget-normalized comparison tables. Fixed contract:
/// downstream plotting scripts rely on it.
pub const COMPARISON_SCHEMES: [SchemeId; 4] = [
    SchemeId::LinearR,
    SchemeId::SqrtR,
    SchemeId::Grpo,
    SchemeId::Rloo,
];

/// Equivalent β after scaling each scheme's weight to unit budget on
/// [rho0, 1]: scaling ω by `c` matches running the raw ω with `β/c`.
pub fn beta_eff_unit_budget(scheme: SchemeId, rho0: f64) -> Option<f64> {
    match scheme {
        SchemeId::Grpo => Some(std::f64::consts::PI - 2.0 * rho0.sqrt().asin()),
        SchemeId::SqrtR => Some(2.0 * (1.0 - rho0).sqrt().atanh()),
        SchemeId::LinearR | SchemeId::RejectionSampling => Some((1.0 / rho0).ln()),
        SchemeId::Rloo => Some(1.0 - rho0),
        _ => None,
    }
}

/// The two budget-normalized comparison tables: regular time from ρ0 = 0.1
/// over t ∈ [0, 10], effective time from ρ0 = 0.03 over τ ∈ [0, 50].
#[derive(Debug, Clone)]
pub struct ComparisonBundle {
    pub regular_csv: String,
    pub effective_csv: String,
}

pub fn comparison_bundle(sig: usize) -> Result<ComparisonBundle> {
    let regular_csv = comparison_table(false, 0.1, 10.0, 2000, sig)?;
    let effective_csv = comparison_table(true, 0.03, 50.0, 2000, sig)?;
    Ok(ComparisonBundle {
        regular_csv,
        effective_csv,
    })
}

fn comparison_table(
    effective: bool,
    rho0: f64,
    horizon: f64,
    rows: usize,
    sig: usize,
) -> Result<String> {
    let times: Vec<f64> = (0..=rows).map(|i| horizon * i as f64 / rows as f64).collect();
    let mut columns = Vec::new();
    for scheme in COMPARISON_SCHEMES {
        let beta = beta_eff_unit_budget(scheme, rho0).expect("all four have closed budgets");
        let values: Result<Vec<f64>> = times
            .iter()
            .map(|&t| {
                if effective {
                    closed_form_effective(scheme, rho0, beta, t)
                } else {
                    closed_form_regular(scheme, rho0, beta, t)
                }
            })
            .collect();
        columns.push((scheme.tag().to_string(), values?));
    }
    csvio::figure_table_csv(if effective { "tau" } else { "t" }, &times, &columns, sig)
}

/// First column (by header name) to reach `target`, with the time it does.
pub fn first_to_reach(csv: &str, target: f64) -> Result<Option<(String, f64)>> {
    let (header, times, columns) = csvio::parse_figure_table_csv(csv)?;
    let mut best: Option<(String, f64)> = None;
    for (j, col) in columns.iter().enumerate() {
        if let Some(i) = col.iter().position(|&v| v >= target) {
            let t = times[i];
            if best.as_ref().is_none_or(|(_, bt)| t < *bt) {
                best = Some((header[j + 1].clone(), t));
            }
        }
    }
    Ok(best)
}
