//! Principal branch of the Lambert-W function.

use crate::error::{Error, Result};

const NEG_INV_E: f64 = -0.36787944117144233;

/// Solve `w·e^w = x` for the principal branch, `x ≥ −1/e`.
///
/// A series/log initial guess is polished by safeguarded Halley iteration
/// until the residual `|w·e^w − x|` drops below `1e-14·max(1, |x|)` or the
/// step stalls at machine precision.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("lambert_w0 needs finite input, got {x}")));
    }
    if x < NEG_INV_E {
        return Err(Error::Domain(format!(
            "lambert_w0 is defined for x >= -1/e = {NEG_INV_E}, got {x}"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == NEG_INV_E {
        return Ok(-1.0);
    }

    let mut w = initial_guess(x);
    let tol = 1e-14 * x.abs().max(1.0);
    for _ in 0..60 {
        let ew = w.exp();
        let f = w * ew - x;
        if f.abs() <= tol {
            return Ok(w);
        }
        let f1 = ew * (w + 1.0);
        let f2 = ew * (w + 2.0);
        let denom = f1 - f * f2 / (2.0 * f1);
        let step = if denom != 0.0 && denom.is_finite() {
            f / denom
        } else {
            f / f1
        };
        let mut next = w - step;
        if next < -1.0 {
            // The principal branch never drops below −1.
            next = 0.5 * (w - 1.0);
        }
        if (next - w).abs() <= f64::EPSILON * (1.0 + w.abs()) {
            return Ok(next);
        }
        w = next;
    }
    let residual = w * w.exp() - x;
    if residual.abs() <= 1e-12 * x.abs().max(1.0) {
        Ok(w)
    } else {
        Err(Error::Numeric(format!(
            "lambert_w0({x}) did not converge (residual {residual})"
        )))
    }
}

fn initial_guess(x: f64) -> f64 {
    if x < -0.25 {
        // Series around the branch point w = −1.
        let p = (2.0 * (std::f64::consts::E * x + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if x < 2.0 {
        // Padé-flavored guess near zero; Halley does the rest.
        x * (1.0 + 0.5 * x) / (1.0 + x * (1.5 + x / 3.0))
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    }
}

/// `W(e^y)`, stable for arguments where `e^y` itself would overflow.
///
/// For large `y`, solves `w + ln w = y` by Newton iteration instead.
pub fn lambert_w0_exp(y: f64) -> f64 {
    if y <= 700.0 {
        return lambert_w0(y.exp()).expect("e^y >= 0 is always in domain");
    }
    let mut w = y - y.ln();
    for _ in 0..50 {
        let f = w + w.ln() - y;
        let step = f / (1.0 + 1.0 / w);
        w -= step;
        if step.abs() <= f64::EPSILON * w {
            break;
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_points() {
        assert_eq!(lambert_w0(0.0).unwrap(), 0.0);
        assert!((lambert_w0(std::f64::consts::E).unwrap() - 1.0).abs() <= 1e-14);
        // Frozen from a bisection oracle on w·e^w − 1 at 1e-12 resolution.
        assert!((lambert_w0(1.0).unwrap() - 0.567_143_290_409_783_8).abs() < 1e-12);
    }

    #[test]
    fn residual_on_log_grid() {
        let n = 400;
        for k in 0..=n {
            // Negative side: x = −1/e + u, u log-spaced in [1e-9, 1/e].
            let u = 1e-9 * (0.36787944117144233 / 1e-9f64).powf(k as f64 / n as f64);
            let x = NEG_INV_E + u;
            let w = lambert_w0(x).unwrap();
            assert!(
                (w * w.exp() - x).abs() <= 1e-12 * x.abs().max(1.0),
                "x={x} w={w}"
            );
        }
        for k in 0..=n {
            // Positive side: x log-spaced in [1e-12, 1e6].
            let x = 1e-12 * (1e18f64).powf(k as f64 / n as f64);
            let w = lambert_w0(x).unwrap();
            assert!(
                (w * w.exp() - x).abs() <= 1e-12 * x.abs().max(1.0),
                "x={x} w={w}"
            );
        }
    }

    #[test]
    fn below_branch_point_is_domain_error() {
        assert!(lambert_w0(-0.4).is_err());
        assert!(lambert_w0(f64::NAN).is_err());
    }

    #[test]
    fn exp_form_agrees_with_direct() {
        for y in [-5.0, 0.0, 1.0, 30.0, 200.0] {
            let a = lambert_w0_exp(y);
            let b = lambert_w0(y.exp()).unwrap();
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn exp_form_handles_overflow_range() {
        let y = 1000.0;
        let w = lambert_w0_exp(y);
        // Verify the defining relation in log space: w + ln w = y.
        assert!((w + w.ln() - y).abs() < 1e-9);
    }
}
