//! Adaptive Gauss-Kronrod quadrature.
//!
//! A global-adaptive integrator built on the 15-point Kronrod rule with the
//! embedded 7-point Gauss rule for error estimation. Intervals are split
//! worst-error-first until the accumulated error estimate meets the relative
//! tolerance. Integrands with an inverse-square-root blow-up at an interval
//! endpoint in {0, 1} are regularized by the substitutions `rho = 1 - u^2`
//! (upper end) and `rho = v^2` (lower end), which is enough for every
//! weight-function integral that appears in this crate.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// How integrable endpoint singularities are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EndpointHandling {
    /// Substitute the endpoint away when the interval touches 0 or 1.
    #[default]
    Substitution,
    /// Integrate the interval as given.
    Closed,
}

/// Tolerances and limits for adaptive quadrature.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureConfig {
    /// Relative tolerance on the integral value; must lie in (0, 1e-3].
    pub rel_tol: f64,
    /// Maximum number of interval bisections before giving up.
    pub max_subdivisions: usize,
    pub endpoint_handling: EndpointHandling,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            max_subdivisions: 4000,
            endpoint_handling: EndpointHandling::Substitution,
        }
    }
}

impl QuadratureConfig {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-3) {
            return Err(Error::Config(format!(
                "quadrature rel_tol must lie in (0, 1e-3], got {}",
                self.rel_tol
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::Config("max_subdivisions must be positive".into()));
        }
        Ok(())
    }
}

// 15-point Kronrod abscissae on [-1, 1] (positive half) and weights; the
// even-indexed nodes carry the embedded 7-point Gauss rule. Published table
// values, kept at full printed precision.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Sharpen the raw Gauss/Kronrod difference into an error estimate, scaled
/// by the variation `res_asc` of the integrand over the interval.
fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let min_err = 50.0 * f64::EPSILON * res_abs;
        if min_err > scaled {
            scaled = min_err;
        }
    }
    scaled
}

/// One Kronrod evaluation over [a, b]: returns (integral, error estimate).
fn qk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center);
    let mut fv1 = [0.0f64; 7];
    let mut fv2 = [0.0f64; 7];
    let mut result_gauss = WG[3] * fc;
    let mut result_kronrod = WGK[7] * fc;
    let mut result_abs = WGK[7] * fc.abs();

    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        result_kronrod += WGK[j] * (f1 + f2);
        result_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            result_gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * result_kronrod;
    let mut result_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        result_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let integral = result_kronrod * half;
    let err = ((result_kronrod - result_gauss) * half).abs();
    (
        integral,
        rescale_error(err, result_abs * half.abs(), result_asc * half.abs()),
    )
}

#[derive(Debug)]
struct Segment {
    a: f64,
    b: f64,
    integral: f64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Integrate `f` over [a, b] with global adaptive bisection.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<f64> {
    cfg.validate()?;
    if a == b {
        return Ok(0.0);
    }
    if !(a < b) {
        return Err(Error::Domain(format!(
            "integration bounds must satisfy a <= b, got [{a}, {b}]"
        )));
    }

    let (integral, err) = qk15(&f, a, b);
    if !integral.is_finite() {
        return Err(Error::Numeric(format!(
            "non-finite integrand over [{a}, {b}]"
        )));
    }
    let mut heap = BinaryHeap::new();
    heap.push(Segment {
        a,
        b,
        integral,
        err,
    });
    let mut total = integral;
    let mut total_err = err;

    for _ in 0..cfg.max_subdivisions {
        if total_err <= cfg.rel_tol * total.abs().max(f64::MIN_POSITIVE) {
            return Ok(total);
        }
        let worst = heap.pop().expect("heap never empty inside the loop");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval no longer splittable in f64; accept what we have.
            heap.push(worst);
            break;
        }
        let (il, el) = qk15(&f, worst.a, mid);
        let (ir, er) = qk15(&f, mid, worst.b);
        if !(il.is_finite() && ir.is_finite()) {
            return Err(Error::Numeric(format!(
                "non-finite integrand near x = {mid}"
            )));
        }
        total += il + ir - worst.integral;
        total_err += el + er - worst.err;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            integral: il,
            err: el,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            integral: ir,
            err: er,
        });
    }

    if total_err <= cfg.rel_tol * total.abs().max(f64::MIN_POSITIVE) {
        Ok(total)
    } else {
        Err(Error::Numeric(format!(
            "quadrature did not converge: estimate {total}, error {total_err}"
        )))
    }
}

/// Integrate `f` over [a, b] ⊆ [0, 1], removing inverse-square-root
/// singularities at endpoints that touch 0 or 1.
pub fn integrate_unit<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) {
        return Err(Error::Domain(format!(
            "unit-interval quadrature needs [a, b] in [0, 1], got [{a}, {b}]"
        )));
    }
    if cfg.endpoint_handling == EndpointHandling::Closed {
        return integrate(f, a, b, cfg);
    }
    match (a == 0.0, b == 1.0) {
        (false, true) => {
            // rho = 1 - u^2
            integrate(|u| 2.0 * u * f(1.0 - u * u), 0.0, (1.0 - a).sqrt(), cfg)
        }
        (true, false) => {
            // rho = v^2
            integrate(|v| 2.0 * v * f(v * v), 0.0, b.sqrt(), cfg)
        }
        (true, true) => {
            let lower = integrate(|v| 2.0 * v * f(v * v), 0.0, 0.5f64.sqrt(), cfg)?;
            let upper = integrate(|u| 2.0 * u * f(1.0 - u * u), 0.0, 0.5f64.sqrt(), cfg)?;
            Ok(lower + upper)
        }
        (false, false) => integrate(f, a, b, cfg),
    }
}
