//! Monotone cubic interpolation for tabulated weight functions.
//!
//! Fritsch-Carlson slope limiting: the interpolant preserves monotonicity of
//! the data on every knot interval and never overshoots. Outside the knot
//! range the nearest knot value is used, so a tabulated weight is defined on
//! all of (0, 1).

use crate::error::{Error, Result};

/// A weight function given as `(rho, omega)` samples on (0, 1).
#[derive(Debug, Clone)]
pub struct TabulatedWeight {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl TabulatedWeight {
    pub fn new(points: &[(f64, f64)]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Domain(
                "tabulated weight needs at least two knots".into(),
            ));
        }
        let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
        for w in xs.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::Domain(
                    "tabulated weight knots must be strictly increasing".into(),
                ));
            }
        }
        if xs[0] <= 0.0 || *xs.last().unwrap() >= 1.0 {
            return Err(Error::Domain(
                "tabulated weight knots must lie inside (0, 1)".into(),
            ));
        }
        if ys.iter().any(|&y| !(y.is_finite() && y >= 0.0)) {
            return Err(Error::Domain(
                "tabulated weight values must be finite and non-negative".into(),
            ));
        }

        let n = xs.len();
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();

        let mut slopes = vec![0.0; n];
        slopes[0] = delta[0];
        slopes[n - 1] = delta[n - 2];
        for i in 1..n - 1 {
            if delta[i - 1] * delta[i] <= 0.0 {
                slopes[i] = 0.0;
            } else {
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                slopes[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        // Endpoint slopes are clamped to keep the first and last segments
        // monotone as well.
        for (i, d) in [(0, delta[0]), (n - 1, delta[n - 2])] {
            if slopes[i] * d <= 0.0 {
                slopes[i] = 0.0;
            } else if slopes[i].abs() > 3.0 * d.abs() {
                slopes[i] = 3.0 * d;
            }
        }

        Ok(Self { xs, ys, slopes })
    }

    /// Evaluate the interpolant, clamping to the end knots outside the table.
    pub fn omega(&self, rho: f64) -> f64 {
        let n = self.xs.len();
        if rho <= self.xs[0] {
            return self.ys[0];
        }
        if rho >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        let idx = match self.xs.binary_search_by(|x| x.total_cmp(&rho)) {
            Ok(i) => return self.ys[i],
            Err(i) => i - 1,
        };
        let h = self.xs[idx + 1] - self.xs[idx];
        let t = (rho - self.xs[idx]) / h;
        let (y0, y1) = (self.ys[idx], self.ys[idx + 1]);
        let (d0, d1) = (self.slopes[idx], self.slopes[idx + 1]);
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_knots() {
        let pts = [(0.1, 2.0), (0.3, 1.0), (0.6, 4.0), (0.9, 0.5)];
        let t = TabulatedWeight::new(&pts).unwrap();
        for (x, y) in pts {
            assert!((t.omega(x) - y).abs() < 1e-14);
        }
    }

    #[test]
    fn clamps_outside_knots() {
        let t = TabulatedWeight::new(&[(0.2, 3.0), (0.8, 1.0)]).unwrap();
        assert_eq!(t.omega(0.01), 3.0);
        assert_eq!(t.omega(0.99), 1.0);
    }

    #[test]
    fn monotone_data_gives_monotone_interpolant() {
        let pts: Vec<(f64, f64)> = (0..20)
            .map(|i| {
                let x = 0.05 + 0.9 * i as f64 / 19.0;
                (x, 1.0 / x)
            })
            .collect();
        let t = TabulatedWeight::new(&pts).unwrap();
        let mut prev = f64::INFINITY;
        for k in 0..=500 {
            let x = 0.05 + 0.9 * k as f64 / 500.0;
            let v = t.omega(x);
            assert!(v <= prev + 1e-12, "not monotone at {x}");
            prev = v;
        }
    }

    #[test]
    fn tracks_a_smooth_weight_closely() {
        // Dense tabulation of 1/√(ρ(1−ρ)) stays within a small relative error.
        let pts: Vec<(f64, f64)> = (0..200)
            .map(|i| {
                let x = 0.05 + 0.9 * i as f64 / 199.0;
                (x, 1.0 / (x * (1.0 - x)).sqrt())
            })
            .collect();
        let t = TabulatedWeight::new(&pts).unwrap();
        for k in 0..1000 {
            let x = 0.06 + 0.88 * k as f64 / 999.0;
            let exact = 1.0 / (x * (1.0 - x)).sqrt();
            assert!(((t.omega(x) - exact) / exact).abs() < 1e-4);
        }
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(TabulatedWeight::new(&[(0.5, 1.0)]).is_err());
        assert!(TabulatedWeight::new(&[(0.5, 1.0), (0.5, 2.0)]).is_err());
        assert!(TabulatedWeight::new(&[(0.0, 1.0), (0.5, 2.0)]).is_err());
        assert!(TabulatedWeight::new(&[(0.2, -1.0), (0.5, 2.0)]).is_err());
    }
}
