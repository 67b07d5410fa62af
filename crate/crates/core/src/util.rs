//! Small numeric helpers.

/// Numerically stable logistic map `1/(1+e^{-l})`.
pub fn logistic(l: f64) -> f64 {
    if l >= 0.0 {
        1.0 / (1.0 + (-l).exp())
    } else {
        let e = l.exp();
        e / (1.0 + e)
    }
}

/// Log-odds `ln(rho/(1-rho))`.
pub fn logit(rho: f64) -> f64 {
    (rho / (1.0 - rho)).ln()
}
