//! One-sample Kolmogorov–Smirnov test against the standard normal.

use fcvt_core::normal_sf;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    /// `sup |F̂ₙ − Φ|`.
    pub statistic: f64,
    pub p_value: f64,
}

/// `P(K > x)` for the Kolmogorov distribution.
fn kolmogorov_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < 1.18 {
        // Theta-function form, which converges fast for small x.
        let y = (-std::f64::consts::PI.powi(2) / (8.0 * x * x)).exp();
        let s: f64 = (0..6).map(|k| y.powi((2 * k + 1) * (2 * k + 1))).sum();
        return (1.0 - (2.0 * std::f64::consts::PI).sqrt() / x * s).clamp(0.0, 1.0);
    }
    let s: f64 = (1..=20)
        .map(|k| {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            sign * (-2.0 * f64::from(k * k) * x * x).exp()
        })
        .sum();
    (2.0 * s).clamp(0.0, 1.0)
}

/// Uses Stephens' finite-sample scaling of the asymptotic distribution.
pub fn ks_test_normal(sample: &[f64]) -> KsResult {
    let mut xs: Vec<f64> = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let cdf = 1.0 - normal_sf(x);
            let above = (i as f64 + 1.0) / n - cdf;
            let below = cdf - i as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max);
    let rn = n.sqrt();
    KsResult {
        statistic: d,
        p_value: kolmogorov_sf((rn + 0.12 + 0.11 / rn) * d),
    }
}
