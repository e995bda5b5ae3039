//! Closed-form moments of `T₁ = Σ ε̂ᵢ⁴` and `T₂ = n⁻¹(Σ ε̂ᵢ²)²`, and the
//! delta-method mean and variance of `T = T₁/T₂ − 1`.

use crate::functionals::{GeneralSummary, ProjectionSummary};
use crate::{Error, Result};

/// Even moments of a standardized symmetric error law (`M₂ = 1`) and the
/// cumulants built from them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorMomentProfile {
    pub m4: f64,
    pub m6: f64,
    pub m8: f64,
    /// `κ₄ = M₄ − 3`
    pub nu4: f64,
    /// `κ₆ = M₆ − 15M₄ + 30`
    pub nu6: f64,
    /// `κ₈ = M₈ − 28M₆ − 35M₄² + 420M₄ − 630`
    pub nu8: f64,
}

impl ErrorMomentProfile {
    pub fn gaussian() -> Self {
        cumulants_from_moments(3.0, 15.0, 105.0).expect("gaussian moments are valid")
    }

    /// Rademacher errors, ±1 with probability ½.
    pub fn two_point() -> Self {
        cumulants_from_moments(1.0, 1.0, 1.0).expect("two-point moments are valid")
    }

    /// Uniform on [−√3, √3].
    pub fn uniform() -> Self {
        cumulants_from_moments(9.0 / 5.0, 27.0 / 7.0, 9.0).expect("uniform moments are valid")
    }

    pub fn is_gaussian(&self) -> bool {
        self.nu4 == 0.0 && self.nu6 == 0.0 && self.nu8 == 0.0
    }

    /// Whether the cubic trace terms of the null variance contribute.
    pub fn needs_cubic_terms(&self) -> bool {
        self.nu4 != 0.0 || self.nu6 != 0.0
    }
}

/// Builds a profile from `M₄, M₆, M₈`, checking `M₄ ≥ 1`, `M₆² ≥ M₄³`
/// (Lyapunov) and `M₈ ≥ M₄²`.
pub fn cumulants_from_moments(m4: f64, m6: f64, m8: f64) -> Result<ErrorMomentProfile> {
    if !(m4.is_finite() && m6.is_finite() && m8.is_finite()) {
        return Err(Error::NonFinite("error moments"));
    }
    if m4 < 1.0 {
        return Err(Error::InvalidMomentSequence("M4 >= 1"));
    }
    if m6 * m6 < m4 * m4 * m4 {
        return Err(Error::InvalidMomentSequence("M6^2 >= M4^3"));
    }
    if m8 < m4 * m4 {
        return Err(Error::InvalidMomentSequence("M8 >= M4^2"));
    }
    Ok(ErrorMomentProfile {
        m4,
        m6,
        m8,
        nu4: m4 - 3.0,
        nu6: m6 - 15.0 * m4 + 30.0,
        nu8: m8 - 28.0 * m6 - 35.0 * m4 * m4 + 420.0 * m4 - 630.0,
    })
}

/// Asymptotic null mean `a` and variance `b` of `T`, with the intermediates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullMoments {
    pub a: f64,
    pub b: f64,
    /// Covariance of `(T₁, T₂)`.
    pub theta: [[f64; 2]; 2],
    /// Gradient of `(x, y) ↦ x/y − 1` at the means.
    pub delta: [f64; 2],
    pub et1: f64,
    pub et2: f64,
}

pub fn null_moments(s: &ProjectionSummary, profile: &ErrorMomentProfile) -> Result<NullMoments> {
    let ErrorMomentProfile { nu4, nu6, nu8, .. } = *profile;
    let n = s.n as f64;
    let np = (s.n - s.p) as f64;

    let (q3, q4, m1, m3, m4) = match s.cubic {
        Some(c) => (c.q3, c.q4, c.m1, c.m3, c.m4),
        None if profile.needs_cubic_terms() => return Err(Error::MissingCubicFunctionals),
        None => (0.0, 0.0, 0.0, 0.0, 0.0),
    };

    let den = np * np + 2.0 * np + nu4 * s.t1;
    let et1 = 3.0 * s.t1 + nu4 * s.q2;
    let et2 = den / n;
    let a = n * et1 / den - 1.0;

    let mut t11 = 72.0 * s.d2 + 24.0 * s.q2 + nu8 * s.m5;
    if nu4 != 0.0 {
        t11 += nu4 * (96.0 * m1 + 72.0 * q3 + 36.0 * s.d2sq) + nu4 * nu4 * (18.0 * q4 + 16.0 * m4);
    }
    if nu6 != 0.0 {
        t11 += nu6 * (12.0 * s.m2 + 16.0 * m3);
    }
    let t22 = (8.0 * np * np * np + 4.0 * nu4 * np * np * s.t1) / (n * n);
    let t12 = (np / n) * (24.0 * s.t1 + 16.0 * nu4 * s.c1 + 12.0 * nu4 * s.c2 + 2.0 * nu6 * s.c3);
    let theta = [[t11, t12], [t12, t22]];

    let delta = [n / den, -n * n * et1 / (den * den)];
    let b = quad_form(&delta, &theta);
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::NonPositiveVariance { b });
    }
    Ok(NullMoments {
        a,
        b,
        theta,
        delta,
        et1,
        et2,
    })
}

/// Moments of `(T₁, T₂)` for arbitrary error scales, for power prediction.
///
/// `E T₁`, `E T₂` and `Var T₁` are exact for any symmetric error law with the
/// given profile. `Var T₂` and `Cov(T₁, T₂)` keep only the leading order; the
/// dropped remainder is O(1) against a leading term of order n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralMoments {
    pub et1: f64,
    pub et2: f64,
    pub var_t1: f64,
    pub var_t2_leading: f64,
    pub cov_leading: f64,
    pub predicted_mean_t: f64,
}

impl GeneralMoments {
    pub fn theta(&self) -> [[f64; 2]; 2] {
        [
            [self.var_t1, self.cov_leading],
            [self.cov_leading, self.var_t2_leading],
        ]
    }

    /// Delta-method variance of `T` under this alternative.
    pub fn predicted_var_t(&self) -> Result<f64> {
        delta_method_variance(self.et1, self.et2, &self.theta())
    }
}

pub fn general_moments(g: &GeneralSummary, profile: &ErrorMomentProfile) -> Result<GeneralMoments> {
    let ErrorMomentProfile { nu4, nu6, nu8, .. } = *profile;
    let n = g.n as f64;
    let et1 = 3.0 * g.diag_b_sq + nu4 * g.a_fourth_sum;
    let et2 = (g.tr_b * g.tr_b + 2.0 * g.tr_b_sq + nu4 * g.diag_c_sq) / n;
    let var_t1 = 72.0 * g.db_bb_db
        + 24.0 * g.b_fourth_sum
        + nu4 * (96.0 * g.b_db_g + 36.0 * g.db_aa_aa_db + 72.0 * g.bb_k)
        + nu4 * nu4 * (16.0 * g.g_sq_trace + 18.0 * g.k_sq_trace)
        + nu6 * (16.0 * g.b_l + 12.0 * g.v_r)
        + nu8 * g.r_sq;
    let tb2 = g.tr_b * g.tr_b;
    let var_t2_leading = (8.0 * tb2 * g.tr_b_sq + 4.0 * nu4 * tb2 * g.diag_c_sq) / (n * n);
    let cov_leading = (g.tr_b / n)
        * (24.0 * g.b_sq_diag_b + 16.0 * nu4 * g.b_g + 12.0 * nu4 * g.v_c + 2.0 * nu6 * g.c_r);
    if !(et2 > 0.0) {
        return Err(Error::ZeroDenominator);
    }
    let out = GeneralMoments {
        et1,
        et2,
        var_t1,
        var_t2_leading,
        cov_leading,
        predicted_mean_t: et1 / et2 - 1.0,
    };
    if [et1, et2, var_t1, var_t2_leading, cov_leading]
        .iter()
        .any(|v| !v.is_finite())
    {
        return Err(Error::NonFinite("general moments"));
    }
    Ok(out)
}

/// `∇f′ Θ ∇f` for `f(x, y) = x/y − 1` at `(E T₁, E T₂)`.
pub fn delta_method_variance(et1: f64, et2: f64, theta: &[[f64; 2]; 2]) -> Result<f64> {
    if et2 == 0.0 || !et2.is_finite() {
        return Err(Error::ZeroDenominator);
    }
    let grad = [1.0 / et2, -et1 / (et2 * et2)];
    Ok(quad_form(&grad, theta))
}

fn quad_form(v: &[f64; 2], m: &[[f64; 2]; 2]) -> f64 {
    v[0] * (m[0][0] * v[0] + m[0][1] * v[1]) + v[1] * (m[1][0] * v[0] + m[1][1] * v[1])
}
