//! The test itself: statistic, standardization and p-value.

use crate::functionals::{projection_functionals, projection_functionals_quadratic, ProjectionSummary};
use crate::moments::{null_moments, ErrorMomentProfile, NullMoments};
use crate::regression::{ols_fit, projection_matrix, DesignMatrix, ProjectionMatrix};
use crate::{Error, Result};

/// Residual norms at or below this fraction of `‖y‖` count as an exact fit.
pub const EXACT_FIT_TOLERANCE: f64 = 1e-10;

/// `T = Σ(ε̂ᵢ² − m)² / (n⁻¹(Σε̂ᵢ²)²)` with `m` the mean squared residual.
pub fn statistic_t(residuals: &[f64]) -> Result<f64> {
    let n = residuals.len();
    if n < 2 {
        return Err(Error::DimensionMismatch {
            what: "residual count (at least)",
            expected: 2,
            found: n,
        });
    }
    if residuals.iter().any(|r| !r.is_finite()) {
        return Err(Error::NonFinite("residuals"));
    }
    let nf = n as f64;
    let sum_sq: f64 = residuals.iter().map(|r| r * r).sum();
    if sum_sq == 0.0 {
        return Err(Error::DegenerateResiduals);
    }
    let mean = sum_sq / nf;
    let num: f64 = residuals
        .iter()
        .map(|r| {
            let dev = r * r - mean;
            dev * dev
        })
        .sum();
    Ok(num / (nf * mean * mean))
}

/// Upper tail `1 − Φ(z)` of the standard normal.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z * core::f64::consts::FRAC_1_SQRT_2)
}

/// Heteroscedasticity inflates `T`, so the upper tail is the default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sidedness {
    #[default]
    Upper,
    TwoSided,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestReport {
    pub t: f64,
    pub a: f64,
    pub b: f64,
    pub z: f64,
    pub p_value: f64,
    pub n: usize,
    pub p: usize,
    /// `Σᵢ pᵢᵢ²`.
    pub t1: f64,
    pub profile: ErrorMomentProfile,
    pub profile_name: &'static str,
    pub sidedness: Sidedness,
}

impl TestReport {
    /// Strict `p < α`.
    pub fn rejects(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

impl ErrorMomentProfile {
    pub fn name(&self) -> &'static str {
        if *self == Self::gaussian() {
            "gaussian"
        } else if *self == Self::two_point() {
            "two-point"
        } else if *self == Self::uniform() {
            "uniform"
        } else {
            "custom"
        }
    }
}

/// Null moments for one design, reusable across responses.
#[derive(Debug, Clone)]
pub struct PreparedTest {
    design: DesignMatrix,
    projection: ProjectionMatrix,
    summary: ProjectionSummary,
    moments: NullMoments,
    profile: ErrorMomentProfile,
}

impl PreparedTest {
    /// Forms `P` and its functionals; the n×n×n terms only when the profile
    /// has non-zero ν₄ or ν₆.
    pub fn new(design: &DesignMatrix, profile: ErrorMomentProfile) -> Result<Self> {
        if design.n() > crate::MAX_N {
            return Err(Error::TooLarge {
                n: design.n(),
                max: crate::MAX_N,
            });
        }
        let projection = projection_matrix(design);
        let summary = if profile.needs_cubic_terms() {
            projection_functionals(&projection)
        } else {
            projection_functionals_quadratic(&projection)
        };
        let moments = null_moments(&summary, &profile)?;
        Ok(Self {
            design: design.clone(),
            projection,
            summary,
            moments,
            profile,
        })
    }

    pub fn design(&self) -> &DesignMatrix {
        &self.design
    }

    pub fn projection(&self) -> &ProjectionMatrix {
        &self.projection
    }

    pub fn summary(&self) -> &ProjectionSummary {
        &self.summary
    }

    pub fn moments(&self) -> &NullMoments {
        &self.moments
    }

    pub fn test(&self, y: &[f64], sidedness: Sidedness) -> Result<TestReport> {
        let fit = ols_fit(&self.design, y)?;
        let y_norm_sq: f64 = y.iter().map(|v| v * v).sum();
        let r_norm_sq: f64 = fit.residuals.iter().map(|v| v * v).sum();
        if r_norm_sq <= EXACT_FIT_TOLERANCE * EXACT_FIT_TOLERANCE * y_norm_sq {
            return Err(Error::DegenerateResiduals);
        }
        self.test_residuals(&fit.residuals, sidedness)
    }

    /// Same as [`PreparedTest::test`] for residuals already computed as `Py`.
    pub fn test_residuals(&self, residuals: &[f64], sidedness: Sidedness) -> Result<TestReport> {
        let t = statistic_t(residuals)?;
        let NullMoments { a, b, .. } = self.moments;
        let z = (t - a) / libm::sqrt(b);
        let p_value = match sidedness {
            Sidedness::Upper => normal_sf(z),
            Sidedness::TwoSided => (2.0 * normal_sf(libm::fabs(z))).min(1.0),
        };
        Ok(TestReport {
            t,
            a,
            b,
            z,
            p_value,
            n: self.design.n(),
            p: self.design.p(),
            t1: self.summary.t1,
            profile: self.profile,
            profile_name: self.profile.name(),
            sidedness,
        })
    }
}

/// Fits OLS, computes `T` and its one-sided normal p-value.
pub fn run_test(x: &DesignMatrix, y: &[f64], profile: &ErrorMomentProfile) -> Result<TestReport> {
    PreparedTest::new(x, *profile)?.test(y, Sidedness::Upper)
}
