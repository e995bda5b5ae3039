//! Closed-form moments against exhaustive two-point enumeration.

use std::fmt;
use std::str::FromStr;

use fcvt_core::oracle::MAX_PATTERN_N;
use fcvt_core::{
    enumerate_two_point, general_functionals, general_moments, projection_matrix,
    ErrorMomentProfile,
};
use serde::Serialize;

use crate::laws::DesignLaw;
use crate::sim::gen_design;
use crate::{Error, Result};

/// Relative tolerance for the exact rows.
pub const EXACT_TOLERANCE: f64 = 1e-8;

/// Largest n accepted by [`validate`].
pub const MAX_VALIDATE_N: usize = MAX_PATTERN_N;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaPattern {
    /// `σᵢ = 1`.
    Const,
    /// `σᵢ = 1` on the first half of the rows, 2 on the rest.
    Half2,
}

impl SigmaPattern {
    pub fn sigma(self, n: usize) -> Vec<f64> {
        match self {
            SigmaPattern::Const => vec![1.0; n],
            SigmaPattern::Half2 => (0..n).map(|i| if i < n / 2 { 1.0 } else { 2.0 }).collect(),
        }
    }
}

impl FromStr for SigmaPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "const" => Ok(SigmaPattern::Const),
            "half2" => Ok(SigmaPattern::Half2),
            other => Err(Error::InvalidConfig(format!(
                "unknown sigma pattern `{other}` (expected const or half2)"
            ))),
        }
    }
}

impl fmt::Display for SigmaPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SigmaPattern::Const => "const",
            SigmaPattern::Half2 => "half2",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationRow {
    pub quantity: &'static str,
    pub closed_form: f64,
    pub oracle: f64,
    pub rel_error: f64,
    /// `None` for leading-order rows, which are reported as ratios only.
    pub pass: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub n: usize,
    pub p: usize,
    pub seed: u64,
    pub sigma: SigmaPattern,
    pub rows: Vec<ValidationRow>,
    pub passed: bool,
}

fn rel_error(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Draws a Gaussian n×p design from `seed` and compares the closed-form
/// moments of `T₁`, `T₂` at `A = P·diag(σ)` with enumeration over all 2ⁿ
/// sign vectors.
pub fn validate(n: usize, p: usize, seed: u64, sigma: SigmaPattern) -> Result<ValidationReport> {
    if n > MAX_VALIDATE_N {
        return Err(fcvt_core::Error::TooLarge {
            n,
            max: MAX_VALIDATE_N,
        }
        .into());
    }
    if p == 0 || n <= p {
        return Err(Error::InvalidConfig(format!("need n > p >= 1 (n = {n}, p = {p})")));
    }
    let proj = projection_matrix(&gen_design(DesignLaw::Normal, n, p, seed)?);
    let s = sigma.sigma(n);
    let closed = general_moments(&general_functionals(&proj, &s)?, &ErrorMomentProfile::two_point())?;
    let exact = enumerate_two_point(&proj.matrix().scale_columns(&s))?;
    let row = |quantity, closed_form: f64, oracle: f64, exact: bool| {
        let rel_error = rel_error(closed_form, oracle);
        ValidationRow {
            quantity,
            closed_form,
            oracle,
            rel_error,
            pass: exact.then_some(rel_error <= EXACT_TOLERANCE),
        }
    };
    let rows = vec![
        row("ET1", closed.et1, exact.et1, true),
        row("ET2", closed.et2, exact.et2, true),
        row("VarT1", closed.var_t1, exact.var_t1, true),
        row("VarT2", closed.var_t2_leading, exact.var_t2, false),
        row("Cov", closed.cov_leading, exact.cov, false),
    ];
    let passed = rows.iter().all(|r| r.pass != Some(false));
    Ok(ValidationReport {
        n,
        p,
        seed,
        sigma,
        rows,
        passed,
    })
}
