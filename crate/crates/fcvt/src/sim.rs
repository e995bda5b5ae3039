//! Monte Carlo size and power studies.

use std::fmt;
use std::str::FromStr;

use fcvt_core::{DesignMatrix, Matrix, PreparedTest, Sidedness};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::laws::{DesignLaw, ErrorLaw};
use crate::seeding::{stream, sub_seed, Purpose};
use crate::{Error, Result};

/// Draws before giving up on a rank-deficient design.
pub const MAX_DESIGN_ATTEMPTS: u32 = 3;

/// Two-sided 95% normal quantile.
const Z_95: f64 = 1.959_963_984_540_054;

/// Response model, always with β = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    /// `yᵢ = εᵢ`.
    Null,
    /// `yᵢ = εᵢ(1 + xᵢ₁)`.
    Model1,
    /// `yᵢ = εᵢ(1 + xᵢ₁ + ⋯ + xᵢ,p/2)`.
    Model2,
}

impl Model {
    pub const ALL: [Model; 3] = [Model::Null, Model::Model1, Model::Model2];

    pub fn name(self) -> &'static str {
        match self {
            Model::Null => "null",
            Model::Model1 => "model1",
            Model::Model2 => "model2",
        }
    }

    /// Number of leading covariates entering `xᵢh`.
    fn active(self, p: usize) -> Result<usize> {
        match self {
            Model::Null => Ok(0),
            Model::Model1 => Ok(1),
            Model::Model2 if p % 2 == 1 => Err(Error::OddPForModel2 { p }),
            Model::Model2 => Ok(p / 2),
        }
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Model::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown model `{s}`")))
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// n×p design with i.i.d. entries from `law`. A rank-deficient draw is
/// replaced by the next sub-stream of `seed`.
pub fn gen_design(law: DesignLaw, n: usize, p: usize, seed: u64) -> Result<DesignMatrix> {
    if p == 0 || n <= p {
        return Err(fcvt_core::Error::InvalidShape { n, p }.into());
    }
    let mut data = vec![0.0; n * p];
    for attempt in 0..MAX_DESIGN_ATTEMPTS {
        law.fill(&mut stream(seed, u64::from(attempt)), &mut data);
        match Matrix::from_row_major(n, p, data.clone()).and_then(DesignMatrix::new) {
            Ok(x) => return Ok(x),
            Err(fcvt_core::Error::RankDeficient { .. }) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    Err(Error::PersistentRankDeficiency {
        attempts: MAX_DESIGN_ATTEMPTS,
    })
}

pub fn gen_errors(law: ErrorLaw, n: usize, seed: u64) -> Vec<f64> {
    let mut e = vec![0.0; n];
    law.fill(&mut stream(seed, 0), &mut e);
    e
}

/// `xᵢh` for each row.
fn heterogeneity(model: Model, x: &Matrix) -> Result<Vec<f64>> {
    let k = model.active(x.cols())?;
    Ok((0..x.rows()).map(|i| x.row(i)[..k].iter().sum()).collect())
}

pub fn apply_model(model: Model, x: &Matrix, errors: &[f64]) -> Result<Vec<f64>> {
    if errors.len() != x.rows() {
        return Err(fcvt_core::Error::DimensionMismatch {
            what: "error vector length",
            expected: x.rows(),
            found: errors.len(),
        }
        .into());
    }
    let h = heterogeneity(model, x)?;
    Ok(errors.iter().zip(h).map(|(e, xh)| e * (1.0 + xh)).collect())
}

/// Error standard deviations `|1 + xᵢh|` implied by `model`.
pub fn model_sigma(model: Model, x: &Matrix) -> Result<Vec<f64>> {
    Ok(heterogeneity(model, x)?.into_iter().map(|xh| (1.0 + xh).abs()).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub n: usize,
    pub p: usize,
    pub design_law: DesignLaw,
    pub error_law: ErrorLaw,
    pub model: Model,
    pub reps: usize,
    pub alpha: f64,
    pub seed: u64,
    /// Draw one design and condition on it instead of redrawing per replication.
    pub fixed_design: bool,
}

impl SimulationConfig {
    pub fn new(n: usize, p: usize) -> Self {
        Self {
            n,
            p,
            design_law: DesignLaw::Normal,
            error_law: ErrorLaw::Normal,
            model: Model::Null,
            reps: 1000,
            alpha: 0.05,
            seed: 1,
            fixed_design: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 0 || self.n <= self.p {
            return Err(Error::InvalidConfig(format!(
                "need n > p >= 1 (n = {}, p = {})",
                self.n, self.p
            )));
        }
        if self.n > fcvt_core::MAX_N {
            return Err(fcvt_core::Error::TooLarge {
                n: self.n,
                max: fcvt_core::MAX_N,
            }
            .into());
        }
        if self.reps < 100 {
            return Err(Error::InvalidConfig(format!("reps must be at least 100 (got {})", self.reps)));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidConfig(format!("alpha must lie in (0, 1) (got {})", self.alpha)));
        }
        self.model.active(self.p).map(|_| ())
    }
}

/// One simulated test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Replication {
    #[serde(rename = "T")]
    pub t: f64,
    pub a: f64,
    pub b: f64,
    pub z: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationResult {
    pub config: SimulationConfig,
    pub rejections: usize,
    pub rejection_rate: f64,
    pub wilson_ci: [f64; 2],
    pub reps_used: usize,
    #[serde(rename = "mean_T")]
    pub mean_t: f64,
    pub mean_a: f64,
}

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> [f64; 2] {
    if trials == 0 {
        return [0.0, 1.0];
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    [lo, hi]
}

fn one_replication(
    config: &SimulationConfig,
    fixed: Option<&PreparedTest>,
    rep: u64,
) -> Result<Replication> {
    let fresh;
    let prepared = match fixed {
        Some(p) => p,
        None => {
            let x = gen_design(
                config.design_law,
                config.n,
                config.p,
                sub_seed(config.seed, rep, Purpose::Design),
            )?;
            fresh = PreparedTest::new(&x, config.error_law.profile())?;
            &fresh
        }
    };
    let errors = gen_errors(
        config.error_law,
        config.n,
        sub_seed(config.seed, rep, Purpose::Errors),
    );
    let y = apply_model(config.model, prepared.design().entries(), &errors)?;
    let r = prepared.test(&y, Sidedness::Upper)?;
    Ok(Replication {
        t: r.t,
        a: r.a,
        b: r.b,
        z: r.z,
        p_value: r.p_value,
    })
}

/// Every replication of `config`, in replication order. Runs on the current
/// rayon pool; the output does not depend on its size.
pub fn replications(config: &SimulationConfig) -> Result<Vec<Replication>> {
    config.validate()?;
    let fixed = if config.fixed_design {
        let x = gen_design(
            config.design_law,
            config.n,
            config.p,
            sub_seed(config.seed, 0, Purpose::Design),
        )?;
        Some(PreparedTest::new(&x, config.error_law.profile())?)
    } else {
        None
    };
    (0..config.reps as u64)
        .into_par_iter()
        .map(|rep| one_replication(config, fixed.as_ref(), rep))
        .collect()
}

/// Aggregates replications in order, so sums are reproducible bit for bit.
pub fn summarize(config: &SimulationConfig, reps: &[Replication]) -> SimulationResult {
    let count = reps.len();
    let rejections = reps.iter().filter(|r| r.p_value < config.alpha).count();
    let denom = count.max(1) as f64;
    SimulationResult {
        config: config.clone(),
        rejections,
        rejection_rate: rejections as f64 / denom,
        wilson_ci: wilson_interval(rejections, count, Z_95),
        reps_used: count,
        mean_t: reps.iter().map(|r| r.t).sum::<f64>() / denom,
        mean_a: reps.iter().map(|r| r.a).sum::<f64>() / denom,
    }
}

/// The data behind replication 0 of `config` as a table with response `y`
/// followed by covariates `x1 … xp`. Regressing `y` on the covariates without
/// an intercept reproduces that replication's test.
pub fn synthetic_dataset(config: &SimulationConfig) -> Result<Dataset> {
    config.validate()?;
    let x = gen_design(
        config.design_law,
        config.n,
        config.p,
        sub_seed(config.seed, 0, Purpose::Design),
    )?;
    let errors = gen_errors(config.error_law, config.n, sub_seed(config.seed, 0, Purpose::Errors));
    let y = apply_model(config.model, x.entries(), &errors)?;
    let mut header = vec!["y".to_owned()];
    header.extend((1..=config.p).map(|j| format!("x{j}")));
    let rows = (0..config.n)
        .map(|i| {
            let mut row = Vec::with_capacity(config.p + 1);
            row.push(y[i]);
            row.extend_from_slice(x.entries().row(i));
            row
        })
        .collect();
    Ok(Dataset { header, rows })
}

/// Rejection rate of the upper-tail test at level `config.alpha`.
pub fn empirical_rate(config: &SimulationConfig) -> Result<SimulationResult> {
    Ok(summarize(config, &replications(config)?))
}
