//! Sampling laws for design entries and regression errors.

use std::fmt;
use std::str::FromStr;

use fcvt_core::ErrorMomentProfile;
use rand::Rng;
use rand_distr::{Distribution, FisherF, Gamma, LogNormal, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};

use crate::Error;

/// Distribution of the i.i.d. design entries.
///
/// `t1`, `f32` and `f12` have no finite variance; they are only ever used for
/// covariates, never for errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DesignLaw {
    Normal,
    /// Student t with one degree of freedom (Cauchy).
    T1,
    /// F(3, 2).
    F32,
    /// F(1, 2).
    F12,
    /// `exp(Z)` with `Z ~ N(5, 3²)`.
    #[serde(rename = "lognormal_e_N53")]
    LognormalEN53,
    /// Gamma with shape 2 and scale 2.
    Gamma22,
    Uniform01,
    /// `exp(Z) / 100` with `Z ~ N(5, 3²)`.
    LognormalScaled,
}

impl DesignLaw {
    pub const ALL: [DesignLaw; 8] = [
        DesignLaw::Normal,
        DesignLaw::T1,
        DesignLaw::F32,
        DesignLaw::F12,
        DesignLaw::LognormalEN53,
        DesignLaw::Gamma22,
        DesignLaw::Uniform01,
        DesignLaw::LognormalScaled,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DesignLaw::Normal => "normal",
            DesignLaw::T1 => "t1",
            DesignLaw::F32 => "f32",
            DesignLaw::F12 => "f12",
            DesignLaw::LognormalEN53 => "lognormal_e_N53",
            DesignLaw::Gamma22 => "gamma22",
            DesignLaw::Uniform01 => "uniform01",
            DesignLaw::LognormalScaled => "lognormal_scaled",
        }
    }

    /// Fills `out` with i.i.d. draws.
    pub fn fill<R: Rng + ?Sized>(self, rng: &mut R, out: &mut [f64]) {
        fn fill_from<D: Distribution<f64>, R: Rng + ?Sized>(d: D, rng: &mut R, out: &mut [f64]) {
            for (v, x) in out.iter_mut().zip(d.sample_iter(rng)) {
                *v = x;
            }
        }
        match self {
            DesignLaw::Normal => fill_from(StandardNormal, rng, out),
            DesignLaw::T1 => fill_from(StudentT::new(1.0).expect("valid dof"), rng, out),
            DesignLaw::F32 => fill_from(FisherF::new(3.0, 2.0).expect("valid dof"), rng, out),
            DesignLaw::F12 => fill_from(FisherF::new(1.0, 2.0).expect("valid dof"), rng, out),
            DesignLaw::LognormalEN53 => {
                fill_from(LogNormal::new(5.0, 3.0).expect("valid sigma"), rng, out)
            }
            DesignLaw::Gamma22 => fill_from(Gamma::new(2.0, 2.0).expect("valid shape"), rng, out),
            DesignLaw::Uniform01 => {
                // `random::<f64>()` is [0, 1); redraw the zero so the support is open.
                for v in out.iter_mut() {
                    *v = loop {
                        let u: f64 = rng.random();
                        if u > 0.0 {
                            break u;
                        }
                    };
                }
            }
            DesignLaw::LognormalScaled => {
                fill_from(LogNormal::new(5.0, 3.0).expect("valid sigma"), rng, out);
                out.iter_mut().for_each(|v| *v /= 100.0);
            }
        }
    }
}

/// Unit-variance symmetric error law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorLaw {
    Normal,
    /// ±1 with probability one half each.
    TwoPoint,
    /// Uniform on [−√3, √3].
    Uniform,
}

impl ErrorLaw {
    pub const ALL: [ErrorLaw; 3] = [ErrorLaw::Normal, ErrorLaw::TwoPoint, ErrorLaw::Uniform];

    pub fn name(self) -> &'static str {
        match self {
            ErrorLaw::Normal => "normal",
            ErrorLaw::TwoPoint => "two_point",
            ErrorLaw::Uniform => "uniform",
        }
    }

    /// Moment profile matching the law, used to standardize `T`.
    pub fn profile(self) -> ErrorMomentProfile {
        match self {
            ErrorLaw::Normal => ErrorMomentProfile::gaussian(),
            ErrorLaw::TwoPoint => ErrorMomentProfile::two_point(),
            ErrorLaw::Uniform => ErrorMomentProfile::uniform(),
        }
    }

    pub fn fill<R: Rng + ?Sized>(self, rng: &mut R, out: &mut [f64]) {
        match self {
            ErrorLaw::Normal => {
                for (v, x) in out.iter_mut().zip(StandardNormal.sample_iter(rng)) {
                    *v = x;
                }
            }
            ErrorLaw::TwoPoint => {
                for v in out.iter_mut() {
                    *v = if rng.random::<bool>() { 1.0 } else { -1.0 };
                }
            }
            ErrorLaw::Uniform => {
                let h = 3f64.sqrt();
                for v in out.iter_mut() {
                    *v = rng.random_range(-h..=h);
                }
            }
        }
    }
}

macro_rules! named_enum {
    ($ty:ty) => {
        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self, Error> {
                <$ty>::ALL
                    .into_iter()
                    .find(|l| l.name().eq_ignore_ascii_case(s.trim()))
                    .ok_or_else(|| Error::UnknownLaw(s.to_owned()))
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }
    };
}

named_enum!(DesignLaw);
named_enum!(ErrorLaw);
