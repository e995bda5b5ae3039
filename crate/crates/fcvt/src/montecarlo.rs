//! Seeded Monte Carlo estimates of the moments of `T₁ = Σε̂ᵢ⁴` and
//! `T₂ = n⁻¹(Σε̂ᵢ²)²` for `ε̂ = Aξ`, for laws where enumeration is impossible.

use fcvt_core::{ExactMoments, Matrix};
use rayon::prelude::*;

use crate::laws::ErrorLaw;
use crate::seeding::{stream, sub_seed, Purpose};
use crate::{Error, Result};

pub const MIN_MC_REPS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloMoments {
    pub estimates: ExactMoments,
    pub standard_errors: ExactMoments,
    pub reps: usize,
}

/// Sample moments of `(T₁, T₂)` over `reps` draws of `ξ` from the law named
/// `law`. Identical inputs give bitwise identical output on any thread count.
pub fn monte_carlo_moments(a: &Matrix, law: &str, reps: usize, seed: u64) -> Result<MonteCarloMoments> {
    let law: ErrorLaw = law.parse()?;
    if reps < MIN_MC_REPS {
        return Err(Error::InvalidConfig(format!(
            "monte carlo needs at least {MIN_MC_REPS} replications (got {reps})"
        )));
    }
    if !a.is_square() {
        return Err(fcvt_core::Error::DimensionMismatch {
            what: "A must be square; columns",
            expected: a.rows(),
            found: a.cols(),
        }
        .into());
    }
    let n = a.rows();
    let draws: Vec<(f64, f64)> = (0..reps as u64)
        .into_par_iter()
        .map(|rep| {
            let mut xi = vec![0.0; n];
            law.fill(&mut stream(sub_seed(seed, rep, Purpose::Moments), 0), &mut xi);
            let e = a.matvec(&xi);
            let (s2, s4) = e.iter().fold((0.0, 0.0), |(s2, s4), v| {
                let v2 = v * v;
                (s2 + v2, s4 + v2 * v2)
            });
            (s4, s2 * s2 / n as f64)
        })
        .collect();

    let r = reps as f64;
    let m1 = draws.iter().map(|d| d.0).sum::<f64>() / r;
    let m2 = draws.iter().map(|d| d.1).sum::<f64>() / r;
    let (mut v1, mut v2, mut c, mut f1, mut f2, mut f12) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for &(t1, t2) in &draws {
        let (d1, d2) = (t1 - m1, t2 - m2);
        v1 += d1 * d1;
        v2 += d2 * d2;
        c += d1 * d2;
        f1 += d1.powi(4);
        f2 += d2.powi(4);
        f12 += d1 * d1 * d2 * d2;
    }
    let (v1, v2, c) = (v1 / (r - 1.0), v2 / (r - 1.0), c / (r - 1.0));
    let (f1, f2, f12) = (f1 / r, f2 / r, f12 / r);
    Ok(MonteCarloMoments {
        estimates: ExactMoments {
            et1: m1,
            et2: m2,
            var_t1: v1,
            var_t2: v2,
            cov: c,
        },
        standard_errors: ExactMoments {
            et1: (v1 / r).sqrt(),
            et2: (v2 / r).sqrt(),
            var_t1: ((f1 - v1 * v1).max(0.0) / r).sqrt(),
            var_t2: ((f2 - v2 * v2).max(0.0) / r).sqrt(),
            cov: ((f12 - c * c).max(0.0) / r).sqrt(),
        },
        reps,
    })
}
