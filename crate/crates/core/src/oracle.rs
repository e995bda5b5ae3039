//! Ground truth for the closed forms: exhaustive enumeration over Rademacher
//! error vectors and literal evaluation of index-pattern sums.

use alloc::vec;
use alloc::vec::Vec;

use crate::functionals::{GeneralSummary, ProjectionSummary};
use crate::linalg::{powi, Matrix};
use crate::{Error, Result};

/// Largest number of signs `enumerate_two_point` will enumerate.
pub const MAX_ENUMERATION_N: usize = 22;
/// Largest matrix `naive_omega_sum` accepts.
pub const MAX_PATTERN_N: usize = 12;

/// Moments of `T₁ = Σᵢ ε̂ᵢ⁴` and `T₂ = n⁻¹(Σᵢ ε̂ᵢ²)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactMoments {
    pub et1: f64,
    pub et2: f64,
    pub var_t1: f64,
    pub var_t2: f64,
    pub cov: f64,
}

/// Exact moments of `T₁`, `T₂` for `ε̂ = Aξ` with ξ uniform on `{−1, +1}ᵐ`,
/// m = number of columns of `A`, n = number of rows.
///
/// Both statistics are even in ξ, so only the half with `ξₘ = +1` is
/// visited. Successive sign vectors differ in one entry (Gray order), which
/// makes each step O(n); `ε̂` is recomputed from scratch every 256 steps.
pub fn enumerate_two_point(a: &Matrix) -> Result<ExactMoments> {
    let (n, m) = check_enumeration(a)?;
    let half = 1usize << (m - 1);
    let mut signs = vec![1.0f64; m];
    let mut resid = a.matvec(&signs);
    let mut t1 = Vec::with_capacity(half);
    let mut t2 = Vec::with_capacity(half);
    let (v1, v2) = t_pair(&resid, n);
    t1.push(v1);
    t2.push(v2);
    for step in 1..half {
        let bit = step.trailing_zeros() as usize;
        signs[bit] = -signs[bit];
        if step % 256 == 0 {
            resid = a.matvec(&signs);
        } else {
            let delta = 2.0 * signs[bit];
            for (i, r) in resid.iter_mut().enumerate() {
                *r += delta * a[(i, bit)];
            }
        }
        let (v1, v2) = t_pair(&resid, n);
        t1.push(v1);
        t2.push(v2);
    }
    Ok(moments_of(&t1, &t2))
}

/// Unhalved, direct-evaluation version of [`enumerate_two_point`]; O(2ᵐn²).
#[doc(hidden)]
pub fn enumerate_two_point_full(a: &Matrix) -> Result<ExactMoments> {
    let (n, m) = check_enumeration(a)?;
    let total = 1usize << m;
    let mut t1 = Vec::with_capacity(total);
    let mut t2 = Vec::with_capacity(total);
    let mut signs = vec![0.0; m];
    for mask in 0..total {
        for (k, s) in signs.iter_mut().enumerate() {
            *s = if mask >> k & 1 == 1 { -1.0 } else { 1.0 };
        }
        let (v1, v2) = t_pair(&a.matvec(&signs), n);
        t1.push(v1);
        t2.push(v2);
    }
    Ok(moments_of(&t1, &t2))
}

fn check_enumeration(a: &Matrix) -> Result<(usize, usize)> {
    let (n, m) = (a.rows(), a.cols());
    if m > MAX_ENUMERATION_N {
        return Err(Error::TooLarge {
            n: m,
            max: MAX_ENUMERATION_N,
        });
    }
    if n == 0 || m == 0 {
        return Err(Error::InvalidShape { n, p: m });
    }
    if !a.all_finite() {
        return Err(Error::NonFinite("matrix A"));
    }
    Ok((n, m))
}

#[inline]
fn t_pair(resid: &[f64], n: usize) -> (f64, f64) {
    let mut s2 = 0.0;
    let mut s4 = 0.0;
    for r in resid {
        let r2 = r * r;
        s2 += r2;
        s4 += r2 * r2;
    }
    (s4, s2 * s2 / n as f64)
}

/// Two-pass population moments over equiprobable outcomes.
fn moments_of(t1: &[f64], t2: &[f64]) -> ExactMoments {
    let count = t1.len() as f64;
    let et1 = pairwise_sum(t1) / count;
    let et2 = pairwise_sum(t2) / count;
    let d1: Vec<f64> = t1.iter().map(|v| v - et1).collect();
    let d2: Vec<f64> = t2.iter().map(|v| v - et2).collect();
    let sq1: Vec<f64> = d1.iter().map(|v| v * v).collect();
    let sq2: Vec<f64> = d2.iter().map(|v| v * v).collect();
    let cr: Vec<f64> = d1.iter().zip(&d2).map(|(x, y)| x * y).collect();
    ExactMoments {
        et1,
        et2,
        var_t1: pairwise_sum(&sq1) / count,
        var_t2: pairwise_sum(&sq2) / count,
        cov: pairwise_sum(&cr) / count,
    }
}

fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 64 {
        v.iter().sum()
    } else {
        let (l, r) = v.split_at(v.len() / 2);
        pairwise_sum(l) + pairwise_sum(r)
    }
}

/// Exponent pattern of an index sum
/// `Σ_{i₁..i_t, j₁..j_s} Π_τ Π_ρ a_{i_τ j_ρ}^{φ_τρ}`, optionally restricted to
/// pairwise distinct `j`s.
///
/// Row sums of φ are the multiplicities of the `i` indices (γ) and column
/// sums those of the `j` indices (ω).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaPattern {
    phi: Vec<Vec<u32>>,
    restricted: bool,
}

impl OmegaPattern {
    /// Validates φ against the declared multiplicities `gamma` (one per
    /// row) and `omega` (one per column).
    pub fn new(gamma: &[u32], omega: &[u32], phi: Vec<Vec<u32>>, restricted: bool) -> Result<Self> {
        let pat = Self::from_exponents(phi, restricted)?;
        if pat.gamma() != gamma {
            return Err(Error::PatternInvalid("row sums differ from gamma"));
        }
        if pat.omega() != omega {
            return Err(Error::PatternInvalid("column sums differ from omega"));
        }
        Ok(pat)
    }

    /// Pattern with multiplicities read off φ.
    pub fn from_exponents(phi: Vec<Vec<u32>>, restricted: bool) -> Result<Self> {
        let t = phi.len();
        if t == 0 || t > 2 {
            return Err(Error::PatternInvalid("need 1 or 2 i-indices"));
        }
        let s = phi[0].len();
        if s == 0 || s > 4 {
            return Err(Error::PatternInvalid("need 1 to 4 j-indices"));
        }
        if phi.iter().any(|row| row.len() != s) {
            return Err(Error::PatternInvalid("ragged exponent matrix"));
        }
        if phi.iter().any(|row| row.iter().all(|&e| e == 0)) {
            return Err(Error::PatternInvalid("i-index with no factors"));
        }
        if (0..s).any(|k| phi.iter().all(|row| row[k] == 0)) {
            return Err(Error::PatternInvalid("j-index with no factors"));
        }
        Ok(Self { phi, restricted })
    }

    pub fn t(&self) -> usize {
        self.phi.len()
    }

    pub fn s(&self) -> usize {
        self.phi[0].len()
    }

    pub fn phi(&self) -> &[Vec<u32>] {
        &self.phi
    }

    pub fn restricted(&self) -> bool {
        self.restricted
    }

    pub fn gamma(&self) -> Vec<u32> {
        self.phi.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn omega(&self) -> Vec<u32> {
        (0..self.s()).map(|k| self.phi.iter().map(|r| r[k]).sum()).collect()
    }

    pub fn restricted_version(&self) -> Self {
        Self {
            phi: self.phi.clone(),
            restricted: true,
        }
    }
}

/// Literal nested-loop evaluation of the pattern sum over `A`.
pub fn naive_omega_sum(a: &Matrix, pattern: &OmegaPattern) -> Result<f64> {
    let n = a.rows();
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            what: "square matrix",
            expected: n,
            found: a.cols(),
        });
    }
    if n > MAX_PATTERN_N {
        return Err(Error::TooLarge {
            n,
            max: MAX_PATTERN_N,
        });
    }
    let (t, s) = (pattern.t(), pattern.s());
    let mut idx = vec![0usize; t + s];
    let mut total = 0.0;
    'outer: loop {
        let (is, js) = idx.split_at(t);
        let distinct = !pattern.restricted
            || (0..s).all(|x| (x + 1..s).all(|y| js[x] != js[y]));
        if distinct {
            let mut term = 1.0;
            for (tau, &i) in is.iter().enumerate() {
                for (rho, &j) in js.iter().enumerate() {
                    term *= powi(a[(i, j)], pattern.phi[tau][rho]);
                }
            }
            total += term;
        }
        // Odometer over all t + s indices.
        for slot in (0..t + s).rev() {
            idx[slot] += 1;
            if idx[slot] < n {
                continue 'outer;
            }
            idx[slot] = 0;
        }
        break;
    }
    Ok(total)
}

fn pat(phi: &[&[u32]]) -> OmegaPattern {
    OmegaPattern::from_exponents(phi.iter().map(|r| r.to_vec()).collect(), false)
        .expect("built-in pattern is valid")
}

/// One `GeneralSummary` field, its index pattern and an accessor.
pub struct FieldPattern<S> {
    pub name: &'static str,
    pub pattern: OmegaPattern,
    pub value: fn(&S) -> f64,
}

/// Index-pattern definition of every `GeneralSummary` field.
pub fn general_field_patterns() -> Vec<FieldPattern<GeneralSummary>> {
    macro_rules! field {
        ($name:ident, $phi:expr) => {
            FieldPattern {
                name: stringify!($name),
                pattern: pat($phi),
                value: |g: &GeneralSummary| g.$name,
            }
        };
    }
    vec![
        field!(tr_b, &[&[2]]),
        field!(tr_b_sq, &[&[1, 1], &[1, 1]]),
        field!(diag_b_sq, &[&[2, 2]]),
        field!(a_fourth_sum, &[&[4]]),
        field!(diag_c_sq, &[&[2], &[2]]),
        field!(db_bb_db, &[&[2, 1, 1, 0], &[0, 1, 1, 2]]),
        field!(b_fourth_sum, &[&[1, 1, 1, 1], &[1, 1, 1, 1]]),
        field!(b_db_g, &[&[2, 1, 1], &[0, 1, 3]]),
        field!(db_aa_aa_db, &[&[2, 0, 2], &[0, 2, 2]]),
        field!(bb_k, &[&[1, 1, 2], &[1, 1, 2]]),
        field!(g_sq_trace, &[&[3, 1], &[1, 3]]),
        field!(k_sq_trace, &[&[2, 2], &[2, 2]]),
        field!(b_l, &[&[1, 3], &[1, 3]]),
        field!(v_r, &[&[2, 2], &[0, 4]]),
        field!(r_sq, &[&[4], &[4]]),
        field!(b_sq_diag_b, &[&[2, 1, 1], &[0, 1, 1]]),
        field!(b_g, &[&[1, 1], &[1, 3]]),
        field!(v_c, &[&[2, 2], &[0, 2]]),
        field!(c_r, &[&[4], &[2]]),
    ]
}

/// Index-pattern definition of every `ProjectionSummary` field (at `A = P`).
/// Cubic fields read NaN when the summary lacks them.
pub fn projection_field_patterns() -> Vec<FieldPattern<ProjectionSummary>> {
    macro_rules! field {
        ($name:literal, $phi:expr, $get:expr) => {
            FieldPattern {
                name: $name,
                pattern: pat($phi),
                value: $get,
            }
        };
    }
    fn cubic(s: &ProjectionSummary, f: fn(&crate::CubicFunctionals) -> f64) -> f64 {
        s.cubic.as_ref().map_or(f64::NAN, f)
    }
    vec![
        field!("tr_p", &[&[2]], |s| s.tr_p),
        field!("t1", &[&[2, 2]], |s| s.t1),
        field!("q2", &[&[1, 1, 1, 1], &[1, 1, 1, 1]], |s| s.q2),
        field!("d2", &[&[2, 1, 1, 0], &[0, 1, 1, 2]], |s| s.d2),
        field!("d2sq", &[&[2, 0, 2], &[0, 2, 2]], |s| s.d2sq),
        field!("m2", &[&[2, 2], &[0, 4]], |s| s.m2),
        field!("m5", &[&[4], &[4]], |s| s.m5),
        field!("c1", &[&[1, 1], &[1, 3]], |s| s.c1),
        field!("c2", &[&[2, 2], &[0, 2]], |s| s.c2),
        field!("c3", &[&[4], &[2]], |s| s.c3),
        field!("q3", &[&[1, 1, 2], &[1, 1, 2]], |s| cubic(s, |c| c.q3)),
        field!("q4", &[&[2, 2], &[2, 2]], |s| cubic(s, |c| c.q4)),
        field!("m1", &[&[2, 1, 1], &[0, 1, 3]], |s| cubic(s, |c| c.m1)),
        field!("m3", &[&[1, 3], &[1, 3]], |s| cubic(s, |c| c.m3)),
        field!("m4", &[&[3, 1], &[1, 3]], |s| cubic(s, |c| c.m4)),
    ]
}
