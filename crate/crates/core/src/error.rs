use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {what} (expected {expected}, found {found})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("invalid design shape n={n}, p={p}: need n > p >= 1")]
    InvalidShape { n: usize, p: usize },
    #[error("design matrix is rank deficient; linearly dependent columns {columns:?}")]
    RankDeficient { columns: Vec<usize> },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("sigma[{index}] = {value} is not positive")]
    NonPositiveSigma { index: usize, value: f64 },
    #[error("invalid moment sequence: {0} violated")]
    InvalidMomentSequence(&'static str),
    #[error("null variance b = {b:e} is not positive (design too close to degenerate, p near n?)")]
    NonPositiveVariance { b: f64 },
    #[error("all residuals are zero; the statistic is undefined")]
    DegenerateResiduals,
    #[error("zero denominator in delta-method ratio")]
    ZeroDenominator,
    #[error("n = {n} exceeds the supported maximum {max}")]
    TooLarge { n: usize, max: usize },
    #[error("invalid index pattern: {0}")]
    PatternInvalid(&'static str),
    #[error("profile has non-zero nu4/nu6 but the summary was computed without the cubic trace terms")]
    MissingCubicFunctionals,
}
