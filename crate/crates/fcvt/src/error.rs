use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] fcvt_core::Error),
    #[error("model2 splits the covariates in half and needs an even p (got p = {p})")]
    OddPForModel2 { p: usize },
    #[error("design stayed rank deficient after {attempts} draws")]
    PersistentRankDeficiency { attempts: u32 },
    #[error("unknown law `{0}`")]
    UnknownLaw(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("row {row}, column `{column}`: missing value")]
    MissingValue { row: usize, column: String },
    #[error("row {row}, column `{column}`: cannot parse `{value}` as a number")]
    ParseNumber {
        row: usize,
        column: String,
        value: String,
    },
    #[error("no column `{0}` in header")]
    UnknownColumn(String),
    #[error("dataset has no data rows")]
    EmptyDataset,
    #[error("design rank deficient; linearly dependent columns: {}", .columns.join(", "))]
    DependentColumns { columns: Vec<String> },
}

impl Error {
    /// Process exit status: 2 for usage, IO and parse problems, 3 for
    /// numerical or degenerate input.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Core(fcvt_core::Error::TooLarge { .. })
            | Error::UnknownLaw(_)
            | Error::InvalidConfig(_)
            | Error::Io { .. }
            | Error::Csv(_)
            | Error::MissingValue { .. }
            | Error::ParseNumber { .. }
            | Error::UnknownColumn(_)
            | Error::EmptyDataset => 2,
            Error::Core(_)
            | Error::OddPForModel2 { .. }
            | Error::PersistentRankDeficiency { .. }
            | Error::DependentColumns { .. } => 3,
        }
    }
}

impl Error {
    /// Short condition name for one-line diagnostics.
    pub fn kind(&self) -> &'static str {
        use fcvt_core::Error as C;
        match self {
            Error::Core(c) => match c {
                C::DimensionMismatch { .. } => "DimensionMismatch",
                C::InvalidShape { .. } => "InvalidShape",
                C::RankDeficient { .. } => "RankDeficient",
                C::NonFinite(_) => "NonFinite",
                C::NonPositiveSigma { .. } => "NonPositiveSigma",
                C::InvalidMomentSequence(_) => "InvalidMomentSequence",
                C::NonPositiveVariance { .. } => "NonPositiveVariance",
                C::DegenerateResiduals => "DegenerateResiduals",
                C::ZeroDenominator => "ZeroDenominator",
                C::TooLarge { .. } => "TooLarge",
                C::PatternInvalid(_) => "PatternInvalid",
                C::MissingCubicFunctionals => "MissingCubicFunctionals",
            },
            Error::OddPForModel2 { .. } => "OddPForModel2",
            Error::PersistentRankDeficiency { .. } => "PersistentRankDeficiency",
            Error::UnknownLaw(_) => "UnknownLaw",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::Io { .. } => "Io",
            Error::Csv(_) => "Csv",
            Error::MissingValue { .. } => "MissingValue",
            Error::ParseNumber { .. } => "ParseNumber",
            Error::UnknownColumn(_) => "UnknownColumn",
            Error::EmptyDataset => "EmptyDataset",
            Error::DependentColumns { .. } => "RankDeficient",
        }
    }
}
