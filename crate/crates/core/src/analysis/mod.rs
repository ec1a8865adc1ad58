//! Transfer gaps, seen/unseen grouping and correlations against language
//! profiles.

mod correlation;
mod gap;
mod profiles;
mod table;

use crate::lang::Lang;

pub use correlation::{correlation_report, least_squares, pearson, CorrelationPair, CorrelationReport, XAxis};
pub use gap::{gap_stats, transfer_gap, TransferGapRecord};
pub use profiles::{group_languages, LanguageProfile, ProfileRecord, Profiles};
pub use table::{family_of, Cell, ScoreTable, TableRow};

#[derive(Debug, thiserror::Error)]
pub enum AnalysisError {
    #[error("no profile for language {0}")]
    MissingProfile(Lang),
    #[error("unknown model family {0:?}")]
    UnknownFamily(String),
    #[error("no {1} value for {0}")]
    MissingValue(Lang, &'static str),
    #[error("empty language group")]
    EmptyGroup,
    #[error("{0} xs but {1} ys")]
    LengthMismatch(usize, usize),
    #[error("correlation needs at least 3 pairs, got {0}")]
    TooFewPairs(usize),
    #[error("{0} has zero variance; correlation undefined")]
    ZeroVariance(&'static str),
    #[error("{0}")]
    Data(String),
}
