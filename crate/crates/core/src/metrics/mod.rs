//! Answer scoring and bucket aggregation.

mod aggregate;
mod normalize;
mod score;

pub use aggregate::{
    aggregate, bucket_score, summarize, AggregateResult, BucketScore, GroupKey, MetricsError,
    ScoreRecord, Summary,
};
pub use normalize::{normalize_answer, normalize_answer_with, PunctuationClass};
pub use score::{exact_match, exact_match_with, f1, f1_with, token_f1};
