use std::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::Task;
use crate::lang::Lang;
use crate::promptkit::PromptMethod;
use crate::scalar::Scalar;

/// Identifies one aggregated result: everything but the bucket.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GroupKey {
    pub model: String,
    pub task: Task,
    pub language: Lang,
    pub method: PromptMethod,
    pub k: usize,
}

impl fmt::Display for GroupKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}|{}|{}|{}|k={}",
            self.model, self.task, self.language, self.method, self.k
        )
    }
}

/// Score of one generated answer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord<T> {
    pub id: String,
    #[serde(flatten)]
    pub key: GroupKey,
    pub bucket: usize,
    pub f1: T,
    pub exact_match: u8,
}

impl<T: Scalar> ScoreRecord<T> {
    pub fn new(id: String, key: GroupKey, bucket: usize, f1: T, exact_match: bool) -> Self {
        Self { id, key, bucket, f1, exact_match: u8::from(exact_match) }
    }
}

/// Mean over one bucket, on the 0–100 scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketScore<T> {
    #[serde(flatten)]
    pub key: GroupKey,
    pub bucket: usize,
    pub n: usize,
    pub f1: T,
    pub exact_match: T,
}

/// Mean and spread of bucket means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary<T> {
    pub mean: T,
    /// Sample standard deviation (n − 1) of the bucket means.
    pub std: T,
    /// Standard error of the mean, `std / sqrt(n)`.
    pub stderr: T,
    pub n: usize,
    /// Set when only one bucket was available and `std` is reported as 0.
    pub single_bucket: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateResult<T> {
    #[serde(flatten)]
    pub key: GroupKey,
    pub n_buckets: usize,
    pub f1: Summary<T>,
    pub exact_match: Summary<T>,
}

impl<T: Scalar> AggregateResult<T> {
    /// F1 for QA, exact match for the classification tasks.
    pub fn headline(&self) -> &Summary<T> {
        if self.key.task.is_classification() {
            &self.exact_match
        } else {
            &self.f1
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum MetricsError {
    #[error("no buckets to aggregate")]
    NoBuckets,
    #[error("bucket {0} is empty")]
    EmptyBucket(usize),
    #[error("records from different groups mixed: {0} vs {1}")]
    MixedGroups(String, String),
}

pub fn summarize<T: Scalar>(values: &[T]) -> Result<Summary<T>, MetricsError> {
    if values.is_empty() {
        return Err(MetricsError::NoBuckets);
    }
    let n = values.len();
    let mean = values.iter().copied().sum::<T>() / T::count(n);
    if n == 1 {
        return Ok(Summary { mean, std: T::zero(), stderr: T::zero(), n, single_bucket: true });
    }
    let ss: T = values.iter().map(|v| (*v - mean) * (*v - mean)).sum();
    let std = (ss / T::count(n - 1)).sqrt();
    Ok(Summary { mean, std, stderr: std / T::count(n).sqrt(), n, single_bucket: false })
}

pub fn bucket_score<T: Scalar>(records: &[ScoreRecord<T>]) -> Result<BucketScore<T>, MetricsError> {
    let first = records.first().ok_or(MetricsError::EmptyBucket(0))?;
    for r in records {
        if r.key != first.key || r.bucket != first.bucket {
            return Err(MetricsError::MixedGroups(
                format!("{}#{}", first.key, first.bucket),
                format!("{}#{}", r.key, r.bucket),
            ));
        }
    }
    let n = records.len();
    let f1 = records.iter().map(|r| r.f1).sum::<T>() / T::count(n) * T::hundred();
    let em = records.iter().map(|r| T::count(usize::from(r.exact_match))).sum::<T>()
        / T::count(n)
        * T::hundred();
    Ok(BucketScore { key: first.key.clone(), bucket: first.bucket, n, f1, exact_match: em })
}

/// Bucket means (×100), then mean and sample std across buckets.
pub fn aggregate<T: Scalar>(buckets: &[Vec<ScoreRecord<T>>]) -> Result<AggregateResult<T>, MetricsError> {
    if buckets.is_empty() {
        return Err(MetricsError::NoBuckets);
    }
    let mut scores = Vec::with_capacity(buckets.len());
    for (i, b) in buckets.iter().enumerate() {
        if b.is_empty() {
            return Err(MetricsError::EmptyBucket(i));
        }
        scores.push(bucket_score(b)?);
    }
    let key = scores[0].key.clone();
    if let Some(other) = scores.iter().find(|s| s.key != key) {
        return Err(MetricsError::MixedGroups(key.to_string(), other.key.to_string()));
    }
    from_bucket_scores(key, &scores)
}

pub(crate) fn from_bucket_scores<T: Scalar>(
    key: GroupKey,
    scores: &[BucketScore<T>],
) -> Result<AggregateResult<T>, MetricsError> {
    let f1: Vec<T> = scores.iter().map(|s| s.f1).collect();
    let em: Vec<T> = scores.iter().map(|s| s.exact_match).collect();
    Ok(AggregateResult {
        key,
        n_buckets: scores.len(),
        f1: summarize(&f1)?,
        exact_match: summarize(&em)?,
    })
}

impl<T: Scalar> AggregateResult<T> {
    pub fn from_buckets(key: GroupKey, scores: &[BucketScore<T>]) -> Result<Self, MetricsError> {
        from_bucket_scores(key, scores)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key() -> GroupKey {
        GroupKey {
            model: "m".into(),
            task: Task::Qa,
            language: Lang::new("de"),
            method: PromptMethod::Mono,
            k: 2,
        }
    }

    #[test]
    fn constant_means_have_zero_std() {
        let s = summarize(&[42.0f64; 5]).unwrap();
        assert_eq!(s.mean, 42.0);
        assert_eq!(s.std, 0.0);
        assert!(!s.single_bucket);
    }

    #[test]
    fn one_to_five() {
        // closed form: mean 3, sum of squares 10, sample variance 10/4
        let s = summarize(&[1.0f64, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!(s.mean, 3.0);
        assert!((s.std - 2.5f64.sqrt()).abs() < 1e-12);
        assert!((s.std - 1.5811).abs() < 1e-4);
        assert!((s.stderr - (2.5f64 / 5.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn single_bucket_flagged() {
        let s = summarize(&[7.0f64]).unwrap();
        assert!(s.single_bucket);
        assert_eq!(s.std, 0.0);
    }

    #[test]
    fn aggregate_scales_to_percent() {
        let rec = |b, f1: f64, em| ScoreRecord::new(format!("{b}"), key(), b, f1, em);
        let buckets = vec![
            vec![rec(0, 1.0, true), rec(0, 0.5, false)],
            vec![rec(1, 0.0, false), rec(1, 0.5, false)],
        ];
        let agg = aggregate(&buckets).unwrap();
        assert_eq!(agg.n_buckets, 2);
        assert!((agg.f1.mean - 50.0).abs() < 1e-12);
        assert!((agg.exact_match.mean - 25.0).abs() < 1e-12);
        assert!(agg.f1.std >= 0.0);
    }

    #[test]
    fn empty_bucket_rejected() {
        let buckets: Vec<Vec<ScoreRecord<f64>>> = vec![vec![], vec![]];
        assert_eq!(aggregate(&buckets), Err(MetricsError::EmptyBucket(0)));
    }

}
