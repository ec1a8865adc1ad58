use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::lang::Lang;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferGapRecord<T> {
    pub model: String,
    pub method: String,
    /// `seen`, `unseen`, or a single language code.
    pub group: String,
    pub languages: Vec<Lang>,
    pub en_mono: T,
    pub group_mean: T,
    /// `en_mono - group_mean`, unrounded.
    pub gap: T,
}

impl<T: Scalar> TransferGapRecord<T> {
    /// `mean (gap)` with two decimals.
    pub fn display(&self) -> String {
        format!("{:.2} ({:.2})", self.group_mean, self.gap)
    }
}

/// Mean of `scores` and its distance below `en_mono`.
pub fn gap_stats<T: Scalar>(en_mono: T, scores: &[T]) -> Result<(T, T), AnalysisError> {
    if scores.is_empty() {
        return Err(AnalysisError::EmptyGroup);
    }
    let mean = scores.iter().copied().sum::<T>() / T::count(scores.len());
    Ok((mean, en_mono - mean))
}

pub fn transfer_gap<T: Scalar>(
    model: &str,
    method: &str,
    group: &str,
    en_mono: T,
    scores: &[(Lang, T)],
) -> Result<TransferGapRecord<T>, AnalysisError> {
    let values: Vec<T> = scores.iter().map(|(_, v)| *v).collect();
    let (group_mean, gap) = gap_stats(en_mono, &values)?;
    Ok(TransferGapRecord {
        model: model.to_string(),
        method: method.to_string(),
        group: group.to_string(),
        languages: scores.iter().map(|(l, _)| l.clone()).collect(),
        en_mono,
        group_mean,
        gap,
    })
}
