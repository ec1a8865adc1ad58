use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;
use crate::text::{nfc, segment};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Smoothing {
    /// Zero precision at any order gives a zero score.
    None,
    /// When some precision is zero, add one to matches and totals of
    /// orders >= 2.
    AddOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BleuConfig {
    pub max_ngram_order: usize,
    pub smoothing: Smoothing,
}

impl Default for BleuConfig {
    fn default() -> Self {
        Self { max_ngram_order: 4, smoothing: Smoothing::AddOne }
    }
}

/// NFC, whitespace split, and one token per character for Han, Kana and Thai.
pub fn tokenize(text: &str) -> Vec<String> {
    segment(&nfc(text))
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    for g in tokens.windows(n) {
        *counts.entry(g).or_insert(0) += 1;
    }
    counts
}

/// Clipped matches and candidate n-gram total for order `n`.
fn clipped(cand: &[String], reference: &[String], n: usize) -> (usize, usize) {
    let total = cand.len().saturating_sub(n - 1);
    let ref_counts = ngram_counts(reference, n);
    let matches = ngram_counts(cand, n)
        .into_iter()
        .map(|(g, c)| c.min(ref_counts.get(g).copied().unwrap_or(0)))
        .sum();
    (matches, total)
}

/// Sentence BLEU on pre-tokenized input, 0–100.
pub fn bleu_tokens<T: Scalar>(cand: &[String], reference: &[String], cfg: &BleuConfig) -> T {
    if cand.is_empty() || reference.is_empty() {
        log::warn!("BLEU on empty input ({} vs {} tokens), scoring 0", cand.len(), reference.len());
        return T::zero();
    }
    let order = cfg.max_ngram_order.max(1).min(cand.len());
    let stats: Vec<(usize, usize)> = (1..=order).map(|n| clipped(cand, reference, n)).collect();
    if stats[0].0 == 0 {
        return T::zero();
    }
    let any_zero = stats.iter().any(|&(m, _)| m == 0);
    if any_zero && cfg.smoothing == Smoothing::None {
        return T::zero();
    }
    let log_sum: T = stats
        .iter()
        .enumerate()
        .map(|(i, &(m, t))| {
            let (m, t) = if any_zero && i > 0 { (m + 1, t + 1) } else { (m, t) };
            (T::count(m) / T::count(t)).ln()
        })
        .sum();
    let (c, r) = (T::count(cand.len()), T::count(reference.len()));
    let bp = if c < r { (T::one() - r / c).exp() } else { T::one() };
    let score = T::hundred() * bp * (log_sum / T::count(order)).exp();
    score.max(T::zero()).min(T::hundred())
}

pub fn bleu_score<T: Scalar>(candidate: &str, reference: &str, cfg: &BleuConfig) -> T {
    bleu_tokens(&tokenize(candidate), &tokenize(reference), cfg)
}
