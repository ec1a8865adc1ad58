use std::collections::HashMap;

use super::normalize::{normalize_answer_with, PunctuationClass};
use crate::lang::Lang;
use crate::scalar::Scalar;

/// Token-multiset F1 between two normalized token sequences. Two empty
/// sequences match perfectly; one empty side scores zero.
pub fn token_f1<T: Scalar>(prediction: &[String], gold: &[String]) -> T {
    if prediction.is_empty() || gold.is_empty() {
        return if prediction.is_empty() && gold.is_empty() { T::one() } else { T::zero() };
    }
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for t in gold {
        *counts.entry(t.as_str()).or_default() += 1;
    }
    let mut common = 0usize;
    for t in prediction {
        if let Some(c) = counts.get_mut(t.as_str()) {
            if *c > 0 {
                *c -= 1;
                common += 1;
            }
        }
    }
    if common == 0 {
        return T::zero();
    }
    let precision = T::count(common) / T::count(prediction.len());
    let recall = T::count(common) / T::count(gold.len());
    (T::lit(2.0) * precision * recall) / (precision + recall)
}

/// Maximum token F1 over the gold answers.
pub fn f1<T: Scalar, S: AsRef<str>>(prediction: &str, golds: &[S], language: &Lang) -> T {
    f1_with(prediction, golds, language, PunctuationClass::Unicode)
}

pub fn f1_with<T: Scalar, S: AsRef<str>>(
    prediction: &str,
    golds: &[S],
    language: &Lang,
    punctuation: PunctuationClass,
) -> T {
    let pred = normalize_answer_with(prediction, language, punctuation);
    golds
        .iter()
        .map(|g| token_f1::<T>(&pred, &normalize_answer_with(g.as_ref(), language, punctuation)))
        .fold(T::zero(), T::max)
}

/// True when the normalized prediction equals any normalized gold answer.
pub fn exact_match<S: AsRef<str>>(prediction: &str, golds: &[S], language: &Lang) -> bool {
    exact_match_with(prediction, golds, language, PunctuationClass::Unicode)
}

pub fn exact_match_with<S: AsRef<str>>(
    prediction: &str,
    golds: &[S],
    language: &Lang,
    punctuation: PunctuationClass,
) -> bool {
    let pred = normalize_answer_with(prediction, language, punctuation);
    golds
        .iter()
        .any(|g| normalize_answer_with(g.as_ref(), language, punctuation) == pred)
}
