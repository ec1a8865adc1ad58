use std::collections::BTreeSet;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::gap::TransferGapRecord;
use super::profiles::Profiles;
use super::AnalysisError;
use crate::lang::Lang;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum XAxis {
    Proximity,
    Proportion,
}

impl XAxis {
    pub fn label(self) -> &'static str {
        match self {
            XAxis::Proximity => "proximity",
            XAxis::Proportion => "proportion",
        }
    }
}

impl std::str::FromStr for XAxis {
    type Err = AnalysisError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "proximity" => Ok(XAxis::Proximity),
            "proportion" => Ok(XAxis::Proportion),
            _ => Err(AnalysisError::Data(format!("unknown x axis {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationPair<T> {
    pub language: Lang,
    pub x: T,
    pub y: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport<T> {
    pub model_family: String,
    pub x_label: XAxis,
    pub y_label: String,
    pub pairs: Vec<CorrelationPair<T>>,
    pub r: T,
    pub excluded: Vec<Lang>,
}

/// Sample Pearson correlation, clamped to [-1, 1].
pub fn pearson<T: Scalar>(xs: &[T], ys: &[T]) -> Result<T, AnalysisError> {
    if xs.len() != ys.len() {
        return Err(AnalysisError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 3 {
        return Err(AnalysisError::TooFewPairs(xs.len()));
    }
    let n = T::count(xs.len());
    let mx = xs.iter().copied().sum::<T>() / n;
    let my = ys.iter().copied().sum::<T>() / n;
    let (mut sxy, mut sxx, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy = sxy + dx * dy;
        sxx = sxx + dx * dx;
        syy = syy + dy * dy;
    }
    if sxx == T::zero() {
        return Err(AnalysisError::ZeroVariance("x"));
    }
    if syy == T::zero() {
        return Err(AnalysisError::ZeroVariance("y"));
    }
    let r = sxy / (sxx * syy).sqrt();
    Ok(r.max(-T::one()).min(T::one()))
}

/// Ordinary least squares fit `y = slope * x + intercept`.
pub fn least_squares<T: Scalar>(xs: &[T], ys: &[T]) -> Option<(T, T)> {
    if xs.len() != ys.len() || xs.is_empty() {
        return None;
    }
    let n = T::count(xs.len());
    let mx = xs.iter().copied().sum::<T>() / n;
    let my = ys.iter().copied().sum::<T>() / n;
    let sxx: T = xs.iter().map(|&x| (x - mx) * (x - mx)).sum();
    if sxx == T::zero() {
        return None;
    }
    let sxy: T = xs.iter().zip(ys).map(|(&x, &y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Pairs per-language transfer gaps with a profile attribute and correlates
/// them. Each gap record must cover exactly one language.
pub fn correlation_report<T: Scalar>(
    gaps: &[TransferGapRecord<T>],
    profiles: &Profiles,
    family: &str,
    x: XAxis,
    exclusions: &BTreeSet<Lang>,
) -> Result<CorrelationReport<T>, AnalysisError> {
    let fam = profiles.require_family(family)?;
    let mut pairs = Vec::new();
    let mut excluded = Vec::new();
    for g in gaps {
        let [lang] = g.languages.as_slice() else {
            return Err(AnalysisError::Data(format!("gap record {} spans {} languages", g.group, g.languages.len())));
        };
        if exclusions.contains(lang) {
            excluded.push(lang.clone());
            continue;
        }
        let p = profiles.require(lang)?;
        let xv = match x {
            XAxis::Proximity => p.proximity_to_en,
            XAxis::Proportion => p.proportion.get(&fam).copied(),
        }
        .ok_or_else(|| AnalysisError::MissingValue(lang.clone(), x.label()))?;
        pairs.push(CorrelationPair { language: lang.clone(), x: T::lit(xv), y: g.gap });
    }
    pairs.sort_by(|a, b| a.language.cmp(&b.language));
    excluded.sort();
    let xs: Vec<T> = pairs.iter().map(|p| p.x).collect();
    let ys: Vec<T> = pairs.iter().map(|p| p.y).collect();
    let r = pearson(&xs, &ys)?;
    Ok(CorrelationReport { model_family: fam, x_label: x, y_label: "transfer gap".into(), pairs, r, excluded })
}

impl<T: Scalar> CorrelationReport<T> {
    pub fn scatter_tsv(&self) -> String {
        let mut out = format!("language\t{}\t{}\n", self.x_label.label(), self.y_label.replace(' ', "_"));
        for p in &self.pairs {
            let _ = writeln!(out, "{}\t{:.6}\t{:.6}", p.language, p.x, p.y);
        }
        out
    }

    /// Scatter plot with a least-squares line.
    pub fn svg(&self) -> String {
        let xs: Vec<f64> = self.pairs.iter().map(|p| p.x.to_f64().unwrap_or(0.0)).collect();
        let ys: Vec<f64> = self.pairs.iter().map(|p| p.y.to_f64().unwrap_or(0.0)).collect();
        let (w, h, m) = (480.0, 360.0, 48.0);
        let span = |v: &[f64]| {
            let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let pad = ((hi - lo) * 0.05).max(1e-9);
            (lo - pad, hi + pad)
        };
        let (x0, x1) = span(&xs);
        let (y0, y1) = span(&ys);
        let px = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
        let py = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);

        let mut s = String::new();
        let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
        let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<path d="M{m} {m} V{:.1} H{:.1}" fill="none" stroke="black"/>"#,
            h - m,
            w - m
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="12">{}</text>"#,
            w / 2.0,
            h - 12.0,
            self.x_label.label()
        );
        let _ = writeln!(
            s,
            r#"<text x="14" y="{:.1}" text-anchor="middle" font-size="12" transform="rotate(-90 14 {:.1})">{}</text>"#,
            h / 2.0,
            h / 2.0,
            self.y_label
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="24" text-anchor="end" font-size="12">r = {:.2}</text>"#,
            w - m,
            self.r.to_f64().unwrap_or(0.0)
        );
        if let Some((a, b)) = least_squares(&xs, &ys) {
            let _ = writeln!(
                s,
                r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="steelblue" stroke-dasharray="4 3"/>"#,
                px(x0),
                py(a * x0 + b),
                px(x1),
                py(a * x1 + b)
            );
        }
        for (p, (&x, &y)) in self.pairs.iter().zip(xs.iter().zip(&ys)) {
            let _ = writeln!(s, r#"<circle cx="{:.1}" cy="{:.1}" r="4" fill="black"/>"#, px(x), py(y));
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" font-size="11">{}</text>"#,
                px(x) + 6.0,
                py(y) - 6.0,
                p.language
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_lines() {
        let xs = [1.0f64, 2.0, 3.0, 4.0, 5.0];
        let up: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0).collect();
        let down: Vec<f64> = xs.iter().map(|x| -x).collect();
        assert_eq!(pearson(&xs, &up).unwrap(), 1.0);
        assert_eq!(pearson(&xs, &down).unwrap(), -1.0);
    }

    #[test]
    fn four_points() {
        // sxy = 4, sxx = syy = 5
        let r = pearson(&[1.0f64, 2.0, 3.0, 4.0], &[2.0, 1.0, 4.0, 3.0]).unwrap();
        assert!((r - 0.6).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(pearson(&[1.0f64, 1.0, 1.0], &[1.0, 2.0, 3.0]), Err(AnalysisError::ZeroVariance("x"))));
        assert!(matches!(pearson(&[1.0f64, 2.0], &[1.0, 2.0]), Err(AnalysisError::TooFewPairs(2))));
        assert!(matches!(pearson(&[1.0f64, 2.0, 3.0], &[1.0, 2.0]), Err(AnalysisError::LengthMismatch(3, 2))));
    }

    #[test]
    fn fit() {
        let (a, b) = least_squares(&[0.0f64, 1.0, 2.0], &[1.0, 3.0, 5.0]).unwrap();
        assert!((a - 2.0).abs() < 1e-12 && (b - 1.0).abs() < 1e-12);
    }
}
