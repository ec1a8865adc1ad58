use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::PromptError;

/// Which language an attribute of a demonstration is rendered in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Src,
    Tgt,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Src => "src",
            Side::Tgt => "tgt",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AttributeAssignment {
    pub context: Side,
    pub question: Side,
    pub answer: Side,
}

impl AttributeAssignment {
    pub const fn new(context: Side, question: Side, answer: Side) -> Self {
        Self { context, question, answer }
    }

    pub const ALL_TARGET: Self = Self::new(Side::Tgt, Side::Tgt, Side::Tgt);

    /// True when some attribute is rendered in the source language.
    pub fn uses_source(&self) -> bool {
        [self.context, self.question, self.answer].contains(&Side::Src)
    }
}

impl fmt::Display for AttributeAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}-{}", self.context, self.question, self.answer)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PromptMethod {
    #[serde(rename = "MONO")]
    Mono,
    #[serde(rename = "OUT_CLT")]
    OutClt,
    #[serde(rename = "IN_CLT_TGT_A", alias = "IN_CLT")]
    InCltTgtA,
    #[serde(rename = "IN_CLT_SRC_A")]
    InCltSrcA,
    /// Ablation: question and answer swapped relative to `IN_CLT_SRC_A`,
    /// i.e. only the answer stays in the target language.
    #[serde(rename = "IN_CLT_SRC_Q")]
    InCltSrcQ,
}

impl PromptMethod {
    pub const ALL: [PromptMethod; 5] = [
        PromptMethod::Mono,
        PromptMethod::OutClt,
        PromptMethod::InCltTgtA,
        PromptMethod::InCltSrcA,
        PromptMethod::InCltSrcQ,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PromptMethod::Mono => "MONO",
            PromptMethod::OutClt => "OUT_CLT",
            PromptMethod::InCltTgtA => "IN_CLT_TGT_A",
            PromptMethod::InCltSrcA => "IN_CLT_SRC_A",
            PromptMethod::InCltSrcQ => "IN_CLT_SRC_Q",
        }
    }

    pub fn assignment(self) -> AttributeAssignment {
        use Side::*;
        match self {
            PromptMethod::Mono => AttributeAssignment::new(Tgt, Tgt, Tgt),
            PromptMethod::OutClt => AttributeAssignment::new(Src, Src, Src),
            PromptMethod::InCltTgtA => AttributeAssignment::new(Src, Tgt, Tgt),
            PromptMethod::InCltSrcA => AttributeAssignment::new(Src, Tgt, Src),
            PromptMethod::InCltSrcQ => AttributeAssignment::new(Src, Src, Tgt),
        }
    }

    /// Methods whose demonstrations draw on the source language.
    pub fn is_cross_lingual(self) -> bool {
        self.assignment().uses_source()
    }
}

impl fmt::Display for PromptMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PromptMethod {
    type Err = PromptError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_uppercase().replace(['-', ' '], "_");
        match key.as_str() {
            "MONO" => Ok(PromptMethod::Mono),
            "OUT_CLT" => Ok(PromptMethod::OutClt),
            "IN_CLT_TGT_A" | "IN_CLT" => Ok(PromptMethod::InCltTgtA),
            "IN_CLT_SRC_A" => Ok(PromptMethod::InCltSrcA),
            "IN_CLT_SRC_Q" => Ok(PromptMethod::InCltSrcQ),
            _ => Err(PromptError::UnknownMethod(s.to_string())),
        }
    }
}

pub fn resolve_assignment(method: &str) -> Result<AttributeAssignment, PromptError> {
    method.parse::<PromptMethod>().map(PromptMethod::assignment)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table() {
        let t = |s: &str| resolve_assignment(s).unwrap().to_string();
        assert_eq!(t("MONO"), "tgt-tgt-tgt");
        assert_eq!(t("OUT_CLT"), "src-src-src");
        assert_eq!(t("IN_CLT_TGT_A"), "src-tgt-tgt");
        assert_eq!(t("IN_CLT_SRC_A"), "src-tgt-src");
        assert_eq!(t("IN_CLT_SRC_Q"), "src-src-tgt");
        assert_eq!(t("in-clt"), "src-tgt-tgt");
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(resolve_assignment("ZERO_CLT"), Err(PromptError::UnknownMethod(_))));
    }

    #[test]
    fn serde_names_match_display() {
        for m in PromptMethod::ALL {
            let json = serde_json::to_string(&m).unwrap();
            assert_eq!(json, format!("\"{m}\""));
            assert_eq!(m.name().parse::<PromptMethod>().unwrap(), m);
        }
    }
}
