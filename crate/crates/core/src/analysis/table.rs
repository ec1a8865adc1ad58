use std::fmt;
use std::path::Path;

use super::gap::{transfer_gap, TransferGapRecord};
use super::AnalysisError;
use crate::lang::Lang;
use crate::scalar::Scalar;

/// One score cell: `mean ± std`, or a bare mean for zero-shot tables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell<T> {
    pub mean: T,
    pub std: Option<T>,
}

impl<T: Scalar> fmt::Display for Cell<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.std {
            Some(s) => write!(f, "{:.2} ± {:.2}", self.mean, s),
            None => write!(f, "{:.2}", self.mean),
        }
    }
}

impl<T: Scalar> Cell<T> {
    fn parse(raw: &str) -> Result<Option<Self>, String> {
        let raw = raw.trim();
        if raw.is_empty() || raw == "-" {
            return Ok(None);
        }
        let num = |s: &str| s.trim().parse::<f64>().map(T::lit).map_err(|e| format!("{s:?}: {e}"));
        Ok(Some(match raw.split_once('±') {
            Some((m, s)) => Cell { mean: num(m)?, std: Some(num(s)?) },
            None => Cell { mean: num(raw)?, std: None },
        }))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow<T> {
    pub model: String,
    pub method: String,
    /// Aligned with [`ScoreTable::columns`]; `None` for `-`.
    pub cells: Vec<Option<Cell<T>>>,
}

/// Per-language scores, one row per (model, method), as TSV with header
/// `model  method  <lang>...`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable<T> {
    pub columns: Vec<Lang>,
    pub rows: Vec<TableRow<T>>,
}

/// `BLOOM 7.1B` → `bloom`.
pub fn family_of(model: &str) -> String {
    model
        .split(|c: char| c.is_whitespace() || c == '-' || c == '_')
        .next()
        .unwrap_or(model)
        .to_lowercase()
}

impl<T: Scalar> ScoreTable<T> {
    pub fn new(columns: Vec<Lang>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn parse(raw: &str) -> Result<Self, AnalysisError> {
        let mut lines = raw.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| AnalysisError::Data("empty table".into()))?;
        let head: Vec<&str> = header.split('\t').collect();
        if head.len() < 3 || head[0] != "model" || head[1] != "method" {
            return Err(AnalysisError::Data(format!("bad table header {header:?}")));
        }
        let columns: Vec<Lang> = head[2..].iter().map(|c| Lang::new(c.trim())).collect();
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != head.len() {
                return Err(AnalysisError::Data(format!(
                    "table row {}: {} fields, header has {}",
                    i + 2,
                    fields.len(),
                    head.len()
                )));
            }
            let cells = fields[2..]
                .iter()
                .map(|c| Cell::parse(c))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| AnalysisError::Data(format!("table row {}: {e}", i + 2)))?;
            rows.push(TableRow { model: fields[0].to_string(), method: fields[1].to_string(), cells });
        }
        Ok(Self { columns, rows })
    }

    pub fn load(path: &Path) -> Result<Self, AnalysisError> {
        let raw = std::fs::read_to_string(path).map_err(|e| AnalysisError::Data(format!("{}: {e}", path.display())))?;
        Self::parse(&raw)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("model\tmethod");
        for c in &self.columns {
            out.push('\t');
            out.push_str(c.as_str());
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.model);
            out.push('\t');
            out.push_str(&row.method);
            for cell in &row.cells {
                out.push('\t');
                match cell {
                    Some(c) => out.push_str(&c.to_string()),
                    None => out.push('-'),
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn push(&mut self, model: &str, method: &str, cells: Vec<Option<Cell<T>>>) -> Result<(), AnalysisError> {
        if cells.len() != self.columns.len() {
            return Err(AnalysisError::LengthMismatch(self.columns.len(), cells.len()));
        }
        self.rows.push(TableRow { model: model.to_string(), method: method.to_string(), cells });
        Ok(())
    }

    pub fn models(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.model.as_str()) {
                out.push(&r.model);
            }
        }
        out
    }

    pub fn get(&self, model: &str, method: &str, lang: &Lang) -> Option<Cell<T>> {
        let col = self.columns.iter().position(|c| c == lang)?;
        self.rows
            .iter()
            .find(|r| r.model == model && r.method == method)
            .and_then(|r| r.cells[col])
    }

    fn require(&self, model: &str, method: &str, lang: &Lang) -> Result<T, AnalysisError> {
        self.get(model, method, lang)
            .map(|c| c.mean)
            .ok_or_else(|| AnalysisError::Data(format!("no {model} {method} score for {lang}")))
    }

    /// Gap between the model's monolingual English score and the mean of
    /// `method` over `languages`.
    pub fn group_gap(
        &self,
        model: &str,
        method: &str,
        group: &str,
        languages: &[Lang],
    ) -> Result<TransferGapRecord<T>, AnalysisError> {
        let en = self.require(model, "MONO", &Lang::new("en"))?;
        let scores = languages
            .iter()
            .map(|l| self.require(model, method, l).map(|v| (l.clone(), v)))
            .collect::<Result<Vec<_>, _>>()?;
        transfer_gap(model, method, group, en, &scores)
    }

    /// One single-language gap record per entry of `languages`.
    pub fn language_gaps(
        &self,
        model: &str,
        method: &str,
        languages: &[Lang],
    ) -> Result<Vec<TransferGapRecord<T>>, AnalysisError> {
        languages
            .iter()
            .map(|l| self.group_gap(model, method, l.as_str(), std::slice::from_ref(l)))
            .collect()
    }
}
