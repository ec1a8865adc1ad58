//! Tables, gap tables and scatter data from a finished run directory.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use clt_core::analysis::{Cell, ScoreTable};
use clt_core::corpus::Task;
use clt_core::metrics::{AggregateResult, GroupKey};
use clt_core::{Lang, Real};

use crate::analyze::{analyze_table, load_profiles, write_analysis, AnalyzeOptions};
use crate::eval::{Manifest, AGGREGATES, MANIFEST};

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("{dir} holds no {file}; every grid cell is missing")]
    EmptyRun { dir: PathBuf, file: &'static str },
    #[error("{} grid cell(s) have no aggregate:\n  {}", .0.len(), .0.join("\n  "))]
    MissingCells(Vec<String>),
    #[error("reading {0}: {1}")]
    Read(PathBuf, String),
    #[error("writing {0}: {1}")]
    Write(PathBuf, std::io::Error),
    #[error(transparent)]
    Analysis(#[from] clt_core::analysis::AnalysisError),
}

fn read(dir: &Path, file: &'static str) -> Result<String, ReportError> {
    let path = dir.join(file);
    match std::fs::read_to_string(&path) {
        Ok(s) => Ok(s),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Err(ReportError::EmptyRun { dir: dir.to_path_buf(), file }),
        Err(e) => Err(ReportError::Read(path, e.to_string())),
    }
}

pub fn read_run(dir: &Path) -> Result<(Manifest, Vec<AggregateResult<Real>>), ReportError> {
    let manifest: Manifest =
        serde_json::from_str(&read(dir, MANIFEST)?).map_err(|e| ReportError::Read(dir.join(MANIFEST), e.to_string()))?;
    let mut aggregates = Vec::new();
    for (i, line) in read(dir, AGGREGATES)?.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        aggregates.push(
            serde_json::from_str(line)
                .map_err(|e| ReportError::Read(dir.join(AGGREGATES), format!("line {}: {e}", i + 1)))?,
        );
    }
    Ok((manifest, aggregates))
}

/// Method-by-language table per (task, k), headline metric as `mean ± std`.
pub fn score_tables(
    manifest: &Manifest,
    aggregates: &[AggregateResult<Real>],
) -> BTreeMap<(Task, usize), ScoreTable<Real>> {
    let cfg = &manifest.config;
    let by_key: BTreeMap<&GroupKey, &AggregateResult<Real>> = aggregates.iter().map(|a| (&a.key, a)).collect();
    let mut tables = BTreeMap::new();
    let shots: BTreeSet<usize> = cfg.shots.iter().copied().collect();
    for &task in &cfg.tasks {
        for &k in &shots {
            let mut table = ScoreTable::new(cfg.targets.clone());
            for model in &cfg.models {
                for method in &cfg.methods {
                    let cells = cfg
                        .targets
                        .iter()
                        .map(|language| {
                            let key = GroupKey {
                                model: model.name.clone(),
                                task,
                                language: language.clone(),
                                method: *method,
                                k,
                            };
                            by_key.get(&key).map(|a| {
                                let h = a.headline();
                                Cell { mean: h.mean, std: Some(h.std) }
                            })
                        })
                        .collect();
                    table.push(&model.name, method.name(), cells).expect("one cell per target");
                }
            }
            tables.insert((task, k), table);
        }
    }
    tables
}

/// Writes `tables/`, `gaps/` and `correlation/` under `out` (default
/// `<run>/report`) and returns the files written, sorted.
pub fn emit_report(run_dir: &Path, out: Option<&Path>) -> Result<Vec<PathBuf>, ReportError> {
    let (manifest, aggregates) = read_run(run_dir)?;
    let present: BTreeSet<&GroupKey> = aggregates.iter().map(|a| &a.key).collect();
    let missing: Vec<String> =
        manifest.expected.iter().filter(|k| !present.contains(k)).map(|k| k.to_string()).collect();
    if !missing.is_empty() {
        return Err(ReportError::MissingCells(missing));
    }

    let out = out.map(Path::to_path_buf).unwrap_or_else(|| run_dir.join("report"));
    let cfg = &manifest.config;
    let write = |path: PathBuf, body: String, written: &mut Vec<PathBuf>| -> Result<(), ReportError> {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| ReportError::Write(parent.to_path_buf(), e))?;
        }
        std::fs::write(&path, body).map_err(|e| ReportError::Write(path.clone(), e))?;
        written.push(path);
        Ok(())
    };
    let mut written = Vec::new();
    let profiles = load_profiles(&cfg.report.profiles)?;
    let families: BTreeMap<String, String> = cfg
        .models
        .iter()
        .filter_map(|m| m.family.as_ref().map(|f| (m.name.clone(), f.to_ascii_lowercase())))
        .collect();
    let opts = AnalyzeOptions {
        languages: cfg.report.group_languages.clone(),
        exclusions: cfg.report.exclusions.iter().cloned().collect::<BTreeSet<Lang>>(),
    };
    for ((task, k), table) in score_tables(&manifest, &aggregates) {
        let stem = format!("{}.k{k}", task.name());
        write(out.join("tables").join(format!("{stem}.tsv")), table.to_tsv(), &mut written)?;
        if families.is_empty() {
            continue;
        }
        let analysis = analyze_table(&table, &families, &profiles, &cfg.source, &opts)?;
        let files = write_analysis(&out.join("analysis"), &format!("{stem}."), &analysis)
            .map_err(|e| ReportError::Write(out.join("analysis"), e))?;
        written.extend(files);
    }
    written.sort();
    Ok(written)
}
