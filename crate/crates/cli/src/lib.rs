//! Orchestration for cross-lingual prompting experiments: run the
//! evaluation grid, then turn its aggregates into tables and analyses.

pub mod analyze;
pub mod config;
pub mod digest;
pub mod eval;
pub mod pipeline;
pub mod report;

pub use config::{Endpoint, ModelConfig, RunConfig, TaskData};
pub use eval::{plan, run_eval, Cell, EvalError, EvalSummary, Manifest};
pub use report::{emit_report, ReportError};
