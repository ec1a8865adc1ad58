use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use clt_cli::analyze::{analyze_table, load_profiles, write_analysis, AnalyzeOptions};
use clt_cli::pipeline::{self, PipelineRunConfig};
use clt_cli::{emit_report, plan, run_eval, RunConfig};
use clt_core::analysis::{family_of, ScoreTable};
use clt_core::promptkit::PromptMethod;
use clt_core::Lang;

#[derive(Parser)]
#[command(name = "clt", version, about = "Cross-lingual in-context learning experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Translate a source training set and build parallel demonstration buckets.
    Pipeline {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Run the evaluation grid.
    Eval(EvalArgs),
    /// Write tables, gap tables and scatter data for a run directory.
    Report {
        #[arg(long)]
        run: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Transfer gaps and correlations from a method-by-language score table.
    Analyze {
        #[arg(long)]
        table: PathBuf,
        #[arg(long, default_value = "en")]
        source: Lang,
        /// Languages to group; defaults to every column but the source.
        #[arg(long, value_delimiter = ',')]
        languages: Vec<Lang>,
        /// Languages left out of correlations.
        #[arg(long, value_delimiter = ',')]
        exclude: Vec<Lang>,
        /// Extra profile records (JSONL), e.g. proximity values.
        #[arg(long)]
        profiles: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    config: PathBuf,
    /// Print the grid and exit without calling any endpoint.
    #[arg(long)]
    dry_run: bool,
    #[arg(long, value_delimiter = ',')]
    targets: Option<Vec<Lang>>,
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<PromptMethod>>,
    #[arg(long, value_delimiter = ',')]
    shots: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    buckets: Option<Vec<usize>>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_queries: Option<usize>,
    #[arg(long)]
    concurrency: Option<usize>,
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

impl EvalArgs {
    fn apply(self, cfg: &mut RunConfig) {
        if let Some(v) = self.targets {
            cfg.targets = v;
        }
        if let Some(v) = self.methods {
            cfg.methods = v;
        }
        if let Some(v) = self.shots {
            cfg.shots = v;
        }
        if let Some(v) = self.buckets {
            cfg.buckets = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.max_queries {
            cfg.max_queries = Some(v);
        }
        if let Some(v) = self.concurrency {
            cfg.concurrency = v;
        }
        if let Some(v) = self.cache_dir {
            cfg.cache_dir = v;
        }
        if let Some(v) = self.output_dir {
            cfg.output_dir = v;
        }
    }
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match Cli::parse().command {
        Command::Pipeline { config, output_dir } => {
            let mut cfg = PipelineRunConfig::load(&config)?;
            if let Some(dir) = output_dir {
                cfg.output_dir = dir;
            }
            let s = pipeline::run(&cfg)?;
            println!(
                "{} candidates, {} translations accepted, {} drops; buckets in {}",
                s.candidates,
                s.accepted,
                s.dropped,
                s.buckets.display()
            );
        }
        Command::Eval(args) => {
            let mut cfg = RunConfig::load(&args.config)?;
            let dry_run = args.dry_run;
            args.apply(&mut cfg);
            if dry_run {
                let cells = plan(&cfg)?;
                for c in &cells {
                    println!("{c}");
                }
                eprintln!("{} cells", cells.len());
                return Ok(());
            }
            let s = run_eval(&cfg)?;
            println!(
                "{} cells, {} scored, {} failures, {} aggregates, {} endpoint calls -> {}",
                s.cells,
                s.scored,
                s.failures,
                s.aggregates,
                s.network_calls,
                s.run_dir.display()
            );
        }
        Command::Report { run, out } => {
            for path in emit_report(&run, out.as_deref())? {
                println!("{}", path.display());
            }
        }
        Command::Analyze { table, source, languages, exclude, profiles, out } => {
            let t = ScoreTable::load(&table)?;
            let profiles = load_profiles(&profiles)?;
            let known: BTreeSet<&str> = profiles.families().collect();
            let families: BTreeMap<String, String> = t
                .models()
                .into_iter()
                .map(|m| (m.to_string(), family_of(m)))
                .filter(|(_, f)| known.contains(f.as_str()))
                .collect();
            let opts = AnalyzeOptions {
                languages: (!languages.is_empty()).then_some(languages),
                exclusions: exclude.into_iter().collect(),
            };
            let result = analyze_table(&t, &families, &profiles, &source, &opts)?;
            for path in write_analysis(&out, "", &result).with_context(|| out.display().to_string())? {
                println!("{}", path.display());
            }
        }
    }
    Ok(())
}
