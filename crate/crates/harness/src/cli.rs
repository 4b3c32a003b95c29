//! Command-line front end.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::compare::{kendall_matrix, write_compare, ScoreTable, SAMPLE_TABLE};
use crate::config::{Format, RunConfig};
use crate::error::{InputError, InputResult};
use crate::experiment::{run_experiment, write_experiment, ExperimentName, ExperimentSpec, Profile};
use crate::score::{run_score, ScoreArgs};

/// Environment variable holding the default output directory.
pub const OUT_ENV: &str = "DISENTANGLE_OUT";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_METRIC: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "disentangle", version, about = "Score representations against ground-truth factors")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Base seed; experiments use consecutive seeds starting here.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Maximum concurrent seed evaluations.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output formats, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub format: Option<Vec<Format>>,
    /// Output directory.
    #[arg(long, global = true, env = OUT_ENV, default_value = "disentangle-out")]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score a factor/code pair read from CSV files.
    Score {
        #[arg(long)]
        factors: PathBuf,
        #[arg(long)]
        codes: PathBuf,
        /// Factor-kind sidecar; defaults to the factors file with a .json extension.
        #[arg(long)]
        kinds: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run a controlled synthetic sweep.
    Experiment {
        #[arg(long)]
        name: ExperimentName,
        #[arg(long, default_value = "desk")]
        profile: Profile,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Kendall rank correlation between the metric columns of a score table.
    Compare {
        /// Score table; omit to use the bundled sample table.
        #[arg(long)]
        table: Option<PathBuf>,
    },
}

fn load_config(path: &Option<PathBuf>) -> InputResult<RunConfig> {
    path.as_deref().map_or_else(|| Ok(RunConfig::default()), RunConfig::load)
}

fn resolve(common: &Common, cfg: &RunConfig) -> (usize, Vec<Format>) {
    let jobs = common.jobs.or(cfg.jobs).unwrap_or(1);
    let formats = common
        .format
        .clone()
        .or_else(|| cfg.formats.clone())
        .unwrap_or_else(|| vec![Format::Csv, Format::Json, Format::Svg]);
    (jobs, formats)
}

fn report_failures(count: usize, what: &str) -> i32 {
    if count == 0 {
        EXIT_OK
    } else {
        eprintln!("{count} {what} had metric failures; partial results were written");
        EXIT_METRIC
    }
}

fn execute(cli: &Cli) -> InputResult<i32> {
    let common = &cli.common;
    match &cli.command {
        Command::Score {
            factors,
            codes,
            kinds,
            config,
        } => {
            let cfg = load_config(config)?;
            let (jobs, formats) = resolve(common, &cfg);
            let report = run_score(&ScoreArgs {
                factors: factors.clone(),
                codes: codes.clone(),
                sidecar: kinds.clone(),
                config: cfg,
                seed: common.seed,
                jobs,
                formats,
                out: common.out.clone(),
            })?;
            for c in &report.columns {
                match (c.mean, c.std) {
                    (Some(m), Some(s)) => println!("{:<24} {m:.4} ± {s:.4}", c.column),
                    _ => println!("{:<24} failed: {}", c.column, c.errors.join("; ")),
                }
            }
            Ok(report_failures(report.failures(), "score columns"))
        }
        Command::Experiment { name, profile, config } => {
            let cfg = load_config(config)?;
            let (jobs, formats) = resolve(common, &cfg);
            let metrics = cfg.resolve_metrics()?;
            let spec = ExperimentSpec::standard(*name, *profile, common.seed);
            let (result, timing) = run_experiment(&spec, &metrics, &cfg.settings, jobs)?;
            write_experiment(&result, &timing, &common.out, &formats)?;
            println!(
                "{}: {} points x {} seeds in {:.1}s -> {}",
                name.as_str(),
                spec.points.len(),
                spec.seeds.len(),
                timing.total_seconds,
                common.out.display()
            );
            Ok(report_failures(result.failures(), "curve points"))
        }
        Command::Compare { table } => {
            let (_, formats) = resolve(common, &RunConfig::default());
            let t = match table {
                Some(p) => ScoreTable::load(p)?,
                None => ScoreTable::parse(SAMPLE_TABLE, std::path::Path::new("<sample table>"))?,
            };
            let k = kendall_matrix(&t).map_err(InputError::from)?;
            write_compare(&k, &common.out, &formats)?;
            println!(
                "{} metrics over {} configurations -> {}",
                k.metrics.len(),
                k.num_configs,
                common.out.display()
            );
            Ok(EXIT_OK)
        }
    }
}

/// Runs the parsed command and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}
