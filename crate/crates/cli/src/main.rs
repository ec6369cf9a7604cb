//! `fluctlab run <config>`, `fluctlab validate <config>`, `fluctlab schema`.
//!
//! Exit codes: 0 success, 2 configuration or I/O error, 3 numerical
//! accuracy not reached, 4 model validation failed.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fluctlab::config::{load_config, RunConfig};
use fluctlab::report::{emit, emit_timings, AnalysisResult, RunReport, SCHEMA_ID};
use fluctlab::Error;

#[derive(Parser)]
#[command(name = "fluctlab", version, about = "Fluctuation-operator scaling analyses from TOML run configurations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every analysis of a config and write the reports.
    Run {
        config: PathBuf,
        /// Output directory; overrides `output.dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse and check a config without running it.
    Validate { config: PathBuf },
    /// Print the JSON schema of configs and reports.
    Schema {
        #[arg(long, value_enum, default_value_t = SchemaKind::All)]
        kind: SchemaKind,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemaKind {
    All,
    Config,
    Report,
}

fn stem_of(config: &RunConfig, path: &Path) -> String {
    config
        .output
        .stem
        .clone()
        .unwrap_or_else(|| path.file_stem().map_or("report".into(), |s| s.to_string_lossy().into_owned()))
}

fn summary(report: &RunReport) {
    for (i, r) in report.results.iter().enumerate() {
        let sweeps: Vec<String> = r
            .sweeps()
            .iter()
            .map(|s| match s.exponent {
                Some(e) => format!("{} exponent {e:.4} {:?}", s.label, s.verdict),
                None => format!("{} {:?}", s.label, s.verdict),
            })
            .collect();
        let extra = match r {
            AnalysisResult::ScalingSweep(s) => s.bisected_alpha.map(|a| format!(" bisected alpha {a:.5}")),
            AnalysisResult::CumulantRoundtrip(c) => Some(format!(" round-trip error {:.2e}", c.roundtrip_error)),
            AnalysisResult::SsbBound(s) => Some(format!(" bogoliubov holds: {}", s.bogoliubov_holds)),
            AnalysisResult::GapCheck(g) => Some(format!(" relative variation {:.2e}", g.relative_variation)),
            _ => None,
        };
        println!("[{i}] {}{}: {}", r.kind_name(), extra.unwrap_or_default(), sweeps.join("; "));
    }
}

fn execute(command: Command) -> Result<(), Error> {
    match command {
        Command::Run { config: path, out } => {
            let config = load_config(&path)?;
            let (report, timings) = fluctlab::run::run(&config)?;
            let dir = out
                .or_else(|| config.output.dir.as_ref().map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("fluctlab-out"));
            let stem = stem_of(&config, &path);
            for &format in &config.output.formats {
                for file in emit(&report, format, &dir, &stem)? {
                    log::info!("wrote {}", file.display());
                }
            }
            emit_timings(&timings, &dir, &stem)?;
            summary(&report);
            Ok(())
        }
        Command::Validate { config: path } => {
            let config = load_config(&path)?;
            println!("{}: valid, {} analyses", path.display(), config.analysis.len());
            Ok(())
        }
        Command::Schema { kind } => {
            let config = serde_json::to_value(schemars::schema_for!(RunConfig)).expect("schema");
            let report = serde_json::to_value(schemars::schema_for!(RunReport)).expect("schema");
            let value = match kind {
                SchemaKind::All => serde_json::json!({ "schema": SCHEMA_ID, "config": config, "report": report }),
                SchemaKind::Config => config,
                SchemaKind::Report => report,
            };
            println!("{}", serde_json::to_string_pretty(&value).expect("schema"));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
