//! Command-line surface. Exit codes: 0 ok, 1 verification failure, 2 usage
//! or runtime error.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use blockbeta_core::{predict_rate, BetaParams, BlockStructure};
use clap::{Parser, Subcommand};
use log::info;

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::fit::{fit_record, LogPower};
use crate::plot::write_plot;
use crate::record::RunRecord;
use crate::simulate::simulate;
use crate::verify::{run_suite, Scale, Suite, VerifyOptions};

#[derive(Debug, Parser)]
#[command(name = "blockbeta", version, about = "Random polytopes in products of Euclidean balls")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample hulls over an n-grid and write runs.csv + record.json.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the configured root seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, env = "BLOCKBETA_OUT", default_value = "results")]
        out: PathBuf,
        /// Run even when the estimated cost exceeds the budget.
        #[arg(long)]
        budget_override: bool,
    },
    /// Fit the growth rate of mean vertex counts in a run record.
    Fit {
        /// Record directory or its record.json.
        record: PathBuf,
        #[arg(long, default_value = "auto")]
        log_power: String,
        /// Also write fit.json here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite; exits 1 on any failure.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value = "quick")]
        scale: Scale,
    },
    /// Print the predicted facet growth rate.
    Predict {
        /// Block dimensions, comma separated (e.g. 2,1).
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        /// Exponents, comma separated; integers, decimals or fractions. Defaults to zeros.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        betas: Vec<String>,
    },
    /// Emit a gnuplot script and data files for one or more records.
    Plot {
        #[arg(required = true)]
        records: Vec<PathBuf>,
        #[arg(long, env = "BLOCKBETA_OUT", default_value = "results")]
        out: PathBuf,
    },
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes()).map_err(CliError::io("<stdout>"))
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<ExitCode> {
    match &cli.command {
        Command::Simulate { config, seed, workers, out: dir, budget_override } => {
            let mut cfg = ExperimentConfig::load(config)?;
            if let Some(s) = seed {
                cfg.root_seed = *s;
            }
            cfg.check_budget(*budget_override)?;
            let mut record = simulate(&cfg, *workers)?;
            record.save(dir)?;
            info!("wrote {} rows in {:.2}s", record.rows.len(), record.wall_clock_seconds);
            write_out(
                out,
                &format!("wrote {} and {}\n", dir.join("runs.csv").display(), dir.join("record.json").display()),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Fit { record, log_power, out: dir } => {
            let rec = RunRecord::load(record)?;
            let summary = fit_record(&rec, log_power.parse::<LogPower>()?)?;
            write_out(out, &summary.to_string())?;
            if let Some(dir) = dir {
                save_fit(dir, &summary)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { suite, seed, scale } => {
            let mut opts = VerifyOptions { scale: *scale, ..VerifyOptions::default() };
            if let Some(s) = seed {
                opts.seed = *s;
            }
            let outcome = run_suite(*suite, &opts)?;
            write_out(out, &outcome.report.to_string())?;
            let verdict = if outcome.passed { "PASS" } else { "FAIL" };
            write_out(out, &format!("verify {suite}: {verdict}\n"))?;
            Ok(if outcome.passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Predict { dims, betas } => {
            let bs = BlockStructure::new(dims.clone())?;
            let bp = if betas.is_empty() { BetaParams::uniform(dims.len()) } else { BetaParams::parse(betas)? };
            let p = predict_rate(&bs, &bp)?;
            let ks: Vec<String> = p.k.iter().map(|k| format!("{k:.6}")).collect();
            write_out(
                out,
                &format!(
                    "container {bs}\nk = ({})\nk_max = {:.6} (multiplicity {})\nrate {p}\nexponent {:.6}\n",
                    ks.join(", "),
                    p.k_max,
                    p.count_k_max,
                    p.exponent
                ),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Plot { records, out: dir } => {
            let recs = records.iter().map(|p| RunRecord::load(p)).collect::<Result<Vec<_>>>()?;
            let script = write_plot(&recs, dir)?;
            write_out(out, &format!("wrote {}\n", script.display()))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn save_fit(dir: &Path, summary: &crate::fit::FitSummary) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    let path = dir.join("fit.json");
    let fit = &summary.fits.fixed;
    let free = &summary.fits.free;
    let value = serde_json::json!({
        "container": summary.label,
        "predicted_exponent": summary.predicted.as_ref().map(|p| p.exponent),
        "log_power": summary.log_power,
        "exponent_hat": fit.exponent_hat,
        "exponent_se": fit.exponent_se,
        "log_coeff": fit.log_coeff,
        "r_squared": fit.r_squared,
        "free_exponent_hat": free.exponent_hat,
        "free_log_power": free.log_power,
    });
    let text = serde_json::to_string_pretty(&value).map_err(CliError::json(&path))?;
    std::fs::write(&path, text + "\n").map_err(CliError::io(&path))
}
