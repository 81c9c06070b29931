use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

use spincat_experiments::figures::{figure, Figure, FigureOptions};
use spincat_experiments::pulse::optimize_pulse_time;
use spincat_experiments::run::{run, run_with_snapshot};
use spincat_experiments::sweep::{sweep, workers_from_env, SweepParam};
use spincat_experiments::{RunConfig, RunRecord};

#[derive(Parser)]
#[command(name = "spincat", version, about = "Spin-cat generation in two-component condensates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute one run and write `run.csv` and `run.json`.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; defaults to the config's `output`, then `out`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the final multimode state to this file.
        #[arg(long)]
        snapshot: Option<PathBuf>,
    },
    /// Vary one parameter of a base configuration.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// mu, lambda, kappa or n.
        #[arg(long)]
        vary: String,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        values: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the data behind one figure (fig2..fig6, fig7-mini).
    Figure {
        name: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 100)]
        n_atoms: usize,
        /// Include the slow mu = 0.6 runs.
        #[arg(long)]
        long: bool,
    },
    /// Golden-section search for the pi-pulse time.
    OptimizePulse {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn out_dir(flag: Option<PathBuf>, cfg: &RunConfig) -> PathBuf {
    flag.or_else(|| cfg.output.clone()).unwrap_or_else(|| PathBuf::from("out"))
}

fn report(record: &RunRecord) {
    match (&record.error, record.peak) {
        (Some(e), _) => println!("run failed: {e}"),
        (None, Some(p)) => println!(
            "peak QFI {:.6} at tau = {:.6}{} ({} samples, {:.1} s)",
            p.value,
            p.tau,
            if p.at_boundary { " (series boundary)" } else { "" },
            record.series.len(),
            record.diagnostics.wall_clock_s
        ),
        (None, None) => println!("no peak"),
    }
    for w in &record.warnings {
        println!("warning: {w}");
    }
    for f in &record.integrity_failures {
        eprintln!("integrity: {f}");
    }
}

fn persist(record: &RunRecord, dir: &Path, stem: &str) -> anyhow::Result<()> {
    let (csv, json) = record.persist(dir, stem)?;
    println!("wrote {} and {}", csv.display(), json.display());
    Ok(())
}

fn execute(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Run { config, out, snapshot } => {
            let cfg = RunConfig::load(&config).with_context(|| format!("loading {}", config.display()))?;
            let record = match snapshot {
                Some(path) => {
                    let r = run_with_snapshot(&cfg, &path)?;
                    println!("wrote snapshot {}", path.display());
                    r
                }
                None => run(&cfg),
            };
            report(&record);
            persist(&record, &out_dir(out, &cfg), "run")?;
            Ok(record.is_ok())
        }
        Command::Sweep {
            config,
            vary,
            values,
            out,
        } => {
            let cfg = RunConfig::load(&config).with_context(|| format!("loading {}", config.display()))?;
            let param: SweepParam = vary.parse()?;
            let workers = workers_from_env();
            let outcome = sweep(&cfg, param, &values, workers)?;
            let dir = out_dir(out, &cfg);
            std::fs::create_dir_all(&dir)?;
            for (record, row) in outcome.records.iter().zip(&outcome.rows) {
                persist(record, &dir, &format!("run_{vary}_{}", row.value))?;
            }
            let summary = dir.join("summary.csv");
            outcome.write_summary(&summary)?;
            for row in &outcome.rows {
                println!(
                    "{vary} = {}: F_peak/N^2 = {}, tau_peak = {}{}",
                    row.value,
                    row.f_peak_over_n2.map_or("-".into(), |f| format!("{f:.4}")),
                    row.tau_peak.map_or("-".into(), |t| format!("{t:.4}")),
                    if row.ok { "" } else { " (failed)" }
                );
            }
            println!("wrote {} ({workers} workers)", summary.display());
            Ok(outcome.all_ok())
        }
        Command::Figure {
            name,
            out,
            n_atoms,
            long,
        } => {
            let which: Figure = name.parse()?;
            if n_atoms < 2 {
                bail!("n_atoms must be >= 2");
            }
            let output = figure(which, &out, FigureOptions { n_atoms, long })?;
            for r in &output.records {
                report(r);
            }
            for f in &output.files {
                println!("wrote {}", f.display());
            }
            Ok(output.all_ok())
        }
        Command::OptimizePulse { config, out } => {
            let cfg = RunConfig::load(&config).with_context(|| format!("loading {}", config.display()))?;
            let (tau_p, record) = optimize_pulse_time(&cfg)?;
            println!("best pulse time {tau_p:.6}");
            if let Some(s) = &record.pulse_search {
                println!("{} runs, converged: {}", s.evaluations.len(), s.converged);
            }
            report(&record);
            persist(&record, &out_dir(out, &cfg), "optimize_pulse")?;
            Ok(record.is_ok())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
