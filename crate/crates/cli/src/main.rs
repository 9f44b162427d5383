use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;

use efimov_cli::config::{Experiment, ModelConfig, RunConfig};

/// Spectral analysis of the model H = H0 - (gamma*T1 + T2): essential-edge
/// computation, bound-state counting and accumulation studies.
#[derive(Parser, Debug)]
#[command(name = "efimov", version, about)]
struct Cli {
    /// Experiment: spectrum | essential | condition5 | condition6 | thm41 |
    /// accumulate | example5. Overrides the config file.
    #[arg(long)]
    experiment: Option<String>,

    /// JSON configuration file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory for report.json, table.csv, plot.svg.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Coupling gamma of the example model (requires the example5 model).
    #[arg(long)]
    gamma: Option<f64>,

    /// Potential truncation of the example model.
    #[arg(long = "M")]
    m: Option<usize>,

    /// Kernel-series truncation of the example model.
    #[arg(long = "N")]
    n: Option<usize>,

    /// Quadrature order per segment of the example model.
    #[arg(long)]
    g: Option<usize>,

    /// Seed for the iterative eigensolver start block.
    #[arg(long)]
    seed: Option<u64>,

    /// Dense-assembly size cap.
    #[arg(long = "dense-cap")]
    dense_cap: Option<usize>,
}

fn build_config(cli: &Cli) -> anyhow::Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read config {}", path.display()))?;
            RunConfig::from_json(&text)?
        }
        None => {
            let experiment = cli
                .experiment
                .as_deref()
                .context("either --config or --experiment is required")?;
            RunConfig {
                experiment: Experiment::parse(experiment)?,
                model: ModelConfig::default(),
                out: PathBuf::from("out"),
                seed: 42,
                dense_cap: efimov_core::operators::DEFAULT_DENSE_CAP,
                schedule: None,
                family: None,
                family_basis: None,
            }
        }
    };

    if let Some(e) = &cli.experiment {
        cfg.experiment = Experiment::parse(e)?;
    }
    if let Some(o) = &cli.out {
        cfg.out = o.clone();
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(c) = cli.dense_cap {
        cfg.dense_cap = c;
    }
    let model_flags = cli.gamma.is_some() || cli.m.is_some() || cli.n.is_some() || cli.g.is_some();
    if model_flags {
        match &mut cfg.model {
            ModelConfig::Example5(e5) => {
                if let Some(v) = cli.gamma {
                    e5.gamma = v;
                }
                if let Some(v) = cli.m {
                    e5.m = v;
                }
                if let Some(v) = cli.n {
                    e5.n = v;
                }
                if let Some(v) = cli.g {
                    e5.g = v;
                }
            }
            ModelConfig::Inline(_) => {
                anyhow::bail!("--gamma/--M/--N/--g apply only to the example5 model");
            }
        }
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    // EFIMOV_THREADS caps the worker pool for the parallel fiber sweeps;
    // it affects speed only, never results.
    if let Ok(v) = std::env::var("EFIMOV_THREADS") {
        if let Ok(k) = v.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(k.max(1))
                .build_global();
        }
    }

    let cli = Cli::parse();
    let cfg = match build_config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };

    match efimov_cli::run(&cfg) {
        Ok(outcome) => {
            println!(
                "{}: verdict {} -> {}",
                cfg.experiment.name(),
                outcome.report.verdict,
                outcome.report_path.display()
            );
            if let Some(p) = &outcome.csv_path {
                println!("table: {}", p.display());
            }
            if let Some(p) = &outcome.svg_path {
                println!("plot: {}", p.display());
            }
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
