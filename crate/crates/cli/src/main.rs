use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use multicache::config::{ExperimentConfig, Overrides};
use multicache::output::{gnuplot_script, write_text, Curve, Table};
use multicache::validate::{self, Level};
use multicache::{commands, HarnessError, EXIT_OK, EXIT_VALIDATION};
use multicache_core::Scheme;

#[derive(Parser)]
#[command(name = "multicache", version, about = "Coverage, caching and STP experiments for clustered small-cell networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// TOML experiment file; missing keys take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo trials per configuration.
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// `mf`, `zf` or a comma-separated list.
    #[arg(long, global = true, value_delimiter = ',')]
    scheme: Option<Vec<Scheme>>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Comma-separated SIR targets in dB, e.g. `-10,0,10`.
    #[arg(long = "gamma-db", global = true, value_delimiter = ',', allow_negative_numbers = true)]
    gamma_db: Option<Vec<f64>>,
    /// Monte Carlo worker threads; 0 uses every core.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Also write a gnuplot script next to each CSV.
    #[arg(long, global = true)]
    plot: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Coverage per serving rank: Monte Carlo, exact integral and bounds.
    Coverage,
    /// Optimal and most-popular cache policies with their STP.
    Optimize,
    /// STP under optimized caching across antenna counts and Zipf exponents.
    Compare,
    /// Simulated STP of the optimal and most-popular policies.
    Simulate,
    /// Run every invariant suite; exits 1 on any failure.
    Validate {
        #[arg(long, default_value = "quick")]
        level: Level,
    },
}

fn resolve(common: &Common) -> Result<ExperimentConfig, HarnessError> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    cfg.apply(&Overrides {
        seed: common.seed,
        trials: common.trials,
        schemes: common.scheme.clone(),
        gamma_db: common.gamma_db.clone(),
        out: common.out.clone(),
        workers: common.workers,
    });
    cfg.validate()?;
    Ok(cfg)
}

fn emit(cfg: &ExperimentConfig, table: &Table, name: &str) -> Result<(), HarnessError> {
    let path = table.write(&cfg.out, name)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn plot(cfg: &ExperimentConfig, csv: &str, title: &str, x: (usize, &str), y_label: &str, curves: &[Curve]) -> Result<(), HarnessError> {
    let name = format!("{}.gp", csv.trim_end_matches(".csv"));
    let path = write_text(&cfg.out, &name, &gnuplot_script(csv, title, x, y_label, curves))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn curve(label: String, y: usize, filter: Vec<(usize, String)>) -> Curve {
    Curve { label, y, filter }
}

fn run(cli: &Cli) -> Result<i32, HarnessError> {
    let cfg = resolve(&cli.common)?;
    let echo = cfg.echo()?;
    println!("resolved config: {}", echo.display());
    match &cli.command {
        Command::Coverage => {
            let t = commands::coverage(&cfg)?;
            emit(&cfg, &t, "coverage.csv")?;
            if cli.common.plot {
                let mut curves = Vec::new();
                for s in &cfg.schemes {
                    for k in 1..=cfg.network.cluster_size {
                        let f = vec![(0, s.to_string()), (1, k.to_string())];
                        for (col, name) in [(3, "mc"), (5, "exact"), (6, "lower"), (7, "upper")] {
                            curves.push(curve(format!("{s} k={k} {name}"), col, f.clone()));
                        }
                    }
                }
                plot(&cfg, "coverage.csv", "Coverage probability", (2, "SIR target (dB)"), "coverage", &curves)?;
            }
        }
        Command::Optimize => {
            let out = commands::optimize(&cfg)?;
            emit(&cfg, &out.policies, "policy.csv")?;
            emit(&cfg, &out.stp, "stp.csv")?;
            if cli.common.plot {
                let mut curves = Vec::new();
                for g in &cfg.gamma_db {
                    let f = vec![(0, multicache::output::db(*g))];
                    curves.push(curve(format!("mpc {g} dB"), 3, f.clone()));
                    for (i, s) in cfg.schemes.iter().enumerate() {
                        curves.push(curve(format!("opc {s} {g} dB"), 4 + i, f.clone()));
                    }
                }
                plot(&cfg, "policy.csv", "Cache probability", (1, "file index"), "b_n", &curves)?;
            }
        }
        Command::Compare => {
            let out = commands::compare(&cfg)?;
            emit(&cfg, &out.antennas, "compare_antennas.csv")?;
            emit(&cfg, &out.deltas, "compare_delta.csv")?;
            if cli.common.plot {
                let mut curves = Vec::new();
                for s in &cfg.schemes {
                    for l in &cfg.compare.antennas {
                        curves.push(curve(format!("{s} L={l}"), 3, vec![(0, s.to_string()), (1, l.to_string())]));
                    }
                }
                plot(&cfg, "compare_antennas.csv", "STP vs SIR target", (2, "SIR target (dB)"), "STP", &curves)?;
                let mut curves = Vec::new();
                for s in &cfg.schemes {
                    for d in &cfg.compare.deltas {
                        curves.push(curve(format!("{s} δ={d}"), 3, vec![(0, s.to_string()), (1, format!("{d:.3}"))]));
                    }
                }
                plot(&cfg, "compare_delta.csv", "STP vs SIR target", (2, "SIR target (dB)"), "STP", &curves)?;
            }
        }
        Command::Simulate => {
            let t = commands::simulate(&cfg)?;
            emit(&cfg, &t, "simulate.csv")?;
            if cli.common.plot {
                let mut curves = Vec::new();
                for s in &cfg.schemes {
                    for p in ["opc", "mpc"] {
                        let f = vec![(0, s.to_string()), (2, p.to_owned())];
                        curves.push(curve(format!("{s} {p} mc"), 3, f.clone()));
                        curves.push(curve(format!("{s} {p} exact"), 6, f));
                    }
                }
                plot(&cfg, "simulate.csv", "Simulated STP", (1, "SIR target (dB)"), "STP", &curves)?;
            }
        }
        Command::Validate { level } => {
            let checks = validate::run(*level, cfg.seed, cfg.worker_count())?;
            for c in &checks {
                println!("{}", c.line());
            }
            emit(&cfg, &validate::report(&checks), "validate.csv")?;
            let failed = checks.iter().filter(|c| !c.passed).count();
            println!("{} of {} invariants passed", checks.len() - failed, checks.len());
            if failed > 0 {
                return Ok(EXIT_VALIDATION);
            }
        }
    }
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
