use annuli::experiments::{run_convergence, run_solve, run_structure, write_csv, ExperimentConfig};
use annuli::Error;
use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "annuli", version, about = "Spectral Helmholtz solvers on annuli and disks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for the per-mode solves.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory; overrides the config's `out`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve at the largest degree of each sweep and write coefficients and grid values.
    Solve,
    /// Error against the exact or reference solution for every degree in the sweep.
    Convergence,
    /// Per-mode matrix sizes, bandwidths and condition numbers.
    Structure,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::UnknownRhs(_) | Error::Config(_) => 2,
        _ => 1,
    }
}

fn run(cli: &Cli) -> Result<(), Error> {
    let path = cli.config.as_ref().ok_or_else(|| Error::Config("--config <path> is required".into()))?;
    let cfg = ExperimentConfig::from_path(path)?;
    if let Some(k) = cli.threads {
        #[cfg(feature = "parallel")]
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        #[cfg(not(feature = "parallel"))]
        let _ = k;
    }
    let out = cli.out.clone().or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("results"));
    std::fs::create_dir_all(&out)?;
    match cli.command {
        Command::Solve => {
            for r in run_solve(&cfg, &out)? {
                let err = r.sup_error.map(|e| format!("{e:.3e}")).unwrap_or_else(|| "n/a".into());
                println!("{} N={} dofs={} sup_error={err}", r.solver.name(), r.n, r.dofs);
                for f in &r.files {
                    println!("  wrote {}", f.display());
                }
            }
        }
        Command::Convergence => {
            let report = run_convergence(&cfg)?;
            for (solver, n, tail) in &report.reference_tails {
                println!("reference {} N={n} relative coefficient tail {tail:.2e}", solver.name());
                if *tail > 1e-15 {
                    eprintln!("warning: reference tail {tail:.2e} exceeds 1e-15; errors below it are not meaningful");
                }
            }
            for r in &report.rows {
                println!("{} N={} dofs={} sup_error={:.3e}", r.solver, r.n, r.dofs, r.sup_error);
            }
            write_table(&out.join(format!("{}_convergence.csv", cfg.experiment)), &report.rows)?;
        }
        Command::Structure => {
            let rows = run_structure(&cfg)?;
            write_table(&out.join(format!("{}_structure.csv", cfg.experiment)), &rows)?;
        }
    }
    Ok(())
}

fn write_table<T: serde::Serialize>(path: &Path, rows: &[T]) -> Result<(), Error> {
    write_csv(path, rows)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
