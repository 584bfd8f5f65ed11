use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use twobath::bath::{build_chain, ChainMethod, SpectralDensity};
use twobath::checkpoint;
use twobath::config::GroundConfig;
use twobath::oracle::validate_all;
use twobath::point::run_point;
use twobath::sweep::{locate_critical, phase_diagram, run_sweep, PhaseDiagramPlan, SweepPlan};
use twobath::Error;

const EXIT_FLAGGED: u8 = 2;
const EXIT_CONFIG: u8 = 3;

#[derive(Parser)]
#[command(name = "twobath", version, about = "Two-bath spin-boson ground states via Wilson chains and DMRG")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print Wilson-chain coefficients as CSV.
    Chain {
        #[arg(long)]
        s: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 2.0)]
        lambda: f64,
        #[arg(long)]
        length: usize,
        #[arg(long, default_value_t = 1.0)]
        cutoff: f64,
        /// Use the discretize-and-tridiagonalize route.
        #[arg(long)]
        oracle: bool,
    },
    /// Solve one parameter point described by a flat TOML config.
    Ground {
        config: PathBuf,
        /// Write the converged state here.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Compare DMRG against exact diagonalization on the oracle grid.
    Validate,
    /// Run a one-parameter sweep and write CSV.
    Sweep {
        plan: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Run an α × β grid and write CSV.
    PhaseDiagram {
        plan: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Run a sweep and report the critical-point detectors.
    Critical {
        plan: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Also write the sweep CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), Error> {
    match output {
        Some(p) => fs::write(p, text).map_err(|source| Error::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool, Error> {
    match cli.command {
        Command::Chain {
            s,
            alpha,
            lambda,
            length,
            cutoff,
            oracle,
        } => {
            let sd = SpectralDensity::new(alpha, s, cutoff)?;
            let method = if oracle { ChainMethod::Lanczos } else { ChainMethod::ClosedForm };
            let chain = build_chain(&sd, lambda, length, method)?;
            let mut out = String::from("n,omega_n,t_n\n");
            for (n, w) in chain.site_energies.iter().enumerate() {
                out.push_str(&format!("{n},{w:.16e},"));
                if let Some(t) = chain.hoppings.get(n) {
                    out.push_str(&format!("{t:.16e}"));
                }
                out.push('\n');
            }
            emit(&out, None)?;
            Ok(false)
        }
        Command::Ground {
            config,
            checkpoint: ckpt,
            output,
        } => {
            let cfg = GroundConfig::from_toml(&read(&config)?)?;
            let run = run_point(&cfg.point, &cfg.solver, None)?;
            if let Some(dir) = ckpt {
                checkpoint::save(&dir, &run.state.mps, &cfg.point, cfg.solver.d_p, Some(run.result.energy))?;
            }
            emit(&run.result.to_toml(), output.as_deref())?;
            Ok(run.result.is_flagged())
        }
        Command::Validate => {
            let rows = validate_all()?;
            println!("{:<8} {:>2} {:>4} {:>6} {:>24} {:>24}  status", "point", "L", "d_p", "dim", "dmrg", "dense");
            let mut all = true;
            for r in &rows {
                let status = if r.passed() { "PASS".to_string() } else { format!("FAIL {:?}", r.violations) };
                all &= r.passed();
                println!(
                    "{:<8} {:>2} {:>4} {:>6} {:>24.16e} {:>24.16e}  {}",
                    r.name, r.chain_length, r.d_p, r.dim, r.dmrg_energy, r.dense_energy, status
                );
            }
            if all {
                Ok(false)
            } else {
                Err(Error::Numerical("oracle comparison failed".into()))
            }
        }
        Command::Sweep { plan, output } => {
            let plan = SweepPlan::from_toml(&read(&plan)?)?;
            let out = run_sweep(&plan)?;
            emit(&out.csv(), output.as_deref())?;
            Ok(out.any_flagged())
        }
        Command::PhaseDiagram { plan, output } => {
            let plan = PhaseDiagramPlan::from_toml(&read(&plan)?)?;
            let pd = phase_diagram(&plan)?;
            emit(&pd.csv(), output.as_deref())?;
            Ok(pd.any_flagged())
        }
        Command::Critical { plan, output, csv } => {
            let plan = SweepPlan::from_toml(&read(&plan)?)?;
            let out = run_sweep(&plan)?;
            if let Some(p) = csv {
                emit(&out.csv(), Some(&p))?;
            }
            let report = locate_critical(&out);
            emit(&report.to_toml(), output.as_deref())?;
            Ok(out.any_flagged() || report.hysteresis_flagged)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(EXIT_FLAGGED),
        Err(e @ (Error::Config(_) | Error::Domain(_) | Error::Format { .. })) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
