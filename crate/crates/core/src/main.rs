use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use bazlab::cli::{
    cmd_bounds, cmd_critical, cmd_optimize, cmd_scan, cmd_verify, default_order, write_scan_csv,
    Provenance,
};
use bazlab::{Direction, Error, GridBudget, MembershipCheck};

#[derive(Debug, Parser)]
#[command(name = "bazlab", version, about = "Bounds on |gamma2| - |gamma1| for the class B1(alpha)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct CheckArgs {
    /// Comma-separated check radii in (0, 1), increasing.
    #[arg(long, value_delimiter = ',', default_values_t = MembershipCheck::default().radii)]
    radii: Vec<f64>,
    /// Boundary samples per circle.
    #[arg(long, default_value_t = 4096)]
    samples: usize,
    /// Truncation order (default: $BAZLAB_ORDER or 256).
    #[arg(long)]
    order: Option<usize>,
}

#[derive(Debug, clap::Args)]
struct GridArgs {
    /// Coarse grid sizes for x, rho, psi.
    #[arg(long, value_delimiter = ',', default_values_t = [101usize, 51, 128])]
    grid: Vec<usize>,
    /// Parameter tolerance of the local refinement.
    #[arg(long, default_value_t = 1e-9)]
    refine: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Theoretical bounds and sharpness analysis at one alpha, as JSON.
    Bounds {
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        /// Also run the jet-space search and validate realized candidates.
        #[arg(long)]
        empirical: bool,
        #[command(flatten)]
        check: CheckArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Bounds and psi minimum over an alpha grid, written as CSV.
    Scan {
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build and validate both extremal functions; exit 1 if any check fails.
    Verify {
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        /// Rotation angle of the cubic extremal.
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        #[command(flatten)]
        check: CheckArgs,
    },
    /// Optimize |gamma2| - |gamma1| over Schwarz 2-jets and realize the optimum.
    Optimize {
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long)]
        dir: Direction,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        check: CheckArgs,
    },
    /// Critical alpha values with polynomial residuals.
    Critical,
}

enum Failure {
    Verify,
    Lib(Error),
    Io(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn provenance(check: &CheckArgs, grid: Option<&GridArgs>) -> Result<Provenance, Failure> {
    let order = match check.order {
        Some(n) if n >= 3 => n,
        Some(n) => return Err(Error::Usage(format!("order must be >= 3, got {n}")).into()),
        None => default_order()?,
    };
    let membership = MembershipCheck {
        radii: check.radii.clone(),
        samples: check.samples,
        ..MembershipCheck::default()
    };
    let budget = match grid {
        Some(g) => {
            let [nx, nrho, npsi] = g.grid[..] else {
                return Err(Error::Usage("--grid takes three sizes, e.g. 101,51,128".into()).into());
            };
            GridBudget {
                nx,
                nrho,
                npsi,
                refine_tol: g.refine,
                ..GridBudget::default()
            }
        }
        None => GridBudget::default(),
    };
    Ok(Provenance::new(order, membership, budget))
}

fn print_json<T: Serialize>(value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Io(e.into()))?;
    println!("{text}");
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Bounds { alpha, empirical, check, grid } => {
            let prov = provenance(&check, Some(&grid))?;
            print_json(&cmd_bounds(alpha, empirical, &prov)?)
        }
        Command::Scan { from, to, steps, out } => {
            let rows = cmd_scan(from, to, steps)?;
            let file = File::create(&out)
                .map_err(|e| Failure::Io(anyhow::anyhow!("cannot create {}: {e}", out.display())))?;
            write_scan_csv(&rows, BufWriter::new(file)).map_err(Failure::Io)
        }
        Command::Verify { alpha, theta, check } => {
            let prov = provenance(&check, None)?;
            let report = cmd_verify(alpha, theta, &prov)?;
            print_json(&report)?;
            if report.passed {
                Ok(())
            } else {
                for c in report.checks.iter().filter(|c| !c.passed) {
                    eprintln!("FAILED {}: {}", c.name, c.detail);
                }
                Err(Failure::Verify)
            }
        }
        Command::Optimize { alpha, dir, grid, check } => {
            let prov = provenance(&check, Some(&grid))?;
            print_json(&cmd_optimize(alpha, dir, &prov)?)
        }
        Command::Critical => print_json(&cmd_critical()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify) => ExitCode::from(1),
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
