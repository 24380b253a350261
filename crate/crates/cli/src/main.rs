use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use rieszcone_cli::{run, Config, Outcome, Overrides};

/// Evaluate weight conditions, duality bounds, theorem sweeps and oracle
/// checks for the scenarios in a TOML file.
///
/// Exit status: 0 when every scenario ran and agreed with its theorem or
/// oracle, 2 when some verdict was inconsistent, 1 on any failure.
#[derive(Parser, Debug)]
#[command(name = "rieszcone", version)]
struct Args {
    /// Scenario file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Supremum-scan points per decade.
    #[arg(long)]
    grid_density: Option<f64>,
    /// Lower end of the scan and quadrature range.
    #[arg(long)]
    tmin: Option<f64>,
    /// Upper end of the scan and quadrature range.
    #[arg(long)]
    tmax: Option<f64>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let flags = Overrides { seed: args.seed, grid_density: args.grid_density, t_min: args.tmin, t_max: args.tmax };
    let result = Config::load(&args.config).and_then(|c| run(&c, &args.out, &flags, args.jobs));
    match result {
        Ok(bundles) => {
            for b in &bundles {
                for w in &b.warnings {
                    eprintln!("warning: {}: {w}", b.scenario.name);
                }
                if let rieszcone_cli::bundle::Status::Failed { message } = &b.status {
                    eprintln!("error: {}: {message}", b.scenario.name);
                }
            }
            ExitCode::from(Outcome::of(&bundles) as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
