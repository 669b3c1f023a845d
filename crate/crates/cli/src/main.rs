use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mabuchi_cli::commands::{self, Globals};

/// Experiments on Mabuchi rays of toric Kähler metrics.
#[derive(Parser)]
#[command(name = "mabuchi", version)]
struct Cli {
    /// Relative quadrature tolerance, overriding scenario files and defaults.
    #[arg(long, global = true)]
    tol_override: Option<f64>,
    /// Drop every `s` above this value from the grids.
    #[arg(long, global = true)]
    max_s: Option<f64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for random sample points.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample ψ'', ψ' and ψ of a one-dimensional generator.
    Profile {
        #[arg(long)]
        polytope: PathBuf,
        #[arg(long)]
        generator: PathBuf,
        #[arg(long, default_value_t = 401)]
        samples: usize,
        /// CSV file; standard output when omitted.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Normalized section densities and their battery pairings along the s grid.
    RayDensity { scenario: PathBuf },
    /// Coefficients and norms of the transformed monomial basis.
    Gcst { scenario: PathBuf },
    /// Sub-polytopes, faces and Q of a piecewise-linear generator.
    Decompose {
        #[arg(long)]
        polytope: PathBuf,
        #[arg(long)]
        generator: PathBuf,
        /// Ceiling K of Q (default: the maximum of f on P, rounded up).
        #[arg(long)]
        ceiling: Option<String>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Sample a smoothing family and check conditions a) to e).
    Smooth {
        #[arg(long)]
        polytope: PathBuf,
        #[arg(long)]
        generator: PathBuf,
        /// Grid points per axis.
        #[arg(long, default_value_t = 31)]
        samples: usize,
        /// Additional uniformly drawn points.
        #[arg(long, default_value_t = 0)]
        random: usize,
        #[arg(long, short, default_value = "out")]
        out: PathBuf,
    },
    /// Metric length of a segment and θ-circumferences along the s grid.
    Metric {
        scenario: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        from: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        to: Vec<f64>,
    },
    /// Run acceptance criteria (all by default) and load shipped scenarios.
    Verify {
        ids: Vec<usize>,
        /// Directory of scenario files to load.
        #[arg(long)]
        scenarios: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let g = Globals { tol_override: cli.tol_override, max_s: cli.max_s, seed: cli.seed };
    let result = match &cli.command {
        Command::Profile { polytope, generator, samples, out } => commands::profile(polytope, generator, *samples, out.as_deref()),
        Command::RayDensity { scenario } => commands::ray_density(scenario, &g),
        Command::Gcst { scenario } => commands::gcst(scenario, &g),
        Command::Decompose { polytope, generator, ceiling, out } => {
            commands::decompose_cmd(polytope, generator, ceiling.as_deref(), out.as_deref())
        }
        Command::Smooth { polytope, generator, samples, random, out } => {
            commands::smooth(polytope, generator, *samples, *random, out, &g)
        }
        Command::Metric { scenario, from, to } => commands::metric(scenario, from, to, &g),
        Command::Verify { ids, scenarios } => commands::verify(ids, scenarios.as_deref(), &g),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
