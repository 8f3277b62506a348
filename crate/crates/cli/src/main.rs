use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod gen;
mod report;
mod suites;

use report::Report;

#[derive(Parser, Debug)]
#[command(name = "epsilon-cells", version, about = "Exact cellular sheaf computations and randomized verification suites")]
struct Cli {
    /// Emit the machine-readable report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a bundle and run every validator that applies to it.
    Check { bundle: PathBuf },
    /// Cohomology dimensions of the global sections complex.
    Cohomology { bundle: PathBuf },
    /// Euler characteristic, from chain ranks and from cohomology.
    Euler { bundle: PathBuf },
    /// Torsion of the global sections complex against its recorded cohomology bases.
    Det { bundle: PathBuf },
    /// Morse data of every vertex for a PL function.
    Morse {
        bundle: PathBuf,
        /// Function file; overrides the bundle's function.
        #[arg(long)]
        function: Option<PathBuf>,
    },
    /// Lens-arc factorization of the determinant of global sections on a 1-manifold.
    Epsilon {
        bundle: PathBuf,
        /// Marked vertices; defaults to the bundle's marked set.
        #[arg(long, value_delimiter = ',')]
        points: Option<Vec<usize>>,
        /// Use the reversed orientation field.
        #[arg(long)]
        reverse: bool,
    },
    /// Characteristic cycle of a sheaf on a 1-manifold.
    Cc { bundle: PathBuf },
    /// Microlocal index of a PL function, compared with the Euler characteristic.
    Index {
        bundle: PathBuf,
        #[arg(long)]
        function: Option<PathBuf>,
    },
    /// Run a randomized verification suite.
    Verify {
        suite: Suite,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, env = "EPSILON_CELLS_SEED", default_value_t = 0)]
        seed: u64,
        /// Worker threads; results are always reported in trial order.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Write a random bundle.
    Generate {
        kind: Kind,
        #[arg(long, env = "EPSILON_CELLS_SEED", default_value_t = 0)]
        seed: u64,
        /// Circle size for generated circles.
        #[arg(long, default_value_t = 5)]
        vertices: usize,
        #[arg(long, default_value_t = 3)]
        max_rank: usize,
        /// Upper bound on the cell count of generated surfaces.
        #[arg(long, default_value_t = 40)]
        max_cells: usize,
        /// Summands of a generated surface sheaf.
        #[arg(long, default_value_t = 3)]
        terms: usize,
        /// Probability of marking each vertex.
        #[arg(long, default_value_t = 0.3)]
        density: f64,
        #[arg(long, default_value = "Q")]
        field: String,
        /// Make a circle sheaf transversal to a generated orientation off a generated marked set.
        #[arg(long)]
        transversal: bool,
        /// Bundle to extend (pl-function, orientation, marked-set); a constant sheaf on a circle otherwise.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Write here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Additivity,
    MorseIndex,
    Epsilon,
    Lens,
    Signs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    CircleSheaf,
    SurfaceSheaf,
    PlFunction,
    Orientation,
    MarkedSet,
}

fn run(cli: Cli, echo: Vec<String>) -> anyhow::Result<Report> {
    let mut report = match cli.command {
        Command::Check { bundle } => commands::check(&bundle)?,
        Command::Cohomology { bundle } => commands::cohomology(&bundle)?,
        Command::Euler { bundle } => commands::euler(&bundle)?,
        Command::Det { bundle } => commands::det(&bundle)?,
        Command::Morse { bundle, function } => commands::morse(&bundle, function.as_deref())?,
        Command::Epsilon { bundle, points, reverse } => commands::epsilon(&bundle, points, reverse)?,
        Command::Cc { bundle } => commands::cc(&bundle)?,
        Command::Index { bundle, function } => commands::index(&bundle, function.as_deref())?,
        Command::Verify { suite, trials, seed, jobs } => suites::run(suite, trials, seed, jobs)?,
        Command::Generate { kind, seed, vertices, max_rank, max_cells, terms, density, field, transversal, input, out } => {
            let params = gen::Params { seed, vertices, max_rank, max_cells, terms, density, field: field.parse()?, transversal };
            gen::generate(kind, &params, input.as_deref(), out.as_deref())?
        }
    };
    report.command = echo;
    Ok(report)
}

fn main() -> ExitCode {
    let echo: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    let json = cli.json;
    match run(cli, echo) {
        Ok(report) => {
            report.print(json);
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
