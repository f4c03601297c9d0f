//! Command-line interface: validate problem files and run calculus,
//! reduction, and mutation commands, emitting deterministic JSON reports.

use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qpmut::io::{parse_problem, Problem};
use qpmut::reports::{run_request, Request};
use qpmut::QpError;

#[derive(Parser)]
#[command(name = "qpmut", version, about = "Algebras with potentials over species")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Input problem file (defaults to stdin).
    #[arg(long = "in", global = true)]
    input: Option<String>,
    /// Output report file (defaults to stdout).
    #[arg(long = "out", global = true)]
    out: Option<String>,
    /// Override the truncation degree of the problem file.
    #[arg(long, global = true)]
    degree: Option<usize>,
    /// Include intermediate automorphisms in reports.
    #[arg(long, global = true)]
    trace: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check the problem file and report the bimodule structure.
    Validate,
    /// The rotation-sum derivative of the potential.
    Delta,
    /// The ideal generator attached to one arrow's dual.
    Xgen {
        /// Generator name a.
        #[arg(long)]
        arrow: String,
    },
    /// The value of the dual-basis functional on a scaled arrow.
    Xmap {
        /// Generator name a.
        #[arg(long)]
        arrow: String,
        /// Basis label of the division algebra at the arrow's source
        /// vertex (defaults to the unit label).
        #[arg(long)]
        label: Option<String>,
    },
    /// Per-degree dimensions of the quotient by the chosen ideal.
    IdealDim {
        /// Which ideal: R or J.
        #[arg(long, default_value = "R")]
        ideal: String,
    },
    /// Dimension of the deformation space at the truncation degree.
    DefDim,
    /// Split the potential into trivial and reduced parts.
    Reduce,
    /// Mutate at a vertex (reduced by default).
    Mutate {
        /// Vertex k (1-based).
        #[arg(long)]
        k: usize,
        /// Stop after premutation (no splitting).
        #[arg(long)]
        premutate_only: bool,
    },
    /// Mutate twice at a vertex and compare the invariants.
    InvolutionCheck {
        /// Vertex k (1-based).
        #[arg(long)]
        k: usize,
    },
    /// The exchange matrix, optionally mutated.
    Matrix {
        /// Apply the matrix mutation rule at this vertex (1-based).
        #[arg(long)]
        mutate: Option<usize>,
    },
    /// The explicit potential that admits mutation at k.
    SeedPotential {
        /// Vertex k (1-based).
        #[arg(long)]
        k: usize,
    },
    /// Randomized search for a potential admitting a mutation sequence.
    Search {
        /// Comma-separated vertex sequence (1-based), e.g. 2,1,3.
        #[arg(long)]
        seq: String,
        /// Number of rejection-sampling trials.
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Base random seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Coefficient pool: an inclusive range "lo..hi" or a comma list.
        #[arg(long, default_value = "-2..2", allow_hyphen_values = true)]
        pool: String,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // --help/--version exit cleanly; flag problems are invalid input.
            return ExitCode::from(if e.exit_code() == 0 { 0 } else { 1 });
        }
    };
    match load(&cli).and_then(|problem| run_request(&problem, &to_request(&cli)?)) {
        Ok(report) => {
            if let Err(e) = write_output(&cli.common.out, &report) {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn read_input(path: &Option<String>) -> Result<String, QpError> {
    match path {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| QpError::Validation(format!("cannot read {p:?}: {e}"))),
        None => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| QpError::Validation(format!("cannot read stdin: {e}")))?;
            Ok(buf)
        }
    }
}

fn write_output(path: &Option<String>, report: &str) -> Result<(), String> {
    match path {
        Some(p) => std::fs::write(p, report).map_err(|e| format!("cannot write {p:?}: {e}")),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            // Ignore a closed pipe (e.g. piping into `head`).
            let _ = writeln!(out, "{report}");
            Ok(())
        }
    }
}

fn load(cli: &Cli) -> Result<Problem, QpError> {
    let text = read_input(&cli.common.input)?;
    let mut problem = parse_problem(&text)?;
    if let Some(n) = cli.common.degree {
        if n < 2 {
            return Err(QpError::Validation("degree must be at least 2".into()));
        }
        problem.degree = n;
        let truncated = problem.potential.truncate(n);
        // Re-anchor the potential at the new truncation degree.
        problem.potential = qpmut::series::Series::zero(n).add(&truncated);
    }
    Ok(problem)
}

fn parse_seq(spec: &str) -> Result<Vec<usize>, QpError> {
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| QpError::Validation(format!("bad sequence entry {s:?}")))
        })
        .collect()
}

fn to_request(cli: &Cli) -> Result<Request, QpError> {
    Ok(match &cli.command {
        Command::Validate => Request::Validate,
        Command::Delta => Request::Delta,
        Command::Xgen { arrow } => Request::Xgen {
            arrow: arrow.clone(),
        },
        Command::Xmap { arrow, label } => Request::Xmap {
            arrow: arrow.clone(),
            label: label.clone(),
        },
        Command::IdealDim { ideal } => Request::IdealDim {
            ideal: ideal.clone(),
        },
        Command::DefDim => Request::DefDim,
        Command::Reduce => Request::Reduce {
            trace: cli.common.trace,
        },
        Command::Mutate { k, premutate_only } => Request::Mutate {
            k: *k,
            premutate_only: *premutate_only,
            trace: cli.common.trace,
        },
        Command::InvolutionCheck { k } => Request::InvolutionCheck { k: *k },
        Command::Matrix { mutate } => Request::Matrix { mutate: *mutate },
        Command::SeedPotential { k } => Request::SeedPotential { k: *k },
        Command::Search {
            seq,
            trials,
            seed,
            pool,
        } => Request::Search {
            seq: parse_seq(seq)?,
            trials: *trials,
            seed: *seed,
            pool: pool.clone(),
        },
    })
}
