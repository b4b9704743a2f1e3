use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use linkfix::input::Problem;
use linkfix::pipeline::{analyze, AnalyzeOptions, ExitStatus};
use linkfix::render::render_svg;
use linkfix::verify::{verify, VerifyOptions, DEFAULT_SEED, DEFAULT_TRIALS};

#[derive(Parser)]
#[command(
    name = "linkfix",
    version,
    about = "Fixed points linked with periodic orbits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and report the linking number.
    Analyze {
        file: PathBuf,
        /// Fixed-point tolerance (overrides the input file).
        #[arg(long)]
        tol: Option<f64>,
        /// Run maps with Lip(f - Id) > 1; certified assertions are skipped.
        #[arg(long)]
        allow_uncertified: bool,
        /// Print only the JSON report.
        #[arg(long)]
        json: bool,
    },
    /// Run the randomized property suites.
    Verify {
        file: PathBuf,
        /// RNG seed; LINKFIX_SEED takes precedence.
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
        #[arg(long)]
        allow_uncertified: bool,
        #[arg(long)]
        json: bool,
    },
    /// Write an SVG diagram of the faces, windings and fixed point.
    Render {
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
}

fn exit(status: ExitStatus) -> ExitCode {
    ExitCode::from(status.code() as u8)
}

fn load(file: &Path) -> Result<Problem, ExitCode> {
    Problem::load(file).map_err(|e| {
        eprintln!("error: {e}");
        exit(ExitStatus::InputError)
    })
}

fn run(cli: Cli) -> Result<ExitCode, ExitCode> {
    match cli.command {
        Command::Analyze {
            file,
            tol,
            allow_uncertified,
            json,
        } => {
            let problem = load(&file)?;
            let start = Instant::now();
            let analysis = analyze(
                &problem,
                &AnalyzeOptions {
                    tol,
                    allow_uncertified,
                },
            )
            .map_err(|e| {
                eprintln!("error: {e}");
                exit(e.status())
            })?;
            let elapsed = start.elapsed().as_secs_f64() * 1e3;
            let report = analysis.report(&problem, Some(elapsed));
            if json {
                println!("{}", report.to_json());
            } else {
                println!("{report}\n\n{}", report.to_json());
            }
            Ok(exit(analysis.status))
        }
        Command::Verify {
            file,
            seed,
            trials,
            allow_uncertified,
            json,
        } => {
            let problem = load(&file)?;
            let seed = match std::env::var("LINKFIX_SEED") {
                Ok(v) => v.trim().parse().map_err(|_| {
                    eprintln!("error: LINKFIX_SEED must be an unsigned integer, got {v:?}");
                    exit(ExitStatus::InputError)
                })?,
                Err(_) => seed,
            };
            let report = verify(
                &problem,
                &VerifyOptions {
                    seed,
                    trials,
                    allow_uncertified,
                },
            )
            .map_err(|e| {
                eprintln!("error: {e}");
                exit(e.status())
            })?;
            if json {
                println!("{}", report.to_json());
            } else {
                println!("{report}\n\n{}", report.to_json());
            }
            Ok(exit(report.status))
        }
        Command::Render { file, output } => {
            let problem = load(&file)?;
            let analysis = analyze(
                &problem,
                &AnalyzeOptions {
                    tol: None,
                    allow_uncertified: true,
                },
            )
            .map_err(|e| {
                eprintln!("error: {e}");
                exit(e.status())
            })?;
            let svg = render_svg(&problem, &analysis).map_err(|e| {
                eprintln!("error: {e}");
                exit(ExitStatus::Degenerate)
            })?;
            std::fs::write(&output, svg).map_err(|e| {
                eprintln!("error: cannot write {}: {e}", output.display());
                exit(ExitStatus::InputError)
            })?;
            if analysis.status != ExitStatus::Pass {
                if let Some(f) = &analysis.failure {
                    eprintln!("warning: {}: {}", f.stage, f.message);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    run(cli).unwrap_or_else(|code| code)
}
