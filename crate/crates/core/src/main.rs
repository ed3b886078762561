use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use semantic_rd::figures::{run_figure, FigureId, FigureOptions};
use semantic_rd::prob::LogBase;
use semantic_rd::solver::SolverOptions;
use semantic_rd::sweep::run_sweep_file;
use semantic_rd::verify::{run_suite, Suite};

const USAGE_ERROR: u8 = 1;
const VERIFY_FAILED: u8 = 2;

#[derive(Parser)]
#[command(name = "semrd", version, about = "Semantic rate-distortion with side information")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Regenerate the data behind a figure as CSV.
    Figure {
        /// fig4, fig5, fig6a, fig6b, fig7, fig8, fig9 or all
        id: String,
        #[arg(long)]
        out: PathBuf,
        /// Points per axis (surfaces) or intervals (curves).
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, value_enum)]
        base: Option<Base>,
    },
    /// Evaluate a JSON-configured grid of rate-distortion points.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a verification suite.
    Verify {
        /// closed-vs-ba, channels, properties or all
        suite: String,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Base {
    Bits,
    Nats,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(USAGE_ERROR) } else { ExitCode::SUCCESS };
        }
    };
    match cli.command {
        Command::Figure { id, out, grid, base } => figure(&id, out, grid, base),
        Command::Sweep { config, out } => match run_sweep_file(&config, &out) {
            Ok(s) => {
                println!(
                    "{} rows ({} closed form, {} solver, {} infeasible, {} failed) -> {}",
                    s.rows,
                    s.closed_form,
                    s.ba,
                    s.infeasible,
                    s.failed,
                    out.display()
                );
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Verify { suite, json } => verify(&suite, json),
    }
}

fn fail(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(USAGE_ERROR)
}

fn figure(id: &str, out: PathBuf, grid: Option<usize>, base: Option<Base>) -> ExitCode {
    let ids = if id == "all" {
        FigureId::ALL.to_vec()
    } else {
        match id.parse::<FigureId>() {
            Ok(i) => vec![i],
            Err(e) => return fail(e),
        }
    };
    if grid == Some(0) {
        return fail("--grid must be positive");
    }
    let opts = FigureOptions {
        grid,
        base: base.map(|b| match b {
            Base::Bits => LogBase::BITS,
            Base::Nats => LogBase::NATS,
        }),
        ..FigureOptions::default()
    };
    for id in ids {
        match run_figure(id, &out, &opts) {
            Ok(fig) => {
                for t in &fig.tables {
                    println!("{id}: wrote {}.csv ({} rows)", t.name, t.rows.len());
                }
            }
            Err(e) => return fail(e),
        }
    }
    ExitCode::SUCCESS
}

fn verify(name: &str, json: bool) -> ExitCode {
    let suites = if name == "all" {
        Suite::ALL.to_vec()
    } else {
        match name.parse::<Suite>() {
            Ok(s) => vec![s],
            Err(e) => return fail(e),
        }
    };
    let opts = SolverOptions::default();
    let reports: Vec<_> = suites.into_iter().map(|s| run_suite(s, &opts)).collect();
    if json {
        let body = if reports.len() == 1 { serde_json::to_string_pretty(&reports[0]) } else { serde_json::to_string_pretty(&reports) };
        match body {
            Ok(b) => println!("{b}"),
            Err(e) => return fail(e),
        }
    } else {
        for r in &reports {
            println!("{r}");
        }
    }
    if reports.iter().all(|r| r.passed) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(VERIFY_FAILED)
    }
}
