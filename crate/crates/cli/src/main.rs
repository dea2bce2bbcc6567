//! `lengthen`: compute, verify and draw the polygon of lengthening
//! deformations of a one-holed torus.

mod commands;
mod config;
mod error;
mod svg;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{LimitMode, LimitsOptions, RenderOptions, SweepOptions, SweepPath};
use config::{CommonArgs, InputArgs};
use error::CliError;

#[derive(Parser)]
#[command(name = "lengthen", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Assemble the polygon and write it as JSON or CSV
    Polygon(Plain),
    /// Run the invariant suites; exit 1 if any fails
    Verify(Plain),
    /// Approach a limit: endpoint limits, one-pinch continuity or the Euclidean disk
    Limits(Limits),
    /// CSV along a parameter path
    Sweep(Sweep),
    /// Draw an SVG figure
    Render(Render),
}

#[derive(Args)]
struct Plain {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct Limits {
    #[arg(long, value_enum, default_value = "generic")]
    mode: LimitMode,
    /// Number of samples
    #[arg(long, default_value_t = 4)]
    steps: usize,
    /// μ of the shrink family (λ is --l)
    #[arg(long)]
    m: Option<String>,
    /// ν of the shrink family
    #[arg(long)]
    n: Option<String>,
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct Sweep {
    #[arg(long, value_enum)]
    path: SweepPath,
    #[arg(long, default_value_t = 4)]
    steps: usize,
    #[arg(long, default_value_t = -10, allow_hyphen_values = true)]
    from: i64,
    #[arg(long, default_value_t = 10, allow_hyphen_values = true)]
    to: i64,
    /// y range of the pinch path
    #[arg(long, default_value = "1.05")]
    y_from: String,
    #[arg(long, default_value = "5")]
    y_to: String,
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct Render {
    #[arg(long, value_enum)]
    mode: Option<LimitMode>,
    /// First side index in the L=1 and one-pinch figures
    #[arg(long, default_value_t = -3, allow_hyphen_values = true)]
    from: i64,
    #[arg(long, default_value_t = 4, allow_hyphen_values = true)]
    to: i64,
    /// Draw the symmetric slices A + B + C − 6 = s for these s
    #[arg(long, value_delimiter = ',')]
    slices: Option<Vec<f64>>,
    /// Leave out the quadrilateral Q
    #[arg(long)]
    no_q: bool,
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    common: CommonArgs,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Polygon(a) => {
            let cfg = config::resolve(&a.input, &a.common)?;
            commands::finish(&cfg, commands::polygon(&cfg))
        }
        Command::Verify(a) => {
            let cfg = config::resolve(&a.input, &a.common)?;
            commands::finish(&cfg, commands::verify(&cfg))
        }
        Command::Limits(mut a) => {
            // --l is λ of the shrink family here, not a half-trace coordinate
            let l = if a.mode == LimitMode::Euclidean { a.input.ell.take() } else { None };
            let cfg = config::resolve(&a.input, &a.common)?;
            let opts = LimitsOptions { mode: a.mode, steps: a.steps, l, m: a.m, n: a.n };
            commands::finish(&cfg, commands::limits(&cfg, &opts))
        }
        Command::Sweep(mut a) => {
            let l = if a.path == SweepPath::Shrink { a.input.ell.take() } else { None };
            let cfg = config::resolve(&a.input, &a.common)?;
            let opts = SweepOptions {
                path: a.path,
                steps: a.steps,
                from: a.from,
                to: a.to,
                y_from: a.y_from,
                y_to: a.y_to,
                l,
                m: a.m,
                n: a.n,
            };
            commands::finish(&cfg, commands::sweep(&cfg, &opts))
        }
        Command::Render(a) => {
            let cfg = config::resolve(&a.input, &a.common)?;
            let opts = RenderOptions { mode: a.mode, from: a.from, to: a.to, slices: a.slices, no_q: a.no_q };
            commands::finish(&cfg, commands::render(&cfg, &opts))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if let Some(report) = commands::failure_report(&e) {
                let _ = commands::to_stdout(&(report + "\n"));
            }
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
