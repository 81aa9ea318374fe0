use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use log::LevelFilter;

use gcs_cli::report::{self, Format};
use gcs_cli::{Command, CliError};

/// Generalized coherent states: informativity, van Hove checks, Berry phases
/// and discrete path integrals.
#[derive(Debug, Parser)]
#[command(name = "gcs", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,

    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,

    /// Directory for report.json and the format-specific outputs.
    #[arg(long)]
    out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// More log output (repeat for debug).
    #[arg(short, long, action = clap::ArgAction::Count)]
    verbose: u8,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match args.verbose {
        0 => LevelFilter::Warn,
        1 => LevelFilter::Info,
        _ => LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();

    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(args: &Args) -> Result<(), CliError> {
    let start = Instant::now();
    let report = gcs_cli::run(args.command, &args.config)?;
    let wall = start.elapsed().as_secs_f64();

    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let stdout_err = |source| CliError::Io { path: PathBuf::from("<stdout>"), source };
    match &args.out {
        Some(dir) => {
            report::write_outputs(&report, dir, args.format, wall)?;
            write!(out, "{}", report::render_text(&report)).map_err(stdout_err)?;
            writeln!(out, "wall time       {wall:.3} s").map_err(stdout_err)?;
            writeln!(out, "wrote           {}", dir.join(report::REPORT_FILE).display()).map_err(stdout_err)?;
        }
        None => match args.format {
            Format::Json => write!(out, "{}", report.to_json()).map_err(stdout_err)?,
            Format::Csv => report::write_csv(&report, &mut out).map_err(stdout_err)?,
            Format::Text => {
                write!(out, "{}", report::render_text(&report)).map_err(stdout_err)?;
                writeln!(out, "wall time       {wall:.3} s").map_err(stdout_err)?;
            }
        },
    }
    Ok(())
}
