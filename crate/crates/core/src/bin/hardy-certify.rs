use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hardy_cert::error::{Error, Result};
use hardy_cert::report::{
    error_document, error_exit_code, parse_config, run_certification, Format, Mode, OracleConfig,
};

#[derive(Parser)]
#[command(name = "hardy-certify", version, about = "Certify weight characterizations of iterated Hardy inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one certification and write its report.
    Run(RunArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    mode: Option<Mode>,
    /// Comma-separated list, each entry < 1.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    beta: Option<Vec<f64>>,
    #[arg(long)]
    cells: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Report path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<Format>,
}

fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var("HARDY_CERT_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Range(format!("HARDY_CERT_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Io(e.to_string()))
}

fn write_out(path: Option<&PathBuf>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(bytes).map_err(|e| Error::Io(e.to_string())),
    }
}

fn run(args: &RunArgs) -> Result<i32> {
    init_threads()?;
    let mut cfg = parse_config(&args.config)?;
    if let Some(m) = args.mode {
        cfg.mode = m;
    }
    if let Some(b) = &args.beta {
        cfg.set_beta_list(b.clone())?;
    }
    if args.cells.is_some() || args.restarts.is_some() || args.seed.is_some() {
        let o = cfg.oracle;
        cfg.set_oracle(OracleConfig {
            n_cells: args.cells.unwrap_or(o.n_cells),
            restarts: args.restarts.unwrap_or(o.restarts),
            seed: args.seed.unwrap_or(o.seed),
        })?;
    }
    if let Some(f) = args.format {
        cfg.output.format = f;
    }
    if let Some(p) = &args.out {
        cfg.output.path = Some(p.clone());
    }
    let report = run_certification(&cfg)?;
    eprintln!("{}: {} in {:.3} s", cfg.mode, report.verdict.label(), report.wall_clock);
    let bytes = report.emit(cfg.output.format)?;
    write_out(cfg.output.path.as_ref(), &bytes)?;
    Ok(report.verdict.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Command::Run(args) = cli.command;
    let code = match run(&args) {
        Ok(code) => code,
        Err(e) => {
            let doc = error_document(&e);
            match &args.out {
                Some(p) => {
                    if std::fs::write(p, &doc).is_err() {
                        eprint!("{doc}");
                    }
                }
                None => print!("{doc}"),
            }
            eprintln!("error: {e}");
            error_exit_code(&e)
        }
    };
    ExitCode::from(code as u8)
}
