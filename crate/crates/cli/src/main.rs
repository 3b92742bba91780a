use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use cyclesat::driver::{Backend, RunConfig, RunError, Stats};
use cyclesat::encoding::{encode_axioms, EoMethod};
use cyclesat::incremental::{write_oracle_dimacs, OracleKind};
use cyclesat::oracle::{canonical_diagonal, verify_database};
use cyclesat::symmetry::Diagonal;
use log::info;

#[derive(Parser, Debug)]
#[command(
    name = "cyclesat",
    version,
    about = "Enumerate non-degenerate cycle sets up to isomorphism"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate one representative per isomorphism class
    Enumerate(EnumerateArgs),
    /// Check a database file of cycle sets
    Verify(VerifyArgs),
    /// Render a stats JSON file as a table
    Stats { path: PathBuf },
}

#[derive(Args, Debug)]
struct EnumerateArgs {
    #[arg(long)]
    size: usize,
    /// Diagonal in cycle notation, e.g. "(1 2)(3 4)", or "all"
    #[arg(long, default_value = "all")]
    diagonal: String,
    #[arg(long, default_value_t = Backend::Incremental)]
    backend: Backend,
    /// Partial checks on every n-th decision (0 disables them)
    #[arg(long)]
    freq: Option<u32>,
    /// Node limit of partial checks (backtrack backend)
    #[arg(long)]
    node_limit: Option<u64>,
    /// Conflict limit of partial checks (incremental backend)
    #[arg(long)]
    conflict_limit: Option<u64>,
    #[arg(long, default_value_t = EoMethod::Binary)]
    eo: EoMethod,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Output file; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    stats_out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory receiving the DIMACS encodings of every selected diagonal
    #[arg(long)]
    dimacs_dump: Option<PathBuf>,
    /// Keep solver order instead of sorting the output
    #[arg(long)]
    raw_order: bool,
    /// Log conflicts and restarts of the solver
    #[arg(long)]
    trace: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    path: PathBuf,
    #[arg(long)]
    size: usize,
    /// Only accept entries with this diagonal
    #[arg(long)]
    diagonal: Option<String>,
    /// Also write the report as JSON
    #[arg(long)]
    json: Option<PathBuf>,
}

const EXIT_INVALID: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let trace = matches!(&cli.command, Command::Enumerate(a) if a.trace);
    let default_filter = if trace { "info,cyclesat_engine=trace" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(default_filter)).init();

    match cli.command {
        Command::Enumerate(args) => enumerate(args),
        Command::Verify(args) => verify(args),
        Command::Stats { path } => stats(&path),
    }
}

fn run_config(args: &EnumerateArgs) -> Result<RunConfig> {
    let mut config = RunConfig::new(args.size, args.backend);
    config.diagonal = Some(args.diagonal.clone());
    config.eo = args.eo;
    config.workers = args.workers;
    config.seed = args.seed;
    if let Some(freq) = args.freq {
        config.freq = freq;
    }
    match (args.backend, args.node_limit, args.conflict_limit) {
        (Backend::Backtrack, _, Some(_)) => bail!("--conflict-limit applies to the incremental backend"),
        (Backend::Incremental, Some(_), _) => bail!("--node-limit applies to the backtrack backend"),
        (_, Some(limit), _) | (_, _, Some(limit)) => config.limit = limit,
        _ => {}
    }
    config.validate()?;
    Ok(config)
}

fn enumerate(args: EnumerateArgs) -> ExitCode {
    let config = match run_config(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    if let Some(dir) = &args.dimacs_dump {
        if let Err(e) = dump_dimacs(dir, &config) {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_INTERNAL);
        }
    }
    let output = match cyclesat::driver::run(&config) {
        Ok(o) => o,
        Err(e @ RunError::InvalidConfig(_)) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INVALID);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INTERNAL);
        }
    };
    let solutions = if args.raw_order {
        output.raw_solutions()
    } else {
        output.sorted_solutions()
    };
    let stats = output.stats();
    info!("{} solutions", solutions.len());
    let written = (|| -> Result<()> {
        let lines = solutions.iter().map(|c| c.to_line());
        match &args.out {
            Some(path) => write_lines(BufWriter::new(create(path)?), lines)?,
            None => write_lines(io::stdout().lock(), lines)?,
        }
        if let Some(path) = &args.stats_out {
            fs::write(path, stats.to_json() + "\n").with_context(|| format!("writing {}", path.display()))?;
        }
        Ok(())
    })();
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INTERNAL)
        }
    }
}

fn create(path: &Path) -> Result<File> {
    File::create(path).with_context(|| format!("creating {}", path.display()))
}

fn write_lines<W: Write>(mut w: W, lines: impl Iterator<Item = String>) -> Result<()> {
    for line in lines {
        writeln!(w, "{line}")?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the axiom encoding, its variable map and, for the incremental
/// backend, both oracle encodings of every selected diagonal.
fn dump_dimacs(dir: &Path, config: &RunConfig) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for t in config.diagonals()? {
        let label = t
            .cycle_type()
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join("-");
        let stem = format!("n{}_{label}", config.n);
        let enc = encode_axioms(&t, config.eo);
        enc.cnf
            .write_dimacs(BufWriter::new(create(&dir.join(format!("{stem}.cnf")))?))?;
        enc.varmap
            .write_sidecar(BufWriter::new(create(&dir.join(format!("{stem}.map")))?))?;
        if config.backend == Backend::Incremental {
            for (kind, suffix) in [(OracleKind::Complete, "complete"), (OracleKind::Partial, "partial")] {
                let file = create(&dir.join(format!("{stem}_oracle_{suffix}.cnf")))?;
                write_oracle_dimacs(kind, &t, config.eo, BufWriter::new(file))?;
            }
        }
    }
    Ok(())
}

fn verify(args: VerifyArgs) -> ExitCode {
    let diagonal = match args.diagonal.as_deref().map(|d| Diagonal::parse(args.size, d)) {
        None => None,
        Some(Ok(t)) => Some(canonical_diagonal(t.permutation())),
        Some(Err(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    let report = match verify_database(&args.path, args.size, diagonal.as_ref()) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    print!("{}", report.to_text());
    if let Some(path) = &args.json {
        if let Err(e) = fs::write(path, report.to_json() + "\n") {
            eprintln!("error: writing {}: {e}", path.display());
            return ExitCode::from(EXIT_INVALID);
        }
    }
    if report.is_clean() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn stats(path: &Path) -> ExitCode {
    let parsed = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .and_then(|text| Stats::from_json(&text).context("malformed stats file"));
    match parsed {
        Ok(stats) => {
            print!("{}", stats.report_table());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INVALID)
        }
    }
}
