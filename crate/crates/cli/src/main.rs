use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use iwasawa2::pipeline::Mode;
use serde_json::{json, Value};

use iwasawa2_cli::commands::{self, IndexArgs, Outcome};
use iwasawa2_cli::config::{Config, Overrides};
use iwasawa2_cli::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "iwasawa2", version, about = "Class fields, 2-adic regulators and Iwasawa-theoretic checks for Q(sqrt(-q))")]
struct Cli {
    /// JSON configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Cache directory (overrides the config file and IWASAWA2_CACHE_DIR).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Complex working precision in bits.
    #[arg(long, global = true)]
    complex_bits: Option<u32>,
    /// Series truncation degree.
    #[arg(long, global = true)]
    degree: Option<usize>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TableMode {
    Ingested,
    Computed,
    Hybrid,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Reduced forms, class number and the class of a prime above 2.
    Classgroup {
        #[arg(long)]
        q: u64,
    },
    /// Hilbert class polynomial (cached).
    Hcp {
        #[arg(long)]
        q: u64,
        /// Compute at this precision instead of the certified default, bypassing the cache.
        #[arg(long)]
        bits: Option<u32>,
    },
    /// Defining polynomial of the Hilbert class field and its factorisation over Z_2.
    Field {
        #[arg(long)]
        q: u64,
        /// Use this defining polynomial instead (ascending coefficients, comma separated).
        #[arg(long, allow_hyphen_values = true)]
        poly: Option<String>,
        #[arg(long)]
        prec: Option<u32>,
    },
    /// 2-adic regulator of a unit system.
    Regulator {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        units: Option<PathBuf>,
        #[arg(long)]
        prec: Option<u32>,
    },
    /// The index formula with each contribution itemised.
    Index {
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 0)]
        n: u32,
        /// ord_2 of the regulator, if known.
        #[arg(long, allow_hyphen_values = true)]
        rp: Option<i64>,
        #[arg(long, default_value_t = 1)]
        hh: u64,
        /// ord_2 of a square root of the relative discriminant at p (used when n > 0).
        #[arg(long, default_value_t = 0)]
        disc_ord: i64,
        /// Compute ord_2 of the regulator from scratch.
        #[arg(long)]
        computed: bool,
    },
    /// The table over primes q = 7 mod 8 up to qmax.
    Table {
        #[arg(long)]
        qmax: u64,
        #[arg(long, value_enum, default_value_t = TableMode::Ingested)]
        mode: TableMode,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Also write the CSV here.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        prec: Option<u32>,
    },
    /// Numerical and property checks.
    Verify {
        #[command(subcommand)]
        what: Verify,
    },
}

#[derive(Subcommand, Debug)]
enum Verify {
    Elliptic {
        #[arg(long, value_parser = ["25", "22", "prop21", "lemma26"])]
        suite: String,
        #[arg(long, default_values_t = vec![7u64])]
        q: Vec<u64>,
    },
    Iwasawa {
        #[arg(long, value_parser = ["mahler", "gamma", "sinnott", "asymptote"])]
        suite: String,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
}

fn name(c: &Command) -> String {
    match c {
        Command::Classgroup { .. } => "classgroup".into(),
        Command::Hcp { .. } => "hcp".into(),
        Command::Field { .. } => "field".into(),
        Command::Regulator { .. } => "regulator".into(),
        Command::Index { .. } => "index".into(),
        Command::Table { .. } => "table".into(),
        Command::Verify { what: Verify::Elliptic { suite, .. } } => format!("verify elliptic {suite}"),
        Command::Verify { what: Verify::Iwasawa { suite, .. } } => format!("verify iwasawa {suite}"),
    }
}

fn padic_override(c: &Command) -> Option<u32> {
    match c {
        Command::Field { prec, .. } | Command::Regulator { prec, .. } | Command::Table { prec, .. } => *prec,
        _ => None,
    }
}

fn run(cli: &Cli, cfg: &Config) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Classgroup { q } => commands::classgroup(*q),
        Command::Hcp { q, bits } => commands::hcp(cfg, *q, *bits),
        Command::Field { q, poly, .. } => commands::field(cfg, *q, poly.as_deref()),
        Command::Regulator { q, units, prec } => commands::regulator(cfg, *q, units.as_deref(), *prec),
        Command::Index { q, n, rp, hh, disc_ord, computed } => {
            commands::index(cfg, &IndexArgs { q: *q, n: *n, rp: *rp, hh: *hh, disc_ord: *disc_ord, computed: *computed })
        }
        Command::Table { qmax, mode, format, csv, .. } => {
            let mode = match mode {
                TableMode::Ingested => Mode::Ingested,
                TableMode::Computed => Mode::Computed,
                TableMode::Hybrid => Mode::Hybrid,
            };
            commands::table(cfg, *qmax, mode, csv.as_deref(), matches!(format, Format::Csv))
        }
        Command::Verify { what: Verify::Elliptic { suite, q } } => commands::verify_elliptic(cfg, suite, q),
        Command::Verify { what: Verify::Iwasawa { suite, samples } } => commands::verify_iwasawa(cfg, suite, *samples),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let command = name(&cli.command);
    let ov = Overrides {
        complex_bits: cli.complex_bits,
        padic_prec: padic_override(&cli.command),
        series_degree: cli.degree,
        cache_dir: cli.cache_dir.clone(),
        threads: cli.threads,
        seed: cli.seed,
    };
    let cfg = Config::load(cli.config.as_deref(), &ov);
    let outcome = cfg.as_ref().map_err(|e| CliError::Precondition(e.to_string())).and_then(|c| run(&cli, c));
    let config = cfg.as_ref().map(|c| serde_json::to_value(c).unwrap_or(Value::Null)).unwrap_or(Value::Null);
    let ms = start.elapsed().as_millis() as u64;
    let (envelope, code) = match outcome {
        Ok(o) => {
            if let Some(raw) = &o.raw {
                let _ = std::io::stdout().write_all(raw.as_bytes());
                return ExitCode::from(if o.passed { 0 } else { 4 });
            }
            let code = if o.passed { 0 } else { 4 };
            (
                json!({ "schema": 1, "command": command, "config": config, "result": o.result,
                        "provenance": o.provenance, "artifacts": o.artifacts, "wall_clock_ms": ms }),
                code,
            )
        }
        Err(e) => {
            eprintln!("error: {e}");
            (
                json!({ "schema": 1, "command": command, "config": config, "result": Value::Null,
                        "error": { "kind": e.kind(), "message": e.to_string() }, "wall_clock_ms": ms }),
                e.exit_code(),
            )
        }
    };
    let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(&envelope).unwrap_or_default());
    ExitCode::from(code as u8)
}
