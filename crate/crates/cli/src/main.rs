use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use designforge::quaternion::OptimizeConfig;
use designforge_cli::commands::{self, ConstructKind};
use designforge_cli::error::{CliError, EXIT_OK};
use designforge_cli::fixtures::write_fixtures;
use designforge_cli::format::{parse_design, to_json};

#[derive(Parser)]
#[command(name = "designforge", version, about = "Construct, verify and certify projective 2-designs")]
struct Cli {
    /// Worker threads for the parallel kernels.
    #[arg(long, global = true, env = "DESIGNFORGE_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a design (or a Singer difference set) and write it as JSON.
    Construct {
        #[command(subcommand)]
        kind: Kind,
        #[arg(long, short, global = true)]
        out: Option<PathBuf>,
    },
    /// Check claims about a design file and emit a certificate.
    Verify {
        file: PathBuf,
        /// Comma-separated, e.g. `etf,design`. Defaults depend on the setting.
        #[arg(long, value_delimiter = ',')]
        claims: Option<Vec<String>>,
        /// Tolerance for floating-point claims.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// List admissible Gabor parameters (p, k, r).
    Search {
        #[arg(long, default_value_t = 100)]
        p_max: u64,
        #[arg(long, default_value_t = 600)]
        k_max: u64,
        #[arg(long, default_value_t = 71)]
        r_max: u64,
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        format: TableFormat,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Entanglement-breaking rank bounds for the channel Z_d.
    Ebr {
        #[arg(long)]
        d: usize,
        /// A complex design file to certify as the witness.
        #[arg(long)]
        witness: Option<PathBuf>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Search numerically for a quaternionic design.
    Optimize {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        /// Number of seeds, run as `seed-base, seed-base + 1, ...`.
        #[arg(long, default_value_t = 10)]
        seeds: u64,
        #[arg(long, default_value_t = 0)]
        seed_base: u64,
        #[arg(long, default_value_t = OptimizeConfig::default().iters)]
        iters: usize,
        #[arg(long, default_value_t = OptimizeConfig::default().initial_step)]
        step: f64,
        /// Where to write the best design.
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Where to write the potential traces as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Convert a design file, or write the bundled fixture set.
    #[command(group(ArgGroup::new("source").required(true).args(["file", "fixtures"])))]
    Export {
        file: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ExportFormat::Csv)]
        to: ExportFormat,
        /// Directory that receives the versioned fixture set.
        #[arg(long)]
        fixtures: Option<PathBuf>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Kind {
    /// Gabor ETF in F_{q^2}^d, q = p^k, d = r^2 + r + 1.
    Gabor {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        r: u64,
    },
    /// Singer (r^2 + r + 1, r + 1, 1) difference set.
    Singer {
        #[arg(long)]
        r: u64,
    },
    /// Harmonic ETF from the Singer set for r, over F_{q^2} with q = p^k.
    Harmonic {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        r: u64,
    },
    /// d + 1 mutually unbiased bases (d = 2 or an odd prime).
    Mub {
        #[arg(long)]
        d: usize,
    },
    /// SIC from the catalog (d = 2, 3).
    Sic {
        #[arg(long)]
        d: usize,
    },
    /// Six-point tight design in H^2.
    QSimplex,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Csv,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportFormat {
    Csv,
    Json,
}

fn emit(out: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            std::fs::write(path, contents).map_err(|source| CliError::Io { path: path.display().to_string(), source })
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(contents.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn run(cli: Cli) -> Result<i32, CliError> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Construct { kind, out } => {
            let kind = match kind {
                Kind::Gabor { p, k, r } => ConstructKind::Gabor { p, k, r },
                Kind::Singer { r } => ConstructKind::Singer { r },
                Kind::Harmonic { p, k, r } => ConstructKind::Harmonic { p, k, r },
                Kind::Mub { d } => ConstructKind::Mub { d },
                Kind::Sic { d } => ConstructKind::Sic { d },
                Kind::QSimplex => ConstructKind::QSimplex,
            };
            emit(out.as_deref(), &commands::construct(&kind)?.to_json())?;
            Ok(EXIT_OK)
        }
        Command::Verify { file, claims, tol, out } => {
            let (cert, code) = match std::fs::read(&file) {
                Ok(bytes) => commands::verify(&bytes, claims.as_deref(), tol),
                Err(e) => return Err(CliError::Io { path: file.display().to_string(), source: e }),
            };
            for c in &cert.claims {
                eprintln!(
                    "{}: {:?}{}",
                    c.claim,
                    c.status,
                    c.method.as_ref().map_or(String::new(), |m| format!(" via {m}"))
                );
            }
            if let Some(e) = &cert.error {
                eprintln!("error: {e}");
            }
            emit(out.as_deref(), &to_json(&cert))?;
            Ok(code)
        }
        Command::Search { p_max, k_max, r_max, format, out } => {
            let rows = commands::search(p_max, k_max, r_max);
            let text = match format {
                TableFormat::Csv => commands::search_csv(&rows),
                TableFormat::Text => commands::search_text(&rows),
            };
            emit(out.as_deref(), &text)?;
            Ok(EXIT_OK)
        }
        Command::Ebr { d, witness, tol, out } => {
            if d == 0 {
                return Err(CliError::Usage("need d >= 1".into()));
            }
            let bytes = witness.as_deref().map(read).transpose()?;
            let (cert, code) = commands::ebr(d, bytes.as_deref(), tol);
            if let Some(e) = &cert.ebr {
                match e.best_constructive {
                    Some(b) => eprintln!("d = {d}: constructive bound {b}"),
                    None => eprintln!("d = {d}: no constructive witness; best recorded bound {}", e.best_recorded),
                }
            }
            if let Some(e) = &cert.error {
                eprintln!("error: {e}");
            }
            emit(out.as_deref(), &to_json(&cert))?;
            Ok(code)
        }
        Command::Optimize { d, n, seeds, seed_base, iters, step, out, trace } => {
            let config = OptimizeConfig { iters, initial_step: step, ..OptimizeConfig::default() };
            let seeds: Vec<u64> = (seed_base..seed_base + seeds).collect();
            let result = commands::optimize(d, n, &seeds, &config)?;
            for r in &result.runs {
                eprintln!(
                    "seed {}: {} iterations, potential {:e}, gap {:e}{}",
                    r.seed,
                    r.iterations,
                    r.potential,
                    r.gap,
                    if r.converged { ", converged" } else { "" }
                );
            }
            if let Some(path) = trace {
                emit(Some(&path), &result.trace_csv)?;
            }
            emit(out.as_deref(), &to_json(&result.best))?;
            Ok(EXIT_OK)
        }
        Command::Export { file, to, fixtures, out } => {
            if let Some(dir) = fixtures {
                for path in write_fixtures(&dir)? {
                    eprintln!("wrote {}", path.display());
                }
                return Ok(EXIT_OK);
            }
            let file = parse_design(&read(&file.expect("clap requires a source"))?)?;
            let text = match to {
                ExportFormat::Csv => commands::export_csv(&file),
                ExportFormat::Json => to_json(&file),
            };
            emit(out.as_deref(), &text)?;
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let code = match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
