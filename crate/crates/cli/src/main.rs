use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use homsob::field::GridSpec;
use homsob_cli::config::{RunConfig, Suite};
use homsob_cli::experiments::{self, FieldKind, FieldSpec, Outcome};

const USAGE: u8 = 2;
const FAILED: u8 = 1;

#[derive(Parser)]
#[command(
    name = "homsob",
    version,
    about = "Verification suites and experiments for homogeneous Sobolev calculus"
)]
struct Cli {
    /// Configuration file (`key = value` with `[section]` headers)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and write report.csv and summary.txt
    Verify {
        #[arg(long, value_enum)]
        suite: Option<Suite>,
        /// Seed for the randomized checks
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run one experiment
    Experiment {
        #[command(subcommand)]
        which: Experiment,
    },
    /// Sample a named test function and write it as an FLD1 file
    MakeField {
        #[arg(long, value_enum)]
        kind: FieldKind,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long = "L")]
        l: Option<f64>,
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value_t = 0)]
        order: u32,
        /// Multi-index, comma separated
        #[arg(long, value_delimiter = ',', default_value = "0")]
        alpha: Vec<u32>,
        /// Remove the low frequencies so the field is moment free
        #[arg(long)]
        project: bool,
        /// Output file
        #[arg(long = "to")]
        to: PathBuf,
    },
}

#[derive(Subcommand)]
enum Experiment {
    /// L^p' norm of kernel differences against |a|
    GaNorm {
        #[arg(long)]
        nu: f64,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        d: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        a: Vec<f64>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Squared norms of Delta^(s/2) of dilated windowed monomials
    PolyAnnihilation {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        d: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<f64>,
    },
    /// Embedding ratio studies on the frozen corpus
    Embeddings,
    /// Canonical representative of an FLD1 field
    Realize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        p: f64,
    },
}

fn finish(result: experiments::Exp) -> ExitCode {
    match result {
        Ok(msg) => {
            println!("{msg}");
            ExitCode::SUCCESS
        }
        Err(Outcome::Failed(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(FAILED)
        }
        Err(Outcome::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(USAGE)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut cfg = match &cli.config {
        Some(path) => match RunConfig::from_file(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(USAGE);
            }
        },
        None => RunConfig::default(),
    };
    if let Some(out) = &cli.out {
        cfg.out = out.clone();
    }
    match cli.command {
        Command::Verify { suite, seed } => {
            if let Some(s) = suite {
                cfg.suite = s;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let report = homsob_cli::verify(cfg.suite, &cfg);
            print!("{}", report.summary());
            if let Err(e) = report.write_to(&cfg.out) {
                eprintln!("error: cannot write report to {}: {e}", cfg.out.display());
                return ExitCode::from(USAGE);
            }
            if report.failures().is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(FAILED)
            }
        }
        Command::Experiment { which } => finish(match which {
            Experiment::GaNorm { nu, p, d, a, tol } => experiments::ga_norm(nu, p, d, &a, tol, &cfg.out),
            Experiment::PolyAnnihilation { k, s, d, n } => experiments::poly_annihilation(k, s, d, &n, &cfg.out),
            Experiment::Embeddings => experiments::embeddings(&cfg.out),
            Experiment::Realize { input, s, p } => experiments::realize_field(&input, s, p, &cfg, &cfg.out),
        }),
        Command::MakeField {
            kind,
            d,
            l,
            n,
            sigma,
            order,
            alpha,
            project,
            to,
        } => {
            let grid =
                GridSpec::desk(d).and_then(|desk| GridSpec::new(d, l.unwrap_or(desk.period()), n.unwrap_or(desk.n())));
            let grid = match grid {
                Ok(g) => g,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(USAGE);
                }
            };
            finish(experiments::make_field(
                &FieldSpec {
                    kind,
                    grid,
                    sigma,
                    order,
                    alpha,
                    project,
                },
                &to,
            ))
        }
    }
}
