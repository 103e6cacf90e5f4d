use clap::{Args, Parser, Subcommand, ValueEnum};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use xintseq::{Budget, Error};

mod commands;

#[derive(Parser)]
#[command(name = "xintseq", version, about = "Exact search over cross-intersecting families of partial sequences")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// List every member of a sequence space.
    Enumerate {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Star-product bound for k copies of one space, or for two spaces.
    Bound {
        #[command(flatten)]
        space: PairArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Exact maximum product of cross-intersecting families.
    Search {
        #[command(flatten)]
        space: PairArgs,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Include the maximizers themselves in the report.
        #[arg(long)]
        maximizers: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Exact maximum weighted product over two weighted families.
    Wsearch {
        /// Weighted family file for the left side.
        #[arg(long)]
        left: PathBuf,
        /// Weighted family file for the right side (defaults to the left).
        #[arg(long)]
        right: Option<PathBuf>,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Drive two families to a compression fixpoint.
    Compress {
        /// `fixpoint` reads subset files; `cascade` reads labeled-set files.
        #[arg(long, value_enum, default_value_t = CompressMode::Fixpoint)]
        mode: CompressMode,
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        /// Universe size for subset files (defaults to the largest element).
        #[arg(long)]
        universe: Option<usize>,
        /// Caps of the left labeled family.
        #[arg(long, value_delimiter = ',')]
        caps: Option<Vec<u32>>,
        /// Caps of the right labeled family (defaults to `--caps`).
        #[arg(long, value_delimiter = ',')]
        caps2: Option<Vec<u32>>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run a named verification suite (or `all`).
    Verify {
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Scan instances with a smallest cap of 2. Reports only.
    ExploreOpen {
        /// Longest cap vector to scan.
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..=3))]
        max_len: u32,
        /// Largest cap to scan.
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(2..=4))]
        max_cap: u32,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args, Clone)]
struct SpaceArgs {
    /// Cap vector, e.g. `3,3,4`.
    #[arg(long, value_delimiter = ',', required = true)]
    caps: Vec<u32>,
    /// Number of nonzero entries (defaults to the full length).
    #[arg(long)]
    rank: Option<usize>,
}

#[derive(Args, Clone)]
struct PairArgs {
    #[command(flatten)]
    left: SpaceArgs,
    /// Cap vector of the second space (defaults to `--caps`).
    #[arg(long, value_delimiter = ',')]
    caps2: Option<Vec<u32>>,
    /// Rank of the second space (defaults to `--rank`, or its full length).
    #[arg(long)]
    rank2: Option<usize>,
    /// Number of families; all share the first space when above 2.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
    k: u32,
}

#[derive(Args, Clone, Copy)]
struct BudgetArgs {
    /// Largest relation (|X| * |Y| cells) a search will build.
    #[arg(long, default_value_t = Budget::default().max_cells as u64, value_parser = clap::value_parser!(u64).range(1..))]
    budget_cells: u64,
    /// Largest number of closed pairs (or k-fold tuple space) a search will visit.
    #[arg(long, default_value_t = Budget::default().max_closed_pairs as u64, value_parser = clap::value_parser!(u64).range(1..))]
    budget_pairs: u64,
}

impl BudgetArgs {
    fn budget(self) -> Budget {
        Budget {
            max_cells: self.budget_cells as u128,
            max_closed_pairs: self.budget_pairs as u128,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum CompressMode {
    Fixpoint,
    Cascade,
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Output format; `verify` defaults to csv, everything else to json.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl OutputArgs {
    fn open(&self) -> io::Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

/// Exit status of a verb.
enum Outcome {
    Ok,
    Failed,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::BudgetExceeded { .. }) => 3,
        _ => 2,
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("XINTSEQ_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            // the global pool can only be built once; a second attempt is harmless
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    match commands::run(cli.verb) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(e) => {
            if let Some(Error::BudgetExceeded { what, needed, limit }) = e.downcast_ref::<Error>() {
                let report = serde_json::json!({
                    "refused": what,
                    "needed": needed.to_string(),
                    "limit": limit.to_string(),
                });
                println!("{report}");
            }
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
