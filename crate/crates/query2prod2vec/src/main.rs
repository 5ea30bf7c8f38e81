//! `q2p`: file-based pipeline around the query2prod2vec library.
//!
//! Subcommands cover the whole flow: simulate-shop, train-products,
//! embed-queries, build-analogies, evaluate. Values come from a flat JSON
//! config (`--config`); flags override config values.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use query2prod2vec::pipeline::{
    cmd_build_analogies, cmd_embed_queries, cmd_evaluate, cmd_simulate_shop, cmd_train_products,
    parse_type_pair, EmbedMode, PipelineConfig,
};
use query2prod2vec::synth::ShopSpec;

#[derive(Parser)]
#[command(name = "q2p", version, about = "Grounded query embeddings for product search")]
struct Cli {
    /// Flat JSON config file; flags override its values
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Global seed; fans out to per-module seeds
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Training threads; more than 1 voids determinism
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Real,
    Synthetic,
    Merged,
}

impl From<ModeArg> for EmbedMode {
    fn from(mode: ModeArg) -> EmbedMode {
        match mode {
            ModeArg::Real => EmbedMode::Real,
            ModeArg::Synthetic => EmbedMode::Synthetic,
            ModeArg::Merged => EmbedMode::Merged,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic shop (catalog, sessions, click log, ground truth)
    SimulateShop {
        #[arg(long, default_value_t = 8)]
        brands: usize,
        #[arg(long, default_value_t = 5)]
        types: usize,
        #[arg(long, default_value_t = 8)]
        activities: usize,
        #[arg(long, default_value_t = 4)]
        products_per_cell: usize,
        #[arg(long, default_value_t = 50_000)]
        sessions: usize,
        #[arg(long, default_value_t = 3)]
        session_min: usize,
        #[arg(long, default_value_t = 8)]
        session_max: usize,
        #[arg(long, default_value_t = 1.0)]
        zipf: f64,
    },
    /// Train the product space from sessions
    TrainProducts {
        /// Session file (JSON-lines); overrides the config path
        #[arg(long)]
        sessions: Option<PathBuf>,
        /// Catalog file, used to count unknown ids in the ingestion report
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
    /// Build the query lexicon from real and/or simulated clicks
    EmbedQueries {
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// Product embedding file (default: out dir/product_embeddings.txt)
        #[arg(long)]
        embeddings: Option<PathBuf>,
        /// Word list for simulation, one word per line
        /// (default: all taxonomy tokens of the catalog)
        #[arg(long)]
        words: Option<PathBuf>,
        #[arg(long)]
        catalog: Option<PathBuf>,
        #[arg(long)]
        sessions: Option<PathBuf>,
        #[arg(long)]
        clicks: Option<PathBuf>,
    },
    /// Generate analogy test sets from catalog taxonomy
    BuildAnalogies {
        /// Type pairs like brand:activity (repeatable)
        #[arg(long = "pair", required = true)]
        pairs: Vec<String>,
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
    /// Score a query lexicon on analogy files (and optionally triplets)
    Evaluate {
        #[arg(long)]
        lexicon: PathBuf,
        /// Analogy file (repeatable)
        #[arg(long = "analogies", required = true)]
        analogies: Vec<PathBuf>,
        #[arg(long)]
        triplets: Option<PathBuf>,
        /// Comma-separated hit-rate cutoffs, e.g. 5,10,20
        #[arg(long, value_delimiter = ',')]
        cutoffs: Option<Vec<usize>>,
        #[arg(long)]
        catalog: Option<PathBuf>,
        /// Rank against every lexicon key instead of the answer field's labels
        #[arg(long)]
        open_vocabulary: bool,
    },
}

fn run(cli: Cli) -> query2prod2vec::Result<Vec<PathBuf>> {
    let mut config = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = cli.out {
        config.out_dir = out;
    }
    if let Some(threads) = cli.threads {
        config.threads = threads;
    }

    match cli.command {
        Command::SimulateShop {
            brands,
            types,
            activities,
            products_per_cell,
            sessions,
            session_min,
            session_max,
            zipf,
        } => {
            let spec = ShopSpec {
                n_brands: brands,
                n_types: types,
                n_activities: activities,
                products_per_cell,
                n_sessions: sessions,
                session_length_range: (session_min, session_max),
                popularity_zipf_exponent: zipf,
                seed: config.seed,
            };
            cmd_simulate_shop(&config, &spec)
        }
        Command::TrainProducts { sessions, catalog } => {
            if sessions.is_some() {
                config.sessions = sessions;
            }
            if catalog.is_some() {
                config.catalog = catalog;
            }
            cmd_train_products(&config)
        }
        Command::EmbedQueries {
            mode,
            embeddings,
            words,
            catalog,
            sessions,
            clicks,
        } => {
            if catalog.is_some() {
                config.catalog = catalog;
            }
            if sessions.is_some() {
                config.sessions = sessions;
            }
            if clicks.is_some() {
                config.clicks = clicks;
            }
            cmd_embed_queries(&config, mode.into(), embeddings.as_deref(), words.as_deref())
        }
        Command::BuildAnalogies { pairs, catalog } => {
            if catalog.is_some() {
                config.catalog = catalog;
            }
            let pairs = pairs
                .iter()
                .map(|p| parse_type_pair(p))
                .collect::<query2prod2vec::Result<Vec<_>>>()?;
            cmd_build_analogies(&config, &pairs)
        }
        Command::Evaluate {
            lexicon,
            analogies,
            triplets,
            cutoffs,
            catalog,
            open_vocabulary,
        } => {
            if catalog.is_some() {
                config.catalog = catalog;
            }
            if let Some(cutoffs) = cutoffs {
                config.cutoffs = cutoffs;
            }
            if open_vocabulary {
                config.open_vocabulary = true;
            }
            cmd_evaluate(&config, &lexicon, &analogies, triplets.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(written) => {
            for path in written {
                println!("wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
