//! CLI for the book-network pipeline: `validate` parses inputs, `run`
//! executes the full analysis, `synth` emits a seeded synthetic corpus.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use genregraph::ingest::{
    generate_synthetic, parse_ratings_path, parse_subjects_path, serialize_ratings,
    serialize_subjects, SynthConfig,
};
use genregraph::model::DuplicatePolicy;
use genregraph::pipeline::{run_pipeline, PipelineConfig, PipelineMode};
use genregraph::Error;

#[derive(Parser)]
#[command(name = "genregraph", version, about = "Build and analyze reader/enjoyment book networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Reader,
    Enjoyment,
    Both,
}

impl From<ModeArg> for PipelineMode {
    fn from(value: ModeArg) -> Self {
        match value {
            ModeArg::Reader => PipelineMode::Reader,
            ModeArg::Enjoyment => PipelineMode::Enjoyment,
            ModeArg::Both => PipelineMode::Both,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parse the input files and report their sizes without analyzing.
    Validate {
        #[arg(long, env = "GENREGRAPH_RATINGS")]
        ratings: PathBuf,
        #[arg(long, env = "GENREGRAPH_SUBJECTS")]
        subjects: Option<PathBuf>,
        /// Keep the maximum rating for duplicate (user, book) pairs instead
        /// of failing.
        #[arg(long)]
        dedupe: bool,
    },
    /// Run the full pipeline and write report bundles.
    Run(RunArgs),
    /// Generate a synthetic corpus with planted communities.
    Synth(SynthArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, env = "GENREGRAPH_RATINGS", required_unless_present = "manifest")]
    ratings: Option<PathBuf>,
    #[arg(long, env = "GENREGRAPH_SUBJECTS", required_unless_present = "manifest")]
    subjects: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "both", env = "GENREGRAPH_MODE")]
    mode: ModeArg,
    /// Minimum rating that counts as enjoyment.
    #[arg(long, default_value_t = 4, env = "GENREGRAPH_RATING_THRESHOLD")]
    rating_threshold: u8,
    #[arg(long, default_value_t = 2, env = "GENREGRAPH_MIN_BOOKS_PER_USER")]
    min_books_per_user: usize,
    #[arg(long, default_value_t = 10, env = "GENREGRAPH_MIN_READERS_PER_BOOK")]
    min_readers_per_book: usize,
    /// Subjects on fewer in-scope books than this are ignored.
    #[arg(long, default_value_t = 13, env = "GENREGRAPH_SUBJECT_MIN_COUNT")]
    subject_min_count: usize,
    #[arg(long, default_value_t = 1.0, env = "GENREGRAPH_RESOLUTION")]
    resolution: f64,
    #[arg(long, default_value_t = 0, env = "GENREGRAPH_SEED")]
    seed: u64,
    #[arg(long, env = "GENREGRAPH_OUT_DIR")]
    out_dir: PathBuf,
    /// Also break every community into sub-communities.
    #[arg(long, env = "GENREGRAPH_SUB_COMMUNITIES")]
    sub_communities: bool,
    /// Worker cap for the projection stage; results are identical for any
    /// value.
    #[arg(long, default_value_t = 1, env = "GENREGRAPH_THREADS")]
    threads: usize,
    #[arg(long)]
    dedupe: bool,
    /// Replay a previous run from its manifest.json; other flags except
    /// --out-dir are ignored.
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long = "communities", visible_alias = "k", default_value_t = 4)]
    communities: usize,
    #[arg(long, default_value_t = 50)]
    books_per_community: usize,
    #[arg(long, default_value_t = 500)]
    users_per_community: usize,
    #[arg(long, default_value_t = 15)]
    reads_per_user: usize,
    #[arg(long, default_value_t = 0.9)]
    p_in: f64,
    #[arg(long, default_value_t = 0.8)]
    p_enjoy_in: f64,
    #[arg(long, default_value_t = 0.3)]
    p_enjoy_out: f64,
    #[arg(long, default_value_t = 3)]
    subjects_per_community: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn dispatch(command: Command) -> Result<(), Error> {
    match command {
        Command::Validate {
            ratings,
            subjects,
            dedupe,
        } => {
            let policy = if dedupe {
                DuplicatePolicy::KeepMax
            } else {
                DuplicatePolicy::Error
            };
            let graph = parse_ratings_path(&ratings, policy)?;
            println!(
                "ratings: {} users, {} books, {} edges",
                graph.user_count(),
                graph.book_count(),
                graph.edge_count()
            );
            if let Some(path) = subjects {
                let catalog = parse_subjects_path(&path)?;
                println!(
                    "subjects: {} books, {} distinct subjects",
                    catalog.book_count(),
                    catalog.distinct_subject_count()
                );
            }
            Ok(())
        }
        Command::Run(args) => {
            let cfg = match &args.manifest {
                Some(path) => PipelineConfig::from_manifest(path, args.out_dir.clone())?,
                None => PipelineConfig {
                    ratings: args.ratings.expect("clap enforces --ratings"),
                    subjects: args.subjects.expect("clap enforces --subjects"),
                    mode: args.mode.into(),
                    rating_threshold: args.rating_threshold,
                    min_books_per_user: args.min_books_per_user,
                    min_readers_per_book: args.min_readers_per_book,
                    subject_min_count: args.subject_min_count,
                    resolution: args.resolution,
                    seed: args.seed,
                    sub_communities: args.sub_communities,
                    threads: args.threads,
                    dedupe: args.dedupe,
                    out_dir: args.out_dir,
                },
            };
            let outcomes = run_pipeline(&cfg)?;
            for outcome in &outcomes {
                println!(
                    "{}: {} books, {} edges, {} communities -> {}",
                    outcome.mode,
                    outcome.network.node_count(),
                    outcome.network.edge_count(),
                    outcome.partition.num_communities(),
                    outcome.bundle.network.parent().unwrap_or(&cfg.out_dir).display()
                );
            }
            Ok(())
        }
        Command::Synth(args) => {
            let cfg = SynthConfig {
                communities: args.communities,
                books_per_community: args.books_per_community,
                users_per_community: args.users_per_community,
                reads_per_user: args.reads_per_user,
                p_in: args.p_in,
                p_enjoy_in: args.p_enjoy_in,
                p_enjoy_out: args.p_enjoy_out,
                subjects_per_community: args.subjects_per_community,
                seed: args.seed,
            };
            let (graph, catalog, planted) = generate_synthetic(&cfg)?;
            std::fs::create_dir_all(&args.out_dir)?;

            let ratings_path = args.out_dir.join("ratings.tsv");
            serialize_ratings(&graph, std::io::BufWriter::new(std::fs::File::create(&ratings_path)?))?;
            let subjects_path = args.out_dir.join("subjects.tsv");
            serialize_subjects(&catalog, std::io::BufWriter::new(std::fs::File::create(&subjects_path)?))?;

            let planted_path = args.out_dir.join("planted.tsv");
            let mut planted_rows = String::new();
            for (idx, name) in graph.books().iter() {
                planted_rows.push_str(&format!(
                    "{name}\t{}\n",
                    planted.community_of(idx as usize)
                ));
            }
            std::fs::write(&planted_path, planted_rows)?;

            println!(
                "wrote {} ({} edges), {}, {} ({} communities)",
                ratings_path.display(),
                graph.edge_count(),
                subjects_path.display(),
                planted_path.display(),
                planted.num_communities()
            );
            Ok(())
        }
    }
}
