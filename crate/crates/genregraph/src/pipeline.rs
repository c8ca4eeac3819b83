//! End-to-end orchestration: ingest once, then per mode project, detect
//! communities, rank representative books, build subject distributions,
//! enrich, run PCA and write the report bundle.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::centrality::{
    eigenvector_centrality, top_books, weighted_degree, Measure, DEFAULT_MAX_ITERATIONS,
    DEFAULT_TOLERANCE,
};
use crate::community::{louvain, sub_communities, LouvainConfig};
use crate::error::{Error, Result};
use crate::export::{write_reports, ReportBundle, ReportInputs, TopBookRow};
use crate::ingest::{parse_ratings_path, parse_subjects_path};
use crate::model::{DuplicatePolicy, Partition, RatingGraph, SimilarityGraph, SubjectCatalog};
use crate::pca::{community_correlations, run_pca, PcaConfig};
use crate::project::{build_network_with_threads, NetworkMode, ProjectionConfig};
use crate::subjects::{community_subject_matrix, prune_subjects, GlobalSubjectCounts};

/// Representative books reported per community and measure.
pub const TOP_BOOKS_PER_COMMUNITY: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PipelineMode {
    Reader,
    Enjoyment,
    Both,
}

impl PipelineMode {
    pub fn network_modes(self) -> Vec<NetworkMode> {
        match self {
            PipelineMode::Reader => vec![NetworkMode::Reader],
            PipelineMode::Enjoyment => vec![NetworkMode::Enjoyment],
            PipelineMode::Both => vec![NetworkMode::Reader, NetworkMode::Enjoyment],
        }
    }
}

/// Full configuration of one `run` invocation.
///
/// The serialized form doubles as the run manifest; it deliberately leaves
/// out the output directory so two runs into different directories still
/// produce byte-identical files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub ratings: PathBuf,
    pub subjects: PathBuf,
    pub mode: PipelineMode,
    pub rating_threshold: u8,
    pub min_books_per_user: usize,
    pub min_readers_per_book: usize,
    pub subject_min_count: usize,
    pub resolution: f64,
    pub seed: u64,
    pub sub_communities: bool,
    /// Worker cap for the projection stage. Execution detail only — results
    /// are identical for any value — so it is not part of the manifest.
    #[serde(skip_serializing, default = "default_threads")]
    pub threads: usize,
    pub dedupe: bool,
    #[serde(skip)]
    pub out_dir: PathBuf,
}

fn default_threads() -> usize {
    1
}

impl PipelineConfig {
    pub fn new(ratings: PathBuf, subjects: PathBuf, out_dir: PathBuf) -> Self {
        Self {
            ratings,
            subjects,
            mode: PipelineMode::Both,
            rating_threshold: 4,
            min_books_per_user: 2,
            min_readers_per_book: 10,
            subject_min_count: 13,
            resolution: 1.0,
            seed: 0,
            sub_communities: false,
            threads: 1,
            dedupe: false,
            out_dir,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=5).contains(&self.rating_threshold) {
            return Err(Error::Config(format!(
                "rating_threshold {} outside [1,5]",
                self.rating_threshold
            )));
        }
        if !(self.resolution > 0.0 && self.resolution.is_finite()) {
            return Err(Error::Config("resolution must be positive".into()));
        }
        if self.threads < 1 {
            return Err(Error::Config("threads must be >= 1".into()));
        }
        Ok(())
    }

    fn projection(&self, mode: NetworkMode) -> ProjectionConfig {
        ProjectionConfig {
            mode,
            rating_threshold: self.rating_threshold,
            min_books_per_user: self.min_books_per_user,
            min_readers_per_book: self.min_readers_per_book,
        }
    }

    fn louvain(&self) -> LouvainConfig {
        LouvainConfig {
            resolution: self.resolution,
            seed: self.seed,
            ..LouvainConfig::default()
        }
    }

    /// Load a previously written manifest, pointing outputs at `out_dir`.
    pub fn from_manifest(path: &Path, out_dir: PathBuf) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|source| Error::InputFile {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg: PipelineConfig = serde_json::from_reader(std::io::BufReader::new(file))
            .map_err(|e| Error::Config(format!("manifest {}: {e}", path.display())))?;
        cfg.out_dir = out_dir;
        Ok(cfg)
    }
}

/// Outputs of one mode's run, kept in memory for callers that want to poke
/// at results programmatically (the CLI only uses the bundle paths).
pub struct ModeOutcome {
    pub mode: NetworkMode,
    pub network: SimilarityGraph,
    pub partition: Partition,
    pub bundle: ReportBundle,
}

fn stage<T>(name: &str, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let value = f();
    log::info!("{name} finished in {:.3}s", start.elapsed().as_secs_f64());
    value
}

/// Run the full pipeline per the configured mode(s). The input files are
/// parsed exactly once regardless of how many networks are built.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<Vec<ModeOutcome>> {
    cfg.validate()?;
    let policy = if cfg.dedupe {
        DuplicatePolicy::KeepMax
    } else {
        DuplicatePolicy::Error
    };
    let ratings = stage("parse ratings", || parse_ratings_path(&cfg.ratings, policy))?;
    log::info!(
        "ratings: {} users, {} books, {} edges",
        ratings.user_count(),
        ratings.book_count(),
        ratings.edge_count()
    );
    let catalog = stage("parse subjects", || parse_subjects_path(&cfg.subjects))?;
    log::info!(
        "subjects: {} books, {} distinct subjects",
        catalog.book_count(),
        catalog.distinct_subject_count()
    );

    std::fs::create_dir_all(&cfg.out_dir)?;
    let manifest_path = cfg.out_dir.join("manifest.json");
    let manifest = serde_json::to_string_pretty(cfg)
        .map_err(|e| Error::Config(format!("cannot serialize manifest: {e}")))?;
    std::fs::write(&manifest_path, manifest + "\n")?;

    let mut outcomes = Vec::new();
    for mode in cfg.mode.network_modes() {
        outcomes.push(run_mode(cfg, mode, &ratings, &catalog, &manifest_path)?);
    }
    Ok(outcomes)
}

fn run_mode(
    cfg: &PipelineConfig,
    mode: NetworkMode,
    ratings: &RatingGraph,
    catalog: &SubjectCatalog,
    manifest_path: &Path,
) -> Result<ModeOutcome> {
    let sg = stage(&format!("build {mode} network"), || {
        build_network_with_threads(ratings, &cfg.projection(mode), cfg.threads)
    })?;
    log::info!(
        "{mode} network: {} books, {} edges",
        sg.node_count(),
        sg.edge_count()
    );

    let partition = stage(&format!("louvain on {mode} network"), || {
        louvain(&sg, &cfg.louvain())
    })?;
    log::info!(
        "{mode} network: {} communities",
        partition.num_communities()
    );

    let top = stage("rank representative books", || -> Result<Vec<TopBookRow>> {
        let mut rows = Vec::new();
        for community in 0..partition.num_communities() {
            for measure in [Measure::WeightedDegree, Measure::Eigenvector] {
                let ranked = top_books(
                    &sg,
                    &partition,
                    community,
                    measure,
                    TOP_BOOKS_PER_COMMUNITY,
                )?;
                rows.extend(ranked.into_iter().enumerate().map(|(i, (book, score))| {
                    TopBookRow {
                        community,
                        rank: i + 1,
                        book,
                        measure,
                        score,
                    }
                }));
            }
        }
        Ok(rows)
    })?;

    let (matrix, report, pca, correlations) = stage("subject analysis", || {
        let pruned = prune_subjects(catalog, sg.books().names(), cfg.subject_min_count);
        let matrix = community_subject_matrix(&pruned, &sg, &partition)?;
        let global = GlobalSubjectCounts::from_catalog(&pruned);
        let report = crate::subjects::enrichment(&matrix, &global)?;
        let pca = run_pca(&matrix, &PcaConfig::default())?;
        let correlations = community_correlations(&matrix);
        Ok::<_, Error>((matrix, report, pca, correlations))
    })?;
    let _ = matrix;

    let subs = if cfg.sub_communities {
        Some(stage("sub-communities", || {
            sub_communities(&sg, &partition, &cfg.louvain())
        })?)
    } else {
        None
    };

    let centralities = stage("network centralities", || -> Result<_> {
        Ok(vec![
            weighted_degree(&sg),
            eigenvector_centrality(&sg, DEFAULT_TOLERANCE, DEFAULT_MAX_ITERATIONS)?,
        ])
    })?;

    let dir = cfg.out_dir.join(mode.to_string());
    let bundle = stage("write reports", || {
        write_reports(
            &dir,
            &ReportInputs {
                sg: &sg,
                partition: &partition,
                centralities: &centralities,
                top_books: &top,
                enrichment: &report,
                pca: &pca,
                correlations: &correlations,
                sub_communities: subs.as_ref(),
            },
            manifest_path,
        )
    })?;

    Ok(ModeOutcome {
        mode,
        network: sg,
        partition,
        bundle,
    })
}
