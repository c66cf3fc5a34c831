//! Ingestion, orchestration and artifact emission.

pub mod emit;
pub mod fetch;
pub mod ingest;

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::graph::{
    compute_spectrum, cycle_expansion, enumerate_orbits, graph_expansion, GraphError, QuantumGraph,
    GRAPH_AMPLITUDE_NORM,
};
use crate::hierarchy::{
    build_hierarchy_with, AlphaStrategy, BootstrapHierarchy, Degree, HierarchyError,
    HierarchyLevel, HierarchyOptions, LevelSummary, RegularityCriterion,
};
use crate::sequence::{fit_linear_average, unfold, CountingModel, SequenceError, SpectralSequence};
use crate::stats::{histogram, spacings, StatsError};
use crate::trace::{
    riemann_expansion, staircase_eval, Staircase, StaircaseExpansion, StepStaircase, TraceError,
};

pub use emit::{emit_level_csv, emit_report_json, emit_staircase_samples, StaircaseSample};
pub use fetch::{fetch_dataset, FetchError, HttpTransport, Transport};
pub use ingest::{parse_zero_table, IngestError, ZeroTable};

pub const MAX_DEPTH_LIMIT: usize = 64;

/// Exit codes of the `spectral` binary, one per error class.
pub mod exit_code {
    pub const OK: i32 = 0;
    pub const CONFIG: i32 = 2;
    pub const PARSE: i32 = 3;
    pub const SEQUENCE: i32 = 4;
    pub const NETWORK: i32 = 5;
    pub const NUMERIC: i32 = 6;
    pub const IO: i32 = 7;
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error(transparent)]
    Fetch(#[from] FetchError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Hierarchy(#[from] HierarchyError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => exit_code::CONFIG,
            PipelineError::Ingest(_) => exit_code::PARSE,
            PipelineError::Sequence(_) => exit_code::SEQUENCE,
            PipelineError::Fetch(FetchError::Io(_)) => exit_code::IO,
            PipelineError::Fetch(_) => exit_code::NETWORK,
            PipelineError::Graph(GraphError::Spec(_)) => exit_code::PARSE,
            PipelineError::Graph(GraphError::Io(_)) => exit_code::IO,
            PipelineError::Graph(GraphError::Sequence(_)) => exit_code::SEQUENCE,
            PipelineError::Graph(_)
            | PipelineError::Hierarchy(_)
            | PipelineError::Trace(_)
            | PipelineError::Stats(_) => exit_code::NUMERIC,
            PipelineError::Io { .. } => exit_code::IO,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Where the spectrum comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InputSource {
    /// Text table, one value per line.
    Table { path: PathBuf },
    /// Remote table, fetched through the cache.
    Url { url: String },
    /// Graph spec JSON; the first `levels` eigenvalues are computed.
    Graph { path: PathBuf, levels: usize },
}

/// Counting model used for unfolding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelChoice {
    /// Weyl law of the graph for graph input, zeta-zero density otherwise.
    Auto,
    Riemann,
    LocalSpacing,
    Weyl {
        total_length: f64,
        offset: f64,
    },
    /// Least-squares line through the staircase.
    Fit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmitFlags {
    pub hierarchy_json: bool,
    pub level_csv: bool,
    pub histograms: bool,
    pub staircase: bool,
}

impl Default for EmitFlags {
    fn default() -> Self {
        Self {
            hierarchy_json: true,
            level_csv: true,
            histograms: true,
            staircase: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub input: InputSource,
    pub model: ModelChoice,
    pub strategy: AlphaStrategy,
    pub criterion: RegularityCriterion,
    pub max_depth: usize,
    /// Keep only the first `limit` values.
    pub limit: Option<usize>,
    pub prime_cutoff: u64,
    pub m_max: u32,
    /// Orbit length cutoff for graph expansions; `None` means `10·L0`.
    pub orbit_cutoff: Option<f64>,
    /// Spread degenerate graph levels apart by this much instead of failing.
    pub flatten_offset: Option<f64>,
    pub out_dir: Option<PathBuf>,
    pub emit: EmitFlags,
    pub cache_dir: Option<PathBuf>,
    pub offline: bool,
    /// Histogram bins over spacings in `[0, 3]`.
    pub histogram_bins: usize,
}

impl AnalysisConfig {
    pub fn new(input: InputSource) -> Self {
        Self {
            input,
            model: ModelChoice::Auto,
            strategy: AlphaStrategy::optimal(),
            criterion: RegularityCriterion::Spread,
            max_depth: crate::hierarchy::DEFAULT_MAX_DEPTH,
            limit: None,
            prime_cutoff: 1000,
            m_max: 3,
            orbit_cutoff: None,
            flatten_offset: None,
            out_dir: None,
            emit: EmitFlags::default(),
            cache_dir: None,
            offline: false,
            histogram_bins: 50,
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: &str| Err(PipelineError::Config(m.to_string()));
        if !(1..=MAX_DEPTH_LIMIT).contains(&self.max_depth) {
            return bad("max_depth must lie in [1, 64]");
        }
        if self.prime_cutoff < 2 {
            return bad("prime cutoff must be at least 2");
        }
        if self.m_max < 1 {
            return bad("m_max must be at least 1");
        }
        if self
            .orbit_cutoff
            .is_some_and(|c| !(c > 0.0 && c.is_finite()))
        {
            return bad("orbit cutoff must be positive");
        }
        if self
            .flatten_offset
            .is_some_and(|c| !(c > 0.0 && c.is_finite()))
        {
            return bad("flatten offset must be positive");
        }
        if self.limit == Some(0) {
            return bad("limit must be positive");
        }
        if self.histogram_bins == 0 {
            return bad("histogram needs at least one bin");
        }
        if let InputSource::Graph { levels, .. } = self.input {
            if levels < 2 {
                return bad("graph input needs at least 2 levels");
            }
        }
        if let ModelChoice::Weyl {
            total_length,
            offset,
        } = self.model
        {
            if !(total_length > 0.0 && total_length.is_finite() && offset.is_finite()) {
                return bad("Weyl total length must be positive");
            }
        }
        Ok(())
    }
}

/// Identity of the analysed data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetFingerprint {
    pub source: String,
    /// Hex SHA-256 of the input bytes.
    pub sha256: String,
    pub count: usize,
    /// Largest number of decimal places in a table; absent for graphs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub version: String,
    pub dataset: DatasetFingerprint,
    pub model: CountingModel,
    pub strategy: String,
    pub criterion: RegularityCriterion,
    pub max_depth: usize,
    pub degree: Degree,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_reg: Option<f64>,
    pub mean_delta: f64,
    pub levels: Vec<LevelSummary>,
    pub artifacts: Vec<String>,
    pub wall_time_s: f64,
}

/// Loaded input: the sequence, its fingerprint and the graph if any.
pub struct Dataset {
    pub sequence: SpectralSequence,
    pub fingerprint: DatasetFingerprint,
    pub graph: Option<QuantumGraph>,
}

fn read(path: &Path) -> Result<Vec<u8>, PipelineError> {
    std::fs::read(path).map_err(io_err(path))
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// First `levels` eigenvalues of `g`, counted with multiplicity.
pub fn graph_levels(g: &QuantumGraph, levels: usize) -> Result<SpectralSequence, GraphError> {
    let pi = std::f64::consts::PI;
    let mut k_max = pi * (levels as f64 + 2.0 * g.bonds().len() as f64 + 4.0) / g.total_length();
    loop {
        let s = compute_spectrum(g, k_max)?;
        if s.count_with_multiplicity() >= levels {
            let mut kept = 0;
            let mut n = 0;
            while kept < levels {
                kept += s.multiplicity(n) as usize;
                n += 1;
            }
            return Ok(s.truncated(n)?);
        }
        k_max *= 1.5;
    }
}

/// Reads and validates the configured input.
pub fn load_dataset(cfg: &AnalysisConfig) -> Result<Dataset, PipelineError> {
    let (bytes, source, table_path, graph_levels_n) = match &cfg.input {
        InputSource::Table { path } => (read(path)?, path.display().to_string(), true, 0),
        InputSource::Url { url } => {
            let dir = cfg
                .cache_dir
                .clone()
                .unwrap_or_else(fetch::default_cache_dir);
            let path = fetch_dataset(url, &dir, &HttpTransport, cfg.offline)?;
            (read(&path)?, url.clone(), true, 0)
        }
        InputSource::Graph { path, levels } => {
            (read(path)?, path.display().to_string(), false, *levels)
        }
    };
    let sha256 = sha256_hex(&bytes);
    let (mut sequence, precision, graph) = if table_path {
        let t = parse_zero_table(&bytes)?;
        (t.sequence, Some(t.precision), None)
    } else {
        let text = std::str::from_utf8(&bytes).map_err(|_| IngestError::Encoding)?;
        let g = QuantumGraph::from_json(text)?;
        let s = graph_levels(&g, graph_levels_n)?;
        let s = match cfg.flatten_offset {
            Some(off) => s.flatten_multiplicities(off)?,
            None => {
                s.require_simple()?;
                s
            }
        };
        (s, None, Some(g))
    };
    if let Some(n) = cfg.limit {
        sequence = sequence.truncated(n)?;
    }
    Ok(Dataset {
        fingerprint: DatasetFingerprint {
            source,
            sha256,
            count: sequence.len(),
            precision,
        },
        sequence,
        graph,
    })
}

/// Counting model for `cfg.model` on this dataset.
pub fn resolve_model(cfg: &AnalysisConfig, data: &Dataset) -> Result<CountingModel, PipelineError> {
    Ok(match &cfg.model {
        ModelChoice::Auto => match &data.graph {
            Some(g) => CountingModel::WeylLinear {
                total_length: g.total_length(),
                offset: g.staircase_offset()?,
            },
            None => CountingModel::RiemannVonMangoldt,
        },
        ModelChoice::Riemann => CountingModel::RiemannVonMangoldt,
        ModelChoice::LocalSpacing => CountingModel::LocalSpacing,
        ModelChoice::Weyl {
            total_length,
            offset,
        } => CountingModel::WeylLinear {
            total_length: *total_length,
            offset: *offset,
        },
        ModelChoice::Fit => fit_linear_average(&data.sequence)?,
    })
}

/// Orbit expansion of `g` up to `cutoff` (default `10·L0`).
///
/// Uses the cycle expansion when the bond lengths share a decimal quantum and
/// explicit orbit enumeration otherwise.
pub fn graph_staircase_expansion(
    g: &QuantumGraph,
    cutoff: Option<f64>,
) -> Result<StaircaseExpansion, GraphError> {
    let cutoff = cutoff.unwrap_or(10.0 * g.total_length());
    match cycle_expansion(g, cutoff, GRAPH_AMPLITUDE_NORM) {
        Err(GraphError::NoLengthQuantum | GraphError::DegreeTooLarge(_)) => {
            graph_expansion(g, &enumerate_orbits(g, cutoff)?)
        }
        r => r,
    }
}

/// Harmonic expansion matching the dataset, when one is defined.
pub fn dataset_expansion(
    cfg: &AnalysisConfig,
    data: &Dataset,
    model: &CountingModel,
) -> Result<Option<StaircaseExpansion>, PipelineError> {
    if let Some(g) = &data.graph {
        return Ok(Some(graph_staircase_expansion(g, cfg.orbit_cutoff)?));
    }
    if *model == CountingModel::RiemannVonMangoldt {
        return Ok(Some(riemann_expansion(cfg.prime_cutoff, cfg.m_max)));
    }
    Ok(None)
}

/// Samples at the midpoints of consecutive levels (at most 1000).
pub fn staircase_samples(
    seq: &SpectralSequence,
    x: &StaircaseExpansion,
) -> Result<Vec<StaircaseSample>, PipelineError> {
    let exact = StepStaircase::new(seq);
    let v = seq.values();
    let n = v.len().min(1001);
    let mut out = Vec::with_capacity(n.saturating_sub(1));
    for w in v[..n].windows(2) {
        let k = 0.5 * (w[0] + w[1]);
        out.push(StaircaseSample {
            k,
            exact: exact.count(k)?,
            expansion: staircase_eval(x, k)?,
            average: x.average().evaluate(k)?,
        });
    }
    Ok(out)
}

fn write_file<F>(
    dir: &Path,
    name: &str,
    artifacts: &mut Vec<String>,
    f: F,
) -> Result<(), PipelineError>
where
    F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
{
    let path = dir.join(name);
    let file = File::create(&path).map_err(io_err(&path))?;
    let mut w = BufWriter::new(file);
    f(&mut w).map_err(io_err(&path))?;
    std::io::Write::flush(&mut w).map_err(io_err(&path))?;
    artifacts.push(name.to_string());
    Ok(())
}

fn emit_hierarchy_artifacts(
    cfg: &AnalysisConfig,
    dir: &Path,
    h: &BootstrapHierarchy,
    artifacts: &mut Vec<String>,
) -> Result<(), PipelineError> {
    if cfg.emit.hierarchy_json {
        write_file(dir, "hierarchy.json", artifacts, |w| {
            emit_report_json(&h.report(), w)
        })?;
    }
    for level in &h.levels {
        if cfg.emit.level_csv {
            write_file(dir, &format!("level_{}.csv", level.j), artifacts, |w| {
                emit_level_csv(level, w)
            })?;
        }
        if cfg.emit.histograms && level.len() >= 2 {
            let s = spacings(level)?;
            let hist = histogram(&s, cfg.histogram_bins, Some((0.0, 3.0)))?;
            write_file(
                dir,
                &format!("spacings_level_{}.csv", level.j),
                artifacts,
                |w| hist.write_csv(w),
            )?;
        }
    }
    Ok(())
}

/// Ingest → unfold → hierarchy → statistics → artifacts.
///
/// Output files land in `cfg.out_dir` when set; `report.json` is written
/// last. The report is deterministic apart from `wall_time_s`.
pub fn run_analyze(cfg: &AnalysisConfig) -> Result<RunReport, PipelineError> {
    let start = Instant::now();
    cfg.validate()?;
    let data = load_dataset(cfg)?;
    let model = resolve_model(cfg, &data)?;
    let unfolded = unfold(&data.sequence, &model)?;
    let h = build_hierarchy_with(
        HierarchyLevel::from_unfolded(&unfolded),
        &HierarchyOptions {
            strategy: cfg.strategy.clone(),
            max_depth: cfg.max_depth,
            criterion: cfg.criterion,
        },
    )?;

    let mut artifacts = Vec::new();
    if let Some(dir) = &cfg.out_dir {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
        emit_hierarchy_artifacts(cfg, dir, &h, &mut artifacts)?;
        if cfg.emit.staircase {
            if let Some(x) = dataset_expansion(cfg, &data, &model)? {
                let samples = staircase_samples(&data.sequence, &x)?;
                write_file(dir, "staircase.csv", &mut artifacts, |w| {
                    emit_staircase_samples(&samples, w)
                })?;
            }
        }
    }

    let mut report = RunReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        dataset: data.fingerprint,
        model,
        strategy: cfg.strategy.name(),
        criterion: cfg.criterion,
        max_depth: cfg.max_depth,
        degree: h.degree,
        gamma_reg: h.gamma_reg,
        mean_delta: unfolded.mean_delta(),
        levels: h.summaries.clone(),
        artifacts,
        wall_time_s: 0.0,
    };
    if let Some(dir) = &cfg.out_dir {
        report.artifacts.push("report.json".into());
        report.wall_time_s = start.elapsed().as_secs_f64();
        let path = dir.join("report.json");
        let file = File::create(&path).map_err(io_err(&path))?;
        emit_report_json(&report, BufWriter::new(file)).map_err(io_err(&path))?;
    } else {
        report.wall_time_s = start.elapsed().as_secs_f64();
    }
    Ok(report)
}
