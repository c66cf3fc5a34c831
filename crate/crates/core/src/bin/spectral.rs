#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use spectral_complexity::graph::{enumerate_orbits, QuantumGraph};
use spectral_complexity::pipeline::emit::{emit_level_csv, emit_report_json, fmt_f64};
use spectral_complexity::pipeline::{
    fetch, graph_staircase_expansion, load_dataset, resolve_model, run_analyze, AnalysisConfig,
    Dataset, EmitFlags, HttpTransport, InputSource, ModelChoice, PipelineError,
};
use spectral_complexity::{
    build_hierarchy_with, complexity_index, compute_spectrum, exp_order, histogram, poly_degree,
    reconstruct_levels, reconstruct_levels_pinned, riemann_expansion, spacings, staircase_eval,
    unfold, wigner_reference, AlphaStrategy, Anchor, FiniteSymbolSequence, HierarchyLevel,
    HierarchyOptions, RegularityCriterion, StaircaseExpansion,
};

#[derive(Parser)]
#[command(
    name = "spectral",
    version,
    about = "Irregularity degree of spectral sequences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Unfold, build the separating hierarchy and write all artifacts.
    Analyze(AnalyzeArgs),
    /// Print the unfolded sequence as `n,k,delta`.
    Unfold(UnfoldArgs),
    /// Eigenvalues of a quantum graph up to `--kmax`.
    GraphSpectrum(GraphSpectrumArgs),
    /// Primitive periodic orbits and their repetitions.
    Orbits(OrbitsArgs),
    /// Sample a staircase expansion on a grid.
    Expansion(ExpansionArgs),
    /// Recover levels from an expansion between hierarchy separators.
    Reconstruct(ReconstructArgs),
    /// Spacing histogram of an input, or difference-operator indices of a
    /// symbol string.
    Stats(StatsArgs),
    /// Download a table into the cache and print its path.
    Fetch(FetchArgs),
}

#[derive(Args, Clone)]
struct InputArgs {
    /// Table with one value per line.
    #[arg(long, conflicts_with_all = ["url", "graph"])]
    input: Option<PathBuf>,
    /// Remote table, cached locally.
    #[arg(long, conflicts_with = "graph")]
    url: Option<String>,
    /// Graph spec JSON.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Number of graph levels to compute.
    #[arg(long, default_value_t = 500)]
    levels: usize,
    /// Keep only the first N values.
    #[arg(long)]
    limit: Option<usize>,
    /// Spread degenerate graph levels apart by this offset.
    #[arg(long)]
    flatten: Option<f64>,
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Never touch the network.
    #[arg(long)]
    offline: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Auto,
    Riemann,
    Weyl,
    Fit,
    Local,
}

#[derive(Args, Clone)]
struct ModelArgs {
    #[arg(long, value_enum, default_value_t = ModelArg::Auto)]
    model: ModelArg,
    /// Total length for `--model weyl`.
    #[arg(long)]
    total_length: Option<f64>,
    /// Constant offset for `--model weyl`.
    #[arg(long, default_value_t = 0.0)]
    weyl_offset: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Midpoint,
    Optimal,
    Fixed,
}

#[derive(Clone, Copy, ValueEnum)]
enum CriterionArg {
    Spread,
    Spacing,
}

#[derive(Args, Clone)]
struct HierarchyArgs {
    #[arg(long, value_enum, default_value_t = StrategyArg::Optimal)]
    strategy: StrategyArg,
    /// Anchor of the optimal strategy: first, mean, midrange or a number.
    #[arg(long, default_value = "midrange")]
    anchor: String,
    /// Comma-separated weights for `--strategy fixed`.
    #[arg(long, value_delimiter = ',')]
    alphas: Vec<f64>,
    #[arg(long, value_enum, default_value_t = CriterionArg::Spread)]
    criterion: CriterionArg,
    #[arg(long, default_value_t = 32)]
    max_depth: usize,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    hierarchy: HierarchyArgs,
    #[arg(long, default_value_t = 1000)]
    prime_cutoff: u64,
    #[arg(long, default_value_t = 3)]
    m_max: u32,
    /// Orbit length cutoff for graph expansions (default 10·L0).
    #[arg(long)]
    orbit_cutoff: Option<f64>,
    #[arg(long, default_value_t = 50)]
    bins: usize,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    no_staircase: bool,
}

#[derive(Args)]
struct UnfoldArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    model: ModelArgs,
    /// Output file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GraphSpectrumArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    kmax: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OrbitsArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    orbit_cutoff: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExpansionSource {
    /// Graph spec; without it the prime-sum expansion is used.
    #[arg(long)]
    graph: Option<PathBuf>,
    #[command(flatten)]
    params: ExpansionParams,
}

#[derive(Args)]
struct ExpansionParams {
    #[arg(long, default_value_t = 1000)]
    prime_cutoff: u64,
    #[arg(long, default_value_t = 3)]
    m_max: u32,
    #[arg(long)]
    orbit_cutoff: Option<f64>,
    /// Gaussian damping scale applied to the harmonics.
    #[arg(long)]
    damping: Option<f64>,
}

#[derive(Args)]
struct ExpansionArgs {
    #[command(flatten)]
    source: ExpansionSource,
    #[arg(long)]
    kmin: f64,
    #[arg(long)]
    kmax: f64,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReconstructArgs {
    /// With `--graph` input the graph's orbit expansion is used, otherwise
    /// the prime sum.
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    params: ExpansionParams,
    #[command(flatten)]
    hierarchy: HierarchyArgs,
    /// Separator level of the hierarchy (default 1). At level 1 the
    /// staircase is pinned to its exact integer values at the separators.
    #[arg(long, default_value_t = 1)]
    separator_level: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 50)]
    bins: usize,
    /// Analyse this digit string over `Z/modulus` instead of an input.
    #[arg(long)]
    digits: Option<String>,
    #[arg(long, default_value_t = 2)]
    modulus: u64,
    /// Search bound for the polynomial degree and exponential order.
    #[arg(long, default_value_t = 64)]
    search: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FetchArgs {
    #[arg(long)]
    url: String,
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    #[arg(long)]
    offline: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn config_err(msg: impl Into<String>) -> PipelineError {
    PipelineError::Config(msg.into())
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn with_output<F>(out: Option<&Path>, f: F) -> Result<(), PipelineError>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    match out {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p).map_err(io_err(p))?);
            f(&mut w).and_then(|_| w.flush()).map_err(io_err(p))
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            f(&mut w)
                .and_then(|_| w.flush())
                .map_err(io_err(Path::new("<stdout>")))
        }
    }
}

fn input_source(a: &InputArgs) -> Result<InputSource, PipelineError> {
    match (&a.input, &a.url, &a.graph) {
        (Some(path), None, None) => Ok(InputSource::Table { path: path.clone() }),
        (None, Some(url), None) => Ok(InputSource::Url { url: url.clone() }),
        (None, None, Some(path)) => Ok(InputSource::Graph {
            path: path.clone(),
            levels: a.levels,
        }),
        _ => Err(config_err(
            "exactly one of --input, --url, --graph is required",
        )),
    }
}

fn model_choice(m: &ModelArgs) -> Result<ModelChoice, PipelineError> {
    Ok(match m.model {
        ModelArg::Auto => ModelChoice::Auto,
        ModelArg::Riemann => ModelChoice::Riemann,
        ModelArg::Fit => ModelChoice::Fit,
        ModelArg::Local => ModelChoice::LocalSpacing,
        ModelArg::Weyl => ModelChoice::Weyl {
            total_length: m
                .total_length
                .ok_or_else(|| config_err("--model weyl needs --total-length"))?,
            offset: m.weyl_offset,
        },
    })
}

fn strategy(h: &HierarchyArgs) -> Result<AlphaStrategy, PipelineError> {
    Ok(match h.strategy {
        StrategyArg::Midpoint => AlphaStrategy::Midpoint,
        StrategyArg::Fixed => {
            if h.alphas.is_empty() {
                return Err(config_err("--strategy fixed needs --alphas"));
            }
            AlphaStrategy::FixedList {
                values: h.alphas.clone(),
            }
        }
        StrategyArg::Optimal => AlphaStrategy::Optimal {
            anchor: match h.anchor.as_str() {
                "first" | "first-element" => Anchor::FirstElement,
                "mean" => Anchor::Mean,
                "midrange" => Anchor::Midrange,
                v => Anchor::Value(
                    v.parse()
                        .map_err(|_| config_err(format!("unknown anchor {v:?}")))?,
                ),
            },
        },
    })
}

fn criterion(h: &HierarchyArgs) -> RegularityCriterion {
    match h.criterion {
        CriterionArg::Spread => RegularityCriterion::Spread,
        CriterionArg::Spacing => RegularityCriterion::Spacing,
    }
}

fn base_config(
    input: &InputArgs,
    model: Option<&ModelArgs>,
) -> Result<AnalysisConfig, PipelineError> {
    let mut cfg = AnalysisConfig::new(input_source(input)?);
    if let Some(m) = model {
        cfg.model = model_choice(m)?;
    }
    cfg.limit = input.limit;
    cfg.flatten_offset = input.flatten;
    cfg.cache_dir = input.cache_dir.clone();
    cfg.offline = input.offline;
    Ok(cfg)
}

fn hierarchy_options(h: &HierarchyArgs) -> Result<HierarchyOptions, PipelineError> {
    Ok(HierarchyOptions {
        strategy: strategy(h)?,
        max_depth: h.max_depth,
        criterion: criterion(h),
    })
}

fn load_unfolded(cfg: &AnalysisConfig) -> Result<(Dataset, HierarchyLevel), PipelineError> {
    cfg.validate()?;
    let data = load_dataset(cfg)?;
    let model = resolve_model(cfg, &data)?;
    let u = unfold(&data.sequence, &model)?;
    Ok((data, HierarchyLevel::from_unfolded(&u)))
}

fn expansion_for(
    graph: Option<&Path>,
    src: &ExpansionParams,
) -> Result<StaircaseExpansion, PipelineError> {
    if src
        .orbit_cutoff
        .is_some_and(|c| !(c > 0.0 && c.is_finite()))
    {
        return Err(config_err("orbit cutoff must be positive"));
    }
    let x = match graph {
        Some(path) => graph_staircase_expansion(&QuantumGraph::load(path)?, src.orbit_cutoff)?,
        None => riemann_expansion(src.prime_cutoff, src.m_max),
    };
    Ok(x.with_damping(src.damping)?)
}

fn run(cmd: Command) -> Result<(), PipelineError> {
    match cmd {
        Command::Analyze(a) => {
            let mut cfg = base_config(&a.input, Some(&a.model))?;
            cfg.strategy = strategy(&a.hierarchy)?;
            cfg.criterion = criterion(&a.hierarchy);
            cfg.max_depth = a.hierarchy.max_depth;
            cfg.prime_cutoff = a.prime_cutoff;
            cfg.m_max = a.m_max;
            cfg.orbit_cutoff = a.orbit_cutoff;
            cfg.histogram_bins = a.bins;
            cfg.out_dir = a.out;
            cfg.emit = EmitFlags {
                staircase: !a.no_staircase,
                ..EmitFlags::default()
            };
            let report = run_analyze(&cfg)?;
            with_output(None, |w| emit_report_json(&report, w))
        }
        Command::Unfold(a) => {
            let cfg = base_config(&a.input, Some(&a.model))?;
            let (_, level) = load_unfolded(&cfg)?;
            with_output(a.out.as_deref(), |w| emit_level_csv(&level, w))
        }
        Command::GraphSpectrum(a) => {
            let g = QuantumGraph::load(&a.graph)?;
            let s = compute_spectrum(&g, a.kmax)?;
            with_output(a.out.as_deref(), |w| {
                writeln!(w, "k,multiplicity")?;
                for (i, k) in s.values().iter().enumerate() {
                    writeln!(w, "{},{}", fmt_f64(*k), s.multiplicity(i))?;
                }
                Ok(())
            })
        }
        Command::Orbits(a) => {
            let g = QuantumGraph::load(&a.graph)?;
            let orbits = enumerate_orbits(&g, a.orbit_cutoff)?;
            with_output(a.out.as_deref(), |w| {
                writeln!(w, "length,repetition,amplitude_re,amplitude_im,bonds")?;
                for o in &orbits {
                    let bonds: Vec<String> = o.bonds.iter().map(|b| b.to_string()).collect();
                    writeln!(
                        w,
                        "{},{},{},{},{}",
                        fmt_f64(o.length),
                        o.repetition,
                        fmt_f64(o.amplitude.re),
                        fmt_f64(o.amplitude.im),
                        bonds.join(" ")
                    )?;
                }
                Ok(())
            })
        }
        Command::Expansion(a) => {
            if !(a.kmax > a.kmin) || a.samples < 2 {
                return Err(config_err("need kmin < kmax and at least 2 samples"));
            }
            let x = expansion_for(a.source.graph.as_deref(), &a.source.params)?;
            let mut rows = Vec::with_capacity(a.samples);
            for i in 0..a.samples {
                let k = a.kmin + (a.kmax - a.kmin) * i as f64 / (a.samples - 1) as f64;
                rows.push((k, staircase_eval(&x, k)?, x.average().evaluate(k)?));
            }
            with_output(a.out.as_deref(), |w| {
                writeln!(w, "k,N_expansion,N_average")?;
                for (k, n, avg) in &rows {
                    writeln!(w, "{},{},{}", fmt_f64(*k), fmt_f64(*n), fmt_f64(*avg))?;
                }
                Ok(())
            })
        }
        Command::Reconstruct(a) => {
            let mut cfg = base_config(&a.input, None)?;
            if a.input.graph.is_none() {
                cfg.model = ModelChoice::Riemann;
            }
            let (data, root) = load_unfolded(&cfg)?;
            let model = resolve_model(&cfg, &data)?;
            let mut opts = hierarchy_options(&a.hierarchy)?;
            opts.max_depth = opts.max_depth.max(a.separator_level);
            let h = build_hierarchy_with(root, &opts)?;
            let j = a.separator_level.min(h.levels.len() - 1);
            let sep = h.levels[j].map_values(|t| model.invert(t - 0.5).unwrap_or(f64::NAN))?;
            let x = expansion_for(a.input.graph.as_deref(), &a.params)?;
            // Level-1 separators interlace the data, so the count at
            // separator i is exactly i + 1.
            let levels = if j == 1 {
                reconstruct_levels_pinned(&x, &sep, 1.0)?
            } else {
                reconstruct_levels(&x, &sep)?
            };
            let exact = data.sequence.values();
            with_output(a.out.as_deref(), |w| {
                writeln!(w, "n,k_reconstructed,k_exact")?;
                for (i, k) in levels.iter().enumerate() {
                    let e = exact.get(i + j).copied().unwrap_or(f64::NAN);
                    writeln!(w, "{},{},{}", i + j + 1, fmt_f64(*k), fmt_f64(e))?;
                }
                Ok(())
            })
        }
        Command::Stats(a) => {
            if let Some(digits) = &a.digits {
                let x = FiniteSymbolSequence::parse_digits(digits, a.modulus)?;
                let report = serde_json::json!({
                    "sequence": x.to_string(),
                    "modulus": a.modulus,
                    "poly_degree": poly_degree(&x, a.search),
                    "exp_order": exp_order(&x, a.search)?,
                    "complexity_index": complexity_index(&x)?,
                });
                return with_output(a.out.as_deref(), |w| emit_report_json(&report, w));
            }
            let cfg = base_config(&a.input, Some(&a.model))?;
            let (_, level) = load_unfolded(&cfg)?;
            let s = spacings(&level)?;
            let hist = histogram(&s, a.bins, Some((0.0, 3.0)))?;
            with_output(a.out.as_deref(), |w| {
                writeln!(w, "bin_left,bin_right,count,density,wigner")?;
                for (i, c) in hist.counts.iter().enumerate() {
                    let (l, r) = (hist.bin_edges[i], hist.bin_edges[i + 1]);
                    writeln!(
                        w,
                        "{},{},{},{},{}",
                        fmt_f64(l),
                        fmt_f64(r),
                        c,
                        fmt_f64(hist.normalized_density[i]),
                        fmt_f64(wigner_reference(0.5 * (l + r)))
                    )?;
                }
                Ok(())
            })
        }
        Command::Fetch(a) => {
            let dir = a.cache_dir.unwrap_or_else(fetch::default_cache_dir);
            let path = fetch::fetch_dataset(&a.url, &dir, &HttpTransport, a.offline)?;
            println!("{}", path.display());
            Ok(())
        }
    }
}
