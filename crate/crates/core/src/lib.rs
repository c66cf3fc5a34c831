//! Irregularity degree of spectral sequences.
//!
//! A spectrum is unfolded to unit mean density and then bracketed by a chain
//! of separating sequences, each interlacing the previous one, until a level
//! can be pierced by a periodic lattice `n + γ`. The number of auxiliary
//! levels needed is the irregularity degree.
//!
//! Spectra come from zeta-zero tables, quantum graphs solved from their bond
//! scattering operator, or plain files. Harmonic staircase expansions (prime
//! sums, graph orbit sums) can be evaluated and integrated to reconstruct
//! individual levels.

// `!(x > y)` is used deliberately so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod graph;
pub mod hierarchy;
pub mod numeric;
pub mod pipeline;
pub mod sequence;
pub mod stats;
pub mod trace;

pub use graph::{
    bond_evolution, compute_spectrum, counting_function, cycle_expansion, enumerate_orbits,
    graph_expansion, vertex_scattering, GraphError, PeriodicOrbit, QuantumGraph,
};
pub use hierarchy::{
    build_hierarchy, build_hierarchy_with, irregularity_degree, optimal_alphas, regularity_test,
    roughness_functional, separating_sequence, AlphaStrategy, Anchor, BootstrapHierarchy, Degree,
    HierarchyError, HierarchyLevel, HierarchyOptions, Regularity, RegularityCriterion,
};
pub use pipeline::{
    fetch_dataset, parse_zero_table, run_analyze, AnalysisConfig, FetchError, IngestError,
    InputSource, ModelChoice, PipelineError, RunReport,
};
pub use sequence::{
    evaluate_average, fit_linear_average, invert_average, unfold, validate_sequence, CountingModel,
    Domain, SequenceError, SpectralSequence, UnfoldedSequence,
};
pub use stats::{
    complexity_index, difference, exp_order, histogram, poly_degree, spacings, wigner_reference,
    xi_statistic, ComplexityIndex, ExpOrder, FiniteSymbolSequence, Histogram, PolyDegree,
    StatsError,
};
pub use trace::{
    integral_k_dn, integral_k_dn_pinned, reconstruct_levels, reconstruct_levels_pinned,
    reconstruct_spectrum, regular_graph_spectrum, riemann_expansion, staircase_eval, Harmonic,
    Staircase, StaircaseExpansion, StepStaircase, TraceError, Truncation,
};
