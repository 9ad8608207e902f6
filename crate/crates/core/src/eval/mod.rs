//! Evaluation harness: anomaly injection, average precision, synthetic data and summaries.

mod analysis;
mod experiment;
mod metrics;
mod perturb;
mod synthetic;

pub use analysis::{analyze_distributions, AnalysisTables, Distribution, KthPositive};
pub use experiment::{
    default_grid, perturb_targets, run_experiment, score_methods, ApRow, EvalReport, Method, PerturbationConfig,
    PerturbationMode,
};
pub use metrics::{anomaly_order, average_precision, spearman, Orientation};
pub use perturb::{perturb_attributes, perturb_structure, select_targets};
pub use synthetic::{planted_focus_graph, PlantedGraph, SyntheticConfig};
