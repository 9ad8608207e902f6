//! Perturbation experiments: plant anomalies, score every eligible neighborhood, report AP.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{average_precision, Orientation};
use super::perturb::{perturb_attributes, perturb_structure, select_targets};
use crate::baselines::{average_degree, aw_ncut_uniform_with, conductance, cut_ratio, flake_odf, UniformEdgeWeights};
use crate::error::{AmenError, Result};
use crate::focus::{focus_l1, focus_l2};
use crate::graph::{boundary_of, AttributedGraph, NeighborhoodDef};
use crate::normality::{relevance_vector, SimilarityKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationMode {
    Structure,
    Attribute,
    Both,
}

impl PerturbationMode {
    pub fn name(self) -> &'static str {
        match self {
            PerturbationMode::Structure => "structure",
            PerturbationMode::Attribute => "attribute",
            PerturbationMode::Both => "both",
        }
    }

    /// Rewiring and inheritance probabilities `(p, q)` at one grid point.
    pub fn probabilities(self, intensity: f64) -> (f64, f64) {
        match self {
            PerturbationMode::Structure => (intensity, 0.0),
            PerturbationMode::Attribute => (0.0, intensity),
            PerturbationMode::Both => (intensity, intensity),
        }
    }

    fn code(self) -> u64 {
        match self {
            PerturbationMode::Structure => 1,
            PerturbationMode::Attribute => 2,
            PerturbationMode::Both => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    AmenL1,
    AmenL2,
    AvgDegree,
    CutRatio,
    Conductance,
    FlakeOdf,
    AwNcut,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::AmenL1,
        Method::AmenL2,
        Method::AvgDegree,
        Method::CutRatio,
        Method::Conductance,
        Method::FlakeOdf,
        Method::AwNcut,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::AmenL1 => "amen_l1",
            Method::AmenL2 => "amen_l2",
            Method::AvgDegree => "avg_degree",
            Method::CutRatio => "cut_ratio",
            Method::Conductance => "conductance",
            Method::FlakeOdf => "flake_odf",
            Method::AwNcut => "aw_ncut",
        }
    }

    /// Dense, well-separated neighborhoods score high on normality and
    /// average degree and low on the cut-based measures.
    pub fn orientation(self) -> Orientation {
        match self {
            Method::AmenL1 | Method::AmenL2 | Method::AvgDegree => Orientation::LowerIsAnomalous,
            _ => Orientation::HigherIsAnomalous,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown method `{s}`"))
    }
}

/// `0.05, 0.10, ..., 0.50`.
pub fn default_grid() -> Vec<f64> {
    (1..=10).map(|i| i as f64 / 20.0).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationConfig {
    pub mode: PerturbationMode,
    pub intensities: Vec<f64>,
    pub anomaly_fraction: f64,
    pub size_min: usize,
    pub size_max: usize,
    pub seed: u64,
    pub similarity: SimilarityKind,
}

impl Default for PerturbationConfig {
    fn default() -> Self {
        PerturbationConfig {
            mode: PerturbationMode::Attribute,
            intensities: default_grid(),
            anomaly_fraction: 0.05,
            size_min: 30,
            size_max: 100,
            seed: 0,
            similarity: SimilarityKind::Dot,
        }
    }
}

impl PerturbationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.intensities.is_empty() {
            return Err(AmenError::InvalidConfig("empty intensity grid".into()));
        }
        if let Some(p) = self.intensities.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(AmenError::InvalidConfig(format!("intensity {p} outside [0, 1]")));
        }
        if !(0.0..=1.0).contains(&self.anomaly_fraction) {
            return Err(AmenError::InvalidConfig(format!(
                "anomaly fraction {} outside [0, 1]",
                self.anomaly_fraction
            )));
        }
        if self.size_min > self.size_max {
            return Err(AmenError::InvalidConfig(format!(
                "empty size range [{}, {}]",
                self.size_min, self.size_max
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApRow {
    pub method: Method,
    pub mode: PerturbationMode,
    pub intensity: f64,
    pub ap: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub config: PerturbationConfig,
    pub methods: Vec<Method>,
    pub eligible: usize,
    /// Ids of the perturbed neighborhoods.
    pub targets: Vec<String>,
    /// Ordered by intensity, then by method as requested.
    pub rows: Vec<ApRow>,
    /// Wall-clock seconds spent scoring with each method, summed over intensities.
    #[serde(skip)]
    pub runtimes: Vec<(Method, f64)>,
}

impl EvalReport {
    pub fn ap(&self, method: Method, intensity: f64) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.method == method && r.intensity == intensity)
            .map(|r| r.ap)
    }

    /// AP values of one method in grid order.
    pub fn series(&self, method: Method) -> Vec<f64> {
        self.rows.iter().filter(|r| r.method == method).map(|r| r.ap).collect()
    }
}

/// Stream id for one grid point: independent of grid composition and thread schedule.
fn stream_id(mode: PerturbationMode, intensity: f64) -> u64 {
    (mode.code() << 56) ^ intensity.to_bits()
}

/// Apply the configured perturbation to every target, sharing one copy of the graph.
pub fn perturb_targets(
    graph: &AttributedGraph,
    neighborhoods: &[NeighborhoodDef],
    targets: &[usize],
    mode: PerturbationMode,
    intensity: f64,
    seed: u64,
) -> Result<AttributedGraph> {
    let (p, q) = mode.probabilities(intensity);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id(mode, intensity));
    let mut current = graph.clone();
    for &t in targets {
        if p > 0.0 {
            let nb = boundary_of(&current, &neighborhoods[t].members)?;
            current = perturb_structure(&current, &nb, p, &mut rng)?;
        }
        if q > 0.0 {
            let nb = boundary_of(&current, &neighborhoods[t].members)?;
            current = perturb_attributes(&current, &nb, q, &mut rng)?;
        }
    }
    Ok(current)
}

/// Scores of every listed neighborhood under each method; failures become NaN.
///
/// Returns `scores[method][neighborhood]` and per-method seconds.
pub fn score_methods(
    graph: &AttributedGraph,
    neighborhoods: &[NeighborhoodDef],
    indices: &[usize],
    methods: &[Method],
    sim: SimilarityKind,
) -> (Vec<Vec<f64>>, Vec<f64>) {
    let weights_start = Instant::now();
    let weights = methods
        .contains(&Method::AwNcut)
        .then(|| UniformEdgeWeights::new(graph, sim));
    let weights_time = weights_start.elapsed().as_secs_f64();

    let per_nb: Vec<(Vec<f64>, Vec<f64>)> = indices
        .par_iter()
        .map(|&idx| {
            let mut scores = vec![f64::NAN; methods.len()];
            let mut times = vec![0.0; methods.len()];
            let Ok(nb) = boundary_of(graph, &neighborhoods[idx].members) else {
                return (scores, times);
            };
            let mut rv = None;
            for (slot, &method) in methods.iter().enumerate() {
                let start = Instant::now();
                let value = match method {
                    Method::AmenL1 | Method::AmenL2 => {
                        let rv = rv.get_or_insert_with(|| relevance_vector(graph, &nb, sim));
                        rv.as_ref().ok().and_then(|rv| {
                            let res = if method == Method::AmenL1 {
                                focus_l1(rv)
                            } else {
                                focus_l2(rv)
                            };
                            res.ok().map(|r| r.score)
                        })
                    }
                    Method::AvgDegree => Some(average_degree(&nb)),
                    Method::CutRatio => cut_ratio(graph, &nb).ok(),
                    Method::Conductance => conductance(graph, &nb).ok(),
                    Method::FlakeOdf => Some(flake_odf(graph, &nb)),
                    Method::AwNcut => weights
                        .as_ref()
                        .and_then(|w| aw_ncut_uniform_with(w, graph, &nb).ok()),
                };
                times[slot] = start.elapsed().as_secs_f64();
                scores[slot] = value.unwrap_or(f64::NAN);
            }
            (scores, times)
        })
        .collect();

    let mut scores = vec![Vec::with_capacity(indices.len()); methods.len()];
    let mut times = vec![0.0; methods.len()];
    for (s, t) in per_nb {
        for m in 0..methods.len() {
            scores[m].push(s[m]);
            times[m] += t[m];
        }
    }
    if let Some(slot) = methods.iter().position(|&m| m == Method::AwNcut) {
        times[slot] += weights_time;
    }
    (scores, times)
}

/// Run the full grid. Deterministic for a given graph, neighborhood list and config.
pub fn run_experiment(
    graph: &AttributedGraph,
    neighborhoods: &[NeighborhoodDef],
    config: &PerturbationConfig,
    methods: &[Method],
) -> Result<EvalReport> {
    config.validate()?;
    if methods.is_empty() {
        return Err(AmenError::InvalidConfig("no methods requested".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (eligible, targets) = select_targets(
        neighborhoods,
        config.anomaly_fraction,
        config.size_min,
        config.size_max,
        &mut rng,
    )?;
    if targets.is_empty() {
        return Err(AmenError::NoPositives);
    }
    let labels: Vec<bool> = eligible.iter().map(|i| targets.binary_search(i).is_ok()).collect();

    let per_intensity: Vec<Result<(Vec<ApRow>, Vec<f64>)>> = config
        .intensities
        .par_iter()
        .map(|&intensity| {
            let perturbed = perturb_targets(graph, neighborhoods, &targets, config.mode, intensity, config.seed)?;
            let (scores, times) = score_methods(&perturbed, neighborhoods, &eligible, methods, config.similarity);
            let mut rows = Vec::with_capacity(methods.len());
            for (m, &method) in methods.iter().enumerate() {
                rows.push(ApRow {
                    method,
                    mode: config.mode,
                    intensity,
                    ap: average_precision(&scores[m], &labels, method.orientation())?,
                    seed: config.seed,
                });
            }
            Ok((rows, times))
        })
        .collect();

    let mut rows = Vec::new();
    let mut runtimes: Vec<(Method, f64)> = methods.iter().map(|&m| (m, 0.0)).collect();
    for r in per_intensity {
        let (r, t) = r?;
        rows.extend(r);
        for (slot, secs) in t.into_iter().enumerate() {
            runtimes[slot].1 += secs;
        }
    }
    Ok(EvalReport {
        config: config.clone(),
        methods: methods.to_vec(),
        eligible: eligible.len(),
        targets: targets.iter().map(|&t| neighborhoods[t].id.clone()).collect(),
        rows,
        runtimes,
    })
}
