//! Distributional summaries over a collection of neighborhoods.

use log::warn;
use rayon::prelude::*;
use serde::Serialize;

use crate::focus::{focus_l1, focus_l2};
use crate::graph::{boundary_of, AttributedGraph, NeighborhoodDef};
use crate::normality::{relevance_vector, SimilarityKind};

/// Step-function points `(value, probability)` over the distinct sample values, ascending.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Distribution {
    pub points: Vec<(f64, f64)>,
}

impl Distribution {
    /// `P(X <= v)`.
    pub fn cdf(samples: &[f64]) -> Self {
        Self::build(samples, |below_or_at, _, n| below_or_at as f64 / n as f64)
    }

    /// `P(X >= v)`.
    pub fn ccdf(samples: &[f64]) -> Self {
        Self::build(samples, |below_or_at, run, n| (n - below_or_at + run) as f64 / n as f64)
    }

    fn build(samples: &[f64], prob: impl Fn(usize, usize, usize) -> f64) -> Self {
        let mut sorted: Vec<f64> = samples.iter().copied().filter(|v| !v.is_nan()).collect();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let mut points = Vec::new();
        let mut i = 0;
        while i < n {
            let mut j = i;
            while j < n && sorted[j] == sorted[i] {
                j += 1;
            }
            points.push((sorted[i], prob(j, j - i, n)));
            i = j;
        }
        Distribution { points }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KthPositive {
    pub k: usize,
    /// Mean `x(f)` of the k-th largest positive entry, over neighborhoods having at least `k` of them.
    pub mean_x: f64,
    pub neighborhoods: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalysisTables {
    /// Number of positive relevance entries per neighborhood.
    pub positive_count_cdf: Distribution,
    /// Fraction of members exhibiting the L1-selected attribute.
    pub l1_support_ccdf: Distribution,
    pub normality_l1_ccdf: Distribution,
    pub normality_l2_ccdf: Distribution,
    pub kth_positive: Vec<KthPositive>,
    pub analyzed: usize,
    /// Neighborhoods that could not be scored.
    pub skipped: usize,
}

struct Sample {
    positives: Vec<f64>,
    l1_support: Option<f64>,
    l1: f64,
    l2: f64,
}

fn sample(graph: &AttributedGraph, def: &NeighborhoodDef, sim: SimilarityKind) -> Option<Sample> {
    let nb = boundary_of(graph, &def.members).ok()?;
    let rv = relevance_vector(graph, &nb, sim).ok()?;
    let mut positives: Vec<f64> = rv.scores().into_iter().map(|(_, x)| x).filter(|&x| x > 0.0).collect();
    positives.sort_by(|a, b| b.total_cmp(a));
    let l1 = focus_l1(&rv).ok()?;
    let l2 = focus_l2(&rv).ok()?;
    let l1_support = l1.focus_attributes().first().map(|&f| {
        let exhibiting = nb
            .members()
            .iter()
            .filter(|&&i| graph.attributes(i).get(f) > 0.0)
            .count();
        exhibiting as f64 / nb.size() as f64
    });
    Some(Sample {
        positives,
        l1_support,
        l1: l1.score,
        l2: l2.score,
    })
}

pub fn analyze_distributions(
    graph: &AttributedGraph,
    neighborhoods: &[NeighborhoodDef],
    sim: SimilarityKind,
) -> AnalysisTables {
    let results: Vec<Option<Sample>> = neighborhoods.par_iter().map(|d| sample(graph, d, sim)).collect();
    let skipped = results.iter().filter(|s| s.is_none()).count();
    if skipped > 0 {
        warn!("{skipped} neighborhoods could not be scored and were left out of the analysis");
    }
    let samples: Vec<Sample> = results.into_iter().flatten().collect();

    let counts: Vec<f64> = samples.iter().map(|s| s.positives.len() as f64).collect();
    let support: Vec<f64> = samples.iter().filter_map(|s| s.l1_support).collect();
    let l1: Vec<f64> = samples.iter().map(|s| s.l1).collect();
    let l2: Vec<f64> = samples.iter().map(|s| s.l2).collect();

    let max_k = samples.iter().map(|s| s.positives.len()).max().unwrap_or(0);
    let kth_positive = (1..=max_k)
        .map(|k| {
            let vals: Vec<f64> = samples.iter().filter_map(|s| s.positives.get(k - 1).copied()).collect();
            KthPositive {
                k,
                mean_x: vals.iter().sum::<f64>() / vals.len() as f64,
                neighborhoods: vals.len(),
            }
        })
        .collect();

    AnalysisTables {
        positive_count_cdf: Distribution::cdf(&counts),
        l1_support_ccdf: Distribution::ccdf(&support),
        normality_l1_ccdf: Distribution::ccdf(&l1),
        normality_l2_ccdf: Distribution::ccdf(&l2),
        kth_positive,
        analyzed: samples.len(),
        skipped,
    }
}
