//! Closed-form focus-weight inference and neighborhood ranking.
//!
//! Maximizing `w · x` subject to `w ≥ 0` and a norm constraint has closed
//! forms: under L1 the optimum is one-hot on the largest entry, under L2 it
//! is `x₊ / ‖x₊‖₂`, and with per-weight cap `1/k` it spreads uniformly over the
//! `k` largest entries. Only supported attributes are candidates.

use std::cmp::Ordering;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{AmenError, Result};
use crate::graph::{boundary_of, AttrId, AttributedGraph, NeighborhoodDef};
use crate::normality::{relevance_vector, RelevanceVector, SimilarityKind};

/// Score given to neighborhoods with no supported attribute.
pub const NO_FOCUS_SCORE: f64 = -1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FocusNorm {
    L1,
    L2,
    TopK(usize),
}

impl FocusNorm {
    pub fn name(&self) -> String {
        match self {
            FocusNorm::L1 => "l1".into(),
            FocusNorm::L2 => "l2".into(),
            FocusNorm::TopK(k) => format!("top{k}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FocusResult {
    /// Nonzero weights, by weight descending then attribute ascending.
    pub weights: Vec<(AttrId, f64)>,
    pub norm: FocusNorm,
    pub score: f64,
    /// Set when the score is negative.
    pub anomalous: bool,
    /// Set when no member exhibits any attribute.
    pub no_focus: bool,
}

impl FocusResult {
    pub fn focus_attributes(&self) -> Vec<AttrId> {
        self.weights.iter().map(|&(f, _)| f).collect()
    }

    fn new(mut weights: Vec<(AttrId, f64)>, norm: FocusNorm, score: f64) -> Self {
        weights.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        FocusResult {
            weights,
            norm,
            score,
            anomalous: score < 0.0,
            no_focus: false,
        }
    }

    fn none(norm: FocusNorm) -> Self {
        FocusResult {
            weights: Vec::new(),
            norm,
            score: NO_FOCUS_SCORE,
            anomalous: true,
            no_focus: true,
        }
    }
}

/// Descending by score, ties by lowest attribute id.
fn by_score_desc(a: &(AttrId, f64), b: &(AttrId, f64)) -> Ordering {
    b.1.total_cmp(&a.1).then(a.0.cmp(&b.0))
}

fn argmax(scores: &[(AttrId, f64)]) -> Option<(AttrId, f64)> {
    scores
        .iter()
        .copied()
        .min_by(by_score_desc)
}

/// One-hot on the largest entry of `scores`.
pub fn l1_from_scores(scores: &[(AttrId, f64)]) -> FocusResult {
    match argmax(scores) {
        Some((f, x)) => FocusResult::new(vec![(f, 1.0)], FocusNorm::L1, x),
        None => FocusResult::none(FocusNorm::L1),
    }
}

/// `w = x₊ / ‖x₊‖₂`; falls back to the L1 solution when no entry is positive.
pub fn l2_from_scores(scores: &[(AttrId, f64)]) -> FocusResult {
    let norm = scores
        .iter()
        .filter(|e| e.1 > 0.0)
        .map(|e| e.1 * e.1)
        .sum::<f64>()
        .sqrt();
    if norm == 0.0 {
        let mut r = l1_from_scores(scores);
        r.norm = FocusNorm::L2;
        return r;
    }
    let weights = scores
        .iter()
        .filter(|e| e.1 > 0.0)
        .map(|&(f, x)| (f, x / norm))
        .collect();
    FocusResult::new(weights, FocusNorm::L2, norm)
}

/// Weight `1/k` on each of the `k` largest entries; `N̂` is their mean.
pub fn topk_from_scores(scores: &[(AttrId, f64)], k: usize, attribute_count: usize) -> Result<FocusResult> {
    if k == 0 || k > attribute_count {
        return Err(AmenError::InvalidTopK { k, d: attribute_count });
    }
    if scores.is_empty() {
        return Ok(FocusResult::none(FocusNorm::TopK(k)));
    }
    let mut ranked = scores.to_vec();
    ranked.sort_by(by_score_desc);
    let take = if k > ranked.len() {
        warn!(
            "top-k with k={k} but only {} supported attribute(s); using all",
            ranked.len()
        );
        ranked.len()
    } else {
        k
    };
    let chosen = &ranked[..take];
    let w = 1.0 / take as f64;
    let score = chosen.iter().map(|e| e.1).sum::<f64>() / take as f64;
    Ok(FocusResult::new(
        chosen.iter().map(|&(f, _)| (f, w)).collect(),
        FocusNorm::TopK(k),
        score,
    ))
}

fn nonempty(rv: &RelevanceVector) -> Result<()> {
    if rv.attribute_count() == 0 {
        Err(AmenError::EmptyRelevance)
    } else {
        Ok(())
    }
}

pub fn focus_l1(rv: &RelevanceVector) -> Result<FocusResult> {
    nonempty(rv)?;
    Ok(l1_from_scores(&rv.scores()))
}

pub fn focus_l2(rv: &RelevanceVector) -> Result<FocusResult> {
    nonempty(rv)?;
    Ok(l2_from_scores(&rv.scores()))
}

pub fn focus_topk(rv: &RelevanceVector, k: usize) -> Result<FocusResult> {
    nonempty(rv)?;
    topk_from_scores(&rv.scores(), k, rv.attribute_count())
}

pub fn focus(rv: &RelevanceVector, norm: FocusNorm) -> Result<FocusResult> {
    match norm {
        FocusNorm::L1 => focus_l1(rv),
        FocusNorm::L2 => focus_l2(rv),
        FocusNorm::TopK(k) => focus_topk(rv, k),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankedNeighborhood {
    pub id: String,
    /// 1 = most anomalous.
    pub rank: usize,
    pub size: usize,
    pub boundary_size: usize,
    pub result: std::result::Result<FocusResult, String>,
}

impl RankedNeighborhood {
    pub fn score(&self) -> Option<f64> {
        self.result.as_ref().ok().map(|r| r.score)
    }
}

/// Score a single neighborhood definition end to end.
pub fn score_neighborhood(
    graph: &AttributedGraph,
    def: &NeighborhoodDef,
    sim: SimilarityKind,
    norm: FocusNorm,
) -> (usize, usize, std::result::Result<FocusResult, String>) {
    let mut size = def.members.len();
    let mut boundary = 0;
    let result = boundary_of(graph, &def.members).and_then(|nb| {
        size = nb.size();
        boundary = nb.boundary().len();
        let rv = relevance_vector(graph, &nb, sim)?;
        focus(&rv, norm)
    });
    (size, boundary, result.map_err(|e| e.to_string()))
}

/// Score every neighborhood and sort ascending by `N̂` (most anomalous first).
///
/// Ties are broken by id. Neighborhoods that fail to score are kept, flagged
/// with their error, and placed after all scored ones.
pub fn rank_neighborhoods(
    graph: &AttributedGraph,
    neighborhoods: &[NeighborhoodDef],
    sim: SimilarityKind,
    norm: FocusNorm,
) -> Vec<RankedNeighborhood> {
    let mut ranked: Vec<RankedNeighborhood> = neighborhoods
        .par_iter()
        .map(|def| {
            let (size, boundary_size, result) = score_neighborhood(graph, def, sim, norm);
            RankedNeighborhood {
                id: def.id.clone(),
                rank: 0,
                size,
                boundary_size,
                result,
            }
        })
        .collect();
    ranked.sort_by(|a, b| match (a.score(), b.score()) {
        (Some(x), Some(y)) => x.total_cmp(&y).then_with(|| a.id.cmp(&b.id)),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => a.id.cmp(&b.id),
    });
    for (i, r) in ranked.iter_mut().enumerate() {
        r.rank = i + 1;
    }
    ranked
}
