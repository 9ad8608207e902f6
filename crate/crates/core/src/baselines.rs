//! Classical graph and neighborhood quality measures used as comparison baselines.

use crate::error::{AmenError, Result};
use crate::graph::{AttributeRow, AttributedGraph, Neighborhood, NodeId};
use crate::normality::SimilarityKind;

/// Community id per node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition(pub Vec<usize>);

/// Nominal category per node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeCategory(pub Vec<usize>);

/// One real value per node.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarAttribute(pub Vec<f64>);

impl ScalarAttribute {
    /// Mean of `x` over edge ends, `(1/2m) Σ_i k_i x_i`.
    pub fn edge_end_mean(&self, graph: &AttributedGraph) -> Result<f64> {
        check_len(graph, self.0.len())?;
        if graph.edge_count() == 0 {
            return Err(AmenError::UndefinedNullModel);
        }
        let s: f64 = self
            .0
            .iter()
            .enumerate()
            .map(|(i, x)| graph.degree(i as NodeId) as f64 * x)
            .sum();
        Ok(s / graph.two_m())
    }
}

fn check_len(graph: &AttributedGraph, len: usize) -> Result<()> {
    if len != graph.node_count() {
        return Err(AmenError::InvalidConfig(format!(
            "per-node vector has length {len}, graph has {} nodes",
            graph.node_count()
        )));
    }
    Ok(())
}

/// `(1/2m) Σ_ij (A_ij - k_i k_j / 2m) δ(c_i, c_j)`, summing over all ordered pairs.
fn same_group_mixing(graph: &AttributedGraph, groups: &[usize]) -> Result<f64> {
    check_len(graph, groups.len())?;
    if graph.edge_count() == 0 {
        return Err(AmenError::UndefinedNullModel);
    }
    let two_m = graph.two_m();
    let group_count = groups.iter().copied().max().map_or(0, |g| g + 1);
    let mut group_volume = vec![0.0; group_count];
    for (i, &g) in groups.iter().enumerate() {
        group_volume[g] += graph.degree(i as NodeId) as f64;
    }
    let intra = graph
        .edges()
        .filter(|&(u, v)| groups[u as usize] == groups[v as usize])
        .count() as f64;
    let expected: f64 = group_volume.iter().map(|k| k * k).sum::<f64>() / two_m;
    Ok((2.0 * intra - expected) / two_m)
}

pub fn modularity(graph: &AttributedGraph, partition: &Partition) -> Result<f64> {
    same_group_mixing(graph, &partition.0)
}

pub fn assortativity_nominal(graph: &AttributedGraph, cats: &NodeCategory) -> Result<f64> {
    same_group_mixing(graph, &cats.0)
}

/// `(1/2m) Σ_ij (A_ij - k_i k_j / 2m) x_i x_j`.
pub fn assortativity_scalar(graph: &AttributedGraph, attr: &ScalarAttribute) -> Result<f64> {
    let x = &attr.0;
    let mean = attr.edge_end_mean(graph)?;
    let two_m = graph.two_m();
    let observed: f64 = graph
        .edges()
        .map(|(u, v)| 2.0 * x[u as usize] * x[v as usize])
        .sum();
    // Σ_ij k_i k_j x_i x_j / 2m = (2m μ)² / 2m = 2m μ²
    Ok((observed - two_m * mean * mean) / two_m)
}

/// `2 |E(C)| / |C|`.
pub fn average_degree(nb: &Neighborhood) -> f64 {
    2.0 * nb.internal_edges().len() as f64 / nb.size() as f64
}

/// `cut(C) / (|C| (n - |C|))`.
pub fn cut_ratio(graph: &AttributedGraph, nb: &Neighborhood) -> Result<f64> {
    let outside = graph.node_count() - nb.size();
    if outside == 0 {
        return Err(AmenError::UndefinedMeasure {
            measure: "cut_ratio",
            reason: "neighborhood covers the whole graph",
        });
    }
    Ok(nb.cross_edges().len() as f64 / (nb.size() as f64 * outside as f64))
}

fn volume(graph: &AttributedGraph, nb: &Neighborhood) -> usize {
    nb.members().iter().map(|&i| graph.degree(i)).sum()
}

/// `cut(C) / min(vol(C), vol(G \ C))`.
pub fn conductance(graph: &AttributedGraph, nb: &Neighborhood) -> Result<f64> {
    let inside = volume(graph, nb);
    let outside = 2 * graph.edge_count() - inside;
    let denom = inside.min(outside);
    if denom == 0 {
        return Err(AmenError::UndefinedMeasure {
            measure: "conductance",
            reason: "one side has zero volume",
        });
    }
    Ok(nb.cross_edges().len() as f64 / denom as f64)
}

/// Fraction of members with fewer than half of their edges inside `C`.
pub fn flake_odf(graph: &AttributedGraph, nb: &Neighborhood) -> f64 {
    let mut internal = vec![0usize; nb.size()];
    for &(u, v) in nb.internal_edges() {
        internal[nb.member_position(u).expect("member")] += 1;
        internal[nb.member_position(v).expect("member")] += 1;
    }
    let weak = nb
        .members()
        .iter()
        .zip(&internal)
        .filter(|(&i, &inside)| 2 * inside < graph.degree(i))
        .count();
    weak as f64 / nb.size() as f64
}

/// Uniform-weight edge similarity and per-node weighted degree, computed once per graph.
#[derive(Clone, Debug)]
pub struct UniformEdgeWeights {
    sim: SimilarityKind,
    attribute_count: usize,
    strength: Vec<f64>,
    total: f64,
}

impl UniformEdgeWeights {
    pub fn new(graph: &AttributedGraph, sim: SimilarityKind) -> Self {
        let mut strength = vec![0.0; graph.node_count()];
        let d = graph.attribute_count();
        for (u, v) in graph.edges() {
            let w = uniform_similarity(graph.attributes(u), graph.attributes(v), d, sim);
            strength[u as usize] += w;
            strength[v as usize] += w;
        }
        let total = strength.iter().sum();
        UniformEdgeWeights {
            sim,
            attribute_count: d,
            strength,
            total,
        }
    }

    pub fn edge_weight(&self, graph: &AttributedGraph, u: NodeId, v: NodeId) -> f64 {
        uniform_similarity(graph.attributes(u), graph.attributes(v), self.attribute_count, self.sim)
    }

    pub fn strength(&self, node: NodeId) -> f64 {
        self.strength[node as usize]
    }

    pub fn total(&self) -> f64 {
        self.total
    }
}

/// End-node similarity with weight `1/d` on every attribute.
///
/// `BinaryMixed` uses the dot product here; an edge weight cannot depend on
/// which side of the cut it is examined from.
pub fn uniform_similarity(a: AttributeRow<'_>, b: AttributeRow<'_>, d: usize, sim: SimilarityKind) -> f64 {
    if d == 0 {
        return 0.0;
    }
    let (mut p, mut q) = (0, 0);
    let mut dot = 0.0;
    let mut differ = 0usize;
    while p < a.len() || q < b.len() {
        match (a.ids.get(p), b.ids.get(q)) {
            (Some(&f), Some(&g)) if f == g => {
                dot += a.values[p] * b.values[q];
                if a.values[p] != b.values[q] {
                    differ += 1;
                }
                p += 1;
                q += 1;
            }
            (Some(&f), Some(&g)) if f < g => {
                differ += 1;
                p += 1;
            }
            (Some(_), None) => {
                differ += 1;
                p += 1;
            }
            _ => {
                differ += 1;
                q += 1;
            }
        }
    }
    match sim {
        SimilarityKind::Dot | SimilarityKind::BinaryMixed => dot / d as f64,
        SimilarityKind::Delta => (d - differ) as f64 / d as f64,
    }
}

/// Normalized cut with similarity-weighted edges: `cut/vol(C) + cut/vol(G \ C)`.
pub fn aw_ncut_uniform_with(
    weights: &UniformEdgeWeights,
    graph: &AttributedGraph,
    nb: &Neighborhood,
) -> Result<f64> {
    let cut: f64 = nb
        .cross_edges()
        .iter()
        .map(|&(i, b)| weights.edge_weight(graph, i, b))
        .sum();
    let inside: f64 = nb.members().iter().map(|&i| weights.strength(i)).sum();
    let outside = weights.total() - inside;
    let tolerance = weights.total() * 1e-12;
    if inside <= tolerance || outside <= tolerance {
        return Err(AmenError::UndefinedMeasure {
            measure: "aw_ncut",
            reason: "one side has zero weighted volume",
        });
    }
    Ok(cut / inside + cut / outside)
}

pub fn aw_ncut_uniform(graph: &AttributedGraph, nb: &Neighborhood, sim: SimilarityKind) -> Result<f64> {
    if graph.edge_count() == 0 {
        return Err(AmenError::UndefinedNullModel);
    }
    aw_ncut_uniform_with(&UniformEdgeWeights::new(graph, sim), graph, nb)
}
