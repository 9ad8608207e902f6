//! Anomaly injection: rewiring internal edges and inheriting outside attribute rows.

use std::collections::HashSet;

use rand::seq::index::sample;
use rand::Rng;

use crate::error::{AmenError, Result};
use crate::graph::{AttributedGraph, Neighborhood, NeighborhoodDef, NodeId};

const MAX_REWIRE_ATTEMPTS: usize = 64;

fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(AmenError::InvalidConfig(format!("{name} = {p} outside [0, 1]")))
    }
}

/// Uniform node outside the sorted member list, in `O(|C|)`.
fn sample_outside<R: Rng + ?Sized>(graph: &AttributedGraph, members: &[NodeId], rng: &mut R) -> NodeId {
    let outside = graph.node_count() - members.len();
    let mut x = rng.gen_range(0..outside) as NodeId;
    for &c in members {
        if c <= x {
            x += 1;
        } else {
            break;
        }
    }
    x
}

/// Rewire each internal edge with probability `p`: one endpoint (chosen uniformly)
/// stays, the other is replaced by a uniformly sampled node outside `C`.
///
/// Candidates that would duplicate an existing edge are resampled; after
/// `MAX_REWIRE_ATTEMPTS` failures the edge is left in place.
pub fn perturb_structure<R: Rng + ?Sized>(
    graph: &AttributedGraph,
    nb: &Neighborhood,
    p: f64,
    rng: &mut R,
) -> Result<AttributedGraph> {
    check_probability("rewiring probability", p)?;
    if graph.node_count() == nb.size() {
        return Err(AmenError::NoOutsideNodes);
    }
    let mut edges: HashSet<(NodeId, NodeId)> = graph.edges().collect();
    let mut changed = false;
    for &(i, j) in nb.internal_edges() {
        if !rng.gen_bool(p) {
            continue;
        }
        let keep = if rng.gen_bool(0.5) { i } else { j };
        for _ in 0..MAX_REWIRE_ATTEMPTS {
            let v = sample_outside(graph, nb.members(), rng);
            let key = (keep.min(v), keep.max(v));
            if !edges.contains(&key) {
                edges.remove(&(i, j));
                edges.insert(key);
                changed = true;
                break;
            }
        }
    }
    if !changed {
        return Ok(graph.clone());
    }
    let mut sorted: Vec<_> = edges.into_iter().collect();
    sorted.sort_unstable();
    graph.with_edges(sorted)
}

/// Replace each member's attribute row, with probability `q`, by a copy of a
/// uniformly sampled outside node's row. Outside rows are untouched.
pub fn perturb_attributes<R: Rng + ?Sized>(
    graph: &AttributedGraph,
    nb: &Neighborhood,
    q: f64,
    rng: &mut R,
) -> Result<AttributedGraph> {
    check_probability("inheritance probability", q)?;
    if graph.node_count() == nb.size() {
        return Err(AmenError::NoOutsideNodes);
    }
    let mut replacements = Vec::new();
    for &i in nb.members() {
        if rng.gen_bool(q) {
            replacements.push((i, sample_outside(graph, nb.members(), rng)));
        }
    }
    if replacements.is_empty() {
        return Ok(graph.clone());
    }
    let mut rows: Vec<Vec<_>> = (0..graph.node_count() as NodeId)
        .map(|v| graph.attributes(v).to_vec())
        .collect();
    for (i, donor) in replacements {
        rows[i as usize] = graph.attributes(donor).to_vec();
    }
    graph.with_rows(rows)
}

/// Neighborhoods whose distinct member count lies in `[size_min, size_max]`,
/// and a seeded uniform sample of `⌈fraction · |eligible|⌉` of them.
///
/// Both lists hold indices into `neighborhoods`, ascending.
pub fn select_targets<R: Rng + ?Sized>(
    neighborhoods: &[NeighborhoodDef],
    anomaly_fraction: f64,
    size_min: usize,
    size_max: usize,
    rng: &mut R,
) -> Result<(Vec<usize>, Vec<usize>)> {
    check_probability("anomaly fraction", anomaly_fraction)?;
    let eligible: Vec<usize> = neighborhoods
        .iter()
        .enumerate()
        .filter(|(_, def)| {
            let mut m = def.members.clone();
            m.sort_unstable();
            m.dedup();
            (size_min..=size_max).contains(&m.len()) && m.len() >= 2
        })
        .map(|(i, _)| i)
        .collect();
    if eligible.is_empty() {
        return Err(AmenError::NoEligibleNeighborhoods {
            min: size_min,
            max: size_max,
        });
    }
    let count = ((anomaly_fraction * eligible.len() as f64) - 1e-9).ceil().max(0.0) as usize;
    let mut picked: Vec<usize> = sample(rng, eligible.len(), count.min(eligible.len()))
        .into_iter()
        .map(|k| eligible[k])
        .collect();
    picked.sort_unstable();
    Ok((eligible, picked))
}
