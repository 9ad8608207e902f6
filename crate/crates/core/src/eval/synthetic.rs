//! Planted-focus generator: dense communities whose members share a few attributes.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{AmenError, Result};
use crate::graph::{AttrId, AttributedGraph, GraphBuilder, NeighborhoodDef, NodeId};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub communities: usize,
    pub size_min: usize,
    pub size_max: usize,
    /// Intra-community edge probability, drawn per community from `[p_in_min, p_in_max]`.
    pub p_in_min: f64,
    pub p_in_max: f64,
    /// Expected number of edges per node leaving its community.
    pub inter_degree: f64,
    pub focus_min: usize,
    pub focus_max: usize,
    /// Probability a member lacks one of its community's focus attributes.
    pub noise: f64,
    pub background: usize,
    /// Probability any node carries a given background attribute.
    pub background_prob: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            communities: 100,
            size_min: 30,
            size_max: 100,
            p_in_min: 0.1,
            p_in_max: 0.3,
            inter_degree: 4.0,
            focus_min: 3,
            focus_max: 5,
            noise: 0.1,
            background: 50,
            background_prob: 0.05,
            seed: 0,
        }
    }
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(AmenError::InvalidConfig(m.to_string()));
        if self.communities < 2 {
            return bad("need at least 2 communities");
        }
        if self.size_min < 2 || self.size_min > self.size_max {
            return bad("community size range must satisfy 2 <= min <= max");
        }
        if self.focus_min == 0 || self.focus_min > self.focus_max {
            return bad("focus attribute range must satisfy 1 <= min <= max");
        }
        if self.p_in_min > self.p_in_max {
            return bad("p_in_min must not exceed p_in_max");
        }
        for (name, p) in [("p_in_min", self.p_in_min), ("p_in_max", self.p_in_max), ("noise", self.noise), ("background_prob", self.background_prob)] {
            if !(0.0..=1.0).contains(&p) {
                return bad(&format!("{name} must lie in [0, 1]"));
            }
        }
        if !(self.inter_degree >= 0.0 && self.inter_degree.is_finite()) {
            return bad("inter_degree must be finite and nonnegative");
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct PlantedGraph {
    pub graph: AttributedGraph,
    /// One definition per community, ids `c0`, `c1`, ...
    pub communities: Vec<NeighborhoodDef>,
    /// Planted focus attributes of each community.
    pub focus: Vec<Vec<AttrId>>,
}

/// Generate a graph with disjoint planted communities.
///
/// Community `c` owns a private block of focus attributes; each member
/// carries each of them with probability `1 - noise`. Background attributes
/// are shared noise across the whole graph. Inter-community edges are drawn
/// uniformly between nodes of different communities.
pub fn planted_focus_graph(config: &SyntheticConfig) -> Result<PlantedGraph> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let sizes: Vec<usize> = (0..config.communities)
        .map(|_| rng.gen_range(config.size_min..=config.size_max))
        .collect();
    let n: usize = sizes.iter().sum();
    let mut community_of = Vec::with_capacity(n);
    let mut starts = Vec::with_capacity(sizes.len());
    for (c, &s) in sizes.iter().enumerate() {
        starts.push(community_of.len());
        community_of.extend(std::iter::repeat_n(c, s));
    }

    let mut focus = Vec::with_capacity(config.communities);
    let mut next_attr: AttrId = 0;
    let mut names = Vec::new();
    for c in 0..config.communities {
        let count = rng.gen_range(config.focus_min..=config.focus_max);
        let attrs: Vec<AttrId> = (next_attr..next_attr + count as AttrId).collect();
        for j in 0..count {
            names.push(format!("c{c}_f{j}"));
        }
        next_attr += count as AttrId;
        focus.push(attrs);
    }
    let bg_start = next_attr;
    for j in 0..config.background {
        names.push(format!("bg{j}"));
    }

    let labels = (0..n).map(|i| i.to_string()).collect();
    let mut builder = GraphBuilder::new(labels, names);

    for (c, &s) in sizes.iter().enumerate() {
        let base = starts[c] as NodeId;
        let p_in = rng.gen_range(config.p_in_min..=config.p_in_max);
        for a in 0..s as NodeId {
            for b in a + 1..s as NodeId {
                if rng.gen_bool(p_in) {
                    builder.add_edge(base + a, base + b)?;
                }
            }
        }
    }

    let inter = (config.inter_degree * n as f64 / 2.0).round() as usize;
    let mut placed = 0;
    while placed < inter {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if community_of[u] != community_of[v] {
            builder.add_edge(u as NodeId, v as NodeId)?;
            placed += 1;
        }
    }

    for (node, &c) in community_of.iter().enumerate() {
        let mut row = Vec::new();
        for &f in &focus[c] {
            if !rng.gen_bool(config.noise) {
                row.push((f, 1.0));
            }
        }
        for j in 0..config.background as AttrId {
            if rng.gen_bool(config.background_prob) {
                row.push((bg_start + j, 1.0));
            }
        }
        builder.set_row(node as NodeId, row)?;
    }

    let graph = builder.build()?;
    let communities = (0..config.communities)
        .map(|c| {
            let mut members: Vec<NodeId> = (starts[c]..starts[c] + sizes[c]).map(|v| v as NodeId).collect();
            // shuffled so member order carries no information
            members.shuffle(&mut rng);
            NeighborhoodDef::new(format!("c{c}"), members)
        })
        .collect();
    Ok(PlantedGraph {
        graph,
        communities,
        focus,
    })
}
