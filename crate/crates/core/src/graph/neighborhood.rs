use serde::{Deserialize, Serialize};

use super::{AttributedGraph, NodeId};
use crate::error::{AmenError, Result};

/// A named member set, as read from a circles file or produced by a generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeighborhoodDef {
    pub id: String,
    pub members: Vec<NodeId>,
}

impl NeighborhoodDef {
    pub fn new(id: impl Into<String>, members: Vec<NodeId>) -> Self {
        NeighborhoodDef {
            id: id.into(),
            members,
        }
    }
}

/// Member set `C` together with everything derived from it against one graph.
///
/// `internal_edges` holds each internal edge once as `(u, v)` with `u < v`;
/// `cross_edges` holds `(member, boundary)` pairs. All lists are sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Neighborhood {
    members: Vec<NodeId>,
    boundary: Vec<NodeId>,
    internal_edges: Vec<(NodeId, NodeId)>,
    cross_edges: Vec<(NodeId, NodeId)>,
}

impl Neighborhood {
    pub fn members(&self) -> &[NodeId] {
        &self.members
    }

    pub fn boundary(&self) -> &[NodeId] {
        &self.boundary
    }

    pub fn internal_edges(&self) -> &[(NodeId, NodeId)] {
        &self.internal_edges
    }

    pub fn cross_edges(&self) -> &[(NodeId, NodeId)] {
        &self.cross_edges
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.members.binary_search(&node).is_ok()
    }

    /// Position of `node` in the sorted member list.
    pub fn member_position(&self, node: NodeId) -> Option<usize> {
        self.members.binary_search(&node).ok()
    }
}

/// Derive the boundary, internal edges and cross-edges of a member set.
///
/// Work is proportional to the total degree of the members; the rest of the graph is never scanned.
pub fn boundary_of(graph: &AttributedGraph, members: &[NodeId]) -> Result<Neighborhood> {
    let mut members = members.to_vec();
    members.sort_unstable();
    members.dedup();
    for &v in &members {
        graph.check_node(v)?;
    }
    if members.len() < 2 {
        return Err(AmenError::DegenerateNeighborhood(format!(
            "{} distinct member(s), need at least 2",
            members.len()
        )));
    }

    let mut internal_edges = Vec::new();
    let mut cross_edges = Vec::new();
    let mut boundary = Vec::new();
    for &u in &members {
        for &v in graph.neighbors(u) {
            if members.binary_search(&v).is_ok() {
                if u < v {
                    internal_edges.push((u, v));
                }
            } else {
                cross_edges.push((u, v));
                boundary.push(v);
            }
        }
    }
    boundary.sort_unstable();
    boundary.dedup();

    Ok(Neighborhood {
        members,
        boundary,
        internal_edges,
        cross_edges,
    })
}

/// The ego together with all of its neighbors.
pub fn egonet_of(graph: &AttributedGraph, ego: NodeId) -> Result<Neighborhood> {
    graph.check_node(ego)?;
    if graph.degree(ego) == 0 {
        return Err(AmenError::DegenerateNeighborhood(format!(
            "ego {} has degree 0",
            graph.node_label(ego)
        )));
    }
    let mut members = Vec::with_capacity(graph.degree(ego) + 1);
    members.push(ego);
    members.extend_from_slice(graph.neighbors(ego));
    boundary_of(graph, &members)
}
