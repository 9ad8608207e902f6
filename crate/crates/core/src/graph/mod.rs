//! Immutable attributed graphs.
//!
//! Adjacency and attributes are both stored row-compressed: each node owns a
//! sorted slice of neighbor ids and a sorted slice of `(attribute, value)`
//! entries. Attribute rows are sparse; an attribute absent from a row has
//! value `0`, and explicit zeros are never stored.

mod io;
mod neighborhood;

use std::collections::HashMap;

use crate::error::{AmenError, Result};

pub use io::{
    load_graph, load_graph_files, parse_neighborhoods, read_neighborhood_file, write_attributes,
    write_edge_list, AttributeFormat, IngestOptions, IngestReport,
};
pub use neighborhood::{boundary_of, egonet_of, Neighborhood, NeighborhoodDef};

pub type NodeId = u32;
pub type AttrId = u32;

/// Borrowed view of one node's sparse attribute row.
#[derive(Clone, Copy, Debug)]
pub struct AttributeRow<'a> {
    pub ids: &'a [AttrId],
    pub values: &'a [f64],
}

impl<'a> AttributeRow<'a> {
    pub fn get(&self, attr: AttrId) -> f64 {
        match self.ids.binary_search(&attr) {
            Ok(pos) => self.values[pos],
            Err(_) => 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (AttrId, f64)> + 'a {
        self.ids.iter().copied().zip(self.values.iter().copied())
    }

    pub fn to_vec(&self) -> Vec<(AttrId, f64)> {
        self.iter().collect()
    }
}

#[derive(Clone, Debug)]
pub struct AttributedGraph {
    adj_offsets: Vec<usize>,
    adj: Vec<NodeId>,
    attr_offsets: Vec<usize>,
    attr_ids: Vec<AttrId>,
    attr_values: Vec<f64>,
    edge_count: usize,
    node_labels: Vec<String>,
    label_index: HashMap<String, NodeId>,
    attr_names: Vec<String>,
}

impl AttributedGraph {
    /// Build a graph over nodes labelled `"0".."n-1"` and attributes `"a0".."a{d-1}"`.
    pub fn from_parts(
        node_count: usize,
        attribute_count: usize,
        edges: &[(NodeId, NodeId)],
        rows: Vec<Vec<(AttrId, f64)>>,
    ) -> Result<Self> {
        let labels = (0..node_count).map(|i| i.to_string()).collect();
        let names = (0..attribute_count).map(|f| format!("a{f}")).collect();
        let mut builder = GraphBuilder::new(labels, names);
        for &(u, v) in edges {
            builder.add_edge(u, v)?;
        }
        for (node, row) in rows.into_iter().enumerate() {
            builder.set_row(node as NodeId, row)?;
        }
        builder.build()
    }

    pub fn node_count(&self) -> usize {
        self.node_labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn attribute_count(&self) -> usize {
        self.attr_names.len()
    }

    /// Number of stored (nonzero) attribute entries.
    pub fn attribute_nnz(&self) -> usize {
        self.attr_ids.len()
    }

    pub fn neighbors(&self, node: NodeId) -> &[NodeId] {
        let i = node as usize;
        &self.adj[self.adj_offsets[i]..self.adj_offsets[i + 1]]
    }

    pub fn degree(&self, node: NodeId) -> usize {
        let i = node as usize;
        self.adj_offsets[i + 1] - self.adj_offsets[i]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.node_count() as NodeId).map(|v| self.degree(v)).collect()
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// All undirected edges as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        (0..self.node_count() as NodeId).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    pub fn attributes(&self, node: NodeId) -> AttributeRow<'_> {
        let i = node as usize;
        let range = self.attr_offsets[i]..self.attr_offsets[i + 1];
        AttributeRow {
            ids: &self.attr_ids[range.clone()],
            values: &self.attr_values[range],
        }
    }

    pub fn node_label(&self, node: NodeId) -> &str {
        &self.node_labels[node as usize]
    }

    pub fn node_labels(&self) -> &[String] {
        &self.node_labels
    }

    pub fn node_index(&self, label: &str) -> Option<NodeId> {
        self.label_index.get(label).copied()
    }

    pub fn attribute_name(&self, attr: AttrId) -> &str {
        &self.attr_names[attr as usize]
    }

    pub fn attribute_names(&self) -> &[String] {
        &self.attr_names
    }

    pub(crate) fn check_node(&self, node: NodeId) -> Result<()> {
        if (node as usize) < self.node_count() {
            Ok(())
        } else {
            Err(AmenError::NodeOutOfRange(node as usize))
        }
    }

    /// Configuration-model probability `k_i k_j / 2m`, optionally clamped to 1.
    pub fn expected_edge_probability(&self, i: NodeId, j: NodeId, clamped: bool) -> Result<f64> {
        self.check_node(i)?;
        self.check_node(j)?;
        if self.edge_count == 0 {
            return Err(AmenError::UndefinedNullModel);
        }
        let p = self.degree(i) as f64 * self.degree(j) as f64 / self.two_m();
        Ok(if clamped { p.min(1.0) } else { p })
    }

    pub(crate) fn two_m(&self) -> f64 {
        2.0 * self.edge_count as f64
    }

    /// True when every stored attribute value is exactly 0 or 1.
    pub fn is_binary(&self) -> bool {
        self.attr_values.iter().all(|&v| v == 0.0 || v == 1.0)
    }

    /// Whether the subgraph induced on `members` is connected.
    pub fn induces_connected(&self, members: &[NodeId]) -> bool {
        let mut sorted = members.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.is_empty() {
            return true;
        }
        let mut seen = vec![false; sorted.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut reached = 1;
        while let Some(pos) = stack.pop() {
            for &v in self.neighbors(sorted[pos]) {
                if let Ok(q) = sorted.binary_search(&v) {
                    if !seen[q] {
                        seen[q] = true;
                        reached += 1;
                        stack.push(q);
                    }
                }
            }
        }
        reached == sorted.len()
    }

    /// Same nodes and structure, new attribute rows.
    pub fn with_rows(&self, rows: Vec<Vec<(AttrId, f64)>>) -> Result<Self> {
        let mut builder = GraphBuilder::new(self.node_labels.clone(), self.attr_names.clone());
        for (u, v) in self.edges() {
            builder.add_edge(u, v)?;
        }
        for (node, row) in rows.into_iter().enumerate() {
            builder.set_row(node as NodeId, row)?;
        }
        builder.build()
    }

    /// Same nodes and attributes, new edge set.
    pub fn with_edges(&self, edges: impl IntoIterator<Item = (NodeId, NodeId)>) -> Result<Self> {
        let mut builder = GraphBuilder::new(self.node_labels.clone(), self.attr_names.clone());
        for (u, v) in edges {
            builder.add_edge(u, v)?;
        }
        builder.attr_offsets = Some((
            self.attr_offsets.clone(),
            self.attr_ids.clone(),
            self.attr_values.clone(),
        ));
        builder.build()
    }

    /// Check every structural invariant; returns a description of the first violation.
    pub fn validate(&self) -> std::result::Result<(), String> {
        let n = self.node_count();
        let mut degree_sum = 0usize;
        for u in 0..n as NodeId {
            let nbrs = self.neighbors(u);
            degree_sum += nbrs.len();
            if nbrs.windows(2).any(|w| w[0] >= w[1]) {
                return Err(format!("neighbors of {u} not strictly sorted"));
            }
            for &v in nbrs {
                if v == u {
                    return Err(format!("self-loop at {u}"));
                }
                if (v as usize) >= n || !self.has_edge(v, u) {
                    return Err(format!("asymmetric edge {u}-{v}"));
                }
            }
            let row = self.attributes(u);
            if row.ids.windows(2).any(|w| w[0] >= w[1]) {
                return Err(format!("attribute row of {u} not strictly sorted"));
            }
            for (f, x) in row.iter() {
                if (f as usize) >= self.attribute_count() || !(0.0..=1.0).contains(&x) {
                    return Err(format!("node {u} attribute {f} value {x} invalid"));
                }
            }
        }
        if degree_sum != 2 * self.edge_count {
            return Err(format!("degree sum {degree_sum} != 2m = {}", 2 * self.edge_count));
        }
        Ok(())
    }
}

/// Accumulates edges and attribute rows over a fixed node and attribute universe.
#[derive(Debug)]
pub struct GraphBuilder {
    node_labels: Vec<String>,
    attr_names: Vec<String>,
    adjacency: Vec<Vec<NodeId>>,
    rows: Vec<Vec<(AttrId, f64)>>,
    attr_offsets: Option<(Vec<usize>, Vec<AttrId>, Vec<f64>)>,
    self_loops: usize,
}

impl GraphBuilder {
    pub fn new(node_labels: Vec<String>, attr_names: Vec<String>) -> Self {
        let n = node_labels.len();
        GraphBuilder {
            node_labels,
            attr_names,
            adjacency: vec![Vec::new(); n],
            rows: vec![Vec::new(); n],
            attr_offsets: None,
            self_loops: 0,
        }
    }

    /// Adds an undirected edge. Self-loops are dropped and counted; returns whether the edge was kept.
    pub fn add_edge(&mut self, u: NodeId, v: NodeId) -> Result<bool> {
        let n = self.node_labels.len();
        for x in [u, v] {
            if x as usize >= n {
                return Err(AmenError::NodeOutOfRange(x as usize));
            }
        }
        if u == v {
            self.self_loops += 1;
            return Ok(false);
        }
        self.adjacency[u as usize].push(v);
        self.adjacency[v as usize].push(u);
        Ok(true)
    }

    pub fn set_row(&mut self, node: NodeId, row: Vec<(AttrId, f64)>) -> Result<()> {
        if node as usize >= self.rows.len() {
            return Err(AmenError::NodeOutOfRange(node as usize));
        }
        self.rows[node as usize] = row;
        Ok(())
    }

    pub fn self_loops_dropped(&self) -> usize {
        self.self_loops
    }

    pub fn build(self) -> Result<AttributedGraph> {
        let n = self.node_labels.len();
        let d = self.attr_names.len();
        let mut adj_offsets = Vec::with_capacity(n + 1);
        adj_offsets.push(0);
        let mut adj = Vec::new();
        for mut nbrs in self.adjacency {
            nbrs.sort_unstable();
            nbrs.dedup();
            adj.extend_from_slice(&nbrs);
            adj_offsets.push(adj.len());
        }
        let edge_count = adj.len() / 2;

        let (attr_offsets, attr_ids, attr_values) = match self.attr_offsets {
            Some(parts) => parts,
            None => {
                let mut offsets = Vec::with_capacity(n + 1);
                offsets.push(0);
                let mut ids = Vec::new();
                let mut values = Vec::new();
                for (node, mut row) in self.rows.into_iter().enumerate() {
                    row.sort_by_key(|&(f, _)| f);
                    for w in row.windows(2) {
                        if w[0].0 == w[1].0 {
                            return Err(AmenError::InvalidConfig(format!(
                                "node {node} has attribute {} twice",
                                w[0].0
                            )));
                        }
                    }
                    for (f, x) in row {
                        if f as usize >= d {
                            return Err(AmenError::InvalidConfig(format!(
                                "attribute id {f} out of range (d = {d})"
                            )));
                        }
                        if !(0.0..=1.0).contains(&x) {
                            return Err(AmenError::InvalidConfig(format!(
                                "node {node} attribute {f} value {x} outside [0, 1]"
                            )));
                        }
                        if x != 0.0 {
                            ids.push(f);
                            values.push(x);
                        }
                    }
                    offsets.push(ids.len());
                }
                (offsets, ids, values)
            }
        };

        let label_index = self
            .node_labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i as NodeId))
            .collect();

        Ok(AttributedGraph {
            adj_offsets,
            adj,
            attr_offsets,
            attr_ids,
            attr_values,
            edge_count,
            node_labels: self.node_labels,
            label_index,
            attr_names: self.attr_names,
        })
    }
}
