//! Text formats: edge lists, attribute files and neighborhood (circle) files.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use log::warn;
use serde::{Deserialize, Serialize};

use super::{AttrId, AttributedGraph, GraphBuilder, NeighborhoodDef, NodeId};
use crate::error::{AmenError, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttributeFormat {
    /// `node attribute value` per line.
    #[default]
    Sparse,
    /// CSV with a header row `node,<attr>,<attr>,...`.
    DenseCsv,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestOptions {
    pub attribute_format: AttributeFormat,
    /// Accept attribute rows for nodes that never appear in the edge list.
    pub allow_isolated: bool,
    /// Keep attribute columns that already lie in `[0, 1]` as they are.
    pub no_rescale: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub self_loops_dropped: usize,
    pub duplicate_edges: usize,
    pub isolated_nodes_added: usize,
    /// Attributes whose column was constant under rescaling; mapped to 0.
    pub constant_attributes: Vec<String>,
    pub rescaled_attributes: usize,
}

fn tokens(line: &str) -> impl Iterator<Item = &str> {
    line.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
}

fn content_lines(src: &str) -> impl Iterator<Item = (usize, &str)> {
    src.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            None
        } else {
            Some((i + 1, line))
        }
    })
}

struct Labels {
    names: Vec<String>,
    index: HashMap<String, NodeId>,
}

impl Labels {
    fn intern(&mut self, label: &str) -> NodeId {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = self.names.len() as NodeId;
        self.names.push(label.to_string());
        self.index.insert(label.to_string(), id);
        id
    }
}

/// Parse an edge list and an attribute file into a graph.
///
/// Node labels are assigned dense indices in order of first appearance in the
/// edge list; attribute names in order of first appearance in the attribute file.
pub fn load_graph(
    edge_source: &str,
    attribute_source: &str,
    options: &IngestOptions,
) -> Result<(AttributedGraph, IngestReport)> {
    load_named(edge_source, "edges", attribute_source, "attributes", options)
}

pub fn load_graph_files(
    edge_path: &Path,
    attribute_path: &Path,
    options: &IngestOptions,
) -> Result<(AttributedGraph, IngestReport)> {
    let edges = read_to_string(edge_path)?;
    let attrs = read_to_string(attribute_path)?;
    load_named(
        &edges,
        &edge_path.display().to_string(),
        &attrs,
        &attribute_path.display().to_string(),
        options,
    )
}

pub(crate) fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| AmenError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_named(
    edge_source: &str,
    edge_name: &str,
    attribute_source: &str,
    attr_name: &str,
    options: &IngestOptions,
) -> Result<(AttributedGraph, IngestReport)> {
    let mut report = IngestReport::default();
    let mut labels = Labels {
        names: Vec::new(),
        index: HashMap::new(),
    };
    let mut raw_edges = Vec::new();
    for (lineno, line) in content_lines(edge_source) {
        let toks: Vec<&str> = tokens(line).collect();
        if toks.len() != 2 {
            return Err(AmenError::parse(
                edge_name,
                lineno,
                format!("expected two node tokens, found {}", toks.len()),
            ));
        }
        let u = labels.intern(toks[0]);
        let v = labels.intern(toks[1]);
        raw_edges.push((u, v));
    }
    let edge_nodes = labels.names.len();

    let (attr_names, mut rows) = match options.attribute_format {
        AttributeFormat::Sparse => parse_sparse(attribute_source, attr_name, &mut labels, options)?,
        AttributeFormat::DenseCsv => parse_dense(attribute_source, attr_name, &mut labels, options)?,
    };
    report.isolated_nodes_added = labels.names.len() - edge_nodes;
    rows.resize(labels.names.len(), Vec::new());

    normalize_columns(&mut rows, &attr_names, options, &mut report);

    let mut builder = GraphBuilder::new(labels.names, attr_names);
    let mut seen = std::collections::HashSet::with_capacity(raw_edges.len());
    for (u, v) in raw_edges {
        let key = (u.min(v), u.max(v));
        if u != v && !seen.insert(key) {
            report.duplicate_edges += 1;
        }
        builder.add_edge(u, v)?;
    }
    report.self_loops_dropped = builder.self_loops_dropped();
    if report.self_loops_dropped > 0 {
        warn!("dropped {} self-loop(s)", report.self_loops_dropped);
    }
    for (node, row) in rows.into_iter().enumerate() {
        builder.set_row(node as NodeId, row)?;
    }
    Ok((builder.build()?, report))
}

type Rows = Vec<Vec<(AttrId, f64)>>;

fn lookup_node(
    labels: &mut Labels,
    token: &str,
    source: &str,
    lineno: usize,
    allow_isolated: bool,
) -> Result<NodeId> {
    match labels.index.get(token) {
        Some(&id) => Ok(id),
        None if allow_isolated => Ok(labels.intern(token)),
        None => Err(AmenError::parse(
            source,
            lineno,
            format!("node `{token}` does not appear in the edge list"),
        )),
    }
}

fn parse_value(token: &str, source: &str, lineno: usize) -> Result<f64> {
    let v: f64 = token
        .parse()
        .map_err(|_| AmenError::parse(source, lineno, format!("invalid value `{token}`")))?;
    if !v.is_finite() {
        return Err(AmenError::parse(source, lineno, "non-finite value"));
    }
    Ok(v)
}

fn parse_sparse(
    src: &str,
    source: &str,
    labels: &mut Labels,
    options: &IngestOptions,
) -> Result<(Vec<String>, Rows)> {
    let mut attr_names: Vec<String> = Vec::new();
    let mut attr_index: HashMap<String, AttrId> = HashMap::new();
    let mut rows: Rows = vec![Vec::new(); labels.names.len()];
    let mut seen = std::collections::HashSet::new();
    for (lineno, line) in content_lines(src) {
        let toks: Vec<&str> = tokens(line).collect();
        if toks.len() != 3 {
            return Err(AmenError::parse(
                source,
                lineno,
                format!("expected `node attribute value`, found {} token(s)", toks.len()),
            ));
        }
        let node = lookup_node(labels, toks[0], source, lineno, options.allow_isolated)?;
        let attr = match attr_index.get(toks[1]) {
            Some(&a) => a,
            None => {
                let a = attr_names.len() as AttrId;
                attr_names.push(toks[1].to_string());
                attr_index.insert(toks[1].to_string(), a);
                a
            }
        };
        let value = parse_value(toks[2], source, lineno)?;
        if node as usize >= rows.len() {
            rows.resize(node as usize + 1, Vec::new());
        }
        if !seen.insert((node, attr)) {
            return Err(AmenError::parse(
                source,
                lineno,
                format!("duplicate value for node `{}` attribute `{}`", toks[0], toks[1]),
            ));
        }
        rows[node as usize].push((attr, value));
    }
    Ok((attr_names, rows))
}

fn parse_dense(
    src: &str,
    source: &str,
    labels: &mut Labels,
    options: &IngestOptions,
) -> Result<(Vec<String>, Rows)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(src.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| AmenError::parse(source, 1, e.to_string()))?
        .clone();
    if header.is_empty() {
        return Err(AmenError::parse(source, 1, "empty header row"));
    }
    let attr_names: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut rows: Rows = vec![Vec::new(); labels.names.len()];
    let mut seen = std::collections::HashSet::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            AmenError::parse(source, line, e.to_string())
        })?;
        let lineno = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.len() != header.len() {
            return Err(AmenError::parse(
                source,
                lineno,
                format!("expected {} columns, found {}", header.len(), record.len()),
            ));
        }
        let node = lookup_node(labels, &record[0], source, lineno, options.allow_isolated)?;
        if !seen.insert(node) {
            return Err(AmenError::parse(
                source,
                lineno,
                format!("duplicate row for node `{}`", &record[0]),
            ));
        }
        let mut row = Vec::new();
        for (f, tok) in record.iter().skip(1).enumerate() {
            let v = parse_value(tok, source, lineno)?;
            if v != 0.0 {
                row.push((f as AttrId, v));
            }
        }
        if node as usize >= rows.len() {
            rows.resize(node as usize + 1, Vec::new());
        }
        rows[node as usize] = row;
    }
    Ok((attr_names, rows))
}

/// Min-max scale every attribute column to `[0, 1]`, counting absent entries as zeros.
fn normalize_columns(
    rows: &mut Rows,
    attr_names: &[String],
    options: &IngestOptions,
    report: &mut IngestReport,
) {
    let d = attr_names.len();
    let n = rows.len();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    let mut present = vec![0usize; d];
    for row in rows.iter() {
        for &(f, v) in row {
            let f = f as usize;
            lo[f] = lo[f].min(v);
            hi[f] = hi[f].max(v);
            present[f] += 1;
        }
    }
    let mut scale: Vec<Option<(f64, f64)>> = vec![None; d];
    for f in 0..d {
        if present[f] < n {
            lo[f] = lo[f].min(0.0);
            hi[f] = hi[f].max(0.0);
        }
        if present[f] == 0 {
            continue;
        }
        let in_range = lo[f] >= 0.0 && hi[f] <= 1.0;
        if options.no_rescale && in_range {
            continue;
        }
        if options.no_rescale {
            warn!(
                "attribute `{}` outside [0, 1] ({}..{}); rescaling despite no-rescale",
                attr_names[f], lo[f], hi[f]
            );
        }
        if hi[f] == lo[f] {
            warn!("attribute `{}` is constant; mapped to 0", attr_names[f]);
            report.constant_attributes.push(attr_names[f].clone());
        }
        scale[f] = Some((lo[f], hi[f]));
        report.rescaled_attributes += 1;
    }
    for row in rows.iter_mut() {
        for entry in row.iter_mut() {
            if let Some((lo, hi)) = scale[entry.0 as usize] {
                entry.1 = if hi > lo {
                    ((entry.1 - lo) / (hi - lo)).clamp(0.0, 1.0)
                } else {
                    0.0
                };
            }
        }
        row.retain(|&(_, v)| v != 0.0);
    }
}

/// Write `u v` label pairs, one undirected edge per line.
pub fn write_edge_list<W: Write>(graph: &AttributedGraph, mut out: W) -> std::io::Result<()> {
    for (u, v) in graph.edges() {
        writeln!(out, "{} {}", graph.node_label(u), graph.node_label(v))?;
    }
    Ok(())
}

/// Write stored attribute entries as `node attribute value` triples.
pub fn write_attributes<W: Write>(graph: &AttributedGraph, mut out: W) -> std::io::Result<()> {
    for u in 0..graph.node_count() as NodeId {
        for (f, v) in graph.attributes(u).iter() {
            writeln!(
                out,
                "{} {} {}",
                graph.node_label(u),
                graph.attribute_name(f),
                v
            )?;
        }
    }
    Ok(())
}

/// Parse a circles file: one neighborhood per line, `id member member ...`.
pub fn parse_neighborhoods(
    src: &str,
    source: &str,
    graph: &AttributedGraph,
) -> Result<Vec<NeighborhoodDef>> {
    let mut out = Vec::new();
    for (lineno, line) in content_lines(src) {
        let mut toks = tokens(line);
        let id = toks.next().expect("content lines are nonempty");
        let members = toks
            .map(|t| {
                graph.node_index(t).ok_or_else(|| {
                    AmenError::parse(source, lineno, format!("unknown member node `{t}`"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(NeighborhoodDef::new(id, members));
    }
    Ok(out)
}

pub fn read_neighborhood_file(path: &Path, graph: &AttributedGraph) -> Result<Vec<NeighborhoodDef>> {
    let src = read_to_string(path)?;
    parse_neighborhoods(&src, &path.display().to_string(), graph)
}

#[cfg(test)]
mod tests {
    use super::*;

    const G4_EDGES: &str = "0 1\n0 2\n1 2\n2 3\n";
    const G4_ATTRS: &str = "0 a0 1\n1 a0 1\n2 a0 1\n3 a0 1\n";

    fn raw() -> IngestOptions {
        IngestOptions {
            no_rescale: true,
            ..Default::default()
        }
    }

    #[test]
    fn loads_g4() {
        let (g, report) = load_graph(G4_EDGES, G4_ATTRS, &raw()).unwrap();
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.edge_count(), 4);
        assert_eq!(g.degrees(), vec![2, 2, 3, 1]);
        assert_eq!(g.attributes(3).to_vec(), vec![(0, 1.0)]);
        assert_eq!(report, IngestReport::default());
    }

    #[test]
    fn symmetrizes_and_dedups() {
        let (g, report) = load_graph("0 1\n1 0\n0 1\n", "", &raw()).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (2, 1));
        assert_eq!(report.duplicate_edges, 2);
    }

    #[test]
    fn drops_self_loops() {
        let (g, report) = load_graph("5 5\n5 6\n", "", &raw()).unwrap();
        assert_eq!(report.self_loops_dropped, 1);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn comments_and_commas() {
        let (g, _) = load_graph("# header\n0,1\n\n1\t2\n", "", &raw()).unwrap();
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn malformed_edge_line_reports_line_number() {
        let err = load_graph("0 1\n2\n", "", &raw()).unwrap_err();
        match err {
            AmenError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_attribute_node() {
        let err = load_graph("0 1\n", "0 a 1\n7 a 1\n", &raw()).unwrap_err();
        assert!(matches!(err, AmenError::Parse { line: 2, .. }));
        let (g, report) = load_graph(
            "0 1\n",
            "0 a 1\n7 a 1\n",
            &IngestOptions {
                allow_isolated: true,
                no_rescale: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.degree(2), 0);
        assert_eq!(report.isolated_nodes_added, 1);
    }

    #[test]
    fn min_max_rescaling_counts_implicit_zeros() {
        let (g, report) =
            load_graph("0 1\n1 2\n", "0 age 10\n1 age 30\n2 w 4\n", &Default::default()).unwrap();
        // age: nodes 0,1 present, node 2 implicit 0 → range [0, 30]
        assert_eq!(g.attributes(0).to_vec(), vec![(0, 10.0 / 30.0)]);
        assert_eq!(g.attributes(1).to_vec(), vec![(0, 1.0)]);
        assert_eq!(g.attributes(2).to_vec(), vec![(1, 1.0)]);
        assert_eq!(report.rescaled_attributes, 2);
    }

    #[test]
    fn constant_column_maps_to_zero() {
        let (g, report) = load_graph(G4_EDGES, G4_ATTRS, &Default::default()).unwrap();
        assert_eq!(report.constant_attributes, vec!["a0".to_string()]);
        assert_eq!(g.attribute_nnz(), 0);
    }

    #[test]
    fn no_rescale_still_scales_out_of_range_columns() {
        let (g, _) = load_graph("0 1\n", "0 a 0.5\n1 b 4\n", &raw()).unwrap();
        assert_eq!(g.attributes(0).to_vec(), vec![(0, 0.5)]);
        assert_eq!(g.attributes(1).to_vec(), vec![(1, 1.0)]);
    }

    #[test]
    fn dense_csv_attributes() {
        let opts = IngestOptions {
            attribute_format: AttributeFormat::DenseCsv,
            no_rescale: true,
            ..Default::default()
        };
        let (g, _) = load_graph(G4_EDGES, "node,a0,a1\n0,1,1\n1,1,1\n2,1,1\n3,0,1\n", &opts).unwrap();
        assert_eq!(g.attribute_names(), &["a0".to_string(), "a1".to_string()]);
        assert_eq!(g.attributes(3).to_vec(), vec![(1, 1.0)]);
        let err = load_graph(G4_EDGES, "node,a0\n0,1,1\n", &opts).unwrap_err();
        assert!(matches!(err, AmenError::Parse { line: 2, .. }));
    }

    #[test]
    fn circles_file() {
        let (g, _) = load_graph(G4_EDGES, G4_ATTRS, &raw()).unwrap();
        let circles = parse_neighborhoods("c0\t0\t1\t2\n# skip\nc1 3 2\n", "circles", &g).unwrap();
        assert_eq!(circles.len(), 2);
        assert_eq!(circles[0], NeighborhoodDef::new("c0", vec![0, 1, 2]));
        assert_eq!(circles[1].members, vec![3, 2]);
        let err = parse_neighborhoods("c0 0 9\n", "circles", &g).unwrap_err();
        assert!(matches!(err, AmenError::Parse { line: 1, .. }));
        assert!(parse_neighborhoods("", "circles", &g).unwrap().is_empty());
    }
}
