//! How cross-edges are exonerated: the penalty of an edge shrinks as the
//! boundary node's degree grows, and a boundary node that shares none of the
//! focus attributes costs nothing.

use amen::graph::{AttributedGraph, NodeId};
use amen::normality::{cross_edge_penalty, external_separability};
use amen::{boundary_of, SimilarityKind};

/// A triangle 0-1-2 whose member 0 links to a hub of growing degree.
fn hub_graph(hub_degree: usize) -> AttributedGraph {
    let hub = 3;
    let mut edges = vec![(0, 1), (0, 2), (1, 2), (0, hub)];
    for leaf in 0..hub_degree - 1 {
        edges.push((hub, 4 + leaf as NodeId));
    }
    let n = 4 + hub_degree - 1;
    let rows = (0..n).map(|_| vec![(0, 1.0)]).collect();
    AttributedGraph::from_parts(n, 1, &edges, rows).unwrap()
}

fn main() -> amen::Result<()> {
    println!("hub degree  2m   penalty");
    for k in [1, 2, 4, 8, 16, 32] {
        let g = hub_graph(k);
        println!("{k:>10}  {:>3}  {:.4}", 2 * g.edge_count(), cross_edge_penalty(&g, 0, 3)?);
    }

    // The triangle is focused on a0; pendant node 3 either shares it or not.
    let edges = [(0, 1), (0, 2), (1, 2), (2, 3)];
    for (label, pendant) in [("shares a0", vec![(0, 1.0), (1, 1.0)]), ("lacks a0", vec![(1, 1.0)])] {
        let rows = vec![vec![(0, 1.0)], vec![(0, 1.0)], vec![(0, 1.0)], pendant];
        let g = AttributedGraph::from_parts(4, 2, &edges, rows)?;
        let nb = boundary_of(&g, &[0, 1, 2])?;
        for sim in [SimilarityKind::BinaryMixed, SimilarityKind::Dot] {
            let e = external_separability(&g, &nb, &[1.0, 0.0], sim)?;
            println!("pendant {label:<9} {:>12}: E = {e:+.4}", sim.name());
        }
    }
    Ok(())
}
