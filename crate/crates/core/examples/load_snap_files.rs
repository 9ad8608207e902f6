//! Load an edge list, an attribute file and a circles file from disk and rank
//! the circles. Defaults to the small fixture shipped in `data/`.
//!
//! cargo run --example load_snap_files -- [edges attrs circles]

use std::path::PathBuf;

use amen::graph::{load_graph_files, read_neighborhood_file, IngestOptions};
use amen::{rank_neighborhoods, FocusNorm, SimilarityKind};

fn main() -> amen::Result<()> {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data");
    let args: Vec<PathBuf> = std::env::args().skip(1).map(PathBuf::from).collect();
    let (edges, attrs, circles) = match &args[..] {
        [e, a, c] => (e.clone(), a.clone(), c.clone()),
        _ => (data.join("g4.edges"), data.join("g4b.attrs"), data.join("g4.circles")),
    };

    // binary fixtures are already in [0, 1]
    let options = IngestOptions {
        no_rescale: true,
        allow_isolated: true,
        ..IngestOptions::default()
    };
    let (g, report) = load_graph_files(&edges, &attrs, &options)?;
    println!(
        "{} nodes, {} edges, {} attributes ({} stored values); {} self-loops and {} duplicate edges dropped",
        g.node_count(),
        g.edge_count(),
        g.attribute_count(),
        g.attribute_nnz(),
        report.self_loops_dropped,
        report.duplicate_edges
    );

    let circles = read_neighborhood_file(&circles, &g)?;
    for r in rank_neighborhoods(&g, &circles, SimilarityKind::Dot, FocusNorm::L2) {
        match r.result {
            Ok(f) => println!("{:<10} N = {:+.6}{}", r.id, f.score, if f.anomalous { "  anomalous" } else { "" }),
            Err(e) => println!("{:<10} {e}", r.id),
        }
    }
    Ok(())
}
