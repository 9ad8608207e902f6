//! Rank every egonet of a planted-focus graph by normality and show the most
//! anomalous ones together with the attributes they were judged on.
//!
//! cargo run --release --example rank_egonets -- [top]

use amen::cli::egonet_definitions;
use amen::eval::{planted_focus_graph, SyntheticConfig};
use amen::{rank_neighborhoods, FocusNorm, SimilarityKind};

fn main() -> amen::Result<()> {
    let top: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10);
    let planted = planted_focus_graph(&SyntheticConfig {
        communities: 20,
        ..SyntheticConfig::default()
    })?;
    let g = &planted.graph;
    let egonets = egonet_definitions(g);
    println!("{} nodes, {} edges, {} egonets", g.node_count(), g.edge_count(), egonets.len());

    let ranked = rank_neighborhoods(g, &egonets, SimilarityKind::Dot, FocusNorm::L2);
    for r in ranked.iter().take(top) {
        match &r.result {
            Ok(f) => {
                let focus: Vec<String> = f
                    .weights
                    .iter()
                    .take(3)
                    .map(|&(a, w)| format!("{}={w:.2}", g.attribute_name(a)))
                    .collect();
                println!(
                    "#{:<3} ego {:<5} |C| = {:<3} |B| = {:<4} N = {:+.4}  {}",
                    r.rank,
                    r.id,
                    r.size,
                    r.boundary_size,
                    f.score,
                    focus.join(" ")
                );
            }
            Err(e) => println!("#{:<3} ego {:<5} {e}", r.rank, r.id),
        }
    }
    Ok(())
}
