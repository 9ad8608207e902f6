//! Compare the L1, L2 and top-k focus vectors of the planted communities with
//! the attributes that were actually planted.

use amen::eval::{planted_focus_graph, SyntheticConfig};
use amen::focus::{focus, FocusNorm};
use amen::{boundary_of, relevance_vector, SimilarityKind};

fn main() -> amen::Result<()> {
    let planted = planted_focus_graph(&SyntheticConfig {
        communities: 8,
        seed: 2,
        ..SyntheticConfig::default()
    })?;
    let g = &planted.graph;
    let mut hits = 0;
    for (def, planted_focus) in planted.communities.iter().zip(&planted.focus) {
        let nb = boundary_of(g, &def.members)?;
        let rv = relevance_vector(g, &nb, SimilarityKind::Dot)?;
        println!("{} ({} members, planted {})", def.id, nb.size(), planted_focus.len());
        for norm in [FocusNorm::L1, FocusNorm::L2, FocusNorm::TopK(planted_focus.len())] {
            let f = focus(&rv, norm)?;
            let names: Vec<String> = f
                .weights
                .iter()
                .take(6)
                .map(|&(a, w)| format!("{}={w:.2}", g.attribute_name(a)))
                .collect();
            let more = f.weights.len().saturating_sub(6);
            let tail = if more > 0 { format!(" (+{more} more)") } else { String::new() };
            println!("  {:>5}  N = {:+.4}  {}{tail}", norm.name(), f.score, names.join(" "));
            if norm == FocusNorm::L2 {
                // the heaviest weights should all be planted ones
                hits += f.focus_attributes().iter().take(planted_focus.len()).filter(|a| planted_focus.contains(a)).count();
            }
        }
    }
    let planted_total: usize = planted.focus.iter().map(Vec::len).sum();
    println!("top L2 weights hit {hits} of {planted_total} planted attributes");
    Ok(())
}
