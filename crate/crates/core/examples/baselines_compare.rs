//! Score planted communities and a few random node sets with the classical
//! community-quality measures and with normality, side by side.

use amen::baselines::{average_degree, aw_ncut_uniform, conductance, cut_ratio, flake_odf, modularity, Partition};
use amen::eval::{planted_focus_graph, SyntheticConfig};
use amen::focus::focus_l2;
use amen::graph::NodeId;
use amen::{boundary_of, relevance_vector, SimilarityKind};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> amen::Result<()> {
    let planted = planted_focus_graph(&SyntheticConfig {
        communities: 10,
        seed: 5,
        ..SyntheticConfig::default()
    })?;
    let g = &planted.graph;

    let mut groups = vec![0; g.node_count()];
    for (c, def) in planted.communities.iter().enumerate() {
        for &v in &def.members {
            groups[v as usize] = c;
        }
    }
    println!("modularity of the planted partition: {:.4}", modularity(g, &Partition(groups))?);

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut sets: Vec<(String, Vec<NodeId>)> =
        planted.communities.iter().take(5).map(|d| (d.id.clone(), d.members.clone())).collect();
    let mut all: Vec<NodeId> = (0..g.node_count() as NodeId).collect();
    for r in 0..3 {
        all.shuffle(&mut rng);
        sets.push((format!("random{r}"), all[..50].to_vec()));
    }

    println!("{:<8} {:>7} {:>9} {:>11} {:>9} {:>8} {:>9}", "set", "avg_deg", "cut_ratio", "conductance", "flake_odf", "aw_ncut", "normality");
    for (name, members) in sets {
        let nb = boundary_of(g, &members)?;
        let n_hat = focus_l2(&relevance_vector(g, &nb, SimilarityKind::Dot)?)?.score;
        println!(
            "{name:<8} {:>7.3} {:>9.4} {:>11.4} {:>9.3} {:>8.4} {:>+9.4}",
            average_degree(&nb),
            cut_ratio(g, &nb)?,
            conductance(g, &nb)?,
            flake_odf(g, &nb),
            aw_ncut_uniform(g, &nb, SimilarityKind::Dot)?,
            n_hat
        );
    }
    Ok(())
}
