//! Distribution summaries over all egonets: how many attributes each
//! neighborhood finds relevant and how normality is spread.

use amen::cli::egonet_definitions;
use amen::eval::{analyze_distributions, planted_focus_graph, SyntheticConfig};
use amen::SimilarityKind;

fn main() -> amen::Result<()> {
    let planted = planted_focus_graph(&SyntheticConfig {
        communities: 15,
        ..SyntheticConfig::default()
    })?;
    let egonets = egonet_definitions(&planted.graph);
    let t = analyze_distributions(&planted.graph, &egonets, SimilarityKind::Dot);
    println!("analyzed {} egonets, skipped {}", t.analyzed, t.skipped);

    println!("\npositive entries  P(X <= x)");
    for &(x, p) in t.positive_count_cdf.points.iter().take(12) {
        println!("{x:>16}  {p:.3}");
    }
    println!("\nk  mean x(f) of k-th positive  neighborhoods");
    for r in t.kth_positive.iter().take(8) {
        println!("{:<2} {:>26.4}  {}", r.k, r.mean_x, r.neighborhoods);
    }
    let median = |pts: &[(f64, f64)]| pts.iter().rev().find(|p| p.1 >= 0.5).map_or(f64::NAN, |p| p.0);
    println!("\nmedian normality: L1 {:.4}, L2 {:.4}", median(&t.normality_l1_ccdf.points), median(&t.normality_l2_ccdf.points));
    Ok(())
}
