//! Plant anomalies in synthetic planted-focus graphs and compare how well each
//! method ranks them, averaged over several seeds.
//!
//! cargo run --release --example perturbation_experiment -- [seeds] [mode]

use amen::eval::{planted_focus_graph, run_experiment, spearman, Method, PerturbationConfig, PerturbationMode, SyntheticConfig};

fn main() -> amen::Result<()> {
    let mut args = std::env::args().skip(1);
    let seeds: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(3);
    let modes = match args.next().as_deref() {
        Some("structure") => vec![PerturbationMode::Structure],
        Some("attribute") => vec![PerturbationMode::Attribute],
        Some("both") => vec![PerturbationMode::Both],
        _ => vec![PerturbationMode::Structure, PerturbationMode::Attribute, PerturbationMode::Both],
    };
    let methods = [Method::AmenL2, Method::AmenL1, Method::AvgDegree, Method::CutRatio, Method::Conductance];

    for mode in modes {
        let config = PerturbationConfig { mode, ..PerturbationConfig::default() };
        let grid = config.intensities.clone();
        let mut mean = vec![vec![0.0; grid.len()]; methods.len()];
        for seed in 0..seeds {
            let planted = planted_focus_graph(&SyntheticConfig { seed, ..SyntheticConfig::default() })?;
            let report = run_experiment(
                &planted.graph,
                &planted.communities,
                &PerturbationConfig { seed, ..config.clone() },
                &methods,
            )?;
            for (m, &method) in methods.iter().enumerate() {
                for (i, ap) in report.series(method).into_iter().enumerate() {
                    mean[m][i] += ap / seeds as f64;
                }
            }
        }
        println!("mode = {}", mode.name());
        print!("{:>12}", "intensity");
        for p in &grid {
            print!("{p:>7.2}");
        }
        println!("  spearman");
        for (m, method) in methods.iter().enumerate() {
            print!("{:>12}", method.name());
            for ap in &mean[m] {
                print!("{ap:>7.3}");
            }
            println!("  {:>8.3}", spearman(&grid, &mean[m]));
        }
        println!();
    }
    Ok(())
}
