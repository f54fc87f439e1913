//! Generate a small synthetic world, recommend for one user under every
//! condition, then print the nDCG@5 table of a full run.

use kycrec::domain::{Category, Condition};
use kycrec::metrics::Metric;
use kycrec::simulator::{generate_world, run_experiment, Recommender, ScenarioConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ScenarioConfig {
        seed: 7,
        ..ScenarioConfig::default()
    };
    let world = generate_world(&cfg)?;
    let obs = &world.observables;
    println!(
        "world: {} users, {} items, {} accounts, {} history events",
        obs.users.len(),
        obs.catalog.len(),
        obs.graph.len(),
        obs.history.len()
    );

    let rec = Recommender::new(obs, &world.config)?;
    let user = 0;
    for cond in Condition::ALL {
        let r = rec.recommend(user, cond, Category::Tech)?;
        let shown: Vec<String> = r
            .shown
            .entries
            .iter()
            .map(|e| {
                let grade = world
                    .truth
                    .relevance(user, obs.catalog.embedding(e.item_id).unwrap());
                format!("{}(rel {grade})", e.item_id)
            })
            .collect();
        println!(
            "{:<28} {:>3} candidates -> {}",
            cond.heading(),
            r.candidates.len(),
            shown.join(" ")
        );
    }

    let experiment = run_experiment(&world)?;
    println!("\n{}", experiment.table(Metric::Ndcg, 5).unwrap().to_text());
    Ok(())
}
