//! Interest propagation over a follow graph: the two-node closed form, the
//! per-round deltas on a generated graph, and the effect of damping.

use kycrec::domain::{Account, AccountId, AccountKind, SocialGraph};
use kycrec::propagation::{propagate, propagate_traced, PropagationConfig};
use kycrec::simulator::{generate_world, ScenarioConfig};
use kycrec::vector::cosine;

fn account(id: u32, v: Vec<f64>) -> Account {
    Account {
        account_id: AccountId(id),
        kind: AccountKind::Individual,
        interest_vector: v,
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // a follows b; b follows nobody and keeps its seed.
    let graph = SocialGraph::new(
        vec![account(0, vec![1.0, 0.0]), account(1, vec![0.0, 1.0])],
        &[(AccountId(0), AccountId(1))],
    )?;
    let cfg = PropagationConfig {
        damping: 0.3,
        iterations: 3,
    };
    let v = propagate(&graph, &cfg)?;
    println!(
        "two nodes, alpha 0.3: a = [{:.4}, {:.4}]  (expected [0.7, 0.3] before renormalizing)",
        v[0][0], v[0][1]
    );

    let world = generate_world(&ScenarioConfig::default())?;
    let g = &world.observables.graph;
    println!(
        "\ngenerated graph: {} accounts, {} edges",
        g.len(),
        g.edge_count()
    );
    for damping in [0.0, 0.3, 0.6, 0.9] {
        let run = propagate_traced(
            g,
            &PropagationConfig {
                damping,
                iterations: 6,
            },
        )?;
        let drift: f64 = g
            .accounts()
            .iter()
            .zip(&run.vectors)
            .map(|(a, v)| (1.0 - cosine(&a.interest_vector, v)).max(0.0))
            .sum::<f64>()
            / g.len() as f64;
        let deltas: Vec<String> = run.deltas.iter().map(|d| format!("{d:.4}")).collect();
        println!(
            "alpha {damping:.1}: mean drift {drift:.4}, round deltas [{}]",
            deltas.join(", ")
        );
    }
    Ok(())
}
