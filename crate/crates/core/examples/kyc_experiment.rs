//! The five-condition experiment averaged over several seeds, followed by the
//! directional checks: nDCG@5 rising with KYC depth, Circles' nDCG@1 uplift
//! over Baseline per category, and the Advanced -> Circles nDCG@3 gain.
//!
//! ```text
//! cargo run --release --example kyc_experiment -- [seeds] [first-seed] [scenario.toml]
//! ```

use kycrec::domain::{Category, Condition};
use kycrec::metrics::{mean_tables, Metric};
use kycrec::simulator::{generate_world, run_experiment, ScenarioConfig};

const OURS: [Condition; 4] = [
    Condition::NoKyc,
    Condition::BasicKyc,
    Condition::AdvancedKyc,
    Condition::AdvancedKycCircles,
];

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let seeds: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(5);
    let first: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0);
    let base = match args.next() {
        Some(path) => ScenarioConfig::load(path.as_ref())?,
        None => ScenarioConfig::default(),
    };

    let mut per_seed = Vec::new();
    for seed in first..first + seeds {
        let cfg = ScenarioConfig {
            seed,
            ..base.clone()
        };
        let world = generate_world(&cfg)?;
        per_seed.push(run_experiment(&world)?.tables);
    }
    let tables = mean_tables(&per_seed);
    let cell = |metric, k, cat, cond| {
        tables
            .iter()
            .find(|t| t.metric == metric && t.k == k)
            .and_then(|t| t.cell(cat, cond))
            .unwrap_or(f64::NAN)
    };

    println!("mean over {seeds} seeds starting at {first}\n");
    for metric in Metric::ALL {
        for t in tables.iter().filter(|t| t.metric == metric) {
            println!("{}", t.to_text());
        }
    }

    println!("nDCG@5 steps across the four KYC tiers (smallest step per category)");
    for cat in Category::ALL {
        let min_step = OURS
            .windows(2)
            .map(|w| cell(Metric::Ndcg, 5, cat, w[1]) - cell(Metric::Ndcg, 5, cat, w[0]))
            .fold(f64::INFINITY, f64::min);
        println!("  {:<8} {min_step:+.3}", cat.label());
    }
    println!("nDCG@1 Circles / Baseline");
    for cat in Category::ALL {
        let ratio = cell(Metric::Ndcg, 1, cat, Condition::AdvancedKycCircles)
            / cell(Metric::Ndcg, 1, cat, Condition::Baseline);
        println!("  {:<8} {ratio:.2}x", cat.label());
    }
    println!("nDCG@3 gain Advanced -> Circles");
    for cat in Category::ALL {
        let gain = cell(Metric::Ndcg, 3, cat, Condition::AdvancedKycCircles)
            - cell(Metric::Ndcg, 3, cat, Condition::AdvancedKyc);
        println!("  {:<8} {gain:+.3}", cat.label());
    }
    Ok(())
}
