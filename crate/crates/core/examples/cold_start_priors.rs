//! Cold start: the demographic prior table, largest-remainder apportionment of
//! recall slots over categories, and popular-item recall with and without
//! demographics.

use std::collections::BTreeMap;

use kycrec::coldstart::{apportion, cold_start_recall};
use kycrec::domain::{Category, KycTier};
use kycrec::simulator::{generate_world, ScenarioConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let world = generate_world(&ScenarioConfig::default())?;
    let obs = &world.observables;
    let prior = &obs.prior;
    println!(
        "prior: {} age bands, {} buckets",
        prior.age_bands.len(),
        prior.buckets.len()
    );

    let weights = BTreeMap::from([
        (Category::Ad, 0.1),
        (Category::News, 0.45),
        (Category::Tech, 0.45),
    ]);
    let caps = Category::ALL.iter().map(|c| (*c, 100)).collect();
    println!(
        "apportion 10 over {weights:?}\n  -> {:?}",
        apportion(&weights, &caps, 10)
    );
    let tight = BTreeMap::from([
        (Category::Ad, 100),
        (Category::News, 2),
        (Category::Gossip, 100),
        (Category::Sharing, 100),
        (Category::Tech, 100),
    ]);
    println!(
        "with News capped at 2\n  -> {:?}",
        apportion(&weights, &tight, 10)
    );

    let older = obs
        .users
        .iter()
        .position(|p| p.demographics.as_ref().is_some_and(|d| d.age >= 45))
        .unwrap_or(1);
    for u in [0, older] {
        let profile = &obs.users[u];
        let d = profile.demographics.as_ref().unwrap();
        println!(
            "\nuser {} (age {}, occupation {}):",
            profile.user_id, d.age, d.occupation
        );
        for tier in [KycTier::NoKyc, KycTier::BasicKyc] {
            let view = profile.at_tier(tier);
            let ids = cold_start_recall(&view, prior, obs.catalog.items(), 20)?;
            let mut mix: BTreeMap<Category, usize> = BTreeMap::new();
            for id in ids {
                *mix.entry(obs.catalog.get(id).unwrap().category)
                    .or_default() += 1;
            }
            println!("  {tier:?}: {mix:?}");
        }
    }
    Ok(())
}
