//! How the user vector changes as KYC depth grows: each tier's vector is
//! compared with the user's hidden latent (cosine) and with the previous tier.

use kycrec::domain::{Condition, KycTier};
use kycrec::simulator::{generate_world, Recommender, ScenarioConfig};
use kycrec::vector::cosine;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let world = generate_world(&ScenarioConfig::default())?;
    let rec = Recommender::new(&world.observables, &world.config)?;
    let tiers = [
        Condition::NoKyc,
        Condition::BasicKyc,
        Condition::AdvancedKyc,
        Condition::AdvancedKycCircles,
    ];

    let profile = &world.observables.users[3];
    println!(
        "user {}: declared {:?}",
        profile.user_id, profile.declared_tags
    );
    println!("  bio {:?}", profile.bio_keywords);
    println!(
        "  {} authored items, {} followed accounts\n",
        profile.authored_items.len(),
        profile.followed.len()
    );

    let mut mean = [0.0; 4];
    let n = world.observables.users.len();
    for u in 0..n {
        for (i, cond) in tiers.iter().enumerate() {
            let v = rec.user_vector(&rec.view(u, *cond))?;
            mean[i] += cosine(&v, &world.truth.latents[u]) / n as f64;
        }
    }
    let mut prev: Option<Vec<f64>> = None;
    for (i, cond) in tiers.iter().enumerate() {
        let view = rec.view(3, *cond);
        let v = rec.user_vector(&view)?;
        let tier: KycTier = view.kyc_tier;
        println!(
            "{:<28} fields {}  cos(latent) user 3 {:+.3}  all users {:+.3}  cos(prev tier) {}",
            cond.heading(),
            view.observable_field_count(),
            cosine(&v, &world.truth.latents[3]),
            mean[i],
            prev.as_ref()
                .map_or("  -  ".into(), |p| format!("{:+.3}", cosine(p, &v)))
        );
        debug_assert_eq!(tier, cond.tier());
        prev = Some(v);
    }
    Ok(())
}
