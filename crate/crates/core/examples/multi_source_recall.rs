//! Candidate generation for one user and category: every recall source on its
//! own, then the capped, deduplicated union with per-item source tags.

use std::collections::BTreeMap;

use kycrec::coldstart::cold_start_recall;
use kycrec::domain::{Category, Condition, InteractionKind};
use kycrec::recall::{
    knn_recall, merge_candidates, popularity_recall, recency_recall, CooccurrenceIndex, Hops,
    KnnIndex, SocialIndex, SourceCaps, SourceTag,
};
use kycrec::simulator::{generate_world, Recommender, ScenarioConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let world = generate_world(&ScenarioConfig::default())?;
    let obs = &world.observables;
    let rec = Recommender::new(obs, &world.config)?;
    let category = Category::Sharing;
    let user = 5;
    let view = rec.view(user, Condition::AdvancedKycCircles);
    let user_vec = rec.user_vector(&view)?;

    let items: Vec<_> = obs
        .catalog
        .items()
        .iter()
        .filter(|it| it.category == category)
        .collect();
    let index = KnnIndex::build(
        obs.space.dimension,
        obs.catalog
            .embedded()
            .filter(|(it, _)| it.category == category)
            .map(|(it, e)| (it.item_id, e)),
    )?;
    let history: Vec<_> = obs
        .history
        .iter()
        .filter(|e| e.user_id == view.user_id && e.kind == InteractionKind::Click)
        .map(|e| e.item_id)
        .collect();
    let co = CooccurrenceIndex::from_log(&obs.history).recall(&history, 20, |id| {
        obs.catalog
            .get(id)
            .is_some_and(|it| it.category == category)
    });
    let social = SocialIndex::new(rec.propagated_graph().clone(), obs.catalog.items(), 3).recall(
        &view,
        Hops::Two,
        Some(category),
        50,
    );

    let lists = vec![
        (
            SourceTag::Popularity,
            popularity_recall(items.iter().copied(), None, 20)?,
        ),
        (
            SourceTag::Recency,
            recency_recall(items.iter().copied(), 20)?,
        ),
        (
            SourceTag::Coldstart,
            cold_start_recall(&view, &obs.prior, items.iter().copied(), 20)?,
        ),
        (SourceTag::Knn, knn_recall(&user_vec, &index, 50)?),
        (SourceTag::Cooccur, co.iter().map(|(id, _)| *id).collect()),
        (
            SourceTag::Social1,
            social
                .iter()
                .filter(|(_, t)| *t == SourceTag::Social1)
                .map(|(id, _)| *id)
                .collect(),
        ),
        (
            SourceTag::Social2,
            social
                .iter()
                .filter(|(_, t)| *t == SourceTag::Social2)
                .map(|(id, _)| *id)
                .collect(),
        ),
    ];
    for (tag, ids) in &lists {
        let grades: Vec<u8> = ids
            .iter()
            .map(|id| {
                world
                    .truth
                    .relevance(user, obs.catalog.embedding(*id).unwrap())
            })
            .collect();
        let mean = grades.iter().map(|g| f64::from(*g)).sum::<f64>() / grades.len().max(1) as f64;
        println!(
            "{:<11} {:>3} items, mean grade {mean:.2}",
            format!("{tag:?}"),
            ids.len()
        );
    }

    let merged = merge_candidates(&lists, &SourceCaps::default(), &view);
    let mut overlap: BTreeMap<usize, usize> = BTreeMap::new();
    for id in merged.ids() {
        *overlap
            .entry(merged.tags(id).map_or(0, |t| t.len()))
            .or_default() += 1;
    }
    println!(
        "\nunion: {} candidates; items by number of sources: {overlap:?}",
        merged.len()
    );
    Ok(())
}
