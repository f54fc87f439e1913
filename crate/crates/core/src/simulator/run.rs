//! Condition runs: recommend, simulate clicks, collect metric outcomes.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ClickModel, RelevanceMode, ScenarioConfig};
use super::pipeline::Recommender;
use super::world::World;
use crate::domain::{Category, Condition, Interaction, InteractionKind, RankedList, UserId};
use crate::error::Result;
use crate::metrics::{build_tables, ListOutcome, Metric, MetricTable};
use crate::rerank::SeedLabel;

/// One emitted list with the context it was produced in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ListRecord {
    pub condition: Condition,
    pub category: Category,
    pub list: RankedList,
}

#[derive(Debug, Clone)]
pub struct ConditionRun {
    pub condition: Condition,
    /// Lists in (user, category) order.
    pub lists: Vec<ListRecord>,
    /// Impressions and clicks in (user, category, position) order.
    pub log: Vec<Interaction>,
    pub outcomes: Vec<ListOutcome>,
}

#[derive(Debug, Clone)]
pub struct Experiment {
    pub runs: Vec<ConditionRun>,
    pub tables: Vec<MetricTable>,
}

impl Experiment {
    pub fn table(&self, metric: Metric, k: usize) -> Option<&MetricTable> {
        self.tables.iter().find(|t| t.metric == metric && t.k == k)
    }

    pub fn outcomes(&self) -> impl Iterator<Item = &ListOutcome> {
        self.runs.iter().flat_map(|r| r.outcomes.iter())
    }
}

/// SplitMix64 finalizer; decorrelates nearby inputs.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the click stream for one (condition, user, category).
pub fn click_seed(seed: u64, condition: Condition, user: UserId, category: Category) -> u64 {
    [condition as u64, u64::from(user.0), category.index() as u64]
        .into_iter()
        .fold(mix(seed), |acc, part| mix(acc ^ part))
}

/// The latent-interest profile of a user's clicks: every clicked item's
/// category and dominant topic.
pub fn history_profile(world: &World, user: UserId) -> BTreeSet<SeedLabel> {
    let catalog = &world.observables.catalog;
    let mut out = BTreeSet::new();
    for ev in world
        .observables
        .history
        .iter()
        .filter(|e| e.user_id == user && e.kind == InteractionKind::Click)
    {
        if let Some(item) = catalog.get(ev.item_id) {
            out.insert(SeedLabel::Category(item.category));
        }
        if let Some(t) = catalog.topic(ev.item_id) {
            out.insert(SeedLabel::Topic(t.to_string()));
        }
    }
    out
}

/// Runs one condition for every user and category.
pub fn run_condition(
    world: &World,
    recommender: &Recommender<'_>,
    condition: Condition,
) -> Result<ConditionRun> {
    let cfg = &world.config;
    let catalog = &world.observables.catalog;
    let per_user: Vec<Result<Vec<(ListRecord, Vec<Interaction>, ListOutcome)>>> = (0..world
        .observables
        .users
        .len())
        .into_par_iter()
        .map(|u| {
            let user_id = world.observables.users[u].user_id;
            let history = history_profile(world, user_id);
            let view = recommender.view(u, condition);
            let mut out = Vec::with_capacity(Category::ALL.len());
            for category in Category::ALL {
                let rec = recommender.recommend(u, condition, category)?;
                let grade = |id| {
                    world
                        .truth
                        .relevance(u, catalog.embedding(id).expect("catalog item"))
                };
                let ranked: Vec<u8> = rec.shown.entries.iter().map(|e| grade(e.item_id)).collect();
                let clicked = simulate_clicks(cfg, condition, user_id, category, &ranked);

                let mut log = Vec::new();
                for (pos, (entry, click)) in rec.shown.entries.iter().zip(&clicked).enumerate() {
                    let ev = Interaction {
                        user_id,
                        item_id: entry.item_id,
                        kind: InteractionKind::Impression,
                        position: pos as u32 + 1,
                        tick: 0,
                    };
                    log.push(ev.clone());
                    if *click {
                        log.push(Interaction {
                            kind: InteractionKind::Click,
                            ..ev
                        });
                    }
                }

                let (ranked_grades, pool_grades) = match cfg.relevance_mode {
                    RelevanceMode::Graded => {
                        (ranked.clone(), rec.candidates.ids().map(grade).collect())
                    }
                    RelevanceMode::Binary => {
                        let g: Vec<u8> = clicked.iter().map(|c| u8::from(*c)).collect();
                        (g.clone(), g)
                    }
                };
                let outcome = ListOutcome {
                    condition,
                    category,
                    user_id,
                    ranked_grades,
                    pool_grades,
                    clicked,
                    seeds: rec
                        .shown
                        .entries
                        .iter()
                        .map(|e| recommender.seed_of(&view, e.item_id))
                        .collect(),
                    history: history.clone(),
                };
                out.push((
                    ListRecord {
                        condition,
                        category,
                        list: rec.shown,
                    },
                    log,
                    outcome,
                ));
            }
            Ok(out)
        })
        .collect();

    let mut run = ConditionRun {
        condition,
        lists: Vec::new(),
        log: Vec::new(),
        outcomes: Vec::new(),
    };
    for user in per_user {
        for (list, log, outcome) in user? {
            run.lists.push(list);
            run.log.extend(log);
            run.outcomes.push(outcome);
        }
    }
    Ok(run)
}

/// Click flags for a shown list under the configured click model.
pub fn simulate_clicks(
    cfg: &ScenarioConfig,
    condition: Condition,
    user: UserId,
    category: Category,
    grades: &[u8],
) -> Vec<bool> {
    match cfg.click_model {
        ClickModel::Deterministic => grades.iter().map(|g| *g >= 2).collect(),
        ClickModel::Bernoulli => {
            let mut rng =
                ChaCha8Rng::seed_from_u64(click_seed(cfg.seed, condition, user, category));
            grades
                .iter()
                .map(|g| rng.random::<f64>() < cfg.click_probabilities[usize::from(*g).min(3)])
                .collect()
        }
    }
}

/// Runs every configured condition and builds all metric tables.
pub fn run_experiment(world: &World) -> Result<Experiment> {
    run_conditions(world, &world.config.conditions)
}

pub fn run_conditions(world: &World, conditions: &[Condition]) -> Result<Experiment> {
    let recommender = Recommender::new(&world.observables, &world.config)?;
    let runs = conditions
        .iter()
        .map(|c| run_condition(world, &recommender, *c))
        .collect::<Result<Vec<_>>>()?;
    let outcomes: Vec<ListOutcome> = runs
        .iter()
        .flat_map(|r| r.outcomes.iter().cloned())
        .collect();
    let tables = build_tables(
        &outcomes,
        &crate::domain::Condition::ALL,
        &world.config.ks,
        &Metric::ALL,
    );
    Ok(Experiment { runs, tables })
}
