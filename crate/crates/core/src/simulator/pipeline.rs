//! The recommender as the experiment runs it: recall, rank and re-rank for one
//! (user, condition, category). It is built from [`Observables`] alone.

use std::collections::BTreeMap;

use super::config::ScenarioConfig;
use super::world::Observables;
use crate::coldstart::cold_start_recall;
use crate::domain::{
    Category, Condition, ContentItem, InteractionKind, ItemId, KycTier, RankedList, SocialGraph,
    UserId, UserProfile,
};
use crate::embedding::{embed_user, UserContext};
use crate::error::{Error, Result};
use crate::propagation::propagate;
use crate::ranking::{rank, ExposureStats, RankingWeights, Scorer};
use crate::recall::{
    knn_recall, merge_candidates, popularity_recall, recency_recall, CandidateSet,
    CooccurrenceIndex, Hops, KnnIndex, SocialIndex, SourceTag,
};
use crate::rerank::{round_robin, seed_interest, SeedLabel};

/// What the pipeline produced for one user and category.
#[derive(Debug, Clone)]
pub struct Recommendation {
    pub candidates: CandidateSet,
    /// Score-ordered list before re-ranking.
    pub scored: RankedList,
    /// The list shown to the user.
    pub shown: RankedList,
}

/// Indexes shared by every condition run over one world.
pub struct Recommender<'w> {
    obs: &'w Observables,
    cfg: &'w ScenarioConfig,
    by_category: BTreeMap<Category, Vec<&'w ContentItem>>,
    knn: BTreeMap<Category, KnnIndex>,
    cooccurrence: CooccurrenceIndex,
    clicked: BTreeMap<UserId, Vec<ItemId>>,
    exposure: ExposureStats,
    social: SocialIndex,
}

impl<'w> Recommender<'w> {
    pub fn new(obs: &'w Observables, cfg: &'w ScenarioConfig) -> Result<Self> {
        let mut by_category: BTreeMap<Category, Vec<&ContentItem>> = BTreeMap::new();
        for it in obs.catalog.items() {
            by_category.entry(it.category).or_default().push(it);
        }
        let mut knn = BTreeMap::new();
        for c in Category::ALL {
            let entries = obs
                .catalog
                .embedded()
                .filter(|(it, _)| it.category == c)
                .map(|(it, e)| (it.item_id, e));
            knn.insert(c, KnnIndex::build(obs.space.dimension, entries)?);
        }
        let mut clicked: BTreeMap<UserId, Vec<ItemId>> = BTreeMap::new();
        for ev in obs
            .history
            .iter()
            .filter(|e| e.kind == InteractionKind::Click)
        {
            clicked.entry(ev.user_id).or_default().push(ev.item_id);
        }
        let vectors = propagate(&obs.graph, &cfg.propagation)?;
        Ok(Recommender {
            obs,
            cfg,
            by_category,
            knn,
            cooccurrence: CooccurrenceIndex::from_log(&obs.history),
            clicked,
            exposure: ExposureStats::from_log(obs.catalog.items(), &obs.history, &cfg.ranking),
            social: SocialIndex::new(
                obs.graph.with_interest_vectors(vectors)?,
                obs.catalog.items(),
                cfg.social.seed_neighbors,
            ),
        })
    }

    pub fn observables(&self) -> &Observables {
        self.obs
    }

    /// Items the user clicked before the experiment.
    pub fn history_clicks(&self, user: UserId) -> &[ItemId] {
        self.clicked.get(&user).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Graph whose account vectors have been through propagation.
    pub fn propagated_graph(&self) -> &SocialGraph {
        self.social.graph()
    }

    /// The profile as `condition` sees it.
    pub fn view(&self, user: usize, condition: Condition) -> UserProfile {
        self.obs.users[user].at_tier(condition.tier())
    }

    /// User vector for a tier view. Circles profiles read the propagated graph.
    pub fn user_vector(&self, view: &UserProfile) -> Result<Vec<f64>> {
        let ctx = UserContext {
            space: &self.obs.space,
            config: &self.cfg.embedding,
            prior: &self.obs.prior,
            graph: self.social.graph(),
            catalog: &self.obs.catalog,
        };
        embed_user(view, &ctx)
    }

    /// Seed interest of an item for a tier view.
    pub fn seed_of(&self, view: &UserProfile, id: ItemId) -> SeedLabel {
        let category = self
            .obs
            .catalog
            .get(id)
            .map_or(Category::Ad, |it| it.category);
        seed_interest(category, self.obs.catalog.topic(id), &view.declared_tags)
    }

    fn candidate_lists(
        &self,
        view: &UserProfile,
        condition: Condition,
        category: Category,
        user_vec: &[f64],
    ) -> Result<Vec<(SourceTag, Vec<ItemId>)>> {
        let caps = &self.cfg.caps;
        let items = self
            .by_category
            .get(&category)
            .map(Vec::as_slice)
            .unwrap_or(&[]);
        if items.is_empty() {
            return Ok(Vec::new());
        }
        let mut lists = Vec::new();
        if condition == Condition::Baseline {
            lists.push((
                SourceTag::Popularity,
                popularity_recall(items.iter().copied(), None, caps.popularity.max(1))?,
            ));
            lists.push((
                SourceTag::Recency,
                recency_recall(items.iter().copied(), caps.recency.max(1))?,
            ));
            return Ok(lists);
        }
        lists.push((
            SourceTag::Coldstart,
            cold_start_recall(
                view,
                &self.obs.prior,
                items.iter().copied(),
                caps.coldstart.max(1),
            )?,
        ));
        if view.kyc_tier >= KycTier::BasicKyc {
            lists.push((
                SourceTag::Knn,
                knn_recall(user_vec, &self.knn[&category], caps.knn)?,
            ));
        }
        if view.kyc_tier >= KycTier::AdvancedKyc {
            let history = self.history_clicks(view.user_id);
            let catalog = &self.obs.catalog;
            let co = self.cooccurrence.recall(history, caps.cooccur, |id| {
                catalog.get(id).is_some_and(|it| it.category == category)
            });
            lists.push((
                SourceTag::Cooccur,
                co.into_iter().map(|(id, _)| id).collect(),
            ));
        }
        if view.kyc_tier >= KycTier::AdvancedKycCircles {
            let hops = Hops::try_from(self.cfg.social.hops)?;
            let social =
                self.social
                    .recall(view, hops, Some(category), caps.social1.max(caps.social2));
            for tag in [SourceTag::Social1, SourceTag::Social2] {
                lists.push((
                    tag,
                    social
                        .iter()
                        .filter(|(_, t)| *t == tag)
                        .map(|(id, _)| *id)
                        .collect(),
                ));
            }
        }
        Ok(lists)
    }

    /// Runs recall, ranking and re-ranking for user index `user`.
    pub fn recommend(
        &self,
        user: usize,
        condition: Condition,
        category: Category,
    ) -> Result<Recommendation> {
        let profile = self
            .obs
            .users
            .get(user)
            .ok_or_else(|| Error::InvalidArgument(format!("no user at index {user}")))?;
        let view = profile.at_tier(condition.tier());
        let n = self.cfg.max_k();
        let personalized = condition != Condition::Baseline;
        let user_vec = if personalized {
            self.user_vector(&view)?
        } else {
            Vec::new()
        };
        let lists = self.candidate_lists(&view, condition, category, &user_vec)?;
        let candidates = merge_candidates(&lists, &self.cfg.caps, &view);

        let rerank = personalized && self.cfg.rerank.enabled;
        let depth = if rerank {
            self.cfg.rerank.depth.max(n)
        } else {
            n
        };
        let weights = RankingWeights {
            social: if condition == Condition::AdvancedKycCircles {
                self.cfg.ranking.social
            } else {
                0.0
            },
            ..self.cfg.ranking.clone()
        };
        let scorer = if personalized {
            Scorer::Personalized {
                user_vec: &user_vec,
            }
        } else {
            Scorer::PopularityRecency {
                recency_weight: self.cfg.baseline_recency_weight,
            }
        };
        let scored = if candidates.is_empty() {
            RankedList::empty(view.user_id, depth)
        } else {
            rank(
                view.user_id,
                &candidates,
                &self.obs.catalog,
                scorer,
                &self.exposure,
                &weights,
                depth,
            )?
        };
        let shown = if rerank {
            round_robin(&scored, n, |id| self.seed_of(&view, id))
        } else {
            let mut top = scored.clone();
            top.entries.truncate(n);
            top.cutoff = n;
            top
        };
        Ok(Recommendation {
            candidates,
            scored,
            shown,
        })
    }
}
