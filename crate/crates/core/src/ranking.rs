//! Candidate scoring: relevance + social boost + exploration bonus.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::catalog::Catalog;
use crate::domain::{
    compose_total, ContentItem, Interaction, InteractionKind, ItemId, RankedEntry, RankedList,
    UserId,
};
use crate::error::{Error, Result};
use crate::recall::{CandidateSet, SourceTag};
use crate::vector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RankingWeights {
    pub relevance: f64,
    pub social: f64,
    pub exploration: f64,
    /// Items with fewer impressions than this percentile of the corpus are underexposed.
    pub exposure_percentile: f64,
    /// Items at or above this popularity percentile count as high quality.
    pub quality_percentile: f64,
}

impl Default for RankingWeights {
    fn default() -> Self {
        RankingWeights {
            relevance: 1.0,
            social: 0.25,
            exploration: 0.15,
            exposure_percentile: 20.0,
            quality_percentile: 50.0,
        }
    }
}

impl RankingWeights {
    pub fn validate(&self) -> Result<()> {
        for (name, w) in [
            ("relevance", self.relevance),
            ("social", self.social),
            ("exploration", self.exploration),
        ] {
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::config(
                    format!("ranking.{name}"),
                    "must be finite and >= 0",
                ));
            }
        }
        for (name, p) in [
            ("exposure_percentile", self.exposure_percentile),
            ("quality_percentile", self.quality_percentile),
        ] {
            if !(p > 0.0 && p <= 100.0) {
                return Err(Error::config(
                    format!("ranking.{name}"),
                    "must lie in (0, 100]",
                ));
            }
        }
        Ok(())
    }
}

/// Nearest-rank percentile of `values` (`p` in `(0, 100]`); 0 for an empty input.
pub fn percentile(values: &[u64], p: f64) -> u64 {
    if values.is_empty() {
        return 0;
    }
    let mut v = values.to_vec();
    v.sort_unstable();
    let rank = ((p / 100.0) * v.len() as f64).ceil() as usize;
    v[rank.clamp(1, v.len()) - 1]
}

/// Impression counts and the two exploration thresholds.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExposureStats {
    impressions: HashMap<ItemId, u64>,
    /// τ: strictly fewer impressions than this is underexposed.
    pub exposure_threshold: u64,
    /// q: popularity at or above this is high quality.
    pub quality_floor: u64,
}

impl ExposureStats {
    pub fn new(
        impressions: HashMap<ItemId, u64>,
        exposure_threshold: u64,
        quality_floor: u64,
    ) -> Self {
        ExposureStats {
            impressions,
            exposure_threshold,
            quality_floor,
        }
    }

    /// Counts impressions in `log` and derives both thresholds from the corpus
    /// distributions (items never shown count as zero impressions).
    pub fn from_log<'a>(
        items: impl IntoIterator<Item = &'a ContentItem>,
        log: &[Interaction],
        weights: &RankingWeights,
    ) -> Self {
        let mut impressions: HashMap<ItemId, u64> = HashMap::new();
        for ev in log.iter().filter(|e| e.kind == InteractionKind::Impression) {
            *impressions.entry(ev.item_id).or_insert(0) += 1;
        }
        let mut counts = Vec::new();
        let mut pops = Vec::new();
        for it in items {
            counts.push(impressions.get(&it.item_id).copied().unwrap_or(0));
            pops.push(it.popularity);
        }
        ExposureStats {
            exposure_threshold: percentile(&counts, weights.exposure_percentile),
            quality_floor: percentile(&pops, weights.quality_percentile),
            impressions,
        }
    }

    pub fn impressions(&self, id: ItemId) -> u64 {
        self.impressions.get(&id).copied().unwrap_or(0)
    }

    /// High-quality but underexposed.
    pub fn deserves_exploration(&self, item: &ContentItem) -> bool {
        self.impressions(item.item_id) < self.exposure_threshold
            && item.popularity >= self.quality_floor
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreBreakdown {
    pub relevance: f64,
    pub social_boost: f64,
    pub exploration_bonus: f64,
    pub total: f64,
}

/// Scores one candidate.
///
/// * relevance = `w_rel · cos(user_vec, embedding)`, 0 for a zero user vector
/// * social boost = `w_social` if tagged `Social1`, else `w_social / 2` if tagged `Social2`, else 0
/// * exploration bonus = `β` if the item is underexposed and at or above the quality floor
pub fn score(
    user_vec: &[f64],
    item: &ContentItem,
    embedding: &[f64],
    tags: &BTreeSet<SourceTag>,
    exposure: &ExposureStats,
    weights: &RankingWeights,
) -> Result<ScoreBreakdown> {
    if user_vec.len() != embedding.len() {
        return Err(Error::DimensionMismatch {
            expected: embedding.len(),
            found: user_vec.len(),
        });
    }
    let relevance = weights.relevance * vector::cosine(user_vec, embedding);
    let social_boost = if tags.contains(&SourceTag::Social1) {
        weights.social
    } else if tags.contains(&SourceTag::Social2) {
        weights.social / 2.0
    } else {
        0.0
    };
    let exploration_bonus = if exposure.deserves_exploration(item) {
        weights.exploration
    } else {
        0.0
    };
    Ok(ScoreBreakdown {
        relevance,
        social_boost,
        exploration_bonus,
        total: compose_total(relevance, social_boost, exploration_bonus),
    })
}

/// How candidates are scored.
#[derive(Debug, Clone, Copy)]
pub enum Scorer<'a> {
    /// Cosine relevance plus social and exploration terms.
    Personalized { user_vec: &'a [f64] },
    /// Unpersonalized: `w_rel · ((1 - r) · pop / max_pop + r · created / max_created)`
    /// over the candidate set; no social or exploration terms.
    PopularityRecency { recency_weight: f64 },
}

/// Scores every candidate, sorts by total (ties by ascending id) and keeps the top `n`.
pub fn rank(
    user: UserId,
    candidates: &CandidateSet,
    catalog: &Catalog,
    scorer: Scorer<'_>,
    exposure: &ExposureStats,
    weights: &RankingWeights,
    n: usize,
) -> Result<RankedList> {
    if n == 0 {
        return Err(Error::InvalidArgument("rank needs N >= 1".into()));
    }
    let mut entries = Vec::with_capacity(candidates.len());
    match scorer {
        Scorer::Personalized { user_vec } => {
            for (id, tags) in &candidates.candidates {
                let item = catalog.get(*id).ok_or(Error::UnknownItem(*id))?;
                let emb = catalog.embedding(*id).ok_or(Error::UnknownItem(*id))?;
                let s = score(user_vec, item, emb, tags, exposure, weights)?;
                entries.push(RankedEntry::new(
                    *id,
                    s.relevance,
                    s.social_boost,
                    s.exploration_bonus,
                ));
            }
        }
        Scorer::PopularityRecency { recency_weight } => {
            let mut items = Vec::with_capacity(candidates.len());
            for id in candidates.ids() {
                items.push(catalog.get(id).ok_or(Error::UnknownItem(id))?);
            }
            let max_pop = items
                .iter()
                .map(|it| it.popularity)
                .max()
                .unwrap_or(0)
                .max(1) as f64;
            let max_t = items
                .iter()
                .map(|it| it.created_at)
                .max()
                .unwrap_or(0)
                .max(1) as f64;
            for it in items {
                let pop = it.popularity as f64 / max_pop;
                let rec = it.created_at as f64 / max_t;
                let rel = weights.relevance * ((1.0 - recency_weight) * pop + recency_weight * rec);
                entries.push(RankedEntry::new(it.item_id, rel, 0.0, 0.0));
            }
        }
    }
    entries.sort_by(crate::domain::score_order);
    entries.truncate(n);
    Ok(RankedList {
        user_id: user,
        cutoff: n,
        order: crate::domain::ListOrder::Score,
        entries,
    })
}
