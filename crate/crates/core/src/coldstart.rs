//! Demographic priors for users without behavioral history.
//!
//! A prior bucket is an (age band, occupation class) pair holding a weight
//! distribution over category labels and topic labels. Buckets feed both the
//! basic-tier user vector and the cold-start candidate source.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::domain::{Category, ContentItem, ItemId, KycTier, UserProfile};
use crate::embedding::EmbeddingSpace;
use crate::error::{Error, Result};
use crate::recall::popularity_order;
use crate::vector::{self, normalize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgeBand {
    pub min: u8,
    pub max: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorBucket {
    /// Index into [`DemographicPrior::age_bands`].
    pub age_band: usize,
    pub occupation: u16,
    /// Label -> weight. Labels naming a category (`"Tech"`) are category
    /// weights; every other label is a topic.
    pub weights: BTreeMap<String, f64>,
}

impl PriorBucket {
    pub fn category_weights(&self) -> BTreeMap<Category, f64> {
        self.weights
            .iter()
            .filter_map(|(l, w)| Category::parse(l).map(|c| (c, *w)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemographicPrior {
    pub age_bands: Vec<AgeBand>,
    pub buckets: Vec<PriorBucket>,
}

impl DemographicPrior {
    /// Checks that every bucket is a distribution (nonnegative, sums to 1 ± 1e-9)
    /// and references a declared age band.
    pub fn validate(&self) -> Result<()> {
        for (n, b) in self.buckets.iter().enumerate() {
            if b.age_band >= self.age_bands.len() {
                return Err(Error::config(
                    format!("cold_start.prior.buckets[{n}].age_band"),
                    "no such age band",
                ));
            }
            if b.weights.values().any(|w| !w.is_finite() || *w < 0.0) {
                return Err(Error::config(
                    format!("cold_start.prior.buckets[{n}].weights"),
                    "weights must be finite and >= 0",
                ));
            }
            let sum: f64 = b.weights.values().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::config(
                    format!("cold_start.prior.buckets[{n}].weights"),
                    format!("weights sum to {sum}, expected 1"),
                ));
            }
        }
        Ok(())
    }

    pub fn age_band_of(&self, age: u8) -> Option<usize> {
        self.age_bands
            .iter()
            .position(|b| (b.min..=b.max).contains(&age))
    }

    pub fn bucket(&self, age: u8, occupation: u16) -> Option<&PriorBucket> {
        let band = self.age_band_of(age)?;
        self.buckets
            .iter()
            .find(|b| b.age_band == band && b.occupation == occupation)
    }

    /// The bucket's distribution for `profile`, or the uniform category
    /// distribution when the bucket is not covered (logged).
    pub fn weights_for(&self, profile: &UserProfile) -> Result<BTreeMap<String, f64>> {
        let d = profile.demographics.as_ref().ok_or_else(|| {
            Error::InvalidArgument(format!("{} has no demographics", profile.user_id))
        })?;
        match self.bucket(d.age, d.occupation) {
            Some(b) => Ok(b.weights.clone()),
            None => {
                log::warn!(
                    "{}: no prior bucket for age {} occupation {}, using uniform",
                    profile.user_id,
                    d.age,
                    d.occupation
                );
                Ok(uniform_categories())
            }
        }
    }
}

pub fn uniform_categories() -> BTreeMap<String, f64> {
    let w = 1.0 / Category::ALL.len() as f64;
    Category::ALL
        .iter()
        .map(|c| (c.label().to_string(), w))
        .collect()
}

/// `normalize(Σ weight(label) · basis(label))` for the user's bucket.
/// Labels unknown to `space` are skipped.
pub fn demographic_prior_vector(
    profile: &UserProfile,
    prior: &DemographicPrior,
    space: &EmbeddingSpace,
) -> Result<Vec<f64>> {
    let weights = prior.weights_for(profile)?;
    let mut acc = vec![0.0; space.dimension];
    for (label, w) in &weights {
        if let Some(b) = space.label_vector(label) {
            vector::add_scaled(&mut acc, b, *w);
        }
    }
    Ok(normalize(&acc))
}

/// Largest-remainder apportionment of `k` slots over categories.
///
/// Only categories with capacity take part. Weights are renormalized over the
/// positive-weight categories; ties on the fractional remainder go to the
/// lexicographically smaller category name. Allocations are capped at capacity
/// and the overflow is re-apportioned among the rest. If every positive-weight
/// category is exhausted, leftover slots spread uniformly over the remaining
/// categories. The result always sums to `min(k, total capacity)`.
pub fn apportion(
    weights: &BTreeMap<Category, f64>,
    capacity: &BTreeMap<Category, usize>,
    k: usize,
) -> BTreeMap<Category, usize> {
    let mut alloc: BTreeMap<Category, usize> = capacity.keys().map(|c| (*c, 0)).collect();
    let total_cap: usize = capacity.values().sum();
    let mut remaining = k.min(total_cap);
    let mut uniform_phase = false;

    while remaining > 0 {
        let open: Vec<Category> = capacity
            .iter()
            .filter(|(c, cap)| alloc[c] < **cap)
            .map(|(c, _)| *c)
            .collect();
        let mut active: Vec<(Category, f64)> = if uniform_phase {
            open.iter().map(|c| (*c, 1.0)).collect()
        } else {
            open.iter()
                .filter_map(|c| weights.get(c).filter(|w| **w > 0.0).map(|w| (*c, *w)))
                .collect()
        };
        if active.is_empty() {
            if uniform_phase || open.is_empty() {
                break;
            }
            uniform_phase = true;
            continue;
        }
        // name order for remainder ties
        active.sort_by(|a, b| a.0.label().cmp(b.0.label()));
        let total_w: f64 = active.iter().map(|(_, w)| w).sum();
        let quotas: Vec<f64> = active
            .iter()
            .map(|(_, w)| remaining as f64 * w / total_w)
            .collect();
        let mut share: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
        let mut left = remaining.saturating_sub(share.iter().sum::<usize>());
        let mut order: Vec<usize> = (0..active.len()).collect();
        order.sort_by(|&a, &b| {
            let fa = quotas[a] - quotas[a].floor();
            let fb = quotas[b] - quotas[b].floor();
            fb.total_cmp(&fa).then(a.cmp(&b))
        });
        for &i in &order {
            if left == 0 {
                break;
            }
            share[i] += 1;
            left -= 1;
        }
        let mut given = 0;
        for ((c, _), s) in active.iter().zip(share) {
            let room = capacity[c] - alloc[c];
            let take = s.min(room).min(remaining - given);
            *alloc.get_mut(c).unwrap() += take;
            given += take;
        }
        // capped categories drop out of the open set on the next pass
        remaining -= given;
    }
    alloc
}

/// Popular items chosen without behavioral history.
///
/// From `BasicKyc` up, `k` is apportioned over categories by the user's prior
/// bucket and each category contributes its most popular items; the result is
/// ordered by popularity (ties by id). At `NoKyc` the categories take turns in
/// a fixed rotation, one popular item each.
pub fn cold_start_recall<'a>(
    profile: &UserProfile,
    prior: &DemographicPrior,
    items: impl IntoIterator<Item = &'a ContentItem>,
    k: usize,
) -> Result<Vec<ItemId>> {
    if k == 0 {
        return Err(Error::InvalidArgument(
            "cold_start_recall needs k >= 1".into(),
        ));
    }
    let mut by_cat: BTreeMap<Category, Vec<&ContentItem>> = BTreeMap::new();
    for it in items {
        by_cat.entry(it.category).or_default().push(it);
    }
    for list in by_cat.values_mut() {
        list.sort_by(|a, b| popularity_order(a, b));
    }

    if profile.kyc_tier == KycTier::NoKyc {
        let mut out = Vec::with_capacity(k);
        let mut round = 0;
        while out.len() < k {
            let mut took = false;
            for list in by_cat.values() {
                if let Some(it) = list.get(round) {
                    if out.len() < k {
                        out.push(it.item_id);
                        took = true;
                    }
                }
            }
            if !took {
                break;
            }
            round += 1;
        }
        return Ok(out);
    }

    let weights = prior.weights_for(profile)?;
    let cat_weights: BTreeMap<Category, f64> = weights
        .iter()
        .filter_map(|(l, w)| Category::parse(l).map(|c| (c, *w)))
        .collect();
    let capacity: BTreeMap<Category, usize> = by_cat.iter().map(|(c, l)| (*c, l.len())).collect();
    let alloc = apportion(&cat_weights, &capacity, k);
    let mut chosen: Vec<&ContentItem> = alloc
        .iter()
        .flat_map(|(c, n)| by_cat[c].iter().take(*n).copied())
        .collect();
    chosen.sort_by(|a, b| popularity_order(a, b));
    Ok(chosen.into_iter().map(|it| it.item_id).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{AccountId, Demographics, Gender, UserId};
    use std::collections::BTreeSet;

    fn prior_with(weights: &[(&str, f64)]) -> DemographicPrior {
        DemographicPrior {
            age_bands: vec![AgeBand { min: 18, max: 60 }],
            buckets: vec![PriorBucket {
                age_band: 0,
                occupation: 0,
                weights: weights.iter().map(|(l, w)| (l.to_string(), *w)).collect(),
            }],
        }
    }

    fn user(tier: KycTier, age: u8, occupation: u16) -> UserProfile {
        UserProfile {
            user_id: UserId(0),
            demographics: Some(Demographics {
                age,
                occupation,
                region: 0,
                income: 5e4,
                gender: Gender::Unspecified,
            }),
            declared_tags: BTreeSet::from(["topic-00".to_string()]),
            bio_keywords: BTreeSet::new(),
            authored_items: vec![],
            followed: vec![],
            kyc_tier: tier,
        }
    }

    fn corpus() -> Vec<ContentItem> {
        let mut out = Vec::new();
        let mut id = 0;
        for c in Category::ALL {
            for p in [50u64, 40, 30, 20, 10] {
                out.push(ContentItem {
                    item_id: ItemId(id),
                    category: c,
                    features: vec![0.0; 4],
                    author_id: AccountId(0),
                    popularity: p + c.index() as u64,
                    created_at: 0,
                });
                id += 1;
            }
        }
        out
    }

    fn space() -> EmbeddingSpace {
        EmbeddingSpace::generate(12, &["topic-00".to_string()], 3).unwrap()
    }

    #[test]
    fn point_mass_prior_vector_is_the_category_basis() {
        let s = space();
        let v = demographic_prior_vector(
            &user(KycTier::BasicKyc, 30, 0),
            &prior_with(&[("News", 1.0)]),
            &s,
        )
        .unwrap();
        for (a, b) in v.iter().zip(s.category(Category::News)) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_prior_vector_is_normalized_mean_of_categories() {
        let s = space();
        let p = prior_with(&[
            ("Ad", 0.2),
            ("News", 0.2),
            ("Gossip", 0.2),
            ("Sharing", 0.2),
            ("Tech", 0.2),
        ]);
        let v = demographic_prior_vector(&user(KycTier::BasicKyc, 30, 0), &p, &s).unwrap();
        let want = normalize(&vector::mean(
            12,
            s.category_basis.values().map(Vec::as_slice),
        ));
        for (a, b) in v.iter().zip(&want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn mixed_prior_vector_matches_direct_arithmetic() {
        let s = space();
        let p = prior_with(&[("Tech", 0.6), ("Sharing", 0.4)]);
        let v = demographic_prior_vector(&user(KycTier::BasicKyc, 30, 0), &p, &s).unwrap();
        let raw: Vec<f64> = s
            .category(Category::Tech)
            .iter()
            .zip(s.category(Category::Sharing))
            .map(|(t, sh)| 0.6 * t + 0.4 * sh)
            .collect();
        let n = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        for (a, b) in v.iter().zip(&raw) {
            assert!((a - b / n).abs() < 1e-12);
        }
    }

    #[test]
    fn unknown_bucket_falls_back_to_uniform() {
        let p = prior_with(&[("Gossip", 1.0)]);
        let w = p.weights_for(&user(KycTier::BasicKyc, 30, 9)).unwrap();
        assert_eq!(w, uniform_categories());
    }

    #[test]
    fn prior_validation_rejects_non_distributions() {
        assert!(prior_with(&[("Gossip", 1.0)]).validate().is_ok());
        assert!(prior_with(&[("Gossip", 0.5)]).validate().is_err());
        assert!(prior_with(&[("Gossip", 1.5), ("Tech", -0.5)])
            .validate()
            .is_err());
    }

    #[test]
    fn no_kyc_recall_is_balanced() {
        let items = corpus();
        let got = cold_start_recall(
            &user(KycTier::NoKyc, 30, 0),
            &prior_with(&[("Ad", 1.0)]),
            &items,
            5,
        )
        .unwrap();
        let cats: BTreeSet<Category> = got.iter().map(|id| items[id.0 as usize].category).collect();
        assert_eq!(got.len(), 5);
        assert_eq!(cats.len(), 5);
        // the top item of every category
        assert_eq!(
            got,
            vec![ItemId(0), ItemId(5), ItemId(10), ItemId(15), ItemId(20)]
        );
    }

    #[test]
    fn point_mass_recall_is_category_popularity() {
        let items = corpus();
        let got = cold_start_recall(
            &user(KycTier::BasicKyc, 30, 0),
            &prior_with(&[("Gossip", 1.0)]),
            &items,
            3,
        )
        .unwrap();
        assert_eq!(got, vec![ItemId(10), ItemId(11), ItemId(12)]);
    }

    #[test]
    fn even_split_ties_go_to_the_smaller_name() {
        let items = corpus();
        let got = cold_start_recall(
            &user(KycTier::BasicKyc, 30, 0),
            &prior_with(&[("News", 0.5), ("Tech", 0.5)]),
            &items,
            5,
        )
        .unwrap();
        let news = got
            .iter()
            .filter(|id| items[id.0 as usize].category == Category::News)
            .count();
        let tech = got
            .iter()
            .filter(|id| items[id.0 as usize].category == Category::Tech)
            .count();
        assert_eq!((news, tech), (3, 2));
    }

    #[test]
    fn apportion_redistributes_overflow() {
        let w = BTreeMap::from([(Category::News, 0.9), (Category::Tech, 0.1)]);
        let cap = BTreeMap::from([
            (Category::News, 2),
            (Category::Tech, 10),
            (Category::Ad, 10),
        ]);
        let a = apportion(&w, &cap, 6);
        assert_eq!(a[&Category::News], 2);
        assert_eq!(a[&Category::Tech], 4);
        assert_eq!(a[&Category::Ad], 0);
        // weighted categories exhausted: the rest spreads uniformly
        let a = apportion(&w, &cap, 15);
        assert_eq!(a.values().sum::<usize>(), 15);
        assert_eq!(a[&Category::Tech], 10);
        assert_eq!(a[&Category::Ad], 3);
    }

    #[test]
    fn zero_k_is_rejected() {
        assert!(cold_start_recall(
            &user(KycTier::NoKyc, 30, 0),
            &prior_with(&[("Ad", 1.0)]),
            &corpus(),
            0
        )
        .is_err());
    }
}
