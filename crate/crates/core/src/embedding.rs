//! Content and user embeddings.
//!
//! Content vectors blend the item's category direction with its feature
//! vector. User vectors depend on the KYC tier: each tier adds context terms
//! on top of the previous tier's vector, re-normalizing after every blend.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::catalog::Catalog;
use crate::coldstart::{demographic_prior_vector, DemographicPrior};
use crate::domain::{Category, ContentItem, KycTier, SocialGraph, UserProfile};
use crate::error::{Error, Result};
use crate::vector::{self, normalize, weighted_sum};

/// Basis directions for topics and categories plus the popularity-weighted global prior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingSpace {
    pub dimension: usize,
    /// Seed the bases were drawn from.
    pub seed: u64,
    pub topic_basis: BTreeMap<String, Vec<f64>>,
    pub category_basis: BTreeMap<Category, Vec<f64>>,
    pub global_prior: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EmbeddingConfig {
    pub content_category_weight: f64,
    pub content_feature_weight: f64,
    pub basic_tag_weight: f64,
    pub basic_demographic_weight: f64,
    pub advanced_base_weight: f64,
    pub advanced_bio_weight: f64,
    pub advanced_authored_weight: f64,
    pub circles_base_weight: f64,
    pub circles_followed_weight: f64,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        EmbeddingConfig {
            content_category_weight: 0.5,
            content_feature_weight: 0.5,
            basic_tag_weight: 0.7,
            basic_demographic_weight: 0.3,
            advanced_base_weight: 0.4,
            advanced_bio_weight: 0.3,
            advanced_authored_weight: 0.3,
            circles_base_weight: 0.6,
            circles_followed_weight: 0.4,
        }
    }
}

impl EmbeddingConfig {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("content_category_weight", self.content_category_weight),
            ("content_feature_weight", self.content_feature_weight),
            ("basic_tag_weight", self.basic_tag_weight),
            ("basic_demographic_weight", self.basic_demographic_weight),
            ("advanced_base_weight", self.advanced_base_weight),
            ("advanced_bio_weight", self.advanced_bio_weight),
            ("advanced_authored_weight", self.advanced_authored_weight),
            ("circles_base_weight", self.circles_base_weight),
            ("circles_followed_weight", self.circles_followed_weight),
        ];
        for (name, w) in fields {
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::config(
                    format!("embedding.{name}"),
                    "must be finite and >= 0",
                ));
            }
        }
        Ok(())
    }
}

impl EmbeddingSpace {
    /// Draws unit basis vectors for the five categories followed by `topics`.
    ///
    /// While the requested count fits in `dimension` the bases are mutually
    /// orthonormal (Gram-Schmidt over Gaussian draws); any further vectors are
    /// independent random unit vectors. The global prior starts at zero; see
    /// [`EmbeddingSpace::with_global_prior`].
    pub fn generate(dimension: usize, topics: &[String], seed: u64) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::config("dimension", "must be >= 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let total = Category::ALL.len() + topics.len();
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(total);
        while basis.len() < total {
            let mut v: Vec<f64> = (0..dimension)
                .map(|_| StandardNormal.sample(&mut rng))
                .collect();
            if basis.len() < dimension {
                for b in &basis {
                    let p = vector::dot(&v, b);
                    vector::add_scaled(&mut v, b, -p);
                }
            }
            let n = vector::norm(&v);
            if n > 1e-6 {
                basis.push(v.iter().map(|x| x / n).collect());
            }
        }
        let mut it = basis.into_iter();
        let category_basis = Category::ALL
            .iter()
            .map(|c| (*c, it.next().expect("basis count")))
            .collect();
        let topic_basis = topics
            .iter()
            .map(|t| (t.clone(), it.next().expect("basis count")))
            .collect();
        Ok(EmbeddingSpace {
            dimension,
            seed,
            topic_basis,
            category_basis,
            global_prior: vec![0.0; dimension],
        })
    }

    /// Sets the global prior to the popularity-weighted mean of all content
    /// embeddings, renormalized. An empty corpus gives the zero vector; a corpus
    /// with zero total popularity falls back to the unweighted mean.
    pub fn with_global_prior<'a>(
        mut self,
        items: impl IntoIterator<Item = &'a ContentItem>,
        cfg: &EmbeddingConfig,
    ) -> Result<Self> {
        let mut weighted = vec![0.0; self.dimension];
        let mut plain = vec![0.0; self.dimension];
        let mut total = 0.0;
        for item in items {
            let e = embed_content(item, &self, cfg)?;
            vector::add_scaled(&mut weighted, &e, item.popularity as f64);
            vector::add_scaled(&mut plain, &e, 1.0);
            total += item.popularity as f64;
        }
        self.global_prior = if total > 0.0 {
            normalize(&weighted)
        } else {
            normalize(&plain)
        };
        Ok(self)
    }

    pub fn topic(&self, label: &str) -> Option<&[f64]> {
        self.topic_basis.get(label).map(Vec::as_slice)
    }

    pub fn category(&self, c: Category) -> &[f64] {
        &self.category_basis[&c]
    }

    /// Basis vector for a label that names either a category or a topic.
    pub fn label_vector(&self, label: &str) -> Option<&[f64]> {
        match Category::parse(label) {
            Some(c) => Some(self.category(c)),
            None => self.topic(label),
        }
    }

    pub fn topic_labels(&self) -> impl Iterator<Item = &str> {
        self.topic_basis.keys().map(String::as_str)
    }

    /// The topic whose basis vector has the largest dot product with `v`.
    /// Ties resolve to the lexicographically smallest label.
    pub fn dominant_topic(&self, v: &[f64]) -> Option<&str> {
        let mut best: Option<(&str, f64)> = None;
        for (label, b) in &self.topic_basis {
            let s = vector::dot(v, b);
            if best.is_none_or(|(_, bs)| s > bs) {
                best = Some((label, s));
            }
        }
        best.map(|(l, _)| l)
    }

    fn check_dim(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                found: v.len(),
            });
        }
        Ok(())
    }
}

/// `normalize(w_cat * category_basis[item.category] + w_feat * item.features)`.
pub fn embed_content(
    item: &ContentItem,
    space: &EmbeddingSpace,
    cfg: &EmbeddingConfig,
) -> Result<Vec<f64>> {
    space.check_dim(&item.features)?;
    let v = weighted_sum(
        space.dimension,
        [
            (cfg.content_category_weight, space.category(item.category)),
            (cfg.content_feature_weight, item.features.as_slice()),
        ],
    );
    Ok(normalize(&v))
}

/// Everything [`embed_user`] may read besides the profile itself.
#[derive(Clone, Copy)]
pub struct UserContext<'a> {
    pub space: &'a EmbeddingSpace,
    pub config: &'a EmbeddingConfig,
    pub prior: &'a DemographicPrior,
    pub graph: &'a SocialGraph,
    pub catalog: &'a Catalog,
}

/// Tier-dependent user vector; unit norm or exactly zero.
///
/// * `NoKyc`: the global prior.
/// * `BasicKyc`: declared-tag mean blended with the demographic prior vector.
/// * `AdvancedKyc`: the basic vector blended with the bio-keyword mean and the
///   centroid of the user's authored content.
/// * `AdvancedKycCircles`: the advanced vector blended with the centroid of the
///   followed accounts' interest vectors.
///
/// Each component is unit-normalized before weighting, so the configured weights
/// are relative importances. Missing components contribute nothing.
pub fn embed_user(profile: &UserProfile, ctx: &UserContext<'_>) -> Result<Vec<f64>> {
    let space = ctx.space;
    let cfg = ctx.config;
    let dim = space.dimension;

    if profile.kyc_tier == KycTier::NoKyc {
        if vector::is_zero(&space.global_prior) {
            log::warn!("{}: global prior is zero (empty corpus?)", profile.user_id);
        }
        return Ok(space.global_prior.clone());
    }

    let tags = normalize(&topic_mean(space, profile.declared_tags.iter()));
    let demo = demographic_prior_vector(profile, ctx.prior, space)?;
    let mut user = normalize(&weighted_sum(
        dim,
        [
            (cfg.basic_tag_weight, tags.as_slice()),
            (cfg.basic_demographic_weight, demo.as_slice()),
        ],
    ));
    if profile.kyc_tier == KycTier::BasicKyc {
        return Ok(user);
    }

    let bio = normalize(&topic_mean(space, profile.bio_keywords.iter()));
    let mut authored = Vec::with_capacity(profile.authored_items.len());
    for id in &profile.authored_items {
        authored.push(ctx.catalog.embedding(*id).ok_or(Error::UnknownItem(*id))?);
    }
    let authored = normalize(&vector::mean(dim, authored));
    user = normalize(&weighted_sum(
        dim,
        [
            (cfg.advanced_base_weight, user.as_slice()),
            (cfg.advanced_bio_weight, bio.as_slice()),
            (cfg.advanced_authored_weight, authored.as_slice()),
        ],
    ));
    if profile.kyc_tier == KycTier::AdvancedKyc {
        return Ok(user);
    }

    let mut followed = Vec::with_capacity(profile.followed.len());
    for id in &profile.followed {
        let acct = ctx.graph.account(*id).ok_or(Error::UnknownAccount(*id))?;
        space.check_dim(&acct.interest_vector)?;
        followed.push(acct.interest_vector.as_slice());
    }
    let followed = normalize(&vector::mean(dim, followed));
    Ok(normalize(&weighted_sum(
        dim,
        [
            (cfg.circles_base_weight, user.as_slice()),
            (cfg.circles_followed_weight, followed.as_slice()),
        ],
    )))
}

/// Mean of the topic basis vectors for the known labels; unknown labels are skipped.
fn topic_mean<'a>(space: &'a EmbeddingSpace, labels: impl Iterator<Item = &'a String>) -> Vec<f64> {
    vector::mean(
        space.dimension,
        labels.filter_map(|l| {
            let v = space.topic(l);
            if v.is_none() {
                log::debug!("unknown topic label `{l}` ignored");
            }
            v
        }),
    )
}
