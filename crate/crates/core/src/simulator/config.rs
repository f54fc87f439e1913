//! Scenario configuration: one TOML document holding every module's parameters.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::coldstart::{AgeBand, DemographicPrior, PriorBucket};
use crate::domain::{Category, Condition, MAX_AGE, MIN_AGE};
use crate::embedding::EmbeddingConfig;
use crate::error::{Error, Result};
use crate::propagation::PropagationConfig;
use crate::ranking::RankingWeights;
use crate::recall::SourceCaps;
use crate::rerank::RerankConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClickModel {
    /// Click iff the graded relevance is at least 2.
    #[default]
    Deterministic,
    /// Click with a per-grade probability drawn from a seeded stream.
    Bernoulli,
}

impl ClickModel {
    pub fn parse(s: &str) -> Result<ClickModel> {
        match s.to_ascii_lowercase().as_str() {
            "deterministic" => Ok(ClickModel::Deterministic),
            "bernoulli" => Ok(ClickModel::Bernoulli),
            _ => Err(Error::InvalidArgument(format!(
                "click model must be `deterministic` or `bernoulli`, got `{s}`"
            ))),
        }
    }
}

/// Which grades feed nDCG.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelevanceMode {
    /// Ground-truth grades 0..=3.
    #[default]
    Graded,
    /// 1 for a clicked position, 0 otherwise.
    Binary,
}

/// Knobs of the synthetic world that are not pipeline parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WorldConfig {
    /// Non-user accounts (creators, enterprises, individuals).
    pub accounts: usize,
    /// Follow edges each account makes towards other accounts.
    pub account_follows: usize,
    pub authored_per_user: usize,
    /// History impressions per user.
    pub history_impressions: usize,
    /// Impressions are sampled ∝ popularity^this.
    pub history_popularity_exponent: f64,
    /// Weights of a user's three latent topics, strongest first.
    pub latent_topic_weights: [f64; 3],
    /// Probability that each latent topic comes from the user's demographic bucket.
    pub bucket_topic_share: f64,
    /// Scale of the category-affinity part of a latent.
    pub category_affinity: f64,
    /// Per-dimension noise in latents.
    pub latent_noise: f64,
    /// Per-dimension noise in item features.
    pub feature_noise: f64,
    /// Norm of item feature vectors.
    pub feature_scale: f64,
    /// Per-dimension noise around the latent for authored items.
    pub authored_noise: f64,
    /// Per-dimension noise in account interest vectors.
    pub account_noise: f64,
    /// Audience share of topic t is ∝ (t + 1)^-this.
    pub topic_skew: f64,
    /// Authors are drawn ∝ (topic affinity)^this.
    pub authorship_sharpness: f64,
    /// Added to every follow weight so the sampler never runs dry.
    pub follow_epsilon: f64,
    /// User follows are drawn ∝ (cos + epsilon)^this.
    pub follow_sharpness: f64,
    /// Popularity at rank r is ∝ r^-this.
    pub zipf_exponent: f64,
    /// Multiplicative noise (log-normal σ) on the Zipf popularity.
    pub popularity_noise: f64,
    /// Largest popularity value (rank 1).
    pub popularity_scale: f64,
    /// Creation ticks are drawn from `0..ticks`.
    pub ticks: u64,
    /// Grade cut points on cos(latent, item).
    pub relevance_thresholds: [f64; 3],
    /// History click probability per grade.
    pub history_click_probabilities: [f64; 4],
}

impl Default for WorldConfig {
    fn default() -> Self {
        WorldConfig {
            accounts: 1000,
            account_follows: 8,
            authored_per_user: 3,
            history_impressions: 40,
            history_popularity_exponent: 0.6,
            latent_topic_weights: [1.0, 0.6, 0.4],
            bucket_topic_share: 0.5,
            category_affinity: 0.5,
            latent_noise: 0.05,
            feature_noise: 0.05,
            feature_scale: 3.0,
            authored_noise: 0.08,
            account_noise: 0.05,
            topic_skew: 0.8,
            authorship_sharpness: 4.0,
            follow_epsilon: 1e-3,
            follow_sharpness: 2.0,
            zipf_exponent: 1.1,
            popularity_noise: 0.1,
            popularity_scale: 100_000.0,
            ticks: 1_000,
            relevance_thresholds: [0.2, 0.45, 0.7],
            history_click_probabilities: [0.02, 0.1, 0.45, 0.8],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SocialConfig {
    /// Nearest-neighbor accounts added per followed account on the second hop.
    pub seed_neighbors: usize,
    /// 1 or 2.
    pub hops: u8,
}

impl Default for SocialConfig {
    fn default() -> Self {
        SocialConfig {
            seed_neighbors: 3,
            hops: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub users: usize,
    pub min_age: u8,
    pub max_age: u8,
    pub occupation_classes: u16,
    pub regions: u16,
    pub income_min: f64,
    pub income_max: f64,
    pub items_per_category: usize,
    pub topics: usize,
    pub dimension: usize,
    /// Accounts each Circles profile follows.
    pub followed: usize,
    pub conditions: Vec<Condition>,
    /// Metric cut-offs; the list length emitted is the largest.
    pub ks: Vec<usize>,
    pub click_model: ClickModel,
    /// Bernoulli click probability per grade 0..=3.
    pub click_probabilities: [f64; 4],
    pub relevance_mode: RelevanceMode,
    /// Recency share of the Baseline popularity/recency score.
    pub baseline_recency_weight: f64,
    pub world: WorldConfig,
    pub embedding: EmbeddingConfig,
    pub caps: SourceCaps,
    pub ranking: RankingWeights,
    pub rerank: RerankConfig,
    pub propagation: PropagationConfig,
    pub social: SocialConfig,
    /// Demographic prior table; when absent the default table for the
    /// configured occupations and topics is used.
    pub prior: Option<DemographicPrior>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            seed: 42,
            users: 100,
            min_age: MIN_AGE,
            max_age: MAX_AGE,
            occupation_classes: 8,
            regions: 6,
            income_min: 4.0e4,
            income_max: 1.0e6,
            items_per_category: 400,
            topics: 20,
            dimension: 32,
            followed: 100,
            conditions: Condition::ALL.to_vec(),
            ks: vec![1, 3, 5],
            click_model: ClickModel::Deterministic,
            click_probabilities: [0.02, 0.1, 0.45, 0.8],
            relevance_mode: RelevanceMode::Graded,
            baseline_recency_weight: 0.3,
            world: WorldConfig::default(),
            embedding: EmbeddingConfig::default(),
            caps: SourceCaps::default(),
            ranking: RankingWeights::default(),
            rerank: RerankConfig::default(),
            propagation: PropagationConfig::default(),
            social: SocialConfig::default(),
            prior: None,
        }
    }
}

fn check(ok: bool, field: &str, reason: impl Into<String>) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::config(field, reason))
    }
}

fn probabilities(field: &str, ps: &[f64]) -> Result<()> {
    check(
        ps.iter().all(|p| (0.0..=1.0).contains(p)),
        field,
        "probabilities must lie in [0, 1]",
    )
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| {
            let field = e
                .span()
                .and_then(|span| key_at(text, span.start))
                .unwrap_or_else(|| "<document>".into());
            Error::config(field, e.message().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario config serializes")
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("scenario config serializes");
        hex::encode(Sha256::digest(&json))
    }

    /// Rejects infeasible or out-of-range settings, naming the offending field.
    pub fn validate(&self) -> Result<()> {
        check(self.users > 0, "users", "must be at least 1")?;
        check(
            MIN_AGE <= self.min_age && self.min_age <= self.max_age && self.max_age <= MAX_AGE,
            "min_age",
            format!("ages must satisfy {MIN_AGE} <= min_age <= max_age <= {MAX_AGE}"),
        )?;
        check(
            (5..=10).contains(&self.occupation_classes),
            "occupation_classes",
            "must lie in 5..=10",
        )?;
        check(self.regions > 0, "regions", "must be at least 1")?;
        check(
            self.income_min >= 0.0 && self.income_min <= self.income_max,
            "income_min",
            "must satisfy 0 <= income_min <= income_max",
        )?;
        check(
            self.items_per_category > 0,
            "items_per_category",
            "must be at least 1",
        )?;
        check(self.topics >= 4, "topics", "need at least 4 latent topics")?;
        check(
            self.dimension >= self.topics + Category::ALL.len(),
            "dimension",
            format!(
                "must be at least topics + categories = {}",
                self.topics + Category::ALL.len()
            ),
        )?;
        check(
            self.world.accounts > 0,
            "world.accounts",
            "must be at least 1",
        )?;
        check(
            self.followed <= self.world.accounts,
            "followed",
            format!(
                "cannot follow {} accounts when only {} exist",
                self.followed, self.world.accounts
            ),
        )?;
        check(
            self.world.account_follows < self.world.accounts,
            "world.account_follows",
            "must be less than world.accounts",
        )?;
        check(
            !self.conditions.is_empty(),
            "conditions",
            "must name at least one condition",
        )?;
        check(
            !self.ks.is_empty() && self.ks.iter().all(|k| *k >= 1),
            "ks",
            "must be a nonempty list of cut-offs >= 1",
        )?;
        probabilities("click_probabilities", &self.click_probabilities)?;
        probabilities(
            "world.history_click_probabilities",
            &self.world.history_click_probabilities,
        )?;
        check(
            (0.0..=1.0).contains(&self.baseline_recency_weight),
            "baseline_recency_weight",
            "must lie in [0, 1]",
        )?;
        check(
            (0.0..=1.0).contains(&self.world.bucket_topic_share),
            "world.bucket_topic_share",
            "must lie in [0, 1]",
        )?;
        let t = self.world.relevance_thresholds;
        check(
            t[0] < t[1] && t[1] < t[2],
            "world.relevance_thresholds",
            "must be strictly increasing",
        )?;
        check(self.world.ticks > 0, "world.ticks", "must be at least 1")?;
        check(
            self.world.popularity_scale >= 1.0,
            "world.popularity_scale",
            "must be at least 1",
        )?;
        for (name, v) in [
            ("world.latent_noise", self.world.latent_noise),
            ("world.feature_noise", self.world.feature_noise),
            ("world.feature_scale", self.world.feature_scale),
            ("world.authored_noise", self.world.authored_noise),
            ("world.account_noise", self.world.account_noise),
            ("world.popularity_noise", self.world.popularity_noise),
            ("world.zipf_exponent", self.world.zipf_exponent),
            ("world.category_affinity", self.world.category_affinity),
            ("world.topic_skew", self.world.topic_skew),
            ("world.follow_epsilon", self.world.follow_epsilon),
            ("world.follow_sharpness", self.world.follow_sharpness),
            (
                "world.authorship_sharpness",
                self.world.authorship_sharpness,
            ),
        ] {
            check(v.is_finite() && v >= 0.0, name, "must be finite and >= 0")?;
        }
        check(
            self.social.hops == 1 || self.social.hops == 2,
            "social.hops",
            "must be 1 or 2",
        )?;
        self.embedding.validate()?;
        self.ranking.validate()?;
        self.propagation.validate()?;
        self.prior_table().validate()?;
        Ok(())
    }

    pub fn max_k(&self) -> usize {
        self.ks.iter().copied().max().unwrap_or(1)
    }

    pub fn topic_labels(&self) -> Vec<String> {
        (0..self.topics).map(topic_label).collect()
    }

    /// The configured prior table or [`default_prior`].
    pub fn prior_table(&self) -> DemographicPrior {
        self.prior
            .clone()
            .unwrap_or_else(|| default_prior(self.occupation_classes, self.topics))
    }
}

/// Dotted key of the `key = value` line containing byte `offset`.
fn key_at(text: &str, offset: usize) -> Option<String> {
    let before = text.get(..offset)?;
    let line_start = before.rfind('\n').map_or(0, |i| i + 1);
    let line = text[line_start..].lines().next()?;
    let key = line.split_once('=')?.0.trim();
    let table = before[..line_start]
        .lines()
        .rev()
        .map(str::trim)
        .find(|l| l.starts_with('['))
        .map(|l| l.trim_matches(|c| c == '[' || c == ']').trim());
    Some(match table {
        Some(t) => format!("{t}.{key}"),
        None => key.to_string(),
    })
}

pub fn topic_label(t: usize) -> String {
    format!("topic-{t:02}")
}

/// Age bands used by the default prior table.
pub fn default_age_bands() -> Vec<AgeBand> {
    vec![
        AgeBand {
            min: MIN_AGE,
            max: 29,
        },
        AgeBand { min: 30, max: 44 },
        AgeBand {
            min: 45,
            max: MAX_AGE,
        },
    ]
}

/// Category leanings per age band (Ad, News, Gossip, Sharing, Tech).
const BAND_CATEGORIES: [[f64; 5]; 3] = [
    [0.10, 0.10, 0.30, 0.30, 0.20],
    [0.15, 0.25, 0.15, 0.20, 0.25],
    [0.25, 0.35, 0.20, 0.15, 0.05],
];

/// Topics favored by an (age band, occupation) bucket.
pub fn bucket_topics(band: usize, occupation: u16, topics: usize) -> [usize; 3] {
    let o = occupation as usize;
    let a = (3 * o + band) % topics;
    let b = (a + 1 + (o + 2 * band) % (topics - 1)) % topics;
    let mut c = (7 * o + 5 * band + 2) % topics;
    while c == a || c == b {
        c = (c + 1) % topics;
    }
    [a, b, c]
}

/// Category weights of a bucket: the band's leaning, with every other
/// occupation class shifted towards Tech.
pub fn bucket_categories(band: usize, occupation: u16) -> [f64; 5] {
    let mut w = BAND_CATEGORIES[band];
    if occupation % 2 == 1 {
        let shift = w[Category::Gossip.index()] * 0.5;
        w[Category::Gossip.index()] -= shift;
        w[Category::Tech.index()] += shift;
    }
    w
}

/// The shipped prior table: half of each bucket's mass on its category
/// leaning, half on its three favored topics (0.25, 0.15, 0.10).
pub fn default_prior(occupation_classes: u16, topics: usize) -> DemographicPrior {
    let bands = default_age_bands();
    let mut buckets = Vec::new();
    for band in 0..bands.len() {
        for occupation in 0..occupation_classes {
            let mut weights = BTreeMap::new();
            for (c, w) in Category::ALL
                .iter()
                .zip(bucket_categories(band, occupation))
            {
                weights.insert(c.label().to_string(), 0.5 * w);
            }
            for (t, w) in bucket_topics(band, occupation, topics)
                .into_iter()
                .zip([0.25, 0.15, 0.10])
            {
                *weights.entry(topic_label(t)).or_insert(0.0) += w;
            }
            buckets.push(PriorBucket {
                age_band: band,
                occupation,
                weights,
            });
        }
    }
    DemographicPrior {
        age_bands: bands,
        buckets,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        ScenarioConfig::default().validate().unwrap();
    }

    #[test]
    fn following_more_accounts_than_exist_is_rejected() {
        let mut cfg = ScenarioConfig::default();
        cfg.followed = cfg.world.accounts + 1;
        match cfg.validate() {
            Err(Error::InvalidConfig { field, .. }) => assert_eq!(field, "followed"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn toml_round_trip() {
        let cfg = ScenarioConfig::default();
        let back = ScenarioConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.hash(), cfg.hash());
    }

    #[test]
    fn partial_toml_keeps_defaults() {
        let cfg = ScenarioConfig::from_toml("seed = 7\n[world]\naccounts = 150\n").unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.world.accounts, 150);
        assert_eq!(cfg.users, 100);
    }

    #[test]
    fn bad_value_names_field() {
        let err = ScenarioConfig::from_toml("occupation_classes = 12\n").unwrap_err();
        assert!(err.to_string().contains("occupation_classes"), "{err}");
        let err = ScenarioConfig::from_toml("users = \"many\"\n").unwrap_err();
        assert!(err.to_string().contains("`users`"), "{err}");
        let err = ScenarioConfig::from_toml("[world]\naccounts = -1\n").unwrap_err();
        assert!(err.to_string().contains("world.accounts"), "{err}");
    }

    #[test]
    fn default_prior_covers_every_bucket() {
        let prior = default_prior(8, 20);
        prior.validate().unwrap();
        assert_eq!(prior.buckets.len(), 3 * 8);
        for age in MIN_AGE..=MAX_AGE {
            for occ in 0..8 {
                assert!(prior.bucket(age, occ).is_some());
            }
        }
    }

    #[test]
    fn bucket_topics_are_distinct() {
        for band in 0..3 {
            for occ in 0..10 {
                let [a, b, c] = bucket_topics(band, occ, 20);
                assert!(a != b && b != c && a != c, "{band} {occ}");
            }
        }
    }
}
