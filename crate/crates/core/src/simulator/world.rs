//! Seeded synthetic world: accounts, follow graph, content, users and their
//! hidden interests.
//!
//! The world is split in two. [`Observables`] is everything a recommender may
//! read; [`GroundTruth`] holds the latent interest vectors that grade
//! relevance. Tier fidelity comes from how the observable profile fields are
//! derived from the latent: declared tags are the two strongest topics with one
//! swapped for a random topic, bio keywords the four strongest, authored items
//! are noisy copies of the latent, and follows are drawn ∝ max(cos, 0).

use std::collections::BTreeSet;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::index::sample_weighted;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::config::{bucket_categories, bucket_topics, default_age_bands, ScenarioConfig};
use crate::catalog::Catalog;
use crate::coldstart::DemographicPrior;
use crate::domain::{
    Account, AccountId, AccountKind, Category, ContentItem, Demographics, Gender, Interaction,
    InteractionKind, ItemId, KycTier, SocialGraph, UserId, UserProfile,
};
use crate::embedding::EmbeddingSpace;
use crate::error::{Error, Result};
use crate::vector::{self, cosine, normalize};

/// Everything the recommendation pipeline is allowed to read.
#[derive(Debug, Clone)]
pub struct Observables {
    pub space: EmbeddingSpace,
    pub prior: DemographicPrior,
    pub catalog: Catalog,
    pub graph: SocialGraph,
    /// Full-tier profiles in user-id order; conditions take tier views.
    pub users: Vec<UserProfile>,
    /// Pre-experiment impressions and clicks.
    pub history: Vec<Interaction>,
}

/// Hidden state: never handed to the pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    /// Latent interest vector per user, in user order.
    pub latents: Vec<Vec<f64>>,
    pub thresholds: [f64; 3],
}

impl GroundTruth {
    /// Graded relevance of an item embedding for user index `u`.
    pub fn relevance(&self, u: usize, item_embedding: &[f64]) -> u8 {
        quantize(cosine(&self.latents[u], item_embedding), &self.thresholds)
    }
}

pub fn quantize(c: f64, thresholds: &[f64; 3]) -> u8 {
    thresholds.iter().filter(|t| c >= **t).count() as u8
}

#[derive(Debug, Clone)]
pub struct World {
    pub config: ScenarioConfig,
    pub observables: Observables,
    pub truth: GroundTruth,
}

impl World {
    pub fn user_index(&self, id: UserId) -> Option<usize> {
        self.observables.users.iter().position(|u| u.user_id == id)
    }
}

// Random streams, one per generation phase.
const STREAM_ACCOUNTS: u64 = 1;
const STREAM_EDGES: u64 = 2;
const STREAM_ITEMS: u64 = 3;
const STREAM_USERS: u64 = 4;
const STREAM_HISTORY: u64 = 5;

fn stream(seed: u64, n: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(n);
    rng
}

fn gaussian(rng: &mut impl Rng, dim: usize, sigma: f64) -> Vec<f64> {
    (0..dim)
        .map(|_| sigma * rng.sample::<f64, _>(StandardNormal))
        .collect()
}

/// `normalize(Σ w·basis + noise)`.
fn noisy_mix(
    space: &EmbeddingSpace,
    parts: &[(f64, &[f64])],
    noise: f64,
    rng: &mut impl Rng,
) -> Vec<f64> {
    let mut v = gaussian(rng, space.dimension, noise);
    for (w, b) in parts {
        vector::add_scaled(&mut v, b, *w);
    }
    normalize(&v)
}

fn scale(v: &[f64], by: f64) -> Vec<f64> {
    v.iter().map(|x| x * by).collect()
}

/// Audience share of each topic, ∝ (t + 1)^-skew.
pub fn topic_shares(topics: usize, skew: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..topics).map(|t| ((t + 1) as f64).powf(-skew)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// Topic mix of a category's content.
fn category_topic_weights(c: Category, shares: &[f64]) -> Vec<f64> {
    let n = shares.len();
    match c {
        Category::Ad => shares.iter().map(|q| q.sqrt()).collect(),
        Category::News => shares.to_vec(),
        Category::Gossip => shares.iter().map(|q| q * q).collect(),
        Category::Sharing => vec![1.0; n],
        Category::Tech => (0..n).map(|t| shares[n - 1 - t]).collect(),
    }
}

/// How strongly a category's popularity order follows topic broadness.
fn broadness_correlation(c: Category) -> f64 {
    match c {
        Category::Ad => 0.4,
        Category::News => 0.6,
        Category::Gossip => 0.9,
        Category::Sharing | Category::Tech => 0.0,
    }
}

/// Popularity scale relative to the configured maximum.
fn popularity_scale(c: Category) -> f64 {
    match c {
        Category::Sharing | Category::Tech => 0.3,
        _ => 1.0,
    }
}

/// Author-kind preference (individual, creator, enterprise) per category.
fn kind_preference(c: Category, kind: AccountKind) -> f64 {
    let w = match c {
        Category::Ad => [0.05, 0.15, 0.8],
        Category::News => [0.05, 0.25, 0.7],
        Category::Gossip => [0.1, 0.4, 0.5],
        Category::Sharing => [0.6, 0.35, 0.05],
        Category::Tech => [0.2, 0.7, 0.1],
    };
    match kind {
        AccountKind::Individual => w[0],
        AccountKind::Creator => w[1],
        AccountKind::Enterprise => w[2],
    }
}

/// Distinct draws from `weights` (by index), in draw order.
fn distinct_draws(rng: &mut impl Rng, weights: &[f64], n: usize) -> Vec<usize> {
    let n = n.min(weights.len());
    let idx = sample_weighted(rng, weights.len(), |i| weights[i], n).expect("positive weights");
    idx.into_iter().collect()
}

/// Builds the world for `cfg`. Fails before generating anything when the
/// config is infeasible.
pub fn generate_world(cfg: &ScenarioConfig) -> Result<World> {
    cfg.validate()?;
    let wc = &cfg.world;
    let labels = cfg.topic_labels();
    let space = EmbeddingSpace::generate(cfg.dimension, &labels, cfg.seed)?;
    let topic = |t: usize| space.topic(&labels[t]).expect("topic basis");
    let shares = topic_shares(cfg.topics, wc.topic_skew);
    let dim = cfg.dimension;
    let broad: Vec<f64> = shares.iter().map(|q| q * q).collect();

    // Accounts.
    let mut rng = stream(cfg.seed, STREAM_ACCOUNTS);
    let mut accounts = Vec::with_capacity(wc.accounts + cfg.users);
    for a in 0..wc.accounts {
        let r: f64 = rng.random();
        let (kind, topics, weights): (AccountKind, Vec<usize>, &[f64]) = if r < 0.2 {
            (
                AccountKind::Enterprise,
                distinct_draws(&mut rng, &broad, 2),
                &[1.0, 0.3],
            )
        } else if r < 0.55 {
            let focus = rng.random_range(0..cfg.topics);
            let mut second = distinct_draws(&mut rng, &shares, 2);
            second.retain(|t| *t != focus);
            (AccountKind::Creator, vec![focus, second[0]], &[1.0, 0.2])
        } else {
            (
                AccountKind::Individual,
                distinct_draws(&mut rng, &shares, 2),
                &[1.0, 0.3],
            )
        };
        let parts: Vec<(f64, &[f64])> = topics
            .iter()
            .zip(weights)
            .map(|(t, w)| (*w, topic(*t)))
            .collect();
        accounts.push(Account {
            account_id: AccountId(a as u32),
            kind,
            interest_vector: noisy_mix(&space, &parts, wc.account_noise, &mut rng),
        });
    }

    // Account-to-account follows ∝ similarity.
    let mut rng = stream(cfg.seed, STREAM_EDGES);
    let mut edges = Vec::new();
    for a in 0..wc.accounts {
        let w: Vec<f64> = (0..wc.accounts)
            .map(|b| {
                if a == b {
                    0.0
                } else {
                    cosine(&accounts[a].interest_vector, &accounts[b].interest_vector).max(0.0)
                        + wc.follow_epsilon
                }
            })
            .collect();
        let mut picks = distinct_draws(&mut rng, &w, wc.account_follows);
        picks.sort_unstable();
        edges.extend(
            picks
                .into_iter()
                .map(|b| (AccountId(a as u32), AccountId(b as u32))),
        );
    }

    // Content.
    let mut rng = stream(cfg.seed, STREAM_ITEMS);
    let mut items = Vec::new();
    let topic_affinity: Vec<Vec<f64>> = (0..cfg.topics)
        .map(|t| {
            accounts
                .iter()
                .map(|a| {
                    (cosine(&a.interest_vector, topic(t)).max(0.0) + wc.follow_epsilon)
                        .powf(wc.authorship_sharpness)
                })
                .collect()
        })
        .collect();
    for c in Category::ALL {
        let mix = WeightedIndex::new(category_topic_weights(c, &shares))
            .map_err(|e| Error::Data(e.to_string()))?;
        let topics: Vec<usize> = (0..cfg.items_per_category)
            .map(|_| mix.sample(&mut rng))
            .collect();
        // popularity rank: broad topics first, blended with noise
        let rho = broadness_correlation(c);
        let mut order: Vec<(f64, usize)> = topics
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let broad = -(*t as f64) / cfg.topics as f64;
                let z: f64 = rng.random();
                (rho * broad + (1.0 - rho) * (z - 1.0), i)
            })
            .collect();
        order.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut rank = vec![0usize; topics.len()];
        for (r, (_, i)) in order.into_iter().enumerate() {
            rank[i] = r + 1;
        }
        for (i, t) in topics.iter().enumerate() {
            let zipf = wc.popularity_scale
                * popularity_scale(c)
                * (rank[i] as f64).powf(-wc.zipf_exponent);
            let noise = (wc.popularity_noise * rng.sample::<f64, _>(StandardNormal)).exp();
            let popularity = (zipf * noise).round().max(1.0) as u64;
            let authors: Vec<f64> = accounts
                .iter()
                .zip(&topic_affinity[*t])
                .map(|(a, w)| w * kind_preference(c, a.kind))
                .collect();
            let author = WeightedIndex::new(&authors)
                .map_err(|e| Error::Data(e.to_string()))?
                .sample(&mut rng);
            items.push(ContentItem {
                item_id: ItemId(items.len() as u32),
                category: c,
                features: scale(
                    &noisy_mix(&space, &[(1.0, topic(*t))], wc.feature_noise, &mut rng),
                    wc.feature_scale,
                ),
                author_id: accounts[author].account_id,
                popularity,
                created_at: rng.random_range(0..wc.ticks),
            });
        }
    }

    // Users.
    let mut rng = stream(cfg.seed, STREAM_USERS);
    let bands = default_age_bands();
    let account_vectors: Vec<&[f64]> = accounts
        .iter()
        .map(|a| a.interest_vector.as_slice())
        .collect();
    let mut users = Vec::with_capacity(cfg.users);
    let mut latents = Vec::with_capacity(cfg.users);
    let mut user_accounts = Vec::with_capacity(cfg.users);
    for u in 0..cfg.users {
        let user_id = UserId(u as u32);
        let age = rng.random_range(cfg.min_age..=cfg.max_age);
        let occupation = rng.random_range(0..cfg.occupation_classes);
        let income = (cfg.income_min.max(1.0).ln()
            + rng.random::<f64>() * (cfg.income_max.max(1.0).ln() - cfg.income_min.max(1.0).ln()))
        .exp();
        let demographics = Demographics {
            age,
            occupation,
            region: rng.random_range(0..cfg.regions),
            income: income.clamp(cfg.income_min, cfg.income_max),
            gender: [Gender::Female, Gender::Male, Gender::Unspecified][rng.random_range(0..3)],
        };
        let band = bands
            .iter()
            .position(|b| (b.min..=b.max).contains(&age))
            .unwrap_or(0);
        let favored = bucket_topics(band, occupation, cfg.topics);

        let mut latent_topics: Vec<usize> = Vec::with_capacity(3);
        while latent_topics.len() < 3 {
            let t = if rng.random::<f64>() < wc.bucket_topic_share {
                favored[rng.random_range(0..favored.len())]
            } else {
                WeightedIndex::new(&shares)
                    .expect("shares")
                    .sample(&mut rng)
            };
            if !latent_topics.contains(&t) {
                latent_topics.push(t);
            }
        }
        let lean = bucket_categories(band, occupation);
        let mut affinity: Vec<f64> = lean
            .iter()
            .map(|w| 0.5 * w + 0.5 * rng.random::<f64>() * 0.4)
            .collect();
        let total: f64 = affinity.iter().sum();
        affinity.iter_mut().for_each(|a| *a /= total);

        let mut parts: Vec<(f64, &[f64])> = latent_topics
            .iter()
            .zip(wc.latent_topic_weights)
            .map(|(t, w)| (w, topic(*t)))
            .collect();
        for (c, a) in Category::ALL.iter().zip(&affinity) {
            parts.push((wc.category_affinity * a, space.category(*c)));
        }
        let latent = noisy_mix(&space, &parts, wc.latent_noise, &mut rng);

        // Declared tags: the two strongest topics, one swapped for a random other topic.
        let mut declared = vec![latent_topics[0], latent_topics[1]];
        let slot = rng.random_range(0..2);
        let replacement = loop {
            let t = rng.random_range(0..cfg.topics);
            if !declared.contains(&t) {
                break t;
            }
        };
        declared[slot] = replacement;

        // Bio keywords: the four topics closest to the latent.
        let mut by_cos: Vec<(f64, usize)> = (0..cfg.topics)
            .map(|t| (vector::dot(&latent, topic(t)), t))
            .collect();
        by_cos.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let bio: BTreeSet<String> = by_cos
            .iter()
            .take(4)
            .map(|(_, t)| labels[*t].clone())
            .collect();

        // Authored items near the latent.
        let own_account = AccountId((wc.accounts + u) as u32);
        let cat_pick = WeightedIndex::new(&affinity).map_err(|e| Error::Data(e.to_string()))?;
        let mut authored = Vec::with_capacity(wc.authored_per_user);
        let mut authored_features = Vec::with_capacity(wc.authored_per_user);
        for _ in 0..wc.authored_per_user {
            let features = scale(
                &noisy_mix(
                    &space,
                    &[(1.0, latent.as_slice())],
                    wc.authored_noise,
                    &mut rng,
                ),
                wc.feature_scale,
            );
            let id = ItemId(items.len() as u32);
            authored.push(id);
            authored_features.push(features.clone());
            items.push(ContentItem {
                item_id: id,
                category: Category::ALL[cat_pick.sample(&mut rng)],
                features,
                author_id: own_account,
                popularity: rng.random_range(1..=10),
                created_at: rng.random_range(0..wc.ticks),
            });
        }
        user_accounts.push(Account {
            account_id: own_account,
            kind: AccountKind::Individual,
            interest_vector: normalize(&vector::mean(
                dim,
                authored_features.iter().map(Vec::as_slice),
            )),
        });

        // Follows ∝ max(cos, 0).
        let w: Vec<f64> = account_vectors
            .iter()
            .map(|a| (cosine(&latent, a).max(0.0) + wc.follow_epsilon).powf(wc.follow_sharpness))
            .collect();
        let mut followed: Vec<AccountId> = distinct_draws(&mut rng, &w, cfg.followed)
            .into_iter()
            .map(|i| accounts[i].account_id)
            .collect();
        followed.sort_unstable();

        users.push(UserProfile {
            user_id,
            demographics: Some(demographics),
            declared_tags: declared.into_iter().map(|t| labels[t].clone()).collect(),
            bio_keywords: bio,
            authored_items: authored,
            followed,
            kyc_tier: KycTier::AdvancedKycCircles,
        });
        latents.push(latent);
    }
    accounts.extend(user_accounts);

    let graph = SocialGraph::new(accounts, &edges)?;
    let space = space.with_global_prior(items.iter(), &cfg.embedding)?;
    let catalog = Catalog::new(items, &space, &cfg.embedding)?;
    let truth = GroundTruth {
        latents,
        thresholds: wc.relevance_thresholds,
    };

    // History: impressions ∝ popularity^γ, Bernoulli clicks by grade.
    let mut rng = stream(cfg.seed, STREAM_HISTORY);
    let exposure: Vec<f64> = catalog
        .items()
        .iter()
        .map(|it| (it.popularity as f64).powf(wc.history_popularity_exponent))
        .collect();
    let mut history = Vec::new();
    let mut tick = 0u64;
    for (u, profile) in users.iter().enumerate() {
        let own: BTreeSet<ItemId> = profile.authored_items.iter().copied().collect();
        let weights: Vec<f64> = catalog
            .items()
            .iter()
            .zip(&exposure)
            .map(|(it, w)| if own.contains(&it.item_id) { 0.0 } else { *w })
            .collect();
        for (n, i) in distinct_draws(&mut rng, &weights, wc.history_impressions)
            .into_iter()
            .enumerate()
        {
            let item = &catalog.items()[i];
            let position = (n % 5) as u32 + 1;
            history.push(Interaction {
                user_id: profile.user_id,
                item_id: item.item_id,
                kind: InteractionKind::Impression,
                position,
                tick,
            });
            let grade = truth.relevance(u, catalog.embedding(item.item_id).expect("embedded"));
            if rng.random::<f64>() < wc.history_click_probabilities[grade as usize] {
                history.push(Interaction {
                    user_id: profile.user_id,
                    item_id: item.item_id,
                    kind: InteractionKind::Click,
                    position,
                    tick,
                });
            }
            tick += 1;
        }
    }

    Ok(World {
        config: cfg.clone(),
        observables: Observables {
            space,
            prior: cfg.prior_table(),
            catalog,
            graph,
            users,
            history,
        },
        truth,
    })
}
