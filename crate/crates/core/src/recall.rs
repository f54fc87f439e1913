//! Candidate generation.
//!
//! Each source returns an ordered candidate list; [`merge_candidates`] caps
//! every list and folds them into one deduplicated [`CandidateSet`] that
//! remembers which sources proposed each item.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::domain::{
    AccountId, Category, ContentItem, Interaction, InteractionKind, ItemId, SocialGraph, UserId,
    UserProfile,
};
use crate::error::{Error, Result};
use crate::vector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceTag {
    Popularity,
    Recency,
    Knn,
    Cooccur,
    Social1,
    Social2,
    Coldstart,
}

impl SourceTag {
    pub const ALL: [SourceTag; 7] = [
        SourceTag::Popularity,
        SourceTag::Recency,
        SourceTag::Knn,
        SourceTag::Cooccur,
        SourceTag::Social1,
        SourceTag::Social2,
        SourceTag::Coldstart,
    ];
}

/// Popularity descending, then item id ascending.
pub fn popularity_order(a: &ContentItem, b: &ContentItem) -> Ordering {
    b.popularity
        .cmp(&a.popularity)
        .then(a.item_id.cmp(&b.item_id))
}

/// Newest first, then item id ascending.
pub fn recency_order(a: &ContentItem, b: &ContentItem) -> Ordering {
    b.created_at
        .cmp(&a.created_at)
        .then(a.item_id.cmp(&b.item_id))
}

fn require_k(k: usize, what: &str) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidArgument(format!("{what} needs k >= 1")));
    }
    Ok(())
}

/// Top-`k` items by popularity, optionally restricted to one category first.
pub fn popularity_recall<'a>(
    items: impl IntoIterator<Item = &'a ContentItem>,
    category: Option<Category>,
    k: usize,
) -> Result<Vec<ItemId>> {
    require_k(k, "popularity_recall")?;
    let mut pool: Vec<&ContentItem> = items
        .into_iter()
        .filter(|it| category.is_none_or(|c| it.category == c))
        .collect();
    pool.sort_by(|a, b| popularity_order(a, b));
    Ok(pool.into_iter().take(k).map(|it| it.item_id).collect())
}

/// The `k` newest items.
pub fn recency_recall<'a>(
    items: impl IntoIterator<Item = &'a ContentItem>,
    k: usize,
) -> Result<Vec<ItemId>> {
    require_k(k, "recency_recall")?;
    let mut pool: Vec<&ContentItem> = items.into_iter().collect();
    pool.sort_by(|a, b| recency_order(a, b));
    Ok(pool.into_iter().take(k).map(|it| it.item_id).collect())
}

/// Exact cosine nearest-neighbor index over content embeddings.
///
/// Vectors are unit-normalized at insertion, so a query is one dot product per
/// item plus a bounded heap for the top-k selection.
#[derive(Debug, Clone)]
pub struct KnnIndex {
    dimension: usize,
    ids: Vec<ItemId>,
    vectors: Vec<Vec<f64>>,
}

#[derive(PartialEq)]
struct Hit {
    sim: f64,
    id: ItemId,
}

impl Eq for Hit {}

impl Ord for Hit {
    // "better" hits compare greater: higher similarity, then smaller id
    fn cmp(&self, other: &Self) -> Ordering {
        self.sim.total_cmp(&other.sim).then(other.id.cmp(&self.id))
    }
}

impl PartialOrd for Hit {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl KnnIndex {
    pub fn new(dimension: usize) -> Self {
        KnnIndex {
            dimension,
            ids: Vec::new(),
            vectors: Vec::new(),
        }
    }

    pub fn build<'a>(
        dimension: usize,
        entries: impl IntoIterator<Item = (ItemId, &'a [f64])>,
    ) -> Result<Self> {
        let mut index = KnnIndex::new(dimension);
        for (id, v) in entries {
            index.insert(id, v)?;
        }
        Ok(index)
    }

    pub fn insert(&mut self, id: ItemId, v: &[f64]) -> Result<()> {
        if v.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                found: v.len(),
            });
        }
        self.ids.push(id);
        self.vectors.push(vector::normalize(v));
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// The `k` most cosine-similar items, best first, ties by ascending id.
    pub fn search(&self, query: &[f64], k: usize) -> Result<Vec<(ItemId, f64)>> {
        if query.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                found: query.len(),
            });
        }
        let q = vector::normalize(query);
        if k == 0 || vector::is_zero(&q) {
            return Ok(Vec::new());
        }
        // min-heap of the best k seen so far
        let mut heap: BinaryHeap<std::cmp::Reverse<Hit>> = BinaryHeap::with_capacity(k + 1);
        for (id, v) in self.ids.iter().zip(&self.vectors) {
            let hit = Hit {
                sim: vector::dot(&q, v),
                id: *id,
            };
            if heap.len() < k {
                heap.push(std::cmp::Reverse(hit));
            } else if let Some(mut worst) = heap.peek_mut() {
                if hit > worst.0 {
                    *worst = std::cmp::Reverse(hit);
                }
            }
        }
        let mut hits: Vec<Hit> = heap.into_iter().map(|r| r.0).collect();
        hits.sort_by(|a, b| b.cmp(a));
        Ok(hits.into_iter().map(|h| (h.id, h.sim)).collect())
    }
}

/// `k` nearest items to `user_vec`; a zero vector yields nothing.
pub fn knn_recall(user_vec: &[f64], index: &KnnIndex, k: usize) -> Result<Vec<ItemId>> {
    Ok(index
        .search(user_vec, k)?
        .into_iter()
        .map(|(id, _)| id)
        .collect())
}

/// Click co-occurrence counts over an interaction log. Impressions are ignored.
#[derive(Debug, Clone, Default)]
pub struct CooccurrenceIndex {
    /// Distinct clicked items per user, ascending.
    user_clicks: Vec<Vec<ItemId>>,
    /// Users (indices into `user_clicks`) that clicked each item.
    clickers: HashMap<ItemId, Vec<usize>>,
}

impl CooccurrenceIndex {
    pub fn from_log(log: &[Interaction]) -> Self {
        let mut per_user: BTreeMap<UserId, BTreeSet<ItemId>> = BTreeMap::new();
        for ev in log.iter().filter(|e| e.kind == InteractionKind::Click) {
            per_user.entry(ev.user_id).or_default().insert(ev.item_id);
        }
        let user_clicks: Vec<Vec<ItemId>> = per_user
            .into_values()
            .map(|s| s.into_iter().collect())
            .collect();
        let mut clickers: HashMap<ItemId, Vec<usize>> = HashMap::new();
        for (u, items) in user_clicks.iter().enumerate() {
            for it in items {
                clickers.entry(*it).or_default().push(u);
            }
        }
        CooccurrenceIndex {
            user_clicks,
            clickers,
        }
    }

    /// Scores every unseen item `c` with `Σ_h co(h, c)` over the history, where
    /// `co` counts distinct users who clicked both. Zero scores are dropped;
    /// `allow` filters which items may be returned.
    pub fn recall(
        &self,
        history: &[ItemId],
        k: usize,
        allow: impl Fn(ItemId) -> bool,
    ) -> Vec<(ItemId, u64)> {
        let seen: HashSet<ItemId> = history.iter().copied().collect();
        let mut scores: HashMap<ItemId, u64> = HashMap::new();
        for h in &seen {
            for &u in self.clickers.get(h).map(Vec::as_slice).unwrap_or(&[]) {
                for c in &self.user_clicks[u] {
                    if !seen.contains(c) && allow(*c) {
                        *scores.entry(*c).or_insert(0) += 1;
                    }
                }
            }
        }
        let mut ranked: Vec<(ItemId, u64)> = scores.into_iter().collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        ranked.truncate(k);
        ranked
    }
}

/// Top-`k` co-clicked items for a history, with their scores.
pub fn cooccurrence_recall(
    history: &[ItemId],
    log: &[Interaction],
    k: usize,
) -> Vec<(ItemId, u64)> {
    if history.is_empty() || log.is_empty() {
        return Vec::new();
    }
    CooccurrenceIndex::from_log(log).recall(history, k, |_| true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Hops {
    One,
    Two,
}

impl TryFrom<u8> for Hops {
    type Error = Error;

    fn try_from(n: u8) -> Result<Self> {
        match n {
            1 => Ok(Hops::One),
            2 => Ok(Hops::Two),
            _ => Err(Error::InvalidArgument(format!(
                "hops must be 1 or 2, got {n}"
            ))),
        }
    }
}

/// Follow-graph candidate source: authored items of followed accounts (one
/// hop), then of their followees and embedding neighbors (two hops).
#[derive(Debug, Clone)]
pub struct SocialIndex {
    graph: SocialGraph,
    /// `m` nearest accounts by interest-vector cosine, per node.
    neighbors: Vec<Vec<usize>>,
    /// Items per author, newest first.
    authored: HashMap<AccountId, Vec<(ItemId, Category, u64)>>,
}

impl SocialIndex {
    pub fn new<'a>(
        graph: SocialGraph,
        items: impl IntoIterator<Item = &'a ContentItem>,
        seed_neighbors: usize,
    ) -> Self {
        let accounts = graph.accounts();
        let unit: Vec<Vec<f64>> = accounts
            .iter()
            .map(|a| vector::normalize(&a.interest_vector))
            .collect();
        let neighbors = (0..accounts.len())
            .map(|i| {
                if seed_neighbors == 0 || vector::is_zero(&unit[i]) {
                    return Vec::new();
                }
                let mut sims: Vec<(f64, AccountId, usize)> = (0..accounts.len())
                    .filter(|&j| j != i && !vector::is_zero(&unit[j]))
                    .map(|j| (vector::dot(&unit[i], &unit[j]), accounts[j].account_id, j))
                    .collect();
                sims.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
                sims.into_iter()
                    .take(seed_neighbors)
                    .map(|(_, _, j)| j)
                    .collect()
            })
            .collect();
        let mut authored: HashMap<AccountId, Vec<(ItemId, Category, u64)>> = HashMap::new();
        for it in items {
            authored.entry(it.author_id).or_default().push((
                it.item_id,
                it.category,
                it.created_at,
            ));
        }
        for list in authored.values_mut() {
            list.sort_by(|a, b| b.2.cmp(&a.2).then(a.0.cmp(&b.0)));
        }
        SocialIndex {
            graph,
            neighbors,
            authored,
        }
    }

    pub fn graph(&self) -> &SocialGraph {
        &self.graph
    }

    /// Nearest-neighbor accounts of `id` (by interest-vector cosine).
    pub fn neighbors_of(&self, id: AccountId) -> Vec<AccountId> {
        self.graph
            .node_index(id)
            .map(|i| {
                self.neighbors[i]
                    .iter()
                    .map(|&j| self.graph.accounts()[j].account_id)
                    .collect()
            })
            .unwrap_or_default()
    }

    /// Banded candidates tagged `Social1` / `Social2`, truncated to `k`.
    pub fn recall(
        &self,
        profile: &UserProfile,
        hops: Hops,
        category: Option<Category>,
        k: usize,
    ) -> Vec<(ItemId, SourceTag)> {
        if profile.followed.is_empty() || k == 0 {
            return Vec::new();
        }
        let one_hop: BTreeSet<AccountId> = profile.followed.iter().copied().collect();
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        self.push_band(&one_hop, category, SourceTag::Social1, &mut seen, &mut out);
        if hops == Hops::Two {
            let mut two_hop = BTreeSet::new();
            for seed in &one_hop {
                two_hop.extend(self.graph.followees(*seed));
                two_hop.extend(self.neighbors_of(*seed));
            }
            let two_hop: BTreeSet<AccountId> = two_hop.difference(&one_hop).copied().collect();
            self.push_band(&two_hop, category, SourceTag::Social2, &mut seen, &mut out);
        }
        out.truncate(k);
        out
    }

    fn push_band(
        &self,
        authors: &BTreeSet<AccountId>,
        category: Option<Category>,
        tag: SourceTag,
        seen: &mut HashSet<ItemId>,
        out: &mut Vec<(ItemId, SourceTag)>,
    ) {
        let mut band: Vec<(ItemId, u64)> = authors
            .iter()
            .filter_map(|a| self.authored.get(a))
            .flatten()
            .filter(|(_, c, _)| category.is_none_or(|want| *c == want))
            .map(|(id, _, t)| (*id, *t))
            .collect();
        band.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        for (id, _) in band {
            if seen.insert(id) {
                out.push((id, tag));
            }
        }
    }
}

/// One-off social recall; builds a [`SocialIndex`] for the call.
pub fn social_recall<'a>(
    profile: &UserProfile,
    graph: &SocialGraph,
    items: impl IntoIterator<Item = &'a ContentItem>,
    hops: Hops,
    k: usize,
    seed_neighbors: usize,
) -> Vec<(ItemId, SourceTag)> {
    if profile.followed.is_empty() {
        return Vec::new();
    }
    SocialIndex::new(graph.clone(), items, seed_neighbors).recall(profile, hops, None, k)
}

/// Per-source caps applied before the union.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SourceCaps {
    pub popularity: usize,
    pub recency: usize,
    pub knn: usize,
    pub cooccur: usize,
    pub social1: usize,
    pub social2: usize,
    pub coldstart: usize,
}

impl Default for SourceCaps {
    fn default() -> Self {
        SourceCaps::uniform(50)
    }
}

impl SourceCaps {
    pub fn uniform(cap: usize) -> Self {
        SourceCaps {
            popularity: cap,
            recency: cap,
            knn: cap,
            cooccur: cap,
            social1: cap,
            social2: cap,
            coldstart: cap,
        }
    }

    pub fn get(&self, tag: SourceTag) -> usize {
        match tag {
            SourceTag::Popularity => self.popularity,
            SourceTag::Recency => self.recency,
            SourceTag::Knn => self.knn,
            SourceTag::Cooccur => self.cooccur,
            SourceTag::Social1 => self.social1,
            SourceTag::Social2 => self.social2,
            SourceTag::Coldstart => self.coldstart,
        }
    }
}

/// Deduplicated candidates for one user, each with the sources that proposed it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateSet {
    pub user_id: UserId,
    pub candidates: BTreeMap<ItemId, BTreeSet<SourceTag>>,
}

impl CandidateSet {
    pub fn new(user_id: UserId) -> Self {
        CandidateSet {
            user_id,
            candidates: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn contains(&self, id: ItemId) -> bool {
        self.candidates.contains_key(&id)
    }

    pub fn tags(&self, id: ItemId) -> Option<&BTreeSet<SourceTag>> {
        self.candidates.get(&id)
    }

    pub fn ids(&self) -> impl Iterator<Item = ItemId> + '_ {
        self.candidates.keys().copied()
    }

    /// The set re-expressed as one id-ordered list per source.
    pub fn source_lists(&self) -> Vec<(SourceTag, Vec<ItemId>)> {
        SourceTag::ALL
            .iter()
            .map(|tag| {
                let ids = self
                    .candidates
                    .iter()
                    .filter(|(_, tags)| tags.contains(tag))
                    .map(|(id, _)| *id)
                    .collect();
                (*tag, ids)
            })
            .filter(|(_, ids): &(SourceTag, Vec<ItemId>)| !ids.is_empty())
            .collect()
    }
}

/// Caps each source list, unions them with tag union on duplicates and drops
/// the user's own authored items.
pub fn merge_candidates(
    lists: &[(SourceTag, Vec<ItemId>)],
    caps: &SourceCaps,
    user: &UserProfile,
) -> CandidateSet {
    let authored: HashSet<ItemId> = user.authored_items.iter().copied().collect();
    let mut set = CandidateSet::new(user.user_id);
    for (tag, ids) in lists {
        for id in ids.iter().take(caps.get(*tag)) {
            if !authored.contains(id) {
                set.candidates.entry(*id).or_default().insert(*tag);
            }
        }
    }
    set
}
