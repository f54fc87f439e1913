//! Shared domain types: content, users, accounts, the follow graph,
//! interactions and ranked lists.
//!
//! Everything here is immutable once built. The graph and the ranked list
//! validate their invariants at construction time; user profiles are checked
//! with [`validate_profile`], which reports violations as data.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

macro_rules! id_newtype {
    ($(#[$meta:meta])* $name:ident, $prefix:literal) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub u32);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($prefix, "{}"), self.0)
            }
        }
    };
}

id_newtype!(
    /// Opaque content identifier. Ordering is the deterministic tie-break everywhere.
    ItemId,
    "i"
);
id_newtype!(UserId, "u");
id_newtype!(AccountId, "a");

/// The five content verticals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Category {
    Ad,
    News,
    Gossip,
    Sharing,
    Tech,
}

impl Category {
    pub const ALL: [Category; 5] = [
        Category::Ad,
        Category::News,
        Category::Gossip,
        Category::Sharing,
        Category::Tech,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Category::Ad => "Ad",
            Category::News => "News",
            Category::Gossip => "Gossip",
            Category::Sharing => "Sharing",
            Category::Tech => "Tech",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn parse(s: &str) -> Option<Category> {
        Category::ALL
            .into_iter()
            .find(|c| c.label().eq_ignore_ascii_case(s.trim()))
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Depth of user context available to the system. The derive order is the tier order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum KycTier {
    NoKyc,
    BasicKyc,
    AdvancedKyc,
    AdvancedKycCircles,
}

impl KycTier {
    pub const ALL: [KycTier; 4] = [
        KycTier::NoKyc,
        KycTier::BasicKyc,
        KycTier::AdvancedKyc,
        KycTier::AdvancedKycCircles,
    ];
}

/// Experimental arm: the unpersonalized baseline or one KYC tier of the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Condition {
    Baseline,
    NoKyc,
    BasicKyc,
    AdvancedKyc,
    AdvancedKycCircles,
}

impl Condition {
    pub const ALL: [Condition; 5] = [
        Condition::Baseline,
        Condition::NoKyc,
        Condition::BasicKyc,
        Condition::AdvancedKyc,
        Condition::AdvancedKycCircles,
    ];

    /// Machine name used in files and on the command line.
    pub fn name(self) -> &'static str {
        match self {
            Condition::Baseline => "Baseline",
            Condition::NoKyc => "NoKyc",
            Condition::BasicKyc => "BasicKyc",
            Condition::AdvancedKyc => "AdvancedKyc",
            Condition::AdvancedKycCircles => "AdvancedKycCircles",
        }
    }

    /// Column heading for report tables.
    pub fn heading(self) -> &'static str {
        match self {
            Condition::Baseline => "Baseline",
            Condition::NoKyc => "Ours (No KYC)",
            Condition::BasicKyc => "Ours (Basic KYC)",
            Condition::AdvancedKyc => "Ours (Advanced KYC)",
            Condition::AdvancedKycCircles => "Ours (Adv. KYC + Circles)",
        }
    }

    /// Profile tier the pipeline may observe under this condition.
    pub fn tier(self) -> KycTier {
        match self {
            Condition::Baseline | Condition::NoKyc => KycTier::NoKyc,
            Condition::BasicKyc => KycTier::BasicKyc,
            Condition::AdvancedKyc => KycTier::AdvancedKyc,
            Condition::AdvancedKycCircles => KycTier::AdvancedKycCircles,
        }
    }

    pub fn parse(s: &str) -> Result<Condition> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        Condition::ALL
            .into_iter()
            .find(|c| c.name().to_ascii_lowercase() == key)
            .ok_or_else(|| Error::UnknownCondition(s.to_string()))
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gender {
    Female,
    Male,
    Unspecified,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Demographics {
    /// Years, expected in `[18, 60]`.
    pub age: u8,
    /// Occupation class index.
    pub occupation: u16,
    /// Region index.
    pub region: u16,
    /// Annual income in currency units.
    pub income: f64,
    pub gender: Gender,
}

pub const MIN_AGE: u8 = 18;
pub const MAX_AGE: u8 = 60;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserProfile {
    pub user_id: UserId,
    pub demographics: Option<Demographics>,
    pub declared_tags: BTreeSet<String>,
    pub bio_keywords: BTreeSet<String>,
    pub authored_items: Vec<ItemId>,
    pub followed: Vec<AccountId>,
    pub kyc_tier: KycTier,
}

impl UserProfile {
    /// The subset of this profile observable at `tier`.
    ///
    /// Fields above the requested tier are cleared; `tier` must not exceed the
    /// profile's own tier (a profile never gains context it does not hold).
    pub fn at_tier(&self, tier: KycTier) -> UserProfile {
        let tier = tier.min(self.kyc_tier);
        let mut view = self.clone();
        view.kyc_tier = tier;
        if tier < KycTier::BasicKyc {
            view.demographics = None;
            view.declared_tags.clear();
        }
        if tier < KycTier::AdvancedKyc {
            view.bio_keywords.clear();
            view.authored_items.clear();
        }
        if tier < KycTier::AdvancedKycCircles {
            view.followed.clear();
        }
        view
    }

    /// Number of populated context fields.
    pub fn observable_field_count(&self) -> usize {
        [
            self.demographics.is_some(),
            !self.declared_tags.is_empty(),
            !self.bio_keywords.is_empty(),
            !self.authored_items.is_empty(),
            !self.followed.is_empty(),
        ]
        .iter()
        .filter(|b| **b)
        .count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ProfileViolation {
    DeclaredTagsEmpty(KycTier),
    DeclaredTagsAboveTier(KycTier),
    BioKeywordsAboveTier(KycTier),
    AuthoredItemsAboveTier(KycTier),
    FollowedAboveTier(KycTier),
    DemographicsMissing(KycTier),
    AgeOutOfRange(u8),
    NegativeIncome,
    DuplicateFollowed(AccountId),
}

impl fmt::Display for ProfileViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DeclaredTagsEmpty(t) => write!(f, "declared_tags empty at {t:?}"),
            Self::DeclaredTagsAboveTier(t) => write!(f, "declared_tags present at {t:?}"),
            Self::BioKeywordsAboveTier(t) => write!(f, "bio_keywords present at {t:?}"),
            Self::AuthoredItemsAboveTier(t) => write!(f, "authored_items present at {t:?}"),
            Self::FollowedAboveTier(t) => write!(f, "followed present at {t:?}"),
            Self::DemographicsMissing(t) => write!(f, "demographics missing at {t:?}"),
            Self::AgeOutOfRange(a) => write!(f, "age {a} outside [{MIN_AGE}, {MAX_AGE}]"),
            Self::NegativeIncome => f.write_str("income is negative"),
            Self::DuplicateFollowed(a) => write!(f, "account {a} followed twice"),
        }
    }
}

/// Every violated tier or field invariant of `profile`. Empty means valid.
pub fn validate_profile(profile: &UserProfile) -> Vec<ProfileViolation> {
    use ProfileViolation::*;
    let tier = profile.kyc_tier;
    let mut out = Vec::new();

    if tier >= KycTier::BasicKyc {
        if profile.declared_tags.is_empty() {
            out.push(DeclaredTagsEmpty(tier));
        }
        if profile.demographics.is_none() {
            out.push(DemographicsMissing(tier));
        }
    } else if !profile.declared_tags.is_empty() {
        out.push(DeclaredTagsAboveTier(tier));
    }
    if tier < KycTier::AdvancedKyc {
        if !profile.bio_keywords.is_empty() {
            out.push(BioKeywordsAboveTier(tier));
        }
        if !profile.authored_items.is_empty() {
            out.push(AuthoredItemsAboveTier(tier));
        }
    }
    if tier < KycTier::AdvancedKycCircles && !profile.followed.is_empty() {
        out.push(FollowedAboveTier(tier));
    }
    if let Some(d) = &profile.demographics {
        if !(MIN_AGE..=MAX_AGE).contains(&d.age) {
            out.push(AgeOutOfRange(d.age));
        }
        if d.income < 0.0 {
            out.push(NegativeIncome);
        }
    }
    let mut seen = BTreeSet::new();
    for a in &profile.followed {
        if !seen.insert(*a) {
            out.push(DuplicateFollowed(*a));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContentItem {
    pub item_id: ItemId,
    pub category: Category,
    pub features: Vec<f64>,
    pub author_id: AccountId,
    pub popularity: u64,
    /// Discrete creation tick.
    pub created_at: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccountKind {
    Individual,
    Creator,
    Enterprise,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Account {
    pub account_id: AccountId,
    pub kind: AccountKind,
    pub interest_vector: Vec<f64>,
}

/// Directed follow graph (follower -> followee) over accounts of every kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GraphRecord", into = "GraphRecord")]
pub struct SocialGraph {
    accounts: Vec<Account>,
    index: HashMap<AccountId, usize>,
    /// Sorted followee node indices per node.
    followees: Vec<Vec<usize>>,
}

/// Serialized form of a [`SocialGraph`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphRecord {
    pub accounts: Vec<Account>,
    pub edges: Vec<(AccountId, AccountId)>,
}

impl SocialGraph {
    /// Builds a graph; rejects self-loops, dangling edges and duplicate accounts.
    /// Duplicate edges collapse to one.
    pub fn new(accounts: Vec<Account>, edges: &[(AccountId, AccountId)]) -> Result<Self> {
        let mut index = HashMap::with_capacity(accounts.len());
        for (i, a) in accounts.iter().enumerate() {
            if index.insert(a.account_id, i).is_some() {
                return Err(Error::InvalidGraph(format!(
                    "duplicate account {}",
                    a.account_id
                )));
            }
        }
        let mut followees = vec![Vec::new(); accounts.len()];
        for &(from, to) in edges {
            if from == to {
                return Err(Error::InvalidGraph(format!("self-loop on {from}")));
            }
            let f = *index.get(&from).ok_or(Error::UnknownAccount(from))?;
            let t = *index.get(&to).ok_or(Error::UnknownAccount(to))?;
            followees[f].push(t);
        }
        for list in &mut followees {
            list.sort_unstable();
            list.dedup();
        }
        Ok(SocialGraph {
            accounts,
            index,
            followees,
        })
    }

    pub fn len(&self) -> usize {
        self.accounts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.accounts.is_empty()
    }

    pub fn accounts(&self) -> &[Account] {
        &self.accounts
    }

    pub fn account(&self, id: AccountId) -> Option<&Account> {
        self.index.get(&id).map(|&i| &self.accounts[i])
    }

    pub fn node_index(&self, id: AccountId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    /// Followee node indices of node `i`, ascending.
    pub fn followee_indices(&self, i: usize) -> &[usize] {
        &self.followees[i]
    }

    /// Accounts followed by `id`, in ascending node order. Unknown ids have none.
    pub fn followees(&self, id: AccountId) -> impl Iterator<Item = AccountId> + '_ {
        self.node_index(id)
            .map(|i| self.followees[i].as_slice())
            .unwrap_or(&[])
            .iter()
            .map(|&j| self.accounts[j].account_id)
    }

    pub fn edges(&self) -> impl Iterator<Item = (AccountId, AccountId)> + '_ {
        self.followees.iter().enumerate().flat_map(move |(i, fs)| {
            fs.iter()
                .map(move |&j| (self.accounts[i].account_id, self.accounts[j].account_id))
        })
    }

    pub fn edge_count(&self) -> usize {
        self.followees.iter().map(Vec::len).sum()
    }

    /// Same topology with every node's interest vector replaced (node order).
    pub fn with_interest_vectors(&self, vectors: Vec<Vec<f64>>) -> Result<SocialGraph> {
        if vectors.len() != self.accounts.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} interest vectors, got {}",
                self.accounts.len(),
                vectors.len()
            )));
        }
        let mut g = self.clone();
        for (a, v) in g.accounts.iter_mut().zip(vectors) {
            a.interest_vector = v;
        }
        Ok(g)
    }
}

impl TryFrom<GraphRecord> for SocialGraph {
    type Error = Error;

    fn try_from(r: GraphRecord) -> Result<Self> {
        SocialGraph::new(r.accounts, &r.edges)
    }
}

impl From<SocialGraph> for GraphRecord {
    fn from(g: SocialGraph) -> Self {
        let edges = g.edges().collect();
        GraphRecord {
            accounts: g.accounts,
            edges,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionKind {
    Impression,
    Click,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interaction {
    pub user_id: UserId,
    pub item_id: ItemId,
    pub kind: InteractionKind,
    /// 1-based rank at impression time.
    pub position: u32,
    pub tick: u64,
}

/// Checks that every click follows an impression of the same (user, item)
/// and that positions are 1-based. Returns a description of each violation.
pub fn validate_log(log: &[Interaction]) -> Vec<String> {
    let mut impressed = BTreeSet::new();
    let mut out = Vec::new();
    for (n, ev) in log.iter().enumerate() {
        if ev.position == 0 {
            out.push(format!("record {n}: position 0"));
        }
        match ev.kind {
            InteractionKind::Impression => {
                impressed.insert((ev.user_id, ev.item_id));
            }
            InteractionKind::Click => {
                if !impressed.contains(&(ev.user_id, ev.item_id)) {
                    out.push(format!(
                        "record {n}: click on {} by {} without impression",
                        ev.item_id, ev.user_id
                    ));
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEntry {
    pub item_id: ItemId,
    pub total_score: f64,
    pub relevance_score: f64,
    pub social_boost: f64,
    pub exploration_bonus: f64,
}

impl RankedEntry {
    /// Builds an entry whose total is the sum of its parts in one fixed order.
    pub fn new(item_id: ItemId, relevance: f64, social: f64, exploration: f64) -> Self {
        RankedEntry {
            item_id,
            total_score: compose_total(relevance, social, exploration),
            relevance_score: relevance,
            social_boost: social,
            exploration_bonus: exploration,
        }
    }
}

/// The accumulation order used for every total score.
pub fn compose_total(relevance: f64, social: f64, exploration: f64) -> f64 {
    (relevance + social) + exploration
}

/// How entries in a [`RankedList`] are ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ListOrder {
    /// Total score descending, ties by ascending item id.
    Score,
    /// Rearranged by the diversity pass; in-group score order preserved.
    Diversified,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedList {
    pub user_id: UserId,
    pub cutoff: usize,
    pub order: ListOrder,
    pub entries: Vec<RankedEntry>,
}

impl RankedList {
    pub fn empty(user_id: UserId, cutoff: usize) -> Self {
        RankedList {
            user_id,
            cutoff,
            order: ListOrder::Score,
            entries: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn item_ids(&self) -> Vec<ItemId> {
        self.entries.iter().map(|e| e.item_id).collect()
    }

    /// Every violated list invariant. Sort order is only checked for score-ordered lists.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.entries.len() > self.cutoff {
            out.push(format!(
                "{} entries exceed cutoff {}",
                self.entries.len(),
                self.cutoff
            ));
        }
        let mut seen = BTreeSet::new();
        for e in &self.entries {
            if !seen.insert(e.item_id) {
                out.push(format!("duplicate {}", e.item_id));
            }
            if e.total_score
                != compose_total(e.relevance_score, e.social_boost, e.exploration_bonus)
            {
                out.push(format!("score decomposition broken for {}", e.item_id));
            }
        }
        if self.order == ListOrder::Score {
            for w in self.entries.windows(2) {
                if score_order(&w[0], &w[1]) == std::cmp::Ordering::Greater {
                    out.push(format!(
                        "{} ranked above {} out of order",
                        w[0].item_id, w[1].item_id
                    ));
                }
            }
        }
        out
    }
}

/// Total descending, then item id ascending.
pub fn score_order(a: &RankedEntry, b: &RankedEntry) -> std::cmp::Ordering {
    b.total_score
        .total_cmp(&a.total_score)
        .then(a.item_id.cmp(&b.item_id))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(tier: KycTier) -> UserProfile {
        UserProfile {
            user_id: UserId(1),
            demographics: None,
            declared_tags: BTreeSet::new(),
            bio_keywords: BTreeSet::new(),
            authored_items: vec![],
            followed: vec![],
            kyc_tier: tier,
        }
    }

    fn demo() -> Demographics {
        Demographics {
            age: 30,
            occupation: 2,
            region: 1,
            income: 90_000.0,
            gender: Gender::Female,
        }
    }

    #[test]
    fn conditions_parse_loosely() {
        assert_eq!(Condition::parse("baseline").unwrap(), Condition::Baseline);
        assert_eq!(
            Condition::parse("advanced-kyc-circles").unwrap(),
            Condition::AdvancedKycCircles
        );
        assert!(matches!(
            Condition::parse("Premium"),
            Err(Error::UnknownCondition(_))
        ));
    }

    #[test]
    fn no_kyc_with_no_tags_is_valid() {
        assert!(validate_profile(&profile(KycTier::NoKyc)).is_empty());
    }

    #[test]
    fn basic_kyc_requires_declared_tags() {
        let mut p = profile(KycTier::BasicKyc);
        p.demographics = Some(demo());
        let v = validate_profile(&p);
        assert_eq!(
            v,
            vec![ProfileViolation::DeclaredTagsEmpty(KycTier::BasicKyc)]
        );
        assert_eq!(v[0].to_string(), "declared_tags empty at BasicKyc");
    }

    #[test]
    fn circles_with_hundred_follows_is_valid() {
        let mut p = profile(KycTier::AdvancedKycCircles);
        p.demographics = Some(demo());
        p.declared_tags.insert("topic-01".into());
        p.bio_keywords.insert("topic-02".into());
        p.followed = (0..100).map(AccountId).collect();
        assert!(validate_profile(&p).is_empty());
    }

    #[test]
    fn context_above_tier_is_reported() {
        let mut p = profile(KycTier::BasicKyc);
        p.demographics = Some(Demographics { age: 70, ..demo() });
        p.declared_tags.insert("t".into());
        p.bio_keywords.insert("b".into());
        p.followed = vec![AccountId(3), AccountId(3)];
        let v = validate_profile(&p);
        assert!(v.contains(&ProfileViolation::BioKeywordsAboveTier(KycTier::BasicKyc)));
        assert!(v.contains(&ProfileViolation::FollowedAboveTier(KycTier::BasicKyc)));
        assert!(v.contains(&ProfileViolation::AgeOutOfRange(70)));
        assert!(v.contains(&ProfileViolation::DuplicateFollowed(AccountId(3))));
    }

    #[test]
    fn tier_views_only_grow() {
        let mut p = profile(KycTier::AdvancedKycCircles);
        p.demographics = Some(demo());
        p.declared_tags.insert("x".into());
        p.bio_keywords.insert("y".into());
        p.authored_items = vec![ItemId(4)];
        p.followed = vec![AccountId(9)];
        let counts: Vec<usize> = KycTier::ALL
            .iter()
            .map(|t| p.at_tier(*t).observable_field_count())
            .collect();
        assert_eq!(counts, vec![0, 2, 4, 5]);
        for t in KycTier::ALL {
            assert!(validate_profile(&p.at_tier(t)).is_empty(), "{t:?}");
        }
    }

    fn acct(id: u32) -> Account {
        Account {
            account_id: AccountId(id),
            kind: AccountKind::Creator,
            interest_vector: vec![1.0, 0.0],
        }
    }

    #[test]
    fn graph_rejects_self_loops_and_dangling_edges() {
        let accts = vec![acct(1), acct(2)];
        assert!(matches!(
            SocialGraph::new(accts.clone(), &[(AccountId(1), AccountId(1))]),
            Err(Error::InvalidGraph(_))
        ));
        assert!(matches!(
            SocialGraph::new(accts.clone(), &[(AccountId(1), AccountId(7))]),
            Err(Error::UnknownAccount(AccountId(7)))
        ));
        let g = SocialGraph::new(
            accts,
            &[(AccountId(1), AccountId(2)), (AccountId(1), AccountId(2))],
        )
        .unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(
            g.followees(AccountId(1)).collect::<Vec<_>>(),
            vec![AccountId(2)]
        );
        assert_eq!(g.followees(AccountId(2)).count(), 0);
    }

    #[test]
    fn graph_serializes_as_accounts_and_edges() {
        let g = SocialGraph::new(vec![acct(1), acct(2)], &[(AccountId(2), AccountId(1))]).unwrap();
        let json = serde_json::to_string(&g).unwrap();
        assert!(json.contains("\"edges\":[[2,1]]"), "{json}");
        let back: SocialGraph = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn click_without_impression_is_flagged() {
        let click = Interaction {
            user_id: UserId(1),
            item_id: ItemId(2),
            kind: InteractionKind::Click,
            position: 1,
            tick: 0,
        };
        assert_eq!(validate_log(std::slice::from_ref(&click)).len(), 1);
        let imp = Interaction {
            kind: InteractionKind::Impression,
            ..click.clone()
        };
        assert!(validate_log(&[imp, click]).is_empty());
    }

    #[test]
    fn ranked_list_invariants() {
        let mut list = RankedList::empty(UserId(1), 3);
        list.entries
            .push(RankedEntry::new(ItemId(2), 0.5, 0.25, 0.0));
        list.entries
            .push(RankedEntry::new(ItemId(1), 0.5, 0.25, 0.0));
        assert_eq!(list.violations().len(), 1);
        list.entries.swap(0, 1);
        assert!(list.violations().is_empty());
        list.entries[0].total_score += 1e-9;
        assert!(!list.violations().is_empty());
    }
}
