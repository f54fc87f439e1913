//! Round-robin diversity re-ranking over seed interests.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::domain::{Category, ItemId, ListOrder, RankedEntry, RankedList};

/// Grouping key for the rotation: a declared topic tag or the item's category.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedLabel {
    Category(Category),
    Topic(String),
}

impl fmt::Display for SeedLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeedLabel::Category(c) => write!(f, "{c}"),
            SeedLabel::Topic(t) => f.write_str(t),
        }
    }
}

/// The item's declared-tag match when there is one, otherwise its category.
pub fn seed_interest(
    category: Category,
    topic: Option<&str>,
    declared_tags: &BTreeSet<String>,
) -> SeedLabel {
    match topic {
        Some(t) if declared_tags.contains(t) => SeedLabel::Topic(t.to_string()),
        _ => SeedLabel::Category(category),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RerankConfig {
    pub enabled: bool,
    /// How many ranked entries are handed to the rotation before it emits the top N.
    pub depth: usize,
}

impl Default for RerankConfig {
    fn default() -> Self {
        RerankConfig {
            enabled: true,
            depth: 10,
        }
    }
}

/// Rotates through seed-interest groups.
///
/// Entries are grouped by `seed_of` keeping their in-group order. Groups are
/// visited in order of their best member's score (first appearance breaks
/// ties); each cycle takes one entry per non-exhausted group until `n`
/// entries are emitted.
pub fn round_robin(
    list: &RankedList,
    n: usize,
    seed_of: impl Fn(ItemId) -> SeedLabel,
) -> RankedList {
    let mut groups: Vec<(SeedLabel, Vec<&RankedEntry>)> = Vec::new();
    for e in &list.entries {
        let label = seed_of(e.item_id);
        match groups.iter_mut().find(|(l, _)| *l == label) {
            Some((_, members)) => members.push(e),
            None => groups.push((label, vec![e])),
        }
    }
    let best = |members: &[&RankedEntry]| {
        members
            .iter()
            .map(|e| e.total_score)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    // stable: equal best scores keep first-appearance order
    groups.sort_by(|a, b| best(&b.1).total_cmp(&best(&a.1)));

    let target = n.min(list.entries.len());
    let mut entries = Vec::with_capacity(target);
    let mut round = 0;
    while entries.len() < target {
        for (_, members) in &groups {
            if entries.len() == target {
                break;
            }
            if let Some(e) = members.get(round) {
                entries.push((*e).clone());
            }
        }
        round += 1;
    }
    RankedList {
        user_id: list.user_id,
        cutoff: n,
        order: ListOrder::Diversified,
        entries,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::UserId;

    fn list(scores: &[(u32, f64)]) -> RankedList {
        RankedList {
            user_id: UserId(0),
            cutoff: scores.len(),
            order: ListOrder::Score,
            entries: scores
                .iter()
                .map(|(id, s)| RankedEntry::new(ItemId(*id), *s, 0.0, 0.0))
                .collect(),
        }
    }

    fn by_hundreds(id: ItemId) -> SeedLabel {
        SeedLabel::Topic(format!("g{}", id.0 / 100))
    }

    #[test]
    fn rotation_interleaves_groups() {
        // A = {a1=100, a2=101}, B = {b1=200}; a1 > b1 > a2
        let l = list(&[(100, 0.9), (200, 0.8), (101, 0.7)]);
        let out = round_robin(&l, 3, by_hundreds);
        assert_eq!(out.item_ids(), vec![ItemId(100), ItemId(200), ItemId(101)]);
    }

    #[test]
    fn single_group_truncates() {
        let l = list(&[(1, 0.9), (2, 0.8), (3, 0.7)]);
        let out = round_robin(&l, 2, |_| SeedLabel::Category(Category::Tech));
        assert_eq!(out.item_ids(), vec![ItemId(1), ItemId(2)]);
    }

    #[test]
    fn three_by_three_cycles_through_every_group() {
        let l = list(&[
            (100, 0.99),
            (101, 0.98),
            (102, 0.97),
            (200, 0.96),
            (201, 0.95),
            (300, 0.94),
            (202, 0.93),
            (301, 0.92),
            (302, 0.91),
        ]);
        let out = round_robin(&l, 9, by_hundreds);
        let ids: Vec<u32> = out.item_ids().iter().map(|i| i.0).collect();
        assert_eq!(ids, vec![100, 200, 300, 101, 201, 301, 102, 202, 302]);
        for cycle in ids.chunks(3) {
            let groups: BTreeSet<u32> = cycle.iter().map(|i| i / 100).collect();
            assert_eq!(groups.len(), 3);
        }
    }

    #[test]
    fn declared_tag_overrides_category() {
        let tags = BTreeSet::from(["topic-03".to_string()]);
        assert_eq!(
            seed_interest(Category::Tech, Some("topic-03"), &tags),
            SeedLabel::Topic("topic-03".into())
        );
        assert_eq!(
            seed_interest(Category::Tech, Some("topic-04"), &tags),
            SeedLabel::Category(Category::Tech)
        );
        assert_eq!(
            seed_interest(Category::Ad, None, &tags),
            SeedLabel::Category(Category::Ad)
        );
    }
}
