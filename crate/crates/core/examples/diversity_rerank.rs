//! Round-robin re-ranking over seed interests: a score-ordered list dominated
//! by one interest is rotated so every interest appears near the top.

use std::collections::BTreeSet;

use kycrec::domain::{Category, ItemId, ListOrder, RankedEntry, RankedList, UserId};
use kycrec::rerank::{round_robin, seed_interest, SeedLabel};

fn main() {
    let declared: BTreeSet<String> = ["topic-01", "topic-04"].map(String::from).into();
    // (topic, score): topic-01 dominates the raw ranking
    let raw = [
        ("topic-01", 0.95),
        ("topic-01", 0.93),
        ("topic-01", 0.91),
        ("topic-01", 0.90),
        ("topic-04", 0.70),
        ("topic-09", 0.65),
        ("topic-04", 0.60),
        ("topic-01", 0.55),
    ];
    let list = RankedList {
        user_id: UserId(0),
        cutoff: raw.len(),
        order: ListOrder::Score,
        entries: raw
            .iter()
            .enumerate()
            .map(|(i, (_, s))| RankedEntry::new(ItemId(i as u32), *s, 0.0, 0.0))
            .collect(),
    };
    let seed_of = |id: ItemId| -> SeedLabel {
        seed_interest(Category::Tech, Some(raw[id.0 as usize].0), &declared)
    };

    let show = |l: &RankedList| -> String {
        l.entries
            .iter()
            .map(|e| format!("{}:{}", e.item_id, seed_of(e.item_id)))
            .collect::<Vec<_>>()
            .join("  ")
    };
    println!("score order: {}", show(&list));
    let top5 = round_robin(&list, 5, seed_of);
    println!("round robin: {}", show(&top5));
    let again = round_robin(&top5, 5, seed_of);
    println!("idempotent:  {}", again == top5);
}
