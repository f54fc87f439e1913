//! Score breakdowns: relevance, the social boost for followed content, and the
//! exploration bonus for high-quality items that have rarely been shown.

use std::collections::{BTreeSet, HashMap};

use kycrec::domain::{AccountId, Category, ContentItem, ItemId};
use kycrec::ranking::{score, ExposureStats, RankingWeights};
use kycrec::recall::SourceTag;
use kycrec::vector::normalize;

fn item(id: u32, popularity: u64) -> ContentItem {
    ContentItem {
        item_id: ItemId(id),
        category: Category::Tech,
        features: vec![0.0; 3],
        author_id: AccountId(0),
        popularity,
        created_at: 0,
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let user = normalize(&[1.0, 0.2, 0.0]);
    let weights = RankingWeights::default();
    // under 5 impressions is underexposed; popularity 100 and up is high quality
    let exposure = ExposureStats::new(
        HashMap::from([(ItemId(1), 40), (ItemId(2), 2), (ItemId(3), 1)]),
        5,
        100,
    );

    let cases = [
        (
            "on-topic, well exposed",
            item(1, 500),
            vec![1.0, 0.1, 0.0],
            BTreeSet::from([SourceTag::Knn]),
        ),
        (
            "on-topic, underexposed",
            item(2, 300),
            vec![1.0, 0.1, 0.0],
            BTreeSet::from([SourceTag::Knn]),
        ),
        (
            "adjacent, from a followee",
            item(3, 20),
            vec![0.6, 0.8, 0.0],
            BTreeSet::from([SourceTag::Social1]),
        ),
        (
            "adjacent, two hops out",
            item(4, 20),
            vec![0.6, 0.8, 0.0],
            BTreeSet::from([SourceTag::Social2]),
        ),
        (
            "off-topic",
            item(5, 900),
            vec![0.0, 0.0, 1.0],
            BTreeSet::from([SourceTag::Popularity]),
        ),
    ];
    println!(
        "{:<26} {:>9} {:>7} {:>8} {:>7}",
        "", "relevance", "social", "explore", "total"
    );
    for (name, it, emb, tags) in cases {
        let s = score(&user, &it, &normalize(&emb), &tags, &exposure, &weights)?;
        println!(
            "{name:<26} {:>9.3} {:>7.3} {:>8.3} {:>7.3}",
            s.relevance, s.social_boost, s.exploration_bonus, s.total
        );
    }
    Ok(())
}
