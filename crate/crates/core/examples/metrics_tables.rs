//! Metric primitives on hand-made data, then category-by-condition tables with a gap
//! column and the long-form plot data.

use std::collections::BTreeSet;

use kycrec::domain::{Category, Condition, UserId};
use kycrec::metrics::{
    build_tables, ndcg_at_k, plot_data_csv, serendipity_at_k, ListOutcome, Metric,
};
use kycrec::rerank::SeedLabel;

fn outcome(condition: Condition, category: Category, user: u32, ranked: &[u8]) -> ListOutcome {
    ListOutcome {
        condition,
        category,
        user_id: UserId(user),
        ranked_grades: ranked.to_vec(),
        pool_grades: [ranked, &[3, 2]].concat(),
        clicked: ranked.iter().map(|g| *g >= 2).collect(),
        seeds: ranked
            .iter()
            .map(|_| SeedLabel::Category(category))
            .collect(),
        history: BTreeSet::new(),
    }
}

fn main() {
    println!(
        "nDCG@3 of [1, 0, 2] against pool {{2, 1, 0}}: {:.4}",
        ndcg_at_k(&[1, 0, 2], &[2, 1, 0], 3)
    );

    let history = BTreeSet::from([SeedLabel::Category(Category::Tech)]);
    let ranked = [
        (SeedLabel::Category(Category::Tech), 3),
        (SeedLabel::Topic("topic-07".into()), 2),
        (SeedLabel::Topic("topic-02".into()), 0),
    ];
    println!(
        "serendipity@3: {:.3}",
        serendipity_at_k(&history, &ranked, 3)
    );

    let mut outcomes = Vec::new();
    for (u, grades) in [[0, 2, 1], [3, 0, 0], [1, 1, 2]].iter().enumerate() {
        for cat in Category::ALL {
            outcomes.push(outcome(Condition::Baseline, cat, u as u32, &[0, 1, 0]));
            outcomes.push(outcome(Condition::AdvancedKyc, cat, u as u32, grades));
        }
    }
    let tables = build_tables(
        &outcomes,
        &Condition::ALL,
        &[1, 3],
        &[Metric::Ndcg, Metric::Ctr],
    );
    for t in &tables {
        println!("\n{}", t.to_text());
    }
    println!("{}", tables[1].to_csv());
    println!(
        "{}",
        plot_data_csv(&tables[..1])
            .lines()
            .take(4)
            .collect::<Vec<_>>()
            .join("\n")
    );
}
