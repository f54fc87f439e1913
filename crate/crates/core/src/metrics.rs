//! nDCG, CTR and serendipity, and the per-category × per-condition tables.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::domain::{Category, Condition, Interaction, InteractionKind, RankedList, UserId};
use crate::error::{Error, Result};
use crate::rerank::SeedLabel;

/// Graded relevance at or above this counts as "relevant" for serendipity.
pub const RELEVANT_GRADE: u8 = 2;

/// `Σ_{i<k} (2^g_i − 1) / log₂(i + 2)` over the first `k` grades.
pub fn dcg_at_k(grades: &[u8], k: usize) -> f64 {
    grades
        .iter()
        .take(k)
        .enumerate()
        .map(|(i, g)| (2f64.powi(i32::from(*g)) - 1.0) / ((i + 2) as f64).log2())
        .sum()
}

/// nDCG@k of `ranked` against the ideal ordering of `pool`.
///
/// `pool` holds the grades of every candidate the ranked list was drawn from
/// (so it includes the ranked items). A pool with no gain scores 0.
pub fn ndcg_at_k(ranked: &[u8], pool: &[u8], k: usize) -> f64 {
    let mut ideal = pool.to_vec();
    ideal.sort_unstable_by(|a, b| b.cmp(a));
    let idcg = dcg_at_k(&ideal, k);
    if idcg == 0.0 {
        return 0.0;
    }
    dcg_at_k(ranked, k) / idcg
}

/// CTR@k over the given lists using clicks from `log`.
///
/// k = 1 is the mean click indicator of the top item; larger k is the fraction
/// of lists with at least one click in the top k. Empty lists count as 0.
pub fn ctr_at_k(log: &[Interaction], lists: &[RankedList], k: usize) -> f64 {
    if lists.is_empty() {
        return 0.0;
    }
    let clicks: HashSet<(UserId, crate::domain::ItemId)> = log
        .iter()
        .filter(|e| e.kind == InteractionKind::Click)
        .map(|e| (e.user_id, e.item_id))
        .collect();
    let hits = lists
        .iter()
        .filter(|l| {
            l.entries
                .iter()
                .take(k)
                .any(|e| clicks.contains(&(l.user_id, e.item_id)))
        })
        .count();
    hits as f64 / lists.len() as f64
}

/// Fraction of the top-k entries that are relevant and whose seed interest is
/// outside the user's history profile. An empty list scores 0.
pub fn serendipity_at_k(
    history: &BTreeSet<SeedLabel>,
    ranked: &[(SeedLabel, u8)],
    k: usize,
) -> f64 {
    let top = &ranked[..k.min(ranked.len())];
    if top.is_empty() {
        return 0.0;
    }
    let hits = top
        .iter()
        .filter(|(seed, g)| *g >= RELEVANT_GRADE && !history.contains(seed))
        .count();
    hits as f64 / top.len() as f64
}

/// Everything needed to score one emitted list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ListOutcome {
    pub condition: Condition,
    pub category: Category,
    pub user_id: UserId,
    /// Grade per emitted position.
    pub ranked_grades: Vec<u8>,
    /// Grades of the whole candidate pool.
    pub pool_grades: Vec<u8>,
    /// Click flag per emitted position.
    pub clicked: Vec<bool>,
    /// Seed interest per emitted position.
    pub seeds: Vec<SeedLabel>,
    pub history: BTreeSet<SeedLabel>,
}

impl ListOutcome {
    pub fn ndcg(&self, k: usize) -> f64 {
        ndcg_at_k(&self.ranked_grades, &self.pool_grades, k)
    }

    pub fn ctr(&self, k: usize) -> f64 {
        let hit = self.clicked.iter().take(k).any(|c| *c);
        if hit {
            1.0
        } else {
            0.0
        }
    }

    pub fn serendipity(&self, k: usize) -> f64 {
        let ranked: Vec<(SeedLabel, u8)> = self
            .seeds
            .iter()
            .cloned()
            .zip(self.ranked_grades.iter().copied())
            .collect();
        serendipity_at_k(&self.history, &ranked, k)
    }

    pub fn value(&self, metric: Metric, k: usize) -> f64 {
        match metric {
            Metric::Ndcg => self.ndcg(k),
            Metric::Ctr => self.ctr(k),
            Metric::Serendipity => self.serendipity(k),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Ndcg,
    Ctr,
    Serendipity,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Ndcg, Metric::Ctr, Metric::Serendipity];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Ndcg => "ndcg",
            Metric::Ctr => "ctr",
            Metric::Serendipity => "serendipity",
        }
    }

    pub fn heading(self) -> &'static str {
        match self {
            Metric::Ndcg => "nDCG",
            Metric::Ctr => "CTR",
            Metric::Serendipity => "Serendipity",
        }
    }

    pub fn parse(s: &str) -> Option<Metric> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
    }
}

/// Marker for a cell whose condition (or category) has no data.
pub const GAP: &str = "NA";

/// Rows are categories, columns conditions, cells the mean over users.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricTable {
    pub metric: Metric,
    pub k: usize,
    pub conditions: Vec<Condition>,
    pub rows: Vec<(Category, Vec<Option<f64>>)>,
}

impl MetricTable {
    pub fn file_stem(&self) -> String {
        format!("{}_at_{}", self.metric.name(), self.k)
    }

    pub fn title(&self) -> String {
        format!("{}@{}", self.metric.heading(), self.k)
    }

    pub fn cell(&self, category: Category, condition: Condition) -> Option<f64> {
        let col = self.conditions.iter().position(|c| *c == condition)?;
        self.rows
            .iter()
            .find(|(c, _)| *c == category)
            .and_then(|(_, cells)| cells[col])
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("category");
        for c in &self.conditions {
            out.push(',');
            out.push_str(c.name());
        }
        out.push('\n');
        for (cat, cells) in &self.rows {
            out.push_str(cat.label());
            for cell in cells {
                out.push(',');
                match cell {
                    Some(v) => write!(out, "{v:.6}").unwrap(),
                    None => out.push_str(GAP),
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(metric: Metric, k: usize, text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
        let headers = reader.headers()?.clone();
        if headers.get(0) != Some("category") {
            return Err(Error::Data(
                "table header must start with `category`".into(),
            ));
        }
        let conditions = headers
            .iter()
            .skip(1)
            .map(Condition::parse)
            .collect::<Result<Vec<_>>>()?;
        let mut rows = Vec::new();
        for rec in reader.records() {
            let rec = rec?;
            let label = rec.get(0).unwrap_or_default();
            let cat = Category::parse(label)
                .ok_or_else(|| Error::Data(format!("unknown category `{label}`")))?;
            let cells = rec
                .iter()
                .skip(1)
                .map(|c| {
                    if c == GAP {
                        Ok(None)
                    } else {
                        c.parse::<f64>()
                            .map(Some)
                            .map_err(|_| Error::Data(format!("bad cell `{c}`")))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            if cells.len() != conditions.len() {
                return Err(Error::Data(format!(
                    "row `{label}` has {} cells",
                    cells.len()
                )));
            }
            rows.push((cat, cells));
        }
        Ok(MetricTable {
            metric,
            k,
            conditions,
            rows,
        })
    }

    /// Aligned text with one row per category and one column per condition.
    pub fn to_text(&self) -> String {
        let mut headers = vec!["Category".to_string()];
        headers.extend(self.conditions.iter().map(|c| c.heading().to_string()));
        let body: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|(cat, cells)| {
                let mut row = vec![cat.label().to_string()];
                row.extend(
                    cells
                        .iter()
                        .map(|c| c.map_or_else(|| GAP.to_string(), |v| format!("{v:.3}"))),
                );
                row
            })
            .collect();
        let widths: Vec<usize> = (0..headers.len())
            .map(|i| {
                body.iter()
                    .map(|r| r[i].len())
                    .chain([headers[i].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |cells: &[String]| {
            let mut s = String::new();
            for (i, c) in cells.iter().enumerate() {
                if i == 0 {
                    write!(s, "{c:<w$}", w = widths[i]).unwrap();
                } else {
                    write!(s, "  {c:>w$}", w = widths[i]).unwrap();
                }
            }
            s.trim_end().to_string()
        };
        let mut out = format!("{}\n", self.title());
        out.push_str(&line(&headers));
        out.push('\n');
        out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
        out.push('\n');
        for r in &body {
            out.push_str(&line(r));
            out.push('\n');
        }
        out
    }
}

/// One table per (metric, k); each cell is the mean over all outcomes for that
/// (category, condition). Conditions or categories without outcomes are gaps.
pub fn build_tables(
    outcomes: &[ListOutcome],
    conditions: &[Condition],
    ks: &[usize],
    metrics: &[Metric],
) -> Vec<MetricTable> {
    // (condition, category) -> outcomes, in input order
    let mut groups: BTreeMap<(Condition, Category), Vec<&ListOutcome>> = BTreeMap::new();
    for o in outcomes {
        groups.entry((o.condition, o.category)).or_default().push(o);
    }
    let mut tables = Vec::new();
    for &metric in metrics {
        for &k in ks {
            let rows = Category::ALL
                .iter()
                .map(|cat| {
                    let cells = conditions
                        .iter()
                        .map(|cond| {
                            groups.get(&(*cond, *cat)).map(|os| {
                                // sum in a canonical order so permuting users cannot change a cell
                                let mut vals: Vec<(UserId, f64)> =
                                    os.iter().map(|o| (o.user_id, o.value(metric, k))).collect();
                                vals.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
                                vals.iter().map(|(_, v)| v).sum::<f64>() / vals.len() as f64
                            })
                        })
                        .collect();
                    (*cat, cells)
                })
                .collect();
            tables.push(MetricTable {
                metric,
                k,
                conditions: conditions.to_vec(),
                rows,
            });
        }
    }
    tables
}

/// Cell-wise mean of same-shaped table sets (for example one per seed). A
/// cell is a gap if it is a gap in any input.
pub fn mean_tables(sets: &[Vec<MetricTable>]) -> Vec<MetricTable> {
    let Some(first) = sets.first() else {
        return Vec::new();
    };
    let mut out = first.clone();
    for (ti, table) in out.iter_mut().enumerate() {
        for (ri, (_, cells)) in table.rows.iter_mut().enumerate() {
            for (ci, cell) in cells.iter_mut().enumerate() {
                *cell = sets
                    .iter()
                    .map(|s| s[ti].rows[ri].1[ci])
                    .sum::<Option<f64>>()
                    .map(|total| total / sets.len() as f64);
            }
        }
    }
    out
}

/// Long-format rows `category,condition,metric,k,value` for external plotting.
pub fn plot_data_csv(tables: &[MetricTable]) -> String {
    let mut out = String::from("category,condition,metric,k,value\n");
    for t in tables {
        for (cat, cells) in &t.rows {
            for (cond, cell) in t.conditions.iter().zip(cells) {
                let v = cell.map_or_else(|| GAP.to_string(), |v| format!("{v:.6}"));
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    cat.label(),
                    cond.name(),
                    t.metric.name(),
                    t.k,
                    v
                )
                .unwrap();
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{ItemId, ListOrder, RankedEntry};

    #[test]
    fn ideal_order_scores_one() {
        assert!((ndcg_at_k(&[3, 2, 0], &[3, 2, 0], 3) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn no_gain_scores_zero() {
        for k in 1..5 {
            assert_eq!(ndcg_at_k(&[0, 0, 0], &[0, 0, 0], k), 0.0);
        }
    }

    #[test]
    fn hand_computed_ndcg() {
        // DCG = 1/1 + 0 + 3/2 = 2.5; IDCG = 3/1 + 1/log2(3)
        let idcg = 3.0 + 1.0 / 3f64.log2();
        let got = ndcg_at_k(&[1, 0, 2], &[2, 1, 0], 3);
        assert!((got - 2.5 / idcg).abs() < 1e-12);
        assert!((got - 0.6885).abs() < 5e-5, "{got}");
    }

    fn list(user: u32, ids: &[u32]) -> RankedList {
        RankedList {
            user_id: UserId(user),
            cutoff: 5,
            order: ListOrder::Score,
            entries: ids
                .iter()
                .map(|i| RankedEntry::new(ItemId(*i), 1.0, 0.0, 0.0))
                .collect(),
        }
    }

    fn click(user: u32, item: u32) -> Interaction {
        Interaction {
            user_id: UserId(user),
            item_id: ItemId(item),
            kind: InteractionKind::Click,
            position: 1,
            tick: 0,
        }
    }

    #[test]
    fn ctr_counts_users_with_a_click_in_the_top_k() {
        let lists: Vec<RankedList> = (0..4).map(|u| list(u, &[10, 11, 12, 13])).collect();
        assert_eq!(ctr_at_k(&[], &lists, 3), 0.0);
        let log = vec![click(0, 12), click(1, 10), click(2, 13)];
        assert_eq!(ctr_at_k(&log, &lists, 3), 0.5);
        assert_eq!(ctr_at_k(&log, &lists, 1), 0.25);
        let all_top: Vec<_> = (0..4).map(|u| click(u, 10)).collect();
        assert_eq!(ctr_at_k(&all_top, &lists, 1), 1.0);
        // an empty list counts as a miss
        let mut with_empty = lists.clone();
        with_empty.push(list(9, &[]));
        assert_eq!(ctr_at_k(&all_top, &with_empty, 1), 0.8);
    }

    #[test]
    fn serendipity_counts_relevant_unexpected_items() {
        let tech = SeedLabel::Category(Category::Tech);
        let topic = SeedLabel::Topic("topic-01".into());
        let history = BTreeSet::from([tech.clone()]);
        let all_known = vec![(tech.clone(), 3); 5];
        assert_eq!(serendipity_at_k(&history, &all_known, 5), 0.0);
        let all_new = vec![(topic.clone(), 2); 5];
        assert_eq!(serendipity_at_k(&history, &all_new, 5), 1.0);
        let mixed = vec![
            (topic.clone(), 3),
            (tech.clone(), 3),
            (topic.clone(), 1),
            (topic.clone(), 2),
            (tech, 0),
        ];
        assert!((serendipity_at_k(&history, &mixed, 5) - 0.4).abs() < 1e-15);
        assert_eq!(serendipity_at_k(&BTreeSet::new(), &all_known, 5), 1.0);
    }

    fn outcome(cond: Condition, cat: Category, user: u32, grades: &[u8]) -> ListOutcome {
        ListOutcome {
            condition: cond,
            category: cat,
            user_id: UserId(user),
            ranked_grades: grades.to_vec(),
            pool_grades: grades.to_vec(),
            clicked: grades.iter().map(|g| *g >= 2).collect(),
            seeds: vec![SeedLabel::Category(cat); grades.len()],
            history: BTreeSet::new(),
        }
    }

    #[test]
    fn single_outcome_table_cell_is_that_outcome() {
        let o = outcome(Condition::NoKyc, Category::News, 1, &[1, 3, 0]);
        let tables = build_tables(
            std::slice::from_ref(&o),
            &[Condition::NoKyc],
            &[3],
            &[Metric::Ndcg],
        );
        assert_eq!(tables.len(), 1);
        assert_eq!(
            tables[0].cell(Category::News, Condition::NoKyc),
            Some(o.ndcg(3))
        );
        assert_eq!(tables[0].cell(Category::Tech, Condition::NoKyc), None);
    }

    #[test]
    fn hand_built_table() {
        let os = vec![
            outcome(Condition::Baseline, Category::Ad, 1, &[0, 2]),
            outcome(Condition::Baseline, Category::Ad, 2, &[2, 0]),
            outcome(Condition::NoKyc, Category::Ad, 1, &[3]),
        ];
        let conds = [Condition::Baseline, Condition::NoKyc, Condition::BasicKyc];
        let t = &build_tables(&os, &conds, &[1], &[Metric::Ndcg, Metric::Ctr])[..];
        // user 1 baseline: pool {2,0}, ranked [0,2] -> 0; user 2 -> 1
        assert_eq!(t[0].cell(Category::Ad, Condition::Baseline), Some(0.5));
        assert_eq!(t[0].cell(Category::Ad, Condition::NoKyc), Some(1.0));
        assert_eq!(t[0].cell(Category::Ad, Condition::BasicKyc), None);
        assert_eq!(t[1].cell(Category::Ad, Condition::Baseline), Some(0.5));
    }

    #[test]
    fn permuting_outcomes_does_not_change_tables() {
        let mut os: Vec<ListOutcome> = (0..7)
            .map(|u| {
                outcome(
                    Condition::BasicKyc,
                    Category::Tech,
                    u,
                    &[(u % 4) as u8, 1, 3, 0, 2],
                )
            })
            .collect();
        let a = build_tables(&os, &Condition::ALL, &[1, 3, 5], &Metric::ALL);
        os.reverse();
        os.swap(1, 4);
        let b = build_tables(&os, &Condition::ALL, &[1, 3, 5], &Metric::ALL);
        assert_eq!(a, b);
    }

    #[test]
    fn csv_round_trips_with_gaps() {
        let os = vec![outcome(Condition::NoKyc, Category::Gossip, 1, &[2, 1])];
        let t = build_tables(&os, &Condition::ALL, &[3], &[Metric::Ndcg]).remove(0);
        let csv = t.to_csv();
        assert!(
            csv.starts_with("category,Baseline,NoKyc,BasicKyc,AdvancedKyc,AdvancedKycCircles\n")
        );
        assert!(csv.contains("Gossip,NA,1.000000,NA,NA,NA"));
        let back = MetricTable::from_csv(Metric::Ndcg, 3, &csv).unwrap();
        assert_eq!(back.to_csv(), csv);
        let text = t.to_text();
        assert!(text.starts_with("nDCG@3\nCategory"));
        assert!(text.contains("Ours (Adv. KYC + Circles)"));
    }
}
