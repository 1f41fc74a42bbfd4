//! Brute-force reference implementations used by tests and the hidden
//! debug subcommand: exhaustive CAR mining by level-wise itemset
//! enumeration and naive frequency recovery by full dataset scans. Every
//! statistic here is recomputed from scratch, independently of the tree
//! code paths it is used to check.

use crate::capgrowth::Car;
use crate::captree::support_count_threshold;
use crate::dataset::{ClassId, Dataset, ItemId};
use crate::error::{Error, Result};
use crate::measures::{FreqArray, RuleStats};

/// Hard cap on the number of frequent items the exhaustive miner accepts.
const MAX_FREQUENT_ITEMS: usize = 20;

/// Class frequencies of the transactions containing the whole itemset,
/// by full scan. The empty itemset covers every labeled transaction.
pub fn naive_itemset_freqs(d: &Dataset, itemset: &[ItemId]) -> FreqArray {
    let mut sorted = itemset.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut freqs = FreqArray::zeros(d.n_classes());
    for t in d.transactions() {
        if let Some(label) = t.label() {
            if t.contains_all(&sorted) {
                freqs.increment(label);
            }
        }
    }
    freqs
}

/// Enumerates every class association rule meeting the support and
/// confidence thresholds, Apriori-style over the frequent items, with
/// exact statistics from full scans. Desk-scale only: errors out beyond
/// [`MAX_FREQUENT_ITEMS`] frequent items.
pub fn mine_all_cars(d: &Dataset, minsup: f64, minconf: f64) -> Result<Vec<Car>> {
    if d.is_empty() {
        return Err(Error::invalid("cannot mine an empty dataset"));
    }
    let n = d.len() as u64;
    let threshold = support_count_threshold(minsup, n).max(1);

    let mut frequent: Vec<ItemId> = Vec::new();
    for id in 0..d.items().len() as u32 {
        let item = ItemId(id);
        if naive_itemset_freqs(d, &[item]).total() >= threshold {
            frequent.push(item);
        }
    }
    if frequent.len() > MAX_FREQUENT_ITEMS {
        return Err(Error::invalid(format!(
            "{} frequent items exceed the exhaustive-mining cap of {}",
            frequent.len(),
            MAX_FREQUENT_ITEMS
        )));
    }

    let mut rules: Vec<Car> = Vec::new();
    // Level-wise: itemsets as sorted id vectors; a level is pruned to the
    // frequent ones before the next join.
    let mut level: Vec<Vec<ItemId>> = frequent.iter().map(|&i| vec![i]).collect();
    while !level.is_empty() {
        let mut kept: Vec<Vec<ItemId>> = Vec::new();
        for itemset in &level {
            let freqs = naive_itemset_freqs(d, itemset);
            let cover = freqs.total();
            if cover < threshold {
                continue;
            }
            kept.push(itemset.clone());
            for class in 0..d.n_classes() as u32 {
                let consequent = ClassId(class);
                let hits = freqs.get(consequent);
                if hits < threshold {
                    continue;
                }
                let confidence = hits as f64 / cover as f64;
                if confidence < minconf {
                    continue;
                }
                rules.push(Car::new(
                    itemset.clone(),
                    consequent,
                    RuleStats {
                        support: hits as f64 / n as f64,
                        confidence,
                        chi2: chi2_by_contingency(d, hits, cover, consequent),
                    },
                ));
            }
        }
        level = join_level(&kept);
    }
    Ok(rules)
}

/// Classic Apriori join: two sorted k-itemsets sharing their first k-1
/// items produce a (k+1)-candidate.
fn join_level(level: &[Vec<ItemId>]) -> Vec<Vec<ItemId>> {
    let mut next = Vec::new();
    for (i, a) in level.iter().enumerate() {
        for b in &level[i + 1..] {
            let k = a.len();
            if a[..k - 1] == b[..k - 1] && a[k - 1] < b[k - 1] {
                let mut candidate = a.clone();
                candidate.push(b[k - 1]);
                next.push(candidate);
            }
        }
    }
    next
}

/// Pearson chi-squared on the observed 2x2 table, assembled and reduced
/// here without touching the measures module.
fn chi2_by_contingency(d: &Dataset, hits: u64, cover: u64, consequent: ClassId) -> f64 {
    let n: u64 = d.class_counts().iter().sum();
    let class_total = d.class_counts()[consequent.0 as usize];

    let observed = [
        [hits as f64, (cover - hits) as f64],
        [
            (class_total - hits) as f64,
            (n - cover - (class_total - hits)) as f64,
        ],
    ];
    let rows = [observed[0][0] + observed[0][1], observed[1][0] + observed[1][1]];
    let cols = [observed[0][0] + observed[1][0], observed[0][1] + observed[1][1]];
    let mut stat = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let expected = rows[i] * cols[j] / n as f64;
            if expected > 0.0 {
                let diff = observed[i][j] - expected;
                stat += diff * diff / expected;
            }
        }
    }
    stat
}
