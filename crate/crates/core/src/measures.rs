//! Statistical measures: Gini impurity, information gain, rule support,
//! confidence and the chi-squared statistic of a rule.

use crate::dataset::ClassId;
use crate::error::{Error, Result};

/// Per-class transaction counts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FreqArray {
    counts: Vec<u64>,
}

impl FreqArray {
    pub fn zeros(n_classes: usize) -> Self {
        FreqArray {
            counts: vec![0; n_classes],
        }
    }

    pub fn from_counts(counts: Vec<u64>) -> Self {
        FreqArray { counts }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn n_classes(&self) -> usize {
        self.counts.len()
    }

    pub fn get(&self, class: ClassId) -> u64 {
        self.counts[class.0 as usize]
    }

    pub fn increment(&mut self, class: ClassId) {
        self.counts[class.0 as usize] += 1;
    }

    pub fn add(&mut self, other: &FreqArray) {
        debug_assert_eq!(self.counts.len(), other.counts.len());
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// True when at most one class has a nonzero count (Gini 0).
    pub fn is_pure(&self) -> bool {
        self.counts.iter().filter(|&&c| c > 0).count() <= 1
    }

    /// Class with the highest count; ties resolved to the lowest class id.
    pub fn argmax(&self) -> ClassId {
        let mut best = 0usize;
        for (i, &c) in self.counts.iter().enumerate() {
            if c > self.counts[best] {
                best = i;
            }
        }
        ClassId(best as u32)
    }
}

/// Support, confidence and chi-squared of a classification rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleStats {
    pub support: f64,
    pub confidence: f64,
    pub chi2: f64,
}

/// Gini impurity of a class-frequency array: sum of f_i * (1 - f_i).
///
/// An empty array (total 0) is pure by convention and returns 0.
pub fn gini(freqs: &FreqArray) -> f64 {
    let total = freqs.total();
    if total == 0 {
        return 0.0;
    }
    let total = total as f64;
    freqs
        .counts
        .iter()
        .map(|&c| {
            let f = c as f64 / total;
            f * (1.0 - f)
        })
        .sum()
}

/// Information gain of a single item over the whole dataset: the weighted
/// Gini reduction w * (Gini_dataset - Gini_item), where w is the fraction
/// of transactions containing the item.
pub fn ig_item(item_freqs: &FreqArray, dataset_freqs: &FreqArray) -> Result<f64> {
    let dataset_total = dataset_freqs.total();
    if dataset_total == 0 {
        return Err(Error::invalid("information gain over an empty dataset"));
    }
    let w = item_freqs.total() as f64 / dataset_total as f64;
    Ok(w * (gini(dataset_freqs) - gini(item_freqs)))
}

/// Information gain of a tree node relative to its parent: the weighted
/// Gini reduction w * (Gini_parent - Gini_node), where w is the fraction
/// of the parent's transactions represented in the node.
pub fn ig_node(node_freqs: &FreqArray, parent_freqs: &FreqArray) -> Result<f64> {
    let parent_total = parent_freqs.total();
    if parent_total == 0 {
        return Err(Error::invalid("information gain under an empty parent"));
    }
    let w = node_freqs.total() as f64 / parent_total as f64;
    Ok(w * (gini(parent_freqs) - gini(node_freqs)))
}

/// Support, confidence and chi-squared of the rule antecedent => consequent,
/// given the class-frequency array of the transactions containing the
/// antecedent and the class-frequency array of the whole dataset.
///
/// The chi-squared statistic is Pearson's, computed on the 2x2 contingency
/// table (antecedent present/absent) x (class == consequent or not), with no
/// continuity correction. Cells with expected count 0 contribute 0.
pub fn rule_stats(
    rule_freqs: &FreqArray,
    consequent: ClassId,
    dataset_freqs: &FreqArray,
) -> Result<RuleStats> {
    let cover = rule_freqs.total();
    if cover == 0 {
        return Err(Error::invalid("rule antecedent covers no transactions"));
    }
    let n = dataset_freqs.total();
    let hits = rule_freqs.get(consequent);

    let support = hits as f64 / n as f64;
    let confidence = hits as f64 / cover as f64;
    let chi2 = chi2_2x2(rule_freqs, consequent, dataset_freqs);

    Ok(RuleStats {
        support,
        confidence,
        chi2,
    })
}

fn chi2_2x2(rule_freqs: &FreqArray, consequent: ClassId, dataset_freqs: &FreqArray) -> f64 {
    let n = dataset_freqs.total() as f64;
    let cover = rule_freqs.total();
    let hits = rule_freqs.get(consequent);
    let class_total = dataset_freqs.get(consequent);

    // Observed: rows are antecedent present/absent, columns are
    // class == consequent / class != consequent.
    let observed = [
        [hits as f64, (cover - hits) as f64],
        [
            (class_total - hits) as f64,
            (dataset_freqs.total() - cover) as f64 - (class_total - hits) as f64,
        ],
    ];
    let row_totals = [observed[0][0] + observed[0][1], observed[1][0] + observed[1][1]];
    let col_totals = [observed[0][0] + observed[1][0], observed[0][1] + observed[1][1]];

    let mut chi2 = 0.0;
    for (i, row) in observed.iter().enumerate() {
        for (j, &obs) in row.iter().enumerate() {
            let expected = row_totals[i] * col_totals[j] / n;
            if expected > 0.0 {
                let d = obs - expected;
                chi2 += d * d / expected;
            }
        }
    }
    chi2
}
