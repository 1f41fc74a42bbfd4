//! Greedy CAR extraction over a CAP-tree: a depth-first visit that stops
//! on non-positive information gain or on pure nodes, generates at most
//! one rule per root path, and falls back to the parent pattern when no
//! descendant produced a rule.

use std::collections::HashSet;

use crate::captree::{support_count_threshold, CapTree};
use crate::dataset::{ClassId, ItemId};
use crate::error::{Error, Result};
use crate::measures::{gini, ig_node, rule_stats, RuleStats};

/// A class association rule: an antecedent itemset implying a single
/// class label, with its support, confidence and chi-squared.
#[derive(Debug, Clone, PartialEq)]
pub struct Car {
    antecedent: Vec<ItemId>,
    consequent: ClassId,
    stats: RuleStats,
}

impl Car {
    pub fn new(mut antecedent: Vec<ItemId>, consequent: ClassId, stats: RuleStats) -> Self {
        antecedent.sort_unstable();
        antecedent.dedup();
        Car {
            antecedent,
            consequent,
            stats,
        }
    }

    /// Antecedent item ids in ascending order.
    pub fn antecedent(&self) -> &[ItemId] {
        &self.antecedent
    }

    pub fn consequent(&self) -> ClassId {
        self.consequent
    }

    pub fn stats(&self) -> &RuleStats {
        &self.stats
    }
}

/// Extraction thresholds.
#[derive(Debug, Clone, Copy)]
pub struct ExtractionParams {
    pub minsup: f64,
    pub minconf: f64,
    pub minchi2: f64,
}

impl ExtractionParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.minsup > 0.0 && self.minsup <= 1.0) {
            return Err(Error::invalid(format!(
                "minsup must be in (0, 1], got {}",
                self.minsup
            )));
        }
        if !(self.minconf > 0.0 && self.minconf <= 1.0) {
            return Err(Error::invalid(format!(
                "minconf must be in (0, 1], got {}",
                self.minconf
            )));
        }
        if self.minchi2.is_nan() || self.minchi2 < 0.0 {
            return Err(Error::invalid(format!(
                "minchi2 must be non-negative, got {}",
                self.minchi2
            )));
        }
        Ok(())
    }
}

/// Depth-first CAR extraction in child L-rank order. Subtrees with
/// non-positive node information gain are abandoned; pure nodes try to
/// generate a rule without descending further; a node none of whose
/// children yielded a rule tries its own pattern. Duplicate
/// (antecedent, consequent) pairs keep the first occurrence.
pub fn extract_rules(tree: &CapTree, params: &ExtractionParams) -> Vec<Car> {
    let mut rules = Vec::new();
    for &child in tree.root_children() {
        rules.extend(extract(tree, child, params));
    }
    let mut seen: HashSet<(Vec<ItemId>, ClassId)> = HashSet::new();
    rules.retain(|r| seen.insert((r.antecedent.clone(), r.consequent)));
    rules
}

fn extract(tree: &CapTree, node: usize, params: &ExtractionParams) -> Vec<Car> {
    let freqs = tree.freqs_of(node);
    let ig = ig_node(freqs, tree.parent_freqs_of(node)).expect("non-empty parent");
    if ig <= 0.0 {
        return Vec::new();
    }
    if gini(freqs) == 0.0 {
        return generate_rule(tree, node, params).into_iter().collect();
    }
    let mut rules = Vec::new();
    for &child in tree.children_of(node) {
        rules.extend(extract(tree, child, params));
    }
    if rules.is_empty() {
        return generate_rule(tree, node, params).into_iter().collect();
    }
    rules
}

/// Tries to turn the pattern on `node`'s root path into a rule. The
/// consequent is the majority class of the node-local frequencies (ties
/// to the lower class id); the pattern's true frequencies are recovered
/// by projecting the tree on each path item, deepest first. Returns the
/// rule only if it clears all three thresholds.
pub(crate) fn generate_rule(
    tree: &CapTree,
    node: usize,
    params: &ExtractionParams,
) -> Option<Car> {
    let consequent = tree.freqs_of(node).argmax();
    let path = tree.path_items(node);

    let mut projected = tree
        .project(path[0])
        .expect("path item present in header");
    for &item in &path[1..] {
        projected = projected
            .project(item)
            .expect("path items co-occur by construction");
    }
    let freqs = projected.root_freqs();

    let threshold = support_count_threshold(params.minsup, tree.total_count());
    if freqs.get(consequent) < threshold {
        return None;
    }
    let confidence = freqs.get(consequent) as f64 / freqs.total() as f64;
    if confidence < params.minconf {
        return None;
    }
    let stats = rule_stats(freqs, consequent, tree.dataset_freqs())
        .expect("projected cover is non-empty");
    if stats.chi2 < params.minchi2 {
        return None;
    }
    Some(Car::new(path, consequent, stats))
}
