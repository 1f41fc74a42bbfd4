//! Standalone database-coverage pruning pass with reporting. The pruning
//! itself lives in [`crate::ensemble::coverage_prune`]; this wrapper adds
//! the statistics used to judge how much the extraction already avoided
//! redundant rules.

use std::fmt;

use crate::capgrowth::Car;
use crate::dataset::Dataset;
use crate::ensemble::coverage_prune_impl;

/// Outcome of one coverage pass.
#[derive(Debug, Clone, PartialEq)]
pub struct PruneReport {
    pub rules_in: usize,
    pub rules_out: usize,
    pub pruned_fraction: f64,
    pub transactions_covered: usize,
}

impl fmt::Display for PruneReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{{\"rules_in\":{},\"rules_out\":{},\"pruned_fraction\":{:.6},\"transactions_covered\":{}}}",
            self.rules_in, self.rules_out, self.pruned_fraction, self.transactions_covered
        )
    }
}

/// Runs database-coverage pruning and reports what it removed. Expects
/// `rules` in model order and `d` to be the dataset they were mined from.
pub fn prune_with_report(rules: &[Car], d: &Dataset) -> (Vec<Car>, PruneReport) {
    let (kept, covered) = coverage_prune_impl(rules, d);
    let rules_in = rules.len();
    let rules_out = kept.len();
    let pruned_fraction = if rules_in == 0 {
        0.0
    } else {
        1.0 - rules_out as f64 / rules_in as f64
    };
    (
        kept,
        PruneReport {
            rules_in,
            rules_out,
            pruned_fraction,
            transactions_covered: covered,
        },
    )
}
