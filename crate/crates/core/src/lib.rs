//! Bagged associative classifier built on CAP-tree rule mining.
//!
//! The training pipeline samples a dataset into partitions, builds a
//! CAP-tree per partition (a prefix tree whose nodes carry per-class
//! frequency arrays, with items ordered by decreasing information gain),
//! extracts class association rules with a greedy Gini-guided visit,
//! consolidates the per-partition rule lists into a single model, and
//! predicts by multi-rule score voting.

pub mod capgrowth;
pub mod captree;
pub mod coverage;
pub mod dataset;
pub mod ensemble;
pub mod error;
pub mod eval;
pub mod measures;
pub mod oracle;
pub mod predict;

pub use capgrowth::{extract_rules, Car, ExtractionParams};
pub use captree::CapTree;
pub use dataset::{load_tabular, load_transactions, ClassId, Dataset, DatasetBuilder, ItemId,
                  LabelPosition, Transaction};
pub use ensemble::{consolidate, train, Consolidation, Model, TrainConfig};
pub use error::{Error, Result};
pub use eval::{auroc, crossval, kfold, EvalResult};
pub use measures::{gini, ig_item, ig_node, rule_stats, FreqArray, RuleStats};
pub use predict::{score, score_batch, AggregateFn, Measure, ScoreVector, VotingParams};
