//! Bagged training: per-partition CAP-tree extraction, consolidation of
//! the per-partition rule lists into one model, optional database-coverage
//! pruning, and the human-readable model file format.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

use crate::capgrowth::{extract_rules, Car, ExtractionParams};
use crate::captree::build_captree;
use crate::dataset::{ClassId, Dataset, Dictionary, ItemId};
use crate::error::{Error, Result};
use crate::measures::RuleStats;

/// Componentwise combine applied to the stats of identical rules found in
/// several ensemble members. All variants are associative and commutative,
/// so consolidation can run in any association order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Consolidation {
    Max,
    Min,
    Product,
}

impl Consolidation {
    /// Reduces a non-empty value list. Values are sorted first so that
    /// floating-point rounding cannot leak the input order (product is
    /// commutative but not associative in f64).
    fn reduce(&self, values: &mut [f64]) -> f64 {
        values.sort_by(f64::total_cmp);
        match self {
            Consolidation::Max => *values.last().unwrap(),
            Consolidation::Min => values[0],
            Consolidation::Product => values.iter().product(),
        }
    }
}

impl fmt::Display for Consolidation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Consolidation::Max => "max",
            Consolidation::Min => "min",
            Consolidation::Product => "product",
        };
        write!(f, "{name}")
    }
}

impl FromStr for Consolidation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max" => Ok(Consolidation::Max),
            "min" => Ok(Consolidation::Min),
            "product" => Ok(Consolidation::Product),
            other => Err(Error::invalid(format!(
                "unknown consolidation function '{other}' (expected max, min or product)"
            ))),
        }
    }
}

/// Training configuration; serialized verbatim into the model file.
#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub n_partitions: usize,
    pub ratio: f64,
    pub extraction: ExtractionParams,
    pub consolidation: Consolidation,
    pub seed: u64,
    pub coverage: bool,
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_partitions == 0 {
            return Err(Error::invalid("n_partitions must be positive"));
        }
        if !(self.ratio > 0.0 && self.ratio <= 1.0) {
            return Err(Error::invalid(format!(
                "ratio must be in (0, 1], got {}",
                self.ratio
            )));
        }
        self.extraction.validate()
    }
}

/// A consolidated rule list with class priors and the training
/// configuration it came from. Rules are kept in canonical order:
/// confidence desc, support desc, antecedent length asc, antecedent
/// display-lexicographic, consequent id.
#[derive(Debug, Clone)]
pub struct Model {
    rules: Vec<Car>,
    priors: Vec<f64>,
    items: Arc<Dictionary>,
    labels: Arc<Dictionary>,
    params: TrainConfig,
}

impl Model {
    pub fn rules(&self) -> &[Car] {
        &self.rules
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn items(&self) -> &Arc<Dictionary> {
        &self.items
    }

    pub fn labels(&self) -> &Arc<Dictionary> {
        &self.labels
    }

    pub fn n_classes(&self) -> usize {
        self.labels.len()
    }

    pub fn params(&self) -> &TrainConfig {
        &self.params
    }

    #[cfg(test)]
    pub(crate) fn push_rule_for_test(&mut self, rule: Car) {
        self.rules.push(rule);
    }
}

/// Canonical rule precedence used for model ordering.
pub(crate) fn rule_order(items: &Dictionary, a: &Car, b: &Car) -> Ordering {
    b.stats()
        .confidence
        .total_cmp(&a.stats().confidence)
        .then_with(|| b.stats().support.total_cmp(&a.stats().support))
        .then_with(|| a.antecedent().len().cmp(&b.antecedent().len()))
        .then_with(|| {
            let names = |car: &Car| {
                let mut v: Vec<&str> = car
                    .antecedent()
                    .iter()
                    .map(|i| items.display(i.0))
                    .collect();
                v.sort_unstable();
                v
            };
            names(a).cmp(&names(b))
        })
        .then_with(|| a.consequent().cmp(&b.consequent()))
}

/// Trains the bagged ensemble: samples `n_partitions` partitions with
/// replacement, builds a CAP-tree and extracts rules in each (partition
/// tasks run on the ambient thread pool), optionally prunes each rule
/// list by database coverage, and consolidates everything into a single
/// model. Priors come from the full training dataset handed in.
///
/// A single partition at ratio 1.0 trains on the dataset itself (the
/// plain single-model configuration), not on a bootstrap replica.
pub fn train(d: &Dataset, cfg: &TrainConfig) -> Result<Model> {
    cfg.validate()?;
    if d.is_empty() {
        return Err(Error::invalid("cannot train on an empty dataset"));
    }
    let partitions = if cfg.n_partitions == 1 && cfg.ratio == 1.0 {
        vec![d.clone()]
    } else {
        d.partition_sample(cfg.n_partitions, cfg.ratio, cfg.seed, true)?
    };

    let per_partition: Vec<Vec<Car>> = partitions
        .par_iter()
        .map(|part| -> Result<Vec<Car>> {
            if part.is_empty() {
                return Ok(Vec::new());
            }
            let tree = build_captree(part, cfg.extraction.minsup)?;
            let mut rules = extract_rules(&tree, &cfg.extraction);
            if cfg.coverage {
                rules.sort_by(|a, b| rule_order(d.items(), a, b));
                rules = coverage_prune(&rules, part);
            }
            Ok(rules)
        })
        .collect::<Result<_>>()?;

    let mut rules = consolidate(per_partition, cfg.consolidation);
    rules.sort_by(|a, b| rule_order(d.items(), a, b));

    Ok(Model {
        rules,
        priors: d.priors(),
        items: d.items().clone(),
        labels: d.labels().clone(),
        params: cfg.clone(),
    })
}

/// Collapses rules with identical antecedent and consequent into one rule
/// whose support, confidence and chi-squared are the componentwise
/// aggregate across the group. The result does not depend on the order of
/// the input lists.
pub fn consolidate(models: Vec<Vec<Car>>, g: Consolidation) -> Vec<Car> {
    type StatColumns = (Vec<f64>, Vec<f64>, Vec<f64>);
    let mut groups: HashMap<(Vec<ItemId>, ClassId), StatColumns> = HashMap::new();
    for rules in models {
        for rule in rules {
            let entry = groups
                .entry((rule.antecedent().to_vec(), rule.consequent()))
                .or_default();
            entry.0.push(rule.stats().support);
            entry.1.push(rule.stats().confidence);
            entry.2.push(rule.stats().chi2);
        }
    }
    let mut out: Vec<Car> = groups
        .into_iter()
        .map(|((antecedent, consequent), (mut sups, mut confs, mut chis))| {
            Car::new(
                antecedent,
                consequent,
                RuleStats {
                    support: g.reduce(&mut sups),
                    confidence: g.reduce(&mut confs),
                    chi2: g.reduce(&mut chis),
                },
            )
        })
        .collect();
    // Hash order is arbitrary; fix it structurally.
    out.sort_by(|a, b| {
        a.antecedent()
            .cmp(b.antecedent())
            .then_with(|| a.consequent().cmp(&b.consequent()))
    });
    out
}

/// Database-coverage pruning: scan rules in order and keep each rule only
/// if it correctly classifies at least one not-yet-covered transaction;
/// those transactions become covered. Stops early once every transaction
/// is covered. Expects `rules` in model order and `d` to be the partition
/// the rules were extracted from.
pub fn coverage_prune(rules: &[Car], d: &Dataset) -> Vec<Car> {
    coverage_prune_impl(rules, d).0
}

/// Returns the kept rules plus the number of transactions covered.
pub(crate) fn coverage_prune_impl(rules: &[Car], d: &Dataset) -> (Vec<Car>, usize) {
    let mut covered = vec![false; d.len()];
    let mut n_covered = 0usize;
    let mut kept = Vec::new();
    for rule in rules {
        if n_covered == d.len() {
            break;
        }
        let mut hit = false;
        for (i, t) in d.transactions().iter().enumerate() {
            if !covered[i]
                && t.label() == Some(rule.consequent())
                && t.contains_all(rule.antecedent())
            {
                covered[i] = true;
                n_covered += 1;
                hit = true;
            }
        }
        if hit {
            kept.push(rule.clone());
        }
    }
    (kept, n_covered)
}

// --- model file format -----------------------------------------------------

const MODEL_MAGIC: &str = "#capmodel v1";

fn fmt9(v: f64) -> String {
    format!("{v:.9}")
}

impl Model {
    /// Renders the model in its text file format; stable byte-for-byte for
    /// a given model.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(MODEL_MAGIC);
        out.push('\n');

        out.push_str("labels:");
        for id in 0..self.labels.len() as u32 {
            out.push('\t');
            out.push_str(self.labels.display(id));
        }
        out.push('\n');

        out.push_str("priors:");
        for p in &self.priors {
            out.push('\t');
            out.push_str(&fmt9(*p));
        }
        out.push('\n');

        let p = &self.params;
        out.push_str(&format!(
            "params:\tminsup={} minconf={} minchi2={} n_partitions={} ratio={} g={} coverage={} seed={}\n",
            fmt9(p.extraction.minsup),
            fmt9(p.extraction.minconf),
            fmt9(p.extraction.minchi2),
            p.n_partitions,
            fmt9(p.ratio),
            p.consolidation,
            p.coverage,
            p.seed,
        ));

        for rule in &self.rules {
            let mut names: Vec<&str> = rule
                .antecedent()
                .iter()
                .map(|i| self.items.display(i.0))
                .collect();
            names.sort_unstable();
            out.push_str(&names.join(","));
            out.push('\t');
            out.push_str(self.labels.display(rule.consequent().0));
            out.push('\t');
            out.push_str(&fmt9(rule.stats().support));
            out.push('\t');
            out.push_str(&fmt9(rule.stats().confidence));
            out.push('\t');
            out.push_str(&fmt9(rule.stats().chi2));
            out.push('\n');
        }
        out
    }

    /// Parses a model file produced by [`Model::to_text`]. Item and label
    /// dictionaries are rebuilt from the file contents.
    pub fn parse_text(text: &str) -> Result<Model> {
        let mut lines = text.lines().enumerate();
        let bad = |line: usize, msg: &str| Error::parse(None, line + 1, msg);

        let (n, magic) = lines
            .next()
            .ok_or_else(|| Error::invalid("empty model file"))?;
        if magic != MODEL_MAGIC {
            return Err(bad(n, "missing model header"));
        }

        let (n, labels_line) = lines.next().ok_or_else(|| bad(1, "missing labels line"))?;
        let labels_line = labels_line
            .strip_prefix("labels:")
            .ok_or_else(|| bad(n, "expected 'labels:'"))?;
        let mut labels = Dictionary::new();
        for token in labels_line.split('\t').filter(|s| !s.is_empty()) {
            labels.intern(token);
        }
        if labels.is_empty() {
            return Err(bad(n, "no labels listed"));
        }

        let (n, priors_line) = lines.next().ok_or_else(|| bad(2, "missing priors line"))?;
        let priors_line = priors_line
            .strip_prefix("priors:")
            .ok_or_else(|| bad(n, "expected 'priors:'"))?;
        let priors: Vec<f64> = priors_line
            .split('\t')
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| bad(n, &format!("bad prior '{s}'")))
            })
            .collect::<Result<_>>()?;
        if priors.len() != labels.len() {
            return Err(bad(n, "priors count does not match labels"));
        }

        let (n, params_line) = lines.next().ok_or_else(|| bad(3, "missing params line"))?;
        let params_line = params_line
            .strip_prefix("params:\t")
            .ok_or_else(|| bad(n, "expected 'params:'"))?;
        let mut kv: HashMap<&str, &str> = HashMap::new();
        for pair in params_line.split(' ') {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| bad(n, &format!("bad params pair '{pair}'")))?;
            kv.insert(k, v);
        }
        let field = |k: &str| -> Result<&str> {
            kv.get(k)
                .copied()
                .ok_or_else(|| bad(n, &format!("missing params key '{k}'")))
        };
        let parse_f64 = |k: &str| -> Result<f64> {
            field(k)?
                .parse()
                .map_err(|_| bad(n, &format!("bad value for '{k}'")))
        };
        let params = TrainConfig {
            n_partitions: field("n_partitions")?
                .parse()
                .map_err(|_| bad(n, "bad value for 'n_partitions'"))?,
            ratio: parse_f64("ratio")?,
            extraction: ExtractionParams {
                minsup: parse_f64("minsup")?,
                minconf: parse_f64("minconf")?,
                minchi2: parse_f64("minchi2")?,
            },
            consolidation: field("g")?.parse()?,
            seed: field("seed")?
                .parse()
                .map_err(|_| bad(n, "bad value for 'seed'"))?,
            coverage: match field("coverage")? {
                "true" => true,
                "false" => false,
                _ => return Err(bad(n, "bad value for 'coverage'")),
            },
        };

        let mut items = Dictionary::new();
        let mut rules = Vec::new();
        for (n, line) in lines {
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 5 {
                return Err(bad(n, "expected 5 tab-separated rule fields"));
            }
            let antecedent: Vec<ItemId> = fields[0]
                .split(',')
                .filter(|s| !s.is_empty())
                .map(|tok| ItemId(items.intern(tok)))
                .collect();
            if antecedent.is_empty() {
                return Err(bad(n, "empty rule antecedent"));
            }
            let consequent = labels
                .lookup(fields[1])
                .map(ClassId)
                .ok_or_else(|| bad(n, &format!("unknown label '{}'", fields[1])))?;
            let parse_stat = |s: &str| -> Result<f64> {
                s.parse()
                    .map_err(|_| bad(n, &format!("bad statistic '{s}'")))
            };
            rules.push(Car::new(
                antecedent,
                consequent,
                RuleStats {
                    support: parse_stat(fields[2])?,
                    confidence: parse_stat(fields[3])?,
                    chi2: parse_stat(fields[4])?,
                },
            ));
        }

        Ok(Model {
            rules,
            priors,
            items: Arc::new(items),
            labels: Arc::new(labels),
            params,
        })
    }
}
