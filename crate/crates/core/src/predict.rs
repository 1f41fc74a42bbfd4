//! Multi-rule score voting: per-label aggregation of a rule measure over
//! the matching rules, an independence-based fallback for labels with no
//! match, prior fallback when nothing matches, and normalization.

use rayon::prelude::*;

use crate::capgrowth::Car;
use crate::dataset::{ClassId, Transaction};
use crate::ensemble::Model;

/// Aggregation applied to the measure values of a label's matching rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AggregateFn {
    #[default]
    Max,
    Min,
    Mean,
}

/// Rule measure fed to the aggregation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Measure {
    #[default]
    Confidence,
    OneMinusSupport,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct VotingParams {
    pub f: AggregateFn,
    pub m: Measure,
}

impl Measure {
    fn of(&self, rule: &Car) -> f64 {
        match self {
            Measure::Confidence => rule.stats().confidence,
            Measure::OneMinusSupport => 1.0 - rule.stats().support,
        }
    }
}

impl AggregateFn {
    fn over(&self, values: impl Iterator<Item = f64>) -> f64 {
        match self {
            AggregateFn::Max => values.fold(f64::NEG_INFINITY, f64::max),
            AggregateFn::Min => values.fold(f64::INFINITY, f64::min),
            AggregateFn::Mean => {
                let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
                sum / count as f64
            }
        }
    }
}

/// Normalized per-label prediction scores; entries sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector {
    scores: Vec<f64>,
}

impl ScoreVector {
    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn get(&self, class: ClassId) -> f64 {
        self.scores[class.0 as usize]
    }
}

/// Rules of the model matching `record`, grouped by consequent label and
/// kept in model order. A rule matches when its whole antecedent occurs
/// in the record; unknown record items simply never match.
pub fn match_rules<'m>(model: &'m Model, record: &Transaction) -> Vec<Vec<&'m Car>> {
    let mut per_label: Vec<Vec<&Car>> = vec![Vec::new(); model.n_classes()];
    for rule in model.rules() {
        if record.contains_all(rule.antecedent()) {
            per_label[rule.consequent().0 as usize].push(rule);
        }
    }
    per_label
}

/// Scores one record. Labels with matching rules get the aggregated
/// measure; labels without matches split the product of (1 - p_j) over
/// the matched labels; with no match at all the class priors apply. The
/// final vector is normalized to sum to one.
pub fn score(model: &Model, record: &Transaction, v: &VotingParams) -> ScoreVector {
    let matches = match_rules(model, record);
    let n = model.n_classes();

    if matches.iter().all(|m| m.is_empty()) {
        return normalize(model.priors().to_vec(), model);
    }

    let mut raw = vec![0.0f64; n];
    let mut unmatched: Vec<usize> = Vec::new();
    for (i, rules) in matches.iter().enumerate() {
        if rules.is_empty() {
            unmatched.push(i);
        } else {
            raw[i] = v.f.over(rules.iter().map(|r| v.m.of(r)));
        }
    }
    if !unmatched.is_empty() {
        let p_rest: f64 = matches
            .iter()
            .enumerate()
            .filter(|(_, rules)| !rules.is_empty())
            .map(|(i, _)| 1.0 - raw[i])
            .product();
        let share = p_rest / unmatched.len() as f64;
        for &i in &unmatched {
            raw[i] = share;
        }
    }
    if raw.iter().all(|&p| p == 0.0) {
        // All matched measures were zero; scores degenerate to priors.
        raw.copy_from_slice(model.priors());
    }
    normalize(raw, model)
}

fn normalize(mut scores: Vec<f64>, model: &Model) -> ScoreVector {
    let sum: f64 = scores.iter().sum();
    if sum > 0.0 {
        for s in &mut scores {
            *s /= sum;
        }
    } else {
        // Degenerate priors (untrained labels); fall back to uniform.
        let uniform = 1.0 / model.n_classes() as f64;
        scores.iter_mut().for_each(|s| *s = uniform);
    }
    ScoreVector { scores }
}

/// Predicted label: argmax of the score vector, ties resolved to the
/// higher prior, then the lower class id.
pub fn predict(model: &Model, record: &Transaction, v: &VotingParams) -> ClassId {
    let scores = score(model, record, v);
    argmax_with_priors(&scores, model.priors())
}

pub(crate) fn argmax_with_priors(scores: &ScoreVector, priors: &[f64]) -> ClassId {
    let s = scores.scores();
    let mut best = 0usize;
    for i in 1..s.len() {
        if s[i] > s[best] || (s[i] == s[best] && priors[i] > priors[best]) {
            best = i;
        }
    }
    ClassId(best as u32)
}

/// Elementwise [`score`] over a record batch, order preserving. Scoring is
/// pure, so the ambient thread pool cannot affect the output.
pub fn score_batch(model: &Model, records: &[Transaction], v: &VotingParams) -> Vec<ScoreVector> {
    records.par_iter().map(|r| score(model, r, v)).collect()
}

/// Renders the score file: a header naming one score column per label,
/// then one row per record with the predicted label and six-digit scores.
pub fn score_report(model: &Model, records: &[Transaction], v: &VotingParams) -> String {
    let scores = score_batch(model, records, v);
    let mut out = String::from("record_index\tpred");
    for id in 0..model.n_classes() as u32 {
        out.push_str("\tscore_");
        out.push_str(model.labels().display(id));
    }
    out.push('\n');
    for (i, s) in scores.iter().enumerate() {
        let pred = argmax_with_priors(s, model.priors());
        out.push_str(&format!("{i}\t{}", model.labels().display(pred.0)));
        for v in s.scores() {
            out.push_str(&format!("\t{v:.6}"));
        }
        out.push('\n');
    }
    out
}
