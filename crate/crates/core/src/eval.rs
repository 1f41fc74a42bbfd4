//! Evaluation: AUROC via the rank statistic, k-fold splitting and the
//! cross-validation harness tying training and scoring together.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dataset::{ClassId, Dataset};
use crate::ensemble::{train, TrainConfig};
use crate::error::{Error, Result};
use crate::predict::{argmax_with_priors, score_batch, VotingParams};

/// Metrics of one evaluation run; `folds` holds the per-fold breakdown
/// when cross-validating.
#[derive(Debug, Clone)]
pub struct EvalResult {
    pub auroc: f64,
    pub accuracy: f64,
    pub n_test: usize,
    pub folds: Vec<FoldMetrics>,
}

#[derive(Debug, Clone)]
pub struct FoldMetrics {
    pub auroc: f64,
    pub accuracy: f64,
    pub n_test: usize,
}

/// Area under the ROC curve as the Mann-Whitney rank statistic, with
/// midranks for tied scores. Labels mark the positive class.
pub fn auroc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::invalid("scores and labels differ in length"));
    }
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::invalid(
            "AUROC needs both classes present in the labels",
        ));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // Average ranks across tied score runs.
    let mut ranks = vec![0.0f64; scores.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let rank = (i + 1 + j + 1) as f64 / 2.0;
        for &idx in &order[i..=j] {
            ranks[idx] = rank;
        }
        i = j + 1;
    }

    let sum_pos: f64 = labels
        .iter()
        .zip(&ranks)
        .filter(|(&l, _)| l)
        .map(|(_, &r)| r)
        .sum();
    let n_pos = n_pos as f64;
    Ok((sum_pos - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg as f64))
}

/// Random non-stratified split into k near-equal folds: element i of the
/// result is (train, test) where the test set is fold i. Deterministic
/// for a fixed seed; the first |D| mod k folds take one extra record.
pub fn kfold(d: &Dataset, k: usize, seed: u64) -> Result<Vec<(Dataset, Dataset)>> {
    if k < 2 {
        return Err(Error::invalid("k must be at least 2"));
    }
    if d.len() < k {
        return Err(Error::invalid(format!(
            "cannot split {} records into {} folds",
            d.len(),
            k
        )));
    }
    let mut indices: Vec<usize> = (0..d.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    indices.shuffle(&mut rng);

    let base = d.len() / k;
    let extra = d.len() % k;
    let mut splits = Vec::with_capacity(k);
    let mut start = 0;
    for fold in 0..k {
        let size = base + usize::from(fold < extra);
        let test_idx = &indices[start..start + size];
        let train_idx: Vec<usize> = indices[..start]
            .iter()
            .chain(&indices[start + size..])
            .copied()
            .collect();
        let mut test_sorted = test_idx.to_vec();
        test_sorted.sort_unstable();
        let mut train_sorted = train_idx;
        train_sorted.sort_unstable();
        splits.push((d.subset(&train_sorted), d.subset(&test_sorted)));
        start += size;
    }
    Ok(splits)
}

/// K-fold cross-validation: per fold, optionally rebalance the training
/// split (the test split is never touched), train, score the test split
/// and compute AUROC and accuracy. Folds run on the ambient thread pool
/// and reduce by fold index; the reported metrics are unweighted means.
pub fn crossval(
    d: &Dataset,
    k: usize,
    train_cfg: &TrainConfig,
    voting: &VotingParams,
    seed: u64,
    balance: bool,
) -> Result<EvalResult> {
    if d.n_classes() != 2 {
        return Err(Error::invalid("cross-validated AUROC requires binary labels"));
    }
    let splits = kfold(d, k, seed)?;

    let folds: Vec<FoldMetrics> = splits
        .par_iter()
        .enumerate()
        .map(|(fold, (train_d, test_d))| -> Result<FoldMetrics> {
            let train_d = if balance {
                train_d.balance_subsample(seed.wrapping_add(fold as u64 + 1))?
            } else {
                train_d.clone()
            };
            let mut cfg = train_cfg.clone();
            cfg.seed = train_cfg.seed.wrapping_add(fold as u64);
            let model = train(&train_d, &cfg)?;
            evaluate_split(&model, test_d, voting)
        })
        .collect::<Result<_>>()?;

    let mean = |f: fn(&FoldMetrics) -> f64| -> f64 {
        folds.iter().map(f).sum::<f64>() / folds.len() as f64
    };
    Ok(EvalResult {
        auroc: mean(|m| m.auroc),
        accuracy: mean(|m| m.accuracy),
        n_test: folds.iter().map(|m| m.n_test).sum(),
        folds,
    })
}

/// Scores a labeled test split with the model and computes its metrics.
pub fn evaluate_split(
    model: &crate::ensemble::Model,
    test: &Dataset,
    voting: &VotingParams,
) -> Result<FoldMetrics> {
    let labels: Vec<ClassId> = test
        .transactions()
        .iter()
        .map(|t| {
            t.label()
                .ok_or_else(|| Error::invalid("test transactions must be labeled"))
        })
        .collect::<Result<_>>()?;
    let scores = score_batch(model, test.transactions(), voting);

    let positive: Vec<f64> = scores.iter().map(|s| s.get(ClassId(1))).collect();
    let truth: Vec<bool> = labels.iter().map(|&l| l == ClassId(1)).collect();
    let auroc = auroc(&positive, &truth)?;

    let correct = scores
        .iter()
        .zip(&labels)
        .filter(|(s, &l)| argmax_with_priors(s, model.priors()) == l)
        .count();
    Ok(FoldMetrics {
        auroc,
        accuracy: correct as f64 / labels.len() as f64,
        n_test: labels.len(),
    })
}
