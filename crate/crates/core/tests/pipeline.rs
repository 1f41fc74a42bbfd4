//! Library-level pipeline tests: many-partition training, balancing plus
//! coverage in one run, and the model file round trip on a real ensemble.

mod common;

use capmine::capgrowth::{extract_rules, ExtractionParams};
use capmine::captree::build_captree;
use capmine::dataset::Transaction;
use capmine::ensemble::{train, Consolidation, Model, TrainConfig};
use capmine::eval::evaluate_split;
use capmine::predict::{score_batch, VotingParams};

use common::{rule_planted, synthetic_categorical};

fn extraction(minsup: f64) -> ExtractionParams {
    ExtractionParams {
        minsup,
        minconf: 0.5,
        minchi2: 0.0,
    }
}

#[test]
fn hundred_partitions_consolidate_without_growth() {
    let d = synthetic_categorical(10_000, 6, 4242);
    let cfg = TrainConfig {
        n_partitions: 100,
        ratio: 0.01,
        extraction: extraction(0.05),
        consolidation: Consolidation::Max,
        seed: 31,
        coverage: false,
    };
    let model = train(&d, &cfg).unwrap();

    // Replay the sampling to count the pre-consolidation rules.
    let partitions = d.partition_sample(100, 0.01, 31, true).unwrap();
    let mut total = 0usize;
    for part in &partitions {
        assert_eq!(part.len(), 100);
        if let Ok(tree) = build_captree(part, 0.05) {
            total += extract_rules(&tree, &cfg.extraction).len();
        }
    }
    assert!(model.rules().len() <= total);
    assert!(!model.rules().is_empty());
}

#[test]
fn balanced_coverage_training_round_trips_and_predicts() {
    // Skewed 9:1 labels; balance, prune by coverage, then round-trip the
    // model file and score a held-out slice.
    let mut b = capmine::DatasetBuilder::new();
    let skewed = rule_planted(3_000, 0.1, 55);
    for (i, t) in skewed.transactions().iter().enumerate() {
        let items: Vec<&str> = t
            .items()
            .iter()
            .map(|i| skewed.items().display(i.0))
            .collect();
        let label = skewed.labels().display(t.label().unwrap().0);
        // Keep all positives, a third of the negatives.
        if label == "+" || i % 3 == 0 {
            b.add(&items, label);
        }
    }
    let d = b.build();
    let balanced = d.balance_subsample(7).unwrap();
    let counts = balanced.class_counts();
    assert_eq!(counts[0], counts[1]);

    let cfg = TrainConfig {
        n_partitions: 2,
        ratio: 0.5,
        extraction: extraction(0.02),
        consolidation: Consolidation::Min,
        seed: 8,
        coverage: true,
    };
    let model = train(&balanced, &cfg).unwrap();
    assert!(!model.rules().is_empty());

    let text = model.to_text();
    let reparsed = Model::parse_text(&text).unwrap();
    assert_eq!(reparsed.to_text(), text);

    // Scores from the reparsed model must match the in-memory model once
    // records are expressed in its item-id space.
    let v = VotingParams::default();
    let records: Vec<Transaction> = d.transactions()[..200].to_vec();
    let original = score_batch(&model, &records, &v);
    let remapped: Vec<Transaction> = d.transactions()[..200]
        .iter()
        .map(|t| {
            let ids = t
                .items()
                .iter()
                .filter_map(|i| reparsed.items().lookup(d.items().display(i.0)))
                .map(capmine::ItemId)
                .collect();
            Transaction::new(ids, None)
        })
        .collect();
    let reparsed_scores = score_batch(&reparsed, &remapped, &v);
    for (a, b) in original.iter().zip(&reparsed_scores) {
        for (x, y) in a.scores().iter().zip(b.scores()) {
            assert!((x - y).abs() < 1e-9);
        }
    }
}

#[test]
fn holdout_evaluation_beats_chance_on_planted_rules() {
    let d = rule_planted(6_000, 0.1, 99);
    let test = d.subset(&(0..1_000).collect::<Vec<_>>());
    let train_d = d.subset(&(1_000..6_000).collect::<Vec<_>>());
    let cfg = TrainConfig {
        n_partitions: 2,
        ratio: 0.5,
        extraction: extraction(0.02),
        consolidation: Consolidation::Max,
        seed: 19,
        coverage: false,
    };
    let model = train(&train_d, &cfg).unwrap();
    let metrics = evaluate_split(&model, &test, &VotingParams::default()).unwrap();
    assert!(metrics.auroc > 0.9, "auroc {}", metrics.auroc);
    assert!(metrics.accuracy > 0.8, "accuracy {}", metrics.accuracy);
}
